"""Real root isolation for polynomials with floating-point coefficients.

Roots on the positive half-line are isolated with Descartes' rule of signs
on dyadic subintervals (the Vincent-Collins-Akritas bisection scheme).  Float
coefficients are converted exactly to integers, so every Taylor shift and
every sign evaluation is exact; the only tolerances are the refinement width
of simple roots and the width below which an interval that still carries two
or more sign variations is reported as a single multiple root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence


@dataclass(frozen=True)
class RootInterval:
    """An interval ``[lo, hi]`` holding a root of the given multiplicity.

    ``lo == hi`` when the root was hit exactly.  For clusters the
    multiplicity is the Descartes bound on the number of roots inside,
    counted with multiplicity.
    """

    lo: float
    hi: float
    multiplicity: int

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def is_simple(self) -> bool:
        return self.multiplicity == 1


def _to_integer_poly(coeffs: Sequence[float]) -> list[int]:
    """Ascending integer coefficients proportional to ``coeffs`` (given descending)."""
    fr = [Fraction(c) for c in reversed(list(coeffs))]
    while fr and fr[-1] == 0:
        fr.pop()
    if not fr:
        raise ValueError("the zero polynomial has no isolated roots")
    den = lcm(*(f.denominator for f in fr))
    return [int(f * den) for f in fr]


def _sign_variations(a: Sequence[int]) -> int:
    count, last = 0, 0
    for v in a:
        if v:
            if last and (v > 0) != (last > 0):
                count += 1
            last = v
    return count


def _taylor_shift_one(a: Sequence[int]) -> list[int]:
    """Coefficients of ``a(t + 1)`` (ascending order)."""
    b = list(a)
    n = len(b)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            b[j] += b[j + 1]
    return b


def _descartes_bound(a: Sequence[int]) -> int:
    """Upper bound on the roots of ``a`` in the open interval ``(0, 1)``."""
    return _sign_variations(_taylor_shift_one(a[::-1]))


def _halve(a: Sequence[int]) -> list[int]:
    """``2**d * a(t / 2)`` for degree ``d``."""
    d = len(a) - 1
    return [c << (d - i) for i, c in enumerate(a)]


def _eval_sign_at(a: Sequence[int], num: int, shift: int) -> int:
    """Sign of ``a(num / 2**shift)``."""
    acc = 0
    for i, c in enumerate(reversed(a)):
        acc = acc * num + (c << (shift * i))
    return (acc > 0) - (acc < 0)


def cauchy_bound(coeffs: Sequence[float]) -> float:
    """Upper bound on the magnitude of every root (coefficients descending)."""
    lead = coeffs[0]
    if lead == 0:
        raise ValueError("leading coefficient must be non-zero")
    return 1.0 + max((abs(c / lead) for c in coeffs[1:]), default=0.0)


def isolate_positive_roots(
    coeffs: Sequence[float],
    *,
    upper: float | None = None,
    refine_width: float = 1e-12,
    cluster_width: float = 1e-8,
) -> list[RootInterval]:
    """Isolate the real roots in ``(0, upper]`` of a polynomial.

    Parameters
    ----------
    coeffs : sequence of float
        Coefficients in descending powers; the leading one must be non-zero.
    upper : float, optional
        Discard roots above this value.  Defaults to no limit.
    refine_width : float
        Simple roots are refined by exact bisection to this width.
    cluster_width : float
        An interval narrower than this that still has two or more sign
        variations is reported as one root of that multiplicity.

    Returns
    -------
    list of RootInterval
        Sorted by position.

    Examples
    --------
    >>> [(r.lo, r.multiplicity) for r in isolate_positive_roots([0.25, -1, 1.5, -1, 0.25])]
    [(1.0, 4)]
    """
    coeffs = [float(c) for c in coeffs]
    while coeffs and coeffs[0] == 0.0:
        coeffs.pop(0)
    poly = _to_integer_poly(coeffs)
    while poly and poly[0] == 0:  # roots at zero are not positive
        poly.pop(0)
    degree = len(poly) - 1
    if degree <= 0:
        return []

    # y = 2**e * x maps x in [0, 1] onto [0, B]; B strictly exceeds every root
    e = max(int(cauchy_bound(coeffs)).bit_length(), 1)
    scale = 2.0**e
    base = [c << (e * i) for i, c in enumerate(poly)]

    found: list[RootInterval] = []
    # nodes: (poly on [0, 1], c, k) representing x in [c / 2**k, (c + 1) / 2**k]
    stack = [(base, 0, 0)]
    while stack:
        a, c, k = stack.pop()
        var = _descartes_bound(a)
        if var == 0:
            continue
        lo, hi = scale * c / 2**k, scale * (c + 1) / 2**k
        if var == 1:
            found.append(_refine(a, c, k, scale, refine_width))
            continue
        if hi - lo < cluster_width:
            found.append(RootInterval(lo, hi, var))
            continue
        left = _halve(a)
        right = _taylor_shift_one(left)
        mult = 0
        while right[0] == 0:
            right.pop(0)
            mult += 1
        if mult:
            mid = scale * (2 * c + 1) / 2 ** (k + 1)
            found.append(RootInterval(mid, mid, mult))
        if len(right) > 1:
            stack.append((right, 2 * c + 1, k + 1))
        stack.append((left, 2 * c, k + 1))

    found.sort(key=lambda r: r.lo)
    if upper is not None:
        found = [r for r in found if r.lo <= upper]
    return found


def _refine(a: list[int], c: int, k: int, scale: float, width: float) -> RootInterval:
    """Bisect the single root of node polynomial ``a`` inside ``(0, 1)``.

    ``a(0)`` is non-zero (exact endpoint roots were divided out), so the sign
    there is a valid reference even when ``t = 1`` is itself a root.
    """
    num_lo, num_hi, shift = 0, 1, 0
    s_lo = (a[0] > 0) - (a[0] < 0)
    span = scale / 2**k

    def to_y(num: int, sh: int) -> float:
        return float(span * (Fraction(c) + Fraction(num, 2**sh)))

    while span * (num_hi - num_lo) / 2**shift > width and shift < 1100:
        num_lo, num_hi, shift = 2 * num_lo, 2 * num_hi, shift + 1
        mid = num_lo + 1
        s_mid = _eval_sign_at(a, mid, shift)
        if s_mid == 0:
            y = to_y(mid, shift)
            return RootInterval(y, y, 1)
        if s_mid == s_lo:
            num_lo = mid
        else:
            num_hi = mid
    return RootInterval(to_y(num_lo, shift), to_y(num_hi, shift), 1)
