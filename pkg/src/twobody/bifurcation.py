"""The bifurcation locus in the (C, h) plane.

Multiple roots of the boundary quartic in ``y = m3**2`` change the number of
holes in the projected level set.  Dividing the quartic by ``(y - y0)**2``
and asking both remainder coefficients to vanish yields two curves: the
tangent line ``h = C/2`` for ``C >= 2`` and a main curve given implicitly.
The same curves arise as images of the two families of relative equilibria,
which is checked here numerically at high precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .core_model import ParamPair, ReducedState, casimir, hamiltonian_vector_field
from .errors import BracketError, DomainError
from .parallel import thread_map
from .rootfinding import isolate_positive_roots


class EquilibriumFamily(enum.Enum):
    TAN = "TanFamily"
    EQUATOR = "EquatorFamily"

    @classmethod
    def parse(cls, name: str) -> "EquilibriumFamily":
        """Accept the enum value or the short names ``tan`` and ``equator``."""
        short = {"tan": cls.TAN, "equator": cls.EQUATOR}
        if name.lower() in short:
            return short[name.lower()]
        return cls(name)


class CurveLabel(enum.Enum):
    TANGENT = "TangentCurve"
    MAIN = "MainCurve"


@dataclass(frozen=True)
class EquilibriumPoint:
    """A relative equilibrium together with the family parameter that produced it.

    ``parameter`` is the separation ``q`` for the tan family and ``m3`` for
    the equator family.
    """

    state: ReducedState
    family: EquilibriumFamily
    parameter: float

    @property
    def field_norm(self) -> float:
        return float(np.max(np.abs(hamiltonian_vector_field(self.state))))


@dataclass
class BifurcationDiagram:
    """Polylines of the bifurcation locus, one per labelled branch.

    Each curve is an ``(n, 2)`` array of ``(C, h)`` vertices ordered by
    increasing ``C``.
    """

    curves: list[np.ndarray] = field(default_factory=list)
    labels: list[CurveLabel] = field(default_factory=list)

    def curve(self, label: CurveLabel) -> np.ndarray:
        for c, lab in zip(self.curves, self.labels):
            if lab == label:
                return c
        return np.empty((0, 2))

    def param_pairs(self, label: CurveLabel) -> list[ParamPair]:
        return [ParamPair(float(c), float(h)) for c, h in self.curve(label)]

    def squared_view(self) -> list[np.ndarray]:
        """The same curves in ``(C**2, h)`` coordinates."""
        return [np.column_stack([c[:, 0] ** 2, c[:, 1]]) for c in self.curves]


@dataclass(frozen=True)
class CriticalRoot:
    """One closed-form candidate for the double root ``y0``.

    ``value`` is ``nan`` when the candidate does not exist (negative radicand).
    """

    index: int
    value: float
    exists: bool
    positive: bool


def quartic_coeffs(pp: ParamPair) -> np.ndarray:
    """Boundary quartic in ``y = m3**2``, coefficients in descending powers."""
    c, h = pp.c, pp.h
    return np.array(
        [0.25, c / 2 - 2 * h, c**2 / 4 - 2 * c * h + 4 * h**2 + 0.5, 2 * h - 1.5 * c, 0.25]
    )


def remainder_linear_coeffs(pp: ParamPair, y0: float) -> tuple[float, float]:
    """``(linear, constant)`` coefficients of the remainder modulo ``(y - y0)**2``.

    The values belong to four times :func:`quartic_coeffs`, which makes every
    coefficient an integer polynomial in ``(C, h, y0)``.  The scale does not
    move the common zeros.
    """
    c, h = pp.c, pp.h
    lin = (
        2 * c**2 * y0
        - 16 * c * h * y0
        + 6 * c * y0**2
        - 6 * c
        + 32 * h**2 * y0
        - 24 * h * y0**2
        + 8 * h
        + 4 * y0**3
        + 4 * y0
    )
    const = (
        -(c**2) * y0**2
        + 8 * c * h * y0**2
        - 4 * c * y0**3
        - 16 * h**2 * y0**2
        + 16 * h * y0**3
        - 3 * y0**4
        - 2 * y0**2
        + 1
    )
    return float(lin), float(const)


def critical_roots(pp: ParamPair) -> list[CriticalRoot]:
    """The four roots in ``y0`` of the constant remainder coefficient."""
    d = pp.c - 4 * pp.h
    r12 = math.sqrt(d * d + 12)
    # -d - r12 and r12 - d both cancel badly for large |d|; use conjugates
    first = -12 / (6 * (r12 - d)) if d < 0 else (-r12 - d) / 6
    second = 12 / (6 * (r12 + d)) if d > 0 else (r12 - d) / 6
    out = [
        CriticalRoot(0, first, True, first > 0),
        CriticalRoot(1, second, True, second > 0),
    ]
    disc = d * d - 4
    if disc >= 0:
        r4 = math.sqrt(disc)
        for idx, v in ((2, (-r4 - d) / 2), (3, (r4 - d) / 2)):
            out.append(CriticalRoot(idx, v, True, v > 0))
    else:
        out.extend(CriticalRoot(i, math.nan, False, False) for i in (2, 3))
    return out


def _second_root_scaled(d):
    """``6 * y0`` for the always-positive critical root, evaluated stably."""
    d = np.asarray(d, dtype=float)
    r = np.sqrt(d * d + 12)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(d > 0, 12 / (r + d), r - d)


def main_curve_lhs(c, h):
    """Left side of the implicit equation of the main branch (vectorised).

    Negative below the curve and positive above it at every fixed ``C``.
    """
    c = np.asarray(c, dtype=float)
    h = np.asarray(h, dtype=float)
    d = c - 4 * h
    y = _second_root_scaled(d)
    val = y**3 / 54 + d * y**2 / 6 + (d * d + 2) * y / 3 - 6 * c + 8 * h
    return float(val) if val.ndim == 0 else val


def implicit_curve_residual(pp: ParamPair) -> float:
    """Distance-like residual of ``pp`` from the locus (zero on it).

    The tangent branch only counts for ``C >= 2``.
    """
    main = abs(main_curve_lhs(pp.c, pp.h))
    tangent = abs(pp.h - pp.c / 2) if pp.c >= 2 else math.inf
    return min(main, tangent)


def is_on_bifurcation(pp: ParamPair, tol: float = 1e-6) -> bool:
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    return implicit_curve_residual(pp) < tol


def equilibrium_tan_family(q: float, sign: int = 1) -> EquilibriumPoint:
    if not 0.0 < q < math.pi:
        raise DomainError(f"q must lie in (0, pi), got {q}")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    t = math.tan(q / 2)
    xi = 0.0 if q == math.pi / 2 else math.cos(q) / math.sin(q)
    state = ReducedState(xi, 0.0, 0.0, -sign * t**1.5, sign * math.sqrt(t))
    return EquilibriumPoint(state, EquilibriumFamily.TAN, q)


def equilibrium_equator_family(m3: float) -> EquilibriumPoint:
    if m3 == 0 or not math.isfinite(m3):
        raise DomainError("m3 must be finite and non-zero")
    state = ReducedState(0.0, 0.0, 0.0, -1.0 / m3, m3)
    return EquilibriumPoint(state, EquilibriumFamily.EQUATOR, m3)


def curve_from_equilibria(family: EquilibriumFamily | str, parameter: float) -> ParamPair:
    """Image ``(C, h)`` of one relative equilibrium."""
    family = EquilibriumFamily.parse(family) if isinstance(family, str) else family
    if family is EquilibriumFamily.TAN:
        q = parameter
        if not 0.0 < q < math.pi:
            raise DomainError(f"q must lie in (0, pi), got {q}")
        t = math.tan(q / 2)
        cot = 0.0 if q == math.pi / 2 else math.cos(q) / math.sin(q)
        c = t**3 + t
        return ParamPair(c, c / 2 + cot * (t * t + t * cot - 1))
    # evaluated on the state itself so that h == C/2 holds in floating point
    c = casimir(equilibrium_equator_family(parameter).state)
    return ParamPair(c, c / 2)


def _main_curve_mp(c, h):
    d = c - 4 * h
    y = mpmath.sqrt(d * d + 12) - d
    return y**3 / 54 + d * y**2 / 6 + (d * d + 2) * y / 3 - 6 * c + 8 * h


def verify_coincidence(n: int = 1000, dps: int = 60) -> float:
    """Largest residual of the implicit equations along both equilibrium families.

    The tan family is sampled at ``n`` midpoints of a uniform grid on
    ``(0, pi)`` and substituted into the main implicit equation in
    ``dps``-digit arithmetic, since near ``q = pi`` the image has ``C`` of
    order ``1e9`` and double precision cannot resolve a zero residual.  The
    equator family is sampled on ``m3`` in ``[1, 10]`` against ``h = C/2``.
    """
    if n < 10:
        raise DomainError("need at least 10 sample points")
    worst = 0.0
    with mpmath.workdps(dps):
        for k in range(n):
            q = mpmath.mpf(math.pi * (k + 0.5) / n)
            t = mpmath.tan(q / 2)
            cot = mpmath.cot(q)
            c = t**3 + t
            h = c / 2 + cot * (t * t + t * cot - 1)
            worst = max(worst, float(abs(_main_curve_mp(c, h))))
    for m3 in np.linspace(1.0, 10.0, n):
        pp = curve_from_equilibria(EquilibriumFamily.EQUATOR, float(m3))
        worst = max(worst, abs(pp.h - pp.c / 2))
    return worst


def solve_main_h(c: float, tol: float = 1e-10) -> float:
    """Energy of the main branch above a given ``C > 0``."""
    if not c > 0:
        raise BracketError(f"main branch requires C > 0, got C={c}", c=c)
    f = lambda h: main_curve_lhs(c, h)  # noqa: E731
    lo, hi = c / 4 - 1.0, c / 4 + 1.0
    for _ in range(200):
        if f(lo) < 0:
            break
        lo -= 2 * (hi - lo)
    for _ in range(200):
        if f(hi) > 0:
            break
        hi += 2 * (hi - lo)
    flo, fhi = f(lo), f(hi)
    if not (flo < 0 < fhi):
        raise BracketError(f"could not bracket the main branch at C={c}", c=c)
    return brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


def trace_diagram(c_min: float, c_max: float, n: int, *, tol: float = 1e-10) -> BifurcationDiagram:
    """Sample both branches of the locus over ``[c_min, c_max]``.

    The main branch is solved for ``h`` at ``n`` equally spaced values of
    ``C``; the tangent branch is sampled at ``n`` points of
    ``[max(2, c_min), c_max]`` when that range is non-empty.  Every vertex is
    re-checked against the implicit equations.
    """
    if not (0 < c_min < c_max) or n < 2:
        raise DomainError("need 0 < c_min < c_max and n >= 2")
    cs = np.linspace(c_min, c_max, n)
    hs = np.array(thread_map(lambda c: solve_main_h(float(c), tol), cs))
    for c, h in zip(cs, hs):
        if abs(main_curve_lhs(c, h)) >= 1e-8:
            raise BracketError(f"main branch vertex failed verification at C={c}", c=float(c))
    diagram = BifurcationDiagram([np.column_stack([cs, hs])], [CurveLabel.MAIN])
    if c_max >= 2:
        ct = np.linspace(max(2.0, c_min), c_max, n)
        diagram.curves.append(np.column_stack([ct, ct / 2]))
        diagram.labels.append(CurveLabel.TANGENT)
    return diagram


def _tan_image(log_t):
    t = np.exp(log_t)
    cot = (1 - t * t) / (2 * t)
    c = t**3 + t
    return c, c / 2 + cot * (t * t + t * cot - 1)


def distance_to_bifurcation(pp: ParamPair) -> float:
    """Euclidean distance in the (C, h) plane from ``pp`` to the locus.

    The main branch is handled through its tan-family parametrisation
    ``t = tan(q/2)``, which is a smooth curve, so the distance is found by
    a dense scan in ``log t`` refined by a bounded scalar minimisation.
    """
    c0, h0 = pp.c, pp.h
    # tangent half-line h = C/2, C >= 2
    s = max(2.0, (c0 + h0 / 2) / 1.25)
    best = math.hypot(c0 - s, h0 - s / 2)

    grid = np.linspace(math.log(1e-8), math.log(1e4), 6001)
    cs, hs = _tan_image(grid)
    dist2 = (cs - c0) ** 2 + (hs - h0) ** 2
    k = int(np.argmin(dist2))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]

    def d2(lt):
        c, h = _tan_image(lt)
        return (c - c0) ** 2 + (h - h0) ** 2

    res = minimize_scalar(d2, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    best = min(best, math.sqrt(min(res.fun, dist2[k])))
    return best


def multiple_root_present(pp: ParamPair, cluster_width: float = 1e-8) -> bool:
    """True when the quartic has a positive root of multiplicity >= 2."""
    roots = isolate_positive_roots(quartic_coeffs(pp), cluster_width=cluster_width)
    return any(r.multiplicity > 1 for r in roots)
