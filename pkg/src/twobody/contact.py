"""Contact-type certification of the energy hypersurface.

Work on a fixed Casimir sphere in the chart ``(q, p, phi, theta)`` with the
symplectic form ``omega = dp ^ dq + C**1.5 cos(theta) dphi ^ dtheta``.  An
explicit Liouville field ``X`` (``L_X omega = omega``) is provided together
with the pieces needed to show it is transverse to ``{H = h}``:

* inside the image of the projection, every fibre is a convex curve in the
  ``(q, p)`` plane and ``X`` is a central field about the fibre centre;
* on the equator the derivative ``X(H)`` has a closed form;
* on the boundary of the image the transversality reduces to the sign of a
  function ``F(theta)`` of the latitude alone.

Chart order for 4-vectors and 4 x 4 matrices is ``(q, p, phi, theta)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .core_model import ParamPair, spherical_energy_gradient
from .errors import DomainError, FiniteDifferenceWarning, OutOfBandError
from .level_sets import admissible, band_half_width, momentum_radicand, sample_level_set_arrays

Q, P, PHI, THETA = range(4)
_EQUATOR = 1e-12  # |theta| below this is treated as the equator itself
_POLE_MARGIN = 1e-6


@dataclass(frozen=True)
class TangentVector4:
    """Components of a tangent vector in the ``(q, p, phi, theta)`` chart."""

    dq: float
    dp: float
    dphi: float
    dtheta: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_array()):
            raise DomainError("tangent vector components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.dq, self.dp, self.dphi, self.dtheta])


@dataclass(frozen=True)
class FiberCurve:
    """The fibre over ``(theta, phi)`` as a curve in the ``(q, p)`` plane.

    ``(q_peak, p_center)`` is the centre ``O`` of the curve; ``q_min`` and
    ``q_max`` are its extreme separations.
    """

    theta: float
    phi: float
    c: float
    h: float
    q_min: float
    q_max: float
    q_peak: float
    p_center: float

    @classmethod
    def build(cls, theta: float, phi: float, c: float, h: float) -> "FiberCurve":
        from .level_sets import _q_interval

        if abs(theta) < _EQUATOR:
            raise DomainError("equatorial fibres are unbounded parabolas")
        q_lo, q_hi = _q_interval(np.array([theta]), np.array([phi]), c, h)
        f1, f2 = liouville_center(theta, phi, c)
        return cls(theta, phi, c, h, float(q_lo[0]), float(q_hi[0]), f2, f1)

    def points(self, n: int, branch: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """``n`` points ``(q, p)`` of one branch, strictly inside ``(q_min, q_max)``."""
        q = self.q_min + (np.arange(n) + 0.5) / n * (self.q_max - self.q_min)
        rad = np.maximum(momentum_radicand(q, self.theta, self.phi, self.c, self.h), 0.0)
        return q, self.p_center + branch * np.sqrt(rad) / 2


def symplectic_matrix(theta: float, c: float) -> np.ndarray:
    """Matrix ``W[i, j] = omega(e_i, e_j)`` in chart order."""
    if not abs(theta) < math.pi / 2:
        raise DomainError("theta must satisfy |theta| < pi/2")
    return _omega(theta, c)


def _peak_angle(theta, phi, c):
    s = np.sin(theta)
    u = c * np.cos(theta) / s * np.sin(phi) + 1 / (s * s)
    raw = np.arctan(2 * c / u)
    return np.where(raw <= 0, raw + np.pi, raw), u


def liouville_center(theta, phi, c):
    """Centre ``(f1, f2)`` of the fibre, as ``(p, q)``.

    ``f2`` is the separation maximising the momentum radicand, with the
    arctangent branch chosen in ``(0, pi)``.  On the equator it is extended
    by its limit 0.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    f1 = np.sqrt(c) * np.cos(theta) * np.cos(phi) / 2
    eq = np.abs(theta) < _EQUATOR
    with np.errstate(divide="ignore", invalid="ignore"):
        f2, _ = _peak_angle(np.where(eq, 1.0, theta), phi, c)
    f2 = np.where(eq, 0.0, f2)
    if f1.ndim == 0 and f2.ndim == 0:
        return float(f1), float(f2)
    return f1, f2


def q_peak(theta: float, phi: float, c: float) -> float:
    """Separation at which the fibre over ``(theta, phi)`` is widest in ``p``."""
    if abs(theta) < _EQUATOR:
        raise DomainError("the peak is undefined on the equator")
    return float(_peak_angle(theta, phi, c)[0])


def _angular_terms(q, p, theta, phi, c):
    """The bracketed ``phi`` and ``theta`` coefficients before halving."""
    s, co = np.sin(theta), np.cos(theta)
    sc = np.sqrt(c)
    u = c * co / s * np.sin(phi) + 1 / (s * s)
    d = 4 * c * c + u * u
    f3 = 2 * p / (s * s * co) * (c * np.sin(phi) + 2 * co / s) / (sc * d) + q * np.tan(theta) * np.cos(phi) / (2 * c)
    f4 = 2 * sc * p / s * np.cos(phi) / d + 2 * np.tan(theta) - q * np.sin(phi) / (2 * c)
    return f3, f4


def liouville_components(q, p, theta, phi, c):
    """Vectorised Liouville field; returns the four chart components.

    The field is ``X = ((q - f2), (p - f1), f3, f4) / 2``.  On the equator
    the ``phi`` component vanishes and the ``theta`` component reduces to
    ``-q sin(phi) / (4 C)``.
    """
    q, p, theta, phi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (q, p, theta, phi)))
    f1, f2 = liouville_center(theta, phi, c)
    eq = np.abs(theta) < _EQUATOR
    safe = np.where(eq, 1.0, theta)
    f3, f4 = _angular_terms(q, p, safe, phi, c)
    f3 = np.where(eq, 0.0, f3)
    f4 = np.where(eq, -q * np.sin(phi) / (2 * c), f4)
    return (q - f2) / 2, (p - f1) / 2, f3 / 2, f4 / 2


def liouville_field(q: float, p: float, theta: float, phi: float, c: float) -> TangentVector4:
    comps = liouville_components(q, p, theta, phi, c)
    return TangentVector4(*(float(v) for v in comps))


def lie_derivative_matrix(q, p, theta, phi, c: float, step: float = 1e-5, field: Callable | None = None) -> np.ndarray:
    """``L_X omega`` from central differences of the field, shape ``(..., 4, 4)``.

    ``(L_X w)_ij = X^k d_k w_ij + w_kj d_i X^k + w_ik d_j X^k``; only
    ``w[phi, theta]`` depends on the point (through ``theta``).  Each step is
    ``step * max(1, |x_i|)``.  Inputs broadcast, so whole batches of points
    are handled in one call.
    """
    field = field or liouville_components
    x = np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (q, p, phi, theta))), axis=-1)

    def eval_at(v):
        return np.stack(np.broadcast_arrays(*field(v[..., Q], v[..., P], v[..., THETA], v[..., PHI], c)), axis=-1)

    jac = np.empty(x.shape[:-1] + (4, 4))  # jac[..., k, i] = d_i X^k
    for i in range(4):
        hi = step * np.maximum(1.0, np.abs(x[..., i]))
        e = np.zeros_like(x)
        e[..., i] = hi
        jac[..., :, i] = (eval_at(x + e) - eval_at(x - e)) / (2 * hi[..., None])
    xv = eval_at(x)
    th = x[..., THETA]
    w = _omega(th, c)
    dw = np.zeros_like(w)
    dg = -(c**1.5) * np.sin(th)
    dw[..., PHI, THETA], dw[..., THETA, PHI] = dg, -dg
    return xv[..., THETA, None, None] * dw + np.swapaxes(jac, -1, -2) @ w + w @ jac


def _omega(theta, c):
    theta = np.asarray(theta, dtype=float)
    w = np.zeros(theta.shape + (4, 4))
    g = c**1.5 * np.cos(theta)
    w[..., P, Q], w[..., Q, P] = 1.0, -1.0
    w[..., PHI, THETA], w[..., THETA, PHI] = g, -g
    return w


def lie_derivative_residual(
    q,
    p,
    theta,
    phi,
    c: float,
    step: float = 1e-5,
    field: Callable | None = None,
    richardson: bool = False,
):
    """``max |L_X omega - omega|`` over matrix entries (per point for arrays).

    With ``richardson=True`` the estimate is repeated with half the step and
    a :class:`FiniteDifferenceWarning` is issued when the two disagree by
    more than 10 % of ``max |omega|``.
    """
    lx = lie_derivative_matrix(q, p, theta, phi, c, step, field)
    w = _omega(np.broadcast_to(np.asarray(theta, dtype=float), lx.shape[:-2]), c)
    if richardson:
        half = lie_derivative_matrix(q, p, theta, phi, c, step / 2, field)
        if np.any(np.max(np.abs(half - lx), axis=(-1, -2)) > 0.1 * np.max(np.abs(w), axis=(-1, -2))):
            warnings.warn("finite-difference Lie derivative is step-size sensitive", FiniteDifferenceWarning, stacklevel=2)
    res = np.max(np.abs(lx - w), axis=(-1, -2))
    return float(res) if res.ndim == 0 else res


def p_branches(q: float, theta: float, phi: float, c: float, h: float) -> tuple[float, ...]:
    """Momenta on the energy level above ``(q, theta, phi)``, ascending."""
    if not 0.0 < q < math.pi:
        raise DomainError(f"q must lie in (0, pi), got {q}")
    rad = float(momentum_radicand(q, theta, phi, c, h))
    mid = math.sqrt(c) * math.cos(theta) * math.cos(phi) / 2
    if rad > 1e-12:
        r = math.sqrt(rad) / 2
        return (mid - r, mid + r)
    if rad >= -1e-12:
        return (mid,)
    return ()


def equator_transversality(p, q, phi, c):
    """The closed-form equatorial expression ``(sqrt2 p - sqrt(C) cos(phi)/sqrt2)^2 + q csc^2 q``.

    It is positive for all ``q`` in ``(0, pi)``.  The exact derivative of the
    energy along the field on the equator is
    :func:`equator_liouville_derivative`.
    """
    p, q, phi = (np.asarray(v, dtype=float) for v in (p, q, phi))
    val = (math.sqrt(2) * p - math.sqrt(c) * np.cos(phi) / math.sqrt(2)) ** 2 + q / np.sin(q) ** 2
    return float(val) if val.ndim == 0 else val


def equator_liouville_derivative(p, q, phi, c):
    """``X(H)`` on the equator.

    Equal to half of :func:`equator_transversality` plus
    ``q cot(q) sin(phi)**2 / 4``; positive because
    ``2 + sin(q) cos(q) sin(phi)**2 > 0``.
    """
    p, q, phi = (np.asarray(v, dtype=float) for v in (p, q, phi))
    val = equator_transversality(p, q, phi, c) / 2 + q / np.tan(q) * np.sin(phi) ** 2 / 4
    return float(val) if np.ndim(val) == 0 else val


def liouville_derivative(q, p, theta, phi, c):
    """``X(H)``: derivative of the energy along the Liouville field (vectorised)."""
    x = liouville_components(q, p, theta, phi, c)
    g = spherical_energy_gradient(q, p, theta, phi, c)
    return sum(a * b for a, b in zip(x, g))


def boundary_sin_phi(theta, c, h):
    """``sin(phi)`` on the zero set of :func:`admissible` at latitude ``theta``."""
    theta = np.asarray(theta, dtype=float)
    return (c - 2 * h) * np.tan(theta) - 1 / (c * np.sin(2 * theta)) - c * np.sin(theta) * np.cos(theta) / 2


def boundary_preimage(theta: float, c: float, h: float, branch: int = 1) -> tuple[float, float, float, float]:
    """``(p, q, sin phi, cos phi)`` of the single fibre point over a boundary point."""
    if branch not in (1, -1):
        raise DomainError("branch must be +1 or -1")
    if abs(theta) < _EQUATOR:
        raise DomainError("the equator is interior to the image")
    sp = float(boundary_sin_phi(theta, c, h))
    if abs(sp) > 1 + 1e-12:
        raise OutOfBandError(f"no boundary point at latitude {theta} (sin(phi) = {sp})")
    sp = max(-1.0, min(1.0, sp))
    cp = branch * math.sqrt(1 - sp * sp)
    phi = math.atan2(sp, cp)
    f1, f2 = liouville_center(theta, phi, c)
    return f1, f2, sp, cp


def outward_normal(theta, phi, c):
    """Outward normal of the image boundary in ``(phi, theta)`` components.

    It is a negative multiple of the gradient of :func:`admissible`, i.e. it
    points towards the inadmissible side.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    s = np.sin(theta)
    n_phi = -2 * np.cos(theta) / s * np.cos(phi)
    n_theta = 2 / (s * s) * (c * (c * s**3 * np.cos(theta) + np.sin(phi)) + np.cos(theta) / s) / c
    return n_phi, n_theta


def f_theta_assembled(theta: float, c: float, h: float, branch: int = 1) -> float:
    """Boundary transversality assembled from the normal and the field.

    Returns ``n . (f3, f4)`` at the boundary preimage, where ``(f3, f4)`` is
    twice the angular part of the Liouville field.  It has the sign of
    ``n . X`` and coincides with :func:`f_theta`.
    """
    p, q, sp, cp = boundary_preimage(theta, c, h, branch)
    phi = math.atan2(sp, cp)
    n_phi, n_theta = outward_normal(theta, phi, c)
    f3, f4 = _angular_terms(q, p, theta, phi, c)
    return float(n_phi * f3 + n_theta * f4)


def _f_theta_raw(theta, c, h):
    s, co = np.sin(theta), np.cos(theta)
    t, cot, csc, sec = s / co, co / s, 1 / s, 1 / co
    one_minus_s2 = 1 - (t * (c * np.cos(2 * theta) - 3 * c + 8 * h) / 4 + 1 / (c * np.sin(2 * theta))) ** 2
    dp = 4 * c * c + (csc**2 - c * (c * co**2 - 2 * c + 4 * h)) ** 2 / 4
    at = np.arctan(4 * c * csc / (c * c * s + c * c * csc - 4 * c * h * csc + csc**3))
    a = (c * c * np.sin(2 * theta) - cot * (c * c - 2 * csc**2) + 2 * c * (c - 2 * h) * csc * sec - csc**3 * sec) / c
    b = c * cot * one_minus_s2 / dp + t * (c * c * co**2 - 2 * c * c + 4 * c * h + csc**2) * at / (4 * c * c) + 2 * t
    e = cot * one_minus_s2 * (
        t * at / c + 2 * csc**2 * (-c * t * (c * np.cos(2 * theta) - 3 * c + 8 * h) / 4 + 2 * cot - 1 / np.sin(2 * theta)) / dp
    )
    return a * b - e


def f_theta(theta, c: float, h: float, check_band: bool = True):
    """Transversality function ``F(theta)`` on the boundary of the image.

    The expression is quadratic in ``cos(phi)`` and so independent of the
    choice of boundary branch.  It is defined on the whole permitted band,
    including latitudes where no boundary point exists.

    Raises
    ------
    OutOfBandError
        If ``check_band`` and some ``|theta|`` exceeds the band half-width.
    DomainError
        If some ``theta`` is zero.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) < _EQUATOR):
        raise DomainError("F is singular at theta = 0")
    if check_band:
        width = band_half_width(c, h)
        if np.any(np.abs(theta) > width * (1 + 1e-12)):
            raise OutOfBandError(f"latitude outside the permitted band |theta| <= {width}")
    theta = np.clip(theta, -math.pi / 2 + _POLE_MARGIN, math.pi / 2 - _POLE_MARGIN)
    val = _f_theta_raw(theta, c, h)
    return float(val) if val.ndim == 0 else val


def f_theta_series(theta, c: float, h: float):
    """Expansion of :func:`f_theta` about ``theta = 0`` through ``theta**2``."""
    theta = np.asarray(theta, dtype=float)
    lead = (2 * c + 3) / (c * c * theta**2)
    const = 1 / c**2 + (36 * h - 4 / 3) / c + 2 * c - 8 * h - 17
    quad = theta**2 * (c * (5 * c * (24 * (4 * c * c - 24 * c * h + c + 32 * h * h) - 24 * h - 127) - 28) + 3) / (15 * c * c)
    val = lead + const + quad
    return float(val) if val.ndim == 0 else val


def f_theta_leading(c: float) -> float:
    """Limit of ``theta**2 F(theta)`` as ``theta -> 0``."""
    return (2 * c + 3) / (c * c)


def permitted_theta_interval(c: float, h: float) -> tuple[float, float]:
    """Symmetric latitude band ``(-w, w)`` containing the image of the projection."""
    w = band_half_width(c, h)
    return -w, w


def f_theta_grid(c: float, h: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``F`` on ``n`` latitudes spread over the punctured permitted band."""
    w = min(band_half_width(c, h), math.pi / 2 - _POLE_MARGIN)
    half = (np.arange(n // 2) + 0.5) / (n // 2) * w
    theta = np.concatenate([-half[::-1], half])
    return theta, f_theta(theta, c, h, check_band=False)


def min_transversality(pp: ParamPair, n: int, seed: int = 0, **sample_kwargs) -> float:
    """Smallest ``X(H)`` over ``n`` random points of the level set.

    A positive value certifies transversality on the sample only.
    """
    smp = sample_level_set_arrays(pp, n, seed, **sample_kwargs)
    if len(smp) == 0:
        return math.inf
    return float(np.min(liouville_derivative(smp.q, smp.p, smp.theta, smp.phi, pp.c)))


def contact_threshold(
    c: float,
    h_low: float = -1e4,
    h_high: float = 0.0,
    n: int = 10_000,
    seed: int = 0,
    tol: float = 1e-3,
) -> float:
    """Empirical energy below which ``X(H) > 0`` on every sample.

    Bisects on ``h`` between ``h_low`` (where the sampled minimum must be
    positive) and ``h_high`` (where it must not be).  The sampled minimum is
    assumed monotone in ``h``; the result is a measurement, not a bound.
    """

    def positive(h):
        return min_transversality(ParamPair(c, h), n, seed) > 0

    if not positive(h_low):
        raise DomainError(f"X(H) is not positive on the sample at h_low={h_low}")
    if positive(h_high):
        return h_high
    lo, hi = h_low, h_high
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if positive(mid):
            lo = mid
        else:
            hi = mid
    return lo


def boundary_theta_range(c: float, h: float, n: int = 20_000) -> tuple[float, float] | None:
    """Positive latitudes where boundary points exist, i.e. ``|sin phi| <= 1``."""
    w = min(band_half_width(c, h), math.pi / 2 - _POLE_MARGIN)
    th = (np.arange(n) + 0.5) / n * w
    ok = np.abs(boundary_sin_phi(th, c, h)) <= 1
    if not ok.any():
        return None
    idx = np.flatnonzero(ok)
    g = lambda t: abs(float(boundary_sin_phi(t, c, h))) - 1  # noqa: E731
    lo = float(th[idx[0]])
    # the boundary closes up at the band edge, where |sin phi| = 1
    hi = float(w)
    if idx[0] > 0:
        lo = brentq(g, th[idx[0] - 1], th[idx[0]], xtol=1e-15)
    if idx[-1] < n - 1:
        hi = brentq(g, th[idx[-1]], th[idx[-1] + 1], xtol=1e-15)
    return lo, hi


__all__ = [
    "FiberCurve",
    "TangentVector4",
    "admissible",
    "boundary_preimage",
    "boundary_sin_phi",
    "boundary_theta_range",
    "contact_threshold",
    "equator_liouville_derivative",
    "equator_transversality",
    "f_theta",
    "f_theta_assembled",
    "f_theta_grid",
    "f_theta_leading",
    "f_theta_series",
    "lie_derivative_matrix",
    "lie_derivative_residual",
    "liouville_center",
    "liouville_components",
    "liouville_derivative",
    "liouville_field",
    "min_transversality",
    "outward_normal",
    "p_branches",
    "permitted_theta_interval",
    "q_peak",
    "symplectic_matrix",
]
