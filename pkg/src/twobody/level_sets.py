"""Common level sets of the energy and the Casimir.

Projecting ``Sigma_{C,h} = {C = c, H = h}`` onto the Casimir sphere, each
fibre is an ellipse, a point, empty, or (on the equator ``m3 = 0``) a
parabola.  The image of the projection is the sphere with 0, 2 or 4 holes,
and the hole count fixes the topology of the compactified level set.

Two independent hole counters are provided: an algebraic one that counts
roots of a quartic in ``y = m3**2`` and a brute-force flood fill of the
inadmissible region on a latitude/longitude grid.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.optimize import brentq

from .bifurcation import is_on_bifurcation, quartic_coeffs
from .config import DEFAULT_TOLERANCES
from .core_model import (
    ParamPair,
    ReducedState,
    SphericalPoint,
    spherical_energy,
    spherical_energy_scale,
)
from .errors import (
    DegenerateParametersError,
    DomainError,
    EmptyLevelSetError,
    EquatorError,
    PreconditionError,
    ResolutionWarning,
)
from .rootfinding import isolate_positive_roots


class FiberType(enum.Enum):
    ELLIPSE = "Ellipse"
    PARABOLA = "Parabola"
    POINT = "Point"
    EMPTY = "Empty"


class TopologyClass(enum.Enum):
    S1xS2 = "S1xS2"
    CONNSUM3_S1xS2 = "ConnSum3_S1xS2"
    CIRCLE = "Circle"
    EMPTY = "Empty"
    ON_BIFURCATION = "OnBifurcation"


@dataclass(frozen=True)
class CompactPoint:
    """A point of ``S^2 x R^3``: the stereographic sphere and the momentum.

    ``z == 1`` is the point added at infinity to each parabolic fibre.
    """

    x: float
    y: float
    z: float
    m1: float
    m2: float
    m3: float

    @classmethod
    def from_state(cls, s: ReducedState) -> "CompactPoint":
        """Inverse stereographic image of ``(xi, p)``; ``x = xi (1 - z)``, ``y = p (1 - z)``."""
        r2 = s.xi**2 + s.p**2
        one_minus_z = 2.0 / (r2 + 1.0)
        return cls(s.xi * one_minus_z, s.p * one_minus_z, 1.0 - one_minus_z, s.m1, s.m2, s.m3)


def fiber_rhs(m1, m2, m3, pp: ParamPair):
    """Right side of the completed-square form of the energy at a sphere point.

    The fibre over ``(m1, m2, m3)`` is an ellipse when this is positive, a
    point when zero and empty when negative.
    """
    m3 = np.asarray(m3, dtype=float)
    if np.any(m3 == 0):
        raise EquatorError("the completed square is undefined on the equator m3 = 0")
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    val = 2 * pp.h - pp.c + m1**2 / 2 + (m2 * m3 + 1) ** 2 / (2 * m3**2)
    return float(val) if val.ndim == 0 else val


def classify_fiber(m1: float, m2: float, m3: float, pp: ParamPair, tol: float | None = None) -> FiberType:
    if tol is None:
        tol = DEFAULT_TOLERANCES.fiber
    if m3 == 0:
        return FiberType.PARABOLA
    v = fiber_rhs(m1, m2, m3, pp)
    if v > tol:
        return FiberType.ELLIPSE
    if v < -tol:
        return FiberType.EMPTY
    return FiberType.POINT


def admissible(theta, phi, pp: ParamPair):
    """Admissibility function on the sphere; non-negative exactly on the image.

    It equals ``2 * fiber_rhs`` at the corresponding point of ``S^2_C``.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, h = pp.c, pp.h
    s = np.sin(theta)
    val = c * np.cos(theta) ** 2 + 1 / (c * s * s) - 2 * c + 2 * np.cos(theta) / s * np.sin(phi) + 4 * h
    return float(val) if val.ndim == 0 else val


def band_profile(theta, c: float, h: float):
    """Maximum over longitude of :func:`admissible` at latitude ``theta``.

    Even in ``theta`` and strictly decreasing in ``|theta|``.
    """
    theta = np.abs(np.asarray(theta, dtype=float))
    val = c * np.cos(theta) ** 2 + 1 / (c * np.sin(theta) ** 2) - 2 * c + 2 / np.tan(theta) + 4 * h
    return float(val) if val.ndim == 0 else val


def band_half_width(c: float, h: float) -> float:
    """Largest latitude reached by the image of the projection.

    Returns ``pi/2`` when the whole sphere is admissible at the poles.
    """
    if not c > 0:
        raise DomainError(f"Casimir value must be positive, got {c}")
    if 1 / c - 2 * c + 4 * h >= 0:
        return math.pi / 2
    lo = 1e-12
    while band_profile(lo, c, h) <= 0:
        lo /= 1e3
        if lo < 1e-300:
            raise DomainError(f"no admissible latitude found for (C, h) = ({c}, {h})")
    return brentq(lambda t: band_profile(t, c, h), lo, math.pi / 2, xtol=1e-15, rtol=1e-15)


def boundary_roots(pp: ParamPair, tol=None):
    """Roots ``y = m3**2`` in ``(0, C]`` where the image boundary meets ``m1 = 0``.

    Raises :class:`DegenerateParametersError` when a multiple root is
    detected, which happens exactly on the bifurcation locus.
    """
    tol = tol or DEFAULT_TOLERANCES
    if not pp.c > 0:
        raise DomainError(f"hole counting needs C > 0, got {pp.c}")
    roots = isolate_positive_roots(
        quartic_coeffs(pp), upper=pp.c, refine_width=tol.root_refine, cluster_width=tol.root_cluster
    )
    for r in roots:
        if r.multiplicity > 1:
            raise DegenerateParametersError(
                f"multiple root near y={r.midpoint:.12g} (multiplicity {r.multiplicity}); "
                f"(C, h) = ({pp.c}, {pp.h}) lies on the bifurcation locus"
            )
    return [r.midpoint for r in roots if _sign_consistent(r.midpoint, pp)]


def _sign_consistent(y: float, pp: ParamPair) -> bool:
    """Whether ``y`` solves the unsquared boundary equation for some sign of ``m2``."""
    c, h = pp.c, pp.h
    m3 = math.sqrt(y)
    m2 = math.sqrt(max(c - y, 0.0))
    base = 2 * h - c / 2 - y / 2 + 1 / (2 * y)
    scale = abs(2 * h) + c / 2 + y / 2 + 1 / (2 * y) + m2 / m3
    return min(abs(base + m2 / m3), abs(base - m2 / m3)) <= 1e-6 * scale


def hole_count_fast(pp: ParamPair, tol=None) -> int:
    """Number of holes in the image of the projection, from the boundary quartic.

    Each positive root ``y <= C`` is one pair of antipodal intersection points
    of the image boundary with the great circle ``m1 = 0``, and each hole
    boundary crosses that circle twice, so the count of holes equals the
    number of distinct roots.

    Raises
    ------
    DomainError
        If ``C <= 0``.
    DegenerateParametersError
        If the quartic has a multiple root (``(C, h)`` on the locus).
    """
    return len(boundary_roots(pp, tol))


def _grid(n_theta: int, n_phi: int):
    theta = -math.pi / 2 + (np.arange(n_theta) + 0.5) * math.pi / n_theta
    phi = (np.arange(n_phi) + 0.5) * 2 * math.pi / n_phi
    return theta, phi


def inadmissible_mask(pp: ParamPair, n_theta: int, n_phi: int) -> np.ndarray:
    theta, phi = _grid(n_theta, n_phi)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    with np.errstate(divide="ignore"):
        vals = admissible(t, p, pp)
    vals[t == 0] = np.inf  # the equator is always admissible
    return vals < 0


def hole_count_oracle(pp: ParamPair, n_theta: int = 512, n_phi: int = 1024) -> int:
    """Brute-force hole count by labelling the inadmissible cells of a grid.

    Cells are 4-connected, longitude wraps around, and all cells of the
    first (last) latitude row meet at the south (north) pole.
    """
    if not pp.c > 0:
        raise DomainError(f"hole counting needs C > 0, got {pp.c}")
    if n_theta < 128 or n_phi < 256:
        raise PreconditionError("the oracle needs at least a 128 x 256 grid")
    bad = inadmissible_mask(pp, n_theta, n_phi)
    labels, n = ndimage.label(bad)
    if n == 0:
        return 0
    parent = np.arange(n + 1)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        if a and b:
            parent[find(a)] = find(b)

    for i in range(n_theta):
        union(labels[i, 0], labels[i, -1])
    pole_bad = 1 / pp.c - 2 * pp.c + 4 * pp.h < 0  # admissible is constant at each pole
    for row in (0, n_theta - 1) if pole_bad else ():
        ids = np.unique(labels[row])
        ids = ids[ids > 0]
        for a in ids[1:]:
            union(a, ids[0])

    roots = {find(a) for a in range(1, n + 1)}
    sizes = ndimage.sum_labels(bad, labels, np.arange(1, n + 1))
    comp = {}
    for a, sz in zip(range(1, n + 1), sizes):
        r = find(a)
        comp[r] = comp.get(r, 0) + sz
    if min(comp.values()) < 4:
        warnings.warn(
            f"a hole at (C, h) = ({pp.c}, {pp.h}) spans fewer than 4 grid cells; refine the grid",
            ResolutionWarning,
            stacklevel=2,
        )
    return len(roots)


def classify_topology(pp: ParamPair, tol=None) -> TopologyClass:
    """Topology of the compactified level set.

    ``C = 0`` gives a circle.  Otherwise 0 or 2 holes give ``S1 x S2`` and
    4 holes give the connected sum of three copies of ``S1 x S2``.
    Parameters on the bifurcation locus are reported as such.
    """
    tol = tol or DEFAULT_TOLERANCES
    if pp.c == 0:
        return TopologyClass.CIRCLE
    if is_on_bifurcation(pp, tol.bifurcation):
        return TopologyClass.ON_BIFURCATION
    try:
        holes = hole_count_fast(pp, tol)
    except DegenerateParametersError:
        return TopologyClass.ON_BIFURCATION
    return TopologyClass.CONNSUM3_S1xS2 if holes == 4 else TopologyClass.S1xS2


def compactified_residuals(cp: CompactPoint, pp: ParamPair) -> np.ndarray:
    """Residuals of the three polynomials cutting out the compactified level set."""
    x, y, z, m1, m2, m3 = cp.x, cp.y, cp.z, cp.m1, cp.m2, cp.m3
    msum = m1 * m1 + m2 * m2 + m3 * m3
    w = 1 - z
    third = (msum - 2 * pp.h) * w * w + 2 * y * y - 2 * m1 * y * w + 2 * m3 * m3 * x * x - 2 * x * w * (1 + m2 * m3)
    return np.array([msum - pp.c, x * x + y * y + z * z - 1, third])


def jacobian_matrix(cp: CompactPoint, pp: ParamPair) -> np.ndarray:
    """6 x 3 Jacobian of the three polynomials in ``(x, y, z, m1, m2, m3)``.

    In the third column the sum ``m1**2 + m2**2 + m3**2`` is replaced by
    ``C``, which is legitimate on the variety and only adds multiples of the
    second column elsewhere.
    """
    x, y, z, m1, m2, m3 = cp.x, cp.y, cp.z, cp.m1, cp.m2, cp.m3
    c, h = pp.c, pp.h
    w = 1 - z
    return np.array(
        [
            [2 * x, 0.0, 4 * m3 * m3 * x - 2 * w * (1 + m2 * m3)],
            [2 * y, 0.0, 4 * y - 2 * m1 * w],
            [2 * z, 0.0, -(2 * c - 4 * h) * w + 2 * m1 * y + 2 * x * (1 + m2 * m3)],
            [0.0, 2 * m1, -2 * y * w],
            [0.0, 2 * m2, -2 * x * w * m3],
            [0.0, 2 * m3, 4 * m3 * x * x - 2 * x * w * m2],
        ]
    )


def jacobian_rank(cp: CompactPoint, pp: ParamPair, tol=None) -> int:
    tol = tol or DEFAULT_TOLERANCES
    res = compactified_residuals(cp, pp)
    if np.max(np.abs(res)) >= tol.variety:
        raise PreconditionError(f"point is off the variety (residuals {res})")
    sv = np.linalg.svd(jacobian_matrix(cp, pp), compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol.rank * sv[0]))


@dataclass(frozen=True)
class LevelSetSample:
    """Columns ``q, p, theta, phi`` of points sampled on a level set."""

    q: np.ndarray
    p: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    c: float

    def __len__(self) -> int:
        return len(self.q)

    def points(self) -> list[SphericalPoint]:
        return [
            SphericalPoint(float(q), float(p), float(t), float(f), self.c)
            for q, p, t, f in zip(self.q, self.p, self.theta, self.phi)
        ]


def _q_interval(theta, phi, c, h):
    """Range of ``q`` over which the fibre above ``(theta, phi)`` is real.

    The radicand of the momentum quadratic is ``a u^2 + b u + k`` with
    ``u = cot q``; off the equator ``a < 0`` and the fibre lives between
    its two roots.  On the equator ``a = 0`` and the admissible ``u`` form a
    half-line ``u >= -k/b``, which is truncated at ``q_max * 1e-3``.
    """
    s, co = np.sin(theta), np.cos(theta)
    a = -4 * c * s * s
    b = 4 * c * s * co * np.sin(phi) + 4
    k = c * co * co * np.cos(phi) ** 2 - 2 * c + 4 * h
    disc = b * b - 4 * a * k
    q_lo = np.empty_like(theta)
    q_hi = np.empty_like(theta)
    eq = a == 0
    if np.any(eq):
        u0 = -k[eq] / b[eq]
        q_hi[eq] = math.pi / 2 - np.arctan(u0)
        q_lo[eq] = 1e-3 * q_hi[eq]
    off = ~eq
    if np.any(off):
        sq = np.sqrt(np.maximum(disc[off], 0.0))
        bb = b[off]
        qq = -0.5 * (bb + np.copysign(sq, bb))
        r1 = qq / a[off]
        with np.errstate(divide="ignore"):
            r2 = np.where(qq != 0, k[off] / qq, r1)
        u_lo, u_hi = np.minimum(r1, r2), np.maximum(r1, r2)
        q_lo[off] = math.pi / 2 - np.arctan(u_hi)
        q_hi[off] = math.pi / 2 - np.arctan(u_lo)
    return q_lo, q_hi


def momentum_radicand(q, theta, phi, c, h):
    """Radicand of the quadratic in ``p`` obtained from the energy equation."""
    u = 1 / np.tan(q)
    s, co = np.sin(theta), np.cos(theta)
    return (
        c * co * co * np.cos(phi) ** 2
        + 4 * c * s * co * u * np.sin(phi)
        - 4 * c * s * s * u * u
        - 2 * c
        + 4 * (h + u)
    )


def sample_level_set_arrays(
    pp: ParamPair,
    n: int,
    seed: int = 0,
    *,
    equator_fraction: float = 0.0,
    energy_tol: float | None = None,
    max_rejections: int = 10**6,
) -> LevelSetSample:
    """Random points of ``Sigma_{C,h}`` as column arrays.

    Latitude and longitude are drawn uniformly from the admissible part of
    the permitted band, ``q`` uniformly over the real part of the fibre and
    the momentum branch uniformly.  A fraction ``equator_fraction`` of the
    points is placed exactly on the equator.  Every point is checked against
    the energy level before it is accepted.

    Raises
    ------
    EmptyLevelSetError
        After ``max_rejections`` consecutive rejected draws.
    """
    if not pp.c > 0:
        raise DomainError(f"sampling needs C > 0, got {pp.c}")
    if n < 0:
        raise DomainError("n must be non-negative")
    if not 0 <= equator_fraction <= 1:
        raise DomainError("equator_fraction must lie in [0, 1]")
    if energy_tol is None:
        energy_tol = DEFAULT_TOLERANCES.energy
    c, h = pp.c, pp.h
    rng = np.random.default_rng(seed)
    width = band_half_width(c, h)
    n_eq = int(round(equator_fraction * n))
    parts = [
        _draw(rng, pp, n_eq, 0.0, energy_tol, max_rejections),
        _draw(rng, pp, n - n_eq, width, energy_tol, max_rejections),
    ]
    q, p, theta, phi = (np.concatenate([part[i] for part in parts]) for i in range(4))
    return LevelSetSample(q, p, theta, phi, c)


def _draw(rng, pp: ParamPair, n: int, width: float, energy_tol: float, max_rejections: int):
    """Accepted ``(q, p, theta, phi)`` columns with ``|theta| <= width``."""
    c, h = pp.c, pp.h
    chunks = []
    have = 0
    rejected = 0
    batch = max(64, min(4 * n, 1 << 16))
    while have < n:
        theta = rng.uniform(-width, width, batch) if width > 0 else np.zeros(batch)
        phi = rng.uniform(0, 2 * math.pi, batch)
        branch = rng.integers(0, 2, batch) * 2 - 1
        frac = rng.uniform(0.0, 1.0, batch)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (theta == 0) | (admissible(theta, phi, pp) >= 0)
            q_lo, q_hi = _q_interval(theta, phi, c, h)
            q = q_lo + frac * (q_hi - q_lo)
            ok &= (q > 0) & (q < math.pi)
            rad = np.maximum(momentum_radicand(q, theta, phi, c, h), 0.0)
            p = (math.sqrt(c) * np.cos(theta) * np.cos(phi) + branch * np.sqrt(rad)) / 2
            resid = np.abs(spherical_energy(q, p, theta, phi, c) - h)
            scale = spherical_energy_scale(q, p, theta, phi, c)
        ok &= resid <= np.maximum(energy_tol, 64 * np.finfo(float).eps * scale)
        idx = np.flatnonzero(ok)[: n - have]
        if idx.size == 0:
            rejected += batch
            if rejected >= max_rejections:
                raise EmptyLevelSetError(
                    f"no point of the level set (C, h) = ({c}, {h}) found in {rejected} draws"
                )
            continue
        rejected = 0
        chunks.append(np.stack([q[idx], p[idx], theta[idx], phi[idx]]))
        have += idx.size
    if not chunks:
        return np.empty((4, 0))
    return np.concatenate(chunks, axis=1)


def sample_level_set(pp: ParamPair, n: int, seed: int = 0, **kwargs) -> list[SphericalPoint]:
    """Random points of ``Sigma_{C,h}``; see :func:`sample_level_set_arrays`."""
    return sample_level_set_arrays(pp, n, seed, **kwargs).points()
