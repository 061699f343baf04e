"""Reduced Hamiltonian system of two equal masses on the sphere.

The reduced phase space has coordinates ``(xi, p, m1, m2, m3)`` where
``xi = cot(q)`` encodes the angular separation ``q`` of the bodies, ``p`` is
its conjugate momentum and ``m = (m1, m2, m3)`` is the angular momentum in
the frame moving with the bodies.  The potential is ``-cot(q)``.

Every 5-vector and 5x5 matrix in this package uses the coordinate order
``(xi, p, m1, m2, m3)``.  Functions taking a state accept a
:class:`ReducedState` or any array whose last axis has length 5, so they can
be evaluated on whole batches of states at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike

from .errors import DegenerateCasimirError, DomainError

XI, P, M1, M2, M3 = range(5)
COORDINATES = ("xi", "p", "m1", "m2", "m3")


@dataclass(frozen=True)
class ReducedState:
    """A point of the 5-dimensional reduced phase space."""

    xi: float
    p: float
    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise DomainError(f"state components must be finite, got {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.xi, self.p, self.m1, self.m2, self.m3)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    @classmethod
    def from_array(cls, values: ArrayLike) -> "ReducedState":
        xi, p, m1, m2, m3 = (float(v) for v in np.asarray(values, dtype=float).reshape(5))
        return cls(xi, p, m1, m2, m3)

    @property
    def q(self) -> float:
        """Angular separation in ``(0, pi)``."""
        return q_of_xi(self.xi)


@dataclass(frozen=True)
class SphericalPoint:
    """A point ``(q, p, theta, phi)`` on ``(0, pi) x R x S^2_C``.

    ``theta`` is the latitude on the Casimir sphere of radius ``sqrt(c)`` and
    ``phi`` the longitude.
    """

    q: float
    p: float
    theta: float
    phi: float
    c: float

    def __post_init__(self):
        if not 0.0 < self.q < math.pi:
            raise DomainError(f"q must lie in (0, pi), got {self.q}")
        if not -math.pi / 2 <= self.theta <= math.pi / 2:
            raise DomainError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")
        if not self.c > 0:
            raise DomainError(f"Casimir value must be positive, got {self.c}")
        if not (math.isfinite(self.p) and math.isfinite(self.phi)):
            raise DomainError("p and phi must be finite")


@dataclass(frozen=True)
class ParamPair:
    """Casimir level ``c`` and energy level ``h``."""

    c: float
    h: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and math.isfinite(self.h)):
            raise DomainError(f"parameters must be finite, got (C, h) = ({self.c}, {self.h})")
        if self.c < 0:
            raise DomainError(f"Casimir value must be non-negative, got {self.c}")


StateLike = Union[ReducedState, ArrayLike]


def _as_components(s: StateLike) -> np.ndarray:
    if isinstance(s, ReducedState):
        return s.as_array()
    arr = np.asarray(s, dtype=float)
    if arr.shape[-1] != 5:
        raise ValueError(f"state arrays need a trailing axis of length 5, got shape {arr.shape}")
    return arr


def xi_of_q(q: float) -> float:
    """Return ``cot(q)`` for a separation angle ``q`` in ``(0, pi)``."""
    if not 0.0 < q < math.pi:
        raise DomainError(f"separation angle must lie in (0, pi), got {q}")
    if q == math.pi / 2:
        return 0.0
    return math.cos(q) / math.sin(q)


def q_of_xi(xi: ArrayLike) -> np.ndarray | float:
    """Inverse of :func:`xi_of_q` with range ``(0, pi)``."""
    out = np.pi / 2 - np.arctan(xi)
    return float(out) if np.ndim(out) == 0 else out


def hamiltonian(s: StateLike):
    x = _as_components(s)
    xi, p, m1, m2, m3 = np.moveaxis(x, -1, 0)
    val = 0.5 * (
        m1 * m1 + m2 * m2 - 2 * m1 * p + 2 * p * p + xi * (-2 - 2 * m2 * m3 + m3 * m3 * xi) + m3 * m3 * (1 + xi * xi)
    )
    return float(val) if np.ndim(val) == 0 else val


def casimir(s: StateLike):
    x = _as_components(s)
    m1, m2, m3 = x[..., M1], x[..., M2], x[..., M3]
    val = m1 * m1 + m2 * m2 + m3 * m3
    return float(val) if np.ndim(val) == 0 else val


def grad_hamiltonian(s: StateLike) -> np.ndarray:
    """Analytic gradient of the Hamiltonian, in coordinate order."""
    x = _as_components(s)
    xi, p, m1, m2, m3 = np.moveaxis(x, -1, 0)
    return np.stack(
        [
            -1 - m2 * m3 + 2 * m3**2 * xi,
            -m1 + 2 * p,
            m1 - p,
            m2 - xi * m3,
            -xi * m2 + m3 * xi**2 + m3 * (1 + xi**2),
        ],
        axis=-1,
    )


def grad_casimir(s: StateLike) -> np.ndarray:
    x = _as_components(s)
    g = np.zeros_like(x)
    g[..., M1:] = 2 * x[..., M1:]
    return g


def poisson_matrix(s: StateLike) -> np.ndarray:
    """Structure matrix ``Pi[i, j] = {x_i, x_j}`` of the reduced bracket.

    Non-zero brackets: ``{xi, p} = -(xi^2 + 1)``, ``{m1, m2} = -m3``,
    ``{m2, m3} = -m1`` and ``{m1, m3} = m2``.
    """
    x = _as_components(s)
    pi = np.zeros(x.shape[:-1] + (5, 5))
    pi[..., XI, P] = -(x[..., XI] ** 2 + 1)
    pi[..., M1, M2] = -x[..., M3]
    pi[..., M2, M3] = -x[..., M1]
    pi[..., M1, M3] = x[..., M2]
    return pi - np.swapaxes(pi, -1, -2)


def poisson_matrix_derivative(s: StateLike) -> np.ndarray:
    """``D[..., l, i, j] = d Pi[i, j] / d x_l``."""
    x = _as_components(s)
    d = np.zeros(x.shape[:-1] + (5, 5, 5))
    d[..., XI, XI, P] = -2 * x[..., XI]
    d[..., M3, M1, M2] = -1.0
    d[..., M1, M2, M3] = -1.0
    d[..., M2, M1, M3] = 1.0
    return d - np.swapaxes(d, -1, -2)


def hamiltonian_vector_field(s: StateLike) -> np.ndarray:
    """Reduced equations of motion ``dx_i/dt = sum_j Pi[i, j] dH/dx_j``."""
    x = _as_components(s)
    return np.einsum("...ij,...j->...i", poisson_matrix(x), grad_hamiltonian(x))


def to_spherical(s: ReducedState) -> SphericalPoint:
    """Express ``m`` in latitude/longitude on the sphere of radius ``sqrt(C)``.

    At the poles the longitude is set to 0.
    """
    c = casimir(s)
    if c <= 0:
        raise DegenerateCasimirError("latitude and longitude are undefined when the Casimir vanishes")
    theta = math.atan2(s.m3, math.hypot(s.m1, s.m2))
    if s.m1 == 0.0 and s.m2 == 0.0:
        phi = 0.0
    else:
        phi = math.atan2(s.m2, s.m1) % (2 * math.pi)
    return SphericalPoint(q_of_xi(s.xi), s.p, theta, phi, c)


def from_spherical(sp: SphericalPoint) -> ReducedState:
    r = math.sqrt(sp.c)
    ct = math.cos(sp.theta)
    return ReducedState(
        xi_of_q(sp.q),
        sp.p,
        r * ct * math.cos(sp.phi),
        r * ct * math.sin(sp.phi),
        r * math.sin(sp.theta),
    )


def spherical_energy(q, p, theta, phi, c):
    """Vectorised energy in the ``(q, p, theta, phi)`` chart."""
    u = 1.0 / np.tan(q)
    st, ct = np.sin(theta), np.cos(theta)
    return (
        c * st**2 * u**2
        + p**2
        - u
        - ct * (np.sqrt(c) * p * np.cos(phi) + c * st * u * np.sin(phi))
        + c / 2
    )


def spherical_energy_scale(q, p, theta, phi, c):
    """Sum of the magnitudes of the terms of :func:`spherical_energy`.

    Used as the natural scale of rounding error when checking that a point
    lies on an energy level.
    """
    u = 1.0 / np.tan(q)
    st, ct = np.sin(theta), np.cos(theta)
    return (
        np.abs(c * st**2 * u**2)
        + p**2
        + np.abs(u)
        + np.abs(ct * np.sqrt(c) * p * np.cos(phi))
        + np.abs(c * ct * st * u * np.sin(phi))
        + c / 2
    )


def spherical_hamiltonian(sp: SphericalPoint) -> float:
    """Energy of ``sp``; equals :func:`hamiltonian` of ``from_spherical(sp)``."""
    return float(spherical_energy(sp.q, sp.p, sp.theta, sp.phi, sp.c))


def spherical_energy_gradient(q, p, theta, phi, c):
    """Partial derivatives of :func:`spherical_energy` in chart order ``(q, p, phi, theta)``."""
    u = 1.0 / np.tan(q)
    st, ct = np.sin(theta), np.cos(theta)
    sc = np.sqrt(c)
    dq = -(2 * c * st**2 * u - 1 - c * ct * st * np.sin(phi)) / np.sin(q) ** 2
    dp = 2 * p - sc * ct * np.cos(phi)
    dphi = ct * (sc * p * np.sin(phi) - c * st * u * np.cos(phi))
    dtheta = 2 * c * st * ct * u**2 + sc * st * p * np.cos(phi) + c * u * np.sin(phi) * (st**2 - ct**2)
    return dq, dp, dphi, dtheta
