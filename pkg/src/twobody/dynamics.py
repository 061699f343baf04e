"""Fixed-step RK4 integration of the reduced flow with drift bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core_model import ReducedState, casimir, hamiltonian
from .config import DEFAULT_TOLERANCES
from .errors import BlowupError, DomainError


@dataclass
class Trajectory:
    """Samples of one solution of the reduced equations.

    ``states`` has shape ``(len(times), 5)`` in coordinate order.
    ``blowup_time`` is set when integration stopped early because ``|xi|``
    left the finite range.
    """

    times: np.ndarray
    states: np.ndarray
    h0: float
    c0: float
    max_drift_h: float = field(init=False)
    max_drift_c: float = field(init=False)
    blowup_time: float | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float).reshape(-1, 5)
        if len(self.times) != len(self.states):
            raise DomainError("times and states differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("times must be strictly increasing")
        self.max_drift_h = float(np.max(np.abs(self.energies - self.h0), initial=0.0))
        self.max_drift_c = float(np.max(np.abs(self.casimirs - self.c0), initial=0.0))

    @property
    def energies(self) -> np.ndarray:
        return np.atleast_1d(hamiltonian(self.states))

    @property
    def casimirs(self) -> np.ndarray:
        return np.atleast_1d(casimir(self.states))

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> ReducedState:
        return ReducedState.from_array(self.states[i])

    def reduced_states(self) -> list[ReducedState]:
        return [ReducedState.from_array(row) for row in self.states]


def reduced_rhs(x: np.ndarray) -> np.ndarray:
    """Right side of the reduced equations for a batch of states ``(..., 5)``.

    Algebraically identical to :func:`twobody.core_model.hamiltonian_vector_field`
    but written out to avoid building the structure matrix at every stage.
    """
    xi, p, m1, m2, m3 = (x[..., i] for i in range(5))
    g1 = m1 - p
    g2 = m2 - xi * m3
    g3 = -xi * m2 + 2 * m3 * xi * xi + m3
    w = xi * xi + 1
    out = np.empty_like(x)
    out[..., 0] = -w * (2 * p - m1)
    out[..., 1] = w * (-1 - m2 * m3 + 2 * m3 * m3 * xi)
    out[..., 2] = -m3 * g2 + m2 * g3
    out[..., 3] = m3 * g1 - m1 * g3
    out[..., 4] = -m2 * g1 + m1 * g2
    return out


def _time_grid(t_end: float, dt: float) -> np.ndarray:
    if not (math.isfinite(dt) and dt > 0):
        raise DomainError(f"step must be positive, got dt={dt}")
    if not (math.isfinite(t_end) and t_end > 0):
        raise DomainError(f"t_end must be positive, got {t_end}")
    if dt > t_end:
        raise DomainError("dt must not exceed t_end")
    n = int(round(t_end / dt))
    times = np.arange(n + 1) * dt
    if abs(times[-1] - t_end) > 1e-9 * t_end:
        n = int(math.floor(t_end / dt))
        times = np.append(np.arange(n + 1) * dt, t_end)
    else:
        times[-1] = t_end
    return times


def integrate_many(
    states: np.ndarray,
    t_end: float,
    dt: float,
    *,
    project_casimir: bool = False,
    blowup: float | None = None,
) -> list[Trajectory]:
    """Integrate a batch of initial states together.

    A trajectory whose ``|xi|`` exceeds ``blowup`` (or becomes non-finite)
    is frozen at its last valid sample and flagged with ``blowup_time``;
    the others continue.  With ``project_casimir`` the momentum is rescaled
    onto its initial Casimir sphere after every step.
    """
    blowup = DEFAULT_TOLERANCES.blowup if blowup is None else blowup
    x0 = np.array(states, dtype=float).reshape(-1, 5)
    if not np.all(np.isfinite(x0)):
        raise DomainError("initial states must be finite")
    times = _time_grid(t_end, dt)
    n_traj = len(x0)
    out = np.empty((len(times), n_traj, 5))
    out[0] = x0
    last = np.full(n_traj, len(times) - 1)
    alive = np.ones(n_traj, dtype=bool)
    radius = np.sqrt(np.sum(x0[:, 2:] ** 2, axis=1))
    x = x0.copy()
    for k in range(1, len(times)):
        h = times[k] - times[k - 1]
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = reduced_rhs(x)
            k2 = reduced_rhs(x + 0.5 * h * k1)
            k3 = reduced_rhs(x + 0.5 * h * k2)
            k4 = reduced_rhs(x + h * k3)
            x_new = x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if project_casimir:
            r = np.sqrt(np.sum(x_new[:, 2:] ** 2, axis=1))
            scale = np.divide(radius, r, out=np.ones_like(r), where=r > 0)
            x_new[:, 2:] *= scale[:, None]
        bad = alive & ~(np.all(np.isfinite(x_new), axis=1) & (np.abs(x_new[:, 0]) <= blowup))
        if bad.any():
            last[bad] = k - 1
            alive &= ~bad
        x = np.where(alive[:, None], x_new, x)
        out[k] = x
        if not alive.any():
            break
    h0 = np.atleast_1d(hamiltonian(x0))
    c0 = np.atleast_1d(casimir(x0))
    result = []
    for j in range(n_traj):
        stop = last[j] + 1
        blow = None if last[j] == len(times) - 1 and alive[j] else float(times[last[j] + 1])
        result.append(Trajectory(times[:stop], out[:stop, j], float(h0[j]), float(c0[j]), blowup_time=blow))
    return result


def integrate(
    s0: ReducedState,
    t_end: float,
    dt: float,
    *,
    project_casimir: bool = False,
    blowup: float | None = None,
) -> Trajectory:
    """RK4 samples of the reduced flow at ``t = 0, dt, 2 dt, ..., t_end``.

    Raises
    ------
    DomainError
        For a non-positive step or horizon.
    BlowupError
        When ``|xi|`` exceeds the blowup threshold; the partial trajectory is
        attached to the exception.
    """
    x0 = s0.as_array() if isinstance(s0, ReducedState) else np.asarray(s0, dtype=float)
    tr = integrate_many(x0[None, :], t_end, dt, project_casimir=project_casimir, blowup=blowup)[0]
    if tr.blowup_time is not None:
        raise BlowupError(
            f"|xi| left the finite range near t={tr.blowup_time:.6g}; last valid time {tr.times[-1]:.6g}",
            trajectory=tr,
        )
    return tr


def random_bounded_states(
    n: int,
    seed: int = 0,
    *,
    t_end: float = 10.0,
    dt: float = 1e-3,
    xi_bound: float = 3.0,
    max_batches: int = 20,
) -> np.ndarray:
    """Random initial states whose orbit keeps ``|xi| <= xi_bound`` up to ``t_end``.

    Candidates have ``C`` uniform in ``[0.5, 4]``, ``xi`` and ``p`` uniform in
    ``[-1, 1]``, a uniformly random momentum direction and norm at most 2.
    Orbits that approach a collision or the antipodal configuration are
    discarded, since fixed-step integration is not meaningful there.
    """
    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    for _ in range(max_batches):
        m = 4 * n
        c = rng.uniform(0.5, 4.0, m)
        u = rng.normal(size=(m, 3))
        u *= (np.sqrt(c) / np.linalg.norm(u, axis=1))[:, None]
        x = np.column_stack([rng.uniform(-1, 1, (m, 2)), u])
        x = x[np.linalg.norm(x, axis=1) <= 2.0]
        for tr, x0 in zip(integrate_many(x, t_end, dt), x):
            if tr.blowup_time is None and np.max(np.abs(tr.states[:, 0])) <= xi_bound:
                kept.append(x0)
        if len(kept) >= n:
            return np.array(kept[:n])
    raise DomainError(f"found only {len(kept)} bounded orbits out of the {n} requested")


def drift_report(tr: Trajectory) -> tuple[float, float]:
    """Maximal relative drift of the energy and of the Casimir.

    Scales are ``max(1, |h0|)`` and ``max(1, |c0|)``.
    """
    dh = float(np.max(np.abs(tr.energies - tr.h0), initial=0.0))
    dc = float(np.max(np.abs(tr.casimirs - tr.c0), initial=0.0))
    return dh / max(1.0, abs(tr.h0)), dc / max(1.0, abs(tr.c0))
