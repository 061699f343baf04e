"""Integrate the reduced equations and watch the conserved quantities.

RK4 is not symplectic, so energy and Casimir drift, but only at fourth order
in the step.  Halving the step should shrink the drift by about 16.  Relative
equilibria are fixed points and stay put.

Run: python demos/reduced_flow.py
"""

import numpy as np

from twobody.bifurcation import equilibrium_equator_family, equilibrium_tan_family
from twobody.dynamics import drift_report, integrate, integrate_many, random_bounded_states
from twobody.errors import BlowupError
from twobody.core_model import ReducedState


def main():
    x0 = random_bounded_states(5, seed=0)
    print("relative drift (H, C) over t = 10:")
    for dt in (0.01, 0.005, 0.001):
        worst = np.max([drift_report(t) for t in integrate_many(x0, 10.0, dt)], axis=0)
        print(f"  dt={dt:<6} H {worst[0]:.2e}  C {worst[1]:.2e}")

    for eq in (equilibrium_tan_family(1.0), equilibrium_equator_family(2.0)):
        tr = integrate(eq.state, 10.0, 1e-3)
        dev = np.max(np.abs(tr.states - eq.state.as_array()))
        print(f"{eq.family.value} at {eq.parameter}: max deviation {dev:.1e}")

    try:
        integrate(ReducedState(5.0, -3.0, 0.0, 0.0, 0.0), 10.0, 1e-3, blowup=1e6)
    except BlowupError as exc:
        print("head-on approach:", exc)


if __name__ == "__main__":
    main()
