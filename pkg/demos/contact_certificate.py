"""Check numerically that a very negative energy level is of contact type.

Three ingredients are evaluated at (C, h) = (0.64, -1000):

* the explicit Liouville field really satisfies L_X omega = omega;
* X(H) > 0 on random points of the level set, including the equator;
* on the boundary of the projected image, F(theta) > 0.

For a positive energy the same sampled test fails, which says nothing about
contact type there, only that this particular field does not certify it.

Run: python demos/contact_certificate.py
"""

from twobody.cli import contact_report
from twobody.contact import contact_threshold, f_theta, f_theta_leading
from twobody.core_model import ParamPair


def main():
    for pp in (ParamPair(0.64, -1000.0), ParamPair(1.0, 20.0)):
        rep = contact_report(pp, 10_000, seed=0, f_grid=10_000)
        print(f"(C, h) = ({pp.c}, {pp.h}): {rep['verdict']}")
        for key in ("permitted_band", "min_XH", "equator_min", "f_theta_min", "lie_residual_max"):
            print(f"  {key:17s} {rep[key]}")

    print("\nnear the equator theta^2 F(theta) approaches (2C + 3)/C^2 whatever h is:")
    for c in (0.5, 1.0, 2.0):
        vals = [1e-6 * f_theta(1e-3, c, h) for h in (-1e2, -1e3)]
        print(f"  C={c}: limit {f_theta_leading(c):.6f}, at theta=1e-3: " + ", ".join(f"{v:.6f}" for v in vals))

    print("\nempirical energy below which X(H) > 0 on 2000 samples:")
    for c in (0.5, 1.0, 2.0):
        print(f"  C={c}: h < {contact_threshold(c, h_low=-1e3, h_high=50.0, n=2000, tol=1e-3):.3f}")


if __name__ == "__main__":
    main()
