"""Trace the bifurcation locus and cross-check it against relative equilibria.

The locus has a main branch, where a critical root of the boundary quartic
becomes double, and a tangent branch ``h = C/2`` for ``C >= 2``.  Both are
images of families of relative equilibria; the two branches meet at
``(C, h) = (2, 1)``, where the quartic is ``(y - 1)**4 / 4``.

Run: python demos/bifurcation_diagram.py [out.csv]
"""

import sys

import numpy as np

from twobody.bifurcation import (
    CurveLabel,
    curve_from_equilibria,
    implicit_curve_residual,
    quartic_coeffs,
    trace_diagram,
    verify_coincidence,
)
from twobody.core_model import ParamPair
from twobody.rootfinding import isolate_positive_roots


def main(out=None):
    print("quartic at (2, 1):", quartic_coeffs(ParamPair(2, 1)))
    print("its positive roots:", isolate_positive_roots(quartic_coeffs(ParamPair(2, 1))))

    diagram = trace_diagram(0.5, 6.0, 60)
    main_branch = diagram.curve(CurveLabel.MAIN)
    tangent = diagram.curve(CurveLabel.TANGENT)
    print(f"\nmain branch: {len(main_branch)} vertices from C={main_branch[0, 0]} to C={main_branch[-1, 0]}")
    print(f"tangent branch: {len(tangent)} vertices, h/C = {np.unique(tangent[:, 1] / tangent[:, 0])}")

    print("\nimages of the tan family of equilibria on the main branch:")
    for q in (0.5, 1.0, np.pi / 2, 2.0, 2.5):
        pp = curve_from_equilibria("tan", q)
        print(f"  q={q:.3f}  C={pp.c:9.4f}  h={pp.h:9.4f}  residual={implicit_curve_residual(pp):.1e}")
    print(f"\nworst residual over 1000 equilibria (60-digit arithmetic): {verify_coincidence(1000):.1e}")

    if out:
        with open(out, "w") as fh:
            fh.write("curve_id,C,h\n")
            for label, curve in zip(diagram.labels, diagram.curves):
                name = "main" if label is CurveLabel.MAIN else "tangent"
                for c, h in curve:
                    fh.write(f"{name},{c:.17g},{h:.17g}\n")
        print("wrote", out)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
