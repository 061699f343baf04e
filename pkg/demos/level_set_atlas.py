"""Walk across the (C, h) plane and report what the common level sets look like.

For each pair the hole count is computed twice: from the roots of the boundary
quartic and by flood-filling the inadmissible region on a latitude/longitude
grid.  The two must agree away from the bifurcation locus.

Run: python demos/level_set_atlas.py
"""

from twobody import ParamPair, classify_topology, hole_count_fast, hole_count_oracle
from twobody.bifurcation import distance_to_bifurcation


def main():
    cs = [0.5, 1.0, 2.0, 3.0, 6.02, 8.0]
    hs = [-10.0, -1.0, 0.5, 1.49, 2.7, 3.3, 20.0]
    print(f"{'C':>6} {'h':>7} {'holes':>5} {'grid':>5}  topology")
    for c in cs:
        for h in hs:
            pp = ParamPair(c, h)
            if distance_to_bifurcation(pp) < 1e-3:
                print(f"{c:6.2f} {h:7.2f}   --    --   (on the locus)")
                continue
            fast = hole_count_fast(pp)
            grid = hole_count_oracle(pp, 256, 512)
            print(f"{c:6.2f} {h:7.2f} {fast:5d} {grid:5d}  {classify_topology(pp).value}")

    # thin holes right below the tangent branch h = C/2 need a fine grid
    pp = ParamPair(3.0, 1.4999)
    print("\nnear the tangent branch:", pp)
    for n in (128, 512, 1024):
        print(f"  grid {n}x{2 * n}: {hole_count_oracle(pp, n, 2 * n)} holes (quartic says {hole_count_fast(pp)})")

    print("\nC = 0 collapses every level set to a circle:", classify_topology(ParamPair(0.0, 5.0)).value)


if __name__ == "__main__":
    main()
