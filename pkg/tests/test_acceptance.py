"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import math
import time
import timeit

import numpy as np
import pytest

from twobody.bifurcation import (
    curve_from_equilibria,
    distance_to_bifurcation,
    equilibrium_equator_family,
    equilibrium_tan_family,
    quartic_coeffs,
    verify_coincidence,
)
from twobody.contact import (
    equator_liouville_derivative,
    equator_transversality,
    f_theta,
    f_theta_grid,
    f_theta_leading,
    lie_derivative_residual,
    min_transversality,
)
from twobody.core_model import ParamPair, casimir, from_spherical, grad_hamiltonian, hamiltonian
from twobody.dynamics import drift_report, integrate_many, random_bounded_states
from twobody.level_sets import (
    CompactPoint,
    TopologyClass,
    classify_topology,
    hole_count_fast,
    hole_count_oracle,
    jacobian_rank,
    sample_level_set_arrays,
)
from twobody.rootfinding import isolate_positive_roots


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def hole_sweep():
    """Fast and oracle hole counts for 200 random off-locus pairs plus three reference pairs."""
    rng = np.random.default_rng(0)
    pairs = []
    skipped = 0
    while len(pairs) < 200:
        pp = ParamPair(rng.uniform(0.1, 10), rng.uniform(-20, 20))
        if distance_to_bifurcation(pp) < 1e-3:
            skipped += 1
            continue
        pairs.append(pp)
    pairs += [ParamPair(6.02, 2.7), ParamPair(6.07, 2.25), ParamPair(1.0, 20.0)]
    t0 = time.perf_counter()
    counts = [(pp, hole_count_fast(pp), hole_count_oracle(pp, 512, 1024)) for pp in pairs]
    return counts, skipped, time.perf_counter() - t0


def test_criterion_01_triple_root(report):
    coeffs = quartic_coeffs(ParamPair(2, 1))
    exact = bool(np.array_equal(coeffs, [0.25, -1.0, 1.5, -1.0, 0.25]))
    roots = isolate_positive_roots(coeffs)
    located = len(roots) == 1 and roots[0].multiplicity == 4 and abs(roots[0].midpoint - 1) < 1e-8
    seconds = min(timeit.repeat(lambda: isolate_positive_roots(quartic_coeffs(ParamPair(2, 1))), number=1, repeat=50))
    ok = exact and located and seconds < 1e-3
    report(1, ok, f"coefficients exact={exact}, roots={roots}, best time {seconds * 1e3:.3f} ms")


def test_criterion_02_coincidence(report):
    t0 = time.perf_counter()
    residual = verify_coincidence(1000)
    seconds = time.perf_counter() - t0
    m3 = np.concatenate([np.linspace(-10, -0.1, 2000), np.linspace(0.1, 10, 2000), [-1.0, 1.0]])
    images = [curve_from_equilibria("equator", v) for v in m3]
    states = [equilibrium_equator_family(v).state for v in m3]
    h_exact = all(pp.h == pp.c / 2 and hamiltonian(s) == casimir(s) / 2 for pp, s in zip(images, states))
    cs = np.array([pp.c for pp in images])
    min_ok = cs.min() == 2.0 and set(np.abs(m3[cs == 2.0])) == {1.0}
    ok = residual < 1e-8 and seconds < 1.0 and h_exact and min_ok
    report(2, ok, f"max residual {residual:.3g} in {seconds:.3f} s, h=C/2 exact={h_exact}, min C=2 at |m3|=1: {min_ok}")


def test_criterion_03_hole_oracle(report, hole_sweep):
    counts, skipped, seconds = hole_sweep
    mismatches = [(pp.c, pp.h, f, o) for pp, f, o in counts if f != o]
    valid = all(f in (0, 2, 4) for _, f, _ in counts)
    reference = {(pp.c, pp.h): f for pp, f, _ in counts[-3:]}
    reference_ok = reference == {(6.02, 2.7): 4, (6.07, 2.25): 2, (1.0, 20.0): 0}
    tally = {k: sum(f == k for _, f, _ in counts) for k in (0, 2, 4)}
    ok = not mismatches and valid and reference_ok and seconds < 60
    report(3, ok, f"{len(counts)} pairs ({skipped} near-locus skipped), counts {tally}, mismatches {mismatches}, {seconds:.1f} s")


def test_criterion_04_topology(report, hole_sweep):
    counts, _, _ = hole_sweep
    four = [pp for pp, f, _ in counts[:-3] if f == 4]
    circle = classify_topology(ParamPair(0.0, 5.0)) is TopologyClass.CIRCLE
    two = classify_topology(ParamPair(2.0, -10.0)) is TopologyClass.S1xS2
    connsum = bool(four) and classify_topology(four[0]) is TopologyClass.CONNSUM3_S1xS2
    ok = circle and two and connsum
    example = (round(four[0].c, 4), round(four[0].h, 4)) if four else None
    report(4, ok, f"Circle at C=0: {circle}, S1xS2 at (2,-10): {two}, ConnSum3 at sweep pair {example}: {connsum}")


def test_criterion_05_liouville(report):
    rng = np.random.default_rng(5)
    n = 1000
    q = rng.uniform(0.1, math.pi - 0.1, n)
    p = rng.uniform(-5, 5, n)
    theta = rng.choice([-1.0, 1.0], n) * rng.uniform(0.1, 1.4, n)
    phi = rng.uniform(0, 2 * math.pi, n)
    c = rng.uniform(0.25, 4.0, n)
    t0 = time.perf_counter()
    res = float(np.max(lie_derivative_residual(q, p, theta, phi, c)))
    seconds = time.perf_counter() - t0
    ok = res < 1e-6 and seconds < 1.0
    report(5, ok, f"max |L_X w - w| = {res:.3g} over {n} points in {seconds:.3f} s")


def test_criterion_06_contact_certificate(report):
    pp = ParamPair(0.64, -1000.0)
    t0 = time.perf_counter()
    _, f_vals = f_theta_grid(pp.c, pp.h, 10_000)
    f_min = float(f_vals.min())
    xh_min = min_transversality(pp, 10_000, seed=0)
    rng = np.random.default_rng(6)
    n = 100_000
    args = (rng.uniform(-100, 100, n), rng.uniform(1e-6, math.pi - 1e-6, n), rng.uniform(0, 2 * math.pi, n), pp.c)
    eq_min = min(float(equator_transversality(*args).min()), float(equator_liouville_derivative(*args).min()))
    seconds = time.perf_counter() - t0
    ok = f_min > 0 and xh_min > 0 and eq_min > 0 and seconds < 30
    report(6, ok, f"min F {f_min:.6g}, min X(H) {xh_min:.6g}, equator min {eq_min:.6g}, {seconds:.2f} s")


def test_criterion_07_series(report):
    errors = {}
    for c in (0.5, 1.0, 2.0):
        for h in (-100.0, -1000.0):
            errors[(c, h)] = abs(1e-6 * f_theta(1e-3, c, h) / f_theta_leading(c) - 1)
    series_ok = max(errors.values()) < 0.01

    def g(t, c, h):
        return t * t * f_theta(t, c, h)

    spreads = {}
    for c in (0.5, 1.0, 2.0):
        est = [(4 * g(5e-5, c, h) - g(1e-4, c, h)) / 3 for h in (-1e2, -1e3, -1e4)]
        spreads[c] = (max(est) - min(est)) / f_theta_leading(c)
    flat_ok = max(spreads.values()) < 1e-3
    ok = series_ok and flat_ok
    report(7, ok, f"max rel. series error {max(errors.values()):.3g}, max h-spread of the leading term {max(spreads.values()):.3g}")


def test_criterion_08_conservation(report):
    x0 = random_bounded_states(20, seed=0)
    drifts = [drift_report(t) for t in integrate_many(x0, 10.0, 1e-3)]
    worst = max(max(d) for d in drifts)
    coarse = [drift_report(t) for t in integrate_many(x0, 10.0, 0.01)]
    fine = [drift_report(t) for t in integrate_many(x0, 10.0, 0.005)]
    ratios = np.array([[a[0] / b[0], a[1] / b[1]] for a, b in zip(coarse, fine)])
    ratio_ok = bool(np.all((ratios >= 8) & (ratios <= 32)))
    eq_states = [equilibrium_tan_family(q, s).state.as_array() for q in np.linspace(0.2, 2.6, 13) for s in (1, -1)]
    eq_states += [equilibrium_equator_family(m).state.as_array() for m in np.linspace(0.5, 3.0, 11)]
    eq_states = np.array(eq_states)
    eq_dev = max(np.max(np.abs(t.states - x)) for t, x in zip(integrate_many(eq_states, 10.0, 1e-3), eq_states))
    ok = worst < 1e-6 and ratio_ok and eq_dev < 1e-8
    report(
        8,
        ok,
        f"max relative drift {worst:.3g}, halving ratios in [{ratios.min():.1f}, {ratios.max():.1f}], "
        f"equilibrium deviation {eq_dev:.3g}",
    )


def test_criterion_09_smoothness(report):
    pairs = [ParamPair(2.0, -10.0), ParamPair(6.02, 2.7), ParamPair(1.0, 20.0), ParamPair(0.64, -1000.0)]
    ranks = []
    for k, pp in enumerate(pairs):
        smp = sample_level_set_arrays(pp, 25, seed=k)
        for sp in smp.points():
            cp = CompactPoint.from_state(from_spherical(sp))
            ranks.append((cp.z < 1, jacobian_rank(cp, pp)))
    finite_ok = len(ranks) == 100 and all(z and r == 3 for z, r in ranks)
    rng = np.random.default_rng(9)
    infinity = []
    for pp in pairs:
        for _ in range(5):
            m = rng.normal(size=3)
            m *= math.sqrt(pp.c) / np.linalg.norm(m)
            infinity.append(jacobian_rank(CompactPoint(0.0, 0.0, 1.0, *m), pp))
    inf_ok = all(r < 3 for r in infinity)
    ok = finite_ok and inf_ok
    report(9, ok, f"rank 3 at {sum(r == 3 for _, r in ranks)}/{len(ranks)} points with z<1; ranks at z=1: {sorted(set(infinity))}")


def test_criterion_10_gradient(report):
    rng = np.random.default_rng(10)
    x = rng.uniform(-5, 5, (1000, 5))
    g = grad_hamiltonian(x)
    step = 1e-6
    err = 0.0
    for i in range(5):
        e = np.zeros(5)
        e[i] = step
        fd = (hamiltonian(x + e) - hamiltonian(x - e)) / (2 * step)
        err = max(err, float(np.max(np.abs(fd - g[:, i]))))
    report(10, err < 1e-6, f"max |analytic - finite difference| = {err:.3g} over 1000 states")
