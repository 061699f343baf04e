"""Command-line front end.

Exit codes: 0 ok, 2 usage, 3 parameters on the bifurcation locus, 4 empty
level set, 5 bracketing failure, 6 integration blowup.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import bifurcation as bif
from . import contact
from . import level_sets as ls
from .config import RunConfig, load_config
from .core_model import ParamPair, ReducedState, casimir, hamiltonian, spherical_energy
from .dynamics import drift_report, integrate
from .errors import BlowupError, BracketError, DomainError, EmptyLevelSetError, TwoBodyError

EXIT_OK, EXIT_USAGE, EXIT_BIFURCATION, EXIT_EMPTY, EXIT_BRACKET, EXIT_BLOWUP = 0, 2, 3, 4, 5, 6


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    return "%.17g" % x


@contextmanager
def _sink(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_csv(path, header, rows):
    with _sink(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _write_record(path, record: dict, fmt: str):
    with _sink(path) as fh:
        if fmt == "json":
            fh.write(json.dumps(record, indent=2, sort_keys=True) + "\n")
        else:
            flat = {k: v for k, v in record.items() if not isinstance(v, dict)}
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(flat))
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in flat.values()])


def _params(args) -> ParamPair:
    if not (math.isfinite(args.C) and math.isfinite(args.h)):
        raise UsageError("C and h must be finite")
    if args.C < 0:
        raise UsageError("C must be non-negative")
    return ParamPair(args.C, args.h)


def cmd_classify(args, cfg: RunConfig) -> int:
    pp = _params(args)
    tol = cfg.tolerance_set()
    topo = ls.classify_topology(pp, tol)
    holes = None
    agree = None
    if topo in (ls.TopologyClass.S1xS2, ls.TopologyClass.CONNSUM3_S1xS2):
        holes = ls.hole_count_fast(pp, tol)
        oracle = ls.hole_count_oracle(pp, cfg.grid["n_theta"], cfg.grid["n_phi"])
        agree = oracle == holes
    elif topo is ls.TopologyClass.CIRCLE:
        holes = 0
    record = {
        "C": pp.c,
        "h": pp.h,
        "holes": holes,
        "topology": topo.value,
        "fast_oracle_agree": agree,
        "certifies": {
            "holes": "number of distinct roots in (0, C] of the boundary quartic in m3^2",
            "topology": "homeomorphism type of the compactified common level set",
            "fast_oracle_agree": "boundary-quartic count equals the grid flood-fill count",
        },
    }
    _write_record(cfg.out, record, cfg.fmt)
    if topo is ls.TopologyClass.ON_BIFURCATION:
        return EXIT_BIFURCATION
    if topo is ls.TopologyClass.EMPTY:
        return EXIT_EMPTY
    return EXIT_OK


def cmd_bifurcation(args, cfg: RunConfig) -> int:
    if not (0 < args.c_min < args.c_max) or args.n < 2:
        raise UsageError("need 0 < c-min < c-max and n >= 2")
    diagram = bif.trace_diagram(args.c_min, args.c_max, args.n, tol=cfg.tolerances.get("trace", 1e-10))
    rows = []
    for curve, label in zip(diagram.curves, diagram.labels):
        name = "main" if label is bif.CurveLabel.MAIN else "tangent"
        for c, h in curve:
            if bif.implicit_curve_residual(ParamPair(float(c), float(h))) >= 1e-8:
                raise BracketError(f"vertex failed verification at C={c}", c=float(c))
            rows.append((name, float(c), float(h)))
    _write_csv(cfg.out, ["curve_id", "C", "h"], rows)
    return EXIT_OK


def contact_report(pp: ParamPair, n: int, seed: int, f_grid: int) -> dict:
    """Numbers behind the contact-type verdict for one level set."""
    lo, hi = contact.permitted_theta_interval(pp.c, pp.h)
    smp = ls.sample_level_set_arrays(pp, n, seed)
    xh = contact.liouville_derivative(smp.q, smp.p, smp.theta, smp.phi, pp.c)
    eq = ls.sample_level_set_arrays(pp, n, seed + 1, equator_fraction=1.0)
    eq_vals = contact.equator_liouville_derivative(eq.p, eq.q, eq.phi, pp.c)
    _, f_vals = contact.f_theta_grid(pp.c, pp.h, f_grid)
    lie = contact.lie_derivative_residual(smp.q, smp.p, smp.theta, smp.phi, pp.c)
    rep = {
        "C": pp.c,
        "h": pp.h,
        "n": n,
        "seed": seed,
        "permitted_band": [lo, hi],
        "min_XH": float(np.min(xh)),
        "equator_min": float(np.min(eq_vals)),
        "f_theta_min": float(np.min(f_vals)),
        "lie_residual_max": float(np.max(lie)),
    }
    ok = rep["min_XH"] > 0 and rep["equator_min"] > 0 and rep["f_theta_min"] > 0 and rep["lie_residual_max"] < 1e-6
    rep["verdict"] = "certified-on-sample" if ok else "not-certified"
    rep["certifies"] = {
        "permitted_band": "latitude band containing the projection of the level set",
        "min_XH": "transversality of the Liouville field on sampled level-set points",
        "equator_min": "transversality on the equator, where fibres are parabolas",
        "f_theta_min": "transversality at preimages of the projection boundary",
        "lie_residual_max": "finite-difference check that the field is Liouville",
    }
    return rep


def cmd_contact_check(args, cfg: RunConfig) -> int:
    pp = _params(args)
    if args.n <= 0:
        raise UsageError("n must be positive")
    if pp.c <= 0:
        raise UsageError("contact check needs C > 0")
    rep = contact_report(pp, args.n, cfg.seed, cfg.grid["f_theta"])
    _write_record(cfg.out, rep, cfg.fmt)
    return EXIT_OK


def _parse_state(text: str) -> ReducedState:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse state {text!r}") from exc
    if len(vals) != 5:
        raise UsageError("state needs five comma-separated values xi,p,m1,m2,m3")
    return ReducedState(*vals)


def cmd_integrate(args, cfg: RunConfig) -> int:
    s0 = _parse_state(args.state)
    if not (args.dt > 0 and args.t_end > 0 and args.dt <= args.t_end):
        raise UsageError("need 0 < dt <= t-end")
    code = EXIT_OK
    message = None
    try:
        tr = integrate(s0, args.t_end, args.dt, project_casimir=args.project_casimir)
    except BlowupError as exc:
        tr = exc.trajectory
        code = EXIT_BLOWUP
        message = str(exc)
    rows = (
        (float(t), *map(float, x), float(hh), float(cc))
        for t, x, hh, cc in zip(tr.times, tr.states, tr.energies, tr.casimirs)
    )
    _write_csv(cfg.out, ["t", "xi", "p", "m1", "m2", "m3", "H", "C"], rows)
    dh, dc = drift_report(tr)
    lines = [
        {"h0": tr.h0, "c0": tr.c0, "dt": args.dt, "t_end": args.t_end, "samples": len(tr)},
        {"drift_h": dh, "drift_c": dc, "last_time": float(tr.times[-1]), "blowup": message},
    ]
    text = "".join(json.dumps(line, sort_keys=True) + "\n" for line in lines)
    if cfg.out and cfg.out != "-":
        Path(str(cfg.out) + ".drift.json").write_text(text)
    else:
        sys.stderr.write(text)
    if message:
        sys.stderr.write(message + "\n")
    return code


def cmd_sample(args, cfg: RunConfig) -> int:
    pp = _params(args)
    if pp.c <= 0:
        raise UsageError("sampling needs C > 0")
    if args.n < 0:
        raise UsageError("n must be non-negative")
    smp = ls.sample_level_set_arrays(pp, args.n, cfg.seed)
    if len(smp):
        h_err = np.abs(spherical_energy(smp.q, smp.p, smp.theta, smp.phi, pp.c) - pp.h)
        m = np.sqrt(pp.c) * np.stack(
            [np.cos(smp.theta) * np.cos(smp.phi), np.cos(smp.theta) * np.sin(smp.phi), np.sin(smp.theta)], axis=-1
        )
        c_err = np.abs(np.sum(m * m, axis=-1) - pp.c)
        if h_err.max() >= 1e-8 or c_err.max() >= 1e-10:
            raise TwoBodyError("sampled points failed re-verification")
    _write_csv(cfg.out, ["theta", "phi", "p", "q"], zip(smp.theta, smp.phi, smp.p, smp.q))
    return EXIT_OK


def cmd_equilibria(args, cfg: RunConfig) -> int:
    if args.n < 1 or not args.param_min <= args.param_max:
        raise UsageError("need n >= 1 and param-min <= param-max")
    if args.family == "tan":
        make = lambda v: bif.equilibrium_tan_family(v, args.sign)  # noqa: E731
    else:
        make = bif.equilibrium_equator_family
    rows = []
    for v in np.linspace(args.param_min, args.param_max, args.n):
        try:
            e = make(float(v))
        except DomainError as exc:
            raise UsageError(str(exc)) from exc
        s = e.state
        rows.append((float(v), *s.as_tuple(), casimir(s), hamiltonian(s), e.field_norm))
    _write_csv(cfg.out, ["param", "xi", "p", "m1", "m2", "m3", "C", "h", "field_norm"], rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), dest="fmt")

    parser = argparse.ArgumentParser(prog="twobody", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="hole count and topology of a level set")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bifurcation", parents=[common], help="trace the bifurcation diagram to CSV")
    p.add_argument("--c-min", type=float, required=True)
    p.add_argument("--c-max", type=float, required=True)
    p.add_argument("--n", type=int, default=200)
    p.set_defaults(func=cmd_bifurcation)

    p = sub.add_parser("contact-check", parents=[common], help="sampled contact-type certificate")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--n", type=int, default=10_000)
    p.set_defaults(func=cmd_contact_check)

    p = sub.add_parser("integrate", parents=[common], help="RK4 trajectory to CSV")
    p.add_argument("--state", required=True, help="xi,p,m1,m2,m3")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--project-casimir", action="store_true")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("sample", parents=[common], help="random points of a level set to CSV")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("equilibria", parents=[common], help="relative equilibria of one family to CSV")
    p.add_argument("--family", choices=("tan", "equator"), required=True)
    p.add_argument("--param-min", type=float, required=True)
    p.add_argument("--param-max", type=float, required=True)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    p.set_defaults(func=cmd_equilibria)
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.fmt is not None:
        cfg.fmt = args.fmt
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (UsageError, ValueError, OSError) as exc:
        if isinstance(exc, TwoBodyError) and not isinstance(exc, DomainError):
            raise
        print(f"twobody: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BracketError as exc:
        print(f"twobody: bracket failure at C={exc.c}: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except EmptyLevelSetError as exc:
        print(f"twobody: empty level set: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except BlowupError as exc:
        print(f"twobody: blowup: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
