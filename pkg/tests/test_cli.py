import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from twobody import cli
from twobody.errors import BracketError, EmptyLevelSetError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_classify_two_holes(capsys):
    code, out, _ = run(capsys, "classify", "--C", "2", "--h", "-10")
    rec = json.loads(out)
    assert code == 0
    assert rec["holes"] == 2 and rec["topology"] == "S1xS2" and rec["fast_oracle_agree"] is True
    assert set(rec["certifies"]) == {"holes", "topology", "fast_oracle_agree"}


def test_classify_circle(capsys):
    code, out, _ = run(capsys, "classify", "--C", "0", "--h", "5")
    assert code == 0 and json.loads(out)["topology"] == "Circle"


def test_classify_on_bifurcation(capsys):
    code, out, _ = run(capsys, "classify", "--C", "2", "--h", "1")
    assert code == 3 and json.loads(out)["topology"] == "OnBifurcation"


def test_classify_four_holes_csv(capsys):
    code, out, _ = run(capsys, "classify", "--C", "6.02", "--h", "2.7", "--format", "csv")
    header, values = rows(out)
    assert code == 0
    assert dict(zip(header, values))["topology"] == "ConnSum3_S1xS2"


@pytest.mark.parametrize("argv", [["classify", "--C", "-1", "--h", "0"], ["classify", "--C", "x"], ["nosuch"], []])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_bifurcation_csv(capsys):
    code, out, _ = run(capsys, "bifurcation", "--c-min", "0.5", "--c-max", "6", "--n", "200")
    table = rows(out)
    assert code == 0 and table[0] == ["curve_id", "C", "h"]
    data = table[1:]
    assert {r[0] for r in data} == {"main", "tangent"}
    assert min(float(r[1]) for r in data if r[0] == "tangent") >= 2.0
    main = np.array([[float(r[1]), float(r[2])] for r in data if r[0] == "main"])
    tan = np.array([[float(r[1]), float(r[2])] for r in data if r[0] == "tangent"])
    gap = np.hypot(main[:, None, 0] - tan[None, :, 0], main[:, None, 1] - tan[None, :, 1])
    i, j = np.unravel_index(np.argmin(gap), gap.shape)
    assert np.hypot(*(tan[j] - [2, 1])) < 0.05


def test_bifurcation_two_vertices(capsys):
    code, out, _ = run(capsys, "bifurcation", "--c-min", "0.5", "--c-max", "6", "--n", "2")
    assert code == 0 and len(rows(out)) == 5


def test_bifurcation_invalid_range(capsys):
    code, _, _ = run(capsys, "bifurcation", "--c-min", "6", "--c-max", "0.5")
    assert code == 2


def test_bifurcation_bracket_failure(capsys, monkeypatch):
    def boom(*a, **k):
        raise BracketError("no sign change", c=3.25)

    monkeypatch.setattr(cli.bif, "trace_diagram", boom)
    code, _, err = run(capsys, "bifurcation", "--c-min", "1", "--c-max", "4")
    assert code == 5 and "3.25" in err


def test_contact_check_certified(capsys):
    code, out, _ = run(capsys, "contact-check", "--C", "0.64", "--h", "-1000", "--n", "10000")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "certified-on-sample"
    assert rep["min_XH"] > 0 and rep["equator_min"] > 0 and rep["f_theta_min"] > 0
    assert rep["lie_residual_max"] < 1e-6


def test_contact_check_not_certified(capsys):
    code, out, _ = run(capsys, "contact-check", "--C", "1", "--h", "20", "--n", "10000")
    assert code == 0 and json.loads(out)["verdict"] == "not-certified"


def test_contact_check_zero_samples(capsys):
    code, _, _ = run(capsys, "contact-check", "--C", "1", "--h", "-10", "--n", "0")
    assert code == 2


def test_contact_check_empty(capsys, monkeypatch):
    def empty(*a, **k):
        raise EmptyLevelSetError("nothing")

    monkeypatch.setattr(cli.ls, "sample_level_set_arrays", empty)
    code, _, _ = run(capsys, "contact-check", "--C", "1", "--h", "-10", "--n", "10")
    assert code == 4


def test_integrate_equilibrium(tmp_path, capsys):
    out = tmp_path / "eq.csv"
    code, _, _ = run(capsys, "integrate", "--state", "0,0,0,-1,1", "--t-end", "1", "--dt", "0.01", "--out", str(out))
    assert code == 0
    table = rows(out.read_text())
    assert table[0] == ["t", "xi", "p", "m1", "m2", "m3", "H", "C"]
    vals = np.array(table[1:], dtype=float)
    assert len(vals) == 101
    assert np.all(vals[:, 1:] == vals[0, 1:])
    last = json.loads((tmp_path / "eq.csv.drift.json").read_text().splitlines()[-1])
    assert last["drift_h"] == 0 and last["drift_c"] == 0


def test_integrate_random_state_drift(tmp_path, capsys):
    from twobody.dynamics import random_bounded_states

    s = ",".join("%.17g" % v for v in random_bounded_states(1, seed=4)[0])
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "integrate", "--state", s, "--t-end", "10", "--dt", "1e-3", "--out", str(out))
    last = json.loads((tmp_path / "r.csv.drift.json").read_text().splitlines()[-1])
    assert code == 0 and last["drift_h"] < 1e-6 and last["drift_c"] < 1e-6


def test_integrate_blowup(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, err = run(capsys, "integrate", "--state", "5,-3,0,0,0", "--t-end", "10", "--dt", "1e-3", "--out", str(out))
    assert code == 6 and "last valid time" in err
    last = json.loads((tmp_path / "b.csv.drift.json").read_text().splitlines()[-1])
    assert last["last_time"] < 10 and last["blowup"]


@pytest.mark.parametrize("argv", [["--dt", "0"], ["--state", "1,2,3"]])
def test_integrate_usage(capsys, argv):
    base = {"--state": "0,0,0,-1,1", "--t-end": "1", "--dt": "0.1"}
    base.update(dict(zip(argv[::2], argv[1::2])))
    flat = [x for kv in base.items() for x in kv]
    code, _, _ = run(capsys, "integrate", *flat)
    assert code == 2


def test_sample_rows_and_band(capsys):
    code, out, _ = run(capsys, "sample", "--C", "0.64", "--h", "-1000", "--n", "1000")
    table = rows(out)
    assert code == 0 and table[0] == ["theta", "phi", "p", "q"] and len(table) == 1001
    theta = np.array([r[0] for r in table[1:]], dtype=float)
    assert np.all(np.abs(theta) <= 0.020015480184286914665)


def test_sample_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(capsys, "sample", "--C", "1", "--h", "-5", "--n", "200", "--seed", "3", "--out", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sample_header_only(capsys):
    code, out, _ = run(capsys, "sample", "--C", "0.64", "--h", "-1000", "--n", "0")
    assert code == 0 and out == "theta,phi,p,q\n"


def test_equilibria_equator(capsys):
    code, out, _ = run(capsys, "equilibria", "--family", "equator", "--param-min", "1", "--param-max", "3", "--n", "3")
    table = rows(out)
    assert code == 0 and table[0] == ["param", "xi", "p", "m1", "m2", "m3", "C", "h", "field_norm"]
    first = dict(zip(table[0], map(float, table[1])))
    assert (first["C"], first["h"]) == (2.0, 1.0)


def test_equilibria_families_meet(capsys):
    _, tan, _ = run(capsys, "equilibria", "--family", "tan", "--param-min", "1.5707963267948966",
                    "--param-max", "1.5707963267948966", "--n", "1")
    _, eq, _ = run(capsys, "equilibria", "--family", "equator", "--param-min", "1", "--param-max", "1", "--n", "1")
    np.testing.assert_allclose(np.array(rows(tan)[1][1:8], dtype=float), np.array(rows(eq)[1][1:8], dtype=float), atol=1e-15)


def test_equilibria_field_norms(capsys):
    _, out, _ = run(capsys, "equilibria", "--family", "tan", "--param-min", "0.2", "--param-max", "2.6", "--n", "50")
    norms = np.array([r[-1] for r in rows(out)[1:]], dtype=float)
    assert len(norms) == 50 and np.all(norms < 1e-9)


def test_equilibria_invalid_family(capsys):
    code, _, _ = run(capsys, "equilibria", "--family", "foo", "--param-min", "1", "--param-max", "3")
    assert code == 2


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=3\nformat=csv\n")
    _, from_file, _ = run(capsys, "sample", "--C", "1", "--h", "-5", "--n", "5", "--config", str(cfg))
    _, from_flag, _ = run(capsys, "sample", "--C", "1", "--h", "-5", "--n", "5", "--seed", "3")
    _, overridden, _ = run(capsys, "sample", "--C", "1", "--h", "-5", "--n", "5", "--config", str(cfg), "--seed", "4")
    assert from_file == from_flag != overridden


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("grid.n_theta=4\n")
    code, _, _ = run(capsys, "classify", "--C", "1", "--h", "0", "--config", str(cfg))
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "twobody", "classify", "--C", "2", "--h", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 3
