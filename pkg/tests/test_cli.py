import csv
import io
import json
import math
import subprocess
import sys

import pytest

from relcosmo.cli import main


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def parse(out):
    body = [ln for ln in out.splitlines() if not ln.startswith("#")]
    summary = dict(ln[2:].split("=", 1) for ln in out.splitlines() if ln.startswith("# ") and "=" in ln)
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return rows, summary


def test_verify_einstein_static(capsys):
    code, out, _ = run(capsys, "verify", "--metric", "einstein-static", "--a", "1", "--n-events", "10")
    rows, summary = parse(out)
    assert code == 0 and summary["all_pass"] == "true"
    assert float(rows[0]["efe_max"]) <= 1e-8


def test_verify_minkowski_flat(capsys):
    code, out, _ = run(capsys, "verify", "--metric", "minkowski", "--n-events", "5")
    (row,), _ = parse(out)
    assert code == 0 and float(row["riemann_max"]) <= 1e-9 and row["flat"] == "true"


def test_verify_unknown_metric(capsys):
    code, out, err = run(capsys, "verify", "--metric", "nosuch")
    assert code != 0 and "unknown metric" in err and out == ""


def test_verify_failing_tolerance_exits_nonzero(capsys):
    code, out, _ = run(capsys, "verify", "--metric", "godel", "--n-events", "3", "--tol", "efe=1e-30",
                       "--param", "a=1.3")
    assert code == 1 and parse(out)[1]["all_pass"] == "false"


def test_evolve_closed_dust(capsys):
    code, out, _ = run(capsys, "evolve", "--k", "1", "--A", "1", "--a0", "0.5", "--span", "-10", "10")
    rows, s = parse(out)
    assert code == 0
    assert len(s["singularities"].split(";")) == 2
    assert float(s["max_a"]) == pytest.approx(1.0, rel=1e-6)
    assert s["age_bound"] == "PASS"
    assert [r["event_flag"] for r in rows].count("singularity") == 2
    assert float(s["hubble_time_at_t0"]) > float(s["age_at_t0"])


def test_evolve_open_dust_age_bound(capsys):
    code, out, _ = run(capsys, "evolve", "--k", "-1", "--A", "1", "--a0", "0.5", "--span", "-5", "20")
    _, s = parse(out)
    assert code == 0 and s["age_bound"] == "PASS" and s["turning_points"] == "none"


def test_evolve_inconsistent_initial_data(capsys):
    code, out, err = run(capsys, "evolve", "--k", "1", "--A", "1", "--a0", "0.5", "--da0", "2.0")
    assert code != 0 and "first-integral residual" in err


def test_redshift_static_model(capsys):
    code, out, _ = run(capsys, "redshift", "--model", "static", "--n-emitters", "5")
    rows, _ = parse(out)
    assert code == 0 and all(float(r["z"]) == 0.0 for r in rows)
    assert list(rows[0]) == ["t_e", "chi", "D", "z", "z_hubble_approx"]


def test_redshift_small_z_fit(capsys):
    code, out, _ = run(capsys, "redshift", "--model", "power", "--n", "0.6666666666666666")
    _, s = parse(out)
    assert code == 0 and float(s["fit_rel_error"]) <= 0.01
    assert float(s["fitted_slope"]) == pytest.approx(float(s["H0_over_c"]), rel=0.01)


def test_redshift_single_emitter_at_t0(capsys):
    code, out, _ = run(capsys, "redshift", "--model", "cosh", "--emitters", "1.0")
    (row,), _ = parse(out)
    assert code == 0 and float(row["D"]) == 0.0 and float(row["z"]) == 0.0


def test_redshift_emitter_outside_span(capsys):
    code, _, err = run(capsys, "redshift", "--model", "power", "--emitters", "1.5")
    assert code != 0 and "outside the span" in err
    code, _, err = run(capsys, "redshift", "--model", "power", "--emitters", "-0.5")
    assert code != 0


def test_godel_ctc_default_and_tiny(capsys):
    code, out, _ = run(capsys, "godel-ctc")
    rows, s = parse(out)
    assert code == 0 and s["nonempty"] == "true" and len(rows) == 41 * 41
    assert len(s["bounding_box"].split(";")) == 4
    code, out, _ = run(capsys, "godel-ctc", "--A-range", "0", "0.2", "--B-range", "0", "0.2", "--grid", "4", "4")
    _, s = parse(out)
    assert code == 0 and s["nonempty"] == "false" and s["bounding_box"] == "none"


def test_godel_ctc_empty_grid(capsys):
    code, _, err = run(capsys, "godel-ctc", "--grid", "0", "5")
    assert code != 0 and "empty grid" in err


def _killing_rows(out):
    lines = out.splitlines()
    i = lines.index("# table killing")
    body = [ln for ln in lines[i + 1:] if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_kinematics_godel(capsys):
    code, out, _ = run(capsys, "kinematics", "--metric", "godel", "--n-events", "5")
    rows, s = parse(out.split("# table killing")[0])
    assert code == 0
    for r in rows:
        assert float(r["acceleration"]) <= 1e-8 and float(r["deformation"]) <= 1e-8 and float(r["rotation"]) > 0
    krows = _killing_rows(out)
    assert len(krows) == 5 and all(r["pass"] == "true" for r in krows)


def test_kinematics_flrw(capsys):
    code, out, _ = run(capsys, "kinematics", "--metric", "flrw", "--n-events", "4", "--param", "n=0.5")
    rows, _ = parse(out.split("# table killing")[0])
    assert code == 0
    for r in rows:
        assert float(r["rotation"]) == 0.0
        assert float(r["expansion"]) == pytest.approx(3 * 0.5 / float(r["x0"]), rel=1e-8)


def test_kinematics_minkowski_zero(capsys):
    code, out, _ = run(capsys, "kinematics", "--metric", "minkowski", "--n-events", "3")
    rows, _ = parse(out.split("# table killing")[0])
    assert code == 0
    for r in rows:
        assert all(float(r[k]) == 0.0 for k in ("acceleration", "deformation", "rotation", "expansion"))


def test_kinematics_unknown_observer(capsys):
    code, _, err = run(capsys, "kinematics", "--metric", "godel", "--observer", "nosuch")
    assert code != 0 and "unknown observer" in err


def test_json_mirrors_csv(capsys):
    args = ["verify", "--metric", "godel", "--n-events", "3"]
    _, out_csv, _ = run(capsys, *args)
    _, out_json, _ = run(capsys, *args, "--format", "json")
    rows, summary = parse(out_csv)
    doc = json.loads(out_json)
    assert doc["columns"] == list(rows[0])
    assert float(rows[0]["efe_max"]) == doc["rows"][0][1]
    assert doc["summary"]["all_pass"] is True and summary["all_pass"] == "true"


def test_catalog_listing(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0 and len(json.loads(out)) == 11


def test_output_file_and_line_endings(tmp_path, capsys):
    path = tmp_path / "out.csv"
    assert main(["evolve", "--samples", "11", "--output", str(path)]) == 0
    data = path.read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")


def test_seed_resolution(monkeypatch, capsys):
    base = ["verify", "--metric", "godel", "--n-events", "2"]
    _, a, _ = run(capsys, *base, "--seed", "3")
    _, b, _ = run(capsys, *base, "--seed", "4")
    assert a != b
    monkeypatch.setenv("COSMO_SEED", "3")
    _, c, _ = run(capsys, *base, "--seed", "4")
    assert c == a
    monkeypatch.setenv("COSMO_SEED", "x")
    assert main(base) == 2


def test_invalid_constants(capsys):
    code, _, err = run(capsys, "verify", "--metric", "minkowski", "--c", "-1")
    assert code == 2


@pytest.mark.parametrize("args", [
    ["verify", "--metric", "friedman-dust", "--n-events", "3"],
    ["evolve", "--k", "1", "--samples", "51"],
    ["redshift", "--model", "dust", "--t0", "0.2"],
    ["godel-ctc", "--grid", "7", "7", "--workers", "2"],
    ["kinematics", "--metric", "godel", "--n-events", "3"],
])
def test_subprocess_reruns_are_byte_identical(args):
    outs = [subprocess.run([sys.executable, "-m", "relcosmo", *args], capture_output=True, check=False)
            for _ in range(2)]
    assert outs[0].returncode == 0, outs[0].stderr.decode()
    assert outs[0].stdout == outs[1].stdout and len(outs[0].stdout) > 0
