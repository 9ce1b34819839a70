import csv
import json

import pytest

import frozen
from reppricing.cli import dumps, run


def write_params(tmp_path, name="fig1a.json", **extra):
    raw = dict(u=2, c=1, r_L=0.8, r_H=0.9, k=1.4, n=100, **extra)
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return path


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_equilibrium_csv_endpoints(tmp_path):
    out = tmp_path / "eq"
    assert run(["equilibrium", "--params", str(write_params(tmp_path)), "--format", "csv", "--out", str(out)]) == 0
    rows = read_csv(out / "equilibrium.csv")
    assert list(rows[0]) == ["price", "cdf_low", "cdf_high"]
    assert float(rows[0]["price"]) == pytest.approx(frozen.FIG1A_SUPPORT_LOW[0], abs=1e-15)
    assert float(rows[-1]["price"]) == pytest.approx(1.8)
    assert float(rows[0]["cdf_low"]) == 0.0 and float(rows[-1]["cdf_high"]) == pytest.approx(1.0, abs=1e-12)
    at_top_low = next(r for r in rows if float(r["price"]) == pytest.approx(1.6))
    assert float(at_top_low["cdf_low"]) == pytest.approx(1.0)
    report = json.loads((out / "equilibrium.json").read_text())
    assert report["roles"]["L"]["distribution"]["point_masses"] == [[1.6, pytest.approx(0.25)]]


def test_grid_flag(tmp_path):
    out = tmp_path / "eq"
    assert run(["equilibrium", "--figure", "fig1a", "--format", "csv", "--grid", "10", "--out", str(out)]) == 0
    assert len(read_csv(out / "equilibrium.csv")) == 20


def test_verify_fig2a(tmp_path):
    out = tmp_path / "v"
    params = write_params(tmp_path, model="competition")
    assert run(["verify", "--params", str(params), "--out", str(out)]) == 0
    report = json.loads((out / "verify.json").read_text())
    assert report["passed"]
    assert set(report["certificates"]) == {"L1", "L2", "H1", "H2"}
    assert all(c["passed"] for c in report["certificates"].values())


def test_exit_codes(tmp_path, capsys):
    assert run(["verify", "--params", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 1
    assert "missing.json" in capsys.readouterr().err
    assert run(["equilibrium", "--params", str(write_params(tmp_path, "bad.json") ), "--c", "1.7",
                "--out", str(tmp_path / "o")]) == 2
    assert run(["equilibrium", "--out", str(tmp_path / "o")]) == 2
    (tmp_path / "junk.json").write_text("{not json")
    assert run(["equilibrium", "--params", str(tmp_path / "junk.json"), "--out", str(tmp_path / "o")]) == 2
    assert run(["nonsense"]) == 2


def test_inline_flags(tmp_path):
    out = tmp_path / "o"
    argv = ["threshold", "--u", "2", "--c", "1", "--r-L", "0.8", "--r-H", "0.9", "--k", "1", "--n", "100",
            "--format", "csv", "--points", "50", "--out", str(out)]
    assert run(argv) == 0
    result = json.loads((out / "threshold.json").read_text())
    assert result["threshold"]["k_star"] == pytest.approx(frozen.K1_STAR, abs=1e-11)
    rows = read_csv(out / "premium_map.csv")
    assert list(rows[0]) == ["k", "E_L", "E_H", "sign"] and len(rows) == 50


def test_simulate_and_rounds_csv(tmp_path):
    out = tmp_path / "s"
    assert run(["simulate", "--figure", "fig1a", "--rounds", "20000", "--seed", "3", "--format", "csv",
                "--out", str(out)]) == 0
    report = json.loads((out / "simulate.json").read_text())
    assert report["passed"]
    rows = read_csv(out / "rounds.csv")
    assert len(rows) == 20000 and "profit_H" in rows[0]


def test_sweep_outputs(tmp_path):
    out = tmp_path / "w"
    assert run(["sweep", "--points", "10", "--format", "csv", "--out", str(out)]) == 0
    files = {f["path"] for f in manifest(out)["outputs"]}
    assert files == {"sweep.json", "premium_benchmark.csv", "premium_competition.csv", "sweep.csv"}


def test_analyze(tmp_path):
    data = tmp_path / "offers.csv"
    lines = ["category,product,seller_id,rating,sales,comments,price,flags,variant_group"]
    for i in range(12):
        lines.append(f"TV,tv{i % 2},s{i},{4.0 + 0.08 * i:.2f},{(i * i) % 17},{(5 * i) % 11},{5000 + 37 * (i % 5) + i},,")
    lines.append("TV,tv0,z,,1,1,5000,,")
    lines.append("TV,tv0,y,4.5,1,1,abc,,")
    data.write_text("\n".join(lines) + "\n")
    out = tmp_path / "a"
    assert run(["analyze", "--input", str(data), "--format", "csv", "--out", str(out)]) == 0
    result = json.loads((out / "analysis.json").read_text())
    assert result["kept"] == 12 and len(result["diagnostics"]) == 1
    assert [a["rule"] for a in result["audit"]] == ["no_rating"]
    assert len(result["regressions"]) == 1 and len(result["ttests"]) == 1
    for name in ("table1_prices", "table2_ratings", "table3_median_split", "table4_regression", "audit"):
        assert (out / f"{name}.csv").exists()


def test_analyze_missing_column(tmp_path):
    data = tmp_path / "offers.csv"
    data.write_text("category,product,seller_id,sales,comments,price\nTV,tv,a,1,1,5\n")
    assert run(["analyze", "--input", str(data), "--out", str(tmp_path / "a")]) == 2


@pytest.mark.parametrize("argv", [
    ["equilibrium", "--figure", "fig2b", "--format", "csv"],
    ["simulate", "--figure", "fig1a", "--rounds", "5000", "--seed", "7", "--format", "csv"],
    ["threshold", "--figure", "fig2a", "--format", "csv"],
    ["sweep", "--points", "5", "--seed", "2", "--format", "csv"],
])
def test_byte_identical_reruns(tmp_path, argv):
    outputs = []
    for i in range(2):
        out = tmp_path / str(i)
        assert run(argv + ["--out", str(out)]) in (0, 3)
        m = manifest(out)
        outputs.append({f["path"]: (out / f["path"]).read_bytes() for f in m["outputs"]})
    assert outputs[0] == outputs[1]


def test_manifest_lists_parseable_artifacts(tmp_path):
    out = tmp_path / "o"
    run(["verify", "--figure", "fig1b", "--format", "csv", "--out", str(out)])
    m = manifest(out)
    assert m["subcommand"] == "verify" and m["seed"] == 0 and m["wall_clock_seconds"] >= 0
    assert m["parameters"]["k"] == 0.6
    for entry in m["outputs"]:
        path = out / entry["path"]
        if entry["format"] == "json":
            json.loads(path.read_text())
        else:
            assert read_csv(path)
    assert sorted(p.name for p in out.iterdir()) == sorted([f["path"] for f in m["outputs"]] + ["manifest.json"])


def test_dumps_round_trips_floats():
    values = [0.1, 1 / 3, 1e-300, 2.0, 123456789.123456789]
    assert json.loads(dumps(values)) == values
    assert dumps(float("nan")).strip() == "null"
