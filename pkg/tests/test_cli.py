import csv
import hashlib
import json
import math
from pathlib import Path

import pytest

from poissonaloha.cli import fmt, load_sim_config, main, parse_sweep, ConfigError
from poissonaloha.single_type import alpha_star_fixedN, p_eq_fixed
from poissonaloha.throughput import throughput_fixedN


@pytest.fixture(autouse=True)
def _cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("POISSONALOHA_OUTPUT_DIR", raising=False)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


def manifest_of(path):
    path = Path(path)
    return json.loads(path.with_name(path.stem + ".manifest.json").read_text())


def test_fmt_uses_twelve_significant_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(4 / 23) == "0.173913043478"
    assert fmt(3) == "3"
    assert fmt(True) == "true"


def test_parse_sweep():
    assert parse_sweep("2:5") == [2, 3, 4, 5]
    assert parse_sweep("1:2:0.5") == [1.0, 1.5, 2.0]
    assert parse_sweep("2,5,10") == [2, 5, 10]
    assert parse_sweep("") == []


def test_utility_curve():
    assert main(["utility-curve", "--lambda", "15", "--kmax", "5", "--alpha", "0", "--grid", "101", "--out", "u.csv"]) == 0
    rows = read_csv("u.csv")
    assert rows[0] == ["p", "U"]
    assert len(rows) == 102
    assert float(rows[1][1]) == 0.0
    assert abs(float(rows[-1][1])) < 1e-2
    m = manifest_of("u.csv")
    assert m["outputs"][0]["sha256"] == hashlib.sha256(Path("u.csv").read_bytes()).hexdigest()
    assert m["command"][1] == "utility-curve"
    assert "version" in m and "config_digest" in m


def test_utility_curve_endpoints_and_two_types():
    assert main(["utility-curve", "--lambda", "15", "--kmax", "3", "--grid", "2", "--out", "e.csv"]) == 0
    rows = read_csv("e.csv")
    assert [r[0] for r in rows[1:]] == ["0", "1"]
    assert main(["utility-curve", "--lambda", "15", "--kmax", "7", "5", "--r1", "0.3", "--grid", "5", "--out", "t.csv"]) == 0
    rows = read_csv("t.csv")
    assert rows[0] == ["p1", "p2", "U1", "U2"] and len(rows) == 26
    assert main(["utility-curve", "--lambda", "15", "--kmax", "7", "5", "--grid", "5"]) == 2
    assert main(["utility-curve", "--lambda", "15", "--kmax", "3", "--grid", "1"]) == 2


def test_bad_flag_is_usage_error():
    assert main(["utility-curve", "--lambda", "abc", "--kmax", "3"]) == 2
    assert main(["no-such-command"]) == 2


def test_equilibrium(capsys):
    assert main(["equilibrium", "--population", "fixed:20", "--kmax", "3", "--out", "eq.json"]) == 0
    res = json.loads(Path("eq.json").read_text())
    assert res["p_opt"] == pytest.approx(4 / 23, abs=1e-11)
    assert res["p_eq"] == pytest.approx(4 / 23, abs=1e-9)
    assert res["alpha_star"] == pytest.approx(1.3433733311710525, rel=1e-11)
    assert main(["equilibrium", "--population", "poisson:15", "--kmax", "3", "--out", "eq2.json"]) == 0
    assert json.loads(Path("eq2.json").read_text())["p_opt"] == pytest.approx(4 / 17, abs=1e-11)
    assert main(["equilibrium", "--population", "fixed:20", "--kmax", "3", "--alpha", "0", "--out", "eq3.json"]) == 0
    assert json.loads(Path("eq3.json").read_text())["p_eq"] == 1.0


def test_equilibrium_infeasible():
    assert main(["equilibrium", "--population", "fixed:3", "--kmax", "5"]) == 3
    assert main(["equilibrium", "--population", "poisson:3", "--kmax", "5"]) == 3
    assert main(["equilibrium", "--population", "bogus", "--kmax", "1"]) == 2


def test_frontier_pareto_fixed():
    assert main(["frontier", "--population", "fixed:15,10", "--kmax", "5", "3", "--search-grid", "64", "--out", "f.csv"]) == 0
    rows = read_csv("f.csv")
    assert rows[0] == ["series", "p1", "p2", "U1", "U2"]
    analytic = [r for r in rows[1:] if r[0] == "pareto_analytic"]
    assert float(analytic[0][2]) == pytest.approx(4 / 13, abs=1e-11)
    assert float(analytic[-1][1]) == pytest.approx(0.3, abs=1e-11)
    assert any(r[0] == "pareto_search" for r in rows)


def test_frontier_restriction_and_regimes():
    assert main(["frontier", "--mode", "restriction", "--population", "fixed:25,20", "--kmax", "2", "2", "--budget", "0.9", "--out", "r.csv"]) == 0
    ends = [r for r in read_csv("r.csv")[1:] if r[0] == "restriction"]
    assert float(ends[0][2]) == pytest.approx(0.108749, abs=1e-6)
    regimes = set()
    for k in ("0 0", "3 3", "1 12"):
        out = f"b{k.replace(' ', '_')}.csv"
        args = ["frontier", "--mode", "both", "--population", "poisson:25", "--r1", "0.3", "--kmax", *k.split(), "--budget", "0.9", "--out", out]
        assert main(args) == 0
        regimes.add(json.loads(Path(out).with_name(Path(out).stem + ".region.json").read_text())["regime"])
    assert regimes == {"ParetoBinding", "RestrictionBinding", "Mixed"}
    assert main(["frontier", "--mode", "both", "--population", "poisson:25", "--r1", "0.3", "--kmax", "1", "1"]) == 2


def test_frontier_degenerate():
    assert main(["frontier", "--population", "poisson:25", "--r1", "0.3", "--kmax", "8", "3"]) == 3


def test_throughput():
    assert main(["throughput", "--scheme", "game-fixed", "--n", "20", "--kmax", "3", "--out", "g.csv"]) == 0
    rows = read_csv("g.csv")
    assert rows[0] == ["N", "scheme", "throughput", "stderr"]
    assert float(rows[1][2]) == pytest.approx(throughput_fixedN(20, 3, 4 / 23).value, rel=1e-11)
    assert main(["throughput", "--scheme", "backoff", "--n", "5", "--w0", "16", "32", "--slots", "20000", "--out", "b.csv"]) == 0
    assert [r[1] for r in read_csv("b.csv")[1:]] == ["backoff-w16", "backoff-w32"]
    assert manifest_of("b.csv")["seed"] == 0
    assert main(["throughput", "--scheme", "game-poisson", "--lambda", "5:15:5", "--kmax", "3", "--out", "p.csv"]) == 0
    assert len(read_csv("p.csv")) == 4


def test_throughput_empty_sweep():
    assert main(["throughput", "--scheme", "game-fixed", "--n", "", "--kmax", "3"]) == 2
    assert main(["throughput", "--scheme", "game-fixed", "--lambda", "5", "--kmax", "3"]) == 2


@pytest.mark.parametrize("K", [1, 3, 5])
def test_converge(K):
    assert main(["converge", "--n", "20", "--kmax", str(K), "--p0", "0.9", "--out", "c.csv"]) == 0
    rows = read_csv("c.csv")
    assert rows[0] == ["step", "p", "U_ON"]
    assert float(rows[-1][1]) == pytest.approx(p_eq_fixed(alpha_star_fixedN(20, K), 20, K), abs=1e-3)


def test_converge_flat_trace_and_errors():
    p_eq = p_eq_fixed(alpha_star_fixedN(20, 3), 20, 3)
    assert main(["converge", "--n", "20", "--kmax", "3", "--p0", repr(p_eq), "--out", "flat.csv"]) == 0
    ps = [float(r[1]) for r in read_csv("flat.csv")[1:]]
    assert max(ps) - min(ps) <= 1e-12
    assert main(["converge", "--n", "20", "--kmax", "3", "--p0", "0.9", "--step", "0"]) == 2
    assert main(["converge", "--n", "20", "--kmax", "3", "--p0", "0.9", "--iters", "3", "--out", "nc.csv"]) == 4
    assert len(read_csv("nc.csv")) == 5


MINIMAL = """\
population: {fixed: 2}
strategy: {p: 0.5}
slots: 10000
seed: 3
"""


def test_simulate_minimal_and_repeat():
    Path("min.yaml").write_text(MINIMAL)
    assert main(["simulate", "--config", "min.yaml", "--out", "a"]) == 0
    assert main(["simulate", "--config", "min.yaml", "--out", "b"]) == 0
    a, b = Path("a/report.json").read_bytes(), Path("b/report.json").read_bytes()
    assert a == b
    rep = json.loads(a)
    assert rep["slots"] == 10000
    assert Path("a/report.manifest.json").exists()


def test_simulate_poisson_with_pu():
    from poissonaloha.pu_activity import p_star_poisson

    p = p_star_poisson(15, 0.4).value
    Path("pu.yaml").write_text(
        f"population: {{poisson: 15}}\nstrategy: {{p: {p!r}}}\npu: {{p_t: 0.5, rho: 0.5}}\nslots: 400000\nseed: 1\n"
    )
    assert main(["simulate", "--config", "pu.yaml", "--out", "pu"]) == 0
    rep = json.loads(Path("pu/report.json").read_text())
    est = rep["pu_collision_rate"]
    exact = -math.expm1(-15 * p) / 4
    assert abs(est["value"] - exact) <= 3 * est["stderr"]
    # the averaged p* only approximates the Poisson constraint
    assert abs(exact - 0.1) <= 0.01


def test_simulate_overrides():
    Path("min.yaml").write_text(MINIMAL)
    assert main(["simulate", "--config", "min.yaml", "--seed", "9", "--slots", "20000", "--out", "o"]) == 0
    m = json.loads(Path("o/report.manifest.json").read_text())
    assert m["seed"] == 9 and m["config"]["slots"] == 20000


@pytest.mark.parametrize(
    "text,needle",
    [
        ("population: {fixed: 2}\nstrategy: {p: 1.5}\n", "line 2"),
        ("population: {fixed: 2}\nstrategy: {p: 0.5}\ncolour: red\n", "line 3"),
        ("population: {fixed: 2}\nstrategy: {p: 0.5}\ntypes:\n  - {r: 1.0, kmx: 2}\n", "line 4"),
        ("population: [1, 2\n", "line"),
        ("population: {fixed: 2}\n", "strategy"),
        ("population: {fixed: 2}\nstrategy: {p: 0.5}\nslots: many\n", "line 3"),
    ],
)
def test_simulate_malformed(text, needle, capsys):
    Path("bad.yaml").write_text(text)
    assert main(["simulate", "--config", "bad.yaml", "--out", "x"]) == 2
    assert needle in capsys.readouterr().err
    with pytest.raises(ConfigError):
        load_sim_config(text)


def test_simulate_missing_file():
    assert main(["simulate", "--config", "nope.yaml"]) == 2


def test_output_dir_env(tmp_path, monkeypatch):
    target = tmp_path / "envout"
    monkeypatch.setenv("POISSONALOHA_OUTPUT_DIR", str(target))
    assert main(["equilibrium", "--population", "fixed:20", "--kmax", "3"]) == 0
    assert (target / "equilibrium.json").exists()
    assert (target / "equilibrium.manifest.json").exists()


def test_replay_reproduces_outputs():
    assert main(["throughput", "--scheme", "backoff", "--n", "2,5", "--slots", "20000", "--seed", "4", "--out", "bo.csv"]) == 0
    before = Path("bo.csv").read_bytes()
    assert main(["replay", "bo.manifest.json"]) == 0
    assert Path("bo.csv").read_bytes() == before
    Path("min.yaml").write_text(MINIMAL)
    assert main(["simulate", "--config", "min.yaml", "--out", "s"]) == 0
    assert main(["replay", "s/report.manifest.json"]) == 0


def test_replay_detects_mismatch():
    Path("min.yaml").write_text(MINIMAL)
    assert main(["simulate", "--config", "min.yaml", "--out", "s"]) == 0
    Path("min.yaml").write_text(MINIMAL.replace("seed: 3", "seed: 4"))
    assert main(["replay", "s/report.manifest.json"]) == 1
    assert main(["replay", "missing.json"]) == 2
