import csv
import json
import math

import numpy as np
import pytest

from nlsflow import solver
from nlsflow.cli import main
from nlsflow.experiments import (
    PUSHFORWARD_COLUMNS,
    ConfigError,
    ExperimentConfig,
    emit_outputs,
    fit_tail_slope,
    load_config,
    run_moment_probe,
    run_pushforward,
    run_tail_study,
    run_validate,
)


def cfg(**kw):
    base = dict(experiment="pushforward", n_samples=200, N=4, t=0.1, step=0.01, R=3.0)
    base.update(kw)
    return load_config(None, **base)


def test_defaults_valid():
    ExperimentConfig().validate()


@pytest.mark.parametrize(
    "kw",
    [
        dict(alpha=0.5),
        dict(n_samples=0),
        dict(t=0.1, step=0.03),
        dict(t=0.03, step=0.01),  # odd step count
        dict(beta=math.nan),
        dict(experiment="bogus"),
        dict(law="other"),
        dict(experiment="moments", p_moment=1.0),
        dict(experiment="tails", lambda_grid=[1.0, 0.5]),
        dict(experiment="tails", lambda_grid=[]),
        dict(experiment="tails", tail_s=0.5),
    ],
)
def test_config_errors(kw):
    with pytest.raises(ConfigError):
        cfg(**kw)


def test_config_file(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('experiment = "moments"\nalpha = 1\nlambda_grid = [0, 1, 2]\nN = 3\n')
    c = load_config(path, N=5)
    assert c.experiment == "moments" and c.alpha == 1.0 and isinstance(c.alpha, float)
    assert c.N == 5 and c.lambda_grid == [0.0, 1.0, 2.0]
    path.write_text("nonsense = 3\n")
    with pytest.raises(ConfigError):
        load_config(path)
    path.write_text("[table]\nalpha = 1\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_pushforward_zero_time_exact():
    res = run_pushforward(cfg(t=0.0))
    for f in res.summary["functionals"].values():
        assert f["difference"] == 0.0
    assert res.ok


def test_pushforward_weights_and_columns():
    res = run_pushforward(cfg(R=1.5))
    assert res.columns == PUSHFORWARD_COLUMNS
    rows = np.array(res.rows, dtype=float)
    chi = rows[:, 1] == 1
    assert chi.any() and (~chi).any()
    assert np.all(np.exp(rows[chi, 2]) > 0)
    assert np.all(rows[~chi, 2] == -np.inf)
    assert np.all(rows[~chi, 4:] == 0)
    assert res.summary["max_weight_discrepancy"] < 1e-6


def test_pushforward_se_halves_with_quadruple_n():
    # doubling n shrinks the paired SE by about 1/sqrt(2)
    a = run_pushforward(cfg(n_samples=3000, R=3.0))
    b = run_pushforward(cfg(n_samples=6000, R=3.0))
    for name in ("phi1", "phi2", "phi3"):
        ratio = b.summary["functionals"][name]["paired_se"] / a.summary["functionals"][name]["paired_se"]
        assert 0.8 / math.sqrt(2) <= ratio <= 1.2 / math.sqrt(2), (name, ratio)


def test_parallel_map_matches_serial():
    a = run_pushforward(cfg(n_samples=1100))
    b = run_pushforward(cfg(n_samples=1100, workers=2))
    assert a.rows == b.rows


def test_moments_trivial_cases():
    t0 = run_moment_probe(cfg(experiment="moments", t=0.0, n_samples=100))
    assert all(r["moment"] == 1.0 for r in t0.summary["table"])
    single = run_moment_probe(cfg(experiment="moments", law="single_mode", n_samples=50))
    for r in single.summary["table"]:
        assert r["moment"] == pytest.approx(1.0, abs=1e-12)
    assert [r["N"] for r in single.summary["table"]] == [4, 8, 16]


def test_tail_study_contract():
    c = cfg(experiment="tails", alpha=1.0, n_samples=4000, lambda_grid=[0.0, 0.5, 1.0, 2.0, 3.0], tail_B=[1.5, 2.5, 4.0])
    res = run_tail_study(c)
    for entry in res.summary["per_B"]:
        assert entry["probability"][0] == pytest.approx(entry["ball_probability"])
        assert all(a >= b for a, b in zip(entry["probability"], entry["probability"][1:]))
    assert res.summary["monotone_in_B"]
    with pytest.raises(ValueError):
        run_tail_study(cfg(experiment="tails", alpha=1.0, n_samples=200, tail_B=[1e-3], lambda_grid=[5.0, 6.0]))


def test_slope_fit():
    lam = np.linspace(0.5, 2.0, 7)
    p = np.exp(-0.7 * lam**2)
    assert fit_tail_slope(lam, p, [100] * 7, 30) == pytest.approx(-0.7)
    assert math.isnan(fit_tail_slope(lam, p, [100] + [0] * 6, 30))


def test_validate_passes_at_defaults():
    res = run_validate(load_config(None, N=6, t=0.2, step=0.01))
    assert res.ok, res.summary


def test_validate_zero_time():
    res = run_validate(load_config(None, N=4, t=0.0, step=0.01))
    assert res.ok
    weight = [c for c in res.summary["checks"] if c["name"] == "weight_dual_formula"][0]
    assert weight["measured"] == 0.0


def test_fault_injection_wrong_grid(monkeypatch, tmp_path):
    monkeypatch.setattr(solver, "min_alias_free_grid", lambda N: 2 * N + 1)
    code = main(["validate", "--N", "6", "--t", "0.2", "--step", "0.01", "--grid-size", "13", "--out", str(tmp_path)])
    assert code == 1
    summary = json.loads(next(tmp_path.glob("*summary.json")).read_text())
    failed = {c["name"] for c in summary["checks"] if not c["passed"]}
    assert "nonlinearity_fft_vs_direct" in failed


def test_cli_exit_codes(tmp_path):
    out = tmp_path / "new" / "dir"
    assert main(["pushforward", "--n-samples", "50", "--N", "3", "--t", "0.1", "--step", "0.01", "--out", str(out)]) == 0
    assert out.is_dir()
    assert main(["pushforward", "--alpha", "0.4", "--out", str(out)]) == 2
    assert main(["pushforward", "--config", str(tmp_path / "missing.toml"), "--out", str(out)]) == 2


def test_outputs_and_determinism(tmp_path):
    args = ["pushforward", "--n-samples", "120", "--N", "4", "--t", "0.1", "--step", "0.01", "--R", "3", "--seed", "99"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == [
        "pushforward_seed99_config.json",
        "pushforward_seed99_samples.csv",
        "pushforward_seed99_summary.json",
    ]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes().replace(b"/a", b"") == (tmp_path / "b" / name).read_bytes().replace(b"/b", b"")
    summary = json.loads((tmp_path / "a" / names[2]).read_text())
    for field in ExperimentConfig.__dataclass_fields__:
        assert field in summary["config"]
    with open(tmp_path / "a" / names[1]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == PUSHFORWARD_COLUMNS
    # shortest round-trip floats
    for value in rows[1][2:]:
        assert repr(float(value)) == value


def test_emit_reports_io_errors(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    res = run_pushforward(cfg(n_samples=10))
    with pytest.raises(OSError):
        emit_outputs(res, blocker / "sub")
