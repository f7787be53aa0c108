import json
from pathlib import Path

import jsonschema
import pytest
import yaml

from mixret.cli import main
from mixret.config import load_config, parse_config, with_overrides
from mixret.errors import InputError
from mixret.experiment import AUDIT_BANNER, result_schema, run_experiment, sweep
from mixret.report import emit_report

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, data, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


def base_cfg(**kw):
    cfg = {
        "mode": "geometric",
        "model": {"kind": "iid", "alphabet": ["a", "b"], "probs": [0.7, 0.3]},
        "targets": {"V": "a", "W": "b"},
        "schedule": {"kind": "linear"},
        "N": 40,
        "M": 2000,
        "master_seed": 99,
    }
    cfg.update(kw)
    return cfg


def test_run_writes_valid_artifacts(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", str(write(tmp_path, base_cfg())), "--out", str(out)]) == 0
    assert "tv(empirical, limit)" in capsys.readouterr().out
    result = json.loads((out / "result.json").read_text())
    jsonschema.validate(result, result_schema())
    assert (out / "histogram.csv").read_text().startswith("# censored_count,")
    assert (out / "exact.csv").exists()
    assert result["limit_params"]["rho"] == pytest.approx(0.3)


def test_lambda_plumbing(tmp_path):
    out = tmp_path / "tm"
    rc = main(["run", "--config", str(CONFIGS / "thue_morse_run.yaml"), "--samples", "2000", "--out", str(out)])
    assert rc == 0
    result = json.loads((out / "result.json").read_text())
    jsonschema.validate(result, result_schema())
    assert result["limit_params"]["lambda"] == pytest.approx(2.0, abs=1e-12)
    assert result["targets"]["V"] == ["01101001"]


def test_overlapping_targets_exit_2(capsys):
    assert main(["run", "--config", str(CONFIGS / "overlapping_targets.yaml")]) == 2
    err = capsys.readouterr().err
    assert "for any disjoint sets" in err and err.startswith("error [mixret.")


def test_capability_exit_3(tmp_path, capsys):
    cfg = base_cfg(mode="poisson", targets={"V": "abbab"}, N=30, budget=4, exact=True)
    assert main(["run", "--config", str(write(tmp_path, cfg))]) == 3
    assert "live states" in capsys.readouterr().err


def test_bad_config_exit_2(tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == 2
    bad = base_cfg()
    del bad["targets"]["W"]
    assert main(["run", "--config", str(write(tmp_path, bad))]) == 2


def test_bilinear_banner(tmp_path, capsys):
    out = tmp_path / "bl"
    rc = main(["run", "--config", str(CONFIGS / "bilinear.yaml"), "--samples", "2000", "--out", str(out)])
    assert rc == 0
    assert AUDIT_BANNER in capsys.readouterr().out
    result = json.loads((out / "result.json").read_text())
    assert result["audit"]["verdict"] == "fail"
    assert AUDIT_BANNER in result["warnings"]


def test_audit_command(capsys):
    assert main(["audit", "--config", str(CONFIGS / "bilinear.yaml"), "--N", "10", "100"]) == 0
    out = capsys.readouterr().out
    assert "N=10  K1=2  K2=10" in out and "verdict: fail" in out


def test_round_trip_reproduces_histogram(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(write(tmp_path, base_cfg())), "--seed", "1234", "--out", str(first)]) == 0
    assert main(["run", "--config", str(first / "result.json"), "--out", str(second)]) == 0
    assert (first / "histogram.csv").read_bytes() == (second / "histogram.csv").read_bytes()
    assert "# seed,1234" in (second / "histogram.csv").read_text()


def test_workers_flag_keeps_histogram(tmp_path):
    cfg = write(tmp_path, base_cfg())
    outs = []
    for w in ("1", "3"):
        out = tmp_path / f"w{w}"
        assert main(["run", "--config", str(cfg), "--workers", w, "--no-exact", "--out", str(out)]) == 0
        outs.append((out / "histogram.csv").read_bytes())
    assert outs[0] == outs[1]


def test_sweep_command(tmp_path, capsys):
    cfg = base_cfg(
        mode="poisson",
        model={"kind": "iid", "alphabet": ["0", "1"], "probs": [0.5, 0.5]},
        targets={"V": {"generator": "thue-morse", "length": "L"}},
        family={"L": [3, 6], "N_rule": {"kind": "lambda", "lambda": 2}},
        M=3000,
        exact=False,
    )
    del cfg["N"]
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(write(tmp_path, cfg)), "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "verdict:" in text and "slope tv/L" in text
    assert (out / "convergence.csv").read_text().splitlines()[0].startswith("L,n,N,tv_empirical")
    for L in range(3, 7):
        jsonschema.validate(json.loads((out / f"L{L}" / "result.json").read_text()), result_schema())
    summary = json.loads((out / "sweep.json").read_text())["summary"]
    assert [r["N"] for r in summary] == [16, 32, 64, 128]


def test_empty_family_range(tmp_path):
    cfg = base_cfg(family={"L": [5, 4]})
    del cfg["N"]
    with pytest.raises(InputError):
        sweep(parse_config(cfg))
    assert main(["sweep", "--config", str(write(tmp_path, cfg))]) == 2


def test_periodic_sweep_flags_kappa():
    cfg = with_overrides(load_config(CONFIGS / "periodic_sweep.yaml"), M=200)
    cfg.family["L"] = [4, 6]
    res = sweep(cfg)
    assert res.conditions.verdicts["kappa"] == "violated"
    assert res.verdict.startswith("no convergence verdict")


def test_emit_report_variants():
    cfg = parse_config(base_cfg(M=500))
    res = run_experiment(cfg)
    single = emit_report(res)
    assert single.count("quantity") == 1 and "lambda_N = N * P(V)" in single
    assert emit_report([res, res]).count("quantity") == 2


def test_example_configs_parse():
    for path in CONFIGS.glob("*.yaml"):
        load_config(path)


def test_target_length_expressions():
    cfg = base_cfg(
        mode="poisson",
        targets={"V": {"generator": "sequence", "sequence": "abababab", "length": "L-2"}},
        family={"L": [5, 5], "N_rule": {"kind": "fixed", "N": 8}},
        M=10,
    )
    del cfg["N"]
    V, _ = parse_config(cfg).targets(5)
    assert V.words == (tuple("aba"),)
    with pytest.raises(InputError):
        parse_config(cfg).targets(None)
