"""End-to-end runs of the named scenarios and the command line front end."""

import json

import pytest

from maxlip import (
    ConfigError,
    make_grid,
    read_gridfunction_csv,
    report_from_json,
    run_scenario,
)
from maxlip.cli import main


def test_identities_scenario_passes():
    rep = run_scenario("identities", {"grid": {"dim": 1, "cells": 16}})
    assert not rep.has_failures
    assert rep.failed == 0
    assert rep.passed > 0
    ids = [c.check_id for c in rep.checks]
    assert len(ids) == len(set(ids))


def test_all_scenario_merges_subreports():
    rep = run_scenario(
        "all",
        {"grid": {"dim": 1, "cells": 8}, "refinements": [8, 16]},
    )
    assert not rep.has_failures
    assert rep.config["scenario"] == "all"
    assert set(rep.config["scenarios"]) == {
        "identities",
        "lemmas",
        "theorem1",
        "theorem2",
        "theorem3",
        "normequiv",
        "counterexamples",
    }


def test_counterexample_star_value_is_closed_form():
    rep = run_scenario(
        "counterexamples",
        {
            "grid": {"dim": 1},
            "beta": 0.5,
            "exponents": [{"const": 2.0}],
            "functions": {"b": [{"kind": "const", "value": -1.0}], "f": []},
            "refinements": [256],
        },
    )
    assert not rep.has_failures
    rows = [c for c in rep.checks if "lambda-star-const" in c.check_id and "N256" in c.check_id]
    assert rows
    assert rows[0].lhs == pytest.approx(32.0, rel=1e-6)
    assert rows[0].status == "pass"


def test_runs_are_deterministic():
    raw = {"grid": {"dim": 1, "cells": 16}}
    a = run_scenario("theorem1", raw).to_dict()
    b = run_scenario("theorem1", raw).to_dict()
    a.pop("timestamp")
    b.pop("timestamp")
    assert a == b


def test_unknown_scenario_and_key_rejected():
    with pytest.raises(ConfigError, match="unknown scenario"):
        run_scenario("theorem9")
    with pytest.raises(ConfigError, match=r"unknown keys \['grdi'\]"):
        run_scenario("identities", {"grdi": {}})


def test_report_json_round_trip(tmp_path):
    rep = run_scenario("identities", {"grid": {"dim": 1, "cells": 8}})
    path = tmp_path / "rep.json"
    path.write_text(rep.to_json())
    back = report_from_json(path.read_text())
    assert back.to_dict() == rep.to_dict()


def test_cli_verify_exits_zero_and_writes_json(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": {"dim": 1, "cells": 16}}))
    out = tmp_path / "rep.json"
    code = main(["verify", "identities", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["summary"]["failed"] == 0
    assert payload["scenario"] == "identities"


def test_cli_failure_exit_code(tmp_path):
    # Zero tolerance turns benign bisection residue into red rows.
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "grid": {"dim": 1, "cells": 16},
                "tolerances": {"identity_tol": 0.0},
            }
        )
    )
    assert main(["verify", "lemmas", "--config", str(cfg)]) == 1


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"exponents": [{"const": 1.0}]}))
    code = main(["verify", "lemmas", "--config", str(cfg)])
    assert code == 2
    assert "admissibility requires 1 < p_-" in capsys.readouterr().err


def test_cli_bad_thread_env_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MAXLIP_THREADS", "abc")
    code = main(["verify", "identities"])
    assert code == 2
    assert "MAXLIP_THREADS" in capsys.readouterr().err


def test_cli_unwritable_out_exit_code(tmp_path, capsys):
    code = main(
        ["verify", "identities", "--out", "/nonexistent-dir/rep.json"]
    )
    assert code == 3
    assert "cannot write output" in capsys.readouterr().err


def test_cli_csv_format(tmp_path):
    out = tmp_path / "rep.csv"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": {"dim": 1, "cells": 8}}))
    code = main(
        ["verify", "identities", "--config", str(cfg), "--format", "csv", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "check_id,anchor,relation,lhs,rhs,tolerance,status,witness"
    rep = run_scenario("identities", {"grid": {"dim": 1, "cells": 8}})
    assert len(lines) == 1 + len(rep.checks)


def test_cli_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "maxlip" in capsys.readouterr().out


def test_cli_compute_round_trip(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "grid": {"dim": 1, "cells": 8},
                "function": {"kind": "step", "left": 0.0, "right": 1.0, "split": 0.5},
            }
        )
    )
    out = tmp_path / "hl.csv"
    assert main(["compute", "hl", "--config", str(cfg), "--out", str(out)]) == 0
    f = read_gridfunction_csv(out, make_grid(1, 8))
    # Every window holding cell 0 starts at 0; the full window wins with 4/8.
    assert f.values[-1] == pytest.approx(1.0)
    assert f.values[0] == pytest.approx(0.5)


def test_cli_compute_missing_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": {"dim": 1, "cells": 8}}))
    out = tmp_path / "x.csv"
    code = main(["compute", "hl", "--config", str(cfg), "--out", str(out)])
    assert code == 2
    assert "requires 'function'" in capsys.readouterr().err


def test_cli_compute_scalar_output(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "grid": {"dim": 1, "cells": 16},
                "beta": 0.5,
                "exponent": {"const": 2.0},
                "symbol": {"kind": "const", "value": -1.0},
            }
        )
    )
    out = tmp_path / "v.txt"
    assert main(["compute", "lambda-star", "--config", str(cfg), "--out", str(out)]) == 0
    assert float(out.read_text()) == pytest.approx(8.0, rel=1e-9)
