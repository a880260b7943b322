import io
import json

import pytest

from subgrowth.cli import main


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_gamma_a1_value():
    code, text = run_cli("gamma", "A1")
    assert code == 0
    payload = json.loads(text)
    assert payload["R"] == "1"
    assert payload["gamma"].startswith("0.0428932188")


def test_gamma_named_group():
    code, text = run_cli("gamma", "SL(4)")
    payload = json.loads(text)
    assert code == 0 and payload["type"] == "A3" and payload["R"] == "2"


def test_json_byte_identical_across_runs(tmp_path):
    _, first = run_cli("roots", "E6")
    _, second = run_cli("roots", "E6")
    assert first == second
    payload = json.loads(first)
    assert payload["positive_root_count"] == "36"
    assert payload["degrees"] == ["2", "5", "6", "8", "9", "12"]
    assert len(payload["symmetries"]) == 2


def test_parabolics_verify_min():
    code, text = run_cli("parabolics", "E8", "--verify-min")
    assert code == 0
    payload = json.loads(text)
    assert payload["verify_min"]["min_h"] == "15"
    assert payload["verify_min"]["verdict"] == "PASS"
    assert len(payload["rows"]) == 256


def test_parabolics_exact_index_twisted_is_validation_error(capsys):
    code, _ = run_cli("parabolics", "2A3", "--exact-index", "3")
    assert code == 1
    assert "asymptotics" in capsys.readouterr().err


def test_count_abelian_example():
    code, text = run_cli("count-abelian", "2", "4", "--n", "8", "--brute-check")
    assert code == 0
    payload = json.loads(text)
    assert payload["counts_by_index"] == {"1": "1", "2": "3", "4": "3", "8": "1"}
    assert payload["s_n"] == "8"
    assert payload["brute_check"] == "PASS"


def test_extremal_exhaustive():
    code, text = run_cli("extremal", "--R", "1", "--d", "1", "--n", "16", "--exhaustive")
    payload = json.loads(text)
    assert code == 0
    assert payload["best_A"] == ["2", "4"] and payload["best_count"] == "4"


def test_extremal_schedule_csv():
    code, text = run_cli("--format", "csv", "extremal", "--R", "1", "--d", "1", "--schedule", "2^16,2^20")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "n,ratio,gamma_target,best_A,best_r"
    assert len(lines) == 3 and lines[1].startswith("65536,")


def test_extremal_refusal_exit_code(capsys):
    code, _ = run_cli("extremal", "--R", "1", "--d", "1", "--n", str(10**7), "--exhaustive")
    assert code == 2
    assert "heuristic" in capsys.readouterr().err


def test_minh_small(tmp_path):
    code, text = run_cli("--cache-dir", str(tmp_path), "minh", "--q-list", "5")
    assert code == 0
    payload = json.loads(text)
    assert payload["rows"][0]["min_h"].startswith("1.2924812503")
    assert payload["rows"][0]["subgroup_count"] == "76"


def test_minh_refusal(tmp_path, capsys):
    code, _ = run_cli("--cache-dir", str(tmp_path), "--enumeration-bound", "50", "minh", "--q-list", "5")
    assert code == 2
    assert "bound" in capsys.readouterr().err


def test_congruence_ledger(tmp_path):
    code, text = run_cli("--cache-dir", str(tmp_path), "congruence", "--modulus-cap", "2", "--n", "6")
    payload = json.loads(text)
    assert code == 0
    assert payload["rows"] == [{"level": "1", "count": "1"}, {"level": "2", "count": "5"}]
    assert payload["total"] == "6"


def test_validation_exit_code(capsys):
    code, _ = run_cli("gamma", "Z9")
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_config_file_with_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"precision_digits": 10, "format": "json"}))
    _, text = run_cli("--config", str(cfg), "gamma", "A1")
    assert len(json.loads(text)["gamma"]) <= 13  # 10 significant digits
    _, text = run_cli("--config", str(cfg), "--precision", "30", "gamma", "A1")
    assert len(json.loads(text)["gamma"]) > 13  # flag wins


def test_human_format():
    code, text = run_cli("--format", "human", "gamma", "F4")
    assert code == 0
    assert "gamma: 0.0016049" in text


def test_bad_format_rejected(capsys):
    code, _ = run_cli("--format", "yaml", "gamma", "A1")
    assert code == 1
    assert "invalid choice" in capsys.readouterr().err


def test_roots_csv_shape():
    code, text = run_cli("--format", "csv", "roots", "G2")
    assert code == 0
    header = text.splitlines()[0].split(",")
    assert "positive_root_count" in header
