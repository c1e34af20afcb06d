import json

import pytest

from ssk3primes.cli import main


def test_list_types(capsys):
    assert main(["list-types", "--rank", "20", "--count-only"]) == 0
    assert capsys.readouterr().out.strip() == "3058"
    assert main(["list-types", "--rank", "4"]) == 0
    assert len(capsys.readouterr().out.split()) == 6


def test_analyze_json_and_text(capsys):
    assert main(["analyze", "D7+A11+2A1", "--json", "--primes-up-to", "50"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["Sigma_R"] == [5, 7, 17, 19] and obj["primes"][:4] == [5, 7, 17, 19]
    assert main(["analyze", "D7+A11+2A1", "--text"]) == 0
    assert "density   1/2" in capsys.readouterr().out


def test_primes(capsys):
    assert main(["primes", "D7+A11+2A1", "--max", "45"]) == 0
    assert capsys.readouterr().out.split() == ["5", "7", "17", "19", "29", "31", "41", "43"]
    assert main(["primes", "10A2", "--max", "100"]) == 0
    assert capsys.readouterr().out.strip() == ""


def test_usage_errors(capsys):
    assert main(["analyze", "E9"]) == 1
    assert main(["analyze", "A5"]) == 1
    assert main(["list-types", "--rank", "0"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_batch_exit_codes(tmp_path, capsys):
    out, csv = tmp_path / "r.jsonl", tmp_path / "r.csv"
    assert main(["batch", "--rank", "5", "--out", str(out), "--csv", str(csv)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["total"] == 9 and out.exists() and csv.exists()
    # with a node budget of 1 the search for 9A1 is cut short
    assert main(["batch", "--rank", "9", "--budget", "1"]) == 3


def test_internal_error_exit(monkeypatch, capsys):
    import ssk3primes.pipeline as pl

    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(pl, "analyze", boom)
    assert main(["analyze", "D7+A11+2A1"]) == 2
    assert "internal error" in capsys.readouterr().err
