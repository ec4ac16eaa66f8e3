"""Tests for the command-line entry point and its subcommands."""

import io
import json

import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from src.cli.commands import common
from src.config import settings
from src.database.models import AttackTranscript, ExperimentTrial
from src.database.session import init_db
from src.main import main
from src.utils.records import read_jsonl


@pytest.fixture
def memory_db(monkeypatch):
    """Route CLI persistence into an in-memory database."""
    engine = create_engine("sqlite://", connect_args={"check_same_thread": False}, poolclass=StaticPool)
    Session = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    monkeypatch.setattr(common, "SessionLocal", Session)
    monkeypatch.setattr(common, "init_db", lambda: init_db(engine))
    session = Session()
    yield session
    session.close()


def _error(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def test_params_gen_writes_parameter_file(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["--out", str(out), "params-gen", "--u", "3"]) == 0
    assert (out / "params.txt").read_text() == "p=419\nells=3,5,7\n"
    assert read_jsonl(str(out / "params-gen.jsonl"))[0]["p"] == 419
    assert "419" in capsys.readouterr().out


def test_params_gen_budget_exhausted(capsys):
    assert main(["--budget", "1", "params-gen", "--u", "5"]) == 1
    assert _error(capsys)["error_type"] == "ParamsServiceError"


def test_params_audit_pass(capsys):
    assert main(["--seed", "1", "params-audit", "--params", "toy419"]) == 0
    out = capsys.readouterr().out
    assert out.strip().endswith("PASS")
    assert "class number odd" in out


def test_params_audit_fail_for_p_one_mod_four(capsys):
    assert main(["--seed", "1", "params-audit", "--p", "13"]) == 1
    captured = capsys.readouterr()
    assert "FAIL" in captured.out
    record = json.loads(captured.err.strip().splitlines()[-1])
    assert record["success"] is False
    assert record["command"] == "params-audit"
    assert "p = 3 mod 4" in record["error"]


def test_cost_table(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "cost"]) == 0
    rows = read_jsonl(str(tmp_path / "cost.jsonl"))
    assert [r["classical_log2"] for r in rows] == [128, 256, 448]
    assert [r["reference_quantum_log2"] for r in rows] == [62, 94, 129]
    assert "published quantum" in capsys.readouterr().out


def test_cost_rejects_out_of_range(capsys):
    assert main(["cost", "--log-p", "16"]) == 1
    assert "log p must lie" in _error(capsys)["error"]


def test_classgroup_operations(capsys):
    code = main(["--seed", "2", "classgroup", "--delta", "-23", "--reduce", "6,5,2",
                 "--prime", "5", "--dlog", "2,1,3", "--random", "2"])
    assert code == 0
    out = capsys.readouterr().out
    assert "reduce(6,5,2) = 2,-1,3@-23" in out
    assert "prime_form(5) = not split" in out
    report = json.loads(out.splitlines()[0])
    assert report["class_number"] == 3
    assert len(report["operations"]) == 5


def test_classgroup_wrong_discriminant(capsys):
    assert main(["classgroup", "--delta", "-47", "--reduce", "6,5,2"]) == 1
    assert _error(capsys)["error_type"] == "DiscriminantError"


def _matrix_file(tmp_path, text, name="basis.txt"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_lattice_snf(tmp_path, capsys):
    assert main(["lattice", "snf", _matrix_file(tmp_path, "2 2\n2 0\n0 3\n")]) == 0
    report = json.loads(capsys.readouterr().out.splitlines()[0])
    assert report["divisors"] == [1, 6]


def test_lattice_babai(tmp_path, capsys):
    path = _matrix_file(tmp_path, "2 2\n2 0\n0 2\n")
    assert main(["lattice", "babai", path, "--target", "3,1"]) == 0
    report = json.loads(capsys.readouterr().out.splitlines()[0])
    assert report["vector"] == [2, 0]
    assert main(["lattice", "babai", path]) == 2


def test_lattice_relation_basis_golden(tmp_path, capsys):
    path = _matrix_file(tmp_path, "3 3\n3 0 0\n1 9 0\n-2 4 1\n")
    assert main(["lattice", "hnf", path]) == 0
    report = json.loads(capsys.readouterr().out.splitlines()[0])
    assert report["basis"] == [[3, 0, 0], [1, 9, 0], [-2, 4, 1]]
    H = report["result"]
    assert all(H[i][j] == 0 for i in range(3) for j in range(i + 1, 3))
    assert abs(H[0][0] * H[1][1] * H[2][2]) == 27
    assert main(["lattice", "snf", path]) == 0
    report = json.loads(capsys.readouterr().out.splitlines()[0])
    assert report["divisors"] == [1, 1, 27]


def test_lattice_reads_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO("2 2\n4 6\n2 2\n"))
    assert main(["lattice", "snf", "-"]) == 0
    report = json.loads(capsys.readouterr().out.splitlines()[0])
    assert report["divisors"] == [2, 2]


@pytest.mark.parametrize("text, message", [
    ("2 2\n1 0\n0\n", "Row 2 has 1 entries"),
    ("3 2\n1 0\n0 1\n", "announces 3 rows"),
    ("2\n1 0\n0 1\n", "Bad matrix header"),
    ("2 2\n1 x\n0 1\n", "non-integer"),
    ("", "Empty matrix"),
])
def test_lattice_rejects_malformed_matrix(tmp_path, capsys, text, message):
    assert main(["lattice", "hnf", _matrix_file(tmp_path, text)]) == 2
    error = _error(capsys)
    assert error["error_type"] == "LatticeError"
    assert message in error["error"]


def test_lattice_missing_file(tmp_path, capsys):
    assert main(["lattice", "hnf", str(tmp_path / "absent.txt")]) == 2
    assert _error(capsys)["error_type"] == "FileNotFoundError"


def test_keygen_records(tmp_path):
    assert main(["--seed", "5", "--out", str(tmp_path), "keygen", "--keys", "3"]) == 0
    records = read_jsonl(str(tmp_path / "keygen.jsonl"))
    assert len(records) == 3
    assert all(r["seed"] == 5 and r["m"] == 1 for r in records)


def test_exchange_is_byte_identical_under_seed(tmp_path):
    for name in ("a", "b"):
        assert main(["--seed", "1", "--out", str(tmp_path / name), "exchange", "--keys", "4"]) == 0
    first = (tmp_path / "a" / "exchange.jsonl").read_bytes()
    assert first == (tmp_path / "b" / "exchange.jsonl").read_bytes()
    assert all(json.loads(line)["agreed"] for line in first.splitlines())


def test_attack_without_persistence(capsys):
    assert main(["--seed", "3", "--no-persist", "attack", "--params", "toy419", "--keys", "2"]) == 0
    assert "recovered=true (2/2" in capsys.readouterr().out


def test_attack_persists_transcripts(memory_db):
    assert main(["--seed", "4", "--solver", "mitm", "attack", "--keys", "3"]) == 0
    assert memory_db.query(AttackTranscript).count() == 3


def test_attack_query_budget_failure(capsys):
    assert main(["--seed", "3", "--no-persist", "--budget", "2", "attack", "--keys", "1"]) == 1
    captured = capsys.readouterr()
    assert "recovered=false" in captured.out
    assert json.loads(captured.err.strip().splitlines()[-1])["error_type"] == "VerificationError"


def test_table2_on_explicit_discriminants(tmp_path, memory_db, capsys):
    code = main(["--seed", "6", "--out", str(tmp_path), "table2", "--deltas=-1676,-3299", "--trials", "10"])
    assert code == 0
    rows = read_jsonl(str(tmp_path / "table2.jsonl"))
    assert [r["delta"] for r in rows] == [-1676, -3299]
    assert all(r["within_bound"] for r in rows)
    assert len(read_jsonl(str(tmp_path / "trials.jsonl"))) == 20
    assert memory_db.query(ExperimentTrial).count() == 20


def test_config_file_layers_under_flags(tmp_path, capsys):
    config = tmp_path / "run.env"
    config.write_text("trials=4\nseed=9\nverify_points=5\n")
    code = main(["--config", str(config), "--seed", "10", "--no-persist", "--out", str(tmp_path),
                 "table2", "--deltas=-1676"])
    assert code == 0
    assert settings.verify_points == 5
    assert settings.seed == 10
    assert len(read_jsonl(str(tmp_path / "trials.jsonl"))) == 4


def test_unknown_config_key(tmp_path, capsys):
    config = tmp_path / "bad.env"
    config.write_text("colour=blue\n")
    assert main(["--config", str(config), "cost"]) == 2
    assert _error(capsys)["error_type"] == "ValueError"


def test_invalid_budget_is_a_config_error(capsys):
    assert main(["--budget", "0", "cost"]) == 2
    assert _error(capsys)["error_type"] == "ValidationError"


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
