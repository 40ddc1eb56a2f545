"""Command-line front end: reports, formats and exit codes."""

import json
import math

import pytest

from gp_states.cli import main
from gp_states.services.oracle_service import OracleService
from gp_states.services.spec_loader import load_state, parse_state_spec

from .conftest import SPECS_DIR


def spec(name: str) -> str:
    return str(SPECS_DIR / name)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_structured(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "structured")
    return code, (json.loads(out) if out else None), err


def entry(report, table_name, label):
    for table in report["tables"]:
        if table["name"] == table_name:
            for item in table["entries"]:
                if item["label"] == label:
                    return complex(*item["value"])
    raise KeyError(f"{table_name}/{label}")


def write_spec(tmp_path, name, document):
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


class TestClassify:
    def test_abe(self, capsys):
        code, report, _ = run_structured(capsys, "classify", spec("abe.json"))
        assert code == 0
        assert report["verdicts"]["classification"] == "unique_pure"

    def test_mixture(self, capsys):
        code, report, _ = run_structured(capsys, "classify", spec("mixture.json"))
        assert code == 0
        assert report["verdicts"]["classification"] == "boundary_mixture"
        assert entry(report, "components", "y_1[n]") == pytest.approx(1.0)
        assert entry(report, "components", "y_2[n]") == pytest.approx(-1.0)
        assert report["notes"]

    def test_malformed_norm(self, capsys, tmp_path):
        path = write_spec(tmp_path, "bad.json", {"type": "gp_finite", "n": 2, "k": 2, "z": [[1, 0], [1, 0], [0, 0]]})
        code, out, err = run(capsys, "classify", path)
        assert code == 1
        assert out == ""
        assert "error" in err

    def test_normalize_flag(self, capsys, tmp_path):
        path = write_spec(tmp_path, "scaled.json", {"type": "gp_finite", "n": 2, "k": 2, "z": [[1, 0], [1, 0], [0, 0]], "normalize": True})
        code, report, _ = run_structured(capsys, "classify", path)
        assert code == 0
        assert report["verdicts"]["classification"] == "unique_pure"

    def test_near_boundary(self, capsys, tmp_path):
        last = 1.0 - 5e-9
        path = write_spec(tmp_path, "near.json", {"type": "gp_finite", "n": 2, "k": 2, "z": [[math.sqrt(1 - last ** 2), 0], [0, 0], [last, 0]]})
        code, _, _ = run(capsys, "classify", path)
        assert code == 2

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "classify", str(tmp_path / "missing.json"))
        assert code == 1
        assert "not found" in err


class TestEval:
    def test_abe_words(self, capsys):
        code, report, _ = run_structured(capsys, "eval", spec("abe.json"), "--word", "s1", "--word", "s2", "--word", "s2 s2")
        assert code == 0
        assert abs(entry(report, "moments", "s1") - 1 / math.sqrt(2)) <= 1e-12
        assert abs(entry(report, "moments", "s2") - 0.5) <= 1e-12
        assert abs(entry(report, "moments", "s2 s2")) <= 1e-12

    def test_unit(self, capsys):
        _, report, _ = run_structured(capsys, "eval", spec("abe.json"), "--word", "I")
        assert entry(report, "moments", "I") == pytest.approx(1.0)

    def test_all_short_words(self, capsys):
        _, report, _ = run_structured(capsys, "eval", spec("cuntz.yaml"), "--max-len", "2")
        assert len(report["tables"][0]["entries"]) == 1 + 2 * 2 + 3 * 4

    def test_verify(self, capsys):
        code, report, _ = run_structured(capsys, "eval", spec("abe.json"), "--verify", "--max-len", "3")
        assert code == 0
        assert report["verdicts"]["oracle"] == "agree"
        assert report["residuals"][0]["value"][0] < 1e-10

    def test_oracle_mismatch_exit_code(self, capsys, monkeypatch):
        monkeypatch.setattr(OracleService, "table_discrepancy", staticmethod(lambda first, second: 1.0))
        code, report, _ = run_structured(capsys, "eval", spec("abe.json"), "--verify", "--word", "s1")
        assert code == 3
        assert report["verdicts"]["oracle"] == "mismatch"

    def test_zeta_tolerance(self, capsys):
        _, report, _ = run_structured(capsys, "eval", spec("zeta.yaml"), "--word", "s1")
        moment = next(t for t in report["tables"] if t["name"] == "moments")["entries"][0]
        assert moment["tolerance"] == pytest.approx(1e-11)
        assert complex(*moment["value"]) == pytest.approx(math.sqrt(6) / math.pi)

    def test_deterministic_text(self, capsys):
        first = run(capsys, "eval", spec("abe.json"), "--max-len", "3")[1]
        second = run(capsys, "eval", spec("abe.json"), "--max-len", "3")[1]
        assert first == second
        assert first.startswith("command: eval\n")


class TestEquiv:
    def test_gp_vs_cuntz(self, capsys):
        code, report, _ = run_structured(capsys, "equiv", spec("gp_from_cuntz.json"), spec("cuntz.yaml"))
        assert code == 0
        assert report["verdicts"]["equivalence"] == "exact_equivalent"
        assert report["verdicts"]["product_order_check"] == "exact_equivalent"

    def test_rho_states(self, capsys):
        _, report, _ = run_structured(capsys, "equiv", spec("rho_c.json"), spec("rho_c_balanced.json"))
        assert report["verdicts"]["equivalence"] == "distinct"

    def test_self_with_witness(self, capsys):
        _, report, _ = run_structured(capsys, "equiv", spec("abe.json"), spec("abe.json"), "--witness", "--max-len", "4")
        assert report["verdicts"]["equivalence"] == "exact_equivalent"
        assert report["verdicts"]["states_agree"] == "true"
        assert report["verdicts"]["invariant_a"] == "interior"

    def test_round_trip_of_printed_states(self, capsys):
        _, report, _ = run_structured(capsys, "equiv", spec("zeta.yaml"), spec("geometric.json"))
        assert report["verdicts"]["equivalence"] == "distinct"
        assert parse_state_spec(report["state_specs"]["a"]).to_param() == load_state(spec("zeta.yaml"))
        assert parse_state_spec(report["state_specs"]["b"]).to_param() == load_state(spec("geometric.json"))

    def test_mixture_has_no_invariant(self, capsys):
        code, _, err = run(capsys, "equiv", spec("mixture.json"), spec("abe.json"))
        assert code == 1
        assert "mixtures" in err


class TestOtherCommands:
    def test_gram(self, capsys):
        code, report, _ = run_structured(capsys, "gram", spec("abe.json"))
        assert code == 0
        assert report["verdicts"]["correlation_dimension"] == "2"
        assert report["verdicts"]["positive_semidefinite"] == "true"
        assert entry(report, "theta", "theta[1,1]") == pytest.approx(0.5)

    def test_factorize(self, capsys):
        code, report, _ = run_structured(capsys, "factorize", "s2 s2 s2", "--n", "2", "--order", "2")
        assert code == 0
        assert report["verdicts"]["hat_j"] == "t3"
        assert report["verdicts"]["tail"] == "1"
        assert report["verdicts"]["expansion_matches"] == "true"

    def test_factorize_infinite(self, capsys):
        _, report, _ = run_structured(capsys, "factorize", "s3 s2 s3 s3", "--n", "3", "--order", "infinite")
        assert report["verdicts"]["hat_j"] == "t4"
        assert report["verdicts"]["tail"] == "2"

    def test_lift_identity(self, capsys):
        code, report, _ = run_structured(capsys, "lift", spec("abe.json"), "--order", "2")
        assert code == 0
        assert report["state_specs"]["lifted"] == report["state_specs"]["input"]
        assert report["verdicts"]["equivalence"] == "exact_equivalent"

    def test_lift_not_a_multiple(self, capsys):
        code, _, _ = run(capsys, "lift", spec("abe.json"), "--order", "3")
        assert code == 1

    def test_canon_zeta(self, capsys):
        _, report, _ = run_structured(capsys, "canon", spec("zeta.yaml"))
        assert report["verdicts"]["invariant_canonical"] == "interior"
        assert abs(entry(report, "invariant_canonical", "z_1") - math.sqrt(6) / math.pi) <= 1e-9

    def test_canon_boundary_cuntz(self, capsys, tmp_path):
        path = write_spec(tmp_path, "edge.json", {"type": "cuntz", "n": 2, "z": [[0, 0], [0, 1]]})
        _, report, _ = run_structured(capsys, "canon", path)
        assert report["verdicts"]["invariant_canonical"] == "boundary"
        assert entry(report, "invariant_canonical", "c") == pytest.approx(1j)

    def test_gauge(self, capsys):
        code, report, _ = run_structured(capsys, "gauge", spec("geometric.json"), "--unitary", spec("unitary_swap.json"), "--max-len", "2")
        assert code == 0
        assert report["verdicts"]["covariance"] == "holds"

    def test_gauge_inline_unitary(self, capsys):
        code, report, _ = run_structured(capsys, "gauge", spec("abe.json"), "--unitary", "[[[0, 1]]]", "--max-len", "3")
        assert code == 0
        assert report["verdicts"]["covariance"] == "holds"

    def test_gauge_non_unitary(self, capsys):
        code, _, _ = run(capsys, "gauge", spec("abe.json"), "--unitary", "[[2]]")
        assert code == 1


class TestArguments:
    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == 1

    def test_negative_tolerance(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["classify", spec("abe.json"), "--tolerance", "-1"])
        assert excinfo.value.code == 1

    def test_tolerance_in_provenance(self, capsys):
        _, report, _ = run_structured(capsys, "classify", spec("abe.json"), "--tolerance", "1e-6")
        assert report["provenance"]["comparison"] == pytest.approx(1e-6)
