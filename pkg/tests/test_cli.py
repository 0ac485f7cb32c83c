import json

import pytest

from clonelab.cli import main
from clonelab.finite import Carrier, OpTable, RelationTable, format_ops, format_relations


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def run_cli_raw(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def strip_meta(report):
    report = dict(report)
    report.pop("meta", None)
    return report


class TestExitCodes:
    def test_chain_reports_three_clones(self, capsys):
        code, report = run_cli(capsys, "chain", "--carrier", "2", "--cap", "2")
        assert code == 0
        assert report["clone_count"] == 3
        assert report["chain"] is True

    def test_computed_negative_is_still_success(self, capsys):
        code, report = run_cli(capsys, "ramsey", "--n", "5", "--m", "3", "--r", "2", "--c", "2")
        assert code == 0
        assert report["verdict"] is False

    def test_missing_generator_file_is_usage_error(self, capsys):
        code, report = run_cli(capsys, "closure", "--carrier", "2", "--cap", "2",
                               "--gens", "missing.ops")
        assert code == 2
        assert "error" in report

    def test_unknown_suite_is_usage_error(self, capsys):
        code = main(["suite", "nope"])
        capsys.readouterr()
        assert code == 2

    def test_resource_limit_exit(self, capsys):
        code, report = run_cli(capsys, "ramsey", "--n", "30", "--m", "4", "--r", "2", "--c", "2")
        assert code == 3
        assert "error" in report

    def test_chain_budget_exit(self, capsys):
        code, _ = run_cli(capsys, "chain", "--carrier", "3", "--cap", "2")
        assert code == 3


class TestFileDriven:
    def test_closure_from_ops_file(self, capsys, tmp_path):
        nand = OpTable(Carrier(2), 2, (1, 1, 1, 0))
        path = tmp_path / "gens.ops"
        path.write_text(format_ops([("nand", nand)]))
        code, report = run_cli(capsys, "closure", "--carrier", "2", "--cap", "2",
                               "--gens", str(path))
        assert code == 0
        assert report["counts_by_arity"] == {"1": 4, "2": 16}

    def test_pol_from_relation_file(self, capsys, tmp_path):
        rel = RelationTable.unary(Carrier(2), {0})
        path = tmp_path / "rels.rel"
        path.write_text(format_relations([("zero", rel)]))
        code, report = run_cli(capsys, "pol", "--rel", str(path), "--cap", "2")
        assert code == 0
        assert report["relations"]["zero"] == {"1": 2, "2": 8}

    def test_ci_membership_verdicts(self, capsys, tmp_path):
        c3 = Carrier(3)
        ops = [
            ("max", OpTable.from_fn(c3, 2, max)),
            ("const2", OpTable(c3, 2, (2,) * 9)),
        ]
        path = tmp_path / "ops.ops"
        path.write_text(format_ops(ops))
        code, report = run_cli(capsys, "ci", "--carrier", "3", "--exclude", "2",
                               "--ops", str(path))
        assert code == 0
        assert report["verdicts"] == {"max": True, "const2": False}


class TestPairingCommand:
    def test_two_sided_injective(self, capsys):
        code, report = run_cli(capsys, "pairing", "--which", "two-sided",
                               "--box", "0..48:offdiag")
        assert code == 0
        assert report["verdict"] == "injective"

    def test_recovered_identity_boxes(self, capsys):
        code, report = run_cli(capsys, "pairing", "--which", "recovered",
                               "--box", "1..32:offdiag")
        assert code == 0
        assert report["verdict"] == "injective"


class TestTermsCommand:
    def test_eval_and_reduce(self, capsys):
        code, report = run_cli(
            capsys, "terms", "--term", "(b:max (u:succ x) y)", "--eval", "3", "9",
            "--partial-eval", "--set", "all",
        )
        assert code == 0
        assert report["value"] == 9
        assert report["reduction"]["kind"] in ("unary-x", "unary-y", "constant", "undefined")

    def test_gated_cross_term_reduces_to_zero(self, capsys):
        code, report = run_cli(
            capsys, "terms", "--term", "(b:gateB (u:succ x) (u:double y))",
            "--partial-eval", "--gate-b", "2,3", "--coloring", "sum", "--mu", "4",
        )
        assert code == 0
        assert report["reduction"] == {"kind": "constant", "value": 0, "reason": None, "path": None}

    def test_search_positive_and_negative(self, capsys):
        code, report = run_cli(
            capsys, "terms", "--search", "recovered", "--gate-a", "0,1",
            "--gate-b", "2,3", "--depth", "2", "--box", "1..16:full",
        )
        assert code == 0
        assert report["found"] == "(b:gateA (b:gateA x y) (b:gateB x y))"
        code, report = run_cli(
            capsys, "terms", "--search", "gate-a", "--gate-a", "0,1",
            "--gate-b", "2,3", "--depth", "2", "--box", "1..16:full",
        )
        assert code == 0
        assert report["found"] is None
        assert len(report["frontier_sizes"]) == 3

    def test_search_requires_gates(self, capsys):
        code, report = run_cli(capsys, "terms", "--search", "recovered")
        assert code == 2


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ("chain", "--carrier", "2", "--cap", "2"),
            ("ramsey", "--n", "6", "--m", "3", "--r", "2", "--c", "2"),
            ("canonical", "--fn", "max"),
            ("indep", "--m", "3", "--q", "4"),
        ],
    )
    def test_identical_runs_identical_reports(self, capsys, argv):
        # byte-identical up to the meta block, which holds timestamp/runtime
        code1, first = run_cli_raw(capsys, *argv)
        code2, second = run_cli_raw(capsys, *argv)
        assert code1 == code2

        def drop_meta(text):
            report = json.loads(text)
            report.pop("meta")
            return json.dumps(report, indent=2)

        assert drop_meta(first) == drop_meta(second)

    def test_seed_echoed(self, capsys):
        _, report = run_cli(capsys, "--seed", "123", "indep", "--m", "2", "--q", "3")
        assert report["seed"] == 123

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        code = main(["--out", str(out), "ramsey", "--n", "3", "--m", "2", "--r", "1", "--c", "2"])
        stdout = capsys.readouterr().out
        assert code == 0
        assert out.read_text() == stdout


class TestSuiteCommand:
    def test_fast_suite_green(self, capsys):
        code, report = run_cli(capsys, "suite", "fast")
        assert code == 0
        assert report["passed"] is True
        assert len(report["criteria"]) >= 6

    def test_mutation_in_composition_trips_the_battery(self, capsys, monkeypatch):
        # swap the router's selector and value arguments: the decomposition
        # identity must notice
        import clonelab.ideals as ideals
        from clonelab.finite import compose as real_compose

        def swapped(g, fs):
            if len(fs) == 3:
                fs = [fs[1], fs[0], fs[2]]
            return real_compose(g, fs)

        monkeypatch.setattr(ideals, "compose", swapped)
        from clonelab.suites import criterion_decomposition

        assert criterion_decomposition().passed is False
