import json

import pytest

from causact.cli import main
from causact.corpus import BOMB, ROCK_THROWING


@pytest.fixture(scope="module")
def rt_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("models") / "rock-throwing.cm"
    path.write_text(ROCK_THROWING)
    return str(path)


@pytest.fixture(scope="module")
def bomb_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("models") / "bomb.cm"
    path.write_text(BOMB)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSolveEval:
    def test_solve(self, capsys, rt_file):
        code, out, _ = run(capsys, "solve", "-m", rt_file, "-u", "U=u11")
        assert code == 0
        assert "SH = 1" in out and "BH = 0" in out

    def test_solve_with_intervention(self, capsys, rt_file):
        code, out, _ = run(
            capsys, "solve", "-m", rt_file, "-u", "U=u11", "--intervene", "ST<-0", "--json"
        )
        assert code == 0
        asg = json.loads(out)["assignment"]
        assert asg["ST"] == "0" and asg["BH"] == "1" and asg["BS"] == "1"

    def test_solve_dot(self, capsys, rt_file):
        code, out, _ = run(capsys, "solve", "-m", rt_file, "--dot")
        assert code == 0
        assert '"SH" -> "BH";' in out

    def test_eval(self, capsys, rt_file):
        code, out, _ = run(capsys, "eval", "-m", rt_file, "-u", "U=u11", "[ST<-0] BS=1")
        assert code == 0 and out.strip() == "true"

    def test_missing_file_is_usage_error(self, capsys):
        code, _, err = run(capsys, "eval", "-m", "/nonexistent.cm", "-u", "U=u11", "BS=1")
        assert code == 2 and "error" in err

    def test_bad_formula_is_parse_error(self, capsys, rt_file):
        code, _, err = run(capsys, "eval", "-m", rt_file, "-u", "U=u11", "BS=")
        assert code == 2 and "parse error" in err

    def test_bad_context_value(self, capsys, rt_file):
        # u99 is not in U's declared range, a parse-level error
        code, _, _ = run(capsys, "eval", "-m", rt_file, "-u", "U=u99", "BS=1")
        assert code == 2


class TestCause:
    def test_hp_mode(self, capsys, rt_file):
        code, out, _ = run(
            capsys, "cause", "-m", rt_file, "-u", "U=u11",
            "--cause", "ST=1", "--effect", "BS=1", "--json",
        )
        assert code == 0
        d = json.loads(out)
        assert d["isCause"] and d["witnesses"][0]["W"] == {"BH": "0"}

    def test_abstract_mode_on_model(self, capsys, rt_file):
        code, out, _ = run(
            capsys, "cause", "-m", rt_file, "-u", "U=u11",
            "--cause", "ST=1", "--effect", "BS=1", "--mode", "abstract", "--json",
        )
        assert code == 0
        d = json.loads(out)
        assert d["isCause"] and d["tau"] is not None

    def test_negative_verdict_still_exits_zero(self, capsys, rt_file):
        code, out, _ = run(
            capsys, "cause", "-m", rt_file, "-u", "U=u11",
            "--cause", "BT=1", "--effect", "BS=1", "--json",
        )
        assert code == 0 and not json.loads(out)["isCause"]

    def test_structure_semantics_needs_structure(self, capsys, rt_file):
        code, _, err = run(
            capsys, "cause", "-m", rt_file, "--cause", "ST=1", "--effect", "BS=1",
            "--mode", "abstract", "--semantics", "structure",
        )
        assert code == 2 and "structure" in err


class TestStructureWorkflow:
    def test_build_then_query_then_check(self, capsys, rt_file, tmp_path):
        out_file = str(tmp_path / "rt.cfs")
        code, out, _ = run(capsys, "build-cf", "-m", rt_file, "-o", out_file, "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["states"] == 128
        state = payload["contextStates"]["U=u11"]

        code, out, _ = run(capsys, "closest", "-s", out_file, "--state", state, "ST=0", "--json")
        assert code == 0
        assert len(json.loads(out)["closest"]) >= 1

        code, out, _ = run(
            capsys, "cause", "--semantics", "structure", "-s", out_file, "--state", state,
            "--cause", "ST=1", "--effect", "BS=1", "--mode", "abstract", "--lang", "pair",
            "--json",
        )
        assert code == 0 and json.loads(out)["isCause"]

        code, out, _ = run(
            capsys, "check-correspondence", "-m", rt_file, "-s", out_file, "--strong", "--json"
        )
        assert code == 0 and json.loads(out)["ok"]

    def test_state_cap_exceeded(self, capsys, rt_file, tmp_path):
        code, _, err = run(
            capsys, "build-cf", "-m", rt_file, "-o", str(tmp_path / "x.cfs"), "--state-cap", "10"
        )
        assert code == 3

    def test_pinned_cause_on_structure(self, capsys, rt_file, tmp_path):
        out_file = str(tmp_path / "rt.cfs")
        run(capsys, "build-cf", "-m", rt_file, "-o", out_file)
        code, out, _ = run(
            capsys, "cause", "--semantics", "structure", "-s", out_file, "--state", "s107",
            "--cause", "ST=1", "--effect", "BS=1", "--mode", "abstract", "--lang", "pair",
            "--pin", "U=u11", "--json",
        )
        assert code == 0
        assert isinstance(json.loads(out)["isCause"], bool)


class TestExplain:
    def test_hp_explanation(self, capsys, tmp_path):
        from causact.corpus import THREE_CONTEXT

        path = tmp_path / "ordered.cm"
        path.write_text(THREE_CONTEXT)
        code, out, _ = run(
            capsys, "explain", "-m", str(path),
            "--K", "U=u111; U=u112; U=u101",
            "--candidate", "ST=1 & BT=1", "--effect", "BS=1", "--json",
        )
        assert code == 0
        d = json.loads(out)
        assert d["isExplanation"] and d["nontrivial"]

    def test_explain_requires_K(self, capsys, rt_file):
        code, _, err = run(
            capsys, "explain", "-m", rt_file, "--candidate", "ST=1", "--effect", "BS=1"
        )
        assert code == 2 and "--K" in err


class TestFuzzAndCorpus:
    def test_fuzz_json(self, capsys):
        code, out, _ = run(capsys, "fuzz", "--theorem", "1", "--trials", "5", "--seed", "3", "--json")
        assert code == 0
        d = json.loads(out)
        assert d["ok"] and d["agreements"] == 5

    def test_fuzz_unknown_theorem(self, capsys):
        code, _, _ = run(capsys, "fuzz", "--theorem", "9", "--trials", "1")
        assert code == 2

    def test_corpus_runs_clean(self, capsys):
        code, out, _ = run(capsys, "corpus", "--json")
        assert code == 0
        results = json.loads(out)
        assert len(results) == 12 and all(r["holds"] for r in results)

    def test_corpus_dump(self, capsys):
        code, out, _ = run(capsys, "corpus", "--dump", "rock-throwing")
        assert code == 0 and out == ROCK_THROWING

    def test_corpus_dump_unknown(self, capsys):
        code, _, _ = run(capsys, "corpus", "--dump", "nope")
        assert code == 2
