import json

import pytest

from gramata.analysis import growth
from gramata.algebra import FreeGroup
from gramata.cli import main
from gramata.constructions import standard_generators


@pytest.fixture
def upow_file(corpus_dir):
    return str(corpus_dir / "upow.efa")


def test_run_accept(upow_file, capsys):
    assert main(["run", upow_file, "aaaa"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "Accept"


def test_run_reject(upow_file, capsys):
    assert main(["run", upow_file, "aaa"]) == 1
    assert capsys.readouterr().out.splitlines()[0] == "Reject"


def test_run_budget_exhausted(upow_file, capsys):
    assert main(["run", upow_file, "aa", "--budget", "1"]) == 2
    assert capsys.readouterr().out.splitlines()[0] == "BudgetExhausted"


def test_run_empty_word(corpus_dir, capsys):
    assert main(["run", str(corpus_dir / "anbncn.efa"), ""]) == 0


def test_run_json(upow_file, capsys):
    assert main(["run", upow_file, "aaaa", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] == "Accept"
    assert payload["stats"]["accept_depth"] is not None


def test_enum(corpus_dir, capsys):
    code = main(["enum", str(corpus_dir / "oddpow.efa"), "--max-len", "9", "--budget-policy", "oddpow"])
    assert code == 0
    assert capsys.readouterr().out.splitlines() == ["aa", "aaaaaaaa"]


def test_enum_epsilon_rendering(corpus_dir, capsys):
    main(["enum", str(corpus_dir / "anbncn.efa"), "--max-len", "3", "--budget-policy", "anbncn"])
    assert capsys.readouterr().out.splitlines() == ["ε", "abc"]


def test_enum_machine_without_accepting_states(tmp_path, capsys):
    doc = "group free-abelian 1\nstates q0\ninitial q0\naccepting\nalphabet a\ntransitions\nq0 a q0 [1]\n"
    path = tmp_path / "noaccept.efa"
    path.write_text(doc)
    assert main(["enum", str(path), "--max-len", "3"]) == 0
    assert capsys.readouterr().out == ""


def test_check_pass(corpus_dir, capsys):
    code = main(
        ["check", str(corpus_dir / "mult.efa"), "--oracle", "MULT", "--max-len", "5", "--budget-policy", "mult"]
    )
    assert code == 0


def test_check_mismatch_exit_code(upow_file):
    assert main(["check", upow_file, "--oracle", "ODDPOW", "--max-len", "8", "--budget-policy", "upow"]) == 1


def test_check_unknown_oracle(upow_file, capsys):
    assert main(["check", upow_file, "--oracle", "NOPE", "--max-len", "3"]) == 3
    assert "unknown oracle" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.efa"
    bad.write_text("group matrix-Q 2 det=1\nstates q0\n")
    assert main(["run", str(bad), "a"]) == 3
    assert "missing sections" in capsys.readouterr().err


def test_missing_file_exit_code(capsys):
    assert main(["run", "no-such-file.efa", "a"]) == 3


def test_usage_error_exit_code(capsys):
    assert main(["enum"]) == 3  # missing required arguments


def test_growth_matches_library(capsys):
    assert main(["growth", "--group", "free:2", "--radius", "2"]) == 0
    out = capsys.readouterr().out.strip()
    table = growth(FreeGroup(2), standard_generators(FreeGroup(2)), 2)
    assert out == "\t".join(str(c) for c in table.counts) == "1\t5\t17"


def test_growth_custom_gens(capsys):
    assert main(["growth", "--group", "heis", "--gens", "a=H(0,1,0);b=H(1,0,0)", "--radius", "2"]) == 0
    assert capsys.readouterr().out.strip() == "1\t5\t17"


def test_dissim_json(capsys):
    assert main(["dissim", "--oracle", "UPOW", "--max-len", "4", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["exact"] == 3


def test_probe(capsys):
    assert main(["probe", "--experiment", "theorem-growth-probe-h", "--max-len", "12"]) == 0
    out = capsys.readouterr().out
    assert "crossing at n=10" in out


def test_probe_unknown_experiment(capsys):
    assert main(["probe", "--experiment", "nope"]) == 3


def test_paper_single_experiment(capsys):
    assert main(["paper", "--experiment", "upow-equiv-16"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS  upow-equiv-16")


def test_paper_unknown_experiment(capsys):
    assert main(["paper", "--experiment", "nope"]) == 3


def test_paper_requires_argument(capsys):
    assert main(["paper"]) == 3


def test_corpus_emit(tmp_path, capsys):
    assert main(["corpus", "--dir", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "upow.efa").exists()
