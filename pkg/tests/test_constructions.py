import random
from fractions import Fraction

import pytest

from gramata.algebra import (
    BS_A,
    BS_B,
    FreeAbelian,
    FreeGroup,
    Heis,
    HeisenbergGroup,
    Matrix,
    PositiveRationals,
    Word,
    qplus_embed,
)
from gramata.constructions import (
    CONSTRUCTIONS,
    NamedOracle,
    build_anbncn,
    build_composite,
    build_mult,
    build_multiple,
    build_odd_power,
    build_qplus_eqcount,
    build_upow,
    build_word_problem_acceptor,
    construction_budget,
    emit_corpus,
    oracle,
    standard_generators,
    transform_qplus_to_sl2q,
    wp_oracle,
)
from gramata.errors import GramataError, NotPositive, UnknownOracle
from gramata.model import EFA, Transition, parse_efa, serialize_efa
from gramata.simulate import Verdict, accepts, enumerate_words, equiv_check, format_word

from gramata.constructions import ODDPOW_A1, ODDPOW_A2, ODDPOW_A3, ODDPOW_A4, UPOW_A1, UPOW_A2, UPOW_A3


def run(name, word):
    spec = CONSTRUCTIONS[name]
    return accepts(spec.build(), tuple(word), spec.budget).verdict


# --- the BS(1,2) machines ------------------------------------------------------


def test_upow_matrices_match_generator_identities():
    assert UPOW_A1 == BS_B.inverse() * BS_A.inverse() == Matrix(((2, 0), (1, 1)))
    assert UPOW_A2 == BS_A
    assert UPOW_A3 == BS_B


def test_upow_pump_closed_form():
    # register after k silent pump steps, checked by direct algebra
    for k in range(21):
        assert UPOW_A1**k == Matrix(((2**k, 0), (2**k - 1, 1)))


def test_upow_machine_shape():
    m = build_upow()
    assert len(m.states) == 4
    assert run("upow", "") is Verdict.REJECT
    assert run("upow", "a") is Verdict.ACCEPT
    assert run("upow", "aa") is Verdict.ACCEPT
    assert run("upow", "aaa") is Verdict.REJECT


def test_oddpow_determinants_are_one():
    for mat in (ODDPOW_A1, ODDPOW_A2, ODDPOW_A3, ODDPOW_A4):
        assert mat.det() == 1


def test_oddpow_first_trace():
    assert ODDPOW_A1 == Matrix(((2, 0), (1, Fraction(1, 2))))
    # x = 0 stage of the proof trace
    assert ODDPOW_A1 * ODDPOW_A2**0 == Matrix(((2, 0), (1, Fraction(1, 2))))


def test_oddpow_verdicts():
    assert run("oddpow", "aa") is Verdict.ACCEPT
    assert run("oddpow", "aaaa") is Verdict.REJECT
    assert run("oddpow", "aaaaaaaa") is Verdict.ACCEPT
    assert run("oddpow", "") is Verdict.REJECT


# --- the Heisenberg machines ------------------------------------------------------


def test_mult_verdicts():
    assert run("mult", "xyz") is Verdict.ACCEPT
    assert run("mult", "xxyzz") is Verdict.ACCEPT
    assert run("mult", "xyzz") is Verdict.REJECT
    assert run("mult", "") is Verdict.ACCEPT


def test_composite_verdicts():
    assert run("composite", "xxxx") is Verdict.ACCEPT
    assert run("composite", "xxxxx") is Verdict.REJECT
    assert run("composite", "xxxxxx") is Verdict.ACCEPT
    for n in range(4):
        assert run("composite", "x" * n) is Verdict.REJECT


def test_multiple_verdicts():
    assert run("multiple", "xxyyyy") is Verdict.ACCEPT
    assert run("multiple", "xxyyy") is Verdict.REJECT
    assert run("multiple", "") is Verdict.ACCEPT


def test_anbncn_verdicts():
    assert run("anbncn", "abc") is Verdict.ACCEPT
    assert run("anbncn", "aabbcc") is Verdict.ACCEPT
    assert run("anbncn", "aabc") is Verdict.REJECT
    assert run("anbncn", "") is Verdict.ACCEPT


# --- word-problem acceptors ---------------------------------------------------------


def test_wp_z_basic():
    machine = CONSTRUCTIONS["wp-z"].build()
    policy = construction_budget("wp-z")
    assert accepts(machine, ("a", "a^-1"), policy).verdict is Verdict.ACCEPT
    assert accepts(machine, ("a", "a"), policy).verdict is Verdict.REJECT


def test_wp_f2_exhaustive_against_reduction():
    machine = CONSTRUCTIONS["wp-f2"].build()
    table = {"a": Word.generator(0), "a^-1": Word.generator(0, -1), "b": Word.generator(1), "b^-1": Word.generator(1, -1)}

    def reduces_to_empty(word):
        out = Word()
        for sym in word:
            out = out * table[sym]
        return out.is_identity()

    report = equiv_check(machine, reduces_to_empty, machine.alphabet, 8, construction_budget("wp-f2"))
    assert report.clean


def test_wp_heis_commutator():
    machine = CONSTRUCTIONS["wp-heis"].build()
    policy = construction_budget("wp-heis")
    word = ("a", "b", "a^-1", "b^-1", "c^-1")
    assert accepts(machine, word, policy).verdict is Verdict.ACCEPT
    # and with the commutator the other way: a^-1 b^-1 a b = c as well
    word = ("a^-1", "b^-1", "a", "b", "c^-1")
    assert accepts(machine, word, policy).verdict is Verdict.ACCEPT


def test_wp_acceptors_agree_with_evaluation_on_random_words():
    rng = random.Random(77)
    for name in ("wp-z", "wp-f2", "wp-heis"):
        spec = CONSTRUCTIONS[name]
        machine = spec.build()
        member = oracle(spec.oracle_name).member
        for _ in range(10000):
            word = tuple(rng.choice(machine.alphabet) for _ in range(rng.randint(0, 12)))
            got = accepts(machine, word, spec.budget).verdict
            assert (got is Verdict.ACCEPT) == member(word), (name, word)


def test_wp_acceptor_needs_generators():
    with pytest.raises(GramataError):
        build_word_problem_acceptor(FreeAbelian(1), [])


# --- embedding transform --------------------------------------------------------------


def test_transform_maps_labels():
    source = build_qplus_eqcount()
    target = transform_qplus_to_sl2q(source)
    registers = {t.symbol: t.register for t in target.transitions}
    assert registers["a"] == qplus_embed(Fraction(2))
    assert registers["b"] == qplus_embed(Fraction(1, 2))
    assert target.states == source.states
    assert target.alphabet == source.alphabet


def test_transform_preserves_language():
    source = build_qplus_eqcount()
    target = transform_qplus_to_sl2q(source)
    policy = construction_budget("qplus-eqcount")
    assert enumerate_words(source, 6, policy).words == enumerate_words(target, 6, policy).words


def test_transform_empty_machine():
    group = PositiveRationals()
    empty = EFA(group, ["q0"], ["a"], [], "q0", ["q0"])
    out = transform_qplus_to_sl2q(empty)
    assert out.transitions == ()
    assert out.states == ("q0",)


def test_transform_rejects_bad_labels():
    group = PositiveRationals()
    bad = EFA(group, ["q0"], ["a"], [Transition("q0", "a", "q0", Fraction(-2))], "q0", ["q0"])
    with pytest.raises(NotPositive):
        transform_qplus_to_sl2q(bad)
    with pytest.raises(GramataError):
        transform_qplus_to_sl2q(CONSTRUCTIONS["mult"].build())


# --- oracles ---------------------------------------------------------------------------


def test_oracle_examples():
    assert oracle("UPOW")(("a",) * 4)
    assert not oracle("UPOW")(("a",) * 5)
    assert oracle("COMPOSITE")(("x",) * 9)
    assert oracle("ANBN-STAR")(tuple("abab"))
    assert not oracle("ANBN-STAR")(tuple("aabab"))
    assert oracle("ANBN-STAR")(())
    assert oracle("MULTIPLE")(())
    assert not oracle("MULTIPLE-POS")(())
    assert oracle("MULTIPLE-POS")(("x", "y", "y"))
    assert not oracle("ODDPOW")(("a",) * 4)
    assert oracle("ODDPOW")(("a",) * 8)


def test_wp_oracle_by_name():
    wp = oracle("WP:heis")
    assert wp(("a", "b", "a^-1", "b^-1", "c^-1"))
    assert not wp(("a", "b"))


def test_unknown_oracle():
    with pytest.raises(UnknownOracle):
        oracle("NOPE")


def test_standard_generators():
    assert [n for n, _ in standard_generators(FreeGroup(2))] == ["a", "b"]
    assert standard_generators(FreeAbelian(2))[1] == ("b", (0, 1))
    assert [n for n, _ in standard_generators(HeisenbergGroup())] == ["a", "b", "c"]
    with pytest.raises(GramataError):
        standard_generators(PositiveRationals())


# --- corpus ------------------------------------------------------------------------------


def test_corpus_files_are_fresh(tmp_path, corpus_dir):
    emit_corpus(tmp_path)
    shipped = sorted(p.name for p in corpus_dir.glob("*.efa"))
    regenerated = sorted(p.name for p in tmp_path.glob("*.efa"))
    assert shipped == regenerated
    for name in shipped:
        assert (tmp_path / name).read_text() == (corpus_dir / name).read_text(), name


def test_corpus_parses_to_builders(corpus_dir):
    for name, spec in CONSTRUCTIONS.items():
        text = (corpus_dir / f"{name}.efa").read_text()
        assert parse_efa(text) == spec.build()
