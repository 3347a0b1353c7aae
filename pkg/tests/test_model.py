import random

import pytest

from gramata.algebra import FreeAbelian, Matrix, MatrixGroup
from gramata.constructions import CONSTRUCTIONS
from gramata.errors import EfaParseError
from gramata.model import EFA, Transition, parse_efa, serialize_efa, validate

from conftest import ALL_GROUPS, random_element

MINIMAL = """\
group matrix-Q 2 det=1
states q0
initial q0
accepting q0
alphabet a
transitions
q0 a q0 [[1,0],[0,1]]
"""


def test_parse_minimal_machine():
    m = parse_efa(MINIMAL)
    assert m.states == ("q0",)
    assert m.initial == "q0"
    assert m.accepting == frozenset({"q0"})
    assert m.transitions[0].register == Matrix.identity(2)


def test_parse_det_constraint_violation():
    bad = MINIMAL.replace("[[1,0],[0,1]]", "[[1,0],[0,2]]")
    with pytest.raises(EfaParseError) as err:
        parse_efa(bad)
    assert err.value.cause == "determinant-constraint"
    assert err.value.line == 7


def test_parse_syntax_error_reports_line():
    bad = MINIMAL.replace("q0 a q0 [[1,0],[0,1]]", "q0 a q0")
    with pytest.raises(EfaParseError) as err:
        parse_efa(bad)
    assert err.value.line == 7


def test_parse_missing_section():
    with pytest.raises(EfaParseError) as err:
        parse_efa("group heisenberg\nstates q0\n")
    assert "missing sections" in str(err.value)


def test_parse_unknown_section():
    with pytest.raises(EfaParseError):
        parse_efa(MINIMAL + "wibble 3\n")


def test_round_trip_every_construction():
    for name, spec in CONSTRUCTIONS.items():
        machine = spec.build()
        text = serialize_efa(machine)
        again = parse_efa(text)
        assert again == machine, name
        assert serialize_efa(again) == text, name


def test_serialization_is_canonical():
    group = FreeAbelian(1)
    t1 = Transition("q0", "a", "q0", (1,))
    t2 = Transition("q0", None, "q1", (0,))
    a = EFA(group, ["q1", "q0"], ["a"], [t1, t2], "q0", ["q1"])
    b = EFA(group, ["q0", "q1"], ["a"], [t2, t1], "q0", ["q1"])
    assert a == b
    assert serialize_efa(a) == serialize_efa(b)


def test_comments_and_blank_lines_ignored():
    text = "# a machine\n\n" + MINIMAL.replace("transitions\n", "transitions\n# loop:\n")
    assert parse_efa(text) == parse_efa(MINIMAL)


def test_validate_unknown_accepting_state():
    group = FreeAbelian(1)
    m = EFA(group, ["q0"], ["a"], [], "q0", ["q9"])
    codes = [d.code for d in validate(m)]
    assert codes == ["unknown-accepting-state"]


def test_validate_unknown_symbol():
    group = FreeAbelian(1)
    t = Transition("q0", "b", "q0", (0,))
    m = EFA(group, ["q0"], ["a"], [t], "q0", ["q0"])
    codes = [d.code for d in validate(m)]
    assert "unknown-symbol" in codes


def test_validate_rejects_unserializable_names():
    m = EFA(FreeAbelian(1), ["q 0"], ["a"], [], "q 0", [])
    assert any(d.code == "bad-state-name" for d in validate(m))
    m = EFA(FreeAbelian(1), ["q0"], ["a", "~"], [], "q0", [])
    assert any(d.code == "bad-symbol" for d in validate(m))


def test_validate_element_mismatch():
    t = Transition("q0", "a", "q0", (1, 2))  # wrong arity for Z^1
    m = EFA(FreeAbelian(1), ["q0"], ["a"], [t], "q0", ["q0"])
    assert any(d.code == "element-group-mismatch" for d in validate(m))


def test_validate_survives_unformattable_register():
    from gramata.algebra import HeisenbergGroup

    t = Transition("q0", "a", "q0", (0, 0, 0))  # tuple, not a Heis triple
    m = EFA(HeisenbergGroup(), ["q0"], ["a"], [t], "q0", ["q0"])
    assert any(d.code == "element-group-mismatch" for d in validate(m))


def test_validate_well_formed_machine_is_clean():
    for spec in CONSTRUCTIONS.values():
        assert validate(spec.build()) == []


def test_multi_token_symbols_round_trip():
    machine = CONSTRUCTIONS["wp-heis"].build()
    assert "a^-1" in machine.alphabet
    assert parse_efa(serialize_efa(machine)) == machine


DIRECT_PRODUCT = """\
group direct-product (free 2) (free 2)
states q0
initial q0
accepting q0
alphabet s t
transitions
q0 s q0 (g0|e)
q0 t q0 (e|g1^-1)
"""


def test_direct_product_machine():
    m = parse_efa(DIRECT_PRODUCT)
    left, right = m.transitions[0].register
    assert left.letters == ((0, 1),)
    assert right.is_identity()
    assert serialize_efa(parse_efa(serialize_efa(m))) == serialize_efa(m)


def test_round_trip_random_machines():
    rng = random.Random(321)
    for group in ALL_GROUPS:
        for _ in range(10):
            states = [f"q{i}" for i in range(rng.randint(1, 5))]
            alphabet = ["a", "b"]
            ts = []
            for _ in range(rng.randint(0, 8)):
                ts.append(
                    Transition(
                        rng.choice(states),
                        rng.choice([None, "a", "b"]),
                        rng.choice(states),
                        random_element(group, rng, bound=5),
                    )
                )
            machine = EFA(group, states, alphabet, ts, states[0], rng.sample(states, rng.randint(0, len(states))))
            assert validate(machine) == []
            assert parse_efa(serialize_efa(machine)) == machine


def test_validate_matches_parse_acceptance():
    # parse_efa accepts exactly the machines validate() is silent about
    group = MatrixGroup(2, "Q", "one")
    t = Transition("q0", "a", "q0", Matrix.identity(2))
    good = EFA(group, ["q0"], ["a"], [t], "q0", ["q0"])
    assert validate(good) == []
    parse_efa(serialize_efa(good))

    bad = EFA(group, ["q0"], ["a"], [t], "q0", ["nope"])
    assert validate(bad)
    with pytest.raises(EfaParseError):
        parse_efa(serialize_efa(bad))
