"""Shared corpus: the worked examples' automata and the tag-shape families."""
import pytest

from syncsynth.automata import Dfa, Nfa, SequentialDfa
from syncsynth.letters import inp, out


def mk_nfa(input_alphabet, output_alphabet, initial, finals, edges, cls=Nfa, **extra):
    """edges: list of (p, "i"|"o", symbol, q)."""
    states = {initial, *finals}
    transitions = set()
    for p, tape, sym, q in edges:
        states |= {p, q}
        letter = inp(sym) if tape == "i" else out(sym)
        transitions.add((p, letter, q))
    return cls(
        input_alphabet=frozenset(input_alphabet),
        output_alphabet=frozenset(output_alphabet),
        states=frozenset(states),
        initial=initial,
        transitions=frozenset(transitions),
        finals=frozenset(finals),
        **extra,
    )


@pytest.fixture(scope="session")
def intro_S():
    """Source of the introduction example: pairs (a^i b a^j, d(d+e)^k) and
    (a^i c a^j, e(d+e)^k), synchronized output-first."""
    return mk_nfa(
        {"a", "b", "c"},
        {"d", "e"},
        "q0",
        {"q3", "q4"},
        [
            ("q0", "o", "d", "q1"),
            ("q0", "o", "e", "q2"),
            ("q1", "i", "a", "q1"),
            ("q1", "i", "b", "q3"),
            ("q2", "i", "a", "q2"),
            ("q2", "i", "c", "q3"),
            ("q3", "i", "a", "q3"),
            ("q3", "o", "d", "q4"),
            ("q3", "o", "e", "q4"),
            ("q4", "o", "d", "q4"),
            ("q4", "o", "e", "q4"),
        ],
    )


@pytest.fixture(scope="session")
def intro_U():
    """The introduction example's sequential uniformizer."""
    return mk_nfa(
        {"a", "b", "c"},
        {"d", "e"},
        "u0",
        {"u3"},
        [
            ("u0", "i", "a", "u0"),
            ("u0", "i", "b", "u1"),
            ("u0", "i", "c", "u2"),
            ("u1", "o", "d", "u3"),
            ("u2", "o", "e", "u3"),
            ("u3", "i", "a", "u4"),
            ("u4", "o", "d", "u3"),
        ],
        cls=SequentialDfa,
        input_states=frozenset({"u0", "u3"}),
        output_states=frozenset({"u1", "u2", "u4"}),
    )


@pytest.fixture(scope="session")
def intro_T():
    """Target of the introduction example: any inputs, then input/output pairs."""
    return mk_nfa(
        {"a", "b", "c"},
        {"d", "e"},
        "t0",
        {"t2"},
        [
            ("t0", "i", "a", "t0"),
            ("t0", "i", "b", "t0"),
            ("t0", "i", "c", "t0"),
            ("t0", "i", "a", "t1"),
            ("t0", "i", "b", "t1"),
            ("t0", "i", "c", "t1"),
            ("t1", "o", "d", "t2"),
            ("t1", "o", "e", "t2"),
            ("t2", "i", "a", "t3"),
            ("t2", "i", "b", "t3"),
            ("t2", "i", "c", "t3"),
            ("t3", "o", "d", "t2"),
            ("t3", "o", "e", "t2"),
        ],
    )


@pytest.fixture(scope="session")
def abst_S():
    """Single-input-letter source used in the first abstraction example
    (canonical interleavings of (a^{2k}, (bb+bc)^k ...)-style pairs)."""
    return mk_nfa(
        {"a"},
        {"b", "c"},
        "q0",
        {"q0", "q2"},
        [
            ("q0", "i", "a", "q1"),
            ("q1", "o", "b", "q0"),
            ("q1", "o", "c", "q2"),
            ("q2", "i", "a", "q2"),
        ],
        cls=Dfa,
    )


@pytest.fixture(scope="session")
def abst_T():
    """Its target: one input block, outputs, one more input, outputs."""
    return mk_nfa(
        {"a"},
        {"b", "c"},
        "p0",
        {"p0", "p2", "p3"},
        [
            ("p0", "i", "a", "p1"),
            ("p1", "i", "a", "p1"),
            ("p1", "o", "b", "p2"),
            ("p2", "o", "b", "p2"),
            ("p2", "o", "c", "p2"),
            ("p2", "i", "a", "p3"),
            ("p3", "o", "b", "p3"),
            ("p3", "o", "c", "p3"),
        ],
        cls=Dfa,
    )


@pytest.fixture(scope="session")
def ann_S():
    """Two-input-letter source of the annotated-tree example (all states accepting)."""
    return mk_nfa(
        {"a", "b"},
        {"c"},
        "q0",
        {"q0", "q1", "q2", "q3", "q4", "q5", "q6"},
        [
            ("q0", "i", "a", "q1"),
            ("q0", "i", "b", "q3"),
            ("q1", "o", "c", "q2"),
            ("q2", "i", "b", "q5"),
            ("q2", "o", "c", "q6"),
            ("q3", "o", "c", "q4"),
            ("q4", "i", "a", "q5"),
            ("q4", "o", "c", "q5"),
            ("q5", "o", "c", "q6"),
        ],
        cls=Dfa,
    )


@pytest.fixture(scope="session")
def ann_T():
    """Its target: c-blocks separated by at most two input letters."""
    return mk_nfa(
        {"a", "b"},
        {"c"},
        "p0",
        {"p0", "p1", "p2"},
        [
            ("p0", "o", "c", "p0"),
            ("p0", "i", "a", "p1"),
            ("p0", "i", "b", "p1"),
            ("p1", "o", "c", "p1"),
            ("p1", "i", "a", "p2"),
            ("p1", "i", "b", "p2"),
            ("p2", "i", "a", "p2"),
            ("p2", "i", "b", "p2"),
        ],
        cls=Dfa,
    )


def tag_family(name, input_symbol="a", output_symbol="d"):
    """Tag-shape automata over a unary input and unary output alphabet."""
    i, o = input_symbol, output_symbol
    families = {
        "1*2*": (
            "s0",
            {"s0", "s1"},
            [("s0", "i", i, "s0"), ("s0", "o", o, "s1"), ("s1", "o", o, "s1")],
        ),
        "(12)*": (
            "s0",
            {"s0"},
            [("s0", "i", i, "s1"), ("s1", "o", o, "s0")],
        ),
        "(12)*(1*+2*)": (
            "s0",
            {"s0", "s1", "s2", "s3"},
            [
                ("s0", "i", i, "s1"),
                ("s1", "o", o, "s0"),
                ("s1", "i", i, "s2"),
                ("s2", "i", i, "s2"),
                ("s0", "o", o, "s3"),
                ("s3", "o", o, "s3"),
            ],
        ),
        "1*2*1*2*": (
            "s0",
            {"s0", "s1", "s2", "s3"},
            [
                ("s0", "i", i, "s0"),
                ("s0", "o", o, "s1"),
                ("s1", "o", o, "s1"),
                ("s1", "i", i, "s2"),
                ("s2", "i", i, "s2"),
                ("s2", "o", o, "s3"),
                ("s3", "o", o, "s3"),
            ],
        ),
        "(1*2*)*": (
            "s0",
            {"s0"},
            [("s0", "i", i, "s0"), ("s0", "o", o, "s0")],
        ),
    }
    initial, finals, edges = families[name]
    return mk_nfa({i}, {o}, initial, finals, edges)


@pytest.fixture(scope="session")
def families():
    return {name: tag_family(name) for name in ["1*2*", "(12)*", "(12)*(1*+2*)", "1*2*1*2*", "(1*2*)*"]}
