import pytest

from syncsynth.automata import (
    AutomatonError,
    EmissionNondeterminism,
    END_IN,
    END_OUT,
    ReservedSymbolClash,
    SequentialDfa,
    accepts,
    add_endmarkers,
    complement,
    completed,
    determinize,
    enumerate_accepted,
    inclusion,
    is_empty,
    language_equal,
    make_sequential_check,
    pair_in_relation,
    product,
    project_input,
    trim,
)
from syncsynth.letters import decode, inp, out, recompose, tags

from .conftest import mk_nfa, tag_family
from .oracles import all_words, language_upto, nfa_accepts_naive

A = inp("a")
B = inp("b")
C = inp("c")
D = out("d")
E = out("e")


def test_decode_basic():
    assert decode((A, D, B)) == (("a", "b"), ("d",))
    assert decode(()) == ((), ())


def test_decode_longer_interleaving():
    w = (A, out("b"), A, out("c"), A, A)
    assert decode(w) == (("a", "a", "a", "a"), ("b", "c"))


def test_recompose_roundtrip():
    w = (A, D, B, E, E)
    assert recompose(tags(w), decode(w)) == w


def test_determinize_preserves_language(intro_S):
    d = determinize(intro_S)
    seen = set(enumerate_accepted(intro_S, 8))
    seen_d = set(enumerate_accepted(d, 8))
    assert seen == seen_d


def test_determinize_is_deterministic_and_bounded(intro_S):
    d = determinize(intro_S)
    assert len(d.states) <= 2 ** len(intro_S.states)
    pairs = [(p, l) for p, l, _ in d.transitions]
    assert len(pairs) == len(set(pairs))


def test_determinize_subset_naming():
    n = mk_nfa(
        {"b"},
        set(),
        "q0",
        {"q2"},
        [("q0", "i", "b", "q1"), ("q0", "i", "b", "q2"), ("q1", "i", "b", "q2")],
    )
    d = determinize(n)
    assert d.initial == "{q0}"
    assert d.delta("{q0}", B) == "{q1,q2}"


def test_intersection_with_complement_empty(intro_S):
    d = completed(determinize(intro_S))
    comp = complement(d)
    inter = product(intro_S, comp, mode="intersect")
    empty, _ = is_empty(inter)
    assert empty


def test_complement_requires_complete(intro_S):
    with pytest.raises(AutomatonError):
        complement(determinize(intro_S))


def test_is_empty_witness_is_shortest(intro_S):
    empty, w = is_empty(intro_S)
    assert not empty
    # shortest accepted word: output then b/c, at length 2? q0-d->q1-b->q3
    assert len(w) == 2
    assert accepts(intro_S, w)


def test_trim_removes_unreachable_final():
    n = mk_nfa({"a"}, set(), "q0", {"q1", "dead"}, [("q0", "i", "a", "q1")])
    t = trim(n)
    assert "dead" not in t.states
    assert set(enumerate_accepted(t, 3)) == set(enumerate_accepted(n, 3))


def test_inclusion_reflexive(intro_S):
    ok, _ = inclusion(intro_S, intro_S)
    assert ok


def test_inclusion_counterexample(abst_S, abst_T):
    ok, w = inclusion(abst_S, abst_T)
    assert not ok
    assert nfa_accepts_naive(abst_S, w) and not nfa_accepts_naive(abst_T, w)
    # witness is shortest: check no shorter separating word exists
    for shorter in all_words(abst_S.input_alphabet, abst_S.output_alphabet, len(w) - 1):
        assert not (nfa_accepts_naive(abst_S, shorter) and not nfa_accepts_naive(abst_T, shorter))


def test_inclusion_universal_superset():
    alternating = tag_family("(12)*")
    anything = tag_family("(1*2*)*")
    ok, _ = inclusion(alternating, anything)
    assert ok


def test_product_semantics_vs_enumeration(abst_S, abst_T):
    inter = product(abst_S, abst_T, mode="intersect")
    want = language_upto(abst_S, 5) & language_upto(abst_T, 5)
    assert set(enumerate_accepted(inter, 5)) == want


def test_union_over_complete(abst_S, abst_T):
    da = completed(determinize(abst_S))
    db = completed(determinize(abst_T))
    u = product(da, db, mode="union-over-complete")
    want = language_upto(abst_S, 5) | language_upto(abst_T, 5)
    assert set(enumerate_accepted(u, 5)) == want


def test_project_input_intro(intro_S):
    dom = project_input(intro_S)
    # language should be a*ba* + a*ca* (as pure-input tagged words)
    for i in range(3):
        for j in range(3):
            assert accepts(dom, tuple([A] * i + [B] + [A] * j))
            assert accepts(dom, tuple([A] * i + [C] + [A] * j))
    assert not accepts(dom, (A, A))
    assert not accepts(dom, ())
    assert not accepts(dom, (B, B))


def test_project_input_pure_output_language():
    n = mk_nfa(set(), {"d"}, "q0", {"q0"}, [("q0", "o", "d", "q0")])
    dom = project_input(n)
    assert accepts(dom, ())
    assert not any(True for _ in dom.alphabet)


def test_project_input_vs_enumeration(abst_S):
    dom = project_input(abst_S)
    want = {tuple(l for l in ()) for _ in ()}
    want = set()
    for w in language_upto(abst_S, 8):
        u = tuple(inp(l.symbol) for l in w if l.tape == 1)
        if len(u) <= 4:
            want.add(u)
    got = {w for w in enumerate_accepted(dom, 4)}
    assert got == want


def test_make_sequential_check_valid(intro_U):
    assert isinstance(intro_U, SequentialDfa)
    d = determinize(intro_U)  # plain dfa copy
    seq = make_sequential_check(d, [s for s in d.states if "u1" not in s and "u2" not in s and "u4" not in s], [s for s in d.states if "u1" in s or "u2" in s or "u4" in s])
    assert isinstance(seq, SequentialDfa)


def test_make_sequential_check_vacuous():
    n = mk_nfa({"a"}, {"d"}, "q0", {"q0"}, [])
    d = determinize(n)
    seq = make_sequential_check(d, d.states, [])
    assert isinstance(seq, SequentialDfa)


def test_make_sequential_check_emission_nondeterminism(intro_S):
    d = determinize(intro_S)
    ins = {s for s in d.states if not any(l.tape == 2 for l, _ in d.out_edges(s))}
    outs = d.states - ins
    with pytest.raises(EmissionNondeterminism):
        make_sequential_check(d, ins, outs)


def test_add_endmarkers_singleton():
    n = mk_nfa({"a"}, {"d"}, "q0", {"q2"}, [("q0", "i", "a", "q1"), ("q1", "o", "d", "q2")])
    e = add_endmarkers(n)
    # both orders of the output against the input endmarker are allowed
    assert accepts(e, (A, inp(END_IN), D, out(END_OUT)))
    assert accepts(e, (A, D, inp(END_IN), out(END_OUT)))
    assert not accepts(e, (D, A, inp(END_IN), out(END_OUT)))
    assert len(set(enumerate_accepted(e, 6))) == 2


def test_add_endmarkers_empty_word():
    n = mk_nfa({"a"}, {"d"}, "q0", {"q0"}, [])
    e = add_endmarkers(n)
    assert set(enumerate_accepted(e, 4)) == {(inp(END_IN), out(END_OUT))}


def test_add_endmarkers_vs_bruteforce(intro_S):
    e = add_endmarkers(intro_S)
    want = set()
    for w in enumerate_accepted(intro_S, 5):
        for cut in range(len(w) + 1):
            w1, w2 = w[:cut], w[cut:]
            if all(l.tape == 2 for l in w2):
                want.add(w1 + (inp(END_IN),) + w2 + (out(END_OUT),))
    got = set(enumerate_accepted(e, 7))
    assert got == want


def test_add_endmarkers_reserved_clash():
    n = mk_nfa({END_IN}, {"d"}, "q0", {"q0"}, [])
    with pytest.raises(ReservedSymbolClash):
        add_endmarkers(n)


def test_pair_in_relation(intro_S):
    assert pair_in_relation(intro_S, ("a", "b"), ("d",))
    assert pair_in_relation(intro_S, ("b",), ("d", "e", "d"))
    assert not pair_in_relation(intro_S, ("a", "b"), ("e",))
    assert not pair_in_relation(intro_S, ("a",), ("d",))


def test_language_equal(intro_S):
    ok, _ = language_equal(intro_S, trim(determinize(intro_S)))
    assert ok


def test_semantics_against_naive_membership(intro_S, abst_S, abst_T, ann_S, ann_T):
    for a in (intro_S, abst_S, abst_T, ann_S, ann_T):
        lang = set(enumerate_accepted(a, 4))
        for w in all_words(a.input_alphabet, a.output_alphabet, 4):
            assert (w in lang) == nfa_accepts_naive(a, w)
