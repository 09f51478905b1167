import pytest

from syncsynth.analysis import shiftlag_finiteness
from syncsynth.automata import (
    accepts,
    enumerate_accepted,
    inclusion,
    pair_in_relation,
    project_input,
)
from syncsynth.canonical import canonicalize
from syncsynth.letters import decode, inp, out
from syncsynth.resync import (
    ResyncParams,
    ShapeViolation,
    build_Ti,
    build_TiS,
    build_Tprime_recognizable,
    shape_input_then_output,
)

from .conftest import mk_nfa, tag_family


def ti_oracle(t_i, s, max_len):
    """The definitional set {w in T_i : pair(w) in pair(S)}, by enumeration."""
    keep = set()
    for w in enumerate_accepted(t_i, max_len):
        u, v = decode(w)
        if pair_in_relation(s, u, v):
            keep.add(w)
    return keep


def check_tis_instance(s, t, params, max_len):
    cert = shiftlag_finiteness(s)
    can = canonicalize(s, cert)
    t_i = build_Ti(t, params)
    c = build_TiS(can, t_i, params)
    got = set(enumerate_accepted(c, max_len))
    want = ti_oracle(t_i, s, max_len)
    assert got == want
    return c, t_i


def test_build_Ti_not_binding_when_cap_large(abst_T):
    params = ResyncParams(n=4, gamma=8, i=8)
    t_i = build_Ti(abst_T, params)
    # every T-word short enough fits within the blocks with a generous cap
    lhs = set(enumerate_accepted(abst_T, 6))
    rhs = set(enumerate_accepted(t_i, 6))
    assert lhs == rhs


def test_build_Ti_subset_of_t_and_monotone(abst_T):
    p1 = ResyncParams(n=3, gamma=4, i=1)
    p2 = ResyncParams(n=3, gamma=4, i=2)
    t1 = build_Ti(abst_T, p1)
    t2 = build_Ti(abst_T, p2)
    ok, _ = inclusion(t1, abst_T)
    assert ok
    ok, _ = inclusion(t1, t2)
    assert ok


def test_build_Ti_empty_word(abst_T):
    params = ResyncParams(n=2, gamma=2, i=0)
    t_i = build_Ti(abst_T, params)
    assert accepts(t_i, ())  # ε is in T and decomposes trivially


def test_build_Ti_output_cap_binds(abst_T):
    params = ResyncParams(n=2, gamma=0, i=1)
    t_i = build_Ti(abst_T, params)
    a, b = inp("a"), out("b")
    # blocks [a][b] fit; [a][bb] would need an output block of length 2 > i
    assert accepts(t_i, (a, b))
    assert accepts(abst_T, (a, b, b)) and not accepts(t_i, (a, b, b))


def test_tis_abst_instance(abst_S, abst_T):
    params = ResyncParams.for_target(abst_T, n=2, i=2)
    check_tis_instance(abst_S, abst_T, params, 7)


def test_tis_ann_instance(ann_S, ann_T):
    params = ResyncParams.for_target(ann_T, n=2, i=2)
    check_tis_instance(ann_S, ann_T, params, 7)


def test_tis_empty_source(abst_T):
    s = mk_nfa({"a"}, {"b", "c"}, "q0", set(), [])
    params = ResyncParams(n=2, gamma=4, i=2)
    cert = shiftlag_finiteness(s)
    can = canonicalize(s, cert)
    t_i = build_Ti(abst_T, params)
    c = build_TiS(can, t_i, params)
    assert set(enumerate_accepted(c, 6)) == set()


def test_tis_domain_soundness(abst_S, abst_T):
    params = ResyncParams.for_target(abst_T, n=2, i=2)
    c, _ = check_tis_instance(abst_S, abst_T, params, 6)
    dom_c = project_input(c)
    dom_s = project_input(abst_S)
    ok, _ = inclusion(dom_c, dom_s)
    assert ok


def test_tprime_singleton():
    s = mk_nfa({"a"}, {"d"}, "q0", {"q2"}, [("q0", "i", "a", "q1"), ("q1", "o", "d", "q2")])
    t = tag_family("(12)*")
    tp = build_Tprime_recognizable(
        mk_nfa({"a"}, {"d"}, "q0", {"q2"}, [("q0", "i", "a", "q1"), ("q1", "o", "d", "q2")], cls=__import__("syncsynth.automata", fromlist=["Dfa"]).Dfa),
        t,
    )
    assert set(enumerate_accepted(tp, 4)) == {(inp("a"), out("d"))}


def test_tprime_product_relation():
    # S = a* x {d} in input-then-output form
    s = mk_nfa(
        {"a"}, {"d"}, "q0", {"q1"},
        [("q0", "i", "a", "q0"), ("q0", "o", "d", "q1")],
        cls=__import__("syncsynth.automata", fromlist=["Dfa"]).Dfa,
    )
    t = tag_family("1*2*")
    tp = build_Tprime_recognizable(s, t)
    for w in enumerate_accepted(t, 8):
        u, v = decode(w)
        assert accepts(tp, w) == pair_in_relation(s, u, v)


def test_tprime_empty_source():
    s = mk_nfa({"a"}, {"d"}, "q0", set(), [], cls=__import__("syncsynth.automata", fromlist=["Dfa"]).Dfa)
    t = tag_family("1*2*")
    tp = build_Tprime_recognizable(s, t)
    assert set(enumerate_accepted(tp, 5)) == set()


def test_tprime_shape_violation(abst_S):
    t = tag_family("1*2*")
    with pytest.raises(ShapeViolation):
        build_Tprime_recognizable(abst_S, t)


def test_shape_input_then_output():
    d = shape_input_then_output({"a"}, {"d"})
    assert d.accepts_word((inp("a"), out("d"), out("d")))
    assert not d.accepts_word((out("d"), inp("a")))
