"""End-to-end decision procedure: does the source have a target-controlled
uniformization by a sequential machine?

The source is canonicalized, the target is constrained to capped output
blocks, the resynchronized source is built, and the question reduces to
domain equality plus a safety game on the endmarked language. A YES at any
block cap is sound; a NO is only claimed when the cap provably suffices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .analysis import (
    build_blocks,
    build_lag_bounded,
    shift_finiteness,
    shiftlag_finiteness,
)
from .automata import (
    Nfa,
    SequentialDfa,
    add_endmarkers,
    concat,
    determinize,
    inclusion,
    language_equal,
    project_input,
    trim,
)
from .canonical import canonicalize, canonicalize_finite_shift
from .game import (
    build_arena,
    extract_sdfa,
    in_spoiling_strategy,
    replay_spoiler,
    solve,
    verify_uniformizer,
)
from .profiles import ClosureCapExceeded, compute_k
from .resync import ResyncParams, build_Ti, build_TiS, build_Tprime_recognizable

YES, NO, INCONCLUSIVE, REJECTED = "YES", "NO", "INCONCLUSIVE", "REJECTED"
EXIT_CODES = {YES: 0, NO: 1, INCONCLUSIVE: 2, REJECTED: 3}


@dataclass(frozen=True)
class PipelineConfig:
    k_override: Optional[int] = None
    depth: int = 8
    closure_cap: int = 512
    state_cap: int = 2_000_000
    feasible_k_cap: int = 6

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("enumeration depth must be at least 1")
        if self.closure_cap <= 0 or self.state_cap <= 0 or self.feasible_k_cap <= 0:
            raise ValueError("caps must be positive")


@dataclass
class Verdict:
    answer: str
    machine: Optional[SequentialDfa] = None
    witness: Optional[tuple] = None
    reason: str = ""
    stats: dict = field(default_factory=dict)
    verification: Optional[object] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.answer]


def _minimal_gamma(t: Nfa, n: int, gamma_max: int) -> Optional[int]:
    """Smallest lag bound covering the target's prefix part, if any."""

    def holds(g: int) -> bool:
        right = concat(
            build_lag_bounded(g, t.input_alphabet, t.output_alphabet),
            build_blocks(n, None, t.input_alphabet, t.output_alphabet),
        )
        ok, _ = inclusion(t, right)
        return ok

    if not holds(gamma_max):
        return None
    lo, hi = 0, gamma_max
    while lo < hi:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def decide(s: Nfa, t: Nfa, cfg: PipelineConfig = PipelineConfig()) -> Verdict:
    """Decide T-controlled uniformizability of the source relation."""
    stats: dict = {}
    cert_s = shiftlag_finiteness(s)
    if not cert_s.is_finite:
        return Verdict(
            answer=REJECTED,
            reason="source language has infinite shiftlag",
            witness=cert_s.witness,
            stats=stats,
        )
    cert_t = shiftlag_finiteness(t)
    if not cert_t.is_finite and cfg.k_override is None:
        return Verdict(
            answer=REJECTED,
            reason="target language has infinite shiftlag (pass a block cap to explore anyway)",
            witness=cert_t.witness,
            stats=stats,
        )

    s = trim(s)
    t = trim(t)
    can = canonicalize(s, cert_s, state_cap=cfg.state_cap)
    t_dfa = determinize(t)
    stats["canonical_source_states"] = len(can.dfa.states)
    stats["target_dfa_states"] = len(t_dfa.states)

    if cert_t.is_finite:
        n = cert_t.m + 1
        gamma_formula = 2 * (n * (len(t_dfa.states) + 1) + 1)
        gamma = _minimal_gamma(t, n, gamma_formula)
        assert gamma is not None  # guaranteed by the certificate
        target_covered = True
    else:
        n = (cfg.k_override or 1) + 1
        gamma_formula = 2 * (n * (len(t_dfa.states) + 1) + 1)
        gamma = _minimal_gamma(t, n, gamma_formula)
        target_covered = gamma is not None
        if gamma is None:
            gamma = 0
    stats.update(n=n, gamma=gamma, gamma_formula=gamma_formula, target_covered=target_covered)

    conclusive = target_covered
    if cfg.k_override is not None:
        k_used = cfg.k_override
        stats["k_source"] = "override"
        conclusive = False
    else:
        try:
            bound = compute_k(n, gamma, can, t_dfa, closure_cap=cfg.closure_cap)
        except ClosureCapExceeded as exc:
            return Verdict(answer=INCONCLUSIVE, reason=str(exc), stats=stats)
        stats["k_computed"] = bound.k
        stats["r1"] = bound.r1
        stats["r2"] = bound.r2
        if bound.k > cfg.feasible_k_cap:
            k_used = cfg.feasible_k_cap
            stats["k_source"] = "capped"
            conclusive = False
        else:
            k_used = bound.k
            stats["k_source"] = "computed"
    stats["k_used"] = k_used

    params = ResyncParams(n=n, gamma=gamma, i=k_used)
    t_i = build_Ti(t, params)
    stats["t_i_states"] = len(t_i.states)
    # when the block cap is not binding, a NO is exact regardless of k
    if not conclusive:
        same, _ = language_equal(t_i, t)
        if same:
            conclusive = True
            stats["t_i_equals_t"] = True

    tis = build_TiS(can, t_i, params, state_cap=cfg.state_cap)
    stats["t_i_s_states"] = len(tis.states)

    dom_s = project_input(s)
    dom_tis = project_input(tis)
    ok, witness = inclusion(dom_s, dom_tis)
    if not ok:
        answer = NO if conclusive else INCONCLUSIVE
        return Verdict(
            answer=answer,
            witness=witness,
            reason="an input of the source relation has no constrained synchronization",
            stats=stats,
        )

    s_prime = add_endmarkers(tis)
    arena = build_arena(s_prime)
    stats["arena_vertices"] = len(arena.vertices)
    region, strategy = solve(arena)
    if arena.initial in region:
        machine = extract_sdfa(arena, strategy)
        report = verify_uniformizer(
            machine, add_endmarkers(s), add_endmarkers(t), depth=cfg.depth
        )
        stats["machine_states"] = len(machine.states)
        return Verdict(
            answer=YES,
            machine=machine,
            reason="subset-uniformization game won; machine synthesized and verified",
            stats=stats,
            verification=report,
        )
    spoiler = in_spoiling_strategy(arena, region)
    assert replay_spoiler(arena, region, spoiler)
    answer = NO if conclusive else INCONCLUSIVE
    return Verdict(
        answer=answer,
        reason="the input player spoils the constrained game",
        witness=tuple(sorted(spoiler.items(), key=repr)[:4]),
        stats=stats,
    )


def decide_recognizable(s: Nfa, t: Nfa, cfg: PipelineConfig = PipelineConfig()) -> Verdict:
    """Fast path for finite-shift sources: exact, no block cap involved."""
    stats: dict = {}
    cert = shift_finiteness(s)
    if not cert.finite:
        return Verdict(
            answer=REJECTED,
            reason="source language has infinite shift",
            stats=stats,
        )
    s = trim(s)
    t = trim(t)
    s12 = canonicalize_finite_shift(s, cert, state_cap=cfg.state_cap)
    stats["canonical_source_states"] = len(s12.states)
    t_prime = build_Tprime_recognizable(s12, t)
    stats["t_prime_states"] = len(t_prime.states)

    dom_s = project_input(s)
    dom_tp = project_input(t_prime)
    ok, witness = inclusion(dom_s, dom_tp)
    if not ok:
        return Verdict(
            answer=NO,
            witness=witness,
            reason="an input of the source relation has no target synchronization",
            stats=stats,
        )

    s_prime = add_endmarkers(t_prime)
    arena = build_arena(s_prime)
    stats["arena_vertices"] = len(arena.vertices)
    region, strategy = solve(arena)
    if arena.initial in region:
        machine = extract_sdfa(arena, strategy)
        report = verify_uniformizer(
            machine, add_endmarkers(s), add_endmarkers(t), depth=cfg.depth
        )
        stats["machine_states"] = len(machine.states)
        return Verdict(
            answer=YES,
            machine=machine,
            reason="subset-uniformization game won; machine synthesized and verified",
            stats=stats,
            verification=report,
        )
    spoiler = in_spoiling_strategy(arena, region)
    assert replay_spoiler(arena, region, spoiler)
    return Verdict(
        answer=NO,
        reason="the input player spoils the game",
        witness=tuple(sorted(spoiler.items(), key=repr)[:4]),
        stats=stats,
    )
