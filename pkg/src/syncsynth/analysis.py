"""Synchronization measures and finiteness analysis of regular tag languages.

A word's lag is the worst prefix imbalance between the tapes, a shift is a
position where the tape changes, and the shiftlag is the largest n such
that n consecutive shifts all happen at ≥n-lagged positions. Finiteness of
these measures over a language classifies which relations its controlled
synchronizations can define.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .automata import Dfa, Nfa, concat, inclusion, trim
from .letters import Letter, SyncWord, Tape, inp, out


class BoundExhausted(RuntimeError):
    """Neither semi-procedure concluded within the configured bound."""


@dataclass(frozen=True)
class SyncMeasures:
    lag: int
    shift: int
    shiftlag: int


def _as_tags(w: Sequence) -> tuple[int, ...]:
    return tuple(int(l.tape) if isinstance(l, Letter) else int(l) for l in w)


def measures(w: Sequence) -> SyncMeasures:
    """Lag / shift / shiftlag of a single word (letters or raw tags)."""
    t = _as_tags(w)
    lag = 0
    cur = 0
    lag_at = [0]
    for tag in t:
        cur += 1 if tag == 1 else -1
        lag_at.append(abs(cur))
        lag = max(lag, abs(cur))
    shifts = [i + 1 for i in range(len(t) - 1) if t[i] != t[i + 1]]
    shift = len(shifts)
    shiftlag = 0
    for n in range(len(shifts), 0, -1):
        ok = any(
            all(lag_at[s] >= n for s in shifts[j : j + n])
            for j in range(len(shifts) - n + 1)
        )
        if ok:
            shiftlag = n
            break
    return SyncMeasures(lag=lag, shift=shift, shiftlag=shiftlag)


# ---------------------------------------------------------------------------
# graph helpers


def _scc(nodes, succ) -> tuple[list[list], dict]:
    """Tarjan's algorithm, iterative. Returns components and node -> index."""
    index = {}
    low = {}
    on_stack = set()
    stack: list = []
    comps: list[list] = []
    comp_of: dict = {}
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(succ(nxt))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    item = stack.pop()
                    on_stack.discard(item)
                    comp.append(item)
                    comp_of[item] = len(comps)
                    if item == node:
                        break
                comps.append(comp)
    return comps, comp_of


def _bfs_word(a: Nfa, sources, targets, allowed=None) -> Optional[tuple[str, SyncWord]]:
    """Shortest word from any source to any target; returns (source, word)."""
    targets = set(targets)
    parents: dict = {}
    queue = deque()
    for s in sources:
        parents[s] = None
        queue.append(s)
        if s in targets:
            return s, ()
    while queue:
        p = queue.popleft()
        for letter, q in a.out_edges(p):
            if allowed is not None and q not in allowed:
                continue
            if q in parents:
                continue
            parents[q] = (p, letter)
            if q in targets:
                wrd = []
                cur = q
                while parents[cur] is not None:
                    prev, l = parents[cur]
                    wrd.append(l)
                    cur = prev
                return cur, tuple(reversed(wrd))
            queue.append(q)
    return None


# ---------------------------------------------------------------------------
# shift finiteness


@dataclass(frozen=True)
class ShiftWitness:
    prefix: SyncWord
    cycle: SyncWord
    suffix: SyncWord

    def pumped(self, j: int) -> SyncWord:
        return self.prefix + self.cycle * j + self.suffix


@dataclass(frozen=True)
class ShiftCertificate:
    finite: bool
    bound: Optional[int] = None
    witness: Optional[ShiftWitness] = None


def shift_finiteness(a: Nfa) -> ShiftCertificate:
    """Finite iff no cycle of the trimmed, last-tape-enriched graph shifts."""
    t = trim(a)
    if not t.finals:
        return ShiftCertificate(finite=True, bound=0)
    # enriched nodes: (state, last tape or None)
    start = (t.initial, None)
    nodes = {start}
    edges: dict = {}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        state, last = node
        for letter, q in t.out_edges(state):
            tape = int(letter.tape)
            nxt = (q, tape)
            is_shift = last is not None and last != tape
            edges.setdefault(node, []).append((letter, nxt, is_shift))
            if nxt not in nodes:
                nodes.add(nxt)
                queue.append(nxt)

    node_key = lambda n: (n[0], -1 if n[1] is None else n[1])
    comps, comp_of = _scc(sorted(nodes, key=node_key), lambda n: [e[1] for e in edges.get(n, [])])
    for node in sorted(nodes, key=node_key):
        for letter, nxt, is_shift in edges.get(node, []):
            if is_shift and comp_of[nxt] == comp_of[node]:
                return ShiftCertificate(finite=False, witness=_shift_witness(t, edges, node, letter, nxt))
    # condensation longest path weighted by shift edges
    order = sorted(nodes, key=lambda n: (comp_of[n], node_key(n)), reverse=True)  # Tarjan gives reverse topo
    best = {n: 0 for n in nodes}
    for node in order:
        for letter, nxt, is_shift in edges.get(node, []):
            cand = best[node] + (1 if is_shift else 0)
            if cand > best[nxt]:
                best[nxt] = cand
    # propagate until fixpoint (DAG on components; node-level repeats inside SCCs are shift-free)
    changed = True
    while changed:
        changed = False
        for node in nodes:
            for letter, nxt, is_shift in edges.get(node, []):
                cand = best[node] + (1 if is_shift else 0)
                if cand > best[nxt]:
                    best[nxt] = cand
                    changed = True
    return ShiftCertificate(finite=True, bound=max(best.values(), default=0))


def _enriched_nfa(t: Nfa, edges: dict) -> Nfa:
    """View the enriched graph as an Nfa for BFS helpers (finals: any tag of finals)."""
    nodes = set(edges.keys())
    for lst in edges.values():
        nodes.update(e[1] for e in lst)
    name = {n: f"{n[0]}#{n[1]}" for n in nodes}
    return Nfa(
        input_alphabet=t.input_alphabet,
        output_alphabet=t.output_alphabet,
        states=frozenset(name.values()),
        initial=name[(t.initial, None)],
        transitions=frozenset(
            (name[n], letter, name[nxt]) for n, lst in edges.items() for letter, nxt, _ in lst
        ),
        finals=frozenset(name[n] for n in nodes if n[0] in t.finals),
    )


def _shift_witness(t: Nfa, edges: dict, node, letter, nxt) -> ShiftWitness:
    enriched = _enriched_nfa(t, edges)

    def nm(n):
        return f"{n[0]}#{n[1]}"

    _, prefix = _bfs_word(enriched, [enriched.initial], [nm(node)])
    _, back = _bfs_word(enriched, [nm(nxt)], [nm(node)])
    cycle = (letter,) + back
    _, suffix = _bfs_word(enriched, [nm(node)], enriched.finals)
    return ShiftWitness(prefix=prefix, cycle=cycle, suffix=suffix)


# ---------------------------------------------------------------------------
# shiftlag finiteness


@dataclass(frozen=True)
class ShiftlagWitness:
    """A lag-building cycle followed by a shifting cycle, both pumpable."""

    prefix: SyncWord
    lag_cycle: SyncWord
    mid: SyncWord
    shift_cycle: SyncWord
    suffix: SyncWord

    def pumped(self, j: int) -> SyncWord:
        beta = j + 1
        alpha = j + beta * len(self.shift_cycle) + len(self.prefix) + len(self.mid) + 1
        return (
            self.prefix
            + self.lag_cycle * alpha
            + self.mid
            + self.shift_cycle * beta
            + self.suffix
        )


@dataclass(frozen=True)
class ShiftlagCertificate:
    verdict: str  # "finite" | "infinite"
    m: Optional[int] = None
    nu: Optional[int] = None
    witness: Optional[ShiftlagWitness] = None
    state_count: Optional[int] = None

    @property
    def is_finite(self) -> bool:
        return self.verdict == "finite"


def _net_lag(w: Sequence[Letter]) -> int:
    return sum(1 if l.tape is Tape.INPUT else -1 for l in w)


def _find_lag_cycle(t: Nfa, comp: list) -> Optional[tuple[str, SyncWord]]:
    """A cycle with net lag != 0 inside a strongly connected component."""
    comp_set = set(comp)
    root = sorted(comp)[0]
    pot = {root: 0}
    tree_word = {root: ()}
    queue = deque([root])
    bad = None
    while queue:
        p = queue.popleft()
        for letter, q in t.out_edges(p):
            if q not in comp_set:
                continue
            w = 1 if letter.tape is Tape.INPUT else -1
            if q not in pot:
                pot[q] = pot[p] + w
                tree_word[q] = tree_word[p] + (letter,)
                queue.append(q)
            elif pot[q] != pot[p] + w and bad is None:
                bad = (p, letter, q)
    if bad is None:
        return None
    p, letter, q = bad
    ret = _bfs_word(t, [q], [root], allowed=comp_set)
    assert ret is not None
    _, back = ret
    cycle = tree_word[p] + (letter,) + back
    if _net_lag(cycle) != 0:
        return root, cycle
    # same return path without the inconsistent edge flips the net lag off zero
    cycle2 = tree_word[q] + back
    assert _net_lag(cycle2) != 0
    return root, cycle2


def _find_shift_cycle(t: Nfa, comp: list) -> Optional[tuple[str, SyncWord]]:
    """A cycle visiting both tapes inside a strongly connected component."""
    comp_set = set(comp)
    in_edge = out_edge = None
    for p in sorted(comp):
        for letter, q in t.out_edges(p):
            if q not in comp_set:
                continue
            if letter.tape is Tape.INPUT and in_edge is None:
                in_edge = (p, letter, q)
            if letter.tape is Tape.OUTPUT and out_edge is None:
                out_edge = (p, letter, q)
    if in_edge is None or out_edge is None:
        return None
    p1, l1, q1 = in_edge
    p2, l2, q2 = out_edge
    _, w1 = _bfs_word(t, [q1], [p2], allowed=comp_set)
    _, w2 = _bfs_word(t, [q2], [p1], allowed=comp_set)
    return p1, (l1,) + w1 + (l2,) + w2


def shiftlag_finiteness(a: Nfa, cap: Optional[int] = None) -> ShiftlagCertificate:
    """Dual semi-procedures: pumpable-witness search and bounded certificate search.

    They must agree; disagreement is a hard error.
    """
    t = trim(a)
    n_states = len(t.states)
    if cap is None:
        cap = (n_states + 1) ** 2

    witness = _shiftlag_witness_search(t)
    certificate = _shiftlag_certificate_search(t, cap)

    if witness is not None and certificate is not None:
        raise AssertionError("shiftlag semi-procedures disagree: witness and certificate both found")
    if witness is not None:
        return ShiftlagCertificate(verdict="infinite", witness=witness, state_count=n_states)
    if certificate is not None:
        m, nu = certificate
        return ShiftlagCertificate(verdict="finite", m=m, nu=nu, state_count=n_states)
    raise BoundExhausted(f"no shiftlag conclusion within m <= {cap}")


def _shiftlag_witness_search(t: Nfa) -> Optional[ShiftlagWitness]:
    if not t.finals:
        return None
    comps, comp_of = _scc(
        sorted(t.states), lambda p: [q for _, q in t.out_edges(p)]
    )
    lag_comps = {}
    shift_comps = {}
    for idx, comp in enumerate(comps):
        lc = _find_lag_cycle(t, comp)
        if lc is not None:
            lag_comps[idx] = lc
        sc = _find_shift_cycle(t, comp)
        if sc is not None:
            shift_comps[idx] = sc
    if not lag_comps or not shift_comps:
        return None
    # condensation reachability from each lag component
    comp_succ: dict = {}
    for p in t.states:
        for _, q in t.out_edges(p):
            if comp_of[p] != comp_of[q]:
                comp_succ.setdefault(comp_of[p], set()).add(comp_of[q])
    for lag_idx in sorted(lag_comps):
        seen = {lag_idx}
        queue = deque([lag_idx])
        while queue:
            c = queue.popleft()
            if c in shift_comps:
                s1, lag_cycle = lag_comps[lag_idx]
                s2, shift_cycle = shift_comps[c]
                _, prefix = _bfs_word(t, [t.initial], [s1])
                _, mid = _bfs_word(t, [s1], [s2])
                _, suffix = _bfs_word(t, [s2], t.finals)
                return ShiftlagWitness(
                    prefix=prefix,
                    lag_cycle=lag_cycle,
                    mid=mid,
                    shift_cycle=shift_cycle,
                    suffix=suffix,
                )
            for nxt in sorted(comp_succ.get(c, ())):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return None


def certificate_lag_bound(m: int, state_count: int) -> int:
    return 2 * (m * (state_count + 1) + 1)


def _shiftlag_certificate_search(t: Nfa, cap: int) -> Optional[tuple[int, int]]:
    n_states = len(t.states)
    for m in range(1, cap + 1):
        nu = certificate_lag_bound(m, n_states)
        right = concat(
            build_lag_bounded(nu, t.input_alphabet, t.output_alphabet),
            build_blocks(m, None, t.input_alphabet, t.output_alphabet),
        )
        ok, _ = inclusion(t, right)
        if ok:
            return m, nu
    return None


# ---------------------------------------------------------------------------
# constraint automata


def build_lag_bounded(nu: int, input_alphabet, output_alphabet) -> Dfa:
    """Complete DFA of all words whose every prefix is at most nu-lagged."""
    states = {d: f"l{d}" for d in range(-nu, nu + 1)}
    sink = "sink"
    letters = [inp(s) for s in sorted(input_alphabet)] + [out(s) for s in sorted(output_alphabet)]
    transitions = set()
    for d, name in states.items():
        for letter in letters:
            nd = d + (1 if letter.tape is Tape.INPUT else -1)
            target = states.get(nd, sink)
            transitions.add((name, letter, target))
    for letter in letters:
        transitions.add((sink, letter, sink))
    return Dfa(
        input_alphabet=frozenset(input_alphabet),
        output_alphabet=frozenset(output_alphabet),
        states=frozenset(states.values()) | {sink},
        initial=states[0],
        transitions=frozenset(transitions),
        finals=frozenset(states.values()),
        complete=True,
    )


def build_blocks(n: int, output_cap: Optional[int], input_alphabet, output_alphabet) -> Nfa:
    """NFA for at most n blocks, each any input word or an output word of length
    at most output_cap (None = unbounded)."""
    if n < 0:
        raise ValueError("block count must be >= 0")
    start = "b0"
    states = {start}
    transitions = set()
    ins = [inp(s) for s in sorted(input_alphabet)]
    outs = [out(s) for s in sorted(output_alphabet)]

    def in_state(j):
        return f"b{j}i"

    def out_state(j, c):
        return f"b{j}o{c}" if output_cap is not None else f"b{j}o"

    sources: dict = {start: 0}  # state -> blocks used when control sits there
    # input-block states
    for j in range(1, n + 1):
        states.add(in_state(j))
        sources[in_state(j)] = j
        for letter in ins:
            transitions.add((in_state(j), letter, in_state(j)))
    # output-block states
    if output_cap is None:
        for j in range(1, n + 1):
            states.add(out_state(j, 1))
            sources[out_state(j, 1)] = j
            for letter in outs:
                transitions.add((out_state(j, 1), letter, out_state(j, 1)))
    else:
        for j in range(1, n + 1):
            for c in range(1, output_cap + 1):
                states.add(out_state(j, c))
                sources[out_state(j, c)] = j
                if c < output_cap:
                    for letter in outs:
                        transitions.add((out_state(j, c), letter, out_state(j, c + 1)))
    # block openings
    for state, used in sources.items():
        for j in range(used + 1, n + 1):
            for letter in ins:
                transitions.add((state, letter, in_state(j)))
            if output_cap is None:
                for letter in outs:
                    transitions.add((state, letter, out_state(j, 1)))
            elif output_cap >= 1:
                for letter in outs:
                    transitions.add((state, letter, out_state(j, 1)))
    return Nfa(
        input_alphabet=frozenset(input_alphabet),
        output_alphabet=frozenset(output_alphabet),
        states=frozenset(states),
        initial=start,
        transitions=frozenset(transitions),
        finals=frozenset(states),
    )


# ---------------------------------------------------------------------------
# Parikh injectivity


def parikh_injective(a: Nfa, counter_bound: Optional[int] = None) -> tuple[bool, Optional[tuple]]:
    """Whether no two distinct tag words of the language share a Parikh image.

    Searches the same-length self-product with a bounded running #1 difference.
    """
    t = trim(a)
    tag_edges: dict = {}
    for p, letter, q in t.transitions:
        tag_edges.setdefault(p, set()).add((int(letter.tape), q))
    if counter_bound is None:
        counter_bound = (len(t.states) ** 2) ** 2
    start = (t.initial, t.initial, 0, False)
    parents: dict = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        p1, p2, d, diff = node
        if p1 in t.finals and p2 in t.finals and d == 0 and diff:
            w1, w2 = [], []
            cur = node
            while parents[cur] is not None:
                prev, (t1, t2) = parents[cur]
                w1.append(t1)
                w2.append(t2)
                cur = prev
            return False, (tuple(reversed(w1)), tuple(reversed(w2)))
        for t1, q1 in sorted(tag_edges.get(p1, ())):
            for t2, q2 in sorted(tag_edges.get(p2, ())):
                nd = d + (1 if t1 == 1 else 0) - (1 if t2 == 1 else 0)
                if abs(nd) > counter_bound:
                    continue
                nxt = (q1, q2, nd, diff or (t1 != t2))
                if nxt not in parents:
                    parents[nxt] = (node, (t1, t2))
                    queue.append(nxt)
    return True, None
