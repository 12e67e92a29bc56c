"""Crossing-sequence compatibility and the truncated crossing graph.

A crossing word is the time-ordered sequence of states in which the head
crosses a fixed cell boundary (recording the state after each crossing
transition).  Two words are compatible around a cell holding symbol ``a``
when interleaving their crossings drives the transition table consistently
through that cell; deciding this needs no search, only a replay of the cell's
visits.  Compatible pairs become edges of a graph whose vertices are crossing
words; paths in the graph correspond to one-way runs, and each edge carries
the exact number of machine steps spent in its cell, so path weight equals
elapsed time.

Stay transitions are folded into the replay: a stay substitutes the new state
in place at cost one step, and a repeated (state, symbol) pair inside one stay
chain means the head never leaves the cell, which excludes the triple.  The
per-visit folding is precomputed per machine.

Edge weights rather than vertex sizes keep the time accounting exact for
machines with stay moves; for stay-free machines every edge weighs
(|source| + |target|) / 2, which telescopes to the crossing-count accounting.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from weakref import WeakKeyDictionary

from .budget import BudgetMeter
from .errors import BudgetExceededError
from .machine import TuringMachine, WindowConfiguration, observed_crossing_sequences, run

Word = tuple[str, ...]

_LEFT = 0
_RIGHT = 1


@dataclass(frozen=True)
class MatchOutcome:
    """Result of a compatibility query: membership, exact in-cell step count,
    and whether a stay loop made the head diverge inside the cell."""

    member: bool
    steps: int
    diverges: bool = False


@dataclass(frozen=True)
class Edge:
    source: Word
    target: Word
    label: str
    weight: int


@dataclass(frozen=True, eq=False)
class CrossingGraph:
    """Crossing words of odd length at most k, reachable from the entry vertices.

    Entry vertices are the single-state words over states in which the head
    can actually enter a fresh cell from the left (targets of right-moving
    transitions after stay folding); only these can start a run's boundary
    sequence.
    """

    k: int
    vertices: tuple[Word, ...]
    edges: tuple[Edge, ...]
    initials: tuple[Word, ...]

    @cached_property
    def out_edges(self) -> dict[Word, tuple[Edge, ...]]:
        adj: dict[Word, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.source].append(e)
        return {v: tuple(es) for v, es in adj.items()}

    def to_dot(self) -> str:
        lines = ["digraph crossing {", "  rankdir=LR;"]
        initial_set = set(self.initials)
        for v in self.vertices:
            name = ",".join(v)
            shape = ' peripheries=2' if v in initial_set else ""
            lines.append(f'  "{name}" [label="{name}"{shape}];')
        for e in self.edges:
            lines.append(
                f'  "{",".join(e.source)}" -> "{",".join(e.target)}" [label="{e.label}/{e.weight}"];'
            )
        lines.append("}")
        return "\n".join(lines) + "\n"


_stay_cache: WeakKeyDictionary = WeakKeyDictionary()
_memo_cache: WeakKeyDictionary = WeakKeyDictionary()


def stay_resolution(machine: TuringMachine) -> dict[tuple[str, str], tuple[str, str, int, int] | None]:
    """Fold stay chains: (arriving state, symbol) -> (exit state, written symbol,
    move, steps) for the visit, or None when the chain loops forever in place."""
    cached = _stay_cache.get(machine)
    if cached is not None:
        return cached
    table: dict[tuple[str, str], tuple[str, str, int, int] | None] = {}
    for q0 in machine.states:
        for a0 in machine.alphabet:
            q, a = q0, a0
            seen = {(q, a)}
            steps = 0
            result: tuple[str, str, int, int] | None = None
            while True:
                q2, b, move = machine.delta[(q, a)]
                steps += 1
                if move != 0:
                    result = (q2, b, move, steps)
                    break
                q, a = q2, b
                if (q, a) in seen:
                    result = None
                    break
                seen.add((q, a))
            table[(q0, a0)] = result
    _stay_cache[machine] = table
    return table


def entry_states(machine: TuringMachine) -> tuple[str, ...]:
    """States in which the head can enter a fresh cell from the left."""
    resolved = stay_resolution(machine)
    out: list[str] = []
    for q in machine.states:
        for a in machine.alphabet:
            r = resolved[(q, a)]
            if r is not None and r[2] > 0 and r[0] not in out:
                out.append(r[0])
    return tuple(out)


def left_matches(machine: TuringMachine, w: Word, w2: Word, a: str) -> MatchOutcome:
    """Decide whether (w, w2, a) is a compatible left-entry triple.

    Replays the visits to one cell: the head first arrives from the left in
    state w[0]; left-boundary crossings consume w, right-boundary crossings
    consume w2; membership requires both words to be consumed exactly.  Each
    machine step in the cell (stays included) costs one step.  Memoized per
    machine on (side, remaining words, symbol); the table is shared across
    graph builds.
    """
    return _matches(machine, w, w2, a, _LEFT)


def _matches(machine: TuringMachine, w: Word, w2: Word, a: str, side: int) -> MatchOutcome:
    memo = _memo_cache.get(machine)
    if memo is None:
        memo = {}
        _memo_cache[machine] = memo
    resolved = stay_resolution(machine)
    trail: list[tuple[tuple, int]] = []
    key = (side, w, w2, a)
    steps = 0
    outcome: MatchOutcome | None = None
    while True:
        hit = memo.get(key)
        if hit is not None:
            outcome = MatchOutcome(hit.member, steps + hit.steps, hit.diverges)
            break
        trail.append((key, steps))
        side, w, w2, a = key
        if not w and not w2:
            outcome = MatchOutcome(True, steps)
            break
        arriving = w[0] if side == _LEFT else (w2[0] if w2 else None)
        if arriving is None:
            outcome = MatchOutcome(False, steps)
            break
        r = resolved[(arriving, a)]
        if r is None:
            outcome = MatchOutcome(False, steps, diverges=True)
            break
        q2, b, move, cost = r
        if side == _LEFT:
            if move < 0:
                if len(w) < 2 or w[1] != q2:
                    outcome = MatchOutcome(False, steps)
                    break
                key = (_LEFT, w[2:], w2, b)
            else:
                if not w2 or w2[0] != q2:
                    outcome = MatchOutcome(False, steps)
                    break
                key = (_RIGHT, w[1:], w2[1:], b)
        else:
            if move < 0:
                if not w or w[0] != q2:
                    outcome = MatchOutcome(False, steps)
                    break
                key = (_LEFT, w[1:], w2[1:], b)
            else:
                if len(w2) < 2 or w2[1] != q2:
                    outcome = MatchOutcome(False, steps)
                    break
                key = (_RIGHT, w, w2[2:], b)
        steps += cost
    for entry_key, spent_before in trail:
        memo[entry_key] = MatchOutcome(
            outcome.member, outcome.steps - spent_before, outcome.diverges
        )
    return outcome


def successor_words(
    machine: TuringMachine,
    w: Word,
    a: str,
    max_len: int,
    meter: BudgetMeter,
) -> list[tuple[Word, int]]:
    """All right-boundary words w2 with (w, w2, a) compatible and |w2| <= max_len.

    Replays the cell with the left word given and the right word free: every
    re-entry from the right branches over the arriving state, and the replay
    may stop once the left word is consumed.  Distinct choice sequences yield
    distinct words, so no deduplication is needed.
    """
    resolved = stay_resolution(machine)
    states = machine.states
    n = len(w)
    results: list[tuple[Word, int]] = []
    out: list[str] = []

    def rec(i: int, side: int, sym: str, steps: int) -> None:
        meter.spend_nodes(1)
        if side == _LEFT:
            if i == n:
                results.append((tuple(out), steps))
                return
            r = resolved[(w[i], sym)]
            if r is None:
                return
            q2, b, move, cost = r
            if move < 0:
                if i + 1 < n and w[i + 1] == q2:
                    rec(i + 2, _LEFT, b, steps + cost)
            elif len(out) < max_len:
                out.append(q2)
                rec(i + 1, _RIGHT, b, steps + cost)
                out.pop()
        else:
            if i == n:
                results.append((tuple(out), steps))
            if len(out) >= max_len:
                return
            for q1 in states:
                r = resolved[(q1, sym)]
                if r is None:
                    continue
                q2, b, move, cost = r
                if move < 0:
                    if i < n and w[i] == q2:
                        out.append(q1)
                        rec(i + 1, _LEFT, b, steps + cost)
                        out.pop()
                elif len(out) + 2 <= max_len:
                    out.append(q1)
                    out.append(q2)
                    rec(i, _RIGHT, b, steps + cost)
                    out.pop()
                    out.pop()

    rec(0, _LEFT, a, 0)
    return results


def build_graph(
    machine: TuringMachine, k: int, meter: BudgetMeter | None = None
) -> CrossingGraph:
    """Breadth-first construction of the crossing graph truncated at word length k.

    Vertices are generated on demand from the entry vertices (never by
    materializing all words); the vertex budget makes explosion an explicit
    error rather than a hang.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    meter = meter or BudgetMeter.default()
    initials = tuple((q,) for q in entry_states(machine))
    vertices: dict[Word, None] = {v: None for v in initials}
    edges: list[Edge] = []
    queue = list(initials)
    head = 0
    while head < len(queue):
        w = queue[head]
        head += 1
        for a in machine.alphabet:
            for w2, steps in successor_words(machine, w, a, k, meter):
                if w2 not in vertices:
                    meter.check_graph_vertices(len(vertices) + 1)
                    vertices[w2] = None
                    queue.append(w2)
                edges.append(Edge(w, w2, a, steps))
    return CrossingGraph(k, tuple(vertices), tuple(edges), initials)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]
    observed: dict[int, Word]
    steps_in_cell: dict[int, int]


def validate_against_simulation(
    machine: TuringMachine, graph: CrossingGraph, path: list[Edge] | tuple[Edge, ...]
) -> ValidationReport:
    """Check a graph path against a real run.

    Builds the window whose cells 1..N carry the path labels (cell 0 and cells
    beyond N are irrelevant: the run stops at the first window exit, so only
    cells the path speaks for are ever read), starts the head on cell 1 in the
    path's entry state, and verifies that each observed boundary sequence is a
    prefix of the path's vertex there, and that cells whose surrounding
    boundary sequences are realized exactly take no more steps than the edge
    weight.  Any violation indicates a graph construction bug.
    """
    if not path:
        return ValidationReport(True, (), {}, {})
    if path[0].source not in set(graph.initials):
        raise ValueError("path must start at an initial vertex")
    for e1, e2 in zip(path, path[1:]):
        if e1.target != e2.source:
            raise ValueError("path edges are not consecutive")
    n = len(path)
    labels = tuple(e.label for e in path)
    config = WindowConfiguration(path[0].source[0], labels, 0, 1)
    cap = sum(e.weight for e in path) + 2
    record = run(machine, config, cap)
    observed = observed_crossing_sequences(record)
    words = [path[0].source] + [e.target for e in path]
    violations: list[str] = []
    steps_in_cell: dict[int, int] = {}
    for pos in record.head_positions:
        steps_in_cell[pos] = steps_in_cell.get(pos, 0) + 1
    for boundary in range(n + 1):
        seq = observed.get(boundary, ())
        want = words[boundary]
        if seq != want[: len(seq)]:
            violations.append(
                f"boundary {boundary}: observed {seq!r} is not a prefix of {want!r}"
            )
    for cell in range(1, n + 1):
        left_exact = observed.get(cell - 1, ()) == words[cell - 1]
        right_exact = observed.get(cell, ()) == words[cell]
        if left_exact and right_exact:
            spent = steps_in_cell.get(cell, 0)
            if spent > path[cell - 1].weight:
                violations.append(
                    f"cell {cell}: spent {spent} steps, edge weight {path[cell - 1].weight}"
                )
    if not record.exited and record.steps == cap:
        for boundary in range(n + 1):
            seq = observed.get(boundary, ())
            if len(seq) > len(words[boundary]):
                violations.append(f"boundary {boundary}: more crossings than claimed")
    return ValidationReport(not violations, tuple(violations), observed, steps_in_cell)
