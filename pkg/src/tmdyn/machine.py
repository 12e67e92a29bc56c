"""Machine representation, parsing, exact simulation, and machine constructions.

A machine is a total transition table over declared states and symbols; it has
no halting state and is run from arbitrary configurations.  Simulation uses
absolute tape positions anchored at the window origin, so visited-cell counts
and passage times do not depend on how the window was cut.

All values here are immutable after construction and every operation is a pure
function, so they can be shared freely across threads or workers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

from .errors import AlphabetMismatchError, MachineFormatError

MOVE_NAMES = {-1: "L", 0: "S", 1: "R"}
NAME_MOVES = {name: move for move, name in MOVE_NAMES.items()}

# (state, symbol, new_state, written_symbol, move)
Rule = tuple[str, str, str, str, int]


@dataclass(frozen=True)
class TuringMachine:
    """A one-tape machine given by its total transition table.

    ``states`` and ``alphabet`` fix the iteration order used everywhere
    (declaration order); ``rules`` keeps the declaration order of transitions.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    rules: tuple[Rule, ...]

    def __post_init__(self):
        if not self.states or not self.alphabet:
            raise MachineFormatError("at least one state and one symbol are required")
        state_set, symbol_set = set(self.states), set(self.alphabet)
        if len(state_set) != len(self.states):
            raise MachineFormatError("duplicate state declaration")
        if len(symbol_set) != len(self.alphabet):
            raise MachineFormatError("duplicate symbol declaration")
        seen: set[tuple[str, str]] = set()
        for q, a, q2, b, move in self.rules:
            for ident in (q, q2):
                if ident not in state_set:
                    raise MachineFormatError(f"undeclared state {ident!r}")
            for ident in (a, b):
                if ident not in symbol_set:
                    raise MachineFormatError(f"undeclared symbol {ident!r}")
            if move not in (-1, 0, 1):
                raise MachineFormatError(f"invalid move {move!r}")
            if (q, a) in seen:
                raise MachineFormatError(f"duplicate transition for ({q}, {a})")
            seen.add((q, a))
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in seen:
                    raise MachineFormatError(f"missing transition for ({q}, {a})")

    @cached_property
    def delta(self) -> dict[tuple[str, str], tuple[str, str, int]]:
        return {(q, a): (q2, b, move) for q, a, q2, b, move in self.rules}

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def symbol_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.alphabet)}

    @cached_property
    def has_stay_moves(self) -> bool:
        return any(move == 0 for *_, move in self.rules)

    def serialize(self) -> str:
        lines = [
            "states: " + " ".join(self.states),
            "alphabet: " + " ".join(self.alphabet),
        ]
        for q, a, q2, b, move in self.rules:
            lines.append(f"rule: {q} {a} -> {q2} {b} {MOVE_NAMES[move]}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()


@dataclass(frozen=True)
class WindowConfiguration:
    """A finite tape window with the head inside it.

    ``origin`` is the absolute position of ``segment[0]``.  Cells outside the
    window have no default content: a move past either end is reported as an
    explicit exit, never silently filled.
    """

    state: str
    segment: tuple[str, ...]
    head: int
    origin: int = 0

    def __post_init__(self):
        if not self.segment:
            raise ValueError("segment must be nonempty")
        if not 0 <= self.head < len(self.segment):
            raise ValueError("head must lie inside the segment")

    @property
    def head_position(self) -> int:
        return self.origin + self.head


@dataclass(frozen=True)
class ExitSignal:
    """The head left the window: which side, and the would-be machine state."""

    side: str  # "left" | "right"
    state: str
    segment: tuple[str, ...]
    position: int


@dataclass(frozen=True)
class UltimatelyPeriodicConfiguration:
    """Tape with constant content left of 0, a finite transient, then a repeated period."""

    state: str
    left_fill: str
    transient: tuple[str, ...]
    period: tuple[str, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")

    def symbol_at(self, position: int) -> str:
        if position < 0:
            return self.left_fill
        if position < len(self.transient):
            return self.transient[position]
        return self.period[(position - len(self.transient)) % len(self.period)]

    def window(self, lo: int, hi: int, head_position: int = 0) -> WindowConfiguration:
        """Expand positions ``lo..hi`` inclusive into a window."""
        if not lo <= head_position <= hi:
            raise ValueError("head must lie inside the requested window")
        segment = tuple(self.symbol_at(p) for p in range(lo, hi + 1))
        return WindowConfiguration(self.state, segment, head_position - lo, lo)


@dataclass(frozen=True, eq=False)
class RunRecord:
    """Full instrumented trajectory of a bounded run.

    ``trace[i]`` is the (symbol under head, state) pair immediately before
    step ``i``; ``visited_counts[i]`` is the number of distinct absolute
    positions read by the first ``i + 1`` steps.  ``first_passage`` and
    ``last_passage`` map positions to the earliest/latest time (in completed
    steps) the head stood there, including the resting position after the
    final step.
    """

    steps: int
    trace: tuple[tuple[str, str], ...]
    visited_counts: tuple[int, ...]
    head_positions: tuple[int, ...]
    first_passage: dict[int, int]
    last_passage: dict[int, int]
    exited: bool
    exit_side: str | None
    final_state: str
    final_position: int
    final_segment: tuple[str, ...]
    origin: int

    @property
    def visited(self) -> int:
        return self.visited_counts[-1] if self.visited_counts else 0

    @property
    def final_configuration(self) -> WindowConfiguration | None:
        if self.exited:
            return None
        return WindowConfiguration(
            self.final_state, self.final_segment, self.final_position - self.origin, self.origin
        )


def step(machine: TuringMachine, config: WindowConfiguration) -> WindowConfiguration | ExitSignal:
    """Apply the transition table once; exiting the window yields an ExitSignal."""
    q2, b, move = machine.delta[(config.state, config.segment[config.head])]
    segment = config.segment[: config.head] + (b,) + config.segment[config.head + 1 :]
    head = config.head + move
    if 0 <= head < len(segment):
        return WindowConfiguration(q2, segment, head, config.origin)
    side = "left" if head < 0 else "right"
    return ExitSignal(side, q2, segment, config.origin + head)


def run(machine: TuringMachine, config: WindowConfiguration, steps: int) -> RunRecord:
    """Execute up to ``steps`` transitions, stopping early if the head exits.

    The step that carries the head out of the window is executed and recorded
    (its read happened inside the window); the run then stops.
    """
    if steps < 0:
        raise ValueError("step count must be nonnegative")
    delta = machine.delta
    tape = list(config.segment)
    head = config.head
    state = config.state
    origin = config.origin
    trace: list[tuple[str, str]] = []
    positions: list[int] = []
    counts: list[int] = []
    seen: set[int] = set()
    first = {origin + head: 0}
    last = {origin + head: 0}
    exited = False
    side: str | None = None
    t = 0
    while t < steps:
        pos = origin + head
        sym = tape[head]
        trace.append((sym, state))
        positions.append(pos)
        seen.add(pos)
        counts.append(len(seen))
        state, written, move = delta[(state, sym)]
        tape[head] = written
        head += move
        t += 1
        npos = origin + head
        if npos not in first:
            first[npos] = t
        last[npos] = t
        if not 0 <= head < len(tape):
            exited = True
            side = "left" if head < 0 else "right"
            break
    return RunRecord(
        steps=t,
        trace=tuple(trace),
        visited_counts=tuple(counts),
        head_positions=tuple(positions),
        first_passage=first,
        last_passage=last,
        exited=exited,
        exit_side=side,
        final_state=state,
        final_position=origin + head,
        final_segment=tuple(tape),
        origin=origin,
    )


def mirror(machine: TuringMachine) -> TuringMachine:
    """The same machine with left and right exchanged (moves negated)."""
    rules = tuple((q, a, q2, b, -move) for q, a, q2, b, move in machine.rules)
    return TuringMachine(machine.states, machine.alphabet, rules)


def disjoint_union(m1: TuringMachine, m2: TuringMachine) -> TuringMachine:
    """Tagged union of state sets; transitions never cross components.

    Both machines must declare the identical alphabet (same symbols, same
    order).  Component states are suffixed with ``~1`` / ``~2``.
    """
    if m1.alphabet != m2.alphabet:
        raise AlphabetMismatchError(
            f"alphabets differ: {m1.alphabet!r} vs {m2.alphabet!r}"
        )
    states = tuple(f"{q}~1" for q in m1.states) + tuple(f"{q}~2" for q in m2.states)
    rules = tuple((f"{q}~1", a, f"{q2}~1", b, mv) for q, a, q2, b, mv in m1.rules) + tuple(
        (f"{q}~2", a, f"{q2}~2", b, mv) for q, a, q2, b, mv in m2.rules
    )
    return TuringMachine(states, m1.alphabet, rules)


def annotate_product(machine: TuringMachine, annotation_size: int) -> TuringMachine:
    """Extend the alphabet with an inert annotation component of the given size.

    Symbols become ``sym.j`` for ``j < annotation_size``; transitions act on
    the base component and never read or change the annotation.
    """
    if annotation_size < 2:
        raise ValueError("annotation_size must be at least 2")
    alphabet = tuple(f"{a}.{j}" for a in machine.alphabet for j in range(annotation_size))
    rules = tuple(
        (q, f"{a}.{j}", q2, f"{b}.{j}", mv)
        for q, a, q2, b, mv in machine.rules
        for j in range(annotation_size)
    )
    return TuringMachine(machine.states, alphabet, rules)


def observed_crossing_sequences(record: RunRecord) -> dict[int, tuple[str, ...]]:
    """States crossing each cell boundary, in time order.

    Boundary ``i`` separates cells ``i`` and ``i + 1``.  A crossing records
    the state the machine is in after the transition that moves it across
    (the state entering the destination cell).  Boundaries never crossed are
    absent from the map.
    """
    out: dict[int, list[str]] = {}
    positions = record.head_positions + (record.final_position,)
    states_after = tuple(state for _, state in record.trace[1:]) + (record.final_state,)
    for t in range(record.steps):
        p, np_ = positions[t], positions[t + 1]
        if np_ == p + 1:
            out.setdefault(p, []).append(states_after[t])
        elif np_ == p - 1:
            out.setdefault(np_, []).append(states_after[t])
    return {boundary: tuple(seq) for boundary, seq in out.items()}


def parse_machine(text: str) -> TuringMachine:
    """Parse the line-oriented machine format.

    ::

        # comment
        states: q1 q2
        alphabet: a b
        rule: q1 a -> q2 a S     (move is one of L, S, R)

    Declarations must precede the rules that use them; exactly one rule per
    (state, symbol) pair is required.
    """
    states: tuple[str, ...] | None = None
    alphabet: tuple[str, ...] | None = None
    rules: list[Rule] = []
    seen: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("states:"):
            if states is not None:
                raise MachineFormatError("duplicate states declaration", lineno)
            states = tuple(line[len("states:") :].split())
            if not states:
                raise MachineFormatError("empty states declaration", lineno)
        elif line.startswith("alphabet:"):
            if alphabet is not None:
                raise MachineFormatError("duplicate alphabet declaration", lineno)
            alphabet = tuple(line[len("alphabet:") :].split())
            if not alphabet:
                raise MachineFormatError("empty alphabet declaration", lineno)
        elif line.startswith("rule:"):
            if states is None or alphabet is None:
                raise MachineFormatError("rule before states/alphabet declaration", lineno)
            tokens = line[len("rule:") :].split()
            if len(tokens) != 6 or tokens[2] != "->":
                raise MachineFormatError(
                    "expected 'rule: <state> <symbol> -> <state> <symbol> <L|S|R>'", lineno
                )
            q, a, _, q2, b, move_name = tokens
            if q not in states or q2 not in states:
                bad = q if q not in states else q2
                raise MachineFormatError(f"undeclared state {bad!r}", lineno)
            if a not in alphabet or b not in alphabet:
                bad = a if a not in alphabet else b
                raise MachineFormatError(f"undeclared symbol {bad!r}", lineno)
            if move_name not in NAME_MOVES:
                raise MachineFormatError(f"invalid move {move_name!r} (use L, S or R)", lineno)
            if (q, a) in seen:
                raise MachineFormatError(f"duplicate transition for ({q}, {a})", lineno)
            seen.add((q, a))
            rules.append((q, a, q2, b, NAME_MOVES[move_name]))
        else:
            raise MachineFormatError(f"unrecognized line {line!r}", lineno)
    if states is None or alphabet is None:
        raise MachineFormatError("missing states or alphabet declaration")
    for q in states:
        for a in alphabet:
            if (q, a) not in seen:
                raise MachineFormatError(f"missing transition for ({q}, {a})")
    return TuringMachine(states, alphabet, tuple(rules))


def neg_pow2_window(
    machine: TuringMachine, state: str, lo: int, hi: int, head_position: int = 0
) -> WindowConfiguration:
    """Window for the built-in pattern with the second symbol at positions (-2)^i.

    All other cells hold the first alphabet symbol.  Requires at least two
    symbols.  This is the third worked behavior of the zigzag machine and a
    regression anchor for the simulator.
    """
    if len(machine.alphabet) < 2:
        raise ValueError("neg-pow2 pattern needs an alphabet with at least two symbols")
    zero, one = machine.alphabet[0], machine.alphabet[1]
    marks: set[int] = set()
    value = 1
    bound = max(abs(lo), abs(hi))
    while abs(value) <= bound:
        marks.add(value)
        value *= -2
    segment = tuple(one if p in marks else zero for p in range(lo, hi + 1))
    return WindowConfiguration(state, segment, head_position - lo, lo)
