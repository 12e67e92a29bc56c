"""Exact upper bounds on speed and entropy by complete behavior enumeration.

The set of length-n traces is finite because a trace depends only on the
initial state and the symbols revealed at first reads.  Branch-on-demand
enumeration therefore explores one search-tree leaf per achievable trace,
exponentially cheaper than enumerating whole windows.  Maxima and counts over
that set give sound upper bounds: speed is at most (max visited cells)/n and
entropy at most log2(number of traces)/n, both nonincreasing in n as running
minima.

Partial enumeration yields no sound upper bound, so budget exhaustion is a
hard error for the bound operations here.
"""

from __future__ import annotations

import math
import os
from array import array
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .budget import BudgetMeter
from .errors import BudgetExceededError, GuardError
from .machine import TuringMachine, WindowConfiguration, run


def _load_kernel():
    if not os.environ.get("TMDYN_PURE"):
        try:
            from . import _kernels as kernel  # type: ignore[attr-defined]

            return kernel
        except ImportError:
            pass
    from . import _kernels_py as kernel

    return kernel


_kernel = _load_kernel()


def kernel_backend() -> str:
    """Which enumeration kernel is active: "compiled" or "pure"."""
    return _kernel.BACKEND


@lru_cache(maxsize=None)
def _tables(machine: TuringMachine):
    n_states = len(machine.states)
    n_syms = len(machine.alphabet)
    t_state = array("i", [0] * (n_states * n_syms))
    t_sym = array("i", [0] * (n_states * n_syms))
    t_move = array("i", [0] * (n_states * n_syms))
    for (q, a), (q2, b, move) in machine.delta.items():
        i = machine.state_index[q] * n_syms + machine.symbol_index[a]
        t_state[i] = machine.state_index[q2]
        t_sym[i] = machine.symbol_index[b]
        t_move[i] = move
    return n_states, n_syms, t_state, t_sym, t_move


@dataclass(frozen=True)
class LazyConfiguration:
    """A configuration known only on the cells read so far."""

    state: str
    known_cells: dict[int, str]
    head: int


@dataclass(frozen=True)
class Behavior:
    """One achievable trace with its visited-cell count and a replayable witness."""

    trace: tuple[tuple[str, str], ...]
    visited: int
    witness: WindowConfiguration = field(compare=False)


@dataclass(frozen=True)
class BehaviorSet:
    horizon: int
    behaviors: frozenset[Behavior]
    complete: bool = True

    @property
    def count(self) -> int:
        return len(self.behaviors)

    @property
    def max_visited(self) -> int:
        return max((b.visited for b in self.behaviors), default=0)


@dataclass(frozen=True)
class BehaviorSummary:
    """Aggregate view of a BehaviorSet without materializing traces."""

    horizon: int
    count: int
    max_visited: int
    histogram: tuple[int, ...]  # histogram[s] = number of traces with s visited cells
    complete: bool
    nodes: int


def summarize_behaviors(
    machine: TuringMachine, horizon: int, meter: BudgetMeter | None = None
) -> BehaviorSummary:
    """Kernel-backed aggregate enumeration (count, max visited, histogram)."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    meter = meter or BudgetMeter.default()
    n_states, n_syms, t_state, t_sym, t_move = _tables(machine)
    count, max_s, hist, nodes, complete = _kernel.aggregate(
        n_states, n_syms, t_state, t_sym, t_move, horizon, meter.remaining_nodes
    )
    meter.spend_nodes(nodes)
    return BehaviorSummary(horizon, count, max_s, tuple(hist), complete, nodes)


def enumerate_behaviors(
    machine: TuringMachine, horizon: int, meter: BudgetMeter | None = None
) -> BehaviorSet:
    """Materialize every achievable n-step behavior with witnesses.

    On budget exhaustion the partial set is returned flagged incomplete; its
    count is then only a lower bound on the number of traces.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    meter = meter or BudgetMeter.default()
    delta = machine.delta
    behaviors: list[Behavior] = []

    def witness(q0: str, initial: dict[int, str]) -> WindowConfiguration:
        lo, hi = min(initial), max(initial)
        segment = tuple(initial[p] for p in range(lo, hi + 1))
        return WindowConfiguration(q0, segment, -lo, lo)

    for q0 in machine.states:
        tape: dict[int, str] = {}
        initial: dict[int, str] = {}
        trace: list[tuple[str, str]] = []
        aborted = False

        def rec(q: str, head: int, step_no: int) -> None:
            nonlocal aborted
            if aborted:
                return
            try:
                meter.spend_nodes(1)
            except BudgetExceededError:
                aborted = True
                return
            if step_no == horizon:
                behaviors.append(Behavior(tuple(trace), len(initial), witness(q0, dict(initial))))
                return
            if head in tape:
                sym = tape[head]
                trace.append((sym, q))
                q2, written, move = delta[(q, sym)]
                tape[head] = written
                rec(q2, head + move, step_no + 1)
                trace.pop()
                tape[head] = sym
            else:
                for sym in machine.alphabet:
                    tape[head] = sym
                    initial[head] = sym
                    trace.append((sym, q))
                    q2, written, move = delta[(q, sym)]
                    tape[head] = written
                    rec(q2, head + move, step_no + 1)
                    trace.pop()
                    tape[head] = sym
                del tape[head]
                del initial[head]

        rec(q0, 0, 0)
        if aborted:
            return BehaviorSet(horizon, frozenset(behaviors), complete=False)
    return BehaviorSet(horizon, frozenset(behaviors))


def oracle_window_enumeration(
    machine: TuringMachine, horizon: int, guard: int = 8
) -> BehaviorSet:
    """Definitional oracle: run every centered window of length 2n-1 from every state.

    Must produce a BehaviorSet identical to ``enumerate_behaviors``; guarded
    because the window count is |Q| * |alphabet|^(2n-1).
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if horizon > guard:
        raise GuardError(f"oracle guarded at horizon {guard} (asked for {horizon})")
    width = 2 * horizon - 1
    lo = -(horizon - 1)
    seen: dict[tuple, Behavior] = {}
    for q0 in machine.states:
        for combo in _product(machine.alphabet, width):
            config = WindowConfiguration(q0, combo, -lo if lo else 0, lo)
            record = run(machine, config, horizon)
            key = record.trace
            if key not in seen:
                seen[key] = Behavior(record.trace, record.visited, config)
    return BehaviorSet(horizon, frozenset(seen.values()))


def _product(symbols: tuple[str, ...], repeat: int):
    if repeat == 0:
        yield ()
        return
    for rest in _product(symbols, repeat - 1):
        for s in symbols:
            yield (s,) + rest


def _round_up(x: float, ulps: int = 4) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, math.inf)
    return x


def speed_upper(
    machine: TuringMachine, horizon: int, meter: BudgetMeter | None = None
) -> Fraction:
    """Exact rational upper bound on the maximum speed: max visited cells over n."""
    summary = summarize_behaviors(machine, horizon, meter)
    if not summary.complete:
        raise BudgetExceededError("nodes", "enumeration incomplete: no sound upper bound")
    return Fraction(summary.max_visited, horizon)


def entropy_upper(
    machine: TuringMachine, horizon: int, meter: BudgetMeter | None = None
) -> float:
    """Upper bound on entropy in bits per step, rounded outward by a few ulps."""
    summary = summarize_behaviors(machine, horizon, meter)
    if not summary.complete:
        raise BudgetExceededError("nodes", "enumeration incomplete: no sound upper bound")
    return _round_up(math.log2(summary.count) / horizon)


def pressure_estimate(
    machine: TuringMachine, horizon: int, x: float, meter: BudgetMeter | None = None
) -> float:
    """Finite-horizon pressure: log2 of the 2^(x*s)-weighted trace count, over n.

    At x = 0 this coincides with the entropy upper bound before outward
    rounding; it is nondecreasing in x.
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    summary = summarize_behaviors(machine, horizon, meter)
    if not summary.complete:
        raise BudgetExceededError("nodes", "enumeration incomplete")
    # log-sum-exp in base 2 to avoid overflow for large x*s
    top = max(s for s, c in enumerate(summary.histogram) if c)
    total = 0.0
    for s, c in enumerate(summary.histogram):
        if c:
            total += c * 2.0 ** (x * (s - top))
    return (x * top + math.log2(total)) / horizon
