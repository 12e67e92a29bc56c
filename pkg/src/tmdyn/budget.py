"""Resource budgets.

All potentially expensive operations are metered in an abstract "node" unit
(one enumeration step, one successor-search step, one matrix row, ...).  Node
accounting is deterministic and identical across the compiled and pure
kernels, so results depend only on inputs and budgets, never on wall time.

A wall-clock cap is available but disabled by default: enabling it trades the
byte-for-byte reproducibility guarantee for a hard stop.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import BudgetExceededError

DEFAULT_NODES = 8_000_000
DEFAULT_GRAPH_VERTICES = 20_000
DEFAULT_SFT_WORDS = 150_000
DEFAULT_POWER_ITERATIONS = 20_000

# Nodes granted to the opportunistic exact-speed attempt after an interval has
# been computed.  Exactness-when-affordable: most machines hit this cap.
EXACT_ATTEMPT_NODES = 500_000

_WALL_CHECK_MASK = 0xFFFF


@dataclass(frozen=True)
class Budget:
    max_nodes: int = DEFAULT_NODES
    max_graph_vertices: int = DEFAULT_GRAPH_VERTICES
    max_sft_words: int = DEFAULT_SFT_WORDS
    max_power_iterations: int = DEFAULT_POWER_ITERATIONS
    max_seconds: float | None = None


class BudgetMeter:
    """Mutable consumption tracker for one top-level operation."""

    def __init__(self, budget: Budget | None = None):
        self.budget = budget or Budget()
        self.used_nodes = 0
        self._started = time.monotonic()
        self._spends = 0

    @classmethod
    def default(cls) -> "BudgetMeter":
        return cls(Budget())

    @property
    def remaining_nodes(self) -> int:
        return max(0, self.budget.max_nodes - self.used_nodes)

    def spend_nodes(self, n: int) -> None:
        self.used_nodes += n
        if self.used_nodes > self.budget.max_nodes:
            raise BudgetExceededError("nodes")
        self._spends += 1
        if self.budget.max_seconds is not None and (self._spends & _WALL_CHECK_MASK) == 0:
            self.check_wall()

    def absorb(self, n: int) -> None:
        """Record child-meter consumption without raising (post-hoc accounting)."""
        self.used_nodes += n

    def check_wall(self) -> None:
        cap = self.budget.max_seconds
        if cap is not None and time.monotonic() - self._started > cap:
            raise BudgetExceededError("seconds")

    def check_graph_vertices(self, count: int) -> None:
        if count > self.budget.max_graph_vertices:
            raise BudgetExceededError("graph-vertices")

    def check_sft_words(self, count: int) -> None:
        if count > self.budget.max_sft_words:
            raise BudgetExceededError("sft-words")

    def child(self, max_nodes: int) -> "BudgetMeter":
        """A meter with its own node cap but the same structural limits."""
        sub = BudgetMeter(
            Budget(
                max_nodes=max_nodes,
                max_graph_vertices=self.budget.max_graph_vertices,
                max_sft_words=self.budget.max_sft_words,
                max_power_iterations=self.budget.max_power_iterations,
                max_seconds=self.budget.max_seconds,
            )
        )
        return sub
