"""Pure-Python enumeration kernel.

Twin of the compiled ``_kernels`` extension: identical semantics, identical
node accounting, identical traversal order.  The compiled module is preferred
at import time; this one is the fallback and the reference for equivalence
tests.
"""

from __future__ import annotations

BACKEND = "pure"


def aggregate(
    n_states: int,
    n_syms: int,
    t_state,
    t_sym,
    t_move,
    horizon: int,
    budget: int,
):
    """Depth-first branch-on-demand sweep over all n-step behaviors.

    Branches over the initial state and over the symbol of each cell at its
    first read.  Returns ``(count, max_visited, hist, nodes, complete)`` where
    ``count`` is the number of distinct length-``horizon`` traces, ``hist[s]``
    the number of traces reading exactly ``s`` distinct cells, and ``nodes``
    the number of search-tree nodes consumed against ``budget``.  One node is
    charged per tree node, leaves included; on budget exhaustion the partial
    counts are returned with ``complete`` false.
    """
    size = 2 * horizon + 1
    tape = [-1] * size
    hist = [0] * (horizon + 1)
    state = {"count": 0, "max_s": 0, "nodes": 0, "complete": True}

    def rec(q: int, head: int, step_no: int, s: int) -> None:
        if not state["complete"]:
            return
        if state["nodes"] >= budget:
            state["complete"] = False
            return
        state["nodes"] += 1
        if step_no == horizon:
            state["count"] += 1
            hist[s] += 1
            if s > state["max_s"]:
                state["max_s"] = s
            return
        sym = tape[head]
        if sym >= 0:
            i = q * n_syms + sym
            tape[head] = t_sym[i]
            rec(t_state[i], head + t_move[i], step_no + 1, s)
            tape[head] = sym
        else:
            for choice in range(n_syms):
                i = q * n_syms + choice
                tape[head] = t_sym[i]
                rec(t_state[i], head + t_move[i], step_no + 1, s + 1)
            tape[head] = -1

    for q0 in range(n_states):
        rec(q0, horizon, 0, 0)
    return state["count"], state["max_s"], hist, state["nodes"], state["complete"]
