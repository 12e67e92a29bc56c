# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled enumeration kernel.

Twin of ``_kernels_py``: identical semantics, node accounting and traversal
order.  Kept intentionally small; everything above the hot loop stays in
Python.
"""

from libc.stdlib cimport calloc, free

BACKEND = "compiled"

cdef struct Ctx:
    int n_syms
    int horizon
    const int* t_state
    const int* t_sym
    const int* t_move
    int* tape
    long long* hist
    long long count
    long long nodes
    long long budget
    int max_s
    bint complete


cdef void _rec(Ctx* c, int q, int head, int step_no, int s) noexcept:
    cdef int sym, i, choice
    if not c.complete:
        return
    if c.nodes >= c.budget:
        c.complete = False
        return
    c.nodes += 1
    if step_no == c.horizon:
        c.count += 1
        c.hist[s] += 1
        if s > c.max_s:
            c.max_s = s
        return
    sym = c.tape[head]
    if sym >= 0:
        i = q * c.n_syms + sym
        c.tape[head] = c.t_sym[i]
        _rec(c, c.t_state[i], head + c.t_move[i], step_no + 1, s)
        c.tape[head] = sym
    else:
        for choice in range(c.n_syms):
            i = q * c.n_syms + choice
            c.tape[head] = c.t_sym[i]
            _rec(c, c.t_state[i], head + c.t_move[i], step_no + 1, s + 1)
        c.tape[head] = -1


def aggregate(int n_states, int n_syms, const int[::1] t_state, const int[::1] t_sym,
              const int[::1] t_move, int horizon, long long budget):
    """See ``_kernels_py.aggregate``; same contract, same accounting."""
    cdef Ctx c
    cdef int size = 2 * horizon + 1
    cdef int q0
    c.n_syms = n_syms
    c.horizon = horizon
    c.t_state = &t_state[0]
    c.t_sym = &t_sym[0]
    c.t_move = &t_move[0]
    c.count = 0
    c.nodes = 0
    c.budget = budget
    c.max_s = 0
    c.complete = True
    c.tape = <int*>calloc(size, sizeof(int))
    c.hist = <long long*>calloc(horizon + 1, sizeof(long long))
    if c.tape == NULL or c.hist == NULL:
        if c.tape != NULL:
            free(c.tape)
        if c.hist != NULL:
            free(c.hist)
        raise MemoryError()
    cdef int j
    for j in range(size):
        c.tape[j] = -1
    try:
        for q0 in range(n_states):
            _rec(&c, q0, horizon, 0, 0)
        hist = [c.hist[j] for j in range(horizon + 1)]
        return int(c.count), int(c.max_s), hist, int(c.nodes), bool(c.complete)
    finally:
        free(c.tape)
        free(c.hist)
