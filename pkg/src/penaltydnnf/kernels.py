"""Bottom-up min-sum pass over a topologically stored NNF node table.

Every circuit query in the package reduces to this pass: leaves get a cost
(picked per literal polarity), And nodes sum their children, Or nodes take
the minimum.  With 0/inf leaf costs it decides satisfiability under a
partial assignment; with penalty costs it is the weight annotation.

Two interchangeable backends:

* ``numba``  -- a jitted loop over the node table (default when numba imports).
* ``numpy``  -- level-by-level vectorised reductions, no compilation step.

Set ``PENALTYDNNF_NO_NUMBA=1`` to force the numpy path, or call
:func:`set_backend` at runtime.
"""
from __future__ import annotations

import os

import numpy as np

LIT, AND, OR = 0, 1, 2

try:  # pragma: no cover - exercised implicitly
    import numba
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False

_backend = "numpy" if (os.environ.get("PENALTYDNNF_NO_NUMBA", "") not in ("", "0")
                       or not _HAVE_NUMBA) else "numba"

# number of node-table passes run since import; used as an operation counter
passes = 0


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


class Layout:
    """Flat arrays for a node table: kinds, signed literals, CSR children."""

    __slots__ = ("kinds", "lits", "ptr", "idx", "_plan")

    def __init__(self, kinds, lits, ptr, idx):
        self.kinds = np.ascontiguousarray(kinds, dtype=np.int8)
        self.lits = np.ascontiguousarray(lits, dtype=np.int64)
        self.ptr = np.ascontiguousarray(ptr, dtype=np.int64)
        self.idx = np.ascontiguousarray(idx, dtype=np.int64)
        self._plan = None

    def __len__(self):
        return len(self.kinds)

    @property
    def plan(self):
        if self._plan is None:
            self._plan = _level_plan(self)
        return self._plan


def _level_plan(layout: Layout):
    kinds, ptr, idx = layout.kinds, layout.ptr, layout.idx
    n = len(kinds)
    level = np.zeros(n, dtype=np.int64)
    for i in range(n):
        a, b = ptr[i], ptr[i + 1]
        if b > a:
            level[i] = level[idx[a:b]].max() + 1
    lit_nodes = np.flatnonzero(kinds == LIT)
    lits = layout.lits[lit_nodes]
    empty = ptr[1:] == ptr[:-1]
    true_nodes = np.flatnonzero((kinds == AND) & empty)
    false_nodes = np.flatnonzero((kinds == OR) & empty)
    steps = []
    for lv in range(1, int(level.max(initial=0)) + 1):
        step = []
        for kind in (AND, OR):
            nodes = np.flatnonzero((level == lv) & (kinds == kind))
            if len(nodes) == 0:
                continue
            counts = ptr[nodes + 1] - ptr[nodes]
            starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
            children = np.concatenate([idx[ptr[i]:ptr[i + 1]] for i in nodes])
            step.append((kind, nodes, children, starts))
        steps.append(step)
    return lit_nodes, np.abs(lits) - 1, lits > 0, true_nodes, false_nodes, steps


def _minsum_numpy(layout: Layout, pos, neg):
    lit_nodes, lit_vars, lit_pos, true_nodes, false_nodes, steps = layout.plan
    out = np.empty((pos.shape[0], len(layout)), dtype=np.float64)
    out[:, lit_nodes] = np.where(lit_pos, pos[:, lit_vars], neg[:, lit_vars])
    out[:, true_nodes] = 0.0
    out[:, false_nodes] = np.inf
    for step in steps:
        for kind, nodes, children, starts in step:
            vals = out[:, children]
            if kind == AND:
                out[:, nodes] = np.add.reduceat(vals, starts, axis=1)
            else:
                out[:, nodes] = np.minimum.reduceat(vals, starts, axis=1)
    return out


if _HAVE_NUMBA:
    @numba.njit(cache=True, nogil=True)
    def _minsum_jit(kinds, lits, ptr, idx, pos, neg, out):
        for b in range(pos.shape[0]):
            for i in range(kinds.shape[0]):
                k = kinds[i]
                if k == 0:
                    lit = lits[i]
                    if lit > 0:
                        out[b, i] = pos[b, lit - 1]
                    else:
                        out[b, i] = neg[b, -lit - 1]
                elif k == 1:
                    s = 0.0
                    for j in range(ptr[i], ptr[i + 1]):
                        s += out[b, idx[j]]
                    out[b, i] = s
                else:
                    m = np.inf
                    for j in range(ptr[i], ptr[i + 1]):
                        v = out[b, idx[j]]
                        if v < m:
                            m = v
                    out[b, i] = m
        return out


def minsum(layout: Layout, pos, neg) -> np.ndarray:
    """Run the pass for a batch of leaf-cost vectors.

    ``pos`` and ``neg`` have shape ``(nvars,)`` or ``(batch, nvars)`` and give the
    cost of the positive and negative literal of each variable.  Returns the
    per-node values with a matching leading batch axis.
    """
    global passes
    pos = np.asarray(pos, dtype=np.float64)
    neg = np.asarray(neg, dtype=np.float64)
    single = pos.ndim == 1
    pos2 = np.ascontiguousarray(np.atleast_2d(pos))
    neg2 = np.ascontiguousarray(np.atleast_2d(neg))
    passes += pos2.shape[0]
    if _backend == "numba":
        out = np.empty((pos2.shape[0], len(layout)), dtype=np.float64)
        _minsum_jit(layout.kinds, layout.lits, layout.ptr, layout.idx, pos2, neg2, out)
    else:
        out = _minsum_numpy(layout, pos2, neg2)
    return out[0] if single else out


def assignment_costs(values: np.ndarray):
    """Leaf costs encoding a partial assignment.

    ``values`` holds 1 (true), 0 (false) or -1 (unassigned) per variable and may
    be batched.  Falsified literals cost inf, all others 0.
    """
    values = np.asarray(values)
    pos = np.where(values == 0, np.inf, 0.0)
    neg = np.where(values == 1, np.inf, 0.0)
    return pos, neg
