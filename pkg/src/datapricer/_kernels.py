"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import time from the ``DATAPRICER_BACKEND``
environment variable (``auto`` | ``numba`` | ``numpy``; default ``auto``,
which uses numba when importable). Both backends produce bit-identical
results: revenues are accumulated type-by-type in ascending index order in
both implementations, so argmax tie-breaks never diverge between them.

Kernel inventory:

* ``demand_tables``   -- purchased amount and payment for a batch of step
                         curves against a batch of valuation curves.
* ``fill_curves``     -- materialize the padded (boundaries, values, steps)
                         arrays of every step curve over a boundary/value
                         grid pair, in enumeration order.
* ``scan_best``       -- stream the same enumeration without materializing
                         it and return the first revenue maximizer.
* ``argmax_weighted`` -- single-pass argmax of ``payments @ weights``.
* ``argmax_of_sum``   -- single-pass argmax of ``a + b``.

Benchmark both backends with ``benchmarks/benchmark_kernels.py``.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

BACKEND_ENV_VAR = "DATAPRICER_BACKEND"

# Padded step slots carry value +inf so their utility is -inf and they can
# never win the per-curve argmax.
PAD_VALUE = np.inf


# ---------------------------------------------------------------------------
# Loop-style implementations. These compile under numba unchanged; the numpy
# namespace wraps vectorized equivalents where it pays off.
# ---------------------------------------------------------------------------


def _demand_tables_loops(bounds, values, steps, valuations, amounts, payments):
    n_curves = bounds.shape[0]
    n_types = valuations.shape[0]
    for c in range(n_curves):
        k = steps[c]
        for i in range(n_types):
            best_u = -np.inf
            best_j = 0
            for j in range(k):
                u = valuations[i, bounds[c, j]] - values[c, j]
                if u >= best_u:  # >= keeps the largest amount on ties
                    best_u = u
                    best_j = j
            if best_u >= 0.0:
                amounts[c, i] = bounds[c, best_j]
                payments[c, i] = values[c, best_j]
            else:
                amounts[c, i] = 0
                payments[c, i] = 0.0


def _fill_curves_loops(interior, grid_values, max_steps, n_total, bounds, values, steps):
    n_interior = interior.shape[0]
    n_values = grid_values.shape[0]
    bidx = np.empty(max_steps, dtype=np.int64)
    vidx = np.empty(max_steps, dtype=np.int64)
    out = 0
    for k in range(1, max_steps + 1):
        if k - 1 > n_interior or k > n_values:
            continue
        r = k - 1
        for j in range(r):
            bidx[j] = j
        while True:
            for j in range(k):
                vidx[j] = j
            while True:
                for j in range(r):
                    bounds[out, j] = interior[bidx[j]]
                bounds[out, r] = n_total
                for j in range(k):
                    values[out, j] = grid_values[vidx[j]]
                steps[out] = k
                out += 1
                j = k - 1
                while j >= 0 and vidx[j] == n_values - k + j:
                    j -= 1
                if j < 0:
                    break
                vidx[j] += 1
                for l in range(j + 1, k):
                    vidx[l] = vidx[l - 1] + 1
            j = r - 1
            while j >= 0 and bidx[j] == n_interior - r + j:
                j -= 1
            if j < 0:
                break
            bidx[j] += 1
            for l in range(j + 1, r):
                bidx[l] = bidx[l - 1] + 1
    return out


def _scan_best_loops(interior, grid_values, max_steps, n_total, valuations, weights):
    n_interior = interior.shape[0]
    n_values = grid_values.shape[0]
    n_types = valuations.shape[0]
    bidx = np.empty(max_steps, dtype=np.int64)
    vidx = np.empty(max_steps, dtype=np.int64)
    cur_bounds = np.empty(max_steps, dtype=np.int64)
    best_bounds = np.zeros(max_steps, dtype=np.int64)
    best_values = np.zeros(max_steps, dtype=np.float64)
    best_rev = -1.0
    best_index = -1
    best_k = 0
    index = 0
    for k in range(1, max_steps + 1):
        if k - 1 > n_interior or k > n_values:
            continue
        r = k - 1
        for j in range(r):
            bidx[j] = j
        while True:
            for j in range(r):
                cur_bounds[j] = interior[bidx[j]]
            cur_bounds[r] = n_total
            for j in range(k):
                vidx[j] = j
            while True:
                rev = 0.0
                for i in range(n_types):
                    best_u = -np.inf
                    pay = 0.0
                    for j in range(k):
                        u = valuations[i, cur_bounds[j]] - grid_values[vidx[j]]
                        if u >= best_u:
                            best_u = u
                            pay = grid_values[vidx[j]]
                    if best_u >= 0.0:
                        rev += weights[i] * pay
                if rev > best_rev:  # strict: ties keep the first maximizer
                    best_rev = rev
                    best_index = index
                    best_k = k
                    for j in range(k):
                        best_bounds[j] = cur_bounds[j]
                        best_values[j] = grid_values[vidx[j]]
                index += 1
                j = k - 1
                while j >= 0 and vidx[j] == n_values - k + j:
                    j -= 1
                if j < 0:
                    break
                vidx[j] += 1
                for l in range(j + 1, k):
                    vidx[l] = vidx[l - 1] + 1
            j = r - 1
            while j >= 0 and bidx[j] == n_interior - r + j:
                j -= 1
            if j < 0:
                break
            bidx[j] += 1
            for l in range(j + 1, r):
                bidx[l] = bidx[l - 1] + 1
    return best_rev, best_index, best_k, best_bounds, best_values


def _argmax_weighted_loops(payments, weights):
    n = payments.shape[0]
    m = payments.shape[1]
    best = -np.inf
    best_idx = 0
    for c in range(n):
        s = 0.0
        for i in range(m):
            s += payments[c, i] * weights[i]
        if s > best:
            best = s
            best_idx = c
    return best_idx, best


def _argmax_of_sum_loops(a, b):
    n = a.shape[0]
    best = -np.inf
    best_idx = 0
    for c in range(n):
        s = a[c] + b[c]
        if s > best:
            best = s
            best_idx = c
    return best_idx, best


def _add_column_max_loops(acc, table, col):
    n = acc.shape[0]
    best = -np.inf
    for c in range(n):
        acc[c] += table[c, col]
        if acc[c] > best:
            best = acc[c]
    return best


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _np_demand_tables(bounds, values, steps, valuations, chunk=262144):
    n_curves = bounds.shape[0]
    n_types = valuations.shape[0]
    amounts = np.zeros((n_curves, n_types), dtype=np.int64)
    payments = np.zeros((n_curves, n_types), dtype=np.float64)
    # Reversed step axis: np.argmax picks the first maximum, so reversing
    # turns it into "last maximum" = largest amount, the required tie-break.
    for lo in range(0, n_curves, chunk):
        hi = min(lo + chunk, n_curves)
        b = bounds[lo:hi, ::-1]
        v = values[lo:hi, ::-1]
        util = valuations[:, b] - v[None, :, :]  # [types, curves, steps]
        j = np.argmax(util, axis=2)
        best_u = np.take_along_axis(util, j[:, :, None], axis=2)[:, :, 0]
        rows = np.arange(hi - lo)[None, :]
        amt = b[rows, j]  # [types, curves]
        pay = v[rows, j]
        bought = best_u >= 0.0
        amounts[lo:hi] = np.where(bought, amt, 0).T
        payments[lo:hi] = np.where(bought, pay, 0.0).T
    return amounts, payments


def _np_fill_curves(interior, grid_values, max_steps, n_total, total):
    bounds = np.zeros((total, max_steps), dtype=np.int64)
    values = np.full((total, max_steps), PAD_VALUE, dtype=np.float64)
    steps = np.zeros(total, dtype=np.int64)
    _fill_curves_loops(interior, grid_values, max_steps, n_total, bounds, values, steps)
    return bounds, values, steps


def _np_scan_best(interior, grid_values, max_steps, n_total, valuations, weights,
                  chunk=131072):
    # Enumerate in chunks, reuse the batched demand kernel, and reduce with a
    # strict comparison so the first maximizer wins, exactly as the loop
    # version does. Revenue is accumulated type-by-type to keep float
    # semantics identical across backends.
    from itertools import combinations, islice

    n_interior = interior.shape[0]
    n_values = grid_values.shape[0]
    m = valuations.shape[0]

    def stream():
        for k in range(1, max_steps + 1):
            if k - 1 > n_interior or k > n_values:
                continue
            for bs in combinations(range(n_interior), k - 1):
                for vs in combinations(range(n_values), k):
                    yield k, bs, vs

    best_rev = -1.0
    best_index = -1
    best_k = 0
    best_bounds = np.zeros(max_steps, dtype=np.int64)
    best_values = np.zeros(max_steps, dtype=np.float64)
    index = 0
    it = stream()
    while True:
        batch = list(islice(it, chunk))
        if not batch:
            break
        nb = len(batch)
        bounds = np.zeros((nb, max_steps), dtype=np.int64)
        values = np.full((nb, max_steps), PAD_VALUE, dtype=np.float64)
        steps = np.zeros(nb, dtype=np.int64)
        for row, (k, bs, vs) in enumerate(batch):
            steps[row] = k
            for j, bi in enumerate(bs):
                bounds[row, j] = interior[bi]
            bounds[row, k - 1] = n_total
            for j, vi in enumerate(vs):
                values[row, j] = grid_values[vi]
        _, payments = _np_demand_tables(bounds, values, steps, valuations)
        revs = payments[:, 0] * weights[0]
        for i in range(1, m):
            revs = revs + payments[:, i] * weights[i]
        j = int(np.argmax(revs))
        if revs[j] > best_rev:
            best_rev = float(revs[j])
            best_index = index + j
            k = int(steps[j])
            best_k = k
            best_bounds[:] = 0
            best_values[:] = 0.0
            best_bounds[:k] = bounds[j, :k]
            best_values[:k] = values[j, :k]
        index += nb
    return best_rev, best_index, best_k, best_bounds, best_values


def _np_argmax_weighted(payments, weights):
    scores = payments[:, 0] * weights[0]
    for i in range(1, payments.shape[1]):
        scores = scores + payments[:, i] * weights[i]
    idx = int(np.argmax(scores))
    return idx, float(scores[idx])


def _np_argmax_of_sum(a, b):
    s = a + b
    idx = int(np.argmax(s))
    return idx, float(s[idx])


def _np_add_column_max(acc, table, col):
    acc += table[:, col]
    return float(acc.max())


def _numpy_namespace():
    return SimpleNamespace(
        name="numpy",
        demand_tables=_np_demand_tables,
        fill_curves=_np_fill_curves,
        scan_best=_np_scan_best,
        argmax_weighted=_np_argmax_weighted,
        argmax_of_sum=_np_argmax_of_sum,
        add_column_max=_np_add_column_max,
    )


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------


def _numba_namespace():
    from numba import njit

    demand_loops = njit(cache=True)(_demand_tables_loops)
    fill_loops = njit(cache=True)(_fill_curves_loops)
    scan_loops = njit(cache=True)(_scan_best_loops)
    argw_loops = njit(cache=True)(_argmax_weighted_loops)
    argsum_loops = njit(cache=True)(_argmax_of_sum_loops)
    addmax_loops = njit(cache=True)(_add_column_max_loops)

    def demand_tables(bounds, values, steps, valuations, chunk=None):
        n_curves = bounds.shape[0]
        n_types = valuations.shape[0]
        amounts = np.zeros((n_curves, n_types), dtype=np.int64)
        payments = np.zeros((n_curves, n_types), dtype=np.float64)
        if n_curves:
            demand_loops(bounds, values, steps, valuations, amounts, payments)
        return amounts, payments

    def fill_curves(interior, grid_values, max_steps, n_total, total):
        bounds = np.zeros((total, max_steps), dtype=np.int64)
        values = np.full((total, max_steps), PAD_VALUE, dtype=np.float64)
        steps = np.zeros(total, dtype=np.int64)
        if total:
            fill_loops(interior, grid_values, max_steps, n_total, bounds, values, steps)
        return bounds, values, steps

    def scan_best(interior, grid_values, max_steps, n_total, valuations, weights,
                  chunk=None):
        return scan_loops(interior, grid_values, max_steps, n_total, valuations, weights)

    def argmax_weighted(payments, weights):
        idx, score = argw_loops(payments, weights)
        return int(idx), float(score)

    def argmax_of_sum(a, b):
        idx, score = argsum_loops(a, b)
        return int(idx), float(score)

    def add_column_max(acc, table, col):
        return float(addmax_loops(acc, table, col))

    return SimpleNamespace(
        name="numba",
        demand_tables=demand_tables,
        fill_curves=fill_curves,
        scan_best=scan_best,
        argmax_weighted=argmax_weighted,
        argmax_of_sum=argmax_of_sum,
        add_column_max=add_column_max,
    )


def get_kernels(backend: str):
    """Return the kernel namespace for ``backend`` ('numba' or 'numpy')."""
    if backend == "numpy":
        return _numpy_namespace()
    if backend == "numba":
        return _numba_namespace()
    raise ValueError(f"unknown kernel backend {backend!r}")


def _select_default():
    choice = os.environ.get(BACKEND_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{BACKEND_ENV_VAR} must be 'auto', 'numba', or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return _numpy_namespace()
    try:
        return _numba_namespace()
    except ImportError:
        if choice == "numba":
            raise
        return _numpy_namespace()


KERNELS = _select_default()


def backend_name() -> str:
    return KERNELS.name


demand_tables = KERNELS.demand_tables
fill_curves = KERNELS.fill_curves
scan_best = KERNELS.scan_best
argmax_weighted = KERNELS.argmax_weighted
argmax_of_sum = KERNELS.argmax_of_sum
add_column_max = KERNELS.add_column_max
