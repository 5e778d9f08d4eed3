"""Hot enumeration kernels: cocycle filtering and coboundary-orbit labelling.

Two interchangeable backends compute identical results:

* ``numba`` -- @njit loops over encoded cochain indices (the default
  when numba imports);
* ``numpy`` -- chunked vectorized equivalents, used as a fallback.

Select explicitly with the environment variable ``CECHSERIES_KERNEL``
set to ``numba`` or ``numpy`` before import.  Cochains over the sorted
edge list are encoded as mixed-radix integers, first edge most
significant, so numeric order on codes is lexicographic order on
cochains.
"""

from __future__ import annotations

import os

import numpy as np

_CHOICE = os.environ.get("CECHSERIES_KERNEL", "auto").lower()
if _CHOICE not in ("auto", "numba", "numpy"):
    raise RuntimeError(f"CECHSERIES_KERNEL must be numba|numpy, got {_CHOICE!r}")

if _CHOICE in ("auto", "numba"):
    try:
        from numba import njit
        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False
        if _CHOICE == "numba":
            raise
else:
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _CHOICE != "numpy"

_CHUNK = 1 << 16


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# -- cocycle filter ----------------------------------------------------------
#
# flags[idx] = 1 iff the cochain encoded by idx satisfies, on every
# triangle t with edges (e1, e2, e3) = (ij, jk, ik),
#     mul_t[map1[t, d_e1], map2[t, d_e2]] == map3[t, d_e3]
# where the maps are the edge->triangle restrictions.


def _filter_cocycles_py(sizes, weights, tri_edges, map1, map2, map3, tri_mul):
    total = int(np.prod(sizes)) if sizes.size else 1
    flags = np.ones(total, dtype=bool)
    ntri = tri_edges.shape[0]
    if ntri == 0:
        return flags
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        ok = np.ones(idx.size, dtype=bool)
        for t in range(ntri):
            e1, e2, e3 = tri_edges[t]
            d1 = (idx // weights[e1]) % sizes[e1]
            d2 = (idx // weights[e2]) % sizes[e2]
            d3 = (idx // weights[e3]) % sizes[e3]
            ok &= tri_mul[t][map1[t, d1], map2[t, d2]] == map3[t, d3]
        flags[idx] = ok
    return flags


if HAS_NUMBA:

    @njit(cache=True)
    def _filter_cocycles_nb(total, sizes, weights, tri_edges, map1, map2, map3, tri_mul):
        flags = np.ones(total, dtype=np.bool_)
        ntri = tri_edges.shape[0]
        if ntri == 0:
            return flags
        for idx in range(total):
            for t in range(ntri):
                e1 = tri_edges[t, 0]
                e2 = tri_edges[t, 1]
                e3 = tri_edges[t, 2]
                d1 = (idx // weights[e1]) % sizes[e1]
                d2 = (idx // weights[e2]) % sizes[e2]
                d3 = (idx // weights[e3]) % sizes[e3]
                if tri_mul[t, map1[t, d1], map2[t, d2]] != map3[t, d3]:
                    flags[idx] = False
                    break
        return flags


def filter_cocycles(sizes, weights, tri_edges, map1, map2, map3, tri_mul) -> np.ndarray:
    """Boolean cocycle mask over all encoded 1-cochains."""
    sizes = np.ascontiguousarray(sizes, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.int64)
    tri_edges = np.ascontiguousarray(tri_edges, dtype=np.int64).reshape(-1, 3)
    total = int(np.prod(sizes)) if sizes.size else 1
    if USE_NUMBA:
        map1 = np.ascontiguousarray(map1, dtype=np.int64)
        map2 = np.ascontiguousarray(map2, dtype=np.int64)
        map3 = np.ascontiguousarray(map3, dtype=np.int64)
        tri_mul = np.ascontiguousarray(tri_mul, dtype=np.int64)
        return _filter_cocycles_nb(total, sizes, weights, tri_edges,
                                   map1, map2, map3, tri_mul)
    return _filter_cocycles_py(sizes, weights, tri_edges,
                               np.asarray(map1), np.asarray(map2), np.asarray(map3),
                               np.asarray(tri_mul))


# -- orbit labelling ---------------------------------------------------------
#
# The 0-cochain group acts on cocycles; orbits are the components of
# the move graph whose moves twist all edges at one vertex by one
# generator.  Scanning starts in increasing code order, so every orbit
# is labelled by its minimal member: labels[idx] = canonical code.


def _orbit_labels_py(flags, sizes, weights, move_eidx, move_perm):
    total = flags.size
    labels = np.full(total, -1, dtype=np.int64)
    nmoves = move_eidx.shape[0]
    codes = np.nonzero(flags)[0]
    if nmoves == 0:
        labels[codes] = codes
        return labels
    for start in codes:
        if labels[start] >= 0:
            continue
        labels[start] = start
        frontier = np.array([start], dtype=np.int64)
        while frontier.size:
            nxt = []
            for m in range(nmoves):
                cur = frontier.copy()
                for k in range(move_eidx.shape[1]):
                    e = move_eidx[m, k]
                    if e < 0:
                        break
                    d = (cur // weights[e]) % sizes[e]
                    cur += (move_perm[m, k, d] - d) * weights[e]
                nxt.append(cur)
            cand = np.unique(np.concatenate(nxt))
            fresh = cand[labels[cand] < 0]
            labels[fresh] = start
            frontier = fresh
    return labels


if HAS_NUMBA:

    @njit(cache=True)
    def _orbit_labels_nb(flags, sizes, weights, move_eidx, move_perm):
        total = flags.size
        labels = np.full(total, -1, dtype=np.int64)
        nmoves = move_eidx.shape[0]
        if nmoves == 0:
            for idx in range(total):
                if flags[idx]:
                    labels[idx] = idx
            return labels
        stack = np.empty(total, dtype=np.int64)
        for start in range(total):
            if not flags[start] or labels[start] >= 0:
                continue
            labels[start] = start
            stack[0] = start
            sp = 1
            while sp > 0:
                sp -= 1
                cur = stack[sp]
                for m in range(nmoves):
                    nxt = cur
                    for k in range(move_eidx.shape[1]):
                        e = move_eidx[m, k]
                        if e < 0:
                            break
                        d = (nxt // weights[e]) % sizes[e]
                        nxt += (move_perm[m, k, d] - d) * weights[e]
                    if labels[nxt] < 0:
                        labels[nxt] = start
                        stack[sp] = nxt
                        sp += 1
        return labels


def orbit_labels(flags, sizes, weights, move_eidx, move_perm) -> np.ndarray:
    """Label every cocycle code with the minimal code of its orbit."""
    flags = np.ascontiguousarray(flags, dtype=bool)
    sizes = np.ascontiguousarray(sizes, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.int64)
    move_eidx = np.ascontiguousarray(move_eidx, dtype=np.int64)
    move_perm = np.ascontiguousarray(move_perm, dtype=np.int64)
    if move_eidx.size == 0:
        move_eidx = move_eidx.reshape(0, 1)
        move_perm = move_perm.reshape(0, 1, 1)
    if USE_NUMBA:
        return _orbit_labels_nb(flags, sizes, weights, move_eidx, move_perm)
    return _orbit_labels_py(flags, sizes, weights, move_eidx, move_perm)


def apply_move_to_code(code: int, sizes, weights, eidx, perms) -> int:
    """Apply one vertex move to a single encoded cochain (python helper)."""
    out = int(code)
    for e, perm in zip(eidx, perms):
        d = (out // int(weights[e])) % int(sizes[e])
        out += (int(perm[d]) - d) * int(weights[e])
    return out
