"""Backend equivalence: the numba kernels and the numpy fallbacks must
produce identical outputs on identical inputs."""

import numpy as np
import pytest

from cechseries import cech as C
from cechseries import groups as G
from cechseries import kernels as K
from cechseries import sites as S


def prepared_inputs(sheaf):
    table = C.TorsorTable(sheaf)
    tri = table._triangle_tables()
    moves = table._moves()
    return table, tri, moves


SHEAVES = [
    S.GroupSheaf.constant(S.cycle_nerve(3), G.cyclic(3)),
    S.GroupSheaf.constant(S.rp2_nerve(), G.cyclic(2)),
    S.GroupSheaf.constant(S.simplex_nerve(2, solid=True), G.symmetric(3)),
]


@pytest.mark.parametrize("sheaf", SHEAVES)
def test_numpy_path_matches_selected_backend(sheaf):
    table, tri, moves = prepared_inputs(sheaf)
    tri_edges, map1, map2, map3, tri_mul = tri
    flags_py = K._filter_cocycles_py(table.sizes, table.weights,
                                     tri_edges, map1, map2, map3, tri_mul)
    flags = K.filter_cocycles(table.sizes, table.weights,
                              tri_edges, map1, map2, map3, tri_mul)
    assert np.array_equal(flags_py, flags)
    move_eidx, move_perm = moves
    labels_py = K._orbit_labels_py(flags, table.sizes, table.weights,
                                   move_eidx, move_perm)
    labels = K.orbit_labels(flags, table.sizes, table.weights,
                            move_eidx, move_perm)
    assert np.array_equal(labels_py, labels)
    assert np.array_equal(labels, table.labels)


@pytest.mark.skipif(not K.HAS_NUMBA, reason="numba unavailable")
@pytest.mark.parametrize("sheaf", SHEAVES)
def test_numba_path_matches_numpy(sheaf):
    table, tri, moves = prepared_inputs(sheaf)
    tri_edges, map1, map2, map3, tri_mul = tri
    total = int(table.total)
    flags_nb = K._filter_cocycles_nb(
        total, table.sizes, table.weights, tri_edges,
        np.ascontiguousarray(map1, dtype=np.int64),
        np.ascontiguousarray(map2, dtype=np.int64),
        np.ascontiguousarray(map3, dtype=np.int64),
        np.ascontiguousarray(tri_mul, dtype=np.int64))
    flags_py = K._filter_cocycles_py(table.sizes, table.weights,
                                     tri_edges, map1, map2, map3, tri_mul)
    assert np.array_equal(flags_nb, flags_py)
    move_eidx, move_perm = moves
    labels_nb = K._orbit_labels_nb(flags_nb, table.sizes, table.weights,
                                   move_eidx, move_perm)
    labels_py = K._orbit_labels_py(flags_py, table.sizes, table.weights,
                                   move_eidx, move_perm)
    assert np.array_equal(labels_nb, labels_py)


def test_backend_name_reports():
    assert K.backend_name() in ("numba", "numpy")


def test_no_moves_labels_by_identity():
    flags = np.array([True, False, True, True])
    labels = K.orbit_labels(flags, np.array([4]), np.array([1]),
                            np.zeros((0, 1), dtype=np.int64),
                            np.zeros((0, 1, 1), dtype=np.int64))
    assert labels.tolist() == [0, -1, 2, 3]
