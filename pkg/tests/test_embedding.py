import numpy as np
import pytest

from hodgesolve import generators
from hodgesolve.chain_ops import Squeezer
from hodgesolve.embedding import IntermediateComplex, build_dual_graph, build_T, squeeze_order
from hodgesolve.errors import OrderInfeasible
from hodgesolve.oracle import betti


def _tet_with_K(top):
    cx = generators.tetrahedron()
    return generators.set_K(cx, generators.mark_closure(cx, top))


def test_tet_dual_graph(tet):
    g = build_dual_graph(tet, "X")
    assert g.n_nodes == 2 and g.n_edges == 4
    # every facet separates the inside from the outside
    assert np.array_equal(np.abs(g.inc.toarray()), np.ones((2, 4)))
    assert np.all(g.inc.sum(axis=0) == 0)


def test_tet_sphere_same_dual_graph(tet):
    cx = _tet_with_K([(2, i) for i in range(4)])
    a, b = build_dual_graph(tet, "X"), build_dual_graph(cx, "K")
    assert a.n_nodes == b.n_nodes and np.array_equal(a.inc.toarray(), b.inc.toarray())


def test_one_triangle_self_loop():
    cx = _tet_with_K([(2, 3)])
    g = build_dual_graph(cx, "K")
    assert g.n_nodes == 1 and g.n_edges == 1
    assert g.inc.count_nonzero() == 0
    u, v = g.endpoints()
    assert u.tolist() == [-1] and v.tolist() == [-1]


def test_T_equals_X_when_K_is_X(tet):
    T = build_T(tet)
    assert len(T.removed) == 0 and T.tri_mask.all()


def test_T_for_edge_K():
    cx = _tet_with_K([(1, 0)])
    T = build_T(cx)
    assert len(T.removed) == 1 and T.checks == {"beta2_T": 0, "beta2_K": 0}


def test_T_for_sphere_K():
    cx = _tet_with_K([(2, i) for i in range(4)])
    T = build_T(cx)
    assert len(T.removed) == 0 and T.checks["beta2_T"] == 1


def test_T_beta2_matches_K(pd2, stacked3):
    for cx in (pd2, stacked3):
        T = build_T(cx)
        assert T.checks["beta2_T"] == T.checks["beta2_K"] == betti(cx, 2, "K", skeleton=2)
        assert np.all(T.tri_mask[cx.in_K[2]])


def test_squeeze_order_single_facet(tet):
    T = IntermediateComplex(np.array([True, True, True, False]), np.array([3]), np.array([0]))
    sig, tau, s = squeeze_order(tet, T)
    assert sig.tolist() == [3] and tau.tolist() == [0] and s.tolist() == [1]


def test_squeeze_order_two_tets():
    cx = generators.two_tets()
    # tris: [0,1,2] only in tet 0, [2,3,4] only in tet 1 (opposite outer facets)
    T = build_T(generators.set_K(generators.two_tets(), generators.mark_closure(cx, [(0, 0)])))
    assert len(T.removed) == 2
    sq = Squeezer(cx, T)
    x = np.zeros(cx.count(2), np.int64)
    x[T.removed] = [1, -2]
    y = sq.apply(x)
    B = cx.boundary_matrix(2)
    assert np.array_equal(B @ y, B @ x) and np.all(y[T.removed] == 0)


def test_squeeze_order_rejects_bad_order(tet):
    T = IntermediateComplex(np.array([True, True, True, False]), np.array([3]), np.array([5]))
    with pytest.raises((OrderInfeasible, IndexError)):
        squeeze_order(tet, T)
