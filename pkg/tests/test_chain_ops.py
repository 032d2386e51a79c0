import numpy as np
import pytest
from hypothesis import given, strategies as st

from hodgesolve import generators
from hodgesolve.chain_ops import (CohomologyOperator, FillPlan, Squeezer, UOperator, norm_estimates,
                                  operator_norm)
from hodgesolve.collapse import CollapsingSequence
from hodgesolve.embedding import IntermediateComplex, build_T
from hodgesolve.errors import ScopeMismatch, SequenceNotNormalized
from hodgesolve.graph_solver import SpanningForest
from hodgesolve.oracle import DenseHodge, null_basis


def _ops(cx):
    fill = FillPlan(cx, CollapsingSequence.from_refs(cx.collapses))
    sq = Squeezer(cx, build_T(cx, verify=False))
    return fill, sq


def test_fill_tet_facet(tet):
    fill, _ = _ops(tet)
    B2 = tet.boundary_matrix(2)
    g = B2[:, 0].toarray().ravel()
    x = fill.apply(g)
    assert x.tolist() == [1, 0, 0, 0]
    assert np.array_equal(B2 @ x, g)


def test_fill_zero(pd2):
    fill, _ = _ops(pd2)
    assert not fill.apply(np.zeros(pd2.count(1), np.int64)).any()


def test_fill_of_non_cycle_ignores_tree_part(pd2):
    fill, _ = _ops(pd2)
    f = SpanningForest(pd2.boundary_matrix(1), tree_edges=fill.tree_edges)
    y = np.random.default_rng(0).integers(-3, 4, pd2.count(1))
    gy = y - f.p_tree(y)
    assert np.array_equal(fill.apply(y), fill.apply(gy))


def test_fill_requires_normalized(tet):
    p = CollapsingSequence.from_refs(tet.collapses).pairs
    with pytest.raises(SequenceNotNormalized):
        FillPlan(tet, CollapsingSequence(p[::-1]))


def test_fill_scope_check(tet):
    fill, _ = _ops(tet)
    with pytest.raises(ScopeMismatch):
        fill.apply(np.zeros(3))


@given(st.integers(1, 30), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_fill_exact_on_boundaries(k, seed, s2):
    cx = generators.ball(k, seed)
    fill, sq = _ops(cx)
    rng = np.random.default_rng(s2)
    B2 = cx.boundary_matrix(2)
    g = B2 @ rng.integers(-5, 6, (cx.count(2), 3))
    assert np.array_equal(B2 @ fill.apply(g), g)
    x = rng.integers(-5, 6, cx.count(2))
    y = sq.apply(x)
    assert np.array_equal(B2 @ y, B2 @ x)


def test_squeeze_single_facet(tet):
    T = IntermediateComplex(np.array([True, True, True, False]), np.array([3]), np.array([0]))
    sq = Squeezer(tet, T)
    x = np.array([0, 0, 0, 1])
    y = sq.apply(x)
    B2 = tet.boundary_matrix(2)
    assert y.tolist() == [1, -1, 1, 0]
    assert np.array_equal(B2 @ y, B2 @ x)
    assert not sq.apply(np.zeros(4, np.int64)).any()


def test_squeeze_identity_on_T(pd2):
    _, sq = _ops(pd2)
    x = np.random.default_rng(1).integers(-3, 4, pd2.count(2)) * sq.T.tri_mask
    assert np.array_equal(sq.apply(x), x)


def test_adjoints(pd2):
    fill, sq = _ops(pd2)
    rng = np.random.default_rng(2)
    a, b = rng.standard_normal(pd2.count(1)), rng.standard_normal(pd2.count(2))
    assert fill.apply(a) @ b == pytest.approx(a @ fill.adjoint(b))
    c = rng.standard_normal(pd2.count(2))
    assert sq.apply(c) @ b == pytest.approx(c @ sq.adjoint(b))


def test_U_exact_on_boundaries(stacked3):
    fill, sq = _ops(stacked3)
    U = UOperator(stacked3, fill, sq)
    BK = stacked3.boundary(2, "K").matrix
    w = np.random.default_rng(3).integers(-4, 5, (stacked3.count(2, "K"), 4))
    y = BK @ w
    assert np.array_equal(BK @ U.apply(y), y)


def test_cohomology_operator_beta0(disk):
    fill, sq = _ops(disk)
    C = CohomologyOperator(disk, fill, sq)
    D = DenseHodge(disk)
    cycles = null_basis(D.B1)
    g = np.rint(cycles @ np.random.default_rng(0).standard_normal(cycles.shape[1]) * 3)
    g = D.B2 @ np.linalg.lstsq(D.B2, D.cyc @ g, rcond=None)[0]
    p = C.apply(np.rint(g).astype(np.int64))
    assert np.abs(D.B2.T @ p).max() == 0
    assert np.abs(cycles.T @ p).max() < 1e-9


def test_cohomology_operator_zero(annulus):
    fill, sq = _ops(annulus)
    C = CohomologyOperator(annulus, fill, sq)
    assert not C.apply(np.zeros(annulus.count(1, "K"), np.int64)).any()


def test_norm_S_on_tet(tet):
    T = IntermediateComplex(np.array([True, True, True, False]), np.array([3]), np.array([0]))
    sq = Squeezer(tet, T)
    s = operator_norm(sq.apply, sq.adjoint, 4)
    assert s <= 8
    assert s == pytest.approx(2.0)


def test_norm_S_identity_for_empty_D(tet):
    sq = Squeezer(tet, build_T(tet))
    assert operator_norm(sq.apply, sq.adjoint, 4) == pytest.approx(1.0)


def test_norm_estimates_pass(pd2):
    fill, sq = _ops(pd2)
    B = pd2.boundary_matrix(2).toarray().astype(float)
    w = np.linalg.eigvalsh(B @ B.T)
    lam = w[w > 1e-9].min()
    rep = norm_estimates(pd2, fill, sq, CohomologyOperator(pd2, fill, sq), lam_min_X=lam)
    assert all(rep[k]["ok"] for k in ("S", "F", "C"))
