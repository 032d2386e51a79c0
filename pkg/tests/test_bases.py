import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hodgesolve import generators
from hodgesolve.bases import (PRIME, _rref_mod, cohomology_basis, delta_independence_report,
                              homology_basis, span_distances, stacked_det_bound, witness,
                              witness_bound)
from hodgesolve.errors import DependentInput
from hodgesolve.oracle import DenseHodge, distance_to_span, exact_rank

rng0 = lambda: np.random.default_rng(0)  # noqa: E731


def _bases(cx):
    g = homology_basis(cx, rng=rng0())
    return g, cohomology_basis(cx, g)


def test_disk_has_empty_bases(disk):
    g, P = _bases(disk)
    assert len(g) == 0 and len(P) == 0


def test_annulus_frozen(annulus):
    g, P = _bases(annulus)
    D = DenseHodge(annulus)
    assert len(g) == 1 and g.diagnostics["entries"] == [-1, 0, 1]
    assert g.diagnostics["core_counts"] == (4, 4, 0)
    c = g.chains[:, 0]
    assert np.abs(D.B1 @ c).max() == 0
    # not a boundary: nonzero harmonic part
    assert np.linalg.norm(D.hr @ c) > 0.5
    assert P.diagnostics["pairing"] == [[2]]
    assert P.diagnostics["p_max"] == pytest.approx(math.sqrt(20))
    assert P.diagnostics["cocycle_residual"] == 0


def test_pd2_frozen(pd2):
    g, P = _bases(pd2)
    assert len(g) == 2
    assert P.diagnostics["pairing"] == [[2, 0], [0, 2]]
    assert P.diagnostics["pairing_rank"] == 2
    assert P.diagnostics["p_max"] == pytest.approx(math.sqrt(37))


def test_stacked_pairing_invertible(stacked3):
    g, P = _bases(stacked3)
    M = np.array(P.diagnostics["pairing"])
    assert M.shape == (3, 3) and exact_rank(M) == 3
    assert round(abs(np.linalg.det(M))) == 240


@given(st.integers(0, 10 ** 6))
def test_random_subcomplex_bases(seed):
    rng = np.random.default_rng(seed)
    cx = generators.punctured_disk(2, np.random.default_rng(1))
    generators.set_K(cx, generators.random_subcomplex(cx, rng, p_tri=0.15, p_edge=0.05))
    g, P = _bases(cx)
    D = DenseHodge(cx)
    assert len(g) == D.harmonic_basis().shape[1]
    assert np.abs(D.B1 @ g.chains).max(initial=0) == 0
    assert np.abs(D.B2.T @ P.chains).max(initial=0) == 0
    if len(g):
        assert exact_rank(P.chains.T @ g.chains) == len(g)


def test_rref_mod_small():
    E, piv = _rref_mod(np.array([[2, 4], [1, 2], [0, 3]]), 7)
    assert piv == [0, 1] and len(E) == 2
    assert PRIME == 32749


def test_witness_examples():
    assert np.allclose(witness(0, np.eye(3)), [1, 0, 0])
    for e in (1e-1, 1e-2, 1e-3):
        w = witness(0, np.array([[1.0, 1.0], [0.0, e]]))
        assert np.linalg.norm(w) == pytest.approx(math.sqrt(1 + 1 / e ** 2))
    with pytest.raises(DependentInput):
        witness(0, np.array([[1.0, 2.0], [1.0, 2.0]]))


@given(arrays(float, (6, 3), elements=st.floats(-3, 3)))
def test_witness_certifies_distance(V):
    if np.linalg.svd(V, compute_uv=False)[-1] < 1e-3:
        return
    for i in range(3):
        w = witness(i, V)
        assert w @ V[:, i] == pytest.approx(1.0)
        others = np.delete(V, i, axis=1)
        assert np.abs(w @ others).max() < 1e-8
        assert 1 / np.linalg.norm(w) <= distance_to_span(V[:, i], others) * (1 + 1e-9) + 1e-12


@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_stacked_det_bound(k, seed):
    rng = np.random.default_rng(seed)
    n = 6
    # node-arc incidence of a tree is totally unimodular; drop a row for a square block
    parent = [rng.integers(0, i) for i in range(1, n + 1)]
    A = np.zeros((n + 1, n), np.int64)
    for j, p in enumerate(parent):
        A[p, j], A[j + 1, j] = -1, 1
    TU = A[1:n + 1 - k]
    R = rng.integers(-3, 4, (k, n))
    M = np.vstack([TU, R])
    assert abs(round(np.linalg.det(M))) <= stacked_det_bound(R)


def test_witness_bound_formula():
    assert witness_bound(4, 3.0, 2) == pytest.approx(4 * 3)


def test_delta_independence_annulus(annulus):
    _, P = _bases(annulus)
    rep = delta_independence_report(annulus, P)
    assert rep["h_norms"] == [pytest.approx(1.395481429848721)]
    assert rep["delta"] == 1.0 and rep["ok"]


def test_delta_independence_pd2(pd2):
    _, P = _bases(pd2)
    rep = delta_independence_report(pd2, P)
    assert rep["delta"] == pytest.approx(0.9892476562998085)
    assert rep["delta"] >= rep["bound"] and rep["ok"]
    assert np.allclose(span_distances(np.eye(2)), 1)
