import numpy as np
import pytest

from hodgesolve import generators
from hodgesolve.errors import InvalidParams
from hodgesolve.oracle import DenseHodge, loewner_check, materialize, pinv_sym, range_basis
from hodgesolve.solver import SolverContext, spectral_estimates


def _tet_K(top):
    cx = generators.tetrahedron()
    return generators.set_K(cx, generators.mark_closure(cx, top))


def test_bad_params(annulus):
    with pytest.raises(InvalidParams):
        SolverContext.prepare(annulus, 1.5)
    with pytest.raises(InvalidParams):
        SolverContext.prepare(annulus, 0.1, mode="exact")


def test_single_triangle_spectrum():
    ctx = SolverContext.prepare(_tet_K([(2, 0)]), 0.05)
    s = ctx.spectral
    assert s["lam_min_K"] == pytest.approx(3.0) and s["lam_max_K"] == pytest.approx(3.0)
    assert s["kappa"] == pytest.approx(1.0)


def test_empty_triangle_set():
    ctx = SolverContext.prepare(_tet_K([(1, 0), (1, 5)]), 0.05)
    assert ctx.spectral["lam_max_K"] == 0.0
    assert not ctx.up_solve(0.05, np.ones(ctx.n1)).any()


def test_tet_sphere_up_solve_sandwich():
    cx = _tet_K([(2, i) for i in range(4)])
    ctx = SolverContext.prepare(cx, 0.05)
    D = DenseHodge(cx)
    eps = 0.05
    M = materialize(lambda x: ctx.up_solve(eps, x), ctx.n1)
    Lp = pinv_sym(D.L1up)
    assert loewner_check((1 - eps) * Lp, M).ok and loewner_check(M, Lp).ok


def test_up_solve_examples(ctx_pd2):
    D = DenseHodge(ctx_pd2.cx)
    eps = 0.05
    rng = np.random.default_rng(0)
    b = D.B1.T @ rng.standard_normal(D.B1.shape[0]) + D.hr @ rng.standard_normal(D.n1)
    assert np.linalg.norm(ctx_pd2.up_solve(eps, b)) <= 1e-8 * np.linalg.norm(b)
    y = rng.standard_normal(D.n1)
    b = D.L1up @ y
    want = pinv_sym(D.L1up) @ b
    assert np.linalg.norm(ctx_pd2.up_solve(eps, b) - want) <= eps * np.linalg.norm(want)


def test_proj_ker_perp_d2(ctx_pd2):
    D = DenseHodge(ctx_pd2.cx)
    eps = 0.05
    w = D.B2.T @ np.random.default_rng(1).standard_normal(D.n1)
    assert np.linalg.norm(ctx_pd2.proj_ker_perp_d2(eps, w) - w) <= eps * np.linalg.norm(w)


def test_proj_ker_perp_d2_kills_kernel():
    cx = _tet_K([(2, i) for i in range(4)])
    ctx = SolverContext.prepare(cx, 0.05)
    # the sphere's fundamental class spans ker d2
    k = cx.boundary_matrix(3).toarray().ravel().astype(float)
    assert np.abs(ctx.B2 @ k).max() == 0
    assert np.linalg.norm(ctx.proj_ker_perp_d2(0.05, k)) <= 1e-9
    R = range_basis(DenseHodge(cx).B2.T)
    w = R @ np.random.default_rng(2).standard_normal(R.shape[1])
    assert np.linalg.norm(ctx.proj_ker_perp_d2(0.05, w) - w) <= 0.05 * np.linalg.norm(w)


def test_laplacian_solve_examples(ctx_annulus):
    D = DenseHodge(ctx_annulus.cx)
    eps = 0.05
    h = D.harmonic_basis()[:, 0]
    assert np.linalg.norm(ctx_annulus.laplacian_solve(eps, h)) <= 1e-8
    y = np.random.default_rng(2).standard_normal(D.n1)
    b = D.L1 @ y
    x = ctx_annulus.laplacian_solve(eps, b)
    xs = pinv_sym(D.L1) @ b
    err = np.sqrt((x - xs) @ D.L1 @ (x - xs))
    assert err <= eps * np.sqrt(xs @ D.L1 @ xs)


def test_laplacian_sandwich(ctx_pd2):
    D = DenseHodge(ctx_pd2.cx)
    eps = 0.05
    M = materialize(lambda x: ctx_pd2.laplacian_solve(eps, x), ctx_pd2.n1)
    Lp = pinv_sym(D.L1)
    assert np.abs(M - M.T).max() < 1e-10
    assert loewner_check((1 - eps) * Lp, M).ok and loewner_check(M, Lp).ok


def test_beta0_fast_path_agrees(disk):
    eps = 0.05
    a = SolverContext.prepare(disk, eps)
    b = SolverContext.prepare(disk, eps, config={"solver": {"beta0_fast_path": True}})
    x = np.random.default_rng(3).standard_normal(a.n1)
    xa, xb = a.laplacian_solve(eps, x), b.laplacian_solve(eps, x)
    assert np.linalg.norm(xa - xb) <= 2 * eps * np.linalg.norm(pinv_sym(DenseHodge(disk).L1) @ x)


def test_lanczos_spectrum_within_one_percent():
    cx = generators.annulus_in_ball(4, np.random.default_rng(0))
    dense = SolverContext.prepare(cx, 0.05).spectral
    ctx = SolverContext.prepare(cx, 0.05, config={"oracle": {"dense_cap": 20}},
                                spectral={"kappa": 1.0, "lam_max_K": 1.0, "lam_min_K": 1.0})
    ctx.cfg.set("oracle.dense_cap", 20)
    s = spectral_estimates(ctx)
    assert s["method"] == "lanczos"
    assert s["lam_max_K"] == pytest.approx(dense["lam_max_K"], rel=0.01)
    assert s["lam_min_K"] == pytest.approx(dense["lam_min_K"], rel=0.01)


def test_theory_mode_runs(ctx_annulus, annulus):
    ctx = SolverContext.prepare(annulus, 0.05, "theory", rng=np.random.default_rng(0))
    assert ctx.theory["lam_min"] == pytest.approx(ctx_annulus.spectral["lam_min_X"])
    D = DenseHodge(annulus)
    M = materialize(lambda x: ctx.laplacian_solve(0.05, x), ctx.n1)
    Lp = pinv_sym(D.L1)
    assert loewner_check(0.95 * Lp, M).ok and loewner_check(M, Lp).ok


def test_down_and_up_images_orthogonal(ctx_pd2):
    rng = np.random.default_rng(9)
    b = rng.standard_normal(ctx_pd2.n1)
    x = ctx_pd2.down_solve(0.05, b)
    W = ctx_pd2.B2 @ rng.standard_normal((ctx_pd2.n2, 5))
    assert np.abs(x @ W).max() <= 1e-9 * np.linalg.norm(x) * np.linalg.norm(W, axis=0).max()
    y = ctx_pd2.up_solve(0.05, b)
    assert np.linalg.norm(ctx_pd2.B1 @ y) <= 1e-9 * np.linalg.norm(y)
