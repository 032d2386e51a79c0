"""Up-Laplacian solver through the (B B^T)^+ composition and the full 1-Laplacian solver.

For B = d2[K] and any U with B U y = y on im B,
(B B^T)^+ = Pi_im(B) U^T Pi_ker(B)perp U Pi_im(B). We use
M_up = A U^T Q~ U A / (1 + a)^2 where Q~ is the one-sided cycle projection of
the dual graph of K (the cycle space of the dual graph is im d2^T), and A is
the boundary projection with ||A - Pi_bd|| <= eps_bd. With
N = Q~^{1/2} U Pi_bd, kappa(N^T N) <= kappa / (1 - eps_q) and
||N E x|| <= eps_bd sqrt(kappa(N^T N)) ||N x||, so eps_q = eps/2,
eps_bd = eps / (8 sqrt(kappa_G)) and a = eps/8 give
(1 - eps) (B B^T)^+ <= M_up <= (B B^T)^+.
"""
import copy
import logging
import math
import time

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .bases import cohomology_basis, homology_basis
from .boundary import BoundaryProjector, GammaCorrection
from .chain_ops import CohomologyOperator, FillPlan, Squeezer, UOperator
from .collapse import CollapsingSequence
from .config import as_config
from .embedding import build_dual_graph, build_T
from .errors import InvalidParams, IterationStalled, VerificationError
from .graph_solver import GraphOps, linop
from .harmonic import harmonic_basis

log = logging.getLogger(__name__)


def _dual_incidence(cx):
    """Dual graph of K with columns in K-local triangle order."""
    g = build_dual_graph(cx, "K")
    kpos = np.full(cx.count(2), -1)
    kpos[cx.k_index(2)] = np.arange(cx.count(2, "K"))
    cols = kpos[g.tris]
    perm = np.empty(len(cols), np.int64)
    perm[cols] = np.arange(len(cols))
    return sp.csr_matrix(g.inc[:, perm]), g


def _lanczos_max(op, n, tol=1e-4):
    if n == 0:
        return 0.0
    try:
        w = eigsh(op, k=1, which="LA", tol=tol, maxiter=max(1000, 10 * n),
                  v0=np.ones(n) / math.sqrt(n), return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise IterationStalled(f"Lanczos did not converge: {exc}") from None
    return float(w.max())


def _dense_extremes(M, tol=1e-9):
    w = np.linalg.eigvalsh(M) if M.size else np.zeros(0)
    top = float(w.max(initial=0.0))
    nz = w[w > tol * max(top, 1e-300)]
    return (float(nz.min()) if len(nz) else 0.0), top


class SolverContext:
    """Every operator needed by laplacian_solve, prepared once for a complex."""

    def __init__(self, cx, eps, mode, cfg):
        if not 0 < eps < 1:
            raise InvalidParams("eps must lie in (0, 1)")
        if mode not in ("practical", "theory"):
            raise InvalidParams(f"unknown mode {mode!r}")
        self.cx, self.eps, self.mode, self.cfg = cx, eps, mode, cfg
        self.timings = {}
        self.report = {"eps": eps, "mode": mode}
        self._up = {}
        self.theory = None

    @classmethod
    def prepare(cls, cx, eps=0.05, mode="practical", config=None, rng=None, spectral=None):
        cfg = as_config(config)
        self = cls(cx, eps, mode, cfg)
        cap = cfg["oracle.dense_cap"]
        t = time.perf_counter()
        if cx.collapses is None:
            raise InvalidParams("complex carries no collapsing sequence")
        seq = CollapsingSequence.from_refs(cx.collapses)
        self.fill = FillPlan(cx, seq)
        self.T = build_T(cx, verify=sum(cx.counts("X")) <= cap, dense_cap=cap)
        self.squeezer = Squeezer(cx, self.T)
        self.U = UOperator(cx, self.fill, self.squeezer)
        self.C = CohomologyOperator(cx, self.fill, self.squeezer)
        self.timings["chain_ops"] = time.perf_counter() - t

        t = time.perf_counter()
        self.B1 = cx.boundary(1, "K").matrix
        self.B2 = cx.boundary(2, "K").matrix
        self.n1, self.n2 = self.B2.shape
        self.graph = GraphOps(self.B1, config=cfg)
        inc, self.dual = _dual_incidence(cx)
        self.dual_graph = GraphOps(inc, config=cfg)
        self.timings["graphs"] = time.perf_counter() - t

        t = time.perf_counter()
        self.gamma = homology_basis(cx, rng=rng, verify=sum(cx.counts("K")) <= cap, dense_cap=cap)
        self.beta = len(self.gamma)
        self.timings["homology"] = time.perf_counter() - t
        t = time.perf_counter()
        self.P = cohomology_basis(cx, self.gamma, self.C)
        self.pg = GammaCorrection(self.gamma, self.P, self.B1)
        self.timings["cohomology"] = time.perf_counter() - t

        t = time.perf_counter()
        self.spectral = spectral or spectral_estimates(self, need_X=(mode == "theory"))
        self.timings["spectral"] = time.perf_counter() - t
        lamX = self.spectral.get("lam_min_X")
        if lamX:
            bound = cfg["bases.alpha"] * cx.count(1) ** 2 * cx.count(2) ** 4 / lamX * max(self.gamma.max_norm, 1.0)
            self.P.diagnostics.update(p_bound=bound, p_bound_ok=self.P.diagnostics["p_max"] <= bound)
        if mode == "theory":
            self.theory = {"lam_min": lamX, "n1": cx.count(1), "n2": cx.count(2),
                           "alpha": cfg["bases.alpha"]}
        self.report.update(beta=self.beta, spectral=self.spectral, counts_K=cx.counts("K"),
                           counts_X=cx.counts("X"), tree_stats=self.graph.forest.stats(),
                           dual_tree_stats=self.dual_graph.forest.stats())
        self.kappa = self.spectral["kappa"]
        return self

    # -- building blocks --------------------------------------------------
    def harmonic(self, eps):
        return harmonic_basis(self.graph, self.P, eps, self.mode, self.cfg, self.theory)

    def proj_bd_op(self, eps):
        return BoundaryProjector(self.graph, self.pg, self.harmonic, eps, self.mode, self.cfg,
                                 {"n2": self.cx.count(2), "lam_min": (self.theory or {}).get("lam_min", 1.0)})

    def proj_bd(self, eps, x):
        return self.proj_bd_op(eps)(x)

    def proj_ker_perp_d2(self, eps, w):
        """Pi~ onto im d2^T[K] as the cycle projection of the dual graph."""
        return self.dual_graph.proj_cyc(eps, np.asarray(w, float))

    def _up_parts(self, eps):
        if eps not in self._up:
            safety = float(self.cfg["solver.kappa_safety"])
            eq = eps / 2
            kG = safety * max(self.kappa, 1.0) / (1 - eq)
            ebd = eps / (8 * math.sqrt(kG))
            a = eps / 8
            if self.beta == 0 and self.cfg["solver.beta0_fast_path"]:
                A = self.graph.proj_cyc_fn(ebd)
            else:
                A = self.proj_bd_op(ebd)
            Q = self.dual_graph.proj_cyc_fn(eq)
            self._up[eps] = (A, Q, a)
            self.report.setdefault("up", {})[str(eps)] = {"eps_q": eq, "kappa_G": kG, "eps_bd": ebd, "a": a}
        return self._up[eps]

    def up_solve(self, eps, b):
        A, Q, a = self._up_parts(eps)
        y = A(np.asarray(b, float))
        z = Q(self.U.apply(y))
        return A(self.U.adjoint(z)) / (1 + a) ** 2

    def down_solve(self, eps, b):
        return self.graph.down_solve(eps, np.asarray(b, float))

    def laplacian_solve(self, eps, b):
        b = np.asarray(b, float)
        return self.down_solve(eps, b) + self.up_solve(eps, b)

    def operator(self, which="laplacian", eps=None):
        eps = eps or self.eps
        f = {"laplacian": self.laplacian_solve, "up": self.up_solve, "down": self.down_solve}[which]
        return linop(lambda x: f(eps, x), self.n1)


def _with_full_K(cx):
    c = copy.copy(cx)
    c._cache = {}
    c.in_K = [np.ones(cx.count(d), bool) for d in range(4)]
    return c


def spectral_estimates(ctx, need_X=False):
    """lam_min and lam_max of L1_up(K), and lam_min of L1_up(X) when needed or cheap."""
    cx, cfg = ctx.cx, ctx.cfg
    cap = cfg["oracle.dense_cap"]
    out = {"method": None}
    B2 = ctx.B2.astype(float)
    n1, n2 = B2.shape
    if n2 == 0:
        out.update(lam_min_K=0.0, lam_max_K=0.0, kappa=1.0, method="empty")
    elif n1 <= cap:
        lo, hi = _dense_extremes((B2 @ B2.T).toarray())
        out.update(lam_min_K=lo, lam_max_K=hi, method="dense")
    else:
        hi = _lanczos_max(linop(lambda x: B2 @ (B2.T @ x), n1), n1)
        # provisional up solver with a crude kappa guess; its top eigenvalue is ~ 1/lam_min
        ctx.kappa, mode = 1e8, ctx.mode
        ctx.mode = "practical"
        A, Q, a = ctx._up_parts(0.005)
        ctx._up.clear()
        ctx.mode = mode
        op = linop(lambda x: A(ctx.U.adjoint(Q(ctx.U.apply(A(x))))), n1)
        top = _lanczos_max(op, n1)
        out.update(lam_min_K=1.0 / top, lam_max_K=hi, method="lanczos")
    out["kappa"] = out["lam_max_K"] / out["lam_min_K"] if out["lam_min_K"] > 0 else 1.0
    out["lam_max_bound"] = 3.0 * n2
    if out["lam_max_K"] > 3.0 * n2 * (1 + 1e-9):
        raise VerificationError("lam_max(L1_up) exceeds 3 n2")
    # X quantities: dense when small, otherwise through a K = X context
    BX = cx.boundary_matrix(2).astype(float)
    if cx.count(1) <= cap:
        out["lam_min_X"] = _dense_extremes((BX @ BX.T).toarray())[0]
        if cx.count(2) <= cap and cx.count(3):
            B3 = cx.boundary_matrix(3).astype(float)
            out["lam_min_L2up_X"] = _dense_extremes((B3 @ B3.T).toarray())[0]
    elif need_X:
        sub = SolverContext.prepare(_with_full_K(cx), 0.5, "practical", cfg)
        out["lam_min_X"] = sub.spectral["lam_min_K"]
    return out


def prepare(cx, eps=0.05, mode="practical", config=None, rng=None):
    return SolverContext.prepare(cx, eps, mode, config, rng)


def laplacian_solve(ctx, eps, b):
    return ctx.laplacian_solve(eps, b)


def up_solve(ctx, eps, b):
    return ctx.up_solve(eps, b)


def proj_ker_perp_d2(ctx, eps, w):
    return ctx.proj_ker_perp_d2(eps, w)
