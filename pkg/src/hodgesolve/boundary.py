"""Homology correction P_Gamma and the output-relative boundary projection Pi~_bd.

F = (I - P_Gamma)(I - P_T) fixes boundaries and maps every chain to a
boundary, so F (I - Pi_cbd - Pi_hr) F^T = Pi_bd. Replacing the two inner
projections by approximations with error delta changes the result by at most
2 delta ||F||^2 in norm, on the boundary space only, which gives an
output-relative (1 +- eps) Pi_bd sandwich for delta = eps / (2 ||F||^2).
"""
import logging
import math

import numpy as np
import scipy.linalg as sla

from .config import as_config
from .errors import EpsilonUnderflow, NotACycle, SingularM

log = logging.getLogger(__name__)


class GammaCorrection:
    """P_Gamma v = Gamma M^{-1} P^T v with M = P^T Gamma."""

    def __init__(self, gamma, P, B1=None, cycle_tol=1e-8):
        G = np.asarray(gamma.chains if hasattr(gamma, "chains") else gamma)
        Pm = np.asarray(P.chains if hasattr(P, "chains") else P)
        self.Gamma = G.astype(float)
        self.P = Pm.astype(float)
        self.beta = G.shape[1]
        self.B1 = B1
        self.cycle_tol = cycle_tol
        self.M = Pm.T @ G
        if self.beta:
            from .oracle import exact_rank
            r = exact_rank(self.M) if self.beta <= 300 else np.linalg.matrix_rank(self.M)
            if r < self.beta:
                raise SingularM(f"pairing matrix has rank {r} < beta = {self.beta}")
            self.lu = sla.lu_factor(self.M.astype(float))
        self.p_max = float(np.linalg.norm(self.P, axis=0).max(initial=0.0))
        self.gamma_max = float(np.linalg.norm(self.Gamma, axis=0).max(initial=0.0))
        self._norm = None

    def apply(self, x):
        """Linear extension to all chains (no cycle check)."""
        x = np.asarray(x, float)
        if self.beta == 0:
            return np.zeros_like(x)
        return self.Gamma @ sla.lu_solve(self.lu, self.P.T @ x)

    def adjoint(self, y):
        y = np.asarray(y, float)
        if self.beta == 0:
            return np.zeros_like(y)
        return self.P @ sla.lu_solve(self.lu, self.Gamma.T @ y, trans=1)

    def __call__(self, x):
        """P_Gamma of a cycle: the combination of Gamma homologous to x."""
        x = np.asarray(x, float)
        if self.B1 is not None:
            r = np.linalg.norm(self.B1 @ x)
            if r > self.cycle_tol * max(np.linalg.norm(x), 1e-300):
                raise NotACycle(f"||d1 x|| = {r:.3g} exceeds tolerance")
        return self.apply(x)

    def norm(self):
        """||P_Gamma|| exactly, through thin QR factors of Gamma and P."""
        if self._norm is None:
            if self.beta == 0:
                self._norm = 0.0
            else:
                _, Rg = np.linalg.qr(self.Gamma)
                _, Rp = np.linalg.qr(self.P)
                core = Rg @ sla.lu_solve(self.lu, Rp.T)
                self._norm = float(np.linalg.norm(core, 2))
        return self._norm

    def norm_bound(self):
        b = self.beta
        return b ** ((b + 3) / 2) * (self.p_max * self.gamma_max) ** (b + 1) if b else 0.0


def row_col_bounds(A):
    """(sqrt(n_row) * max row norm, sqrt(n_col) * max column norm), both >= ||A||."""
    A = np.asarray(A, float)
    r = np.linalg.norm(A, axis=1).max(initial=0.0)
    c = np.linalg.norm(A, axis=0).max(initial=0.0)
    return float(math.sqrt(A.shape[0]) * r), float(math.sqrt(A.shape[1]) * c)


def inverse_norm_bound(A):
    """n^(n/2 + 1) A_max^n bound on ||A^{-1}|| for a full-rank integer matrix."""
    n = A.shape[0]
    return float(n ** (n / 2 + 1) * np.abs(A).max() ** n)


def corollary_exponent(n1, n2, lam_min, beta, c=16.0):
    """log10 of (n1 n2 / lam_min)^(c beta)."""
    return c * beta * (math.log10(n1 * n2) - math.log10(lam_min))


class BoundaryProjector:
    """Pi~_bd(eps) = F (I - Pi~_cbd(delta) - Pi~_hr(delta)) F^T with F = (I - P_Gamma)(I - P_T)."""

    def __init__(self, graph, gamma_corr, harmonic_factory, eps, mode="practical", config=None, theory=None):
        self.cfg = as_config(config)
        self.graph = graph
        self.pg = gamma_corr
        self.eps = eps
        self.mode = mode
        self.report = {}
        beta = gamma_corr.beta
        frob = math.sqrt(graph.forest.stats()["frob2_I_minus_PT"])
        n1 = graph.n_edges
        self.report["norm_I_minus_PT_frob"] = frob
        if mode == "theory":
            th = theory or {}
            # worst-case bounds: ||I - P_T|| <= n1 and ||P_Gamma|| by the stacked bound
            F_norm = (1.0 + gamma_corr.norm_bound()) * n1
            lg = math.log10(eps) - math.log10(2) - 2 * math.log10(F_norm)
            self.report["corollary_exponent_log10"] = corollary_exponent(
                max(n1, 1), max(th.get("n2", 1), 1), th.get("lam_min", 1.0), beta, self.cfg["boundary.c"])
            log.info("theory delta_bd = 1e%.1f", lg)
            if lg < -300:
                if not self.cfg["harmonic.fallback_to_practical"]:
                    raise EpsilonUnderflow(f"theory-mode delta = 1e{lg:.1f} underflows", exponent=lg)
                self.report["underflow"] = True
                mode = "practical"
            else:
                delta = min(10.0 ** lg, eps / 2)
        if mode != "theory":
            F_norm = (1.0 + gamma_corr.norm()) * frob
            # F = 0 when every edge is a tree edge; any delta works then
            delta = self.cfg["boundary.delta"] or eps / (2 * max(F_norm, 1.0) ** 2)
        self.delta = delta
        self.report.update(F_norm_bound=F_norm, delta=delta, P_gamma_norm=gamma_corr.norm(),
                           P_gamma_bound=gamma_corr.norm_bound())
        self.hr = harmonic_factory(delta) if beta else None
        self._cbd = graph.proj_cbd_fn(delta)

    def F(self, x):
        y = self.graph.I_minus_PT(x)
        return y - self.pg.apply(y)

    def F_T(self, x):
        y = x - self.pg.adjoint(x)
        return self.graph.I_minus_PT_T(y)

    def apply(self, x):
        x = np.asarray(x, float)
        y = self.F_T(x)
        z = y - self._cbd(y)
        if self.hr is not None:
            z = z - self.hr.proj_hr(y)
        return self.F(z)

    __call__ = apply


def helper_identities_audit(graph, gamma_corr, Pi_bd, x_samples=None, rng=None):
    """(I-P_Gamma)(I-P_T) Pi_bd = Pi_bd and Pi_bd (I-P_Gamma)(I-P_T) = (I-P_Gamma)(I-P_T)."""
    from .oracle import materialize
    n = graph.n_edges

    def F(x):
        y = graph.I_minus_PT(np.asarray(x, float))
        return y - gamma_corr.apply(y)

    Fm = materialize(F, n)
    r1 = float(np.abs(Fm @ Pi_bd - Pi_bd).max(initial=0.0))
    r2 = float(np.abs(Pi_bd @ Fm - Fm).max(initial=0.0))
    IPT = materialize(graph.I_minus_PT, n)
    lam = float(np.linalg.eigvalsh(IPT @ IPT.T).max(initial=0.0)) if n else 0.0
    return {"identity_i": r1, "identity_ii": r2, "ok": max(r1, r2) <= 1e-9,
            "I_minus_PT_sq_max_eig": lam, "n1_sq": float(n * n), "PT_ok": lam <= n * n * (1 + 1e-12)}
