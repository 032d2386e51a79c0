"""Approximate orthonormal harmonic basis and the input-relative projection Pi~_hr.

With h_i = Pi_cyc p_i the harmonic parts of a cohomology basis and N their
normalizations, computing h~_i = Pi~_cyc(eps') p_i moves every normalized
vector by at most 2 eps'. Gram-Schmidt amplifies that by at most (8 beta/delta)^beta
for delta-independent N, and the projection onto the span by another factor
2 beta. Choosing eps' = (delta / 8 beta)^(beta+1) eps therefore keeps both the
basis error and the projection error below eps.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import as_config
from .errors import EpsilonUnderflow, RankDeficient

log = logging.getLogger(__name__)

EPS_FLOOR = 1e-15


def gram_schmidt(V, tol=1e-10):
    """Classical Gram-Schmidt with one re-orthogonalization pass (columns of V)."""
    V = np.array(V, dtype=float, ndmin=2)
    n, k = V.shape
    Q = np.zeros((n, k))
    for j in range(k):
        v = V[:, j]
        nv = np.linalg.norm(v)
        u = v - Q[:, :j] @ (Q[:, :j].T @ v)
        if np.linalg.norm(u) <= tol * max(nv, 1e-300):
            raise RankDeficient(f"vector {j} is (numerically) in the span of the previous ones")
        u = u - Q[:, :j] @ (Q[:, :j].T @ u)
        Q[:, j] = u / np.linalg.norm(u)
    return Q


def gs_exact(V):
    """Gram-Schmidt without re-orthogonalization, as analysed (reference for audits)."""
    V = np.array(V, dtype=float, ndmin=2)
    Q = np.zeros_like(V)
    for j in range(V.shape[1]):
        u = V[:, j] - Q[:, :j] @ (Q[:, :j].T @ V[:, j])
        Q[:, j] = u / np.linalg.norm(u)
    return Q


def normalize_columns(H):
    return H / np.linalg.norm(H, axis=0)


def eps_prime_for(eps, delta, beta):
    """(delta / 8 beta)^(beta+1) * eps, or 0 with the log10 exponent if it underflows."""
    lg = (beta + 1) * (math.log10(delta) - math.log10(8 * beta)) + math.log10(eps)
    return (10.0 ** lg if lg > -300 else 0.0), lg


def corollary_delta(lam_min, n1, n2, beta, alpha=1.0):
    """(lam_min / (alpha n1^3 n2^4))^beta, returned as (value, log10)."""
    lg = beta * (math.log10(lam_min) - math.log10(alpha) - 3 * math.log10(n1) - 4 * math.log10(n2))
    return (10.0 ** lg if lg > -300 else 0.0), lg


@dataclass
class HarmonicBasisApprox:
    G: np.ndarray                 # n1 x beta, orthonormal columns
    eps: float
    eps_prime: float
    delta: float
    mode: str
    source: str = "cohomology"
    provenance: dict = field(default_factory=dict)

    @property
    def beta(self):
        return self.G.shape[1]

    def proj_hr(self, x):
        """sum_i g~_i (g~_i . x); accepts a chain or a block of chains."""
        x = np.asarray(x, float)
        return self.G @ (self.G.T @ x)

    __call__ = proj_hr


def harmonic_basis(graph, P, eps, mode="practical", config=None, theory=None):
    """Orthonormal g~_i from Pi~_cyc(eps') p_i, normalization and Gram-Schmidt.

    ``graph`` is the GraphOps of K's 1-skeleton and ``P`` the integer cohomology
    basis (n1 x beta). ``theory`` supplies lam_min, n1, n2 and alpha for the
    worst-case schedule.
    """
    cfg = as_config(config)
    P = np.asarray(P.chains if hasattr(P, "chains") else P, float)
    beta = P.shape[1]
    n1 = P.shape[0]
    if beta == 0:
        return HarmonicBasisApprox(np.zeros((n1, 0)), eps, 0.0, 1.0, mode)
    prov = {}
    if mode == "theory":
        th = theory or {}
        delta, dlg = corollary_delta(th["lam_min"], th["n1"], th["n2"], beta, th.get("alpha", 1.0))
        ep, lg = eps_prime_for(eps, delta, beta) if delta > 0 else (0.0, dlg * (beta + 1))
        prov.update(theory_delta=delta, theory_delta_log10=dlg, theory_eps_prime_log10=lg)
        log.info("theory schedule: delta = 1e%.1f, eps' = 1e%.1f", dlg, lg)
        if ep < 1e-300:
            if not cfg["harmonic.fallback_to_practical"]:
                raise EpsilonUnderflow(f"theory-mode eps' = 1e{lg:.1f} underflows", exponent=lg)
            prov["underflow"] = True
            mode = "practical"
        else:
            H = graph.proj_cyc(ep, P)
            N = normalize_columns(H)
            return HarmonicBasisApprox(gram_schmidt(N), eps, ep, delta, "theory", provenance=prov)

    # practical: a posteriori delta from the computed vectors
    ep0 = cfg["harmonic.eps_prime"] or max(EPS_FLOOR, 1e-6 * eps)
    N = normalize_columns(graph.proj_cyc(ep0, P))
    sv = np.linalg.svd(N, compute_uv=False)
    delta_lb = max(float(sv[-1]) - 2 * math.sqrt(beta) * ep0, 0.0)
    need, lg = eps_prime_for(eps, min(delta_lb, 1.0), beta) if delta_lb > 0 else (0.0, -np.inf)
    used = ep0
    if cfg["harmonic.eps_prime"] is None and need < ep0:
        used = max(need, EPS_FLOOR)
        N = normalize_columns(graph.proj_cyc(used, P))
    prov.update(delta_measured=float(sv[-1]), delta_lower=delta_lb, eps_prime_needed=need,
                clamped=bool(need < EPS_FLOOR), certified=bool(used <= need))
    return HarmonicBasisApprox(gram_schmidt(N), eps, used, delta_lb, "practical", provenance=prov)


def proj_hr(basis, x):
    return basis.proj_hr(x)


def gs_perturbation_audit(delta, eps, beta, trials=100, rng=None, dim=None):
    """Random delta-independent unit sets N and eps-perturbed unit sets N~.

    Checks ||g_i - g~_i|| <= (8 beta/delta)^beta eps and
    ||Pi_N - Pi_N~|| < 2 beta (8 beta/delta)^beta eps, with delta the
    measured independence of N (at least the requested one).
    """
    from .bases import span_distances
    rng = rng if rng is not None else np.random.default_rng(0)
    dim = dim or beta + 3
    out = {"trials": 0, "violations_basis": 0, "violations_proj": 0, "max_ratio_basis": 0.0,
           "max_ratio_proj": 0.0, "skipped": 0}
    done = 0
    while done < trials:
        N = normalize_columns(rng.standard_normal((dim, beta)))
        # pull the vectors together to reach independence near the requested delta
        if beta > 1:
            c = normalize_columns(N.sum(axis=1, keepdims=True))
            for t in np.linspace(0, 1, 40)[::-1]:
                M = normalize_columns(N + t * 3 * c)
                if span_distances(M).min() >= delta:
                    N = M
                    break
        d = float(span_distances(N).min()) if beta > 1 else 1.0
        if d < delta or eps >= (min(d, 1.0) / (8 * beta)) ** beta:
            out["skipped"] += 1
            continue
        E = normalize_columns(rng.standard_normal((dim, beta))) * eps * rng.uniform(0.5, 1.0)
        Nt = normalize_columns(N + E)
        eff = np.linalg.norm(Nt - N, axis=0).max()
        G, Gt = gs_exact(N), gs_exact(Nt)
        amp = (8 * beta / min(d, 1.0 - 1e-15)) ** beta
        eb = np.linalg.norm(G - Gt, axis=0).max()
        ep = np.linalg.norm(G @ G.T - Gt @ Gt.T, 2)
        rb, rp = eb / (amp * eff), ep / (2 * beta * amp * eff)
        out["max_ratio_basis"] = max(out["max_ratio_basis"], rb)
        out["max_ratio_proj"] = max(out["max_ratio_proj"], rp)
        out["violations_basis"] += int(rb > 1)
        out["violations_proj"] += int(rp >= 1)
        done += 1
    out["trials"] = done
    out["ok"] = out["violations_basis"] == 0 and out["violations_proj"] == 0
    return out


def normalized_distance_check(a, b):
    """|| a/|a| - b/|b| || and its bound 2 ||a - b|| / ||a||."""
    lhs = np.linalg.norm(a / np.linalg.norm(a) - b / np.linalg.norm(b))
    return float(lhs), float(2 * np.linalg.norm(a - b) / np.linalg.norm(a))
