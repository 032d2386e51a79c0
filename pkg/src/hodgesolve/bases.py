"""Homology and cohomology bases of K, witnesses and delta-independence diagnostics.

Homology cycles come from a tree-cotree split of a greedy collapse core of K.
Each non-tree edge of the core closes a fundamental cycle with entries in
{-1, 0, 1}; column reduction modulo a prime selects a maximal subset that is
independent modulo boundaries. Since H_1 of a complex embedded in R^3 is
torsion-free, independence modulo p implies independence over the rationals,
and the number selected is exactly beta.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .chain_ops import CohomologyOperator, FillPlan, Squeezer
from .collapse import CollapsingSequence, greedy_collapse
from .embedding import build_T
from .errors import DependentInput, VerificationError
from .graph_solver import SpanningForest

PRIME = 32749  # small enough that products of residues stay exact in int64


@dataclass(frozen=True)
class BasisSet:
    role: str
    chains: np.ndarray            # n x beta, one chain per column
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return self.chains.shape[1]

    def __iter__(self):
        return iter(self.chains.T)

    @property
    def norms(self):
        return np.linalg.norm(self.chains.astype(float), axis=0)

    @property
    def max_norm(self):
        return float(self.norms.max(initial=0.0))


def _rref_mod(A, p):
    """Row echelon form modulo p; returns (nonzero rows, pivot columns)."""
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    r, piv = 0, []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = A[r] * pow(int(A[r, c]), p - 2, p) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if len(hit):
            A[hit] = (A[hit] - col[hit, None] * A[r]) % p
        piv.append(c)
        r += 1
    return A[:r], piv


def _select_mod(B2, Z, p):
    """Columns of Z independent modulo the column space of B2, all mod p."""
    E, piv = _rref_mod(B2.T, p)
    R = np.asarray(Z, dtype=np.int64) % p
    if len(piv):
        R = (R - E.T @ (R[piv] % p)) % p
    _, sel = _rref_mod(R, p)
    return sel, len(piv)


def fundamental_cycles(inc, edges=None):
    """{-1,0,1} cycle e - P_T e for every non-tree edge of a BFS forest."""
    f = SpanningForest(inc)
    cand = np.flatnonzero(~f.is_tree) if edges is None else np.asarray(edges)
    cand = cand[f.u[cand] >= 0] if len(cand) else cand
    E = np.zeros((f.n_edges, len(cand)), np.int64)
    E[cand, np.arange(len(cand))] = 1
    return E - f.solve(inc @ E) if len(cand) else E, cand


def homology_basis(cx, rng=None, verify=None, dense_cap=2000):
    """beta cycles of K with entries in {-1, 0, 1}, independent modulo boundaries."""
    present = [m.copy() for m in cx.in_K]
    _, core = greedy_collapse(cx, present=present, rng=rng)
    e_core = np.flatnonzero(core[1])
    v_core = np.flatnonzero(core[0])
    t_core = np.flatnonzero(core[2])
    B1 = cx.boundary_matrix(1)[v_core][:, e_core]
    Z, _ = fundamental_cycles(B1)
    B2 = cx.boundary_matrix(2)[e_core][:, t_core].toarray()
    n_core = (len(v_core), len(e_core), len(t_core))
    p = PRIME
    sel, rank2 = _select_mod(B2, Z, p) if Z.shape[1] else ([], 0)
    # lift core cycles back to K-local edge indices
    kpos = np.full(cx.count(1), -1)
    kpos[cx.k_index(1)] = np.arange(cx.count(1, "K"))
    G = np.zeros((cx.count(1, "K"), len(sel)), np.int64)
    if len(sel):
        G[kpos[e_core]] = Z[:, sel]
    diag = {
        "core_counts": n_core,
        "prime": p,
        "rank_d2_core": rank2,
        "gamma_max": float(np.linalg.norm(G, axis=0).max(initial=0.0)),
        "entries": sorted({int(v) for v in np.unique(G)}),
    }
    if verify is None:
        verify = sum(cx.counts("K")) <= dense_cap
    if verify:
        from .oracle import betti
        b = betti(cx, 1, "K", cap=max(dense_cap, sum(cx.counts("K"))))
        diag["beta_oracle"] = b
        if b != G.shape[1]:
            raise VerificationError(f"homology basis has {G.shape[1]} cycles but beta_1 = {b}")
    return BasisSet("homology", G, diag)


def cohomology_operator(cx, seq=None, T=None):
    seq = seq if seq is not None else CollapsingSequence.from_refs(cx.collapses)
    fill = FillPlan(cx, seq)
    T = T if T is not None else build_T(cx, verify=False)
    return CohomologyOperator(cx, fill, Squeezer(cx, T))


def cohomology_basis(cx, gamma, C=None, lam_min_X=None, alpha=1.0):
    """P = C gamma_i: integer cocycles of K dual to the homology basis."""
    C = C if C is not None else cohomology_operator(cx)
    G = gamma.chains
    P = C.apply(G) if G.shape[1] else np.zeros_like(G)
    n1, n2 = cx.count(1), cx.count(2)
    diag = {"p_max": float(np.linalg.norm(P, axis=0).max(initial=0.0)),
            "gamma_max": gamma.max_norm}
    if lam_min_X:
        bound = alpha * n1 ** 2 * n2 ** 4 / lam_min_X * max(gamma.max_norm, 1.0)
        diag["p_bound"] = bound
        diag["p_bound_ok"] = diag["p_max"] <= bound
    BK = cx.boundary(2, "K").matrix
    diag["cocycle_residual"] = int(np.abs(BK.T @ P).max(initial=0))
    M = P.T @ G
    diag["pairing"] = M.tolist()
    if M.size:
        from .oracle import exact_rank
        diag["pairing_rank"] = exact_rank(M) if M.shape[0] <= 300 else int(np.linalg.matrix_rank(M))
    return BasisSet("cohomology", P, diag)


def witness(v_index, V, tol=1e-10):
    """Least-norm w with w . v_i = 1 and w . v_j = 0 otherwise; dist >= 1/||w||."""
    V = np.asarray(V, float)
    k = V.shape[1]
    s = np.linalg.svd(V, compute_uv=False) if k else np.zeros(0)
    if k and s[-1] <= tol * max(s[0], 1e-300):
        raise DependentInput("witness needs linearly independent vectors")
    e = np.zeros(k)
    e[v_index] = 1.0
    w, *_ = np.linalg.lstsq(V.T, e, rcond=None)
    return w


def span_distances(V):
    """Distance of each column from the span of the others (via least-norm witnesses)."""
    V = np.asarray(V, float)
    return np.array([1.0 / np.linalg.norm(witness(i, V)) for i in range(V.shape[1])])


def stacked_det_bound(rows):
    """prod ||p_i||_1 bound on |det| for rows stacked on a totally unimodular block."""
    return float(np.prod([np.abs(r).sum() for r in rows])) if len(rows) else 1.0


def witness_bound(n1, p_max, beta):
    """Upper bound (sqrt n1)^beta p_max^(beta-1) on the witness length."""
    return math.sqrt(n1) ** beta * p_max ** (beta - 1)


def harmonic_parts(cx, P, dense_cap=2000, tol=1e-13):
    """h_i = Pi_cyc p_i (exact projection; p_i are cocycles)."""
    P = np.asarray(P, float)
    if P.shape[1] == 0:
        return P
    if sum(cx.counts("K")) <= dense_cap:
        from .oracle import DenseHodge
        return DenseHodge(cx, "K", cap=dense_cap).cyc @ P
    from .graph_solver import SddSolver
    B1 = cx.boundary(1, "K").matrix.astype(float)
    s = SddSolver(B1)
    return np.column_stack([p - B1.T @ s.solve(B1 @ p, tol=tol) for p in P.T])


def delta_independence_report(cx, P, lam_min_X=None, lam_min_L2_X=None, alpha=1.0, dense_cap=2000):
    """Harmonic lengths and normalized delta-independence of a cohomology basis."""
    Pm = P.chains if isinstance(P, BasisSet) else np.asarray(P)
    beta = Pm.shape[1]
    n1 = cx.count(1, "K")
    p_max = float(np.linalg.norm(Pm, axis=0).max(initial=0.0))
    rep = {"beta": beta, "n1": n1, "p_max": p_max}
    if beta == 0:
        rep.update(ok=True, bound=None)
        return rep
    bound = 1.0 / (math.sqrt(n1) * p_max) ** beta
    H = harmonic_parts(cx, Pm, dense_cap)
    hn = np.linalg.norm(H, axis=0)
    N = H / hn
    dist = span_distances(N) if beta > 1 else np.ones(1)
    sv = np.linalg.svd(N, compute_uv=False)
    rep.update(
        bound=bound,
        h_norms=hn.tolist(),
        delta=float(dist.min()),
        sigma_min=float(sv[-1]),
        lengths_ok=bool(np.all(hn >= bound)),
        delta_ok=bool(dist.min() >= bound),
    )
    n1X, n2X = cx.count(1), cx.count(2)
    for key, lam in (("corollary_delta_L1up", lam_min_X), ("corollary_delta_L2up", lam_min_L2_X)):
        if lam:
            rep[key] = (lam / (alpha * n1X ** 3 * n2X ** 4)) ** beta
    rep["ok"] = rep["lengths_ok"] and rep["delta_ok"]
    return rep
