"""Dense ground truth for desk-scale instances.

Ranks use an SVD threshold of 1e-9 * sigma_max and, for integer matrices with
at most ``EXACT_MAX`` rows or columns, are cross-checked by exact fraction-free
integer elimination.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import NotSymmetric, TooLarge, VerificationError

RANK_TOL = 1e-9
EXACT_MAX = 300
DENSE_CAP = 2000


def check_cap(n, cap=DENSE_CAP):
    if n > cap:
        raise TooLarge(f"instance with {n} simplices exceeds the dense cap {cap}")


def exact_rank(A):
    """Rank of an integer matrix by fraction-free elimination (exact)."""
    M = np.array(A, dtype=np.int64)
    if M.size == 0:
        return 0
    if not np.array_equal(M, A):
        raise ValueError("exact_rank needs an integer matrix")
    rows, cols = M.shape
    if rows < cols:
        M = M.T.copy()
        rows, cols = cols, rows
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c]) + r
        if len(nz) == 0:
            continue
        piv = nz[np.argmin(np.abs(M[nz, c]))]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        others = nz[nz != piv]
        others = np.where(others == r, piv, others)
        if len(others):
            p = M[r, c]
            sub = M[others] * p - M[others, c][:, None] * M[r]
            g = np.gcd.reduce(np.abs(sub), axis=1)
            g[g == 0] = 1
            sub //= g[:, None]
            M[others] = sub
            if M.dtype != object and np.abs(M).max() > 2 ** 30:
                M = M.astype(object)
        r += 1
    return r


def svd_rank(A, tol=RANK_TOL):
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


def rank(A, tol=RANK_TOL, cross_check=True):
    r = svd_rank(A, tol)
    A = np.asarray(A)
    if cross_check and A.size and max(A.shape) <= EXACT_MAX and np.all(A == np.round(A)):
        e = exact_rank(np.round(A).astype(np.int64))
        if e != r:
            raise VerificationError(f"SVD rank {r} disagrees with exact rank {e}")
    return r


def range_basis(A, tol=RANK_TOL):
    """Orthonormal basis of the column space."""
    A = np.asarray(A, dtype=float)
    if A.size == 0 or not np.any(A):
        return np.zeros((A.shape[0], 0))
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    return U[:, s > tol * s[0]]


def null_basis(A, tol=RANK_TOL):
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    if A.size == 0 or not np.any(A):
        return np.eye(n)
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    r = int(np.sum(s > tol * s[0]))
    return Vt[r:].T


def pinv_sym(A, tol=RANK_TOL):
    w, V = np.linalg.eigh((A + A.T) / 2)
    keep = np.abs(w) > tol * max(np.abs(w).max(initial=0), 1e-300)
    return (V[:, keep] / w[keep]) @ V[:, keep].T


def materialize(apply, n, dtype=float, block=256):
    """Dense matrix of a linear map by applying it to all basis vectors."""
    cols = []
    for s in range(0, n, block):
        E = np.zeros((n, min(block, n - s)), dtype=dtype)
        E[np.arange(s, s + E.shape[1]), np.arange(E.shape[1])] = 1
        cols.append(np.asarray(apply(E)).reshape(-1, E.shape[1]))
    return np.hstack(cols) if cols else np.zeros((0, 0))


class DenseHodge:
    """Exact projections and Laplacians of a scope of a complex."""

    def __init__(self, cx, scope="K", cap=DENSE_CAP):
        check_cap(sum(cx.counts(scope)), cap)
        self.cx = cx
        self.scope = scope
        self.B1 = cx.boundary(1, scope).toarray().astype(float)
        self.B2 = cx.boundary(2, scope).toarray().astype(float)
        n1 = self.B1.shape[1]
        self.n1 = n1
        self.Ubd = range_basis(self.B2)
        self.Ucbd = range_basis(self.B1.T)
        self.bd = self.Ubd @ self.Ubd.T
        self.cbd = self.Ucbd @ self.Ucbd.T
        self.hr = np.eye(n1) - self.bd - self.cbd
        self.hr = (self.hr + self.hr.T) / 2
        self.cyc = np.eye(n1) - self.cbd
        self.L1up = self.B2 @ self.B2.T
        self.L1down = self.B1.T @ self.B1
        self.L1 = self.L1up + self.L1down
        self.L0 = self.B1 @ self.B1.T

    def hodge(self, x):
        x = np.asarray(x, float)
        return self.bd @ x, self.hr @ x, self.cbd @ x

    def harmonic_basis(self):
        w, V = np.linalg.eigh(self.hr)
        return V[:, w > 0.5]

    def pinv(self, which):
        return pinv_sym(getattr(self, which))

    def betti(self, d):
        return betti(self.cx, d, self.scope)


def exact_hodge(cx, x, scope="K", cap=DENSE_CAP):
    return DenseHodge(cx, scope, cap).hodge(x)


def betti(cx, d, scope="K", cap=DENSE_CAP, skeleton=None):
    """Betti number of the scope; ``skeleton=2`` ignores tetrahedra."""
    check_cap(sum(cx.counts(scope)), cap)
    nd = cx.count(d, scope)
    r_down = rank(cx.boundary(d, scope).toarray()) if d >= 1 else 0
    top = skeleton if skeleton is not None else 3
    r_up = rank(cx.boundary(d + 1, scope).toarray()) if d + 1 <= top else 0
    return nd - r_down - r_up


@dataclass
class LoewnerReport:
    ok: bool
    min_eig: float
    tol: float

    def __bool__(self):
        return self.ok


def loewner_check(A, B, tol=1e-9, sym_tol=None):
    """Check A <= B, i.e. the smallest eigenvalue of B - A is >= -tol."""
    A = np.atleast_2d(np.asarray(A, float))
    B = np.atleast_2d(np.asarray(B, float))
    st = tol if sym_tol is None else sym_tol
    for name, M in (("A", A), ("B", B)):
        if np.abs(M - M.T).max(initial=0) > st * max(1.0, np.abs(M).max(initial=0)):
            raise NotSymmetric(f"{name} is not symmetric")
    D = B - A
    m = float(np.linalg.eigvalsh((D + D.T) / 2).min()) if D.size else 0.0
    return LoewnerReport(m >= -tol, m, tol)


def principal_angles(A, B):
    return sla.subspace_angles(np.asarray(A, float), np.asarray(B, float))


def distance_to_span(v, W):
    """Euclidean distance of v from the column span of W."""
    if W.shape[1] == 0:
        return float(np.linalg.norm(v))
    c, *_ = np.linalg.lstsq(W, v, rcond=None)
    return float(np.linalg.norm(v - W @ c))


def delta_independence(V):
    """min_i distance(v_i, span of the others) for the columns of V."""
    k = V.shape[1]
    if k == 0:
        return float("inf")
    return min(distance_to_span(V[:, i], np.delete(V, i, axis=1)) for i in range(k))
