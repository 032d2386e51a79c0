"""Include, Fill and Squeeze operators, the cohomology operator C and the map U.

All sweeps accept 1-D chains or 2-D blocks of chains (one per column); integer
inputs stay integer, so results on integer chains are exact.
"""
import numpy as np

from . import kernels
from .collapse import CollapsingSequence
from .embedding import squeeze_order
from .errors import OrderMismatch, ScopeMismatch, SequenceNotNormalized


def _out(b, flat):
    return b[:, 0] if flat else b


class FillPlan:
    """Triangle-edge pairs of a normalized collapse of X, in processing order.

    For a 1-cycle g the sweep keeps a residual r (initially g); at pair (t, e)
    it sets x[t] = s * r[e], with s the sign of e in d2 t, then subtracts
    x[t] * d2 t from r. Triangles removed by tet-tri pairs stay 0.
    """

    def __init__(self, cx, seq):
        if not isinstance(seq, CollapsingSequence):
            seq = CollapsingSequence.from_refs(seq)
        if not seq.is_normalized():
            raise SequenceNotNormalized("fill needs tet-tri pairs first, then tri-edge, then edge-vertex")
        self.cx = cx
        tri, edge = seq.of_dim(2)
        f = cx.faces[2][tri]
        hit = f == edge[:, None]
        if len(tri) and not np.all(hit.sum(axis=1) == 1):
            raise OrderMismatch("a tri-edge pair does not consist of a triangle and one of its edges")
        self.pair_tri = np.ascontiguousarray(tri, dtype=np.int64)
        self.pair_edge = np.ascontiguousarray(edge, dtype=np.int64)
        self.pair_sign = np.ascontiguousarray(cx.face_signs[2][tri][hit], dtype=np.int64)
        self.tri_edges = np.ascontiguousarray(cx.faces[2], dtype=np.int64)
        self.tri_signs = np.ascontiguousarray(cx.face_signs[2], dtype=np.int64)
        ev, vv = seq.of_dim(1)
        self.tree_edges = np.asarray(ev, dtype=np.int64)   # spanning tree of X's 1-skeleton
        self.n1, self.n2 = cx.count(1), cx.count(2)

    def apply(self, g):
        g = np.asarray(g)
        if g.shape[0] != self.n1:
            raise ScopeMismatch("fill expects a 1-chain over X")
        r, flat = kernels.block(g, kernels.work_dtype(g))
        x = np.zeros((self.n2, r.shape[1]), dtype=r.dtype)
        kernels.call("fill_forward", r, x, self.pair_tri, self.pair_edge, self.pair_sign,
                     self.tri_edges, self.tri_signs)
        return _out(x, flat)

    def adjoint(self, z):
        z = np.asarray(z)
        if z.shape[0] != self.n2:
            raise ScopeMismatch("fill adjoint expects a 2-chain over X")
        xb, flat = kernels.block(z, kernels.work_dtype(z))
        rb = np.zeros((self.n1, xb.shape[1]), dtype=xb.dtype)
        kernels.call("fill_adjoint", xb, rb, self.pair_tri, self.pair_edge, self.pair_sign,
                     self.tri_edges, self.tri_signs)
        return _out(rb, flat)

    __call__ = apply


class Squeezer:
    """Pushes a 2-chain of X onto T without changing its boundary.

    Step i removes the coefficient on sigma_i by subtracting
    (x[sigma_i] / s_i) * d3 tau_i, with s_i = [d3 tau_i]_{sigma_i} = +-1.
    Outputs are X-indexed and vanish on X minus T.
    """

    def __init__(self, cx, T):
        self.cx = cx
        self.T = T
        self.sig, self.tet, self.sgn = squeeze_order(cx, T)
        self.tet_faces = np.ascontiguousarray(cx.faces[3], dtype=np.int64)
        self.tet_signs = np.ascontiguousarray(cx.face_signs[3], dtype=np.int64)
        self.n2 = cx.count(2)

    def apply(self, x):
        x = np.asarray(x)
        if x.shape[0] != self.n2:
            raise ScopeMismatch("squeeze expects a 2-chain over X")
        b, flat = kernels.block(x, kernels.work_dtype(x))
        kernels.call("squeeze_forward", b, self.sig, self.tet, self.sgn, self.tet_faces, self.tet_signs)
        return _out(b, flat)

    def adjoint(self, z):
        z = np.asarray(z)
        if z.shape[0] != self.n2:
            raise ScopeMismatch("squeeze adjoint expects a 2-chain over X")
        b, flat = kernels.block(z, kernels.work_dtype(z))
        kernels.call("squeeze_adjoint", b, self.sig, self.tet, self.sgn, self.tet_faces, self.tet_signs)
        return _out(b, flat)

    __call__ = apply


def include(cx, x, d=1):
    return cx.include(x, d)


def restrict(cx, x, d=1):
    return cx.restrict(x, d)


class CohomologyOperator:
    """C = N^T F^T S^T Pi S F N with Pi zeroing the triangles of K."""

    def __init__(self, cx, fill, squeezer):
        self.cx, self.F, self.S = cx, fill, squeezer
        self.keepT = squeezer.T.tri_mask & ~cx.in_K[2]

    def apply(self, g):
        cx = self.cx
        y = self.S.apply(self.F.apply(cx.include(g, 1)))
        y = y * (self.keepT[:, None] if y.ndim == 2 else self.keepT)
        return cx.restrict(self.F.adjoint(self.S.adjoint(y)), 1)

    __call__ = apply


class UOperator:
    """U = restrict o squeeze o fill o include, so d2[K] U y = y on boundaries of K."""

    def __init__(self, cx, fill, squeezer):
        self.cx, self.F, self.S = cx, fill, squeezer

    def apply(self, y):
        cx = self.cx
        return cx.restrict(self.S.apply(self.F.apply(cx.include(y, 1))), 2)

    def adjoint(self, z):
        cx = self.cx
        return cx.restrict(self.F.adjoint(self.S.adjoint(cx.include(z, 2))), 1)

    __call__ = apply


def power_norm(apply, adjoint, n, iters=100, seed=0, tol=1e-10):
    """Largest singular value by power iteration on A^T A."""
    if n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(iters):
        w = adjoint(apply(v))
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        s_new = np.sqrt(nw)
        v = w / nw
        if abs(s_new - s) <= tol * s_new:
            s = s_new
            break
        s = s_new
    return float(s)


def operator_norm(apply, adjoint, n_in, dense_max=600, seed=0):
    """Exact 2-norm for small operators, power iteration otherwise."""
    from .oracle import materialize
    if n_in <= dense_max:
        A = materialize(apply, n_in)
        return float(np.linalg.norm(A, 2)) if A.size else 0.0
    return power_norm(apply, adjoint, n_in, seed=seed)


def norm_estimates(cx, fill, squeezer, C=None, lam_min_X=None, lam_min_K=None, alpha=1.0, seed=0):
    """Measured ||S||, ||F||, ||C|| against the closed-form bounds."""
    n1, n2 = cx.count(1), cx.count(2)
    rep = {}
    s = operator_norm(squeezer.apply, squeezer.adjoint, n2, seed=seed)
    rep["S"] = {"estimate": s, "bound": 2.0 * n2, "ok": s <= 2.0 * n2 * (1 + 1e-9)}
    f = operator_norm(fill.apply, fill.adjoint, n1, seed=seed)
    fb = 2.0 * (n1 + 1) * n2 / np.sqrt(lam_min_X) if lam_min_X else float("inf")
    rep["F"] = {"estimate": f, "bound": fb, "ok": f <= fb * (1 + 1e-9)}
    if C is not None:
        nk1 = cx.count(1, "K")
        c = operator_norm(C.apply, C.apply, nk1, seed=seed)
        lam = lam_min_X if lam_min_X else lam_min_K
        cb = alpha * n1 ** 2 * n2 ** 4 / lam if lam else float("inf")
        rep["C"] = {"estimate": c, "bound": cb, "ok": c <= cb * (1 + 1e-9)}
    return rep
