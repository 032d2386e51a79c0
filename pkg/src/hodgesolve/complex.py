"""Embedded 3-dimensional simplicial complexes, chains and boundary operators.

Simplices are stored as tuples of vertex ids sorted ascending, which fixes the
orientation: the boundary of [v0..vd] is sum_i (-1)^i [v0..^vi..vd].
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (DimOutOfRange, DuplicateSimplex, KNotFaceClosed, MissingFace,
                     NonSortedTuple, ScopeMismatch, ValidationError)

SCOPES = ("K", "X", "T")


@dataclass
class Chain:
    dim: int
    values: np.ndarray
    scope: str = "X"

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.scope not in SCOPES:
            raise ScopeMismatch(f"unknown scope {self.scope!r}")

    def __len__(self):
        return len(self.values)


def _face_signs(d):
    return np.array([(-1) ** i for i in range(d + 1)], dtype=np.int64)


class BoundaryOp:
    """Sparse signed incidence matrix of d_d restricted to a scope."""

    def __init__(self, d, matrix, scope="X"):
        self.d = d
        self.matrix = matrix.tocsr()
        self.scope = scope
        self._mt = self.matrix.T.tocsr()

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, x):
        vals = x.values if isinstance(x, Chain) else x
        if vals.shape[0] != self.shape[1]:
            raise ScopeMismatch(f"chain of length {vals.shape[0]} for d_{self.d} with {self.shape[1]} columns")
        out = self.matrix @ vals
        return Chain(self.d - 1, out, self.scope) if isinstance(x, Chain) else out

    def apply_T(self, y):
        vals = y.values if isinstance(y, Chain) else y
        if vals.shape[0] != self.shape[0]:
            raise ScopeMismatch(f"cochain of length {vals.shape[0]} for d_{self.d}^T with {self.shape[0]} rows")
        out = self._mt @ vals
        return Chain(self.d, out, self.scope) if isinstance(y, Chain) else out

    def toarray(self):
        return self.matrix.toarray()


class EmbeddedComplex:
    """A face-closed 3-complex X with coordinates and a face-closed subcomplex K.

    Attributes
    ----------
    simplices : list of (n_d, d+1) int arrays of vertex ids (row order = dense index)
    in_K : list of bool arrays
    faces[d] : (n_d, d+1) dense indices of the (d-1)-faces, with signs in ``face_signs[d]``
    """

    def __init__(self, vertex_ids, coords, simplices, in_K=None, collapses=None, ambient=None):
        self.vertex_ids = np.asarray(vertex_ids, dtype=np.int64)
        self.coords = np.asarray(coords, dtype=float).reshape(-1, 3)
        n0 = len(self.vertex_ids)
        if len(np.unique(self.vertex_ids)) != n0:
            raise DuplicateSimplex("duplicate vertex id")
        self.simplices = [self.vertex_ids[:, None].copy()]
        for d in (1, 2, 3):
            s = simplices[d] if d < len(simplices) else None
            s = np.zeros((0, d + 1), dtype=np.int64) if s is None or len(s) == 0 else np.asarray(s, dtype=np.int64)
            if s.ndim != 2 or s.shape[1] != d + 1:
                raise ValidationError(f"{d}-simplices must have {d + 1} vertices")
            self.simplices.append(s)
        self._vpos = {int(v): i for i, v in enumerate(self.vertex_ids)}
        self._build_faces()
        if in_K is None:
            in_K = [np.ones(self.count(d), bool) for d in range(4)]
        self.in_K = [np.asarray(f, dtype=bool).copy() for f in in_K]
        for d in range(4):
            if self.in_K[d].shape != (self.count(d),):
                raise ValidationError(f"in_K[{d}] has wrong length")
        self._check_K_closed()
        self.collapses = collapses
        self.ambient = None if ambient is None or len(ambient) == 0 else np.asarray(ambient, dtype=np.int64)
        self._bd = {}
        self._cache = {}

    # -- construction -----------------------------------------------------
    def _dense(self, s):
        try:
            return np.vectorize(self._vpos.__getitem__, otypes=[np.int64])(s) if s.size else s.astype(np.int64)
        except KeyError as exc:
            raise MissingFace(f"unknown vertex id {exc.args[0]}") from None

    def _keys(self, dense):
        n0 = max(len(self.vertex_ids), 1)
        k = np.zeros(len(dense), dtype=np.int64)
        for j in range(dense.shape[1]):
            k = k * n0 + dense[:, j]
        return k

    def _build_faces(self):
        n0 = len(self.vertex_ids)
        if n0 ** 4 >= 2 ** 62:
            raise ValidationError("too many vertices for the key encoding")
        self.dense = [np.arange(n0, dtype=np.int64)[:, None]]
        self.faces = [None]
        self.face_signs = [None]
        keys_prev = np.arange(n0, dtype=np.int64)
        for d in (1, 2, 3):
            s = self.simplices[d]
            if len(s) and np.any(np.diff(s, axis=1) <= 0):
                bad = int(np.flatnonzero(np.any(np.diff(s, axis=1) <= 0, axis=1))[0])
                raise NonSortedTuple(f"{d}-simplex {s[bad].tolist()} is not strictly sorted")
            dn = self._dense(s)
            self.dense.append(dn)
            keys = self._keys(dn)
            uk, cnt = np.unique(keys, return_counts=True)
            if np.any(cnt > 1):
                raise DuplicateSimplex(f"duplicate {d}-simplex")
            order = np.argsort(keys_prev, kind="stable")
            sorted_prev = keys_prev[order]
            fidx = np.zeros((len(s), d + 1), dtype=np.int64)
            for i in range(d + 1):
                fk = self._keys(np.delete(dn, i, axis=1))
                pos = np.searchsorted(sorted_prev, fk)
                pos = np.minimum(pos, max(len(sorted_prev) - 1, 0))
                ok = (len(sorted_prev) > 0) & (sorted_prev[pos] == fk) if len(fk) else np.ones(0, bool)
                if len(fk) and not np.all(ok):
                    bad = int(np.flatnonzero(~ok)[0])
                    face = np.delete(s[bad], i).tolist()
                    raise MissingFace(f"face {face} of {d}-simplex {s[bad].tolist()} is missing")
                fidx[:, i] = order[pos] if len(fk) else 0
            self.faces.append(fidx)
            self.face_signs.append(np.tile(_face_signs(d), (len(s), 1)))
            keys_prev = keys

    def _check_K_closed(self):
        for d in (1, 2, 3):
            rows = np.flatnonzero(self.in_K[d])
            if len(rows) == 0:
                continue
            f = self.faces[d][rows]
            bad = ~self.in_K[d - 1][f]
            if np.any(bad):
                r = rows[np.flatnonzero(bad.any(axis=1))[0]]
                raise KNotFaceClosed(f"{d}-simplex {self.simplices[d][r].tolist()} is in K but a face is not")

    # -- queries ----------------------------------------------------------
    def count(self, d, scope="X"):
        if scope == "K":
            return int(self.in_K[d].sum())
        return len(self.simplices[d])

    def counts(self, scope="X"):
        return tuple(self.count(d, scope) for d in range(4))

    def k_index(self, d):
        """Dense X-indices of the K d-simplices (K-local order)."""
        key = ("kidx", d)
        if key not in self._cache:
            self._cache[key] = np.flatnonzero(self.in_K[d])
        return self._cache[key]

    def index_of(self, d, verts):
        """Dense index of the simplex with the given vertex ids (or None)."""
        key = ("lookup", d)
        if key not in self._cache:
            self._cache[key] = {tuple(int(v) for v in row): i for i, row in enumerate(self.simplices[d])}
        return self._cache[key].get(tuple(sorted(int(v) for v in verts)))

    def boundary_matrix(self, d):
        """Sparse d_d over all of X (rows (d-1)-simplices)."""
        if d < 1 or d > 3:
            raise DimOutOfRange(f"boundary dimension {d} not in 1..3")
        if d not in self._bd:
            n = self.count(d)
            rows = self.faces[d].ravel()
            cols = np.repeat(np.arange(n), d + 1)
            vals = self.face_signs[d].ravel()
            self._bd[d] = sp.csr_matrix((vals, (rows, cols)), shape=(self.count(d - 1), n), dtype=np.int64)
        return self._bd[d]

    def boundary(self, d, scope="X", row_mask=None, col_mask=None):
        """BoundaryOp for d_d on scope ``X``/``K``, or on explicit masks (scope ``T``)."""
        B = self.boundary_matrix(d)
        if scope == "K":
            row_mask, col_mask = self.in_K[d - 1], self.in_K[d]
        elif scope not in SCOPES:
            raise ScopeMismatch(f"unknown scope {scope!r}")
        if row_mask is not None:
            B = B[np.flatnonzero(row_mask)]
        if col_mask is not None:
            B = B[:, np.flatnonzero(col_mask)]
        return BoundaryOp(d, B, scope)

    def restrict(self, x, d, axis=0):
        """X-indexed d-chain -> K-indexed."""
        return np.take(x, self.k_index(d), axis=axis)

    def include(self, x, d):
        """K-indexed d-chain -> X-indexed (zero extension)."""
        x = np.asarray(x)
        out = np.zeros((self.count(d),) + x.shape[1:], dtype=x.dtype)
        out[self.k_index(d)] = x
        return out

    def subcomplex_K(self):
        """K as a stand-alone complex (all flags set)."""
        idx = [self.k_index(d) for d in range(4)]
        return EmbeddedComplex(self.vertex_ids[idx[0]], self.coords[idx[0]],
                               [None] + [self.simplices[d][idx[d]] for d in (1, 2, 3)])

    def __repr__(self):
        return f"EmbeddedComplex(X={self.counts('X')}, K={self.counts('K')})"


def laplacian_apply(cx, which, x, scope=None):
    """Apply L1, L1_up, L1_down or L0 of scope ``K`` or ``X`` to a chain."""
    if isinstance(x, Chain):
        vals, scope = x.values, x.scope
        dim = x.dim
    else:
        vals = np.asarray(x)
        scope = scope or "X"
        dim = 0 if which == "L0" else 1
    need = 0 if which == "L0" else 1
    if which not in ("L1", "L1_up", "L1_down", "L0"):
        raise ValueError(f"unknown Laplacian {which!r}")
    if dim != need or scope not in ("K", "X") or vals.shape[0] != cx.count(need, scope):
        raise ScopeMismatch(f"{which} needs a {need}-chain on K or X matching the complex")
    if which == "L0":
        B1 = cx.boundary(1, scope)
        out = B1.apply(B1.apply_T(vals))
    else:
        out = 0
        if which in ("L1", "L1_up"):
            B2 = cx.boundary(2, scope)
            out = out + B2.apply(B2.apply_T(vals))
        if which in ("L1", "L1_down"):
            B1 = cx.boundary(1, scope)
            out = out + B1.apply_T(B1.apply(vals))
        if np.isscalar(out):
            out = np.zeros_like(vals)
    return Chain(need, out, scope) if isinstance(x, Chain) else out


def build_complex(raw):
    """Build an EmbeddedComplex from a parsed ``.scx`` dictionary."""
    verts = raw.get("vertices", [])
    if len(verts) == 0:
        raise ValidationError("complex has no vertices")
    varr = np.asarray(verts, dtype=float)
    ids = varr[:, 0].astype(np.int64)
    coords = varr[:, 1:4] if varr.shape[1] >= 4 else np.zeros((len(ids), 3))
    simp = raw.get("simplices", {})
    simplices = [None] + [simp.get(str(d), simp.get(d, [])) for d in (1, 2, 3)]
    cx = EmbeddedComplex(ids, coords, simplices, in_K=None,
                         collapses=raw.get("collapses"), ambient=raw.get("ambient_tets"))
    refs = raw.get("in_K")
    if refs is not None:
        in_K = [np.zeros(cx.count(d), bool) for d in range(4)]
        for d, i in refs:
            if not (0 <= d <= 3 and 0 <= i < cx.count(d)):
                raise ValidationError(f"in_K reference ({d}, {i}) out of range")
            in_K[d][i] = True
        cx.in_K = in_K
        cx._cache.clear()
        cx._check_K_closed()
    return cx


def to_raw(cx, collapses=None):
    """Serialize to the ``.scx`` dictionary."""
    refs = [[d, int(i)] for d in range(4) for i in np.flatnonzero(cx.in_K[d])]
    raw = {
        "vertices": [[int(v), *map(float, c)] for v, c in zip(cx.vertex_ids, cx.coords)],
        "simplices": {str(d): cx.simplices[d].tolist() for d in (1, 2, 3)},
        "in_K": refs,
        "collapses": collapses if collapses is not None else cx.collapses,
        "ambient_tets": [] if cx.ambient is None else cx.ambient.tolist(),
    }
    return raw
