"""Dual graphs of embedded 2-complexes and the intermediate complex T.

Nodes of a dual graph are the connected volumes of R^3 minus the scoped
triangles: ambient tetrahedra glued across triangles that are not in scope,
plus one outer node for the unbounded region. Each scoped triangle is a dual
edge; its incidence column carries o(tau) [d3 tau]_sigma on the side of each
tetrahedron tau, where o(tau) is the sign of the tetrahedron's volume in sorted
vertex order. Columns sum to zero, and a triangle with both sides in the same
volume is a self-loop with a zero column.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import H2Mismatch, NoAmbient, OrderInfeasible, SpanningTreeBlocked


@dataclass
class DualGraph:
    n_nodes: int
    outer: int
    tris: np.ndarray          # X-indices of the scoped triangles, one dual edge each
    inc: sp.csr_matrix        # n_nodes x len(tris), entries in {-1, 0, 1}
    tet_node: np.ndarray      # node of each ambient tetrahedron
    scope: str = "X"
    tet_is_X: np.ndarray = None   # ambient tetrahedron -> X index or -1

    @property
    def n_edges(self):
        return len(self.tris)

    def endpoints(self):
        """(u, v) per edge with inc[u]=+1, inc[v]=-1; loops give u = v = -1."""
        A = self.inc.tocoo()
        u = np.full(self.n_edges, -1)
        v = np.full(self.n_edges, -1)
        u[A.col[A.data > 0]] = A.row[A.data > 0]
        v[A.col[A.data < 0]] = A.row[A.data < 0]
        return u, v

    def is_connected(self):
        if self.n_nodes <= 1:
            return True
        u, v = self.endpoints()
        ok = u >= 0
        g = sp.coo_matrix((np.ones(ok.sum()), (u[ok], v[ok])), shape=(self.n_nodes,) * 2)
        return connected_components(g, directed=False)[0] == 1


def orientation(coords, tets):
    """Sign of det[p1-p0, p2-p0, p3-p0] per tetrahedron (rows of vertex positions)."""
    if len(tets) == 0:
        return np.zeros(0, np.int64)
    p = coords[tets]
    det = np.linalg.det(p[:, 1:] - p[:, :1])
    scale = np.abs(p[:, 1:] - p[:, :1]).max(axis=(1, 2)) ** 3 + 1e-300
    s = np.sign(det).astype(np.int64)
    s[np.abs(det) <= 1e-12 * scale] = 0
    return s


def _ambient(cx):
    """Ambient tetrahedra as (faces into X triangles or -1, signs, X tet index or -1, dense verts)."""
    if cx.ambient is None:
        n3 = cx.count(3)
        return cx.faces[3], cx.face_signs[3], np.arange(n3), cx.dense[3]
    amb = np.asarray(cx.ambient, dtype=np.int64)
    if np.any(np.diff(amb, axis=1) <= 0):
        raise NoAmbient("ambient tetrahedra must be sorted vertex tuples")
    try:
        dn = cx._dense(amb)
    except Exception as exc:
        raise NoAmbient(f"ambient tetrahedron uses unknown vertex: {exc}") from None
    tkeys = cx._keys(cx.dense[2])
    lookup = dict(zip(tkeys.tolist(), range(len(tkeys))))
    faces = np.full((len(amb), 4), -1, np.int64)
    for i in range(4):
        fk = cx._keys(np.delete(dn, i, axis=1)).tolist()
        faces[:, i] = [lookup.get(k, -1) for k in fk]
    signs = np.tile(np.array([1, -1, 1, -1]), (len(amb), 1))
    t3 = cx._keys(cx.dense[3])
    tl = dict(zip(t3.tolist(), range(len(t3))))
    xidx = np.array([tl.get(k, -1) for k in cx._keys(dn).tolist()], dtype=np.int64)
    if np.any(np.bincount(xidx[xidx >= 0], minlength=cx.count(3)) == 0) and cx.count(3):
        raise NoAmbient("ambient triangulation does not contain every tetrahedron of X")
    # non-X triangles of the ambient triangulation are keyed separately below
    return faces, signs, xidx, dn


def build_dual_graph(cx, scope="X"):
    faces, signs, xidx, dn = _ambient(cx)
    na = len(faces)
    n2 = cx.count(2)
    in_scope = np.ones(n2, bool) if scope == "X" else cx.in_K[2].copy()
    outer = na
    # side counts for X triangles
    flat = faces.ravel()
    tet_of = np.repeat(np.arange(na), 4)
    known = flat >= 0
    side_count = np.bincount(flat[known], minlength=n2)
    if np.any(side_count > 2):
        bad = int(np.flatnonzero(side_count > 2)[0])
        raise NoAmbient(f"triangle {cx.simplices[2][bad].tolist()} bounds more than two tetrahedra")
    # union-find over ambient tetrahedra + outer, across triangles not in scope
    rows, cols = [], []
    nscope = known & ~in_scope[np.where(known, flat, 0)]
    # X triangles not in scope
    tri = flat[nscope]
    tt = tet_of[nscope]
    order = np.argsort(tri, kind="stable")
    tri, tt = tri[order], tt[order]
    first = np.r_[True, tri[1:] != tri[:-1]] if len(tri) else np.zeros(0, bool)
    last = np.r_[tri[1:] != tri[:-1], True] if len(tri) else np.zeros(0, bool)
    pair = first & ~last
    rows += tt[pair].tolist()
    cols += tt[np.flatnonzero(pair) + 1].tolist()
    single = first & last
    rows += tt[single].tolist()
    cols += [outer] * int(single.sum())
    # ambient triangles that are not triangles of X are never in scope
    if not np.all(known):
        keys = {}
        for t, i in zip(*np.nonzero(~known)):
            k = tuple(np.delete(dn[t], i).tolist())
            keys.setdefault(k, []).append(t)
        for ts in keys.values():
            if len(ts) == 1:
                rows.append(ts[0])
                cols.append(outer)
            else:
                rows.append(ts[0])
                cols.append(ts[1])
    g = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(na + 1, na + 1))
    _, lab = connected_components(g, directed=False)
    # relabel so the outer node is 0 and the others follow first appearance
    _, first_idx, inv = np.unique(lab, return_index=True, return_inverse=True)
    rank = np.empty(len(first_idx), np.int64)
    perm = np.argsort(first_idx)
    rank[perm] = np.arange(len(first_idx))
    lab = rank[inv]
    o_lab = lab[outer]
    lab = np.where(lab == o_lab, 0, np.where(lab < o_lab, lab + 1, lab))
    n_nodes = int(lab.max()) + 1
    # incidence columns of scoped triangles
    tris = np.flatnonzero(in_scope)
    col_of = np.full(n2, -1)
    col_of[tris] = np.arange(len(tris))
    if na:
        ori = orientation(cx.coords, dn)
        if np.any(ori == 0):
            raise NoAmbient("degenerate (zero-volume) tetrahedron; orientation undefined")
    else:
        ori = np.zeros(0, np.int64)
    sel = known & in_scope[np.where(known, flat, 0)]
    c = col_of[flat[sel]]
    val = (ori[tet_of[sel]] * signs.ravel()[sel]).astype(np.int64)
    # coherence: a triangle with two ambient sides gets opposite contributions
    tot = np.bincount(c, weights=val, minlength=len(tris))
    cnt = np.bincount(c, minlength=len(tris))
    if np.any((cnt == 2) & (tot != 0)):
        raise NoAmbient("tetrahedron orientations are not coherent with the embedding")
    r = np.r_[lab[tet_of[sel]], np.zeros(len(tris), np.int64)]
    cc = np.r_[c, np.arange(len(tris))]
    vv = np.r_[val, -tot.astype(np.int64)]
    inc = sp.csr_matrix((vv, (r, cc)), shape=(n_nodes, len(tris)), dtype=np.int64)
    inc.eliminate_zeros()
    return DualGraph(n_nodes, 0, tris, inc, lab[:na], scope, xidx)


@dataclass
class IntermediateComplex:
    """T as a scope over X: all triangles of X except ``removed`` (D).

    ``removed`` and ``tets`` give the squeeze order: sigma_i = removed[i] is a
    face of the X tetrahedron tets[i].
    """
    tri_mask: np.ndarray
    removed: np.ndarray
    tets: np.ndarray
    n_components: int = 1
    checks: dict = field(default_factory=dict)

    @property
    def D(self):
        return self.removed


def _bfs_forest(n_nodes, u, v, edges, roots_first):
    """BFS discovery over an undirected multigraph; returns (child, parent edge) in order."""
    adj = [[] for _ in range(n_nodes)]
    for e, a, b in zip(edges.tolist(), u[edges].tolist(), v[edges].tolist()):
        adj[a].append((b, e))
        adj[b].append((a, e))
    seen = np.zeros(n_nodes, bool)
    child, pedge = [], []
    ncomp = 0
    for r in list(roots_first) + list(range(n_nodes)):
        if seen[r]:
            continue
        ncomp += 1
        seen[r] = True
        queue = [r]
        head = 0
        while head < len(queue):
            a = queue[head]
            head += 1
            for b, e in adj[a]:
                if not seen[b]:
                    seen[b] = True
                    queue.append(b)
                    child.append(b)
                    pedge.append(e)
    return np.array(child, np.int64), np.array(pedge, np.int64), ncomp


def build_T(cx, dual_X=None, strict=False, verify=None, dense_cap=2000):
    """Largest T with K c T c X and the same second homology as K (on 2-skeleta).

    D is the set of duals of a BFS spanning forest of the dual graph of X using
    only edges dual to triangles outside K; the outer component is rooted at the
    outer node. With ``strict`` a single spanning tree is required.
    """
    g = dual_X if dual_X is not None else build_dual_graph(cx, "X")
    u, v = g.endpoints()
    notK = ~cx.in_K[2][g.tris]
    usable = np.flatnonzero(notK & (u >= 0))
    child, pedge, ncomp = _bfs_forest(g.n_nodes, u, v, usable, [g.outer])
    if strict and ncomp > 1:
        raise SpanningTreeBlocked(f"{ncomp - 1} volume(s) are enclosed by triangles of K")
    removed = g.tris[pedge]
    node_tet = np.full(g.n_nodes, -1)
    amb = np.arange(len(g.tet_node))
    node_tet[g.tet_node] = amb
    counts = np.bincount(g.tet_node, minlength=g.n_nodes)
    tet_amb = node_tet[child]
    if np.any(counts[child] != 1) or np.any(tet_amb < 0):
        raise OrderInfeasible("a dual tree node is not a single tetrahedron of X")
    tets = g.tet_is_X[tet_amb] if g.tet_is_X is not None else tet_amb
    if np.any(tets < 0):
        raise OrderInfeasible("a dual tree node is an ambient tetrahedron outside X")
    mask = np.ones(cx.count(2), bool)
    mask[removed] = False
    T = IntermediateComplex(mask, removed, tets, ncomp)
    if verify is None:
        verify = sum(cx.counts("X")) <= dense_cap
    if verify:
        from .oracle import rank
        B = cx.boundary_matrix(2)
        bT = int(mask.sum()) - rank(B[:, np.flatnonzero(mask)].toarray())
        kk = cx.in_K[2]
        bK = int(kk.sum()) - rank(B[:, np.flatnonzero(kk)].toarray())
        T.checks["beta2_T"], T.checks["beta2_K"] = bT, bK
        if bT != bK:
            raise H2Mismatch(f"beta2(T) = {bT} but beta2(K) = {bK}")
    return T


def squeeze_order(cx, T):
    """(sigma_i, tau_i, sign of sigma_i in d3 tau_i), checked for feasibility."""
    sig, tet = T.removed, T.tets
    if len(sig) == 0:
        z = np.zeros(0, np.int64)
        return z, z, z
    f = cx.faces[3][tet]
    hit = f == sig[:, None]
    if not np.all(hit.sum(axis=1) == 1):
        i = int(np.flatnonzero(hit.sum(axis=1) != 1)[0])
        raise OrderInfeasible(f"step {i}: triangle is not a face of its tetrahedron")
    s = cx.face_signs[3][tet][hit]
    # other removed faces of tau_i must come later in the order
    pos = np.full(cx.count(2), -1)
    pos[sig] = np.arange(len(sig))
    p = pos[f]
    earlier = (p >= 0) & (p < np.arange(len(sig))[:, None])
    if np.any(earlier):
        i = int(np.flatnonzero(earlier.any(axis=1))[0])
        raise OrderInfeasible(f"step {i}: tetrahedron lost a facet earlier in the order")
    return sig.astype(np.int64), tet.astype(np.int64), s.astype(np.int64)
