"""Seeded instance generators: collapsible X with a collapsing sequence and K c X."""
import itertools

import numpy as np
from scipy.spatial import Delaunay

from .collapse import greedy_collapse, normalize, validate
from .complex import EmbeddedComplex
from .embedding import orientation
from .errors import InvalidParams


def closure(tets=(), tris=(), edges=()):
    """Face-closed simplex lists (sorted, unique) from top simplices."""
    out = {1: [], 2: [], 3: []}
    tets = np.asarray(tets, dtype=np.int64).reshape(-1, 4)
    tris = np.asarray(tris, dtype=np.int64).reshape(-1, 3)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    tets = np.sort(tets, axis=1)
    out[3] = tets
    t = [np.sort(tris, axis=1)] + [tets[:, list(c)] for c in itertools.combinations(range(4), 3)]
    out[2] = np.unique(np.vstack(t), axis=0) if sum(len(a) for a in t) else np.zeros((0, 3), np.int64)
    e = [np.sort(edges, axis=1)] + [out[2][:, list(c)] for c in itertools.combinations(range(3), 2)]
    out[1] = np.unique(np.vstack(e), axis=0) if sum(len(a) for a in e) else np.zeros((0, 2), np.int64)
    return out


def mark_closure(cx, top):
    """K masks from a list of (dim, index) top simplices, closed downwards."""
    m = [np.zeros(cx.count(d), bool) for d in range(4)]
    for d, i in top:
        m[d][i] = True
    for d in (3, 2, 1):
        f = cx.faces[d][m[d]]
        m[d - 1][f.ravel()] = True
    return m


def set_K(cx, masks):
    cx.in_K = [np.asarray(a, bool).copy() for a in masks]
    cx._cache.clear()
    cx._check_K_closed()
    return cx


def from_tets(coords, tets, ids=None):
    coords = np.asarray(coords, float)
    ids = np.arange(len(coords)) if ids is None else np.asarray(ids)
    c = closure(tets=tets)
    return EmbeddedComplex(ids, coords, [None, c[1], c[2], c[3]])


def attach_collapse(cx, rng=None, attempts=20):
    """Find, normalize and validate a collapsing sequence; stores it on ``cx``."""
    rng = rng if rng is not None else np.random.default_rng(0)
    for a in range(attempts):
        seq, core = greedy_collapse(cx, rng=rng, interleave=a > 0)
        if sum(int(c.sum()) for c in core) == 1:
            seq = normalize(cx, seq)
            rep = validate(cx, seq)
            if rep:
                cx.collapses = seq.to_refs()
                return seq
    raise InvalidParams("could not find a collapsing sequence (complex may not be collapsible)")


def grid_box(nx, ny, nz, rng=None):
    """Freudenthal triangulation of an nx x ny x nz block of unit cubes (a 3-ball)."""
    if min(nx, ny, nz) < 1:
        raise InvalidParams("grid dimensions must be positive")
    ax = np.arange(nx + 1), np.arange(ny + 1), np.arange(nz + 1)
    Z, Y, X = np.meshgrid(ax[2], ax[1], ax[0], indexing="ij")
    coords = np.c_[X.ravel(), Y.ravel(), Z.ravel()].astype(float)
    sx, sy, sz = 1, nx + 1, (nx + 1) * (ny + 1)
    ci, cj, ck = np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij")
    base = (ci * sx + cj * sy + ck * sz).ravel()
    tets = []
    for perm in itertools.permutations((sx, sy, sz)):
        a = base
        b = a + perm[0]
        c = b + perm[1]
        d = c + perm[2]
        tets.append(np.c_[a, b, c, d])
    cx = from_tets(coords, np.vstack(tets))
    cx.grid_shape = (nx, ny, nz)
    attach_collapse(cx, rng)
    return cx


def grid_ball(k, rng=None):
    return grid_box(k, k, k, rng)


def ball(k, seed=0):
    """Delaunay triangulation of k + 3 random points (k = 1 gives one tetrahedron)."""
    if k < 1:
        raise InvalidParams("ball size must be >= 1")
    rng = np.random.default_rng(seed)
    for _ in range(50):
        pts = rng.random((k + 3, 3))
        try:
            tri = Delaunay(pts)
        except Exception:
            continue
        tets = np.sort(tri.simplices, axis=1)
        if len(tets) == 0 or np.any(orientation(pts, tets) == 0):
            continue
        used = np.unique(tets)
        if len(used) != len(pts):
            continue
        cx = from_tets(pts, tets)
        try:
            attach_collapse(cx, rng)
        except InvalidParams:
            continue
        return cx
    raise InvalidParams("failed to generate a collapsible Delaunay ball")


def plane_region(cx, z0, holes=(), region=None):
    """K = triangles of the horizontal grid plane z = z0 minus hole squares, closed."""
    if not hasattr(cx, "grid_shape"):
        raise InvalidParams("plane regions need a grid complex")
    P = cx.coords[cx.dense[2]]
    flat = np.all(P[:, :, 2] == z0, axis=1)
    sq = np.floor(P[:, :, :2].min(axis=1)).astype(int)
    keep = flat.copy()
    holes = {tuple(h) for h in holes}
    for i in np.flatnonzero(flat):
        s = tuple(sq[i])
        if s in holes or (region is not None and not (region[0] <= s[0] < region[1] and region[2] <= s[1] < region[3])):
            keep[i] = False
    return mark_closure(cx, [(2, i) for i in np.flatnonzero(keep)])


def annulus_in_ball(k=3, rng=None):
    """Grid ball with K an annulus in the middle plane (beta_1 = 1)."""
    if k < 3:
        raise InvalidParams("annulus_in_ball needs k >= 3")
    cx = grid_box(k, k, max(2, k - 1), rng)
    c = k // 2
    set_K(cx, plane_region(cx, max(2, k - 1) // 2, holes=[(c, c)]))
    return cx


def punctured_disk(g, rng=None):
    """Disk with g punctures in the middle plane of a (2g+1) x 3 x 2 grid block."""
    if g < 0:
        raise InvalidParams("number of punctures must be >= 0")
    nx = max(3, 2 * g + 1)
    cx = grid_box(nx, 3, 2, rng)
    set_K(cx, plane_region(cx, 1, holes=[(2 * i + 1, 1) for i in range(g)]))
    return cx


def stacked_annuli(beta, k=3, rng=None):
    """beta disjoint annuli on distinct planes of a k x k x (beta-1) block."""
    if beta < 1:
        raise InvalidParams("stacked_annuli needs beta >= 1")
    cx = grid_box(k, k, max(1, beta - 1), rng)
    c = k // 2
    m = [np.zeros(cx.count(d), bool) for d in range(4)]
    for z in range(beta):
        r = plane_region(cx, z, holes=[(c, c)])
        m = [a | b for a, b in zip(m, r)]
    return set_K(cx, m)


def random_subcomplex(cx, rng, p_tet=0.0, p_tri=0.1, p_edge=0.05):
    """Closure of a random selection of tetrahedra, triangles and edges."""
    top = [(3, i) for i in np.flatnonzero(rng.random(cx.count(3)) < p_tet)]
    top += [(2, i) for i in np.flatnonzero(rng.random(cx.count(2)) < p_tri)]
    top += [(1, i) for i in np.flatnonzero(rng.random(cx.count(1)) < p_edge)]
    if not top:
        top = [(0, 0)]
    return mark_closure(cx, top)


def tetrahedron():
    coords = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], float)
    cx = from_tets(coords, [[0, 1, 2, 3]])
    attach_collapse(cx)
    return cx


def two_tets():
    coords = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], float)
    cx = from_tets(coords, [[0, 1, 2, 3], [1, 2, 3, 4]])
    attach_collapse(cx)
    return cx


KINDS = ("ball", "annulus_in_ball", "punctured_disk", "grid_ball", "stacked_annuli")


def generate(kind, size=1, seed=0, beta=None):
    """Dispatch used by the CLI. ``size`` is k, g or the point count depending on kind."""
    rng = np.random.default_rng(seed)
    if kind == "ball":
        return ball(size, seed)
    if kind == "annulus_in_ball":
        return annulus_in_ball(max(3, size), rng)
    if kind == "punctured_disk":
        return punctured_disk(size, rng)
    if kind == "grid_ball":
        cx = grid_ball(size, rng)
        if size >= 3 and (beta is None or beta >= 1):
            c = size // 2
            set_K(cx, plane_region(cx, size // 2, holes=[(c, c)]))
        return cx
    if kind == "stacked_annuli":
        return stacked_annuli(beta or 1, max(3, size), rng)
    raise InvalidParams(f"unknown generator kind {kind!r}; choose from {KINDS}")
