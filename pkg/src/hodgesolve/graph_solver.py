"""Graph-Laplacian primitives on an oriented incidence matrix (nodes x edges).

The same code serves the 1-skeleton of K (incidence d1[K]) and the dual graph
of K (incidence of volumes against triangles). SDD solves use Chebyshev
iteration of fixed degree preconditioned by the Laplacian of a BFS spanning
forest. A fixed polynomial makes every approximate projection an exactly
linear, symmetric operator with a certified Loewner sandwich:
(1 - eta) L^+ <= Z <= (1 + eta) L^+ whenever the preconditioned spectrum lies in
the interval used, and the interval [1, total stretch] is always valid.
"""
import math

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components
from scipy.sparse.linalg import LinearOperator, eigsh

from . import kernels
from .config import as_config
from .errors import IterationStalled, SolveDiverged


def linop(f, n, ft=None, dtype=float):
    """Wrap a block-capable map as a square scipy LinearOperator."""
    ft = ft or f
    return LinearOperator((n, n), matvec=f, matmat=f, rmatvec=ft, rmatmat=ft, dtype=dtype)


class SpanningForest:
    """Rooted spanning forest of a graph given by its incidence matrix.

    Trees are BFS trees from a pseudo-center of every component (a cheap
    low-stretch heuristic), or are built from ``tree_edges`` when given.
    """

    def __init__(self, inc, tree_edges=None, roots=None):
        inc = sp.csc_matrix(inc)
        self.inc = inc
        n, m = inc.shape
        self.n_nodes, self.n_edges = n, m
        A = inc.tocoo()
        u = np.full(m, -1)
        v = np.full(m, -1)
        u[A.col[A.data > 0]] = A.row[A.data > 0]
        v[A.col[A.data < 0]] = A.row[A.data < 0]
        self.u, self.v = u, v
        real = np.flatnonzero(u >= 0)
        if tree_edges is not None:
            real = np.asarray(tree_edges, dtype=np.int64)
        adj = sp.coo_matrix((np.ones(len(real)), (u[real], v[real])), shape=(n, n)).tocsr()
        adj = ((adj + adj.T) > 0).astype(np.int8)
        ncomp, lab = connected_components(adj, directed=False)
        self.n_components, self.label = ncomp, lab
        # first edge id for each unordered endpoint pair
        a, b = np.minimum(u[real], v[real]), np.maximum(u[real], v[real])
        keys = a.astype(np.int64) * n + b
        uk, first = np.unique(keys, return_index=True)
        ekeys, eids = uk, real[first]

        order, parent, roots_out = [], np.full(n, -1), []
        depth = np.zeros(n, np.int64)
        roots = {} if roots is None else dict(roots)  # component label -> root
        for c in range(ncomp):
            members = np.flatnonzero(lab == c)
            r = roots.get(c)
            if r is None:
                r = self._center(adj, members[0]) if len(members) > 2 else members[0]
            o, pred = breadth_first_order(adj, r, directed=False, return_predecessors=True)
            roots_out.append(r)
            parent[o[1:]] = pred[o[1:]]
            order.append(o[1:])
        order = np.concatenate(order) if order else np.zeros(0, np.int64)
        for x in order:  # BFS order: parents come first
            depth[x] = depth[parent[x]] + 1
        self.order = np.ascontiguousarray(order, dtype=np.int64)
        self.parent = np.where(parent < 0, 0, parent).astype(np.int64)
        self.roots = np.array(roots_out, dtype=np.int64)
        self.depth = depth
        pk = np.minimum(order, parent[order]).astype(np.int64) * n + np.maximum(order, parent[order])
        pedge = np.full(n, 0, np.int64)
        pedge[order] = eids[np.searchsorted(ekeys, pk)]
        self.pedge = pedge
        inc_csc = inc
        self.sc = np.zeros(n, np.int64)
        self.sp = np.zeros(n, np.int64)
        self.sc[order] = np.asarray(inc_csc[order, pedge[order]]).ravel()
        self.sp[order] = np.asarray(inc_csc[parent[order], pedge[order]]).ravel()
        self.tree_edges = pedge[order]
        self.is_tree = np.zeros(m, bool)
        self.is_tree[self.tree_edges] = True
        sizes = np.bincount(lab, minlength=ncomp)
        self.sizes = sizes
        self._avg = sp.csr_matrix((np.ones(n), (lab, np.arange(n))), shape=(ncomp, n))
        self._stats = None

    @staticmethod
    def _center(adj, start):
        o, pred = breadth_first_order(adj, start, directed=False, return_predecessors=True)
        a = o[-1]
        o, pred = breadth_first_order(adj, a, directed=False, return_predecessors=True)
        path = [o[-1]]
        while pred[path[-1]] >= 0:
            path.append(pred[path[-1]])
        return path[len(path) // 2]

    def center(self, r):
        """Subtract the per-component mean."""
        mean = (self._avg @ r) / (self.sizes[:, None] if r.ndim == 2 else self.sizes)
        return r - mean[self.label]

    def solve(self, d):
        """Tree flow y (edge vector, tree support) with inc @ y = d, for d summing to 0 per component."""
        d = np.asarray(d)
        acc, flat = kernels.block(d, kernels.work_dtype(d))
        y = np.zeros((self.n_edges, acc.shape[1]), dtype=acc.dtype)
        kernels.call("tree_forward", acc, y, self.order, self.parent, self.pedge, self.sc, self.sp)
        return y[:, 0] if flat else y

    def solve_T(self, y):
        y = np.asarray(y)
        yb, flat = kernels.block(y, kernels.work_dtype(y))
        ab = np.zeros((self.n_nodes, yb.shape[1]), dtype=yb.dtype)
        kernels.call("tree_adjoint", yb, ab, self.order, self.parent, self.pedge, self.sc, self.sp)
        return ab[:, 0] if flat else ab

    def p_tree(self, x):
        """P_T x: the unique tree-supported chain with the same boundary as x."""
        return self.solve(self.inc @ np.asarray(x))

    def p_tree_T(self, y):
        return self.inc.T @ self.solve_T(y)

    def path_lengths(self):
        """Tree path length between the endpoints of every edge (0 for loops)."""
        u, v = self.u.copy(), self.v.copy()
        loop = u < 0
        u[loop] = 0
        v[loop] = 0
        du, dv = self.depth[u].copy(), self.depth[v].copy()
        length = np.zeros(self.n_edges, np.int64)
        a, b = u.copy(), v.copy()
        while True:
            diff = a != b
            if not diff.any():
                break
            up_a = diff & (du >= dv)
            up_b = diff & (dv > du)
            a[up_a] = self.parent[a[up_a]]
            du[up_a] -= 1
            b[up_b] = self.parent[b[up_b]]
            dv[up_b] -= 1
            length += up_a | up_b
        length[loop] = 0
        return length

    def stats(self):
        if self._stats is None:
            L = self.path_lengths()
            nt = ~self.is_tree
            self._stats = {
                "total_stretch": float(np.sum(L[self.is_tree]) + np.sum(L[nt])),
                "frob2_I_minus_PT": float(np.sum(1 + L[nt])),
                "max_depth": int(self.depth.max(initial=0)),
            }
        return self._stats


def chebyshev_degree(eta, a, b):
    """Smallest m with 1/T_m((b+a)/(b-a)) <= eta."""
    if b <= a * (1 + 1e-12):
        return 0
    s = (b + a) / (b - a)
    return max(1, math.ceil(math.acosh(1.0 / eta) / math.acosh(s)))


class SddSolver:
    """Approximate pseudo-inverse of L = inc inc^T, preconditioned by the forest Laplacian."""

    def __init__(self, inc, forest=None, config=None):
        self.cfg = as_config(config)
        self.inc = sp.csr_matrix(inc, dtype=float)
        self.incT = self.inc.T.tocsr()
        self.forest = forest if forest is not None else SpanningForest(inc)
        self.L = (self.inc @ self.incT).tocsr()
        self.n = self.L.shape[0]
        self._interval = None
        self.last_degree = 0
        self.calls = 0

    def Minv(self, r):
        f = self.forest
        return f.center(f.solve_T(f.solve(f.center(r))))

    def estimate_lambda_max(self):
        """Ritz estimate of the largest eigenvalue of M^+ L (symmetrized on tree edges)."""
        f = self.forest
        te = f.tree_edges
        nt = len(te)
        if nt == 0:
            return 1.0

        def R(y):
            Y = np.zeros((f.n_edges,) + y.shape[1:])
            Y[te] = y
            return f.solve(self.L @ f.solve_T(Y))[te]

        if nt <= 300:
            from .oracle import materialize
            w = np.linalg.eigvalsh(materialize(R, nt))
            return float(w.max())
        try:
            w = eigsh(linop(R, nt), k=1, which="LA", tol=1e-3, maxiter=2000,
                      v0=np.ones(nt), return_eigenvectors=False)
        except Exception as exc:
            raise IterationStalled(f"Lanczos estimate failed: {exc}") from None
        return float(w.max())

    def interval(self):
        if self._interval is None:
            st = self.forest.stats()["total_stretch"]
            mode = self.cfg["solver.interval"]
            if mode == "auto":
                mode = "certified" if self.forest.n_edges <= 20000 else "estimated"
            if mode == "certified":
                b = max(st, 1.0)
            else:
                b = min(max(st, 1.0), 1.25 * self.estimate_lambda_max())
            self._interval = (1.0, b, mode)
        return self._interval

    def degree(self, eta):
        a, b, _ = self.interval()
        eta = eta / float(self.cfg["solver.tol_map"] or 1.0)
        m = chebyshev_degree(max(eta, 1e-300), a, b)
        cap = int(self.cfg["solver.max_iters"])
        if m > cap:
            raise SolveDiverged(f"Chebyshev degree {m} exceeds solver.max_iters = {cap}")
        return m

    def Z(self, r, eta):
        """Fixed-degree Chebyshev approximation of L^+ r with relative accuracy eta."""
        self.calls += 1
        r = self.forest.center(np.asarray(r, dtype=float))
        a, b, _ = self.interval()
        m = self.degree(eta)
        self.last_degree = m
        z = self.Minv(r)
        if m == 0 or self.forest.n_edges == 0:
            return z if self.forest.n_edges else np.zeros_like(r)
        theta, delta = (b + a) / 2, (b - a) / 2
        s1 = theta / delta
        rho = 1.0 / s1
        d = z / theta
        x = np.zeros_like(r)
        res = r
        for _ in range(m):
            x = x + d
            res = res - self.L @ d
            z = self.Minv(res)
            rho_new = 1.0 / (2 * s1 - rho)
            d = rho_new * rho * d + (2 * rho_new / delta) * z
            rho = rho_new
        return x

    def solve(self, b, tol=1e-10, maxiter=None):
        """PCG solve of L x = b (b projected onto im L); residual <= tol * ||b||."""
        b = self.forest.center(np.asarray(b, dtype=float))
        maxiter = maxiter or int(self.cfg["solver.max_iters"])
        nb = np.linalg.norm(b)
        x = np.zeros_like(b)
        if nb == 0:
            return x
        r = b.copy()
        z = self.Minv(r)
        p = z.copy()
        rz = r @ z
        for it in range(maxiter):
            Ap = self.L @ p
            alpha = rz / (p @ Ap)
            x += alpha * p
            r -= alpha * Ap
            if np.linalg.norm(r) <= tol * nb:
                self.last_iters = it + 1
                return x
            z = self.Minv(r)
            rz_new = r @ z
            p = z + (rz_new / rz) * p
            rz = rz_new
        raise SolveDiverged(f"PCG did not reach tolerance {tol} in {maxiter} iterations")


class GraphOps:
    """Approximate projections and solvers attached to one oriented graph."""

    def __init__(self, inc, tree_edges=None, config=None, roots=None):
        self.cfg = as_config(config)
        self.inc = sp.csr_matrix(inc, dtype=np.int64)
        self.incf = self.inc.astype(float)
        self.incTf = self.incf.T.tocsr()
        self.forest = SpanningForest(self.inc, tree_edges, roots)
        self.sdd = SddSolver(self.inc, self.forest, self.cfg)
        self.n_nodes, self.n_edges = self.inc.shape

    # tree operator
    def p_tree(self, x):
        return self.forest.p_tree(x)

    def p_tree_T(self, y):
        return self.forest.p_tree_T(y)

    def I_minus_PT(self, x):
        return x - self.forest.p_tree(x)

    def I_minus_PT_T(self, x):
        return x - self.forest.p_tree_T(x)

    # projections
    def proj_cbd_fn(self, eps):
        """One-sided (1 - eps) Pi_cbd <= Pi~ <= Pi_cbd."""
        eta = eps / (2.0 - eps)

        def f(x):
            x = np.asarray(x, dtype=float)
            return self.incTf @ self.sdd.Z(self.incf @ x, eta) / (1.0 + eta)
        return f

    def proj_cbd(self, eps, x=None):
        f = self.proj_cbd_fn(eps)
        return f(x) if x is not None else linop(f, self.n_edges)

    def cyc_scale(self):
        return max(self.forest.stats()["frob2_I_minus_PT"], 1.0)

    def proj_cyc_fn(self, eps):
        """One-sided (1 - eps) Pi_cyc <= Pi~ <= Pi_cyc via the tree: (I-P)(I-Pi~_cbd)(I-P)^T."""
        F2 = self.cyc_scale()
        e2 = eps / F2
        cbd = self.proj_cbd_fn(e2)

        def f(x):
            y = self.I_minus_PT_T(np.asarray(x, dtype=float))
            return self.I_minus_PT(y - cbd(y)) / (1.0 + e2 * F2)
        return f

    def proj_cyc(self, eps, x=None):
        f = self.proj_cyc_fn(eps)
        return f(x) if x is not None else linop(f, self.n_edges)

    def proj_cyc_complement(self, eps, x=None):
        """I - Pi~_cbd(eps): complementary but only input-relative."""
        cbd = self.proj_cbd_fn(eps)

        def f(v):
            v = np.asarray(v, dtype=float)
            return v - cbd(v)
        return f(x) if x is not None else linop(f, self.n_edges)

    def kappa0_bound(self):
        """Certified bound on the condition number of L restricted to its range."""
        deg = np.asarray(abs(self.inc).sum(axis=1)).ravel()
        lam_max = 2.0 * deg.max(initial=0)
        f = self.forest
        worst = 0.0
        for c in range(f.n_components):
            nc = f.sizes[c]
            if nc < 2:
                continue
            diam = 2 * max(int(f.depth[f.label == c].max()), 1)
            worst = max(worst, nc * diam / 4.0)
        return max(lam_max * worst, 1.0)

    def down_solve_fn(self, eps):
        """(1 - eps)(L1_down)^+ <= D~ <= (L1_down)^+ with D~ = d^T Z Z d / (1 + b)^2."""
        k0 = self.kappa0_bound()
        b = eps / 4.0
        eta = b / math.sqrt(k0)

        def f(x):
            x = np.asarray(x, dtype=float)
            z = self.sdd.Z(self.incf @ x, eta)
            return self.incTf @ self.sdd.Z(z, eta) / (1.0 + b) ** 2
        return f

    def down_solve(self, eps, x=None):
        f = self.down_solve_fn(eps)
        return f(x) if x is not None else linop(f, self.n_edges)
