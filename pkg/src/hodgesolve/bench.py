"""Timing helpers: the solver size ladder and compiled-vs-python kernel comparison."""
import time

import numpy as np

from . import generators, kernels
from .chain_ops import FillPlan, Squeezer
from .collapse import CollapsingSequence
from .embedding import build_T
from .graph_solver import SpanningForest
from .solver import SolverContext


def solve_ladder(sizes=(7, 11, 18), eps=0.05, seed=0, mode="practical", config=None, repeats=1):
    """Prepare + one laplacian_solve on grid_ball(k) with an annulus K (beta = 1)."""
    rows = []
    for k in sizes:
        cx = generators.generate("grid_ball", k, seed=seed)
        best = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            ctx = SolverContext.prepare(cx, eps, mode, config)
            t1 = time.perf_counter()
            b = np.random.default_rng(seed).standard_normal(ctx.n1)
            ctx.laplacian_solve(eps, b)
            t2 = time.perf_counter()
            if best is None or t2 - t0 < best[2]:
                best = (t1 - t0, t2 - t1, t2 - t0, ctx)
        ctx = best[3]
        rows.append({
            "k": k, "n": sum(cx.counts("X")), "n_K": sum(cx.counts("K")), "beta": ctx.beta,
            "t_prepare": best[0], "t_solve": best[1], "t_total": best[2],
            "cheb_degree_K": ctx.graph.sdd.last_degree, "cheb_degree_dual": ctx.dual_graph.sdd.last_degree,
        })
    for a, b in zip(rows, rows[1:]):
        b["growth"] = b["t_total"] / a["t_total"]
        b["size_ratio"] = b["n"] / a["n"]
    return rows


def _time(f, repeats):
    best = float("inf")
    for _ in range(repeats):
        t = time.perf_counter()
        f()
        best = min(best, time.perf_counter() - t)
    return best


def kernel_bench(k=10, block=8, repeats=3, seed=0):
    """Best-of-``repeats`` time of each sweep under every available backend."""
    cx = generators.generate("grid_ball", k, seed=seed)
    fill = FillPlan(cx, CollapsingSequence.from_refs(cx.collapses))
    sq = Squeezer(cx, build_T(cx, verify=False))
    forest = SpanningForest(cx.boundary_matrix(1))
    rng = np.random.default_rng(seed)
    g = cx.boundary_matrix(2) @ rng.integers(-2, 3, (cx.count(2), block))
    x2 = rng.standard_normal((cx.count(2), block))
    y1 = rng.standard_normal((cx.count(1), block))
    d0 = cx.boundary_matrix(1) @ y1
    cases = {
        "fill": lambda: fill.apply(g),
        "fill_adjoint": lambda: fill.adjoint(x2),
        "squeeze": lambda: sq.apply(x2),
        "squeeze_adjoint": lambda: sq.adjoint(x2),
        "tree": lambda: forest.solve(d0),
        "tree_adjoint": lambda: forest.solve_T(y1),
    }
    prev = kernels.current()
    out = {"n": sum(cx.counts()), "block": block, "backends": {}}
    try:
        for name in kernels.available():
            kernels.use(name)
            out["backends"][name] = {c: _time(f, repeats) for c, f in cases.items()}
    finally:
        kernels.use(prev)
    b = out["backends"]
    if "compiled" in b and "python" in b:
        out["speedup"] = {c: b["python"][c] / max(b["compiled"][c], 1e-12) for c in cases}
    return out
