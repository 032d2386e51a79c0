"""Oracle audits of a prepared solver context: Loewner sandwiches and norm bounds.

Every entry lists the measured value next to the bound it is checked against.
"""
import numpy as np

from .boundary import helper_identities_audit
from .chain_ops import norm_estimates, operator_norm
from .oracle import DenseHodge, loewner_check, materialize, pinv_sym


def _lw(A, B, tol):
    r = loewner_check(A, B, tol)
    return {"min_eig": r.min_eig, "tol": tol, "ok": r.ok}


def projection_audit(ctx, eps=0.01, tol=1e-9):
    """Materialized Pi~_cbd, Pi~_cyc, Pi~_hr, Pi~_bd against exact projections."""
    D = DenseHodge(ctx.cx, "K", cap=ctx.cfg["oracle.dense_cap"])
    n = ctx.n1
    I = np.eye(n)
    out = {}
    cbd = materialize(ctx.graph.proj_cbd_fn(eps), n)
    out["cbd"] = {"lower": _lw((1 - eps) * D.cbd, cbd, tol), "upper": _lw(cbd, D.cbd, tol)}
    cyc = materialize(ctx.graph.proj_cyc_fn(eps), n)
    out["cyc"] = {"lower": _lw((1 - eps) * D.cyc, cyc, tol), "upper": _lw(cyc, D.cyc, tol)}
    H = ctx.harmonic(eps)
    hr = H.G @ H.G.T
    out["hr"] = {"lower": _lw(D.hr - eps * I, hr, tol), "upper": _lw(hr, D.hr + eps * I, tol),
                 "error": float(np.linalg.norm(hr - D.hr, 2)) if n else 0.0}
    bd = materialize(ctx.proj_bd_op(eps), n)
    out["bd"] = {"lower": _lw((1 - eps) * D.bd, bd, tol), "upper": _lw(bd, (1 + eps) * D.bd, tol)}
    out["ok"] = all(v["lower"]["ok"] and v["upper"]["ok"] for v in out.values())
    return out


def solver_audit(ctx, eps=0.05, tol=1e-9):
    """eig(M~ - (1-eps) L1^+) >= -tol and eig(L1^+ - M~) >= -tol for the materialized solver."""
    D = DenseHodge(ctx.cx, "K", cap=ctx.cfg["oracle.dense_cap"])
    n = ctx.n1
    M = materialize(lambda x: ctx.laplacian_solve(eps, x), n)
    Lp = pinv_sym(D.L1)
    sym = float(np.abs(M - M.T).max(initial=0.0))
    out = {"symmetry": sym, "symmetry_ok": sym <= 1e-10 * max(1.0, np.abs(M).max(initial=0.0)),
           "lower": _lw((1 - eps) * Lp, M, tol), "upper": _lw(M, Lp, tol)}
    out["ok"] = out["symmetry_ok"] and out["lower"]["ok"] and out["upper"]["ok"]
    return out


def norm_audit(ctx, dense_max=600, seed=0):
    """||S||, ||F||, ||C||, ||P_Gamma||, (I-P_T)(I-P_T)^T and lam_max(L1_up) against their bounds."""
    cx = ctx.cx
    lamX = ctx.spectral.get("lam_min_X")
    rep = norm_estimates(cx, ctx.fill, ctx.squeezer, ctx.C, lam_min_X=lamX,
                         alpha=ctx.cfg["bases.alpha"], seed=seed)
    pg = ctx.pg
    rep["P_gamma"] = {"estimate": pg.norm(), "bound": pg.norm_bound(),
                      "ok": pg.norm() <= pg.norm_bound() * (1 + 1e-9) + 1e-12}
    g = ctx.graph
    n1 = g.n_edges
    s = operator_norm(g.I_minus_PT, g.I_minus_PT_T, n1, dense_max=dense_max, seed=seed)
    rep["I_minus_PT_sq"] = {"estimate": s * s, "bound": float(n1) ** 2, "ok": s * s <= n1 ** 2 * (1 + 1e-9)}
    lam = ctx.spectral["lam_max_K"]
    rep["lam_max_up"] = {"estimate": lam, "bound": 3.0 * ctx.n2, "ok": lam <= 3.0 * ctx.n2 * (1 + 1e-9)}
    rep["ok"] = all(v["ok"] for k, v in rep.items() if isinstance(v, dict))
    return rep


def identities_audit(ctx):
    D = DenseHodge(ctx.cx, "K", cap=ctx.cfg["oracle.dense_cap"])
    return helper_identities_audit(ctx.graph, ctx.pg, D.bd)
