import numpy as np

from hodgesolve import audit, bench


def test_projection_audit(ctx_pd2):
    r = audit.projection_audit(ctx_pd2, 0.01)
    assert r["ok"], r
    assert r["hr"]["error"] <= 0.01


def test_solver_audit(ctx_annulus):
    r = audit.solver_audit(ctx_annulus, 0.05)
    assert r["ok"] and r["symmetry_ok"]


def test_norm_and_identity_audits(ctx_pd2):
    r = audit.norm_audit(ctx_pd2)
    assert r["ok"]
    for k in ("S", "F", "C", "P_gamma", "I_minus_PT_sq", "lam_max_up"):
        assert r[k]["estimate"] <= r[k]["bound"]
    assert audit.identities_audit(ctx_pd2)["ok"]


def test_kernel_bench_small():
    r = bench.kernel_bench(k=4, block=2, repeats=1)
    assert r["n"] == 125 + 604 + 864 + 384
    assert set(r["backends"]) >= {"python"}


def test_solve_ladder_small():
    rows = bench.solve_ladder((4, 5))
    assert [r["k"] for r in rows] == [4, 5] and all(r["beta"] == 1 for r in rows)
    assert rows[1]["size_ratio"] > 1 and np.isfinite(rows[1]["growth"])
