"""hodgesolve command-line driver.

Exit codes: 0 ok, 2 validation failure, 3 verification failure, 4 I/O error.
"""
import argparse
import logging
import sys
import time

import numpy as np

from . import audit, bench, generators, io
from .bases import delta_independence_report
from .collapse import CollapsingSequence, validate
from .complex import Chain
from .config import Config
from .errors import HodgeError, IOFailure, ValidationError, VerificationError
from .harmonic import gs_perturbation_audit
from .oracle import exact_hodge

def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--complex", help="input .scx file")
    common.add_argument("--chain", help="input chain JSON file")
    common.add_argument("--eps", type=float, default=0.05)
    common.add_argument("--mode", choices=("practical", "theory"), default="practical")
    common.add_argument("--verify", action="store_true", help="run oracle checks (desk scale)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--deterministic", action="store_true")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--config", help="JSON config overrides")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hodgesolve", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    g = sub.add_parser("generate", parents=[common], help="write a generated instance")
    g.add_argument("kind", choices=generators.KINDS)
    g.add_argument("--size", type=int, default=3)
    g.add_argument("--beta", type=int)
    sub.add_parser("validate", parents=[common], help="check a complex and its collapsing sequence")
    sub.add_parser("bases", parents=[common], help="homology and cohomology bases")
    sub.add_parser("harmonic-basis", parents=[common], help="approximate orthonormal harmonic basis")
    sub.add_parser("hodge", parents=[common], help="approximate Hodge decomposition of a chain")
    sub.add_parser("solve", parents=[common], help="approximately solve L1 x = b")
    a = sub.add_parser("audit", parents=[common], help="norm-bound and Gram-Schmidt audits")
    a.add_argument("--trials", type=int, default=100)
    b = sub.add_parser("bench", parents=[common], help="runtime over a grid_ball ladder")
    b.add_argument("--sizes", type=int, nargs="+", default=[7, 11, 18])
    b.add_argument("--kernels", action="store_true", help="compare kernel backends instead")
    return p


def _config(args):
    cfg = Config.load(args.config) if args.config else Config()
    if args.deterministic:
        cfg.set("solver.deterministic", True)
    return cfg


def _complex(args):
    if not args.complex:
        raise ValidationError("--complex is required")
    return io.read_complex(args.complex)


def _chain(args, cx):
    if not args.chain:
        raise ValidationError("--chain is required")
    ch = io.read_chain(args.chain, cx)
    if ch.dim != 1 or ch.scope != "K":
        raise ValidationError("expected a 1-chain on K")
    return ch.values


def _context(args, cx, cfg):
    from .solver import SolverContext
    return SolverContext.prepare(cx, args.eps, args.mode, cfg, np.random.default_rng(args.seed))


def _expected_beta(args):
    if args.kind == "punctured_disk":
        return args.size
    if args.kind == "stacked_annuli":
        return args.beta or 1
    if args.kind == "annulus_in_ball" or (args.kind == "grid_ball" and args.size >= 3):
        return 0 if args.beta == 0 else 1
    return None


def cmd_generate(args, cfg, rep):
    if not args.out:
        raise ValidationError("generate needs --out")
    if args.size < 1:
        raise ValidationError("size must be positive")
    cx = generators.generate(args.kind, args.size, args.seed, args.beta)
    rep["counts_X"], rep["counts_K"] = cx.counts("X"), cx.counts("K")
    ok = bool(validate(cx, CollapsingSequence.from_refs(cx.collapses)))
    rep["collapse_valid"] = ok
    if not ok:
        raise VerificationError("generated collapsing sequence does not validate")
    if sum(cx.counts("K")) <= cfg["oracle.dense_cap"]:
        from .oracle import betti
        want = _expected_beta(args)
        got = betti(cx, 1, "K")
        rep["beta1_K"] = {"measured": got, "requested": want}
        if want is not None and got != want:
            raise VerificationError(f"beta1(K) = {got}, requested {want}")
    io.write_complex(cx, args.out)
    rep["written"] = args.out
    return rep


def cmd_validate(args, cfg, rep):
    cx = _complex(args)
    rep["counts_X"], rep["counts_K"] = cx.counts("X"), cx.counts("K")
    if cx.collapses is None:
        raise ValidationError("complex carries no collapsing sequence")
    r = validate(cx, CollapsingSequence.from_refs(cx.collapses))
    rep["collapse"] = {"ok": r.ok, "index": r.index, "reason": r.reason}
    if not r.ok:
        raise ValidationError(f"invalid collapsing sequence at step {r.index}: {r.reason}")
    return rep


def cmd_bases(args, cfg, rep):
    from .solver import SolverContext
    cx = _complex(args)
    ctx = SolverContext.prepare(cx, args.eps, "practical", cfg, np.random.default_rng(args.seed))
    rep["homology"] = {"chains": ctx.gamma.chains.T.tolist(), **ctx.gamma.diagnostics}
    rep["cohomology"] = {"chains": ctx.P.chains.T.tolist(), **ctx.P.diagnostics}
    if args.verify:
        d = delta_independence_report(cx, ctx.P, ctx.spectral.get("lam_min_X"),
                                      ctx.spectral.get("lam_min_L2up_X"), cfg["bases.alpha"])
        rep["delta_independence"] = d
        if not d["ok"]:
            raise VerificationError("delta-independence bound violated")
    return rep


def cmd_harmonic(args, cfg, rep):
    cx = _complex(args)
    ctx = _context(args, cx, cfg)
    H = ctx.harmonic(args.eps)
    rep["basis"] = H.G.T.tolist()
    rep.update(eps=H.eps, eps_prime=H.eps_prime, delta=H.delta, mode=H.mode, provenance=H.provenance)
    if args.verify:
        from .oracle import DenseHodge
        D = DenseHodge(cx, "K", cap=cfg["oracle.dense_cap"])
        err = float(np.linalg.norm(H.G @ H.G.T - D.hr, 2)) if ctx.n1 else 0.0
        rep["projection_error"] = {"measured": err, "bound": args.eps, "ok": err <= args.eps}
        if err > args.eps:
            raise VerificationError("harmonic projection error above eps")
    return rep


def cmd_hodge(args, cfg, rep):
    cx = _complex(args)
    x = _chain(args, cx)
    ctx = _context(args, cx, cfg)
    xb = ctx.proj_bd(args.eps, x)
    xc = ctx.graph.proj_cbd(args.eps, x)
    xh = ctx.harmonic(args.eps).proj_hr(x)
    rep["parts"] = {"bd": xb.tolist(), "hr": xh.tolist(), "cbd": xc.tolist()}
    nx = float(np.linalg.norm(x))
    rep["residual"] = float(np.linalg.norm(x - xb - xc - xh)) / max(nx, 1e-300)
    if args.verify:
        eb, eh, ec = exact_hodge(cx, x, cap=cfg["oracle.dense_cap"])
        errs = {"bd": (np.linalg.norm(xb - eb), args.eps * np.linalg.norm(eb)),
                "cbd": (np.linalg.norm(xc - ec), args.eps * np.linalg.norm(ec)),
                "hr": (np.linalg.norm(xh - eh), args.eps * nx)}
        rep["verify"] = {k: {"measured": float(m), "bound": float(b), "ok": bool(m <= b + 1e-9)}
                         for k, (m, b) in errs.items()}
        if not all(v["ok"] for v in rep["verify"].values()):
            raise VerificationError("Hodge part outside its error bound")
    return rep


def cmd_solve(args, cfg, rep):
    cx = _complex(args)
    b = _chain(args, cx)
    t = time.perf_counter()
    ctx = _context(args, cx, cfg)
    rep["timings"]["prepare"] = time.perf_counter() - t
    t = time.perf_counter()
    x = ctx.laplacian_solve(args.eps, b)
    rep["timings"]["solve"] = time.perf_counter() - t
    rep["timings"].update(ctx.timings)
    from .complex import laplacian_apply
    r = laplacian_apply(cx, "L1", x, "K") - b
    # b need not lie in im L1; its harmonic part stays in the residual
    rep["residual_norm"] = float(np.linalg.norm(r))
    rep["rhs_norm"] = float(np.linalg.norm(b))
    rep["solver"] = ctx.report
    rep["solution"] = Chain(1, x, "K").values.tolist()
    if args.verify:
        v = audit.solver_audit(ctx, args.eps)
        rep["verify"] = v
        if not v["ok"]:
            raise VerificationError("solver Loewner sandwich failed")
    if args.out:
        io.write_chain(Chain(1, x, "K"), args.out)
        rep.pop("solution")
    return rep


def cmd_audit(args, cfg, rep):
    rng = np.random.default_rng(args.seed)
    gs = {}
    for beta in (1, 2, 3):
        for delta in (0.2, 0.5):
            gs[f"beta={beta},delta={delta}"] = gs_perturbation_audit(delta, 1e-8, beta, args.trials, rng)
    rep["gram_schmidt"] = gs
    ok = all(v["ok"] for v in gs.values())
    if args.complex:
        cx = _complex(args)
        ctx = _context(args, cx, cfg)
        rep["norms"] = audit.norm_audit(ctx, seed=args.seed)
        ok = ok and rep["norms"]["ok"]
        if args.verify:
            rep["identities"] = audit.identities_audit(ctx)
            rep["projections"] = audit.projection_audit(ctx, min(args.eps, 0.5))
            ok = ok and rep["identities"]["ok"] and rep["projections"]["ok"]
    if not ok:
        raise VerificationError("audit found violations")
    return rep


def cmd_bench(args, cfg, rep):
    if args.kernels:
        rep["kernels"] = bench.kernel_bench(seed=args.seed)
    else:
        rep["rows"] = bench.solve_ladder(sorted(args.sizes), args.eps, args.seed, args.mode, cfg)
    return rep


COMMANDS = {"generate": cmd_generate, "validate": cmd_validate, "bases": cmd_bases,
            "harmonic-basis": cmd_harmonic, "hodge": cmd_hodge, "solve": cmd_solve,
            "audit": cmd_audit, "bench": cmd_bench}


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    rep = {"command": args.command, "seed": args.seed, "timings": {}}
    code = 0
    try:
        cfg = _config(args)
        rep["config"] = cfg.to_dict()
        t = time.perf_counter()
        out = COMMANDS[args.command](args, cfg, rep)
        rep["timings"]["total"] = time.perf_counter() - t
        rep["status"] = "ok"
    except ValidationError as exc:
        rep.update(status="validation_error", error=str(exc), error_type=type(exc).__name__)
        code, out = 2, rep
    except VerificationError as exc:
        rep.update(status="verification_failed", error=str(exc), error_type=type(exc).__name__)
        code, out = 3, rep
    except IOFailure as exc:
        rep.update(status="io_error", error=str(exc))
        code, out = 4, rep
    except HodgeError as exc:
        rep.update(status="error", error=str(exc), error_type=type(exc).__name__)
        code, out = 2, rep
    text = io.dumps(out)
    # generate and solve write their artifact to --out; the report goes to stdout
    if args.out and args.command not in ("generate", "solve"):
        try:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return 4
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
