"""Compiled vs pure-Python sweep kernels, plus the solver size ladder.

    python3 benchmarks/bench_kernels.py [--k 10] [--block 8] [--ladder]
"""
import argparse

from hodgesolve import bench, kernels


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--block", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--ladder", action="store_true", help="also time the grid_ball solve ladder")
    args = ap.parse_args()

    r = bench.kernel_bench(args.k, args.block, args.repeats)
    print(f"grid_ball({args.k}): {r['n']} simplices, block {r['block']}, backends {kernels.available()}")
    names = list(next(iter(r["backends"].values())))
    cols = list(r["backends"])
    print(f"{'kernel':<16}" + "".join(f"{c:>12}" for c in cols) + ("     speedup" if "speedup" in r else ""))
    for n in names:
        line = f"{n:<16}" + "".join(f"{r['backends'][c][n] * 1e3:>10.2f}ms" for c in cols)
        if "speedup" in r:
            line += f"{r['speedup'][n]:>11.1f}x"
        print(line)

    if args.ladder:
        print(f"\n{'k':>3} {'n':>8} {'beta':>5} {'prepare':>9} {'solve':>9} {'total':>9} {'growth':>7}")
        for row in bench.solve_ladder():
            g = row.get("growth")
            print(f"{row['k']:>3} {row['n']:>8} {row['beta']:>5} {row['t_prepare']:>8.3f}s "
                  f"{row['t_solve']:>8.3f}s {row['t_total']:>8.3f}s {g if g is None else round(g, 2)!s:>7}")


if __name__ == "__main__":
    main()
