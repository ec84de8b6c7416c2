"""qmono command-line interface.

Exit codes: 0 success (no violations), 1 an inequality violation was found
(witness serialized in the report), 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmono",
        description="Bipartite quantum-correlation measures and "
                    "monogamy/polygamy bound checks on small multiqubit "
                    "systems.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("example1", help="three-qubit concurrence worked "
                                         "example (values, fig1, fig2)")
    p1.add_argument("--out", required=True, help="output directory")
    p1.add_argument("--no-plot", action="store_true",
                    help="skip PNG rendering")

    p3 = sub.add_parser("example3", help="W-class assisted-negativity worked "
                                         "example (values, fig3)")
    p3.add_argument("--out", required=True, help="output directory")
    p3.add_argument("--no-plot", action="store_true")
    p3.add_argument("--seed", type=int, default=7,
                    help="roof-oracle seed (default 7)")
    p3.add_argument("--restarts", type=int, default=None,
                    help="roof-oracle restarts (default 16)")

    pf = sub.add_parser("fuzz", help="randomized bound checking")
    pf.add_argument("--measure", default="concurrence",
                    help="concurrence|coa|negativity|scren|screnoa|eof")
    pf.add_argument("--mode", required=True,
                    choices=["monogamy", "polygamy", "lemma"])
    pf.add_argument("--n", type=int, default=1000, help="number of states")
    pf.add_argument("--qubits", type=int, default=3)
    pf.add_argument("--alpha", type=float, default=None)
    pf.add_argument("--gamma", type=float, default=None)
    pf.add_argument("--beta", type=float, default=None)
    pf.add_argument("--delta", type=float, default=None)
    pf.add_argument("--k", default="1",
                    help="weight: a value, 'auto' (max admissible per "
                         "state), or '1'")
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--m", dest="split_index", type=int, default=1,
                    help="chain split index (states with >= 4 qubits)")
    pf.add_argument("--out", required=True, help="report JSON path")

    ps = sub.add_parser("sweep", help="bound surface over a parameter grid")
    ps.add_argument("--state", required=True,
                    help="gsd:l0,..,l4[,phi] | w | ghz | random:SEED")
    ps.add_argument("--measure", required=True)
    ps.add_argument("--x1", required=True, help="START:STOP:STEP for the "
                                                "outer exponent")
    ps.add_argument("--x2", required=True, help="START:STOP:STEP for the "
                                                "base power")
    ps.add_argument("--k", default="auto", help="value | auto | unit")
    ps.add_argument("--out", required=True, help="surface CSV path")
    ps.add_argument("--plot", action="store_true",
                    help="also render a PNG next to the CSV")

    po = sub.add_parser("oracle", help="convex-roof value of a two-qubit "
                                       "reduction vs its closed form")
    po.add_argument("--state", required=True,
                    help="state spec with reduction suffix, e.g. w@A,B2")
    po.add_argument("--measure", required=True)
    po.add_argument("--direction", required=True, choices=["min", "max"])
    po.add_argument("--restarts", type=int, default=None)
    po.add_argument("--seed", type=int, default=0)
    po.add_argument("--out", required=True, help="report JSON path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from . import runs
    try:
        if args.command == "example1":
            res = runs.cmd_example1(args.out, plot=not args.no_plot)
            print(f"example1: C_A|BC={res['C_A_BC']:.10f} "
                  f"C_AB={res['C_AB']:.10f} C_AC={res['C_AC']:.10f}")
            return 0
        if args.command == "example3":
            from .roof import RoofConfig
            cfg = None if args.restarts is None \
                else RoofConfig(restarts=args.restarts)
            res = runs.cmd_example3(args.out, plot=not args.no_plot,
                                    seed=args.seed, cfg=cfg)
            print(f"example3: Na_A|B1B2={res['Na_A_B1B2']:.10f} "
                  f"Na_AB1={res['Na_AB1']:.10f} Na_AB2={res['Na_AB2']:.10f}")
            return 0
        if args.command == "fuzz":
            report, code = runs.cmd_fuzz(
                args.measure, args.mode, args.n, args.qubits, args.seed,
                args.out, alpha=args.alpha, gamma=args.gamma, beta=args.beta,
                delta=args.delta, k=args.k, split_index=args.split_index)
            counts = report["counts"]
            print(f"fuzz: checked={counts['checked']} "
                  f"condition_held={counts['condition_held']} "
                  f"violations={counts['violations']}")
            return code
        if args.command == "sweep":
            res = runs.cmd_sweep(args.state, args.measure,
                                 runs.parse_range(args.x1),
                                 runs.parse_range(args.x2),
                                 args.k, args.out, plot=args.plot)
            print(f"sweep: wrote {res['rows']} rows to {args.out}")
            return 0
        if args.command == "oracle":
            report = runs.cmd_oracle(args.state, args.measure, args.direction,
                                     args.out, restarts=args.restarts,
                                     seed=args.seed)
            closed = report["closed_form"]
            closed_txt = "n/a" if closed is None else f"{closed:.6f}"
            print(f"oracle: value={report['oracle']:.6f} "
                  f"closed={closed_txt} agreement={report['agreement']}")
            return 0
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
