"""Command-line front end: single searches, grid sweeps, the pricing game,
its minimax value, the adaptive adversary, and scaling fits."""

from __future__ import annotations

import argparse
import os
import sys

from .generators import FamilySpec
from .harness import (CSV_HEADER, fit_scaling, run_experiment, sweep)
from .lowerbound import adaptive_fork_adversary, minimax_price, play_game
from .model import TreeError


def _split(text):
    return [x for x in text.split(",") if x]


def _int_list(text):
    return [int(x) for x in _split(text)]


def build_parser():
    p = argparse.ArgumentParser(
        prog="bifurcation",
        description="Implicit tree search experiments with a comparison oracle")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", help="one instrumented run on one instance")
    s.add_argument("--family", default="random")
    s.add_argument("--n", type=int, default=256)
    s.add_argument("--t", type=int, default=16)
    s.add_argument("--psi", type=int, default=None)
    s.add_argument("--algo", default="bifurcation",
                   choices=("bifurcation", "full", "rounds"))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--target", default="random_node")
    s.add_argument("--mode", default="any_node",
                   choices=("any_node", "leaves_only"))
    s.add_argument("--h", type=int, default=None,
                   help="complete_path height (with --delta, overrides --n/--t)")
    s.add_argument("--delta", type=int, default=None,
                   help="complete_path edge stretch")
    s.add_argument("--out", default=None, help="append the record to a CSV")

    w = sub.add_parser("sweep", help="Cartesian grid of runs into a CSV")
    w.add_argument("--family", default="random")
    w.add_argument("--n", type=_int_list, required=True)
    w.add_argument("--t", type=_int_list, required=True)
    w.add_argument("--psi", type=_int_list, default=None)
    w.add_argument("--algo", default="bifurcation")
    w.add_argument("--trials", type=int, default=5)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--target", default="random_node")
    w.add_argument("--out", required=True)

    g = sub.add_parser("game", help="play the leaf-isolation pricing game")
    g.add_argument("--strategy", default="balanced_bisect",
                   choices=("balanced_bisect", "greedy_cheapest", "random"))
    g.add_argument("--h", type=int, default=6)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)

    m = sub.add_parser("minimax", help="exact game value for height h")
    m.add_argument("--h", type=int, required=True)

    a = sub.add_parser("adversary", help="run a player against the adaptive oracle")
    a.add_argument("--n", type=int, default=256)
    a.add_argument("--t", type=int, default=16)
    a.add_argument("--algo", default="bifurcation",
                   choices=("bifurcation", "full", "rounds"))

    f = sub.add_parser("fit", help="log-log scaling exponents from a sweep CSV")
    f.add_argument("csv")
    return p


def _cmd_search(args):
    if args.h is not None and args.delta is not None:
        spec = FamilySpec("complete_path", args.h * args.delta, args.h ** 2,
                          args.seed, args.target)
    else:
        spec = FamilySpec(args.family, args.n, args.t, args.seed, args.target)
    rec = run_experiment(spec, args.algo, args.psi, oracle_mode=args.mode)
    if args.out:
        new = not (os.path.exists(args.out) and os.path.getsize(args.out) > 0)
        with open(args.out, "a", encoding="utf-8") as fh:
            if new:
                fh.write(CSV_HEADER + "\n")
            fh.write(rec.csv_row() + "\n")
    print(CSV_HEADER)
    print(rec.csv_row())
    return 0


def _cmd_sweep(args):
    psis = args.psi if args.psi else [None]
    written = sweep(args.out, _split(args.family), args.n, args.t,
                    _split(args.algo), trials=args.trials, psis=psis,
                    base_seed=args.seed, target_strategy=args.target)
    print("wrote %d records to %s" % (written, args.out))
    return 0


def _cmd_game(args):
    transcript = play_game(args.strategy, args.h, args.seed)
    rows = list(transcript.csv_rows())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
    for row in rows:
        print(row)
    print("total_price,%d" % transcript.total_price)
    return 0


def _cmd_minimax(args):
    print(minimax_price(args.h))
    return 0


def _cmd_adversary(args):
    rep = adaptive_fork_adversary(args.n, args.t, args.algo)
    print("player,n,t,h,step_len,steps,oracle_calls,cost,revealed_forks,"
          "froze,consistent")
    print("%s,%d,%d,%d,%d,%d,%d,%d,%d,%s,%s"
          % (rep.player, rep.n, rep.t, rep.h, rep.step_len, rep.steps,
             rep.oracle_calls, rep.cost, rep.revealed_forks,
             str(rep.froze).lower(), str(rep.replay_consistent()).lower()))
    return 0


def _cmd_fit(args):
    print(fit_scaling(args.csv).format())
    return 0


_COMMANDS = {
    "search": _cmd_search,
    "sweep": _cmd_sweep,
    "game": _cmd_game,
    "minimax": _cmd_minimax,
    "adversary": _cmd_adversary,
    "fit": _cmd_fit,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (TreeError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
