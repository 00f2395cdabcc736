"""Experiment records, grid sweeps with resume, and log-log scaling fits."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .algorithms import ALGORITHMS, SearchParams
from .generators import FamilySpec, build_instance, mix_seed
from .model import ANY_NODE, InstrumentedOracle, TreeError

CSV_HEADER = ("family,n,t,psi,algo,seed,steps,oracle_calls,found,"
              "target_inorder_rank,cost_linear_decider")

FIELDS = tuple(CSV_HEADER.split(","))


class InsufficientGridError(TreeError):
    """The sweep grid is too thin to fit exponents."""


@dataclass(frozen=True)
class ExperimentRecord:
    family: str
    n: int
    t: int
    psi: int
    algo: str
    seed: int
    steps: int
    oracle_calls: int
    found: bool
    target_inorder_rank: int
    cost_linear_decider: int

    def csv_row(self) -> str:
        vals = (self.family, self.n, self.t, self.psi, self.algo, self.seed,
                self.steps, self.oracle_calls,
                "true" if self.found else "false",
                self.target_inorder_rank, self.cost_linear_decider)
        return ",".join(str(v) for v in vals)


def run_experiment(spec: FamilySpec, algo: str, psi=None,
                   oracle_mode: str = ANY_NODE) -> ExperimentRecord:
    """One instrumented run; bit-for-bit deterministic in (spec, algo, psi)."""
    if algo not in ALGORITHMS:
        raise TreeError("unknown algorithm %r" % (algo,))
    tree = build_instance(spec)
    oracle = InstrumentedOracle(tree, mode=oracle_mode)
    params = SearchParams.for_instance(tree, psi)
    fn = ALGORITHMS[algo]
    if algo == "bifurcation":
        result = fn(tree, oracle, params=params)
    else:
        result = fn(tree, oracle)
    rank = tree.inorder_ranks()[tree.target]
    return ExperimentRecord(
        family=spec.family, n=tree.n, t=tree.t, psi=params.psi, algo=algo,
        seed=spec.seed, steps=result.steps, oracle_calls=result.oracle_calls,
        found=result.found == tree.target, target_inorder_rank=rank,
        cost_linear_decider=result.steps + tree.n * result.oracle_calls)


def load_records(path):
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header and header != CSV_HEADER:
            raise TreeError("unexpected header in %s" % path)
        for line in fh:
            line = line.strip()
            if not line:
                continue
            (family, n, t, psi, algo, seed, steps, calls, found, rank,
             cost) = line.split(",")
            records.append(ExperimentRecord(
                family=family, n=int(n), t=int(t), psi=int(psi), algo=algo,
                seed=int(seed), steps=int(steps), oracle_calls=int(calls),
                found=found == "true", target_inorder_rank=int(rank),
                cost_linear_decider=int(cost)))
    return records


def sweep(out_path, families, ns, ts, algos, trials: int = 5, psis=(None,),
          base_seed: int = 0, target_strategy: str = "random_node") -> int:
    """Run the Cartesian grid, appending one CSV row per record.

    Every record's seed is derived from (base_seed, cell, trial), so the
    (family, algo, seed) triple identifies a row and an interrupted sweep
    resumes without duplicating completed work. Returns rows written.
    """
    done = set()
    if os.path.exists(out_path) and os.path.getsize(out_path) > 0:
        for rec in load_records(out_path):
            done.add((rec.family, rec.algo, rec.seed))
        fh = open(out_path, "a", encoding="utf-8")
    else:
        fh = open(out_path, "w", encoding="utf-8")
        fh.write(CSV_HEADER + "\n")
    written = 0
    try:
        cell = 0
        for family in families:
            for n in ns:
                for t in ts:
                    for psi in psis:
                        cell += 1
                        for trial in range(trials):
                            seed = mix_seed(base_seed, cell * 1_000_003 + trial)
                            spec = FamilySpec(family, n, t, seed,
                                              target_strategy)
                            for algo in algos:
                                if (family, algo, seed) in done:
                                    continue
                                rec = run_experiment(spec, algo, psi)
                                fh.write(rec.csv_row() + "\n")
                                written += 1
    finally:
        fh.close()
    return written


@dataclass(frozen=True)
class FitReport:
    """Per-algorithm log-log exponents: metric -> (n_exp, t_exp, residual)."""

    exponents: dict

    def format(self) -> str:
        lines = []
        for algo in sorted(self.exponents):
            for metric, (en, et, resid) in sorted(self.exponents[algo].items()):
                lines.append("%s %s: n^%.3f t^%.3f (rms %.4f)"
                             % (algo, metric, en, et, resid))
        return "\n".join(lines)


def fit_scaling(source, metrics=("steps", "oracle_calls")) -> FitReport:
    """Least-squares exponents of n and t on log-transformed per-cell means.

    Needs at least three distinct values of each fitted variable; rows with
    t = 0 cannot be log-transformed and are skipped.
    """
    records = source if isinstance(source, list) else load_records(source)
    by_algo = {}
    for r in records:
        if r.found and r.t > 0 and r.n > 1:
            by_algo.setdefault(r.algo, []).append(r)
    if not by_algo:
        raise InsufficientGridError("no usable records")
    out = {}
    for algo, rows in by_algo.items():
        ns = {r.n for r in rows}
        ts = {r.t for r in rows}
        if len(ns) < 3 or len(ts) < 3:
            raise InsufficientGridError(
                "need 3 distinct n and t values, have %d and %d for %s"
                % (len(ns), len(ts), algo))
        cells = {}
        for r in rows:
            cells.setdefault((r.n, r.t), []).append(r)
        per_metric = {}
        for metric in metrics:
            xs = []
            ys = []
            for (n, t), rs in sorted(cells.items()):
                mean = sum(getattr(r, metric) for r in rs) / len(rs)
                if mean <= 0:
                    continue
                xs.append((math.log2(n), math.log2(t), 1.0))
                ys.append(math.log2(mean))
            a = np.array(xs)
            b = np.array(ys)
            coef, *_ = np.linalg.lstsq(a, b, rcond=None)
            resid = float(np.sqrt(np.mean((a @ coef - b) ** 2)))
            per_metric[metric] = (float(coef[0]), float(coef[1]), resid)
        out[algo] = per_metric
    return FitReport(out)
