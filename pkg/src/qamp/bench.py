"""Benchmark harness: error versus query cost for QAE and classical MC.

For each (epsilon, seed) pair the harness runs amplitude estimation on a
Bernoulli target and a classical Monte Carlo baseline sized so its 95%
confidence halfwidth is epsilon, records realized absolute error and cost,
and fits ordinary least squares to log(mean |error|) against log(mean cost)
per method. The expected slopes are -1 for amplitude estimation and -1/2
for classical sampling: the quadratic query-complexity gap.

CSV artifacts are byte-stable for a fixed command line: rows are written in
deterministic (method, epsilon, seed) order with fixed 15-significant-digit
formatting, and the wall_ms column is written as 0 (measured timings are
inherently nondeterministic, so they live in the JSON summary instead).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from qamp.estimation import AEConfig, EstimationProblem, estimate
from qamp.prep import bernoulli_prep
from qamp.qmc import DiscreteDistribution, Payoff, classical_mc_mean
from qamp.statevector import BasisPredicate

_Z95 = 1.959963984540054

CSV_HEADER = "method,target,epsilon_target,queries,abs_error,p_true,seed,wall_ms"


@dataclass(frozen=True)
class BenchRecord:
    method: str
    target: str
    epsilon_target: float
    queries: int
    abs_error: float
    p_true: float
    seed: int
    wall_ms: int


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r2: float
    n_points: int


def _ols_loglog(costs: list[float], errors: list[float]) -> RegressionFit:
    if len(costs) < 3:
        raise ValueError("need at least 3 points for a reported fit")
    x = np.log(np.asarray(costs, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RegressionFit(float(slope), float(intercept), r2, len(costs))


def classical_sample_size(p_true: float, epsilon: float) -> int:
    """Samples for a 95% normal CI of halfwidth epsilon at this Bernoulli p."""
    return max(2, math.ceil(_Z95**2 * p_true * (1.0 - p_true) / epsilon**2))


def run_speedup_benchmark(p_true: float, epsilons: list[float], seeds: list[int],
                          shots_per_round: int = 100,
                          ) -> tuple[list[BenchRecord], dict[str, RegressionFit]]:
    """Full sweep over methods x epsilons x seeds with per-epsilon mean fits.

    Aggregating |error| over seeds before the regression stabilizes the
    slope at small scale; raw records are still returned for the CSV.
    """
    epsilons = [float(e) for e in epsilons]
    if len(set(epsilons)) < 4:
        raise ValueError("need at least 4 distinct epsilon values")
    if max(epsilons) / min(epsilons) < 5.0:
        raise ValueError("epsilon grid must span at least a factor of 5")
    if len(seeds) < 10:
        raise ValueError("need at least 10 seeds per epsilon")
    if not 0.0 < p_true < 1.0:
        raise ValueError("p_true must be in (0, 1)")

    problem = EstimationProblem(bernoulli_prep(p_true), BasisPredicate.qubit_is_one(0),
                                true_p=p_true)
    bern = DiscreteDistribution(np.array([1.0 - p_true, p_true]), 1)
    identity = Payoff(np.array([0.0, 1.0]))

    records: list[BenchRecord] = []
    for eps in epsilons:
        for seed in seeds:
            start = time.perf_counter()
            n = classical_sample_size(p_true, eps)
            mc = classical_mc_mean(bern, identity, n, seed)
            wall = int(1000 * (time.perf_counter() - start))
            records.append(BenchRecord("classical-mc", "bernoulli", eps, n,
                                       abs(mc.mean_hat - p_true), p_true, seed, wall))
    for eps in epsilons:
        for seed in seeds:
            start = time.perf_counter()
            cfg = AEConfig(epsilon=eps, shots_per_round=shots_per_round, seed=seed)
            res = estimate(problem, cfg)
            wall = int(1000 * (time.perf_counter() - start))
            records.append(BenchRecord("qae", "bernoulli", eps, res.queries,
                                       abs(res.p_hat - p_true), p_true, seed, wall))

    fits: dict[str, RegressionFit] = {}
    for method in ("classical-mc", "qae"):
        costs, errors = [], []
        for eps in epsilons:
            sel = [r for r in records if r.method == method and r.epsilon_target == eps]
            costs.append(float(np.mean([r.queries for r in sel])))
            errors.append(float(np.mean([r.abs_error for r in sel])))
        fits[method] = _ols_loglog(costs, errors)
    return records, fits


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def records_to_csv(records: list[BenchRecord]) -> str:
    """Render records in deterministic (method, epsilon, seed) order.

    The wall_ms column is zeroed to keep CSV bodies byte-identical across
    runs of the same command line; measured timings are reported in the JSON
    summary.
    """
    ordered = sorted(records, key=lambda r: (r.method, r.epsilon_target, r.seed))
    lines = [CSV_HEADER]
    for r in ordered:
        lines.append(",".join([
            r.method, r.target, _fmt(r.epsilon_target), _fmt(r.queries),
            _fmt(r.abs_error), _fmt(r.p_true), _fmt(r.seed), "0",
        ]))
    return "\n".join(lines) + "\n"


def summary_json(command: str, params: dict, results, fits: dict[str, RegressionFit] | None = None) -> str:
    payload = {
        "command": command,
        "params": params,
        "results": results,
        "fits": {k: asdict(v) for k, v in fits.items()} if fits else None,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
