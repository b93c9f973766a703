"""Command-line front end.

Subcommands: grover, count, qae, qmc, credit-risk, bench. Flags are
long-form only. Exit codes: 0 success, 1 usage error, 2 model/assumption
error. The default seed is 0, overridable by the QAMP_SEED environment
variable and the --seed flag.

--out writes a JSON summary; the bench subcommand writes the record CSV at
--out and the JSON summary next to it. CSV bodies are byte-identical across
runs of the same command line (see qamp.bench).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

import numpy as np

from qamp import bench as bench_mod
from qamp import credit_risk as cr
from qamp import grover as grover_mod
from qamp import qmc
from qamp.errors import QampError
from qamp.estimation import AEConfig, EstimationProblem, estimate, estimate_count
from qamp.prep import bernoulli_prep
from qamp.statevector import BasisPredicate


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise UsageError(message)


def _default_seed() -> int:
    env = os.environ.get("QAMP_SEED", "")
    return int(env) if env else 0


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_marked(text: str, num_qubits: int) -> set[int]:
    marked = set(_parse_ints(text))
    bad = [i for i in marked if not 0 <= i < (1 << num_qubits)]
    if bad:
        raise UsageError(f"marked indices {bad} out of range for {num_qubits} qubits")
    return marked


def parse_kv_config(path: str) -> dict:
    """Flat key-value config: `key = value` lines, '#' comments.

    Values may be scalars or comma-separated lists, with optional brackets:
    `p_zeros = [0.15, 0.25]` and `p_zeros = 0.15, 0.25` are equivalent.
    """
    out: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected `key = value`")
        key, _, value = line.partition("=")
        value = value.strip().strip("[]")
        parts = [tok.strip() for tok in value.split(",") if tok.strip()]
        if not parts:
            raise UsageError(f"{path}:{lineno}: empty value")
        nums = []
        for tok in parts:
            try:
                nums.append(float(tok))
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: not a number: {tok!r}") from exc
        out[key.strip()] = nums if len(nums) > 1 else nums[0]
    return out


def _gci_params_from_args(args) -> tuple[cr.GCIParams, float]:
    values: dict = {}
    if args.config:
        values.update(parse_kv_config(args.config))
    if args.n_z is not None:
        values["n_z"] = args.n_z
    if args.z_max is not None:
        values["z_max"] = args.z_max
    if args.p_zeros is not None:
        values["p_zeros"] = _parse_floats(args.p_zeros)
    if args.rhos is not None:
        values["rhos"] = _parse_floats(args.rhos)
    if args.lgd is not None:
        values["lgd"] = _parse_floats(args.lgd)
    if args.alpha is not None:
        values["alpha"] = args.alpha
    missing = [k for k in ("n_z", "z_max", "p_zeros", "rhos", "lgd") if k not in values]
    if missing:
        raise UsageError(f"missing credit-risk parameters: {', '.join(missing)}")

    def as_list(v):
        return v if isinstance(v, list) else [v]

    params = cr.GCIParams(
        p0=tuple(as_list(values["p_zeros"])),
        rho=tuple(as_list(values["rhos"])),
        lgd=tuple(int(x) for x in as_list(values["lgd"])),
        n_z=int(values["n_z"]),
        z_max=float(values["z_max"]),
    )
    return params, float(values.get("alpha", 0.05))


def _write_out(args, text: str, suffix_json: str | None = None) -> None:
    if not getattr(args, "out", None):
        return
    path = Path(args.out)
    try:
        path.write_text(text)
        if suffix_json is not None:
            path.with_suffix(".json").write_text(suffix_json)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _cmd_grover(args) -> int:
    setup = grover_mod.build_setup(args.qubits, _parse_marked(args.marked, args.qubits))
    result = grover_mod.run_search(setup, args.shots, args.seed)
    print(f"grover: n={args.qubits} k={setup.k} m={result.iterations} "
          f"measured={result.measured_index} success={result.success} "
          f"frequency={result.success_frequency:.6f} "
          f"theoretical={result.theoretical_success:.6f}")
    _write_out(args, bench_mod.summary_json(
        "grover", vars_of(args), dataclasses.asdict(result)))
    return 0


def _cmd_count(args) -> int:
    cfg = AEConfig(epsilon=args.epsilon, alpha=args.alpha,
                   shots_per_round=args.shots_per_round, seed=args.seed)
    marked = _parse_marked(args.marked, args.qubits)
    k_hat, exact, result = estimate_count(args.qubits, marked, cfg)
    print(f"count: n={args.qubits} k_hat={k_hat:.6g} exact_mode={exact} "
          f"ci=[{(1 << args.qubits) * result.ci[0]:.6g}, {(1 << args.qubits) * result.ci[1]:.6g}] "
          f"queries={result.queries}")
    _write_out(args, bench_mod.summary_json("count", vars_of(args), {
        "k_hat": k_hat, "exact_mode": exact, "p_hat": result.p_hat,
        "ci": list(result.ci), "queries": result.queries}))
    return 0


def _cmd_qae(args) -> int:
    problem = EstimationProblem(bernoulli_prep(args.p), BasisPredicate.qubit_is_one(0),
                                true_p=args.p)
    cfg = AEConfig(epsilon=args.epsilon, alpha=args.alpha,
                   shots_per_round=args.shots_per_round, seed=args.seed)
    result = estimate(problem, cfg)
    print(f"qae: p_true={args.p} p_hat={result.p_hat:.8f} "
          f"ci=[{result.ci[0]:.8f}, {result.ci[1]:.8f}] queries={result.queries} "
          f"abs_error={abs(result.p_hat - args.p):.3e}")
    _write_out(args, bench_mod.summary_json("qae", vars_of(args), {
        "p_hat": result.p_hat, "ci": list(result.ci), "queries": result.queries,
        "rounds": result.rounds, "degenerate": result.degenerate,
        "below_target": result.below_target}))
    return 0


def _cmd_qmc(args) -> int:
    if args.payoff != "power-option":
        raise UsageError(f"unknown payoff {args.payoff!r}")
    dist, payoff = qmc.discretize_lognormal_power_option(
        args.s0, args.r, args.sigma, args.t, args.power, args.strike,
        args.bits, args.z_max)
    exact = qmc.exact_mean(dist, payoff)
    if args.method == "classical":
        res = qmc.classical_mc_mean(dist, payoff, args.samples, args.seed)
    else:
        cfg = AEConfig(epsilon=args.epsilon, alpha=args.alpha,
                       shots_per_round=args.shots_per_round, seed=args.seed)
        if args.method == "dyadic":
            bound = float(np.sqrt(dist.probs @ payoff.values**2)) + 1e-12
            res = qmc.estimate_mean_dyadic(
                dist, qmc.Payoff(payoff.values, kind="nonnegative", bound=bound,
                                 scale=payoff.scale), cfg)
        else:
            res = qmc.estimate_mean_bounded(dist, payoff, cfg)
    scale = payoff.scale
    print(f"qmc[{args.method}]: mean={res.mean_hat * scale:.8g} "
          f"exact={exact * scale:.8g} abs_error={abs(res.mean_hat - exact) * scale:.3e} "
          f"ci=[{res.ci[0] * scale:.8g}, {res.ci[1] * scale:.8g}] "
          f"cost={res.samples_or_queries} rescale_factor={scale:.8g}")
    _write_out(args, bench_mod.summary_json("qmc", vars_of(args), {
        "mean_hat": res.mean_hat * scale, "exact": exact * scale,
        "ci": [res.ci[0] * scale, res.ci[1] * scale],
        "cost": res.samples_or_queries, "method": res.method,
        "rescale_factor": scale}))
    return 0


def _cmd_credit_risk(args) -> int:
    params, _model_alpha = _gci_params_from_args(args)
    cfg = AEConfig(epsilon=args.epsilon, alpha=args.ci_alpha,
                   shots_per_round=args.shots_per_round, seed=args.seed)
    exact = cr.expected_loss_exact(params)
    res = cr.estimate_expected_loss(params, cfg)
    print(f"credit-risk: estimate={res.mean_hat:.6f} "
          f"ci=[{res.ci[0]:.6f}, {res.ci[1]:.6f}] exact={exact:.6f} "
          f"abs_error={abs(res.mean_hat - exact):.3e} queries={res.samples_or_queries}")
    _write_out(args, bench_mod.summary_json("credit-risk", vars_of(args), {
        "estimate": res.mean_hat, "ci": list(res.ci), "exact": exact,
        "queries": res.samples_or_queries}))
    return 0


def _cmd_bench(args) -> int:
    epsilons = _parse_floats(args.eps)
    seeds = list(range(args.seeds))
    try:
        records, fits = bench_mod.run_speedup_benchmark(
            args.p, epsilons, seeds, shots_per_round=args.shots_per_round)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    qae_fit, cl_fit = fits["qae"], fits["classical-mc"]
    print(f"bench: p={args.p} qae_slope={qae_fit.slope:.4f} (r2={qae_fit.r2:.4f}) "
          f"classical_slope={cl_fit.slope:.4f} (r2={cl_fit.r2:.4f}) "
          f"records={len(records)}")
    summary = bench_mod.summary_json(
        "bench", vars_of(args),
        [dataclasses.asdict(r) for r in records], fits)
    if args.out:
        _write_out(args, bench_mod.records_to_csv(records), suffix_json=summary)
    return 0


def vars_of(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def build_parser() -> _Parser:
    parser = _Parser(prog="qamp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    seed_default = _default_seed()

    p = sub.add_parser("grover", help="Grover search over 2^n elements")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--marked", type=str, required=True, help="comma-separated marked indices")
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", type=str)
    p.set_defaults(func=_cmd_grover)

    p = sub.add_parser("count", help="estimate the number of marked states")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--marked", type=str, required=True)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--shots-per-round", type=int, default=100)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", type=str)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("qae", help="amplitude estimation of a Bernoulli parameter")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--shots-per-round", type=int, default=100)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", type=str)
    p.set_defaults(func=_cmd_qae)

    p = sub.add_parser("qmc", help="mean estimation for a discretized payoff")
    p.add_argument("--payoff", type=str, default="power-option")
    p.add_argument("--method", choices=["qae", "classical", "dyadic"], default="qae")
    p.add_argument("--s0", type=float, default=2.0)
    p.add_argument("--r", type=float, default=0.02)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--power", type=float, default=1.0)
    p.add_argument("--strike", type=float, default=2.0)
    p.add_argument("--bits", type=int, default=6)
    p.add_argument("--z-max", type=float, default=3.0)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--shots-per-round", type=int, default=100)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", type=str)
    p.set_defaults(func=_cmd_qmc)

    p = sub.add_parser("credit-risk", help="expected portfolio loss under the GCI model")
    p.add_argument("--config", type=str, help="key-value file with n_z, z_max, p_zeros, rhos, lgd, alpha")
    p.add_argument("--n-z", type=int, dest="n_z")
    p.add_argument("--z-max", type=float, dest="z_max")
    p.add_argument("--p-zeros", type=str, dest="p_zeros")
    p.add_argument("--rhos", type=str)
    p.add_argument("--lgd", type=str)
    p.add_argument("--alpha", type=float, help="model-file alpha (VaR level; unused here)")
    p.add_argument("--ci-alpha", type=float, default=0.05, dest="ci_alpha")
    p.add_argument("--epsilon", type=float, default=5e-3)
    p.add_argument("--shots-per-round", type=int, default=100)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--out", type=str)
    p.set_defaults(func=_cmd_credit_risk)

    p = sub.add_parser("bench", help="error-versus-cost speedup benchmark")
    p.add_argument("--p", type=float, default=0.25)
    p.add_argument("--eps", type=str, default="0.04,0.02,0.01,0.005")
    p.add_argument("--seeds", type=int, default=20, help="number of seeds (0..N-1)")
    p.add_argument("--shots-per-round", type=int, default=100)
    p.add_argument("--out", type=str)
    p.set_defaults(func=_cmd_bench)

    return parser


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except QampError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
