"""Monte Carlo mean estimation, classical and amplitude-estimation based.

A finite distribution q over 2^n outcomes and a payoff f in [0, 1] are
encoded into one extra ancilla qubit: the register is loaded with amplitudes
sqrt(q(x)) and the ancilla is rotated by 2*arcsin(sqrt(f(x))) conditioned on
the register value, so P(ancilla = 1) = sum_x q(x) f(x) = E[f(X)] exactly.
Estimating that probability with amplitude estimation costs O(1/eps)
state-preparation queries versus the classical O(1/eps^2) samples.

Unbounded nonnegative payoffs with a known second-moment bound are handled
by dyadic layering: each slice f * 1{f in [2^l, 2^(l+1))}, scaled by 2^(l+1),
fits the unit interval and is estimated separately; values at or above 2^L,
L = ceil(log2(B/eps)), are truncated, and the discarded mass is at most
B^2 / 2^L by Chebyshev.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from qamp.errors import DistributionError, ModelAssumptionError, PayoffRangeError
from qamp.estimation import AEConfig, EstimationProblem, EstimationResult, estimate
from qamp.prep import ConditionalRyOp, StatePreparation, distribution_loader
from qamp.rng import Seed, make_rng, spawn_rngs
from qamp.statevector import BasisPredicate

_NORMALIZATION_TOL = 1e-12
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probabilities over outcome indices 0 .. 2^support_bits - 1."""

    probs: np.ndarray
    support_bits: int

    def __post_init__(self) -> None:
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if probs.shape[0] != (1 << self.support_bits):
            raise DistributionError(
                f"need {1 << self.support_bits} weights, got {probs.shape[0]}")
        if not np.all(np.isfinite(probs)):
            raise DistributionError("non-finite probability weight")
        if np.any(probs < 0):
            raise DistributionError("negative probability weight")
        total = float(probs.sum())
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise DistributionError(f"weights sum to {total!r}, not 1")
        probs.setflags(write=False)

    @classmethod
    def from_pairs(cls, outcomes, support_bits: int) -> "DiscreteDistribution":
        probs = np.zeros(1 << support_bits)
        for index, q in outcomes:
            probs[index] += q
        return cls(probs, support_bits)


@dataclass(frozen=True)
class Payoff:
    """Payoff values on the outcome indices of a distribution.

    ``kind`` declares the range contract: "unit" requires values in [0, 1],
    "nonnegative" requires values >= 0 with an L2 bound B such that
    sum q(x) f(x)^2 <= B^2 (checked against the distribution at use).
    ``scale`` records any rescaling applied by a builder (true payoff =
    values * scale); estimators work on ``values`` and report the factor's
    effect to the caller through it.
    """

    values: np.ndarray
    kind: str = "unit"
    bound: float | None = None
    scale: float = 1.0

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if not np.all(np.isfinite(values)):
            raise PayoffRangeError("non-finite payoff value")
        if self.kind == "unit":
            if np.any(values < 0.0) or np.any(values > 1.0):
                raise PayoffRangeError("unit-interval payoff has values outside [0, 1]")
        elif self.kind == "nonnegative":
            if np.any(values < 0.0):
                raise PayoffRangeError("nonnegative payoff has negative values")
            if self.bound is None or self.bound < 0:
                raise PayoffRangeError("nonnegative payoff needs an L2 bound")
        else:
            raise PayoffRangeError(f"unknown payoff kind {self.kind!r}")
        values.setflags(write=False)

    @classmethod
    def from_function(cls, fn: Callable[[int], float], support_bits: int,
                      kind: str = "unit", bound: float | None = None) -> "Payoff":
        n = 1 << support_bits
        vals = np.fromiter((fn(i) for i in range(n)), dtype=np.float64, count=n)
        return cls(vals, kind=kind, bound=bound)


@dataclass
class MCResult:
    """One mean estimate with its interval and cost."""

    mean_hat: float
    ci: tuple[float, float]
    samples_or_queries: int
    method: str
    detail: EstimationResult | None = None
    layers: list[tuple[int, float]] = field(default_factory=list)  # (level, layer mean)


def _check_match(dist: DiscreteDistribution, payoff: Payoff) -> None:
    if payoff.values.shape[0] != dist.probs.shape[0]:
        raise PayoffRangeError("payoff and distribution support sizes differ")


def build_payoff_state_prep(dist: DiscreteDistribution, payoff: Payoff) -> EstimationProblem:
    """Encode E[f(X)] as the ancilla-1 probability of a prepared state.

    The ancilla rotation is applied exactly, as one value-conditioned Ry at
    angle 2*arcsin(sqrt(f(x))); this keeps estimation error cleanly separated
    from any gate-synthesis error.
    """
    _check_match(dist, payoff)
    if payoff.kind != "unit":
        raise PayoffRangeError("state preparation needs a unit-interval payoff")
    n = dist.support_bits
    register = tuple(range(n))
    angles = 2.0 * np.arcsin(np.sqrt(payoff.values))
    ops = distribution_loader(dist.probs, register)
    ops.append(ConditionalRyOp(angles, register, n))
    prep = StatePreparation(n + 1, ops)
    true_p = float(dist.probs @ payoff.values)
    return EstimationProblem(prep, BasisPredicate.qubit_is_one(n), true_p=true_p)


def exact_mean(dist: DiscreteDistribution, payoff: Payoff) -> float:
    """Enumeration oracle: sum_x q(x) f(x) over the whole support."""
    _check_match(dist, payoff)
    return float(dist.probs @ payoff.values)


def estimate_mean_bounded(dist: DiscreteDistribution, payoff: Payoff,
                          config: AEConfig) -> MCResult:
    """Amplitude-estimate E[f(X)] for f in [0, 1]."""
    problem = build_payoff_state_prep(dist, payoff)
    result = estimate(problem, config)
    return MCResult(result.p_hat, result.ci, result.queries, "quantum-bounded", detail=result)


def _dyadic_layers(values: np.ndarray, num_levels: int) -> list[tuple[int, np.ndarray]]:
    """Scaled slices (level, f/2^(l+1) on f in [2^l, 2^(l+1))), plus the base."""
    layers = [(-1, np.where(values < 1.0, values, 0.0))]
    for level in range(num_levels):
        lo, hi = 2.0 ** level, 2.0 ** (level + 1)
        sel = (values >= lo) & (values < hi)
        layers.append((level, np.where(sel, values / hi, 0.0)))
    return layers


def estimate_mean_dyadic(dist: DiscreteDistribution, payoff: Payoff,
                         config: AEConfig) -> MCResult:
    """Estimate E[f(X)] for nonnegative f with known L2 bound B.

    Uses L = ceil(log2(B/eps)) dyadic levels above the unit base layer.
    Identically-zero layers are exact and free; the epsilon budget is split
    evenly over the active layers (in output units), so the active-layer
    errors sum to at most epsilon. Values >= 2^L are truncated; Chebyshev
    bounds the truncated mass by B^2/2^L.
    """
    _check_match(dist, payoff)
    if payoff.kind != "nonnegative":
        raise PayoffRangeError("dyadic estimation needs a nonnegative payoff with a bound")
    bound = float(payoff.bound)
    second_moment = float(dist.probs @ (payoff.values ** 2))
    if second_moment > bound * bound * (1.0 + 1e-12):
        raise ModelAssumptionError(
            f"second moment {second_moment:.6g} exceeds declared bound {bound*bound:.6g}")
    if bound == 0.0:
        return MCResult(0.0, (0.0, 0.0), 0, "quantum-dyadic")

    num_levels = max(0, math.ceil(math.log2(bound / config.epsilon)))
    layers = _dyadic_layers(payoff.values, num_levels)
    active = [(level, vals) for level, vals in layers if np.any(vals > 0.0)]
    if not active:
        return MCResult(0.0, (0.0, 0.0), 0, "quantum-dyadic")

    seeds = spawn_rngs(config.seed, len(active)) if len(active) > 1 else [make_rng(config.seed)]
    total, lo_total, hi_total, queries = 0.0, 0.0, 0.0, 0
    details: list[tuple[int, float]] = []
    for (level, vals), rng in zip(active, seeds):
        weight = 1.0 if level < 0 else 2.0 ** (level + 1)
        layer_cfg = AEConfig(
            epsilon=config.epsilon / (len(active) * weight),
            alpha=config.alpha / len(active),
            shots_per_round=config.shots_per_round,
            max_m=config.max_m,
            seed=rng,
            c=config.c,
            max_rounds=config.max_rounds,
            max_queries=config.max_queries,
        )
        part = estimate_mean_bounded(dist, Payoff(vals), layer_cfg)
        total += weight * part.mean_hat
        lo_total += weight * part.ci[0]
        hi_total += weight * part.ci[1]
        queries += part.samples_or_queries
        details.append((level, weight * part.mean_hat))
    return MCResult(total, (lo_total, hi_total), queries, "quantum-dyadic", layers=details)


def estimate_mean_signed(dist: DiscreteDistribution, payoff_pos: Payoff,
                         payoff_neg: Payoff, config: AEConfig) -> MCResult:
    """Convenience wrapper for f = f_plus - f_minus via two dyadic runs."""
    pos = estimate_mean_dyadic(dist, payoff_pos, config)
    neg = estimate_mean_dyadic(dist, payoff_neg, config)
    return MCResult(
        pos.mean_hat - neg.mean_hat,
        (pos.ci[0] - neg.ci[1], pos.ci[1] - neg.ci[0]),
        pos.samples_or_queries + neg.samples_or_queries,
        "quantum-dyadic",
    )


def classical_mc_mean(dist: DiscreteDistribution, payoff: Payoff, samples: int,
                      seed: Seed | np.random.Generator) -> MCResult:
    """Plain Monte Carlo: i.i.d. draws from q, sample mean, 95% normal CI."""
    _check_match(dist, payoff)
    if samples < 2:
        raise ValueError("need at least 2 samples")
    rng = make_rng(seed)
    idx = rng.choice(dist.probs.shape[0], size=samples, p=dist.probs)
    vals = payoff.values[idx]
    mean = float(vals.mean())
    sd = float(vals.std(ddof=1))
    half = _Z95 * sd / math.sqrt(samples)
    return MCResult(mean, (mean - half, mean + half), samples, "classical")


def discretize_lognormal_power_option(s0: float, r: float, sigma: float, t: float,
                                      p_exponent: float, k_strike: float,
                                      n_bits: int, z_max: float,
                                      ) -> tuple[DiscreteDistribution, Payoff]:
    """Grid model of a European power option under geometric Brownian motion.

    The driving normal variable is discretized on 2^n_bits equally spaced
    points over [-z_max, z_max] with weights proportional to the standard
    normal density; the terminal price is S(z) = s0*exp(sigma*sqrt(t)*z +
    (r - sigma^2/2)*t) and the payoff max(0, S^p - K) is rescaled into [0, 1]
    by its grid maximum. The factor is reported via ``Payoff.scale`` so
    callers can invert the rescaling; a zero scale flags an identically-zero
    (degenerate) payoff.
    """
    if s0 <= 0:
        raise ValueError("s0 must be positive")
    if sigma <= 0 or t <= 0:
        raise ValueError("sigma and t must be positive")
    if n_bits < 2:
        raise ValueError("need at least 2 grid bits")
    z = np.linspace(-z_max, z_max, 1 << n_bits)
    weights = np.exp(-0.5 * z * z)
    dist = DiscreteDistribution(weights / weights.sum(), n_bits)
    s_t = s0 * np.exp(sigma * math.sqrt(t) * z + (r - 0.5 * sigma * sigma) * t)
    raw = np.maximum(0.0, s_t ** p_exponent - k_strike)
    top = float(raw.max())
    if top == 0.0:
        return dist, Payoff(np.zeros_like(raw), scale=0.0)
    return dist, Payoff(raw / top, scale=top)
