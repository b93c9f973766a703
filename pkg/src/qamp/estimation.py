"""Grover-style quantum amplitude estimation with classical inversion.

Given a state preparation A with A|0> = sqrt(p)|good> + sqrt(1-p)|rest>, the
iterate G = D_psi * O (oracle flips the good component, diffusion reflects
about A|0>) rotates the two-dimensional good/rest plane by 2*phi per
application, sin(phi) = sqrt(p). Measuring after m iterates hits the good
set with probability sin^2((2m+1)*phi), which an arcsin inversion turns into
an estimate of phi and hence p.

The adaptive schedule below chooses depths m so that the scaled confidence
bracket [(2m+1)*phi_lo, (2m+1)*phi_hi] always sits inside one monotone
half-period of sin^2 (with a safety margin at the half-period's upper end),
keeping the inversion single-valued without knowing phi in advance. Depth
grows as the bracket narrows, shots at a repeated depth pool and double, and
the run stops once the bracket certifies the target epsilon. Total cost in
state-preparation queries is O(1/epsilon): each shot at depth m costs 2m+1
invocations of A or its adjoint (classical sample = 1 query).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import ndtri
from scipy.stats import beta as _beta

from qamp._backend import kernels as _k
from qamp.prep import StatePreparation, hadamard_all
from qamp.rng import Seed, make_rng
from qamp.statevector import Statevector, as_predicate

_HALF_PI = math.pi / 2.0
_DEGENERATE_TOL = 1e-14


class EstimationProblem:
    """A state preparation plus the good-state predicate it is scored on."""

    def __init__(self, state_prep: StatePreparation, good, true_p: float | None = None):
        self.state_prep = state_prep
        self.good = as_predicate(good)
        self.true_p = true_p
        self._good_mask: np.ndarray | None = None
        self._base: Statevector | None = None
        self._pm_cache: dict[int, float] = {}

    @property
    def num_qubits(self) -> int:
        return self.state_prep.num_qubits

    def good_mask(self) -> np.ndarray:
        if self._good_mask is None:
            self._good_mask = self.good.mask(self.num_qubits)
        return self._good_mask

    def prepared(self) -> Statevector:
        """A|0...0>, computed once and copied out."""
        if self._base is None:
            self._base = self.state_prep.prepare()
        return self._base.copy()

    def amplitude(self) -> float:
        """Exact p from the statevector (not the optional true_p reference)."""
        return self.rotated_probability(0)

    def rotated_probability(self, m: int) -> float:
        """Exact good-set probability of G^m A|0>, cached per depth."""
        got = self._pm_cache.get(m)
        if got is None:
            sv = self.prepared()
            if m > 0:
                grover_operator(self).apply(sv, times=m)
            got = _k.masked_probability(sv.amplitudes, self.good_mask())
            self._pm_cache[m] = got
        return got


class GroverOperator:
    """G = A (2|0><0| - I) A† (I - 2|w><w|), applied in place.

    ``degenerate`` is set when p is 0 or 1: G then acts as the identity
    (up to global phase) on the prepared ray and the rotation law is vacuous.
    """

    def __init__(self, problem: EstimationProblem):
        self.problem = problem
        p = problem.amplitude()
        self.degenerate = p < _DEGENERATE_TOL or p > 1.0 - _DEGENERATE_TOL
        n = 1 << problem.num_qubits
        self._not_zero = np.ones(n, dtype=np.uint8)
        self._not_zero[0] = 0

    def apply(self, sv: Statevector, times: int = 1) -> None:
        prep = self.problem.state_prep
        good = self.problem.good_mask()
        for _ in range(times):
            _k.flip_signs(sv.amplitudes, good)        # I - 2|w><w|
            prep.apply_inverse(sv)
            _k.flip_signs(sv.amplitudes, self._not_zero)  # 2|0><0| - I
            prep.apply(sv)


def grover_operator(problem: EstimationProblem) -> GroverOperator:
    return GroverOperator(problem)


@dataclass
class AEConfig:
    """Knobs for :func:`estimate`.

    epsilon: target absolute error on p.
    alpha: overall significance level; split evenly across rounds.
    shots_per_round: repetitions per refinement round (phase one uses more).
    max_m: hard cap on the Grover depth.
    seed: root seed for the whole run.
    c: depth target ceil(c/epsilon) that bounds the deepest round.
    max_rounds: bound on the number of adaptive rounds.
    max_queries: optional hard budget; the run stops (flagged) when exceeded.
    """

    epsilon: float
    alpha: float = 0.05
    shots_per_round: int = 100
    max_m: int = 1 << 20
    seed: Seed | np.random.Generator = 0
    c: float = 1.0
    max_rounds: int = 30
    max_queries: int | None = None

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.shots_per_round < 1:
            raise ValueError("shots_per_round must be >= 1")
        if self.max_m < 0:
            raise ValueError("max_m must be >= 0")


@dataclass
class EstimationResult:
    """Point estimate, confidence interval, and exact query accounting."""

    p_hat: float
    phi_hat: float
    ci: tuple[float, float]
    queries: int
    rounds: list[tuple[int, int, int]] = field(default_factory=list)  # (m, shots, hits)
    degenerate: bool = False
    below_target: bool = False


class CountEstimate(NamedTuple):
    k_hat: float
    exact: bool
    result: EstimationResult


def clopper_pearson(hits: int, shots: int, alpha: float) -> tuple[float, float]:
    """Exact binomial confidence interval at level 1 - alpha."""
    lo = float(_beta.ppf(alpha / 2.0, hits, shots - hits + 1)) if hits > 0 else 0.0
    hi = float(_beta.ppf(1.0 - alpha / 2.0, hits + 1, shots - hits)) if hits < shots else 1.0
    return lo, hi


def measure_good_probability(problem: EstimationProblem, m: int, shots: int,
                             seed: Seed | np.random.Generator) -> tuple[float, int]:
    """Run ``shots`` prepare-G^m-measure repetitions; return (hits/shots, hits).

    The simulator computes the exact outcome probability sin^2((2m+1)*phi)
    from the statevector and draws the hit count binomially, which is
    distribution-identical to shot-by-shot sampling.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = make_rng(seed)
    p_m = problem.rotated_probability(m)
    hits = int(rng.binomial(shots, p_m))
    return hits / shots, hits


def invert_amplitude(p_m_hat: float, m: int) -> tuple[float, float]:
    """First-quadrant inversion: phi_hat = arcsin(sqrt(p_m_hat))/(2m+1).

    Valid when the caller guarantees (2m+1)*phi lies in [0, pi/2]; the
    adaptive schedule uses the half-period generalization internally.
    """
    clipped = min(1.0, max(0.0, p_m_hat))
    phi_hat = math.asin(math.sqrt(clipped)) / (2 * m + 1)
    return phi_hat, math.sin(phi_hat) ** 2


def _invert_in_half_period(p_m: float, k_odd: int, j: int) -> float:
    """Invert sin^2(K*phi) = p_m knowing K*phi is in [j*pi/2, (j+1)*pi/2]."""
    u = math.asin(math.sqrt(min(1.0, max(0.0, p_m))))
    if j % 2 == 0:
        theta = (j // 2) * math.pi + u
    else:
        theta = ((j + 1) // 2) * math.pi - u
    return theta / k_odd


_BRANCH_MARGIN = 0.05  # keep the scaled bracket 5% clear of the half-period end


def _largest_safe_m(phi_lo: float, phi_hi: float, cap: int) -> int:
    """Largest depth whose scaled bracket fits one monotone half-period."""
    for m in range(cap, 0, -1):
        k = 2 * m + 1
        a, b = k * phi_lo, k * phi_hi
        j = int(a // _HALF_PI)
        if b <= (j + 1 - _BRANCH_MARGIN) * _HALF_PI:
            return m
    return 0


_DEPTH_HEADROOM = 1.5  # clip depth to ~1.5x what certifying epsilon needs


def _phase1_shots(config: AEConfig) -> int:
    # coarse bracket only: sqrt(50/eps) shots capped at 1000 so loose-epsilon
    # runs stay cheap, never fewer than one round's worth
    return max(config.shots_per_round, min(math.ceil(math.sqrt(50.0 / config.epsilon)), 1000))


def estimate(problem: EstimationProblem, config: AEConfig) -> EstimationResult:
    """Adaptive amplitude estimation; |p_hat - p| <= epsilon w.p. >= 1 - alpha.

    Phase one samples at depth 0 to bracket phi. Refinement rounds then pick
    the largest branch-safe depth (clipped near the certification target,
    steering the scaled angle toward the sensitive middle of its half-period),
    intersect the inverted confidence intervals, and stop once the bracket
    half-width reaches epsilon. The reported p_hat is the bracket midpoint,
    so certification carries over to the point estimate.
    """
    rng = make_rng(config.seed)
    eps = config.epsilon
    a_round = config.alpha / config.max_rounds
    z_round = float(ndtri(1.0 - a_round / 2.0))

    r0 = _phase1_shots(config)
    _, hits = measure_good_probability(problem, 0, r0, rng)
    rounds = [(0, r0, hits)]
    queries = r0
    pooled: dict[int, tuple[int, int]] = {0: (hits, r0)}

    # Boundary hit counts cannot bracket phi away from 0 or pi/2, so no
    # refinement depth is branch-safe. Pool further depth-0 rounds until the
    # one-sided interval certifies epsilon (a genuinely degenerate amplitude)
    # or a non-boundary count appears and the normal schedule takes over.
    while pooled[0][0] in (0, pooled[0][1]):
        h_tot, s_tot = pooled[0]
        lo, hi = clopper_pearson(h_tot, s_tot, a_round)
        at_zero = h_tot == 0
        certified = hi <= eps if at_zero else (1.0 - lo) <= eps
        out_of_budget = (len(rounds) >= config.max_rounds
                         or (config.max_queries is not None and queries >= config.max_queries))
        if certified or out_of_budget:
            if at_zero:
                return EstimationResult(0.0, 0.0, (0.0, hi), queries, rounds,
                                        degenerate=True, below_target=not certified)
            return EstimationResult(1.0, _HALF_PI, (lo, 1.0), queries, rounds,
                                    degenerate=True, below_target=not certified)
        shots = min(s_tot, config.shots_per_round << 12)
        _, h = measure_good_probability(problem, 0, shots, rng)
        rounds.append((0, shots, h))
        queries += shots
        pooled[0] = (h_tot + h, s_tot + shots)

    lo, hi = clopper_pearson(*pooled[0], a_round)
    phi_lo, phi_hi = math.asin(math.sqrt(lo)), math.asin(math.sqrt(hi))
    cap = min(config.max_m, max(1, math.ceil(config.c / eps)))
    m_prev, repeats = 0, len(rounds) - 1
    below_target = False

    while True:
        p_lo, p_hi = math.sin(phi_lo) ** 2, math.sin(phi_hi) ** 2
        if (p_hi - p_lo) / 2.0 <= eps:
            break
        if len(rounds) >= config.max_rounds:
            below_target = True
            break
        if config.max_queries is not None and queries >= config.max_queries:
            below_target = True
            break

        base_shots = config.shots_per_round
        phi_mid = 0.5 * (phi_lo + phi_hi)
        # depth beyond ~1.5x the certification need only wastes queries
        cp_halfwidth = z_round * 0.5 / math.sqrt(base_shots)
        k_clip = math.ceil(_DEPTH_HEADROOM * cp_halfwidth
                           * max(math.sin(2.0 * phi_mid), 0.05) / eps)
        m_clip = max(1, k_clip // 2)
        m = _largest_safe_m(phi_lo, phi_hi, min(cap, m_clip))

        repeats = repeats + 1 if m == m_prev else 0
        shots = base_shots * (1 << min(repeats, 12))
        _, h = measure_good_probability(problem, m, shots, rng)
        k = 2 * m + 1
        rounds.append((m, shots, h))
        queries += shots * k

        ph, pr = pooled.get(m, (0, 0))
        pooled[m] = (ph + h, pr + shots)
        l_m, h_m = clopper_pearson(*pooled[m], a_round)
        j = int((k * phi_mid) // _HALF_PI)
        new_lo = _invert_in_half_period(l_m if j % 2 == 0 else h_m, k, j)
        new_hi = _invert_in_half_period(h_m if j % 2 == 0 else l_m, k, j)
        cand_lo, cand_hi = max(phi_lo, new_lo), min(phi_hi, new_hi)
        if cand_hi < cand_lo:
            # disjoint at round level (probability <= alpha_round): trust the
            # fresh, deeper measurement
            cand_lo, cand_hi = max(new_lo, 0.0), min(max(new_hi, 0.0), _HALF_PI)
        phi_lo, phi_hi = cand_lo, cand_hi
        m_prev = m

    p_lo, p_hi = math.sin(phi_lo) ** 2, math.sin(phi_hi) ** 2
    p_hat = 0.5 * (p_lo + p_hi)
    phi_hat = math.asin(math.sqrt(p_hat))
    return EstimationResult(p_hat, phi_hat, (p_lo, p_hi), queries, rounds,
                            below_target=below_target)


def estimate_count(num_qubits: int, marked, config: AEConfig) -> CountEstimate:
    """Estimate how many of the 2^n basis states are marked.

    Runs :func:`estimate` with the uniform superposition as the state
    preparation, so k = N * p. When epsilon < 1/(2N) the estimate pins the
    integer count exactly and is rounded (exact-count mode).
    """
    pred = as_predicate(marked)
    n_states = 1 << num_qubits
    problem = EstimationProblem(hadamard_all(num_qubits), pred)
    result = estimate(problem, config)
    k_hat = n_states * result.p_hat
    exact = config.epsilon < 1.0 / (2.0 * n_states)
    if exact:
        k_hat = float(round(k_hat))
    return CountEstimate(k_hat, exact, result)
