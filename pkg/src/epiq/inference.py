"""Finite discrete experiments and the classical inference principles on them.

A DiscreteExperiment is a finite parameter grid crossed with a finite sample
space and a likelihood matrix.  On that substrate, sufficiency and
ancillarity are exhaustively checkable, the coin-flip mixture of two
experiments realizes the likelihood-principle construction, confidence
distributions invert one-sided bound rules, and variance estimation via
error contrasts is verified independent of the contrast basis chosen.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

import numpy as np

from .errors import (
    GridMismatch,
    NonMonotoneRule,
    NotADistribution,
    NotProportional,
    RankDeficient,
    ThetaOutOfRange,
)
from .spin import Direction, transition_probability
from .tolerances import TOL


@dataclass(frozen=True)
class DiscreteExperiment:
    """Likelihood matrix p[z][k] = P(outcome z | theta = theta_grid[k])."""

    theta_grid: tuple[float, ...]
    outcomes: tuple[Hashable, ...]
    likelihood: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.likelihood, dtype=float)
        object.__setattr__(self, "likelihood", p)
        object.__setattr__(self, "theta_grid", tuple(float(t) for t in self.theta_grid))
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if p.shape != (len(self.outcomes), len(self.theta_grid)):
            raise ValueError(f"likelihood shape {p.shape} does not match labels")
        if np.any(p < 0.0):
            raise NotADistribution("negative likelihood entry")
        col_sums = p.sum(axis=0)
        if np.max(np.abs(col_sums - 1.0)) > TOL.column:
            raise NotADistribution(f"columns must sum to 1, got {col_sums}")

    @property
    def n_outcomes(self) -> int:
        return len(self.outcomes)

    @property
    def n_theta(self) -> int:
        return len(self.theta_grid)

    def outcome_index(self, z: Hashable) -> int:
        return self.outcomes.index(z)

    @classmethod
    def from_json(cls, text: str) -> "DiscreteExperiment":
        doc = json.loads(text)
        outcomes = tuple(
            tuple(z) if isinstance(z, list) else z for z in doc["outcomes"]
        )
        return cls(
            theta_grid=tuple(doc["theta_grid"]),
            outcomes=outcomes,
            likelihood=np.asarray(doc["likelihood"], dtype=float),
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "theta_grid": list(self.theta_grid),
                "outcomes": [list(z) if isinstance(z, tuple) else z for z in self.outcomes],
                "likelihood": self.likelihood.tolist(),
            }
        )


@dataclass(frozen=True)
class Statistic:
    """Total map from outcomes to a finite label set."""

    mapping: dict

    def __call__(self, z: Hashable) -> Hashable:
        return self.mapping[z]

    def levels(self, exp: DiscreteExperiment) -> list[Hashable]:
        seen: list[Hashable] = []
        for z in exp.outcomes:
            if z not in self.mapping:
                raise ValueError(f"statistic undefined at outcome {z!r}")
            if self.mapping[z] not in seen:
                seen.append(self.mapping[z])
        return seen

    @classmethod
    def from_function(cls, exp: DiscreteExperiment, f: Callable) -> "Statistic":
        return cls(mapping={z: f(z) for z in exp.outcomes})

    @classmethod
    def from_json(cls, text: str) -> "Statistic":
        doc = json.loads(text)
        return cls(mapping=dict(doc["map"]))


def is_sufficient(exp: DiscreteExperiment, t: Statistic) -> bool:
    """Conditional-law check plus the factorization it is equivalent to.

    True iff for every level of t with positive probability under some theta,
    the conditional distribution of the outcome given the level is the same
    for all theta that can reach the level.
    """
    p = exp.likelihood
    levels = t.levels(exp)
    level_of = np.array([levels.index(t(z)) for z in exp.outcomes])
    g = np.zeros((len(levels), exp.n_theta))
    for s in range(len(levels)):
        g[s] = p[level_of == s].sum(axis=0)

    h = np.zeros(exp.n_outcomes)
    for z in range(exp.n_outcomes):
        s = level_of[z]
        reachable = g[s] > 0.0
        if not reachable.any():
            continue
        cond = p[z, reachable] / g[s, reachable]
        if cond.max() - cond.min() > TOL.match:
            return False
        h[z] = cond[0]
    # factorization f(z|theta) = g(t(z)|theta) h(z) must rebuild the matrix
    rebuilt = g[level_of] * h[:, None]
    return bool(np.max(np.abs(rebuilt - p)) <= TOL.match)


def is_ancillary(exp: DiscreteExperiment, u: Statistic) -> bool:
    """True iff the marginal law of u(z) is the same for every theta."""
    p = exp.likelihood
    levels = u.levels(exp)
    level_of = np.array([levels.index(u(z)) for z in exp.outcomes])
    for s in range(len(levels)):
        marginal = p[level_of == s].sum(axis=0)
        if marginal.max() - marginal.min() > TOL.match:
            return False
    return True


def birnbaum_mixture(e1: DiscreteExperiment, e2: DiscreteExperiment) -> DiscreteExperiment:
    """Fair-coin compound experiment: observe (j, z_j) with j chosen 1/2-1/2."""
    if e1.theta_grid != e2.theta_grid:
        raise GridMismatch("mixture components need identical theta grids")
    outcomes = tuple((1, z) for z in e1.outcomes) + tuple((2, z) for z in e2.outcomes)
    likelihood = np.vstack([0.5 * e1.likelihood, 0.5 * e2.likelihood])
    return DiscreteExperiment(e1.theta_grid, outcomes, likelihood)


def likelihoods_proportional(
    e1: DiscreteExperiment, z1: Hashable, e2: DiscreteExperiment, z2: Hashable
) -> float | None:
    """The constant c with p1(z1|theta) = c * p2(z2|theta), or None.

    Ratios are compared relatively over grid points where both rows exceed
    1e-300; a zero against a nonzero kills proportionality.
    """
    if e1.theta_grid != e2.theta_grid:
        raise GridMismatch("experiments need identical theta grids")
    row1 = e1.likelihood[e1.outcome_index(z1)]
    row2 = e2.likelihood[e2.outcome_index(z2)]
    floor = 1e-300
    both = (row1 > floor) & (row2 > floor)
    if not both.any():
        return None
    if np.any((row1 > floor) != (row2 > floor)):
        return None
    ratios = row1[both] / row2[both]
    c = float(ratios[0])
    if np.max(np.abs(ratios / c - 1.0)) > TOL.match:
        return None
    return c


def birnbaum_statistic(
    e1: DiscreteExperiment,
    z1_star: Hashable,
    e2: DiscreteExperiment,
    z2_star: Hashable,
) -> Statistic:
    """The mixture statistic that collapses (1, z1*) and (2, z2*) to one level.

    Requires proportional likelihood rows; the result is sufficient on the
    mixture, which is the content of the theorem it realizes.
    """
    c = likelihoods_proportional(e1, z1_star, e2, z2_star)
    if c is None:
        raise NotProportional(
            f"rows at {z1_star!r} and {z2_star!r} are not proportional over the grid"
        )
    mapping = {}
    for z in e1.outcomes:
        mapping[(1, z)] = (1, z)
    for z in e2.outcomes:
        mapping[(2, z)] = (1, z1_star) if z == z2_star else (2, z)
    return Statistic(mapping=mapping)


# --- canonical experiment builders ------------------------------------------------


def bernoulli_sequence_experiment(n: int, theta_grid: Sequence[float]) -> DiscreteExperiment:
    """All 2^n outcome sequences of n independent success/failure trials."""
    outcomes = []
    rows = []
    for bits in range(2**n):
        seq = tuple((bits >> i) & 1 for i in range(n))
        outcomes.append(seq)
        k = sum(seq)
        rows.append([t**k * (1.0 - t) ** (n - k) for t in theta_grid])
    return DiscreteExperiment(tuple(theta_grid), tuple(outcomes), np.array(rows))


def binomial_experiment(n: int, theta_grid: Sequence[float]) -> DiscreteExperiment:
    """Success counts of n trials."""
    rows = [
        [math.comb(n, z) * t**z * (1.0 - t) ** (n - z) for t in theta_grid]
        for z in range(n + 1)
    ]
    return DiscreteExperiment(tuple(theta_grid), tuple(range(n + 1)), np.array(rows))


def negative_binomial_experiment(
    n_failures: int, theta_grid: Sequence[float], max_successes: int = 40
) -> DiscreteExperiment:
    """Success counts observed while waiting for a fixed number of failures.

    The unbounded tail is lumped into one explicit 'tail' outcome so the
    columns still sum to 1 exactly.
    """
    rows = []
    for s in range(max_successes + 1):
        rows.append(
            [
                math.comb(s + n_failures - 1, s) * t**s * (1.0 - t) ** n_failures
                for t in theta_grid
            ]
        )
    body = np.array(rows)
    tail = 1.0 - body.sum(axis=0)
    likelihood = np.vstack([body, np.clip(tail, 0.0, None)])
    outcomes = tuple(range(max_successes + 1)) + ("tail",)
    return DiscreteExperiment(tuple(theta_grid), outcomes, likelihood)


def four_cell_probabilities(theta: float) -> np.ndarray:
    """Cell probabilities ((1+t)/6, (2-t)/6, (1-t)/6, (2+t)/6)."""
    if not -1.0 < theta < 1.0:
        raise ThetaOutOfRange(f"theta must lie in (-1, 1), got {theta}")
    return np.array([1.0 + theta, 2.0 - theta, 1.0 - theta, 2.0 + theta]) / 6.0


def four_cell_experiment(theta_grid: Sequence[float]) -> DiscreteExperiment:
    """A single draw from the four-cell table, one outcome per cell."""
    rows = np.column_stack([four_cell_probabilities(t) for t in theta_grid])
    return DiscreteExperiment(tuple(theta_grid), (1, 2, 3, 4), rows)


# --- the four-cell conditional analysis ---------------------------------------------


@dataclass(frozen=True)
class MultinomialReport:
    theta: float
    n: int
    expected_counts: np.ndarray
    mle_full: float
    mle_given_u1: float
    mle_given_u2: float
    avar_u1: float
    avar_u2: float


def _full_score(theta: float, counts: np.ndarray) -> float:
    z1, z2, z3, z4 = counts
    return z1 / (1 + theta) - z2 / (2 - theta) - z3 / (1 - theta) + z4 / (2 + theta)


def _solve_scalar(f: Callable[[float], float], lo: float, hi: float) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError("score does not change sign on the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def multinomial_conditional_analysis(theta: float, n: int) -> MultinomialReport:
    """Conditional inference in the four-cell table given either ancillary count.

    u1 = z1 + z2 and u2 = z1 + z3 both have theta-free marginals.  Conditional
    inference given u_i is carried out inside the cell pair the ancillary
    splits off: z1 | u1 ~ Bin(u1, (1+theta)/3) and z1 | u2 ~ Bin(u2,
    (1+theta)/2).  At the probability-expected cell counts both conditional
    estimators recover theta, while the conditional information (numerical
    second derivative of the conditional log-likelihood, step 1e-4) differs:
    at theta = 0 the variances are 4/n vs 3/n.
    """
    if not -1.0 < theta < 1.0:
        raise ThetaOutOfRange(f"theta must lie in (-1, 1), got {theta}")
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = n * four_cell_probabilities(theta)
    z1, z2, z3, _ = counts
    u1 = z1 + z2
    u2 = z1 + z3

    eps = 1e-9
    mle_full = _solve_scalar(lambda t: _full_score(t, counts), -1 + eps, 1 - eps)
    mle_u1 = (2.0 * z1 - z2) / u1
    mle_u2 = (z1 - z3) / u2

    def loglik_u1(t: float) -> float:
        q = (1.0 + t) / 3.0
        return z1 * math.log(q) + z2 * math.log(1.0 - q)

    def loglik_u2(t: float) -> float:
        q = (1.0 + t) / 2.0
        return z1 * math.log(q) + z3 * math.log(1.0 - q)

    h = 1e-4
    info_u1 = -(loglik_u1(theta + h) - 2.0 * loglik_u1(theta) + loglik_u1(theta - h)) / h**2
    info_u2 = -(loglik_u2(theta + h) - 2.0 * loglik_u2(theta) + loglik_u2(theta - h)) / h**2
    return MultinomialReport(
        theta=theta,
        n=n,
        expected_counts=counts,
        mle_full=mle_full,
        mle_given_u1=mle_u1,
        mle_given_u2=mle_u2,
        avar_u1=1.0 / info_u1,
        avar_u2=1.0 / info_u2,
    )


# --- confidence distributions ----------------------------------------------------------


@dataclass(frozen=True)
class ConfidenceDistribution:
    """Distribution *for* a grid-valued parameter built from one-sided bounds."""

    support: tuple[float, ...]
    cdf: tuple[float, ...]

    def __post_init__(self):
        c = np.asarray(self.cdf, dtype=float)
        if np.any(np.diff(c) < -1e-12):
            raise NonMonotoneRule("cdf must be nondecreasing")
        if abs(c[-1] - 1.0) > TOL.dist:
            raise NonMonotoneRule(f"cdf must end at 1, got {c[-1]!r}")


def exact_upper_bound_rule(exp: DiscreteExperiment) -> Callable[[float, Hashable], float]:
    """Conservative one-sided upper bound built from the likelihood matrix.

    Outcomes are ordered as listed; the bound at confidence gamma is the
    smallest grid value whose lower tail probability of the observed outcome
    has dropped to 1 - gamma (the top grid value if none has).
    """
    cumulative = np.cumsum(exp.likelihood, axis=0)

    def rule(gamma: float, z: Hashable) -> float:
        tail = cumulative[exp.outcome_index(z)]
        hit = np.flatnonzero(tail <= (1.0 - gamma) + 1e-15)
        if hit.size == 0:
            return exp.theta_grid[-1]
        return exp.theta_grid[int(hit[0])]

    return rule


def confidence_distribution(
    exp: DiscreteExperiment,
    upper_bound: Callable[[float, Hashable], float],
    z: Hashable,
    monotone_probe: int = 41,
) -> ConfidenceDistribution:
    """Invert a one-sided upper-bound rule into a distribution over the grid.

    H(u) = sup{gamma : bound(gamma) <= u}, found by bisection; the rule must
    be nondecreasing in gamma (spot-checked on a probe grid).
    """
    probes = np.linspace(0.0, 1.0, monotone_probe)
    bounds = [upper_bound(g, z) for g in probes]
    if np.any(np.diff(bounds) < -1e-12):
        raise NonMonotoneRule(f"upper bound decreases in gamma at outcome {z!r}")

    def h_at(u: float) -> float:
        if upper_bound(0.0, z) > u + 1e-12:
            return 0.0
        if upper_bound(1.0, z) <= u + 1e-12:
            return 1.0
        lo, hi = 0.0, 1.0  # bound(lo) <= u < bound(hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if upper_bound(mid, z) <= u + 1e-12:
                lo = mid
            else:
                hi = mid
        return lo

    cdf = np.maximum.accumulate([h_at(u) for u in exp.theta_grid])
    return ConfidenceDistribution(support=exp.theta_grid, cdf=tuple(cdf))


def confidence_uniformity(
    exp: DiscreteExperiment,
    upper_bound: Callable[[float, Hashable], float],
    theta_index: int,
) -> list[tuple[float, float]]:
    """Attained values of the distribution at the true theta, with probabilities.

    For non-exchangeable models exact uniformity fails at boundary outcomes,
    so the attained (value, probability) pairs are reported rather than
    asserted uniform.
    """
    truth = exp.theta_grid[theta_index]
    k = theta_index
    attained: dict[float, float] = {}
    for z in exp.outcomes:
        cd = confidence_distribution(exp, upper_bound, z)
        h = cd.cdf[list(cd.support).index(truth)]
        match = next((v for v in attained if abs(v - h) <= 1e-9), None)
        key = match if match is not None else h
        attained[key] = attained.get(key, 0.0) + float(exp.likelihood[exp.outcome_index(z), k])
    return sorted(attained.items())


# --- variance estimation from error contrasts -------------------------------------------


def null_space_basis(x: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Orthonormal columns spanning the null space of x^T (so A^T x = 0).

    A seeded generator rotates the basis inside the null space, for checking
    that downstream estimates do not depend on the choice.
    """
    x = np.asarray(x, dtype=float)
    n, p = x.shape
    u, s, _ = np.linalg.svd(x, full_matrices=True)
    a = u[:, p:]
    if rng is not None:
        g = rng.standard_normal((n - p, n - p))
        q, r = np.linalg.qr(g)
        a = a @ (q * np.sign(np.diag(r)))
    return a


def reml_estimate(y: np.ndarray, x: np.ndarray) -> float:
    """Error-contrast variance estimate ||A^T y||^2 / (n - p), A^T x = 0.

    Computed through an explicit contrast basis and verified against a second,
    randomly rotated basis; the two must agree to 1e-10.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise ValueError(f"shape mismatch: y {y.shape}, x {x.shape}")
    n, p = x.shape
    if n - p < 1 or np.linalg.matrix_rank(x) < p:
        raise RankDeficient(f"design must have full column rank p < n (n={n}, p={p})")
    a = null_space_basis(x)
    contrasts = a.T @ y
    estimate = float(contrasts @ contrasts) / (n - p)
    check_basis = null_space_basis(x, rng=np.random.default_rng(59))
    check = float((check_basis.T @ y) @ (check_basis.T @ y)) / (n - p)
    if abs(estimate - check) > 1e-10 * max(1.0, abs(estimate)):
        raise AssertionError("estimate depends on the contrast basis")
    return estimate


# --- treatment-contrast sign probability --------------------------------------------------

# prior covariance of the two standardized treatment contrasts
CONTRAST_PRIOR_COV = np.array([[4.0 / 3.0, -4.0 / 9.0], [-4.0 / 9.0, 4.0 / 3.0]])


def contrast_sign_mc(
    n_samples: int, seed: int, cov: np.ndarray = CONTRAST_PRIOR_COV
) -> tuple[float, float]:
    """Monte Carlo estimate (with standard error) of P(second > 0 | first > 0)
    for a centered bivariate normal pair of treatment contrasts."""
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(np.asarray(cov, dtype=float))
    draws = rng.standard_normal((n_samples, 2)) @ chol.T
    first_positive = draws[:, 0] > 0.0
    m = int(first_positive.sum())
    estimate = float(np.count_nonzero(draws[first_positive, 1] > 0.0)) / m
    return estimate, math.sqrt(estimate * (1.0 - estimate) / m)


def contrast_sign_group() -> float:
    """The symmetry-based answer: the cosine transition law between the two
    contrast directions, (1 + a.b)/2 = 1/3."""
    a = Direction.normalized(-1.0, -1.0, -1.0)
    b = Direction.normalized(-1.0, 1.0, 1.0)
    return transition_probability(a, 1, b, 1)


# --- entropy correlation ----------------------------------------------------------------


def entropy(p: Sequence[float]) -> float:
    """Shannon entropy -sum p ln p in nats, with 0 ln 0 = 0.

    Accumulated with fsum, so the value does not depend on term order and
    entropy differences cancel exactly under relabelings.
    """
    q = np.asarray(p, dtype=float).reshape(-1)
    if np.any(q < 0.0):
        raise NotADistribution("negative probability")
    if abs(math.fsum(q) - 1.0) > TOL.dist:
        raise NotADistribution(f"probabilities sum to {math.fsum(q)!r}")
    return -math.fsum(v * math.log(v) for v in q if v > 0.0)


@dataclass(frozen=True)
class JointPMF:
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        object.__setattr__(self, "table", t)
        if t.ndim != 2:
            raise NotADistribution("joint table must be 2-d")
        if np.any(t < 0.0) or abs(t.sum() - 1.0) > TOL.dist:
            raise NotADistribution("joint table is not a probability distribution")

    @property
    def row_marginal(self) -> np.ndarray:
        return np.array([math.fsum(row) for row in self.table])

    @property
    def col_marginal(self) -> np.ndarray:
        return np.array([math.fsum(col) for col in self.table.T])


def entropy_correlation(joint: JointPMF) -> float:
    """H(rows) + H(cols) - H(joint): nonnegative, zero iff the table factorizes."""
    return (
        entropy(joint.row_marginal)
        + entropy(joint.col_marginal)
        - entropy(joint.table.reshape(-1))
    )


__all__ = [
    "DiscreteExperiment",
    "Statistic",
    "ConfidenceDistribution",
    "JointPMF",
    "MultinomialReport",
    "CONTRAST_PRIOR_COV",
    "is_sufficient",
    "is_ancillary",
    "birnbaum_mixture",
    "birnbaum_statistic",
    "likelihoods_proportional",
    "bernoulli_sequence_experiment",
    "binomial_experiment",
    "negative_binomial_experiment",
    "four_cell_probabilities",
    "four_cell_experiment",
    "multinomial_conditional_analysis",
    "exact_upper_bound_rule",
    "confidence_distribution",
    "confidence_uniformity",
    "null_space_basis",
    "reml_estimate",
    "contrast_sign_mc",
    "contrast_sign_group",
    "entropy",
    "entropy_correlation",
]
