"""Quantum-state formalism on small finite-dimensional spaces.

States, observables, effects and density operators, with the probability
rules that connect them: squared-overlap transition probabilities, trace
expectations, POVM outcome distributions, projective collapse, and the
reconstruction of a density operator from an additive normalized measure
on effects.  The measure reconstruction never evaluates the functional
outside its stated domain: off-diagonal entries are recovered from
explicitly effect-valued Hermitian probe combinations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimMismatch,
    IncompletePOVM,
    LikelihoodOutOfRange,
    NotAdditive,
    NotNormalized,
    NotOrthonormal,
    NotProjector,
    ZeroProbability,
)
from .linalg import (
    EigenDecomposition,
    dagger,
    hermitian_eig,
    outer,
    random_ket,
    random_unitary,
    require_hermitian,
    require_unit,
    trace_product,
)
from .tolerances import TOL


class Observable:
    """Hermitian operator with its cached eigendecomposition.

    `values[k]` is the answer attached to eigenvector `vectors[:, k]`.
    """

    def __init__(self, matrix, _eigen: EigenDecomposition | None = None):
        self.matrix = require_hermitian(matrix)
        self.eigen = _eigen if _eigen is not None else hermitian_eig(self.matrix)
        if np.max(np.abs(self.eigen.reconstruct() - self.matrix)) > TOL.recon:
            raise ValueError("spectral reconstruction does not match the matrix")

    @classmethod
    def from_spectrum(cls, values, vectors) -> "Observable":
        values = np.asarray(values, dtype=float)
        vectors = np.asarray(vectors, dtype=complex)
        order = np.argsort(values, kind="stable")
        eigen = EigenDecomposition(values=values[order], vectors=vectors[:, order])
        return cls(eigen.reconstruct(), _eigen=eigen)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def values(self) -> np.ndarray:
        return self.eigen.values

    @property
    def vectors(self) -> np.ndarray:
        return self.eigen.vectors


class DensityOperator:
    """Positive trace-1 operator."""

    def __init__(self, matrix):
        m = require_hermitian(matrix)
        eig = hermitian_eig(m)
        if eig.values[0] < -TOL.psd:
            raise ValueError(f"not positive semidefinite (min eigenvalue {eig.values[0]:.3e})")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TOL.norm:
            raise NotNormalized(f"trace {tr!r} is not 1 within {TOL.norm:.1e}")
        self.matrix = m
        self.eigen = eig

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, ket) -> "DensityOperator":
        v = require_unit(ket)
        return cls(outer(v, v))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim)

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator) -> "DensityOperator":
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        m = a @ dagger(a)
        return cls(m / np.trace(m).real)


class Effect:
    """Hermitian operator with spectrum in [0, 1]."""

    def __init__(self, matrix):
        m = require_hermitian(matrix)
        eig = hermitian_eig(m)
        if eig.values[0] < -TOL.effect or eig.values[-1] > 1.0 + TOL.effect:
            raise ValueError(
                f"spectrum [{eig.values[0]:.3e}, {eig.values[-1]:.3e}] escapes [0, 1]"
            )
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "Effect":
        return cls(np.eye(dim))

    @classmethod
    def projector(cls, ket) -> "Effect":
        v = require_unit(ket)
        return cls(outer(v, v))

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, top: float = 1.0) -> "Effect":
        u = random_unitary(dim, rng)
        w = rng.uniform(0.0, top, size=dim)
        return cls((u * w) @ dagger(u))


@dataclass(frozen=True)
class LikelihoodEffect:
    """An effect assembled from one likelihood row over an orthonormal basis."""

    basis: np.ndarray       # columns are the basis kets
    row: np.ndarray         # likelihood of the observed data under each answer
    effect: Effect


class GPMeasure:
    """Opaque [0,1]-valued functional on effects.

    Only normalization is verified up front; additivity is audited
    empirically (`gpm_axiom_check`, `busch_reconstruct`), so dishonest
    evaluators can be handed in and caught.  Evaluators must be pure.
    """

    def __init__(self, evaluator: Callable[[Effect], float], dim: int):
        self.dim = int(dim)
        self._evaluator = evaluator
        total = float(evaluator(Effect.identity(self.dim)))
        if abs(total - 1.0) > TOL.norm:
            raise NotNormalized(f"mu(I) = {total!r}, not 1 within {TOL.norm:.1e}")

    def __call__(self, effect: Effect) -> float:
        return float(self._evaluator(effect))

    @classmethod
    def from_density(cls, sigma: DensityOperator) -> "GPMeasure":
        return cls(lambda e: trace_product(sigma.matrix, e.matrix).real, sigma.dim)


def born_probability(from_ket, to_ket) -> float:
    """Squared overlap |<from|to>|^2; symmetric in its arguments."""
    a = require_unit(from_ket)
    b = require_unit(to_ket)
    if a.shape != b.shape:
        raise DimMismatch(f"ket dims differ: {a.shape[0]} vs {b.shape[0]}")
    amp = np.vdot(a, b)
    return float(amp.real * amp.real + amp.imag * amp.imag)


def expectation(sigma: DensityOperator, a: Observable) -> float:
    """trace(sigma A): the mean answer of an ideal measurement of A in state sigma."""
    if sigma.dim != a.dim:
        raise DimMismatch(f"dims differ: {sigma.dim} vs {a.dim}")
    return float(trace_product(sigma.matrix, a.matrix).real)


def observable_function(a: Observable, f: Callable[[float], float]) -> Observable:
    """Apply f to the spectrum: same eigenvectors, eigenvalues f(u_k)."""
    values = np.array([f(u) for u in a.values], dtype=float)
    return Observable.from_spectrum(values, a.vectors)


def compatible(a: Observable, b: Observable) -> bool:
    """True iff the operators commute (max-entry norm of [A,B] below tolerance)."""
    if a.dim != b.dim:
        raise DimMismatch(f"dims differ: {a.dim} vs {b.dim}")
    comm = a.matrix @ b.matrix - b.matrix @ a.matrix
    return float(np.max(np.abs(comm))) <= TOL.commute


def likelihood_effect(basis: Sequence, row: Sequence[float]) -> LikelihoodEffect:
    """Assemble sum_k row[k] |k><k| over an orthonormal set of kets."""
    cols = np.column_stack([np.asarray(v, dtype=complex) for v in basis])
    gram = dagger(cols) @ cols
    if np.max(np.abs(gram - np.eye(cols.shape[1]))) > TOL.orth:
        raise NotOrthonormal("basis kets are not orthonormal")
    p = np.asarray(row, dtype=float)
    if p.shape != (cols.shape[1],):
        raise DimMismatch(f"{cols.shape[1]} basis kets but {p.shape} likelihoods")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise LikelihoodOutOfRange(f"likelihoods outside [0, 1]: {p}")
    effect = Effect((cols * p) @ dagger(cols))
    return LikelihoodEffect(basis=cols, row=p, effect=effect)


def outcome_distribution(sigma: DensityOperator, povm: Sequence[Effect]) -> np.ndarray:
    """Probabilities trace(sigma E_i) of a complete effect family (sum E_i = I)."""
    total = sum(e.matrix for e in povm)
    if np.max(np.abs(total - np.eye(sigma.dim))) > TOL.povm:
        raise IncompletePOVM("effects do not sum to the identity")
    return np.array([trace_product(sigma.matrix, e.matrix).real for e in povm])


def luders_collapse(sigma: DensityOperator, p: Effect) -> DensityOperator:
    """Projective update sigma -> P sigma P / trace(sigma P)."""
    m = p.matrix
    if np.max(np.abs(m @ m - m)) > 1e-10:
        raise NotProjector("effect is not idempotent")
    prob = float(trace_product(sigma.matrix, m).real)
    if prob <= TOL.prob:
        raise ZeroProbability(f"branch probability {prob!r} below {TOL.prob:.1e}")
    out = m @ sigma.matrix @ m / prob
    return DensityOperator(0.5 * (out + dagger(out)))


def dutch_book_identity(q1: float, q2: float, q0: float) -> float:
    """q1 + q2 - 2*q0: the determinant of the mixed-bet payoff system.

    Vanishes whenever the three prices come from one additive measure with
    the mixed effect priced at the average of the two components.
    """
    return q1 + q2 - 2.0 * q0


@dataclass(frozen=True)
class GPMAxiomReport:
    """Worst observed violation of each measure axiom over seeded probes."""

    range_violation: float
    normalization_violation: float
    additivity_violation: float
    trials: int
    seed: int

    @property
    def max_violation(self) -> float:
        return max(self.range_violation, self.normalization_violation, self.additivity_violation)

    @property
    def passed(self) -> bool:
        return self.max_violation <= TOL.gpm


def gpm_axiom_check(mu, dim: int, trials: int, seed: int) -> GPMAxiomReport:
    """Audit a measure on effects: range, normalization, finite additivity.

    `mu` may be a GPMeasure or any callable Effect -> float, so dishonest
    (non-additive, non-normalized) candidates can be audited too.
    Violations are data, not errors.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    range_v = 0.0
    add_v = 0.0
    norm_v = abs(float(mu(Effect.identity(dim))) - 1.0)

    def price(effect: Effect) -> float:
        nonlocal range_v
        q = float(mu(effect))
        range_v = max(range_v, q - 1.0, -q)
        return q

    for _ in range(trials):
        m = int(rng.integers(2, 4))
        # spectra bounded by 1/m make the (generally non-commuting) sum an effect
        parts = [Effect.random(dim, rng, top=1.0 / m) for _ in range(m)]
        whole = Effect(sum(e.matrix for e in parts))
        add_v = max(add_v, abs(price(whole) - sum(price(e) for e in parts)))
    return GPMAxiomReport(
        range_violation=range_v,
        normalization_violation=norm_v,
        additivity_violation=add_v,
        trials=trials,
        seed=seed,
    )


def _linearity_probes(mu: GPMeasure, dim: int) -> None:
    """Seeded spot checks that mu prices effect sums and scalings linearly."""
    rng = np.random.default_rng(181)
    worst = 0.0
    for _ in range(3):
        u = random_unitary(dim, rng)
        projectors = [Effect(outer(u[:, k], u[:, k])) for k in range(dim)]
        prices = [mu(p) for p in projectors]
        worst = max(worst, abs(sum(prices) - 1.0))
        if dim >= 2:
            pair = Effect(projectors[0].matrix + projectors[1].matrix)
            worst = max(worst, abs(mu(pair) - prices[0] - prices[1]))
        scaled = Effect(0.37 * projectors[0].matrix)
        worst = max(worst, abs(mu(scaled) - 0.37 * prices[0]))
    if worst > TOL.additivity:
        raise NotAdditive(f"linearity probe deviation {worst:.3e} exceeds {TOL.additivity:.1e}")


def busch_reconstruct(mu: GPMeasure, dim: int) -> DensityOperator:
    """Recover the density operator behind an additive normalized measure.

    Diagonal entries come from the basis projectors.  Off-diagonal entries are
    recovered from the four projector-valued probes (E_ii + E_jj +/- S_ij)/2
    and (E_ii + E_jj +/- T_ij)/2, where S_ij = |i><j| + |j><i| and
    T_ij = i(|i><j| - |j><i|); every probe is itself verified to be an effect
    before evaluation, so mu is never applied outside its domain.
    """
    total = mu(Effect.identity(dim))
    if abs(total - 1.0) > TOL.norm:
        raise NotNormalized(f"mu(I) = {total!r}, not 1 within {TOL.norm:.1e}")
    _linearity_probes(mu, dim)

    eye = np.eye(dim, dtype=complex)
    sigma = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        sigma[i, i] = mu(Effect(outer(eye[:, i], eye[:, i])))
    for i in range(dim):
        for j in range(i + 1, dim):
            base = outer(eye[:, i], eye[:, i]) + outer(eye[:, j], eye[:, j])
            s = outer(eye[:, i], eye[:, j]) + outer(eye[:, j], eye[:, i])
            t = 1j * (outer(eye[:, i], eye[:, j]) - outer(eye[:, j], eye[:, i]))
            re = 0.5 * (mu(Effect(0.5 * (base + s))) - mu(Effect(0.5 * (base - s))))
            im = 0.5 * (mu(Effect(0.5 * (base + t))) - mu(Effect(0.5 * (base - t))))
            sigma[i, j] = re + 1j * im
            sigma[j, i] = re - 1j * im
    return DensityOperator(sigma)


def random_projective_povm(dim: int, rng: np.random.Generator) -> list[Effect]:
    """Rank-1 projectors of a Haar-random orthonormal basis."""
    u = random_unitary(dim, rng)
    return [Effect(outer(u[:, k], u[:, k])) for k in range(dim)]


__all__ = [
    "Observable",
    "DensityOperator",
    "Effect",
    "LikelihoodEffect",
    "GPMeasure",
    "GPMAxiomReport",
    "born_probability",
    "expectation",
    "observable_function",
    "compatible",
    "likelihood_effect",
    "outcome_distribution",
    "luders_collapse",
    "dutch_book_identity",
    "gpm_axiom_check",
    "busch_reconstruct",
    "random_projective_povm",
    "random_ket",
]
