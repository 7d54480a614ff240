import numpy as np
import pytest

from epiq.errors import (
    DimMismatch,
    IncompletePOVM,
    LikelihoodOutOfRange,
    NotAdditive,
    NotNormalized,
    NotOrthonormal,
    NotProjector,
    ZeroProbability,
)
from epiq.hilbert import (
    DensityOperator,
    Effect,
    GPMeasure,
    Observable,
    born_probability,
    busch_reconstruct,
    compatible,
    dutch_book_identity,
    expectation,
    gpm_axiom_check,
    likelihood_effect,
    luders_collapse,
    observable_function,
    outcome_distribution,
    random_projective_povm,
)
from epiq.linalg import outer, random_hermitian, random_ket, random_unitary

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


# --- born_probability ---------------------------------------------------


def test_born_identity_case():
    rng = np.random.default_rng(0)
    u = random_ket(3, rng)
    assert born_probability(u, u) == pytest.approx(1.0, abs=1e-12)


def test_born_orthogonal_kets():
    assert born_probability([1, 0, 0], [0, 1, 0]) == 0.0


def test_born_z_plus_vs_x_plus():
    z_plus = np.array([1.0, 0.0])
    x_plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert born_probability(z_plus, x_plus) == pytest.approx(0.5, abs=1e-12)


def test_born_symmetric_exactly():
    rng = np.random.default_rng(5)
    u, v = random_ket(4, rng), random_ket(4, rng)
    assert born_probability(u, v) == born_probability(v, u)


def test_born_completeness():
    rng = np.random.default_rng(6)
    u = random_ket(5, rng)
    basis = random_unitary(5, rng)
    total = sum(born_probability(u, basis[:, j]) for j in range(5))
    assert abs(total - 1.0) < 1e-10


def test_born_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        born_probability([1, 1], [1, 0])
    with pytest.raises(DimMismatch):
        born_probability([1, 0], [1, 0, 0])


# --- expectation ---------------------------------------------------------


def test_expectation_mixed_spin():
    sigma = DensityOperator.maximally_mixed(2)
    assert expectation(sigma, Observable(SIGMA_Z)) == pytest.approx(0.0, abs=1e-14)


def test_expectation_pure_up():
    sigma = DensityOperator.pure([1, 0])
    assert expectation(sigma, Observable(SIGMA_Z)) == pytest.approx(1.0, abs=1e-14)


def test_expectation_spectral_sum_oracle():
    rng = np.random.default_rng(12)
    sigma = DensityOperator.random(4, rng)
    a = Observable(random_hermitian(4, rng))
    # oracle: sum_k u_k * trace(sigma P_k) over the eigenprojectors of A
    total = 0.0
    for k in range(4):
        p = outer(a.vectors[:, k], a.vectors[:, k])
        total += a.values[k] * np.trace(sigma.matrix @ p).real
    assert expectation(sigma, a) == pytest.approx(total, abs=1e-11)


def test_expectation_within_spectrum():
    rng = np.random.default_rng(13)
    for _ in range(25):
        sigma = DensityOperator.random(3, rng)
        a = Observable(random_hermitian(3, rng))
        e = expectation(sigma, a)
        assert a.values[0] - 1e-10 <= e <= a.values[-1] + 1e-10


# --- observable_function -------------------------------------------------


def test_function_identity():
    rng = np.random.default_rng(14)
    a = Observable(random_hermitian(3, rng))
    b = observable_function(a, lambda x: x)
    assert np.max(np.abs(b.matrix - a.matrix)) < 1e-12


def test_function_square_of_spin_z():
    a = Observable(SIGMA_Z)
    b = observable_function(a, lambda x: x * x)
    assert np.max(np.abs(b.matrix - np.eye(2))) < 1e-12


def test_function_indicator_projects():
    a = Observable(SIGMA_Z)
    b = observable_function(a, lambda x: 1.0 if x > 0 else 0.0)
    assert np.max(np.abs(b.matrix - np.array([[1, 0], [0, 0]]))) < 1e-12


# --- compatible -----------------------------------------------------------


def test_compatible_with_own_function():
    rng = np.random.default_rng(15)
    a = Observable(random_hermitian(3, rng))
    assert compatible(a, observable_function(a, lambda x: x * x))


def test_pauli_x_z_incompatible():
    assert not compatible(Observable(SIGMA_X), Observable(SIGMA_Z))


def test_shared_eigenbasis_compatible():
    rng = np.random.default_rng(16)
    a = Observable(random_hermitian(4, rng))
    b = Observable.from_spectrum(rng.standard_normal(4), a.vectors)
    assert compatible(a, b)


# --- likelihood_effect ----------------------------------------------------


def test_likelihood_effect_all_ones_is_identity():
    le = likelihood_effect(list(np.eye(3)), [1.0, 1.0, 1.0])
    assert np.max(np.abs(le.effect.matrix - np.eye(3))) < 1e-12


def test_likelihood_effect_one_hot_is_projector():
    le = likelihood_effect(list(np.eye(3)), [0.0, 1.0, 0.0])
    m = le.effect.matrix
    assert np.max(np.abs(m @ m - m)) < 1e-12
    assert np.trace(m).real == pytest.approx(1.0)


def test_likelihood_effect_binomial_row():
    # independent oracle: C(3,2) theta^2 (1-theta) evaluated by hand
    thetas = [0.2, 0.5, 0.8]
    row = [3.0 * t**2 * (1.0 - t) for t in thetas]
    assert row == pytest.approx([0.096, 0.375, 0.384], abs=1e-15)
    le = likelihood_effect(list(np.eye(3)), row)
    assert np.allclose(np.diag(le.effect.matrix).real, row, atol=1e-12)


def test_likelihood_effect_validation():
    with pytest.raises(NotOrthonormal):
        likelihood_effect([[1, 0], [1, 0]], [0.5, 0.5])
    with pytest.raises(LikelihoodOutOfRange):
        likelihood_effect(list(np.eye(2)), [0.5, 1.5])


# --- outcome_distribution ---------------------------------------------------


def test_outcome_distribution_eigenstate_one_hot():
    rng = np.random.default_rng(21)
    povm = random_projective_povm(3, rng)
    # sigma pure in the k=1 projector's range
    sigma = DensityOperator.pure(hermitian_top_vec(povm[1]))
    p = outcome_distribution(sigma, povm)
    expected = np.zeros(3)
    expected[1] = 1.0
    assert np.allclose(p, expected, atol=1e-10)


def test_outcome_distribution_uniform():
    rng = np.random.default_rng(22)
    povm = random_projective_povm(4, rng)
    p = outcome_distribution(DensityOperator.maximally_mixed(4), povm)
    assert np.allclose(p, 0.25, atol=1e-12)


def hermitian_top_vec(effect: Effect) -> np.ndarray:
    from epiq.linalg import hermitian_eig

    return hermitian_eig(effect.matrix).vectors[:, -1]


def test_outcome_distribution_monte_carlo_oracle():
    rng = np.random.default_rng(23)
    sigma = DensityOperator.random(3, rng)
    povm = random_projective_povm(3, rng)
    p = outcome_distribution(sigma, povm)
    assert abs(p.sum() - 1.0) < 1e-10

    # sampling oracle: draw an eigenstate of sigma, then a projective outcome
    # by squared overlap; compare empirical frequencies
    draws = 10**6
    sampler = np.random.default_rng(904)
    weights = np.clip(sigma.eigen.values, 0.0, None)
    weights = weights / weights.sum()
    which_state = sampler.choice(3, size=draws, p=weights)
    overlap = np.zeros((3, 3))
    for i in range(3):
        state = sigma.eigen.vectors[:, i]
        for k in range(3):
            overlap[i, k] = born_probability(state, hermitian_top_vec(povm[k]))
    freqs = np.zeros(3)
    u = sampler.random(draws)
    cum = np.cumsum(overlap, axis=1)
    for i in range(3):
        rows = u[which_state == i]
        freqs += np.array(
            [
                np.count_nonzero(rows <= cum[i, 0]),
                np.count_nonzero((rows > cum[i, 0]) & (rows <= cum[i, 1])),
                np.count_nonzero(rows > cum[i, 1]),
            ]
        )
    freqs /= draws
    assert np.max(np.abs(freqs - p)) < 0.005


def test_outcome_distribution_incomplete_rejected():
    rng = np.random.default_rng(24)
    povm = random_projective_povm(3, rng)[:2]
    with pytest.raises(IncompletePOVM):
        outcome_distribution(DensityOperator.maximally_mixed(3), povm)


def test_outcome_distribution_affine_in_state():
    rng = np.random.default_rng(25)
    povm = random_projective_povm(3, rng)
    s1 = DensityOperator.random(3, rng)
    s2 = DensityOperator.random(3, rng)
    w = 0.3
    mix = DensityOperator(w * s1.matrix + (1 - w) * s2.matrix)
    lhs = outcome_distribution(mix, povm)
    rhs = w * outcome_distribution(s1, povm) + (1 - w) * outcome_distribution(s2, povm)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


# --- luders_collapse --------------------------------------------------------


def test_collapse_fixes_states_in_range():
    sigma = DensityOperator.pure([1, 0])
    p = Effect(np.array([[1, 0], [0, 0]], dtype=complex))
    out = luders_collapse(sigma, p)
    assert np.max(np.abs(out.matrix - sigma.matrix)) < 1e-12


def test_collapse_of_mixed_state():
    sigma = DensityOperator.maximally_mixed(2)
    p = Effect(np.array([[1, 0], [0, 0]], dtype=complex))
    out = luders_collapse(sigma, p)
    assert np.max(np.abs(out.matrix - np.array([[1, 0], [0, 0]]))) < 1e-12


def test_collapse_rank2_support_and_trace():
    rng = np.random.default_rng(31)
    sigma = DensityOperator.random(3, rng)
    u = random_unitary(3, rng)
    p = Effect(outer(u[:, 0], u[:, 0]) + outer(u[:, 1], u[:, 1]))
    out = luders_collapse(sigma, p)
    inside = p.matrix @ out.matrix @ p.matrix
    assert np.max(np.abs(inside - out.matrix)) < 1e-10
    assert np.trace(out.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_collapse_idempotent():
    rng = np.random.default_rng(32)
    sigma = DensityOperator.random(3, rng)
    u = random_unitary(3, rng)
    p = Effect(outer(u[:, 0], u[:, 0]) + outer(u[:, 1], u[:, 1]))
    once = luders_collapse(sigma, p)
    twice = luders_collapse(once, p)
    assert np.max(np.abs(twice.matrix - once.matrix)) < 1e-12


def test_collapse_zero_probability():
    sigma = DensityOperator.pure([1, 0])
    p = Effect(np.array([[0, 0], [0, 1]], dtype=complex))
    with pytest.raises(ZeroProbability):
        luders_collapse(sigma, p)


def test_collapse_requires_projector():
    sigma = DensityOperator.maximally_mixed(2)
    with pytest.raises(NotProjector):
        luders_collapse(sigma, Effect(0.5 * np.eye(2)))


# --- busch_reconstruct ------------------------------------------------------


def test_reconstruct_pure_state():
    sigma = DensityOperator.pure([1, 0])
    out = busch_reconstruct(GPMeasure.from_density(sigma), 2)
    assert np.max(np.abs(out.matrix - np.array([[1, 0], [0, 0]]))) < 1e-12


def test_reconstruct_maximally_mixed():
    sigma = DensityOperator.maximally_mixed(3)
    out = busch_reconstruct(GPMeasure.from_density(sigma), 3)
    assert np.max(np.abs(out.matrix - np.eye(3) / 3)) < 1e-12


def test_reconstruct_random_round_trip():
    rng = np.random.default_rng(41)
    sigma = DensityOperator.random(4, rng)
    out = busch_reconstruct(GPMeasure.from_density(sigma), 4)
    assert np.max(np.abs(out.matrix - sigma.matrix)) < 1e-10


def test_reconstruct_matches_measure_on_random_effects():
    rng = np.random.default_rng(42)
    sigma = DensityOperator.random(3, rng)
    mu = GPMeasure.from_density(sigma)
    out = busch_reconstruct(mu, 3)
    for _ in range(20):
        e = Effect.random(3, rng)
        assert abs(np.trace(out.matrix @ e.matrix).real - mu(e)) < 1e-9


def test_reconstruct_rejects_nonadditive():
    rng = np.random.default_rng(43)
    sigma = DensityOperator.random(3, rng)
    squared = GPMeasure(
        lambda e: float(np.trace(sigma.matrix @ e.matrix).real ** 2), 3
    )
    with pytest.raises(NotAdditive):
        busch_reconstruct(squared, 3)


def test_gpmeasure_rejects_unnormalized():
    rng = np.random.default_rng(44)
    sigma = DensityOperator.random(2, rng)
    with pytest.raises(NotNormalized):
        GPMeasure(lambda e: float(np.trace(0.9 * sigma.matrix @ e.matrix).real), 2)


# --- dutch_book_identity -----------------------------------------------------


def test_dutch_book_trivial_cases():
    assert dutch_book_identity(0.5, 0.5, 0.5) == 0.0
    assert dutch_book_identity(0.2, 0.6, 0.4) == 0.0


def test_dutch_book_trace_linearity():
    rng = np.random.default_rng(51)
    for _ in range(20):
        sigma = DensityOperator.random(3, rng)
        e1 = Effect.random(3, rng, top=0.5)
        e2 = Effect.random(3, rng, top=0.5)
        q1 = np.trace(sigma.matrix @ e1.matrix).real
        q2 = np.trace(sigma.matrix @ e2.matrix).real
        q0 = np.trace(sigma.matrix @ (0.5 * (e1.matrix + e2.matrix))).real
        assert abs(dutch_book_identity(q1, q2, q0)) < 1e-12


# --- gpm_axiom_check -----------------------------------------------------------


def test_axiom_check_trace_form_passes():
    rng = np.random.default_rng(61)
    sigma = DensityOperator.random(3, rng)
    report = gpm_axiom_check(GPMeasure.from_density(sigma), 3, trials=40, seed=7)
    assert report.passed


def test_axiom_check_squared_trace_fails_additivity():
    rng = np.random.default_rng(62)
    sigma = DensityOperator.random(3, rng)
    report = gpm_axiom_check(
        lambda e: float(np.trace(sigma.matrix @ e.matrix).real ** 2), 3, trials=40, seed=7
    )
    assert not report.passed
    assert report.additivity_violation > 1e-3


def test_axiom_check_subnormalized_fails_axiom_two():
    rng = np.random.default_rng(63)
    sigma = DensityOperator.random(3, rng)
    report = gpm_axiom_check(
        lambda e: float(np.trace(0.9 * sigma.matrix @ e.matrix).real), 3, trials=5, seed=7
    )
    assert not report.passed
    assert report.normalization_violation == pytest.approx(0.1, abs=1e-10)


# --- type invariants ---------------------------------------------------------


def test_density_operator_validation():
    with pytest.raises(ValueError):
        DensityOperator(np.diag([1.5, -0.5]))
    with pytest.raises(NotNormalized):
        DensityOperator(np.diag([0.5, 0.4]))


def test_effect_validation():
    with pytest.raises(ValueError):
        Effect(np.diag([1.2, 0.0]))
    Effect(np.diag([1.0, 0.0]))  # boundary spectrum is fine
