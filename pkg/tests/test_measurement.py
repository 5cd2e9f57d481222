"""Born sampling, collapse, ensembles, and density reconstruction."""

import numpy as np
import pytest

from traceqm import (
    DegenerateSpectrumError,
    EnsembleReport,
    GridMeta,
    InputError,
    StateVector,
    born_probabilities,
    build_grid_model,
    cat_experiment,
    certify_hermitian,
    complex_inner,
    eigendecompose,
    measure_once,
    normalize,
    reconstruct_density,
    repeat_experiment,
    sample_rng,
    superpose,
)

SEED = 6606


def random_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return certify_hermitian((m + m.conj().T) / 2.0)


def random_state(rng, dim):
    c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize(StateVector(c))


def cat_state():
    return normalize(superpose([StateVector([1.0, 0.0]), StateVector([0.0, 1.0])], [1.0, 1.0]))


# ---------------------------------------------------------------- Born weights


def test_eigenstate_has_certain_outcome():
    dec = eigendecompose(certify_hermitian(np.diag([1.0, 2.0, 3.0])))
    probs = born_probabilities(dec, StateVector([0.0, 1.0, 0.0]))
    assert probs == [(1.0, 0.0), (2.0, 1.0), (3.0, 0.0)]


def test_cat_splits_half_half():
    dec = eigendecompose(certify_hermitian(np.diag([1.0, -1.0])))
    probs = dict(born_probabilities(dec, cat_state()))
    assert probs[1.0] == pytest.approx(0.5, abs=1e-12)
    assert probs[-1.0] == pytest.approx(0.5, abs=1e-12)


def test_degenerate_group_pools_probability():
    dec = eigendecompose(certify_hermitian(np.diag([1.0, 1.0, 2.0])))
    psi = normalize(StateVector([0.6, 0.8, 0.0]))
    probs = dict(born_probabilities(dec, psi))
    assert probs[1.0] == pytest.approx(1.0, abs=1e-12)
    assert probs[2.0] == pytest.approx(0.0, abs=1e-12)


def test_probabilities_complete_and_nonnegative():
    rng = np.random.default_rng(SEED)
    for _ in range(50):
        dim = int(rng.integers(2, 33))
        dec = eigendecompose(random_hermitian(rng, dim))
        probs = born_probabilities(dec, random_state(rng, dim))
        values = np.array([p for _, p in probs])
        assert np.all(values >= 0.0)
        assert float(values.sum()) == pytest.approx(1.0, abs=1e-10)


def test_born_dimension_mismatch_rejected():
    from traceqm import DimensionError

    dec = eigendecompose(certify_hermitian(np.diag([1.0, 2.0])))
    with pytest.raises(DimensionError):
        born_probabilities(dec, StateVector([1.0, 0.0, 0.0]))


# ---------------------------------------------------------------- single shots


def test_measure_eigenstate_returns_it():
    dec = eigendecompose(certify_hermitian(np.diag([4.0, 7.0])))
    out = measure_once(dec, StateVector([0.0, 1.0]), sample_rng(SEED, 0))
    assert out.eigenvalue == 7.0
    overlap = complex_inner(out.collapsed, StateVector([0.0, 1.0])).to_complex()
    assert abs(abs(overlap) - 1.0) <= 1e-12


def test_collapsed_state_lies_in_eigenspace():
    rng = np.random.default_rng(SEED + 1)
    for trial in range(30):
        dim = int(rng.integers(2, 12))
        a = random_hermitian(rng, dim)
        dec = eigendecompose(a)
        out = measure_once(dec, random_state(rng, dim), sample_rng(SEED, trial))
        # projection residual: A acts as its eigenvalue on the whole group
        image = a.matrix @ out.collapsed.coeffs
        idx = list(dec.groups[out.group_index])
        lams = dec.eigenvalues[idx]
        span = dec.basis[:, idx]
        comps = span.conj().T @ out.collapsed.coeffs
        residual = image - span @ (lams * comps)
        scale = 1.0 + float(np.max(np.abs(dec.eigenvalues)))
        assert float(np.linalg.norm(residual)) <= 1e-9 * scale
        assert out.collapsed.norm() == pytest.approx(1.0, abs=1e-10)


def test_collapse_idempotence():
    """Measuring the collapsed state again returns the same group, always."""
    rng = np.random.default_rng(SEED + 2)
    for trial in range(50):
        dim = int(rng.integers(2, 10))
        dec = eigendecompose(random_hermitian(rng, dim))
        first = measure_once(dec, random_state(rng, dim), sample_rng(SEED + 2, trial))
        again = measure_once(dec, first.collapsed, sample_rng(SEED + 3, trial))
        assert again.group_index == first.group_index
        assert again.eigenvalue == first.eigenvalue


def test_two_point_spectrum_never_in_between():
    dec = eigendecompose(certify_hermitian(np.diag([1.0, -1.0])))
    psi = cat_state()
    seen = set()
    for i in range(500):
        out = measure_once(dec, psi, sample_rng(SEED + 4, i))
        seen.add(out.eigenvalue)
    assert seen == {1.0, -1.0}


def test_measure_consumes_exactly_one_variate():
    # replaying the i-th substream reproduces the i-th outcome
    dec = eigendecompose(certify_hermitian(np.diag([1.0, -1.0])))
    psi = cat_state()
    a = measure_once(dec, psi, sample_rng(77, 5))
    b = measure_once(dec, psi, sample_rng(77, 5))
    assert a.eigenvalue == b.eigenvalue


# ---------------------------------------------------------------- ensembles


def test_repeat_eigenstate_single_count():
    a = certify_hermitian(np.diag([2.0, 9.0]))
    report = repeat_experiment(lambda: StateVector([1.0, 0.0]), a, 250, seed=SEED)
    assert report.counts == {2.0: 250}
    assert report.n == 250
    assert report.empirical_mean == 2.0
    assert report.empirical_std == 0.0


def test_repeat_requires_positive_n():
    a = certify_hermitian(np.diag([1.0, 2.0]))
    with pytest.raises(ValueError):
        repeat_experiment(lambda: StateVector([1.0, 0.0]), a, 0, seed=1)


def test_repeat_counts_sum_to_n():
    a = certify_hermitian(np.diag([1.0, -1.0]))
    report = repeat_experiment(cat_state, a, 999, seed=SEED + 5)
    assert sum(report.counts.values()) == 999


def test_repeat_same_seed_identical_reports():
    a = certify_hermitian(np.diag([1.0, -1.0]))
    r1 = repeat_experiment(cat_state, a, 400, seed=123)
    r2 = repeat_experiment(cat_state, a, 400, seed=123)
    assert r1 == r2
    r3 = repeat_experiment(cat_state, a, 400, seed=124)
    assert r3.counts != r1.counts or r3.seed != r1.seed


def test_repeat_statistics_from_counts():
    a = certify_hermitian(np.diag([0.0, 10.0]))
    report = repeat_experiment(cat_state, a, 2000, seed=SEED + 6)
    k = report.counts[10.0]
    mean = 10.0 * k / 2000
    var = (0.0 - mean) ** 2 * (2000 - k) / 2000 + (10.0 - mean) ** 2 * k / 2000
    assert report.empirical_mean == pytest.approx(mean, abs=1e-12)
    assert report.empirical_std == pytest.approx(np.sqrt(var), abs=1e-12)


def test_mean_and_std_track_alpha_beta():
    """Empirical moments close in on the operator moments at the 3 sigma rate."""
    a = certify_hermitian(np.diag([1.0, -1.0]))
    for n in (100, 10000):
        report = repeat_experiment(cat_state, a, n, seed=SEED + 7)
        assert abs(report.empirical_mean - 0.0) <= 3.0 / np.sqrt(n)
        delta = min(0.5, 1.5 / np.sqrt(n))
        std_band = 1.0 - np.sqrt(1.0 - 4.0 * delta * delta)
        assert abs(report.empirical_std - 1.0) <= std_band


# ---------------------------------------------------------------- cat experiment


def test_cat_experiment_moments_and_outcomes():
    result = cat_experiment(1.0, -1.0, 10000, seed=SEED + 8)
    assert result.alpha == pytest.approx(0.0, abs=1e-12)
    assert result.beta == pytest.approx(1.0, abs=1e-12)
    assert set(result.report.counts) <= {1.0, -1.0}
    assert abs(result.report.empirical_mean) <= 3.0 / np.sqrt(10000)


def test_cat_experiment_general_outcome_pair():
    result = cat_experiment(2.0, 8.0, 4000, seed=SEED + 9)
    assert result.alpha == pytest.approx(5.0, abs=1e-12)
    assert result.beta == pytest.approx(3.0, abs=1e-12)
    assert set(result.report.counts) <= {2.0, 8.0}


def test_cat_experiment_rejects_equal_outcomes():
    with pytest.raises(DegenerateSpectrumError):
        cat_experiment(1.0, 1.0, 10, seed=1)


def test_cat_single_sample():
    result = cat_experiment(1.0, -1.0, 1, seed=42)
    assert sum(result.report.counts.values()) == 1
    assert set(result.report.counts) <= {1.0, -1.0}


# ---------------------------------------------------------------- density


def test_density_from_dispersion_free_preparation():
    """A position eigenstate reads back as a single occupied cell."""
    g = GridMeta(length=1.0, npoints=16)
    model = build_grid_model(g)
    target = np.zeros(16)
    target[9] = 1.0

    def prepare():
        return normalize(StateVector(target, g))

    report = repeat_experiment(prepare, model.q, 1000, seed=SEED + 10)
    density = reconstruct_density(report, g)
    freqs = {x: f for x, f in density}
    assert len(density) == 16
    assert freqs[float(g.positions[9])] >= 0.99
    assert sum(freqs.values()) == pytest.approx(1.0, abs=1e-12)


def test_density_ground_state_profile():
    g = GridMeta(length=1.0, npoints=32)
    model = build_grid_model(g)
    dec = eigendecompose(model.hamiltonian)
    ground = dec.eigenvectors[0]

    report = repeat_experiment(lambda: ground, model.q, 20000, seed=SEED + 11)
    density = reconstruct_density(report, g)
    want = np.abs(ground.coeffs) ** 2 * g.spacing
    got = np.array([f for _, f in density])
    assert float(np.max(np.abs(got - want))) <= 5.0 / np.sqrt(20000)


def test_density_merges_multiple_reports():
    g = GridMeta(length=1.0, npoints=8)
    model = build_grid_model(g)
    e = np.zeros(8)
    e[2] = 1.0
    prep = lambda: normalize(StateVector(e, g))
    r1 = repeat_experiment(prep, model.q, 50, seed=1)
    r2 = repeat_experiment(prep, model.q, 70, seed=2)
    density = reconstruct_density([r1, r2], g)
    assert sum(f for _, f in density) == pytest.approx(1.0, abs=1e-12)
    assert density[2][1] == 1.0


def test_density_rejects_non_position_outcomes():
    g = GridMeta(length=1.0, npoints=8)
    fake = EnsembleReport(counts={0.123: 10}, n=10, empirical_mean=0.123,
                          empirical_std=0.0, seed=0)
    with pytest.raises(InputError):
        reconstruct_density(fake, g)
    with pytest.raises(InputError):
        reconstruct_density([], g)


# ---------------------------------------------------------------- substreams


def test_sample_rng_streams_are_independent_and_stable():
    # same (seed, index) -> same draw; different index -> fresh stream
    assert sample_rng(9, 4).random() == sample_rng(9, 4).random()
    draws = {sample_rng(9, i).random() for i in range(64)}
    assert len(draws) == 64
