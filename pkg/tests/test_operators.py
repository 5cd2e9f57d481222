"""Operator certification, expectation values, and the alpha/beta split."""

import numpy as np
import pytest

from traceqm import (
    AvResult,
    DimensionError,
    GridError,
    GridMeta,
    HermitianOperator,
    NotHermitianError,
    Operator,
    StateError,
    StateVector,
    adjoint,
    av_decompose,
    certify_hermitian,
    complex_inner,
    dispersion,
    expect_c,
    expect_r,
    normalize,
    real_inner,
    sym_antisym_split,
)

SEED = 3303
ORTH_TOL = 1e-10
RESIDUAL_TOL = 1e-9

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Y = np.array([[0.0, -1j], [1j, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def random_hermitian(rng, dim, grid=None):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return certify_hermitian((m + m.conj().T) / 2.0, grid=grid)


def random_state(rng, dim, grid=None):
    c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize(StateVector(c, grid))


# ---------------------------------------------------------------- certification


def test_certify_accepts_hermitian():
    a = certify_hermitian(PAULI_Z)
    assert isinstance(a, HermitianOperator)
    assert a.certificate == 0.0  # worst entry deviation found at certification


def test_certify_rejects_nonhermitian():
    with pytest.raises(NotHermitianError) as exc:
        certify_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert exc.value.deviation > exc.value.bound


def test_certify_tolerance_is_relative_to_scale():
    # deviation 1e-8 hides below tol once entries reach 1e3
    m = 1e3 * PAULI_X.astype(complex)
    m[0, 1] += 1e-8
    a = certify_hermitian(m)
    assert a.certificate <= 1e-10 * (1.0 + 1e3)
    with pytest.raises(NotHermitianError):
        certify_hermitian(PAULI_X + np.array([[0.0, 1e-8], [0.0, 0.0]]))


def test_certify_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        certify_hermitian(PAULI_Z, tol=0.0)


def test_certify_rejects_nonsquare():
    with pytest.raises(DimensionError):
        certify_hermitian(np.ones((2, 3)))


def test_adjoint_matches_conjugate_transpose():
    rng = np.random.default_rng(SEED)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a = Operator(m)
    np.testing.assert_allclose(adjoint(a).matrix, m.conj().T)


def test_sym_antisym_split_reassembles():
    """A*B = S + i*D with S, D both certified hermitian."""
    rng = np.random.default_rng(SEED + 1)
    for _ in range(25):
        a = random_hermitian(rng, 5)
        b = random_hermitian(rng, 5)
        s, d = sym_antisym_split(a, b)
        assert isinstance(s, HermitianOperator)
        assert isinstance(d, HermitianOperator)
        np.testing.assert_allclose(
            s.matrix + 1j * d.matrix, a.matrix @ b.matrix, atol=1e-12
        )


def test_sym_antisym_split_pauli():
    # sigma_x sigma_y = i sigma_z: symmetric part vanishes
    a = certify_hermitian(PAULI_X)
    b = certify_hermitian(PAULI_Y)
    s, d = sym_antisym_split(a, b)
    np.testing.assert_allclose(s.matrix, np.zeros((2, 2)), atol=1e-15)
    np.testing.assert_allclose(d.matrix, PAULI_Z, atol=1e-15)


def test_operator_apply_and_matmul():
    a = Operator(PAULI_X)
    v = StateVector([1.0, 0.0])
    np.testing.assert_allclose(a.apply(v).coeffs, [0.0, 1.0])
    both = Operator(PAULI_X) @ Operator(PAULI_Y)
    np.testing.assert_allclose(both.matrix, PAULI_X @ PAULI_Y)


def test_operator_grid_mismatch_rejected():
    g = GridMeta(length=1.0, npoints=8)
    a = Operator(np.eye(8), grid=g)
    with pytest.raises(GridError):
        a.apply(StateVector(np.ones(8)))
    with pytest.raises(DimensionError):
        Operator(np.eye(8)).apply(StateVector([1.0, 0.0]))


# ---------------------------------------------------------------- expectations


def test_expect_r_is_twice_expect_c():
    rng = np.random.default_rng(SEED + 2)
    for _ in range(100):
        a = random_hermitian(rng, 6)
        psi = random_state(rng, 6)
        c = expect_c(a, psi)
        r = expect_r(a, psi)
        assert r == pytest.approx(2.0 * c, abs=1e-12)


def test_expectation_of_identity():
    psi = random_state(np.random.default_rng(SEED + 3), 4)
    eye = certify_hermitian(np.eye(4))
    assert expect_c(eye, psi) == pytest.approx(1.0, abs=1e-12)
    assert expect_r(eye, psi) == pytest.approx(2.0, abs=1e-12)


def test_expectation_requires_normalized_state():
    a = certify_hermitian(PAULI_Z)
    with pytest.raises(StateError):
        expect_c(a, StateVector([2.0, 0.0]))


def test_expectation_pauli_values():
    a = certify_hermitian(PAULI_Z)
    up = StateVector([1.0, 0.0])
    down = StateVector([0.0, 1.0])
    plus = normalize(StateVector([1.0, 1.0]))
    assert expect_c(a, up) == pytest.approx(1.0)
    assert expect_c(a, down) == pytest.approx(-1.0)
    assert expect_c(a, plus) == pytest.approx(0.0, abs=1e-15)


def test_weak_commutativity_of_real_expectations():
    """tr<psi|(AB - BA)|psi> vanishes for hermitian A, B.

    The product operators fail hermiticity individually, yet the trace-form
    expectation cannot tell AB from BA.
    """
    rng = np.random.default_rng(SEED + 4)
    for _ in range(200):
        dim = int(rng.integers(2, 9))
        a = random_hermitian(rng, dim)
        b = random_hermitian(rng, dim)
        psi = random_state(rng, dim)
        gap = expect_r(a @ b, psi) - expect_r(b @ a, psi)
        assert abs(gap) <= ORTH_TOL


def test_expect_r_of_product_is_symmetrized_expectation():
    # tr<AB> equals <AB + BA> in the complex form
    rng = np.random.default_rng(SEED + 11)
    a = random_hermitian(rng, 4)
    b = random_hermitian(rng, 4)
    psi = random_state(rng, 4)
    sym = certify_hermitian(a.matrix @ b.matrix + b.matrix @ a.matrix)
    assert expect_r(a @ b, psi) == pytest.approx(expect_c(sym, psi), abs=1e-10)


def test_expectation_of_position_in_ground_state():
    # the lowest box mode is symmetric about the midpoint
    from traceqm import build_grid_model, eigendecompose

    g = GridMeta(length=1.0, npoints=400)
    model = build_grid_model(g, "infinite_well")
    dec = eigendecompose(model.hamiltonian)
    ground = dec.eigenvectors[0]
    assert expect_c(model.q, ground) == pytest.approx(0.5, abs=1e-6)


def test_dispersion_zero_on_eigenstate():
    a = certify_hermitian(PAULI_Z)
    assert dispersion(a, StateVector([1.0, 0.0])) == 0.0


def test_dispersion_on_balanced_superposition():
    a = certify_hermitian(PAULI_Z)
    plus = normalize(StateVector([1.0, 1.0]))
    assert dispersion(a, plus) == pytest.approx(1.0, abs=1e-12)


def test_dispersion_never_negative_under_roundoff():
    rng = np.random.default_rng(SEED + 5)
    for _ in range(100):
        a = random_hermitian(rng, 3)
        psi = random_state(rng, 3)
        assert dispersion(a, psi) >= 0.0


# ---------------------------------------------------------------- alpha/beta split


def test_av_decompose_eigenstate_branch():
    a = certify_hermitian(PAULI_Z)
    res = av_decompose(a, StateVector([1.0, 0.0]))
    assert isinstance(res, AvResult)
    assert res.alpha == pytest.approx(1.0)
    assert res.beta == 0.0
    assert res.perp is None


def test_av_decompose_cat_branch():
    # balanced superposition of the +1/-1 eigenstates: alpha 0, beta 1
    a = certify_hermitian(PAULI_Z)
    plus = normalize(StateVector([1.0, 1.0]))
    res = av_decompose(a, plus)
    assert res.alpha == pytest.approx(0.0, abs=1e-15)
    assert res.beta == pytest.approx(1.0, abs=1e-12)
    assert res.perp is not None
    # perp is the flipped cat, orthogonal and normalized
    assert abs(complex_inner(plus, res.perp).to_complex()) <= ORTH_TOL
    assert res.perp.norm() == pytest.approx(1.0, abs=1e-12)


def test_av_decompose_reconstructs_image():
    """A|psi> = alpha|psi> + beta|perp> with orthonormal pieces."""
    rng = np.random.default_rng(SEED + 6)
    for _ in range(200):
        dim = int(rng.integers(2, 12))
        a = random_hermitian(rng, dim)
        psi = random_state(rng, dim)
        res = av_decompose(a, psi)
        image = a.matrix @ psi.coeffs
        rebuilt = res.alpha * psi.coeffs
        if res.perp is not None:
            rebuilt = rebuilt + res.beta * res.perp.coeffs
            overlap = complex_inner(psi, res.perp).to_complex()
            assert abs(overlap) <= ORTH_TOL
            assert res.perp.norm() == pytest.approx(1.0, abs=1e-10)
        assert res.beta >= 0.0
        scale = 1.0 + float(np.linalg.norm(image))
        assert float(np.linalg.norm(image - rebuilt)) <= RESIDUAL_TOL * scale


def test_av_decompose_beta_matches_dispersion():
    # residual-norm route in av_decompose vs moment route in dispersion
    rng = np.random.default_rng(SEED + 7)
    for _ in range(100):
        a = random_hermitian(rng, 5)
        psi = random_state(rng, 5)
        res = av_decompose(a, psi)
        assert res.beta == pytest.approx(dispersion(a, psi), abs=1e-12)


def test_variance_moment_identity():
    # dispersion^2 + <A>^2 recovers <A^2>
    rng = np.random.default_rng(SEED + 10)
    for _ in range(100):
        a = random_hermitian(rng, 6)
        psi = random_state(rng, 6)
        a_sq = certify_hermitian(a.matrix @ a.matrix)
        lhs = dispersion(a, psi) ** 2 + expect_c(a, psi) ** 2
        assert lhs == pytest.approx(expect_c(a_sq, psi), abs=1e-9)


def test_av_decompose_on_grid_states():
    g = GridMeta(length=1.0, npoints=32)
    rng = np.random.default_rng(SEED + 8)
    a = random_hermitian(rng, 32, grid=g)
    psi = random_state(rng, 32, grid=g)
    res = av_decompose(a, psi)
    assert res.perp is None or res.perp.grid is g
    image = a.matrix @ psi.coeffs
    rebuilt = res.alpha * psi.coeffs
    if res.perp is not None:
        rebuilt = rebuilt + res.beta * res.perp.coeffs
    scale = 1.0 + float(np.sqrt(g.spacing) * np.linalg.norm(image))
    gap = float(np.sqrt(g.spacing) * np.linalg.norm(image - rebuilt))
    assert gap <= RESIDUAL_TOL * scale


def test_real_inner_view_of_av_split():
    # alpha and beta are recoverable from trace-form inner products alone
    rng = np.random.default_rng(SEED + 9)
    a = random_hermitian(rng, 6)
    psi = random_state(rng, 6)
    res = av_decompose(a, psi)
    image = StateVector(a.matrix @ psi.coeffs)
    assert real_inner(psi, image) / 2.0 == pytest.approx(res.alpha, abs=1e-12)
    if res.perp is not None:
        assert real_inner(res.perp, image) / 2.0 == pytest.approx(res.beta, abs=1e-10)
