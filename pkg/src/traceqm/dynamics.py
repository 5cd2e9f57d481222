"""Model systems and dynamics in both the classical and operator pictures.

Two model families are provided:

* grid models on a hard-wall interval (a particle in a box, with or without
  the box read as a free stretch), built from a three-point kinetic stencil
  and a central-difference momentum;
* a truncated oscillator ladder, built from the usual raising and lowering
  matrices.  Truncation lives entirely in the last row and column, so
  identities like [q, p] = i*hbar hold exactly on the leading block.

Observables polynomial in (q, p) are carried symbolically by
:class:`PolynomialObservable` and mapped to matrices by :func:`quantize`
using the symmetric (Weyl) ordering

    W(q^a p^b) = 2**(-a) * sum_k C(a, k) Q^k P^b Q^(a-k),

under which the classical bracket {A, H} and the operator bracket
(i/hbar)[H, A] agree exactly for quadratic generators.
:func:`bracket_correspondence` measures that agreement state by state.

Time evolution is spectral: the propagator is assembled from the
Hamiltonian eigenbasis, so unitarity and energy conservation are exact up
to roundoff.
"""

from __future__ import annotations

from math import comb
from typing import NamedTuple

import numpy as np

from .errors import DegreeError, DimensionError, GridError, StateError, TruncationError
from .operators import (
    HermitianOperator,
    Operator,
    certify_hermitian,
    dispersion,
    expect_c,
    _require_match,
)
from .spectral import SpectralDecomposition, eigendecompose
from .states import GridMeta, StateVector

__all__ = [
    "MAX_DEGREE",
    "PolynomialObservable",
    "ModelSystem",
    "BracketCheck",
    "build_grid_model",
    "build_oscillator_ladder",
    "oscillator_hamiltonian_poly",
    "poisson_rhs_classical",
    "quantize",
    "heisenberg_rhs",
    "bracket_correspondence",
    "evolve_state",
    "evolve_operator",
    "spread_series",
    "gaussian_spread_width",
    "well_level_energy",
]

#: largest supported total degree of a polynomial observable.
MAX_DEGREE = 6

#: ladder states may put at most this much weight on the top level.
TOP_LEVEL_OCCUPANCY_TOL = 1e-6

MIN_LADDER_DIM = 4


class PolynomialObservable:
    """Real polynomial in the commuting symbols q and p.

    Stored as a map (q power, p power) -> coefficient with zero terms
    dropped.  Addition, subtraction, negation, scalar and polynomial
    multiplication, and partial derivatives are supported; any operation
    whose result would exceed ``MAX_DEGREE`` raises :class:`DegreeError`.
    """

    __slots__ = ("_monomials",)

    def __init__(self, monomials):
        clean = {}
        for key, coeff in dict(monomials).items():
            qa, pb = key
            if not all(isinstance(e, (int, np.integer)) and not isinstance(e, bool) and e >= 0 for e in (qa, pb)):
                raise ValueError(f"monomial powers must be non-negative integers, got {key!r}")
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise ValueError(f"monomial coefficient must be finite, got {coeff!r}")
            if qa + pb > MAX_DEGREE:
                raise DegreeError(f"total degree {qa + pb} exceeds the cap of {MAX_DEGREE}")
            if coeff != 0.0:
                clean[(int(qa), int(pb))] = clean.get((int(qa), int(pb)), 0.0) + coeff
        object.__setattr__(self, "_monomials", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("PolynomialObservable is immutable")

    @classmethod
    def q(cls) -> "PolynomialObservable":
        return cls({(1, 0): 1.0})

    @classmethod
    def p(cls) -> "PolynomialObservable":
        return cls({(0, 1): 1.0})

    @classmethod
    def constant(cls, value) -> "PolynomialObservable":
        return cls({(0, 0): float(value)})

    @property
    def monomials(self) -> dict[tuple[int, int], float]:
        return dict(self._monomials)

    def degree(self) -> int:
        if not self._monomials:
            return 0
        return max(a + b for (a, b) in self._monomials)

    def evaluate(self, qv: float, pv: float) -> float:
        return sum(c * qv**a * pv**b for (a, b), c in self._monomials.items())

    def diff_q(self) -> "PolynomialObservable":
        return PolynomialObservable({(a - 1, b): a * c for (a, b), c in self._monomials.items() if a > 0})

    def diff_p(self) -> "PolynomialObservable":
        return PolynomialObservable({(a, b - 1): b * c for (a, b), c in self._monomials.items() if b > 0})

    def __add__(self, other):
        if not isinstance(other, PolynomialObservable):
            return NotImplemented
        merged = dict(self._monomials)
        for key, c in other._monomials.items():
            merged[key] = merged.get(key, 0.0) + c
        return PolynomialObservable(merged)

    def __neg__(self):
        return PolynomialObservable({key: -c for key, c in self._monomials.items()})

    def __sub__(self, other):
        if not isinstance(other, PolynomialObservable):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PolynomialObservable):
            product: dict[tuple[int, int], float] = {}
            for (a1, b1), c1 in self._monomials.items():
                for (a2, b2), c2 in other._monomials.items():
                    key = (a1 + a2, b1 + b2)
                    product[key] = product.get(key, 0.0) + c1 * c2
            return PolynomialObservable(product)
        if isinstance(other, (int, float)):
            return PolynomialObservable({key: other * c for key, c in self._monomials.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PolynomialObservable):
            return NotImplemented
        return self._monomials == other._monomials

    def __repr__(self):
        if not self._monomials:
            return "PolynomialObservable(0)"
        terms = " + ".join(f"{c:g}*q^{a}p^{b}" for (a, b), c in self._monomials.items())
        return f"PolynomialObservable({terms})"


class ModelSystem:
    """A concrete model: position, momentum, Hamiltonian, and parameters.

    ``kind`` is one of ``grid_well``, ``grid_free``, ``oscillator_ladder``.
    The Hamiltonian eigendecomposition is computed once on demand and
    cached, since every evolution call needs it.
    """

    def __init__(self, kind: str, q: HermitianOperator, p: HermitianOperator,
                 hamiltonian: HermitianOperator, mass: float, hbar: float,
                 omega: float | None = None, grid: GridMeta | None = None):
        self.kind = kind
        self.q = q
        self.p = p
        self.hamiltonian = hamiltonian
        self.mass = float(mass)
        self.hbar = float(hbar)
        self.omega = None if omega is None else float(omega)
        self.grid = grid
        self._spectrum: SpectralDecomposition | None = None

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    def energy_spectrum(self) -> SpectralDecomposition:
        if self._spectrum is None:
            self._spectrum = eigendecompose(self.hamiltonian)
        return self._spectrum

    def __repr__(self):
        return f"<ModelSystem {self.kind} dim={self.dim}>"


class BracketCheck(NamedTuple):
    """Both sides of the bracket correspondence and their gap."""

    lhs: float
    rhs: float
    gap: float


def build_grid_model(grid: GridMeta, potential: str = "infinite_well") -> ModelSystem:
    """Hard-wall grid model with position, momentum, and kinetic Hamiltonian.

    ``potential`` selects ``infinite_well`` or ``free``; inside the walls
    both have zero potential, so they share the same matrices and differ
    only in the recorded kind (the walls are what confine the free stretch).
    """
    if potential not in ("infinite_well", "free"):
        raise ValueError(f"unknown potential {potential!r}")
    n = grid.npoints
    h = grid.spacing
    hbar, mass = grid.hbar, grid.mass

    q = certify_hermitian(Operator(np.diag(grid.positions.astype(np.complex128)), grid))

    p_matrix = np.zeros((n, n), dtype=np.complex128)
    off = hbar / (2.0 * h)
    for j in range(n - 1):
        p_matrix[j, j + 1] = -1j * off
        p_matrix[j + 1, j] = 1j * off
    p = certify_hermitian(Operator(p_matrix, grid))

    k_matrix = np.zeros((n, n), dtype=np.complex128)
    k = hbar * hbar / (2.0 * mass * h * h)
    np.fill_diagonal(k_matrix, 2.0 * k)
    for j in range(n - 1):
        k_matrix[j, j + 1] = -k
        k_matrix[j + 1, j] = -k
    hamiltonian = certify_hermitian(Operator(k_matrix, grid))

    kind = "grid_well" if potential == "infinite_well" else "grid_free"
    return ModelSystem(kind, q, p, hamiltonian, mass=mass, hbar=hbar, grid=grid)


def build_oscillator_ladder(dim: int, mass: float = 1.0, omega: float = 1.0,
                            hbar: float = 1.0) -> ModelSystem:
    """Truncated oscillator from ladder matrices.

    The Hamiltonian built from the truncated q and p is diagonal with the
    exact levels hbar*omega*(n + 1/2) everywhere except the top entry,
    which truncation lowers to hbar*omega*(dim - 1)/2.
    """
    if dim < MIN_LADDER_DIM:
        raise ValueError(f"ladder needs at least {MIN_LADDER_DIM} levels, got {dim}")
    for name, value in (("mass", mass), ("omega", omega), ("hbar", hbar)):
        if not (np.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be positive, got {value!r}")
    lower = np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), k=1).astype(np.complex128)
    raise_ = lower.conj().T
    q_matrix = np.sqrt(hbar / (2.0 * mass * omega)) * (lower + raise_)
    p_matrix = 1j * np.sqrt(mass * omega * hbar / 2.0) * (raise_ - lower)
    q = certify_hermitian(Operator(q_matrix))
    p = certify_hermitian(Operator(p_matrix))
    h_matrix = p_matrix @ p_matrix / (2.0 * mass) + 0.5 * mass * omega * omega * (q_matrix @ q_matrix)
    hamiltonian = certify_hermitian(Operator(h_matrix))
    return ModelSystem("oscillator_ladder", q, p, hamiltonian, mass=mass, hbar=hbar, omega=omega)


def oscillator_hamiltonian_poly(mass: float = 1.0, omega: float = 1.0) -> PolynomialObservable:
    """Classical oscillator energy p^2/(2m) + m*omega^2*q^2/2 as a polynomial."""
    return PolynomialObservable({(0, 2): 1.0 / (2.0 * mass), (2, 0): 0.5 * mass * omega * omega})


def poisson_rhs_classical(a: PolynomialObservable, h: PolynomialObservable) -> PolynomialObservable:
    """Poisson bracket {A, H} = dA/dq * dH/dp - dA/dp * dH/dq, formally."""
    return a.diff_q() * h.diff_p() - a.diff_p() * h.diff_q()


def quantize(poly: PolynomialObservable, model: ModelSystem) -> HermitianOperator:
    """Symmetric-ordered matrix of a polynomial observable in a model.

    Each monomial q^a p^b maps to 2**(-a) * sum_k C(a, k) Q^k P^b Q^(a-k);
    real coefficients therefore give a hermitian matrix.
    """
    qm = model.q.matrix
    pm = model.p.matrix
    dim = model.dim
    max_q = max((a for (a, b) in poly.monomials), default=0)
    max_p = max((b for (a, b) in poly.monomials), default=0)
    identity = np.eye(dim, dtype=np.complex128)
    q_pow = [identity]
    for _ in range(max_q):
        q_pow.append(q_pow[-1] @ qm)
    p_pow = [identity]
    for _ in range(max_p):
        p_pow.append(p_pow[-1] @ pm)

    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for (a, b), coeff in poly.monomials.items():
        term = np.zeros((dim, dim), dtype=np.complex128)
        for k in range(a + 1):
            term += comb(a, k) * (q_pow[k] @ p_pow[b] @ q_pow[a - k])
        matrix += (coeff / 2.0**a) * term
    return certify_hermitian(Operator(matrix, model.grid))


def heisenberg_rhs(hamiltonian: HermitianOperator, a: HermitianOperator,
                   hbar: float = 1.0) -> HermitianOperator:
    """Operator-picture time derivative (i/hbar) * (H A - A H), hermitian."""
    if not (np.isfinite(hbar) and hbar > 0):
        raise ValueError(f"hbar must be positive, got {hbar!r}")
    ha = hamiltonian @ a
    ah = a @ hamiltonian
    return certify_hermitian(Operator((1j / hbar) * (ha.matrix - ah.matrix), a.grid))


def _check_truncation(model: ModelSystem, psi: StateVector):
    if model.kind == "oscillator_ladder":
        top = abs(psi.coeffs[-1]) ** 2
        if top > TOP_LEVEL_OCCUPANCY_TOL:
            raise TruncationError(
                f"top ladder level holds occupancy {top:.3e} > {TOP_LEVEL_OCCUPANCY_TOL:.0e}"
            )


def bracket_correspondence(a_poly: PolynomialObservable, h_poly: PolynomialObservable,
                           model: ModelSystem, psi: StateVector) -> BracketCheck:
    """Compare the quantized Poisson bracket with the commutator route.

    lhs is the expectation of quantize({A, H}); rhs is the expectation of
    (i/hbar)[quantize(H), quantize(A)], both in the same state.  For ladder
    models the state must stay clear of the truncation edge.
    """
    _check_truncation(model, psi)
    lhs_op = quantize(poisson_rhs_classical(a_poly, h_poly), model)
    rhs_op = heisenberg_rhs(quantize(h_poly, model), quantize(a_poly, model), model.hbar)
    lhs = expect_c(lhs_op, psi)
    rhs = expect_c(rhs_op, psi)
    return BracketCheck(lhs, rhs, abs(lhs - rhs))


def evolve_state(model: ModelSystem, psi0: StateVector, t: float) -> StateVector:
    """Evolve a normalized state by time t through the spectral propagator."""
    t = float(t)
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    _require_match(model.hamiltonian, psi0)
    if abs(psi0.norm() - 1.0) > 1e-8:
        raise StateError(f"initial state is not normalized (norm {psi0.norm():.12f})")
    dec = model.energy_spectrum()
    phases = np.exp(-1j * dec.eigenvalues * (t / model.hbar))
    amps = dec.basis.conj().T @ psi0.coeffs
    return StateVector(dec.basis @ (phases * amps), psi0.grid)


def evolve_operator(model: ModelSystem, a: HermitianOperator, t: float) -> HermitianOperator:
    """Operator-picture evolution U(t)^dagger A U(t); spectrum is preserved."""
    t = float(t)
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    if a.dim != model.dim:
        raise DimensionError(f"dimension mismatch: operator {a.dim} vs model {model.dim}")
    if a.grid != model.grid:
        raise GridError("operator and model are bound to different grids")
    dec = model.energy_spectrum()
    phases = np.exp(-1j * dec.eigenvalues * (t / model.hbar))
    u = (dec.basis * phases) @ dec.basis.conj().T
    return certify_hermitian(Operator(u.conj().T @ a.matrix @ u, a.grid))


def spread_series(model: ModelSystem, psi0: StateVector, times) -> list[tuple[float, float]]:
    """Position spread of the evolving state at each requested time.

    Times must be finite, non-negative, and ascending.
    """
    times = [float(t) for t in times]
    if any(not np.isfinite(t) or t < 0 for t in times):
        raise ValueError("times must be finite and non-negative")
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ValueError("times must be strictly ascending")
    return [(t, dispersion(model.q, evolve_state(model, psi0, t))) for t in times]


def gaussian_spread_width(sigma0: float, t: float, mass: float = 1.0, hbar: float = 1.0) -> float:
    """Closed-form width of a freely spreading minimal Gaussian packet."""
    rate = hbar * t / (2.0 * mass * sigma0 * sigma0)
    return sigma0 * float(np.sqrt(1.0 + rate * rate))


def well_level_energy(n: int, length: float, mass: float = 1.0, hbar: float = 1.0) -> float:
    """Analytic hard-wall level n^2 pi^2 hbar^2 / (2 m L^2), n = 1, 2, ..."""
    return (n * np.pi * hbar / length) ** 2 / (2.0 * mass)
