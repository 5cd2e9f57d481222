"""Canned, seeded experiments behind the command-line workbench.

Each experiment function takes a resolved :class:`ExperimentConfig` and
returns ``(rows, checks)``: a uniform table of result rows plus a list of
:class:`Check` records, one per tolerance the experiment guards.  All
tolerances have compiled-in defaults, overridable through ``cfg.tols``;
whatever bound was actually used is echoed in the check record.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    PolynomialObservable,
    build_grid_model,
    build_oscillator_ladder,
    bracket_correspondence,
    gaussian_spread_width,
    oscillator_hamiltonian_poly,
    spread_series,
    well_level_energy,
)
from .measurement import cat_experiment, reconstruct_density, repeat_experiment
from .operators import Operator, av_decompose, certify_hermitian
from .scalars import IMAG_UNIT, TraceScalar, minimal_poly_residual, trace
from .spectral import eigendecompose, verify_dispersion_free, vn_generator
from .states import GridMeta, StateVector, grid_sample, normalize, real_inner

__all__ = [
    "ExperimentConfig",
    "Check",
    "EXPERIMENTS",
    "GLOBAL_DEFAULTS",
    "EXPERIMENT_DEFAULTS",
    "TOL_KEYS",
]


@dataclass
class ExperimentConfig:
    """Fully resolved parameters of one experiment run."""

    experiment: str
    n: int = 10000
    seed: int = 42
    grid_n: int = 2000
    length: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    d: int = 16
    times: tuple[float, ...] | None = None
    a1: float = 1.0
    a2: float = -1.0
    out: str | None = None
    format: str = "csv"
    tols: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    """One guarded tolerance: value against bound, in the given direction."""

    name: str
    value: float
    bound: float
    mode: str = "max"  # "max": value <= bound; "min": value >= bound

    @property
    def passed(self) -> bool:
        if self.mode == "max":
            return bool(self.value <= self.bound)
        return bool(self.value >= self.bound)


GLOBAL_DEFAULTS: dict[str, object] = {
    "n": 10000,
    "seed": 42,
    "grid_n": 2000,
    "length": 1.0,
    "mass": 1.0,
    "omega": 1.0,
    "hbar": 1.0,
    "d": 16,
    "times": None,
    "a1": 1.0,
    "a2": -1.0,
    "out": None,
    "format": "csv",
}

EXPERIMENT_DEFAULTS: dict[str, dict[str, object]] = {
    "cat": {},
    "well-spectrum": {},
    "spread": {"grid_n": 512},
    "poisson": {},
    "vn-generator": {"n": 100},
    "ensemble-density": {"grid_n": 128, "n": 50000},
    "claims": {},
}

#: every tolerance any experiment understands, for flag validation.
TOL_KEYS = (
    "support", "mean", "std",
    "spectrum", "convergence",
    "spread", "stationary",
    "gap",
    "canned", "tables", "recon",
    "envelope", "mass-one-cell",
    "weak", "av-residual", "av-orth", "av-beta",
    "dispersion-free", "eigen-residual",
    "trace-i", "minpoly",
)


def _tol(cfg: ExperimentConfig, key: str, default: float) -> float:
    return float(cfg.tols.get(key, default))


def _random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (raw + raw.conj().T) / 2.0


def _random_state(rng: np.random.Generator, dim: int) -> StateVector:
    raw = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize(StateVector(raw))


# ---------------------------------------------------------------------------
# cat
# ---------------------------------------------------------------------------

def run_cat(cfg: ExperimentConfig):
    result = cat_experiment(cfg.a1, cfg.a2, cfg.n, cfg.seed)
    report = result.report

    rows = [
        {"outcome": value, "count": count, "frequency": count / cfg.n}
        for value, count in sorted(report.counts.items())
    ]

    match_tol = 1e-12 * (1.0 + max(abs(cfg.a1), abs(cfg.a2)))
    alien = sum(
        count for value, count in report.counts.items()
        if min(abs(value - cfg.a1), abs(value - cfg.a2)) > match_tol
    )

    delta = min(0.5, 1.5 / np.sqrt(cfg.n))
    mean_default = 3.0 * result.beta / np.sqrt(cfg.n)
    std_default = result.beta * (1.0 - np.sqrt(1.0 - 4.0 * delta * delta))
    checks = [
        Check("support", float(alien), _tol(cfg, "support", 0.0)),
        Check("mean", abs(report.empirical_mean - result.alpha), _tol(cfg, "mean", mean_default)),
        Check("std", abs(report.empirical_std - result.beta), _tol(cfg, "std", std_default)),
    ]
    return rows, checks


# ---------------------------------------------------------------------------
# well-spectrum
# ---------------------------------------------------------------------------

def _well_relative_errors(npoints: int, cfg: ExperimentConfig, levels: int = 5) -> np.ndarray:
    grid = GridMeta(cfg.length, npoints, cfg.mass, cfg.hbar)
    model = build_grid_model(grid, "infinite_well")
    dec = model.energy_spectrum()
    errors = np.empty(levels)
    for level in range(1, levels + 1):
        analytic = well_level_energy(level, cfg.length, cfg.mass, cfg.hbar)
        errors[level - 1] = abs(dec.eigenvalues[level - 1] - analytic) / analytic
    return errors


def run_well_spectrum(cfg: ExperimentConfig):
    grid = GridMeta(cfg.length, cfg.grid_n, cfg.mass, cfg.hbar)
    model = build_grid_model(grid, "infinite_well")
    dec = model.energy_spectrum()

    rows = []
    for level in range(1, 6):
        numeric = float(dec.eigenvalues[level - 1])
        analytic = well_level_energy(level, cfg.length, cfg.mass, cfg.hbar)
        rows.append({
            "n": level,
            "numeric": numeric,
            "analytic": analytic,
            "rel_err": abs(numeric - analytic) / analytic,
        })

    base = max(200, cfg.grid_n // 4)
    coarse = _well_relative_errors(base, cfg)
    fine = _well_relative_errors(2 * base + 1, cfg)  # doubles the resolution: h -> h/2
    ratios = coarse / fine

    checks = [
        Check("spectrum", max(r["rel_err"] for r in rows), _tol(cfg, "spectrum", 0.005)),
        Check("convergence", float(np.min(ratios)), _tol(cfg, "convergence", 3.0), mode="min"),
    ]
    return rows, checks


# ---------------------------------------------------------------------------
# spread
# ---------------------------------------------------------------------------

def run_spread(cfg: ExperimentConfig):
    grid = GridMeta(cfg.length, cfg.grid_n, cfg.mass, cfg.hbar)
    free = build_grid_model(grid, "free")
    well = build_grid_model(grid, "infinite_well")

    sigma0 = cfg.length / 40.0
    tau = 2.0 * cfg.mass * sigma0 * sigma0 / cfg.hbar
    times = cfg.times
    if times is None:
        times = tuple(factor * tau for factor in (0.0, 0.5, 1.0, np.sqrt(3.0), 2.0))

    center = cfg.length / 2.0
    psi0 = grid_sample(lambda x: np.exp(-((x - center) ** 2) / (4.0 * sigma0 * sigma0)), grid)

    rows = []
    free_errors = []
    for t, width in spread_series(free, psi0, times):
        reference = gaussian_spread_width(sigma0, t, cfg.mass, cfg.hbar)
        err = abs(width - reference) / reference
        free_errors.append(err)
        rows.append({"series": "free", "t": t, "width": width, "reference": reference, "err": err})

    ground = well.energy_spectrum().eigenvectors[0]
    stationary = spread_series(well, ground, times)
    base_width = stationary[0][1]
    drifts = []
    for t, width in stationary:
        drift = abs(width - base_width)
        drifts.append(drift)
        rows.append({"series": "stationary", "t": t, "width": width, "reference": base_width, "err": drift})

    checks = [
        Check("spread", max(free_errors), _tol(cfg, "spread", 0.01)),
        Check("stationary", max(drifts), _tol(cfg, "stationary", 1e-6)),
    ]
    return rows, checks


# ---------------------------------------------------------------------------
# poisson (bracket correspondence)
# ---------------------------------------------------------------------------

def run_poisson(cfg: ExperimentConfig):
    model = build_oscillator_ladder(cfg.d, cfg.mass, cfg.omega, cfg.hbar)
    h_poly = oscillator_hamiltonian_poly(cfg.mass, cfg.omega)
    q = PolynomialObservable.q()
    p = PolynomialObservable.p()
    observables = [("q", q), ("p", p), ("q2", q * q), ("p2", p * p), ("qp", q * p)]

    coeffs = np.zeros(cfg.d, dtype=np.complex128)
    coeffs[:4] = [0.5, 0.5j, -0.5, 0.5]  # levels 0..3 with varied phases, unit norm
    psi = StateVector(coeffs)

    rows = []
    gaps = []
    for name, a_poly in observables:
        check = bracket_correspondence(a_poly, h_poly, model, psi)
        gaps.append(check.gap)
        rows.append({"observable": name, "lhs": check.lhs, "rhs": check.rhs, "gap": check.gap})

    checks = [Check("gap", max(gaps), _tol(cfg, "gap", 1e-9))]
    return rows, checks


# ---------------------------------------------------------------------------
# vn-generator
# ---------------------------------------------------------------------------

CANNED_FIRST = (1.0, 1.0, 2.0)
CANNED_SECOND = (3.0, 4.0, 4.0)
CANNED_GENERATOR = (0.0, 1.0, 2.0)
CANNED_TABLES = [{0: 1.0, 1: 1.0, 2: 2.0}, {0: 3.0, 1: 4.0, 2: 4.0}]


def _reconstruct_member(result, member: int) -> np.ndarray:
    """Rebuild family member ``member`` from the generator and its table."""
    dec = eigendecompose(result.generator)
    table = result.tables[member]
    values = np.array([table[int(np.round(lam))] for lam in dec.eigenvalues])
    return (dec.basis * values) @ dec.basis.conj().T


def run_vn_generator(cfg: ExperimentConfig):
    a = certify_hermitian(np.diag(CANNED_FIRST))
    b = certify_hermitian(np.diag(CANNED_SECOND))
    result = vn_generator([a, b])

    canned_dev = float(np.max(np.abs(result.generator.matrix - np.diag(CANNED_GENERATOR))))
    exact = (
        result.labels == [0.0, 1.0, 2.0]
        and result.tables == CANNED_TABLES
    )

    rows = [
        {"label": int(label), "value_a": result.tables[0][int(label)], "value_b": result.tables[1][int(label)]}
        for label in result.labels
    ]

    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for trial in range(cfg.n):
        dim = int(rng.integers(3, 9))
        base = _random_hermitian(rng, dim)
        family = []
        for _ in range(3):
            c0, c1, c2 = rng.uniform(-2.0, 2.0, size=3)
            member = c0 * np.eye(dim) + c1 * base + c2 * (base @ base)
            family.append(certify_hermitian(member))
        res = vn_generator(family)
        for member_index, member in enumerate(family):
            rebuilt = _reconstruct_member(res, member_index)
            worst = max(worst, float(np.max(np.abs(rebuilt - member.matrix))))

    checks = [
        Check("canned", canned_dev, _tol(cfg, "canned", 0.0)),
        Check("tables", 0.0 if exact else 1.0, _tol(cfg, "tables", 0.0)),
        Check("recon", worst, _tol(cfg, "recon", 1e-9)),
    ]
    return rows, checks


# ---------------------------------------------------------------------------
# ensemble-density
# ---------------------------------------------------------------------------

def run_ensemble_density(cfg: ExperimentConfig):
    grid = GridMeta(cfg.length, cfg.grid_n, cfg.mass, cfg.hbar)
    model = build_grid_model(grid, "infinite_well")
    ground = model.energy_spectrum().eigenvectors[0]

    report = repeat_experiment(lambda: ground, model.q, cfg.n, cfg.seed)
    density = reconstruct_density(report, grid)

    expected = np.abs(ground.coeffs) ** 2 * grid.spacing
    rows = []
    sigmas = []
    for j, (x, freq) in enumerate(density):
        p = float(expected[j])
        sigma = np.sqrt(cfg.n * p * (1.0 - p))
        deviation = abs(freq * cfg.n - cfg.n * p) / max(sigma, 1.0)  # one-count floor for near-empty cells
        sigmas.append(deviation)
        rows.append({"x": x, "freq": freq, "expected": p, "sigmas": deviation})

    # dispersion-free preparation: a position eigenstate lands in one cell
    j0 = cfg.grid_n // 2
    delta_coeffs = np.zeros(cfg.grid_n, dtype=np.complex128)
    delta_coeffs[j0] = 1.0 / np.sqrt(grid.spacing)
    delta = StateVector(delta_coeffs, grid)
    delta_report = repeat_experiment(lambda: delta, model.q, min(cfg.n, 1000), cfg.seed)
    top_mass = max(delta_report.counts.values()) / delta_report.n

    checks = [
        Check("envelope", float(max(sigmas)), _tol(cfg, "envelope", 3.0)),
        Check("mass-one-cell", float(top_mass), _tol(cfg, "mass-one-cell", 0.99), mode="min"),
    ]
    return rows, checks


# ---------------------------------------------------------------------------
# claims
# ---------------------------------------------------------------------------

def run_claims(cfg: ExperimentConfig):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    checks = []

    # trace form of a commutator expectation vanishes
    worst_weak = 0.0
    for trial in range(1000):
        dim = 2 + trial % 7
        a = certify_hermitian(_random_hermitian(rng, dim))
        b = certify_hermitian(_random_hermitian(rng, dim))
        psi = _random_state(rng, dim)
        commutator = Operator(a.matrix @ b.matrix - b.matrix @ a.matrix)
        worst_weak = max(worst_weak, abs(real_inner(psi, commutator.apply(psi))))
    rows.append({"claim": "weak-commutativity", "trials": 1000, "worst": worst_weak})
    checks.append(Check("weak", worst_weak, _tol(cfg, "weak", 1e-10)))

    # mean-plus-deviation split reconstructs the operator action
    worst_residual = 0.0
    worst_orth = 0.0
    min_beta = np.inf
    for trial in range(500):
        dim = 2 + trial % 7
        a = certify_hermitian(_random_hermitian(rng, dim))
        psi = _random_state(rng, dim)
        alpha, beta, perp = av_decompose(a, psi)
        min_beta = min(min_beta, beta)
        image = a.matrix @ psi.coeffs
        recon = alpha * psi.coeffs + (beta * perp.coeffs if perp is not None else 0.0)
        worst_residual = max(worst_residual, float(np.linalg.norm(image - recon)))
        if perp is not None:
            worst_orth = max(worst_orth, abs(np.vdot(psi.coeffs, perp.coeffs)))
    rows.append({"claim": "av-split", "trials": 500, "worst": worst_residual})
    checks.append(Check("av-residual", worst_residual, _tol(cfg, "av-residual", 1e-9)))
    checks.append(Check("av-orth", float(worst_orth), _tol(cfg, "av-orth", 1e-10)))
    checks.append(Check("av-beta", float(min_beta), _tol(cfg, "av-beta", 0.0), mode="min"))

    # eigenbases are dispersion-free and solve the eigenproblem
    worst_spread = 0.0
    worst_eig = 0.0
    dims = (2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64)
    for trial in range(44):
        dim = dims[trial % len(dims)]
        a = certify_hermitian(_random_hermitian(rng, dim))
        dec = eigendecompose(a)
        norm = float(np.max(np.abs(dec.eigenvalues)))
        worst_spread = max(worst_spread, verify_dispersion_free(dec, a) / np.sqrt(1.0 + norm * norm))
        residual = np.max(np.abs(a.matrix @ dec.basis - dec.basis * dec.eigenvalues))
        worst_eig = max(worst_eig, float(residual) / (1.0 + norm))
    rows.append({"claim": "dispersion-free", "trials": 44, "worst": worst_spread})
    checks.append(Check("dispersion-free", worst_spread, _tol(cfg, "dispersion-free", 1e-8)))
    checks.append(Check("eigen-residual", worst_eig, _tol(cfg, "eigen-residual", 1e-9)))

    # scalar algebra: tr(i) = 0 exactly, minimal polynomial annihilates
    trace_i = abs(trace(IMAG_UNIT))
    worst_minpoly = 0.0
    for _ in range(1000):
        x = TraceScalar(rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3))
        worst_minpoly = max(worst_minpoly, abs(minimal_poly_residual(x)))
    rows.append({"claim": "trace-algebra", "trials": 1000, "worst": worst_minpoly})
    checks.append(Check("trace-i", trace_i, _tol(cfg, "trace-i", 0.0)))
    checks.append(Check("minpoly", worst_minpoly, _tol(cfg, "minpoly", 1e-9)))

    # single generator reconstructs a commuting family
    a = certify_hermitian(np.diag(CANNED_FIRST))
    b = certify_hermitian(np.diag(CANNED_SECOND))
    res = vn_generator([a, b])
    canned_dev = float(np.max(np.abs(res.generator.matrix - np.diag(CANNED_GENERATOR))))
    exact = res.labels == [0.0, 1.0, 2.0] and res.tables == CANNED_TABLES
    worst_recon = canned_dev if exact else np.inf
    for trial in range(100):
        dim = int(rng.integers(3, 9))
        base = _random_hermitian(rng, dim)
        family = []
        for _ in range(3):
            c0, c1, c2 = rng.uniform(-2.0, 2.0, size=3)
            family.append(certify_hermitian(c0 * np.eye(dim) + c1 * base + c2 * (base @ base)))
        res = vn_generator(family)
        for member_index, member in enumerate(family):
            rebuilt = _reconstruct_member(res, member_index)
            worst_recon = max(worst_recon, float(np.max(np.abs(rebuilt - member.matrix))))
    rows.append({"claim": "single-generator", "trials": 100, "worst": float(worst_recon)})
    checks.append(Check("recon", float(worst_recon), _tol(cfg, "recon", 1e-9)))

    return rows, checks


EXPERIMENTS = {
    "cat": run_cat,
    "well-spectrum": run_well_spectrum,
    "spread": run_spread,
    "poisson": run_poisson,
    "vn-generator": run_vn_generator,
    "ensemble-density": run_ensemble_density,
    "claims": run_claims,
}
