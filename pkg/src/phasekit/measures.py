"""Parametrized measures over the torus and the density axis.

Two constructions arise from the solvers: the empirical measure of a
density field (one atom per node, the measure with pairings
h sum_i b(x_i, rho_i)) and the two-Dirac measure of a two-phase state
(atoms rho_p, rho_m with weights alpha_p, alpha_m).  Distances combine a
finite test dictionary (a computable surrogate for weak-star convergence)
with the x-averaged per-node 1D Wasserstein distance, and the weak-form
residual of the kinetic transport equation driven by the effective viscous
flux is evaluated by exact atom pairing in (x, xi) and trapezoid in time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .torus import PeriodicGrid


@dataclass
class ParamMeasure:
    kind: str                 # "empirical" or "two_dirac"
    grid: PeriodicGrid
    atoms: np.ndarray         # (n_atoms_per_node, n)
    weights: np.ndarray       # (n_atoms_per_node, n); per-node masses sum to 1
    support_box: tuple

    def __post_init__(self):
        lo, hi = self.support_box
        if self.atoms.shape != self.weights.shape:
            raise ValueError("atoms and weights must have matching shapes")
        carried = self.weights > 1e-15
        if np.any((self.atoms < lo) & carried) or np.any((self.atoms > hi) & carried):
            raise ValueError(
                f"atoms outside the support box [{lo}, {hi}]: range "
                f"[{np.min(self.atoms)}, {np.max(self.atoms)}]")

    def pair(self, b) -> float:
        """<measure, b> for a vectorized test function b(x, xi)."""
        x = np.broadcast_to(self.grid.x, self.atoms.shape)
        vals = b(x, self.atoms)
        return float(self.grid.h * np.sum(self.weights * vals))

    def total_mass(self) -> float:
        return float(self.grid.h * np.sum(self.weights))


def empirical_from_field(grid: PeriodicGrid, rho: np.ndarray,
                         support_box: tuple) -> ParamMeasure:
    rho = np.asarray(rho, dtype=float)
    return ParamMeasure("empirical", grid, rho[None, :],
                        np.ones((1, grid.n)), tuple(support_box))


def empirical_from_state(state, support_box: tuple) -> ParamMeasure:
    return empirical_from_field(state.grid, state.rho, support_box)


def two_dirac_from_bn(state, support_box: tuple) -> ParamMeasure:
    atoms = np.stack([state.rho_p, state.rho_m])
    weights = np.stack([state.alpha_p, state.alpha_m])
    return ParamMeasure("two_dirac", state.grid, atoms, weights,
                        tuple(support_box))


@dataclass
class TestDictionary:
    """Products of low trigonometric modes in x with monomials in xi,
    normalized to sup-norm one on the torus times the support box."""
    __test__ = False  # not a pytest class, despite the name
    support_box: tuple
    m_x: int = 4
    k_max: int = 4
    entries: list = field(default_factory=list)

    def __post_init__(self):
        lo, hi = self.support_box
        xi_sup = max(abs(lo), abs(hi))
        x_factors = [("1", None)]
        for m in range(1, self.m_x + 1):
            x_factors.append((f"cos{m}", (np.cos, m)))
            x_factors.append((f"sin{m}", (np.sin, m)))
        self.entries = []
        for x_name, x_spec in x_factors:
            for k in range(self.k_max + 1):
                scale = xi_sup ** k if k > 0 else 1.0
                self.entries.append(
                    (f"{x_name}*xi^{k}", _make_entry(x_spec, k, scale)))
        if not self.entries:
            raise ValueError("empty test dictionary")

    def names(self):
        return [name for name, _ in self.entries]


def _make_entry(x_spec, k, scale):
    if x_spec is None:
        return lambda x, xi: xi ** k / scale
    fun, m = x_spec
    return lambda x, xi: fun(2.0 * np.pi * m * x) * xi ** k / scale


def distance(m1: ParamMeasure, m2: ParamMeasure,
             dictionary: TestDictionary) -> float:
    """Max pairing difference over the dictionary (a pseudometric)."""
    return max(abs(m1.pair(b) - m2.pair(b)) for _, b in dictionary.entries)


def wasserstein_avg(m1: ParamMeasure, m2: ParamMeasure) -> float:
    """x-average of the exact per-node 1D Wasserstein-1 distance between
    the conditional (per-node) measures, via the CDF-difference integral."""
    if m1.grid.n != m2.grid.n:
        raise ValueError("measures live on different grids")
    atoms = np.concatenate([m1.atoms, m2.atoms], axis=0)
    signed = np.concatenate([m1.weights, -m2.weights], axis=0)
    order = np.argsort(atoms, axis=0, kind="stable")
    atoms_sorted = np.take_along_axis(atoms, order, axis=0)
    signed_sorted = np.take_along_axis(signed, order, axis=0)
    cdf_diff = np.cumsum(signed_sorted, axis=0)[:-1]
    gaps = np.diff(atoms_sorted, axis=0)
    return float(np.mean(np.sum(np.abs(cdf_diff) * gaps, axis=0)))


@dataclass
class SeparableTest:
    """phi(t, x, xi) = psi(t) g(x) p(xi) with analytic factor derivatives."""
    name: str
    psi: callable
    dpsi: callable
    g: callable
    dg: callable
    p: callable
    dp: callable

    def value(self, t, x, xi):
        return self.psi(t) * self.g(x) * self.p(xi)

    def d_t(self, t, x, xi):
        return self.dpsi(t) * self.g(x) * self.p(xi)

    def d_x(self, t, x, xi):
        return self.psi(t) * self.dg(x) * self.p(xi)

    def d_xi(self, t, x, xi):
        return self.psi(t) * self.g(x) * self.dp(xi)


def _time_window(t_end: float):
    # sin^2 window: vanishes with its derivative at both endpoints, and the
    # trapezoid rule integrates its derivative to exactly zero
    def psi(t):
        return np.sin(np.pi * t / t_end) ** 2

    def dpsi(t):
        return (np.pi / t_end) * np.sin(2.0 * np.pi * t / t_end)

    return psi, dpsi


_X_FACTORS = {
    "1": (lambda x: np.ones_like(np.asarray(x, dtype=float)),
          lambda x: np.zeros_like(np.asarray(x, dtype=float))),
    "cos1": (lambda x: np.cos(2 * np.pi * x),
             lambda x: -2 * np.pi * np.sin(2 * np.pi * x)),
    "sin1": (lambda x: np.sin(2 * np.pi * x),
             lambda x: 2 * np.pi * np.cos(2 * np.pi * x)),
    "cos2": (lambda x: np.cos(4 * np.pi * x),
             lambda x: -4 * np.pi * np.sin(4 * np.pi * x)),
}

_XI_FACTORS = {
    "1": (lambda xi: np.ones_like(np.asarray(xi, dtype=float)),
          lambda xi: np.zeros_like(np.asarray(xi, dtype=float))),
    "xi": (lambda xi: np.asarray(xi, dtype=float),
           lambda xi: np.ones_like(np.asarray(xi, dtype=float))),
    "xi^2": (lambda xi: np.asarray(xi, dtype=float) ** 2,
             lambda xi: 2.0 * np.asarray(xi, dtype=float)),
}


def smoke_test_set(t_end: float, mean_free_only: bool = False) -> list:
    """Fixed set of separable test functions for kinetic-residual checks.

    mean_free_only drops the x-constant entries, for which the pairing of
    the transport terms is exactly zero on equispaced nodes.
    """
    psi, dpsi = _time_window(t_end)
    combos = [("cos1", "xi"), ("sin1", "xi^2"), ("cos2", "xi"),
              ("cos1", "1"), ("1", "xi"), ("1", "xi^2")]
    out = []
    for x_name, xi_name in combos:
        if mean_free_only and x_name == "1":
            continue
        g, dg = _X_FACTORS[x_name]
        p, dp = _XI_FACTORS[xi_name]
        out.append(SeparableTest(f"{x_name}*{xi_name}", psi, dpsi, g, dg, p, dp))
    return out


def kinetic_residual(measures: list, u_series, sigma_series, times, phi,
                     params) -> float:
    """Weak-form residual of the kinetic transport equation.

    For each time the pairing of
        phi_t + u phi_x - (xi (Sigma + P_art(xi))/mu) phi_xi
              + ((Sigma + P_art(xi))/mu) phi
    against the measure is accumulated and the result integrated by the
    trapezoid rule; it vanishes for exact solutions with phi compactly
    supported in time.
    """
    times = np.asarray(times, dtype=float)
    if not (len(measures) == len(u_series) == len(sigma_series) == times.size):
        raise ValueError("trajectory series have mismatched lengths")
    vals = np.empty(times.size)
    for k, measure in enumerate(measures):
        grid = measure.grid
        x = np.broadcast_to(grid.x, measure.atoms.shape)
        xi = measure.atoms
        u = np.broadcast_to(u_series[k], measure.atoms.shape)
        sigma = np.broadcast_to(sigma_series[k], measure.atoms.shape)
        t = times[k]
        growth = (sigma + params.eos.artificial_pressure(xi)) / params.mu
        integrand = (phi.d_t(t, x, xi) + u * phi.d_x(t, x, xi)
                     - xi * growth * phi.d_xi(t, x, xi)
                     + growth * phi.value(t, x, xi))
        vals[k] = grid.h * np.sum(measure.weights * integrand)
    return float(abs(np.trapezoid(vals, times)))
