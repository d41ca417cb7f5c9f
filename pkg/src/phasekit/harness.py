"""The oscillating-family homogenization experiment.

For a two-value density profile compressed n-fold, run the detailed-scale
solver for each n in a family, build the empirical measures of the density
fields, run the two-phase solver once from the profile's limit data, build
its two-Dirac measures, and quantify how the empirical measures approach
the two-Dirac ones as n grows.  Family members are independent jobs; the
report is always assembled in n order, so results do not depend on worker
scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import io
from .bn import BNState, bn_run
from .eos import require_admissible
from .errors import BoundsError, ConfigError
from .measures import (TestDictionary, distance, empirical_from_state,
                       kinetic_residual, smoke_test_set, two_dirac_from_bn,
                       wasserstein_avg)
from .nsk import (FluidState, PhysicalParams, SolverConfig,
                  make_oscillating_initial, nsk_run)
from .torus import PeriodicGrid, mean


@dataclass
class FamilyConfig:
    n_list: tuple
    v_minus: float
    v_plus: float
    theta: float
    delta: float
    u0: np.ndarray | float
    params: PhysicalParams
    solver: SolverConfig
    grid_n: int
    m_x: int = 4
    k_max: int = 4
    out_dir: str | None = None

    def __post_init__(self):
        self.n_list = tuple(int(n) for n in self.n_list)
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("n_list must be strictly increasing")
        if self.grid_n < 64 * max(self.n_list):
            raise ValueError(
                f"grid too coarse: need at least {64 * max(self.n_list)} nodes "
                f"to resolve {max(self.n_list)} oscillations, got {self.grid_n}")
        lo, hi = self.solver.bounds
        if not (lo <= min(self.v_minus, self.v_plus)
                and max(self.v_minus, self.v_plus) <= hi):
            raise ValueError(
                f"profile values ({self.v_minus}, {self.v_plus}) outside the "
                f"guard rails {self.solver.bounds}")
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")

    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(self.grid_n)

    def u0_field(self, grid: PeriodicGrid) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.u0, dtype=float),
                               (grid.n,)).copy()


@dataclass
class ConvergenceReport:
    n_list: tuple
    times: np.ndarray
    dist_series: list          # per n: dictionary distance at each time
    uerr_series: list          # per n: max-norm velocity error at each time
    wasserstein_series: list   # per n: x-averaged W1 at each time
    sup_dist: list
    sup_uerr: list
    monotone_dist: bool
    monotone_uerr: bool
    slack: float = 1.2
    extras: dict = field(default_factory=dict)


def limit_initial_data(v_minus: float, v_plus: float, theta: float,
                       delta: float, grid: PeriodicGrid) -> tuple:
    """Two-Dirac data induced by the two-value profile in the many-
    oscillation limit: fractions theta at v_minus and 1 - theta at v_plus,
    with the ramp mass reassigned so that the mixture mass matches the
    generated profile exactly."""
    profile = make_oscillating_initial(grid, v_minus, v_plus, theta, 1, delta)
    if v_plus == v_minus:
        alpha_m = theta
    else:
        alpha_m = float((v_plus - mean(grid, profile)) / (v_plus - v_minus))
    alpha_p = 1.0 - alpha_m
    return alpha_p, alpha_m, v_plus, v_minus


def suggest_dt(params: PhysicalParams, rho_range: tuple, u_max: float,
               cfl: float, grid: PeriodicGrid, safety: float = 0.7) -> float:
    """Time step that keeps the CFL bound slack for densities in rho_range,
    so every family member runs on the same uniform time grid."""
    r = np.linspace(rho_range[0], rho_range[1], 257)
    smax = float(np.max(np.sqrt(np.maximum(
        params.eos.d_artificial_pressure(r), 0.0)))) + abs(u_max)
    return safety * cfl * grid.h / smax


def _run_member(args):
    n, config_tuple = args
    (n_grid, v_minus, v_plus, theta, delta, u0, params, solver) = config_tuple
    grid = PeriodicGrid(n_grid)
    rho0 = make_oscillating_initial(grid, v_minus, v_plus, theta, n, delta,
                                    bounds=solver.bounds)
    state = FluidState.make(grid, rho0, u0, params)
    return nsk_run(state, params, solver)


def _run_member_guarded(args):
    """Worker wrapper: a member failure must not kill its siblings, so the
    family can still assemble a partial report."""
    try:
        return True, _run_member(args)
    except (BoundsError, FloatingPointError) as exc:
        return False, str(exc)


def run_family(config: FamilyConfig) -> ConvergenceReport:
    """Run the whole experiment and assemble the convergence report.

    If a member run violates its guard rails the family is aborted with a
    BoundsError whose ``partial_report`` attribute holds the report over
    the members that finished (written to out_dir as well, when set)."""
    _, hi = config.solver.bounds
    require_admissible(config.params.eos, 0.0, hi)
    grid = config.grid()
    u0 = config.u0_field(grid)

    alpha_p0, alpha_m0, rho_p0, rho_m0 = limit_initial_data(
        config.v_minus, config.v_plus, config.theta, config.delta, grid)
    bn_state = BNState.make(grid, alpha_p0, rho_p0, rho_m0, u0, config.params)
    bn_traj = bn_run(bn_state, config.params, config.solver)

    member_args = [(n, (config.grid_n, config.v_minus, config.v_plus,
                        config.theta, config.delta, u0, config.params,
                        config.solver)) for n in config.n_list]
    workers = int(os.environ.get("PHASEKIT_THREADS", len(config.n_list)))
    if workers > 1 and len(config.n_list) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_member_guarded, member_args))
    else:
        outcomes = [_run_member_guarded(a) for a in member_args]

    failures = {n: msg for (n, _), (ok, msg) in zip(member_args, outcomes)
                if not ok}
    if failures:
        survivors = tuple(n for (n, _), (ok, _) in zip(member_args, outcomes)
                          if ok)
        partial = None
        if survivors:
            partial = _assemble_report(
                config, bn_traj,
                [traj for ok, traj in outcomes if ok], survivors)
            partial.extras["failures"] = failures
            if config.out_dir is not None:
                _write_family(config, partial)
        exc = BoundsError(
            "family aborted, member runs failed: "
            + "; ".join(f"n={n}: {msg}" for n, msg in failures.items()))
        exc.partial_report = partial
        raise exc
    members = [traj for _, traj in outcomes]

    report = _assemble_report(config, bn_traj, members, config.n_list)
    if config.out_dir is not None:
        _write_family(config, report)
    return report


def _assemble_report(config: FamilyConfig, bn_traj, members, n_list
                     ) -> ConvergenceReport:
    times = bn_traj.snapshot_times
    box = config.solver.bounds
    dictionary = TestDictionary(box, m_x=config.m_x, k_max=config.k_max)
    bn_measures = [two_dirac_from_bn(s, box) for s in bn_traj.snapshots]

    dist_series, uerr_series, w1_series = [], [], []
    for n, traj in zip(n_list, members):
        if traj.cfl_limited or traj.snapshot_times.shape != times.shape or \
                np.max(np.abs(traj.snapshot_times - times)) > 1e-10:
            raise ConfigError(
                f"member n={n} left the shared time grid (CFL-limited: "
                f"{traj.cfl_limited}); lower [time].dt and rerun")
        dists, uerrs, w1s = [], [], []
        for s_n, s_bn, m_bn in zip(traj.snapshots, bn_traj.snapshots,
                                   bn_measures):
            m_n = empirical_from_state(s_n, box)
            dists.append(distance(m_n, m_bn, dictionary))
            w1s.append(wasserstein_avg(m_n, m_bn))
            uerrs.append(float(np.max(np.abs(s_n.u - s_bn.u))))
        dist_series.append(np.array(dists))
        uerr_series.append(np.array(uerrs))
        w1_series.append(np.array(w1s))

    sup_dist = [float(np.max(d)) for d in dist_series]
    sup_uerr = [float(np.max(e)) for e in uerr_series]
    slack = 1.2
    return ConvergenceReport(
        n_list=tuple(n_list), times=times, dist_series=dist_series,
        uerr_series=uerr_series, wasserstein_series=w1_series,
        sup_dist=sup_dist, sup_uerr=sup_uerr,
        monotone_dist=_monotone_with_slack(sup_dist, slack),
        monotone_uerr=_monotone_with_slack(sup_uerr, slack),
        slack=slack,
        extras={"bn_trajectory": bn_traj, "members": members,
                "dictionary": dictionary},
    )


def _monotone_with_slack(values, slack: float) -> bool:
    return all(b <= slack * a for a, b in zip(values, values[1:]))


def _pairing_matrix(measures, dictionary):
    return np.array([[m.pair(b) for _, b in dictionary.entries]
                     for m in measures])


def _write_family(config: FamilyConfig, report: ConvergenceReport):
    out = config.out_dir
    os.makedirs(out, exist_ok=True)
    io.write_convergence(os.path.join(out, "convergence.csv"), report)
    box = config.solver.bounds
    dictionary = report.extras["dictionary"]
    bn_traj = report.extras["bn_trajectory"]
    io.write_trajectory(os.path.join(out, "bn"), bn_traj, "bn")
    bn_measures = [two_dirac_from_bn(s, box) for s in bn_traj.snapshots]
    io.write_measure_summary(os.path.join(out, "bn", "measures.csv"),
                             report.times, dictionary.names(),
                             _pairing_matrix(bn_measures, dictionary))
    for n, traj, dists, w1s in zip(report.n_list, report.extras["members"],
                                   report.dist_series,
                                   report.wasserstein_series):
        member_dir = os.path.join(out, f"member_n{n}")
        io.write_trajectory(member_dir, traj, "nsk")
        io.write_distances(os.path.join(member_dir, "distances.csv"),
                           report.times, dists, w1s)
        measures = [empirical_from_state(s, box) for s in traj.snapshots]
        io.write_measure_summary(os.path.join(member_dir, "measures.csv"),
                                 report.times, dictionary.names(),
                                 _pairing_matrix(measures, dictionary))


def kinetic_consistency(trajectory, kind: str, params: PhysicalParams,
                        phi_set=None, box=None) -> dict:
    """Kinetic-equation residuals of a finished run over the smoke set."""
    from . import diagnostics
    times = trajectory.snapshot_times
    if times.size < 2:
        raise ValueError("need a run with at least two snapshots")
    box = box if box is not None else trajectory.config.bounds
    if kind == "nsk":
        measures = [empirical_from_state(s, box) for s in trajectory.snapshots]
    elif kind == "bn":
        measures = [two_dirac_from_bn(s, box) for s in trajectory.snapshots]
    else:
        raise ValueError(f"unknown trajectory kind {kind!r}")
    sigmas = [diagnostics.effective_viscous_flux(s, params)
              for s in trajectory.snapshots]
    us = [s.u for s in trajectory.snapshots]
    phi_set = phi_set if phi_set is not None else smoke_test_set(
        float(times[-1] - times[0]))
    return {phi.name: kinetic_residual(measures, us, sigmas, times, phi, params)
            for phi in phi_set}
