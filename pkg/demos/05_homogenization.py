"""The homogenization experiment: oscillating families vs the two-phase limit.

Initial densities oscillate n-fold between a vapor and a liquid value; as n
grows, the empirical measures of the detailed-scale fields approach the
two-Dirac measures carried by the two-phase run started from the limit
data, and the velocities converge in max norm at roughly O(1/n).

Run:  python demos/05_homogenization.py           (about 10 s)
      PHASEKIT_THREADS=1 python demos/05_homogenization.py   (serial)
"""

from phasekit import (FamilyConfig, PeriodicGrid, PhysicalParams,
                      SolverConfig, VanDerWaalsEOS, run_family, suggest_dt)

eos = VanDerWaalsEOS(1.0, 3.0, 1.0, 0.2, gamma=2.0)
params = PhysicalParams(mu=0.1, kappa=0.1, gamma=2.0, eos=eos)
grid_n = 1024
t_end = 0.1

grid = PeriodicGrid(grid_n)
dt = suggest_dt(params, (0.5, 2.0), 0.5, 0.4, grid)
steps = round(t_end / dt)
solver = SolverConfig(dt=t_end / steps, t_end=t_end, cfl=0.4,
                      bounds=(1 / 2.8, 2.8), snapshot_every=max(1, steps // 8))

config = FamilyConfig(n_list=(4, 8, 16), v_minus=0.8, v_plus=1.6, theta=0.5,
                      delta=0.1, u0=0.0, params=params, solver=solver,
                      grid_n=grid_n)
print(f"running {len(config.n_list)} members at N = {grid_n}, "
      f"{steps} steps each ...")
report = run_family(config)

print(f"\n{'n':>4s} {'sup_t dict dist':>16s} {'sup_t |u - u_bn|':>17s}")
for n, d, e in zip(report.n_list, report.sup_dist, report.sup_uerr):
    print(f"{n:4d} {d:16.6f} {e:17.6f}")

print(f"\nper-snapshot dictionary distances:")
header = "   t: " + " ".join(f"{t:8.3f}" for t in report.times)
print(header)
for n, series in zip(report.n_list, report.dist_series):
    print(f"n={n:3d} " + " ".join(f"{v:8.5f}" for v in series))

print(f"\nmonotone within 20% slack: distances {report.monotone_dist}, "
      f"velocities {report.monotone_uerr}")
print("the n-independent floor is the ramp width delta showing through the "
      "initial data:\nthe limit measure concentrates on two values only up "
      "to O(delta).")
