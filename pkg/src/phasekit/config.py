"""Strict key-value run configuration.

The file format is INI-shaped: ``[section]`` headers, ``key = value`` lines
and ``#`` comments.  Unknown sections or keys are errors with the offending
line number, as are malformed values, so a typo can never silently fall
back to a default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bn import BNState
from .eos import make_eos
from .errors import ConfigError
from .harness import FamilyConfig, limit_initial_data
from .nsk import (FluidState, PhysicalParams, SolverConfig,
                  make_oscillating_initial)
from .torus import PeriodicGrid


def _parse_int(raw):
    return int(raw)


def _parse_float(raw):
    return float(raw)


def _parse_str(raw):
    return raw


def _parse_bool(raw):
    lowered = raw.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_int_list(raw):
    return [int(part.strip()) for part in raw.split(",") if part.strip()]


# section -> key -> (parser, default); None default means "no default,
# required only if the consuming subcommand needs it"
SCHEMA = {
    "physics": {
        "mu": (_parse_float, 0.1),
        "kappa": (_parse_float, 0.1),
        "gamma": (_parse_float, 2.0),
    },
    "eos": {
        "type": (_parse_str, "van_der_waals"),
        "A": (_parse_float, 1.0),
        "B": (_parse_float, 3.0),
        "R": (_parse_float, 1.0),
        "T_star": (_parse_float, 0.2),
        "a": (_parse_float, 1.0),
        "beta": (_parse_float, 2.0),
    },
    "grid": {
        "n": (_parse_int, 256),
    },
    "time": {
        "dt": (_parse_float, 1e-4),
        "cfl": (_parse_float, 0.4),
        "t_end": (_parse_float, 0.1),
        "snapshot_every": (_parse_int, 50),
    },
    "bounds": {
        "m0": (_parse_float, 1.4),
    },
    "init": {
        "profile": (_parse_str, "two_value"),
        "rho0": (_parse_float, 1.2),
        "v_minus": (_parse_float, 0.8),
        "v_plus": (_parse_float, 1.6),
        "theta": (_parse_float, 0.5),
        "delta": (_parse_float, 0.1),
        "n_osc": (_parse_int, 4),
        "u0": (_parse_float, 0.0),
        "u0_mode": (_parse_int, 0),
        "u0_amp": (_parse_float, 0.0),
    },
    "bn": {
        "from_profile": (_parse_bool, True),
        "alpha_p": (_parse_float, 0.5),
        "rho_p": (_parse_float, 1.6),
        "rho_m": (_parse_float, 0.8),
    },
    "harness": {
        "n_list": (_parse_int_list, [2, 4]),
        "m_x": (_parse_int, 4),
        "k_max": (_parse_int, 4),
        "upwind": (_parse_float, 0.5),
    },
    "output": {
        "directory": (_parse_str, "out"),
    },
}


@dataclass
class RunConfig:
    sections: dict = field(default_factory=dict)

    def __getitem__(self, section):
        return self.sections[section]

    def to_dict(self) -> dict:
        return {sec: dict(vals) for sec, vals in self.sections.items()}

    @classmethod
    def from_dict(cls, payload: dict) -> "RunConfig":
        config = _defaults()
        for section, values in payload.items():
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]")
            for key, value in values.items():
                if key not in SCHEMA[section]:
                    raise ConfigError(f"unknown key [{section}].{key}")
                config.sections[section][key] = value
        _validate(config, path="<dict>")
        return config


def _defaults() -> RunConfig:
    return RunConfig({sec: {k: (list(d) if isinstance(d, list) else d)
                            for k, (_, d) in keys.items()}
                      for sec, keys in SCHEMA.items()})


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text, path)


def parse_config(text: str, path: str = "<string>") -> RunConfig:
    config = _defaults()
    section = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got "
                              f"{raw_line.strip()!r}")
        if section is None:
            raise ConfigError(f"{path}:{lineno}: key outside any [section]")
        key, raw_value = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA[section]:
            raise ConfigError(f"{path}:{lineno}: unknown key [{section}].{key}")
        parser, _ = SCHEMA[section][key]
        try:
            config.sections[section][key] = parser(raw_value)
        except ValueError as exc:
            raise ConfigError(
                f"{path}:{lineno}: bad value for [{section}].{key}: {exc}"
            ) from exc
    _validate(config, path)
    return config


def _validate(config: RunConfig, path: str):
    def err(msg):
        raise ConfigError(f"{path}: {msg}")

    phys = config["physics"]
    for key in ("mu", "kappa"):
        if phys[key] <= 0.0:
            err(f"[physics].{key} must be positive, got {phys[key]}")
    if phys["gamma"] < 0.0:
        err(f"[physics].gamma must be nonnegative, got {phys['gamma']}")
    eos = config["eos"]
    if eos["type"] not in ("van_der_waals", "polytropic"):
        err(f"[eos].type must be van_der_waals or polytropic, got {eos['type']!r}")
    grid = config["grid"]
    if grid["n"] < 8 or grid["n"] % 2:
        err(f"[grid].n must be even and at least 8, got {grid['n']}")
    time_sec = config["time"]
    for key in ("dt", "t_end"):
        if time_sec[key] <= 0.0:
            err(f"[time].{key} must be positive, got {time_sec[key]}")
    if not 0.0 < time_sec["cfl"] <= 1.0:
        err(f"[time].cfl must lie in (0, 1], got {time_sec['cfl']}")
    if time_sec["snapshot_every"] < 1:
        err(f"[time].snapshot_every must be at least 1")
    if config["bounds"]["m0"] <= 0.0:
        err(f"[bounds].m0 must be positive, got {config['bounds']['m0']}")
    init = config["init"]
    if init["profile"] not in ("two_value", "constant"):
        err(f"[init].profile must be two_value or constant, got "
            f"{init['profile']!r}")
    if not 0.0 < init["theta"] < 1.0:
        err(f"[init].theta must lie in (0, 1), got {init['theta']}")
    if init["n_osc"] < 1:
        err(f"[init].n_osc must be at least 1, got {init['n_osc']}")
    bn = config["bn"]
    if not 0.0 <= bn["alpha_p"] <= 1.0:
        err(f"[bn].alpha_p must lie in [0, 1], got {bn['alpha_p']}")
    n_list = config["harness"]["n_list"]
    if not n_list:
        err("[harness].n_list must not be empty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        err("n_list must be strictly increasing")


# ------------------------------------------------------------------ builders

def build_eos(config: RunConfig):
    spec = dict(config["eos"])
    spec["gamma"] = config["physics"]["gamma"]
    if spec["type"] == "van_der_waals":
        return make_eos({k: spec[k] for k in ("type", "A", "B", "R", "T_star",
                                              "gamma")})
    return make_eos({k: spec[k] for k in ("type", "a", "beta", "gamma")})


def build_params(config: RunConfig) -> PhysicalParams:
    phys = config["physics"]
    return PhysicalParams(mu=phys["mu"], kappa=phys["kappa"],
                          gamma=phys["gamma"], eos=build_eos(config))


def guard_rails(config: RunConfig) -> tuple:
    m0 = config["bounds"]["m0"]
    return (1.0 / (2.0 * m0), 2.0 * m0)


def build_solver(config: RunConfig, upwind: float | None = None) -> SolverConfig:
    t = config["time"]
    return SolverConfig(dt=t["dt"], t_end=t["t_end"], cfl=t["cfl"],
                        bounds=guard_rails(config),
                        snapshot_every=t["snapshot_every"],
                        upwind=config["harness"]["upwind"] if upwind is None
                        else upwind)


def build_grid(config: RunConfig) -> PeriodicGrid:
    return PeriodicGrid(config["grid"]["n"])


def u0_field(config: RunConfig, grid: PeriodicGrid) -> np.ndarray:
    init = config["init"]
    u0 = np.full(grid.n, init["u0"])
    if init["u0_mode"] > 0 and init["u0_amp"] != 0.0:
        u0 = u0 + init["u0_amp"] * np.sin(2 * np.pi * init["u0_mode"] * grid.x)
    return u0


def rho0_field(config: RunConfig, grid: PeriodicGrid) -> np.ndarray:
    init = config["init"]
    if init["profile"] == "constant":
        return np.full(grid.n, init["rho0"])
    return make_oscillating_initial(grid, init["v_minus"], init["v_plus"],
                                    init["theta"], init["n_osc"],
                                    init["delta"], bounds=guard_rails(config))


def build_nsk_initial(config: RunConfig, params: PhysicalParams) -> FluidState:
    grid = build_grid(config)
    return FluidState.make(grid, rho0_field(config, grid),
                           u0_field(config, grid), params)


def build_bn_initial(config: RunConfig, params: PhysicalParams) -> BNState:
    grid = build_grid(config)
    bn = config["bn"]
    init = config["init"]
    if bn["from_profile"]:
        if init["profile"] == "constant":
            alpha_p, rho_p, rho_m = 1.0, init["rho0"], init["rho0"]
        else:
            alpha_p, _, rho_p, rho_m = limit_initial_data(
                init["v_minus"], init["v_plus"], init["theta"], init["delta"],
                grid)
    else:
        alpha_p, rho_p, rho_m = bn["alpha_p"], bn["rho_p"], bn["rho_m"]
    return BNState.make(grid, alpha_p, rho_p, rho_m, u0_field(config, grid),
                        params)


def build_family(config: RunConfig, out_dir: str | None = None) -> FamilyConfig:
    init = config["init"]
    har = config["harness"]
    return FamilyConfig(
        n_list=tuple(har["n_list"]), v_minus=init["v_minus"],
        v_plus=init["v_plus"], theta=init["theta"], delta=init["delta"],
        u0=u0_field(config, build_grid(config)), params=build_params(config),
        solver=build_solver(config), grid_n=config["grid"]["n"],
        m_x=har["m_x"], k_max=har["k_max"], out_dir=out_dir)
