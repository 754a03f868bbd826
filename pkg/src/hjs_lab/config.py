"""Flat key = value scenario configuration.

Format: one `key = value` per line, `#` starts a comment, no nesting.  Every
error message carries the offending line number.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

SCENARIOS = (
    "free_packet",
    "harmonic_benchmark",
    "quartic",
    "kappa_sweep",
    "theta_interference",
    "equivalence_check",
    "admissibility_suite",
)

# key -> (type tag, default or None). Scenario-specific defaults applied after.
_SCHEMA = {
    "scenario": ("str", None),
    "outdir": ("str", "out"),
    "L": ("float", 20.0),
    "N": ("int", 1024),
    "dt": ("float", 1e-3),
    "t_final": ("float", None),
    "sample_every": ("int", None),
    "kappa_re": ("float", 1.0),
    "kappa_im": ("float", 0.0),
    "m": ("float", 1.0),
    "omega": ("float", 1.0),
    "lambda": ("float", 0.1),
    "eps": ("float", 0.4),
    "sigma": ("float", 0.4),
    "p0": ("float", 1.0),
    "solver": ("str", "linear"),
    "quantum_term": ("bool", True),
    "node_floor": ("float", 1e-6),
    "kappa_list": ("floats", (0.5, 1.0, 2.0)),
    "theta_values": ("floats", (0.0, 1e-3, 2e-3)),
    "separation": ("float", 1.0),
    "rel_phase": ("float", 1.2),
    "snapshot_times": ("floats", ()),
    "tol_mean_q": ("float", 1e-5),
    "tol_mean_p": ("float", 1e-5),
    "tol_var_q": ("float", 1e-3),
    "tol_var_p_op": ("float", 1e-3),
    "tol_rho": ("float", 1e-3),
    "tol_linearity": ("float", 1e-2),
    "tol_kappa_independence": ("float", 1e-6),
}

_SCENARIO_DEFAULTS = {
    "free_packet": {"sigma": 1.0, "t_final": 1.0},
    "harmonic_benchmark": {"t_final": 2.0 * np.pi},
    "quartic": {"t_final": 2.0 * np.pi},
    "kappa_sweep": {"t_final": 2.0 * np.pi, "L": 25.0},
    "theta_interference": {},
    "equivalence_check": {"t_final": np.pi / 4.0, "dt": 5e-4,
                          "kappa_re": 0.02, "N": 2048},
    "admissibility_suite": {},
}


@dataclass(frozen=True)
class ScenarioConfig:
    values: dict = field(default_factory=dict)

    def __getattr__(self, name):
        key = "lambda" if name == "lam" else name
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(name) from None

    def echo(self) -> dict:
        return dict(self.values)


def _parse_value(key: str, raw: str, lineno: int):
    kind, _ = _SCHEMA[key]
    try:
        if kind == "str":
            return raw
        if kind == "int":
            v = int(raw)
        elif kind == "float":
            v = float(raw)
        elif kind == "bool":
            low = raw.lower()
            if low in ("on", "true", "1", "yes"):
                return True
            if low in ("off", "false", "0", "no"):
                return False
            raise ValueError(raw)
        elif kind == "floats":
            v = tuple(float(p) for p in raw.split(",") if p.strip() != "")
        else:  # pragma: no cover
            raise ValueError(kind)
    except ValueError:
        raise ConfigurationError(
            f"line {lineno}: cannot parse value {raw!r} for key {key!r}") from None
    if kind in ("int", "float") and not np.isfinite(v):
        raise ConfigurationError(f"line {lineno}: non-finite value for {key!r}")
    return v


def parse_config(text: str, overrides: dict | None = None) -> ScenarioConfig:
    """Parse and validate a scenario configuration."""
    raw: dict = {}
    lines_seen: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        raw[key] = _parse_value(key, value, lineno)
        lines_seen[key] = lineno
    for key, value in (overrides or {}).items():
        if key not in _SCHEMA:
            raise ConfigurationError(f"override: unknown key {key!r}")
        raw[key] = _parse_value(key, str(value), 0)
    if "scenario" not in raw:
        raise ConfigurationError("missing required key 'scenario'")
    scenario = raw["scenario"]
    if scenario not in SCENARIOS:
        raise ConfigurationError(
            f"unknown scenario {scenario!r}; choices: {', '.join(SCENARIOS)}")
    values = {k: default for k, (_, default) in _SCHEMA.items()}
    values.update(_SCENARIO_DEFAULTS[scenario])
    values.update(raw)
    if values["t_final"] is None:
        values["t_final"] = 1.0
    if values["sample_every"] is None:
        values["sample_every"] = max(1, int(round(
            values["t_final"] / values["dt"] / 64)))
    _validate(values)
    return ScenarioConfig(values=values)


def _validate(v: dict) -> None:
    n = v["N"]
    if n < 8 or (n & (n - 1)) != 0:
        raise ConfigurationError(f"N must be a power of two >= 8, got {n}")
    if v["L"] <= 0:
        raise ConfigurationError("L must be positive")
    if v["dt"] <= 0 or v["t_final"] <= 0:
        raise ConfigurationError("dt and t_final must be positive")
    if v["kappa_re"] == 0.0 and v["kappa_im"] == 0.0:
        raise ConfigurationError("kappa must be nonzero")
    if v["solver"] not in ("linear", "madelung"):
        raise ConfigurationError(f"unknown solver {v['solver']!r}")
    needs_real = v["scenario"] == "equivalence_check" or v["solver"] == "madelung"
    if needs_real and v["kappa_im"] != 0.0:
        raise ConfigurationError(
            "the (R, S) solver requires real kappa (kappa_im = 0)")
    if v["scenario"] == "theta_interference":
        thetas = v["theta_values"]
        if 0.0 not in thetas or len([t for t in thetas if t != 0.0]) < 2:
            raise ConfigurationError(
                "theta_values must include 0 and at least two nonzero entries")
