"""Experiment configuration files.

Format: one ``key = value`` per line, ``#`` starts a comment, lists are
comma separated (``N = 32, 64, 128``). Power keys ending in ``_dB`` are
converted to linear units on load. See README for the full key list.
"""

import math
from dataclasses import dataclass, field

from .channel import SystemConfig, db_to_linear
from .errors import ConfigError
from .precoder import Scheme
from .validation import TOLERANCES

INT_KEYS = {"N", "L", "K", "M", "tau", "trials", "seed", "workers", "ins_max_iter"}
FLOAT_KEYS = {"P", "P_dB", "p_tau", "p_tau_dB", "phi", "phi_step", "sigma2", "beta", "beta_eve",
              "grid_step", "ins_tol"}
LIST_KEYS = {"N", "L", "phi", "beta", "schemes"}
OTHER_KEYS = {"schemes", "refine"}

# command -> keys that may hold more than one value
SWEEP_AXES = {
    "sweep-n": {"N"},
    "sweep-phi": {"L", "phi"},
    "optimize-phi": {"L"},
    "validate": set(),
}

DEFAULTS = {
    "sweep-n": {"N": [32, 64, 128, 256, 512], "schemes": list(Scheme)},
    "sweep-phi": {"L": [8, 12, 16], "schemes": [Scheme.HZF, Scheme.HMF]},
    "optimize-phi": {"schemes": [Scheme.HZF, Scheme.HMF]},
    "validate": {"trials": 1000},
}


def parse_config_text(text):
    """Parse ``key = value`` lines into a dict of stripped string values."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _convert(key, value):
    items = [v.strip() for v in value.split(",")]
    if any(v == "" for v in items):
        raise ConfigError(f"{key}: empty list element in {value!r}")
    if len(items) > 1 and key not in LIST_KEYS:
        raise ConfigError(f"{key}: does not accept a list")
    try:
        if key == "schemes":
            return [Scheme(v.upper()) for v in items]
        if key == "refine":
            low = value.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return low in ("true", "1", "yes")
        if key in INT_KEYS:
            vals = [int(v) for v in items]
        else:
            vals = [float(v) for v in items]
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r}") from None
    return vals if key in LIST_KEYS else vals[0]


@dataclass
class ExperimentConfig:
    """Parsed experiment: base system parameters plus sweep lists and run controls."""

    command: str
    N: list = field(default_factory=lambda: [128])
    L: list = field(default_factory=lambda: [10])
    phi: list = field(default_factory=lambda: [0.5])
    system: dict = field(default_factory=dict)
    schemes: list = field(default_factory=lambda: list(Scheme))
    trials: int = 5000
    seed: int = 1
    workers: int = 1
    phi_step: float = 0.05
    grid_step: float = 0.01
    refine: bool = False
    ins_tol: float = 1e-6
    ins_max_iter: int = 500
    tolerances: dict = field(default_factory=dict)

    def system_config(self, **changes):
        kw = dict(self.system)
        kw.update(N=self.N[0], L=self.L[0], phi=self.phi[0])
        kw.update(changes)
        return SystemConfig(**kw)


def build_experiment(command, values=None):
    """Turn parsed ``key -> string`` values into an ExperimentConfig for ``command``."""
    if command not in SWEEP_AXES:
        raise ValueError(f"unknown command {command!r}")
    values = dict(values or {})
    exp = ExperimentConfig(command)
    for key, val in DEFAULTS[command].items():
        setattr(exp, key, list(val) if isinstance(val, list) else val)
    system = {"P": db_to_linear(10.0), "p_tau": db_to_linear(0.0), "K": 3, "M": 5}
    for pair in (("P", "P_dB"), ("p_tau", "p_tau_dB")):
        if all(k in values for k in pair):
            raise ConfigError(f"give either {pair[0]} or {pair[1]}, not both")
    for key, raw in values.items():
        if key.startswith("tol_"):
            if key[4:] not in TOLERANCES:
                raise ConfigError(f"{key}: no check named {key[4:]!r}")
            try:
                exp.tolerances[key[4:]] = float(raw)
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {raw!r}") from None
            continue
        if key not in INT_KEYS | FLOAT_KEYS | OTHER_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        val = _convert(key, raw)
        if key in ("N", "L", "phi", "schemes"):
            setattr(exp, key, val)
        elif key in ("trials", "seed", "workers", "phi_step", "grid_step", "refine", "ins_tol", "ins_max_iter"):
            setattr(exp, key, val)
        elif key.endswith("_dB"):
            system[key[:-3]] = db_to_linear(val)
        else:
            system[key] = val
    exp.system = system
    multi = {k for k in ("N", "L", "phi") if len(getattr(exp, k)) > 1}
    extra = multi - SWEEP_AXES[command]
    if extra:
        raise ConfigError([f"{command}: {k} must be a single value" for k in sorted(extra)])
    if not exp.schemes:
        raise ConfigError("schemes: empty")
    if exp.trials < 1:
        raise ConfigError("trials >= 1")
    if exp.workers < 1:
        raise ConfigError("workers >= 1")
    if not 0.0 < exp.phi_step <= 0.5 or not math.isfinite(exp.phi_step):
        raise ConfigError("phi_step in (0, 0.5]")
    return exp


def load_experiment(command, path=None):
    if path is None:
        return build_experiment(command)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return build_experiment(command, parse_config_text(text))
