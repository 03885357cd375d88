"""Experiment configuration, flat ``key = value`` config files and presets."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .adaptive_filters import ATTRACTOR_SCALINGS
from .errors import ConfigError

# Canonical algorithm names.  "lms" and "l0lms" are aliases of the fast
# (step size mu_1) single filters.
ALGORITHMS = ("lms_fast", "lms_slow", "l0lms_fast", "l0lms_slow", "ac_lms", "ac_l0lms")
ALIASES = {"lms": "lms_fast", "l0lms": "l0lms_fast"}
COMBINED = ("ac_lms", "ac_l0lms")
DIVERGENCE_POLICIES = ("abort", "exclude")
DEFAULT_DELTAS = (0.1, 0.3, 0.5, 0.7, 0.9)


def canonical(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in ALGORITHMS:
        raise ConfigError(
            f"unknown algorithm {name!r}; choose from {ALGORITHMS + tuple(ALIASES)}",
            field="algorithms",
        )
    return name


@dataclass(frozen=True)
class ExperimentConfig:
    n_taps: int = 32
    n_active: int = 3
    snr_db: float = 10.0
    gamma: float = 4.0
    delta: float = 0.3
    mu_lambda: float = 1.0
    alpha: float = 10.0
    beta_coeff: float = 0.02
    n_iterations: int = 3000
    n_runs: int = 1000
    master_seed: int = 0
    algorithms: tuple[str, ...] = ("lms", "l0lms", "ac_lms", "ac_l0lms")
    normalize_system: bool = True
    lambda_init: float = 0.5
    steady_window: float = 0.1
    input_variance: float = 1.0
    lambda_clamp: tuple[float, float] | None = None
    attractor_scaling: str = "mu_beta"
    divergence_policy: str = "abort"
    track_optimal_lambda: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        def bad(name, msg):
            raise ConfigError(msg, field=name)

        if self.n_taps < 1:
            bad("n_taps", f"must be >= 1, got {self.n_taps}")
        if not 1 <= self.n_active <= self.n_taps:
            bad("n_active", f"must lie in [1, n_taps={self.n_taps}], got {self.n_active}")
        if math.isnan(self.snr_db):
            bad("snr_db", "must not be NaN")
        if not self.n_taps + self.gamma > 0:
            bad("gamma", f"n_taps + gamma must be > 0, got {self.n_taps + self.gamma}")
        if not 0 < self.delta <= 1:
            bad("delta", f"must lie in (0, 1], got {self.delta}")
        if not self.mu_lambda > 0:
            bad("mu_lambda", f"must be > 0, got {self.mu_lambda}")
        if not self.alpha > 0:
            bad("alpha", f"must be > 0, got {self.alpha}")
        if not self.beta_coeff >= 0:
            bad("beta_coeff", f"must be >= 0, got {self.beta_coeff}")
        if self.n_iterations < 1:
            bad("n_iterations", f"must be >= 1, got {self.n_iterations}")
        if self.n_runs < 1:
            bad("n_runs", f"must be >= 1, got {self.n_runs}")
        if not self.algorithms:
            bad("algorithms", "must name at least one algorithm")
        names = [canonical(a) for a in self.algorithms]
        if len(set(names)) != len(names):
            bad("algorithms", f"duplicate entries in {self.algorithms}")
        if not math.isfinite(self.lambda_init):
            bad("lambda_init", "must be finite")
        if not 0 < self.steady_window <= 1:
            bad("steady_window", f"must lie in (0, 1], got {self.steady_window}")
        if not self.input_variance > 0:
            bad("input_variance", f"must be > 0, got {self.input_variance}")
        if self.lambda_clamp is not None:
            lo, hi = self.lambda_clamp
            if not lo < hi:
                bad("lambda_clamp", f"need lo < hi, got {self.lambda_clamp}")
        if self.attractor_scaling not in ATTRACTOR_SCALINGS:
            bad("attractor_scaling", f"must be one of {ATTRACTOR_SCALINGS}")
        if self.divergence_policy not in DIVERGENCE_POLICIES:
            bad("divergence_policy", f"must be one of {DIVERGENCE_POLICIES}")

    @property
    def mu_fast(self) -> float:
        return 1.0 / (self.n_taps + self.gamma)

    @property
    def mu_slow(self) -> float:
        return self.delta * self.mu_fast


def derive_step_sizes(cfg: ExperimentConfig) -> tuple[float, float]:
    """``mu1 = 1/(n_taps + gamma)`` and ``mu2 = delta * mu1``."""
    if not 0 < cfg.delta <= 1:
        raise ConfigError(f"must lie in (0, 1], got {cfg.delta}", field="delta")
    mu1 = 1.0 / (cfg.n_taps + cfg.gamma)
    return mu1, cfg.delta * mu1


# ---------------------------------------------------------------------------
# text format

def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text: str) -> int:
    return int(text.strip())


def _parse_float(text: str) -> float:
    return float(text.strip())


def _parse_algorithms(text: str) -> tuple[str, ...]:
    return tuple(a.strip() for a in text.split(",") if a.strip())


def _parse_clamp(text: str):
    if text.strip().lower() in ("", "none", "off"):
        return None
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 2:
        raise ValueError(f"expected 'lo,hi' or 'none', got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _parse_str(text: str) -> str:
    return text.strip()


_PARSERS = {
    "n_taps": _parse_int,
    "n_active": _parse_int,
    "snr_db": _parse_float,
    "gamma": _parse_float,
    "delta": _parse_float,
    "mu_lambda": _parse_float,
    "alpha": _parse_float,
    "beta_coeff": _parse_float,
    "n_iterations": _parse_int,
    "n_runs": _parse_int,
    "master_seed": _parse_int,
    "algorithms": _parse_algorithms,
    "normalize_system": _parse_bool,
    "lambda_init": _parse_float,
    "steady_window": _parse_float,
    "input_variance": _parse_float,
    "lambda_clamp": _parse_clamp,
    "attractor_scaling": _parse_str,
    "divergence_policy": _parse_str,
    "track_optimal_lambda": _parse_bool,
}
assert set(_PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_pairs(pairs, source: str = "") -> dict:
    """Turn ``(key, text)`` pairs into typed values, rejecting unknown keys."""
    values = {}
    for key, text in pairs:
        key = key.strip()
        if key not in _PARSERS:
            raise ConfigError(f"unknown key{' in ' + source if source else ''}", field=key)
        try:
            values[key] = _PARSERS[key](text)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {text.strip()!r}: {exc}", field=key) from None
    return values


def read_config_file(path) -> list[tuple[str, str]]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        pairs.append((key, value))
    return pairs


def split_override(item: str) -> tuple[str, str]:
    if "=" not in item:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    key, value = item.split("=", 1)
    return key, value


def load_config(path=None, overrides=(), base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Resolve a configuration.

    Starts from ``base`` (the default parameter set when omitted), applies the
    file at ``path`` and then the ``key=value`` strings in ``overrides``.
    """
    values = {}
    if path is not None:
        values.update(parse_pairs(read_config_file(path), source=str(path)))
    values.update(parse_pairs([split_override(o) for o in overrides], source="overrides"))
    cfg = base if base is not None else ExperimentConfig()
    try:
        return replace(cfg, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple) and value and isinstance(value[0], str):
        return ",".join(value)
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if value is None:
        return "none"
    return str(value)


def dump_config(cfg: ExperimentConfig) -> str:
    """Serialize every field; :func:`load_config` reads it back unchanged."""
    return "".join(f"{f.name} = {_format_value(getattr(cfg, f.name))}\n" for f in fields(cfg))


# ---------------------------------------------------------------------------
# presets for the published learning-curve figures

FIGURE_PRESETS = {
    "fig3": dict(n_active=3, delta=0.3),
    "fig4": dict(n_active=6, delta=0.3),
    "fig5": dict(n_active=3, delta=0.5),
    "fig6": dict(n_active=6, delta=0.5),
    # delta sweeps; delta itself is swept over DEFAULT_DELTAS
    "fig7": dict(n_active=3, algorithms=("lms", "ac_lms", "ac_l0lms")),
    "fig8": dict(n_active=6, algorithms=("lms", "ac_lms", "ac_l0lms")),
}
SWEEP_PRESETS = ("fig7", "fig8")


def preset(name: str) -> ExperimentConfig:
    try:
        return ExperimentConfig(**FIGURE_PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}") from None


def as_dict(cfg: ExperimentConfig) -> dict:
    return dataclasses.asdict(cfg)
