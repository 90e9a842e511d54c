"""
Shared configuration and console helpers for the q-logarithm blocklength lab.

Defaults reproduce the canonical experiment: Bernoulli source with p = 0.11,
eps = 0.01, blocklengths 20..200. Environment variables (see .envrc) override the
Monte Carlo defaults; a key=value config file overrides the environment; command
line flags override everything.
"""

import logging
import math
import os
from dataclasses import dataclass, fields
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

from .errors import BlocklengthError, ConfigError
from .source_model import SourcePmf

# Monte Carlo defaults; .envrc exports overrides per checkout
DEFAULT_SEED = 20250611
DEFAULT_SAMPLES = 100_000
DEFAULT_WORKERS = 1

# Environment variable -> RunConfig field
ENV_KEYS = {
    "QBLOCK_SEED": "seed",
    "QBLOCK_SAMPLES": "samples",
    "QBLOCK_WORKERS": "workers",
}

DEFAULT_PMF = "0.11,0.89"
DEFAULT_EPS = 0.01
DEFAULT_N_MIN = 20
DEFAULT_N_MAX = 200
DEFAULT_N_STEP = 1

RESONANCE_GRID = (16, 64, 256, 1024, 4096)
RESONANCE_MAX_K = 3
SLOPE_TOLERANCE = 0.1
IDENTITY_MAX_ULP = 4
CENTRALIZATION_BLOCKLENGTHS = (10, 50, 100, 200)

UNITS = ("nats", "bits")

console = Console()
err_console = Console(stderr=True)


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Route log records to stderr so reports and CSV on stdout stay clean."""
    level = logging.WARNING if quiet else logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def format_number(x: float) -> str:
    """Shortest decimal with at most 12 significant digits."""
    return f"{x:.12g}"


@dataclass(frozen=True)
class RunConfig:
    pmf_spec: str = DEFAULT_PMF
    eps: float = DEFAULT_EPS
    n_min: int = DEFAULT_N_MIN
    n_max: int = DEFAULT_N_MAX
    n_step: int = DEFAULT_N_STEP
    alpha_override: float | None = None
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    output_path: str | None = None
    units: str = "nats"
    workers: int = DEFAULT_WORKERS

    def __post_init__(self):
        try:
            self.pmf()
        except BlocklengthError as e:
            raise ConfigError(f"Invalid --pmf {self.pmf_spec!r}: {e}") from e
        if not (0.0 < self.eps < 1.0):
            raise ConfigError(f"--eps must be in (0, 1), got {self.eps}")
        if self.n_min < 1 or self.n_min > self.n_max:
            raise ConfigError(f"Need 1 <= n-min <= n-max, got {self.n_min}..{self.n_max}")
        if self.n_step < 1:
            raise ConfigError(f"--n-step must be positive, got {self.n_step}")
        if self.alpha_override is not None and not math.isfinite(self.alpha_override):
            raise ConfigError(f"--alpha must be finite, got {self.alpha_override}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError(f"--seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.samples < 1:
            raise ConfigError(f"--samples must be positive, got {self.samples}")
        if self.units not in UNITS:
            raise ConfigError(f"--units must be one of {UNITS}, got {self.units!r}")
        if self.workers < 1:
            raise ConfigError(f"--workers must be positive, got {self.workers}")

    def pmf(self) -> SourcePmf:
        return SourcePmf.from_text(self.pmf_spec)

    def n_values(self) -> range:
        return range(self.n_min, self.n_max + 1, self.n_step)


# Config-file / flag key -> (RunConfig field, parser)
_KEYS = {
    "pmf": ("pmf_spec", str),
    "eps": ("eps", float),
    "nmin": ("n_min", int),
    "nmax": ("n_max", int),
    "nstep": ("n_step", int),
    "alpha": ("alpha_override", float),
    "seed": ("seed", int),
    "samples": ("samples", int),
    "out": ("output_path", str),
    "units": ("units", str),
    "workers": ("workers", int),
}


def _normalize_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "").replace("_", "").lower()


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse 'key=value' lines ('#' starts a comment) into RunConfig field values."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        norm = _normalize_key(key)
        if norm not in _KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        field_name, parse = _KEYS[norm]
        try:
            values[field_name] = parse(value)
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {e}") from e
    return values


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    return parse_config_text(text, source=str(path))


def environment_values() -> dict:
    """Integer overrides from QBLOCK_* variables; empty variables count as unset."""
    values = {}
    for name, field_name in ENV_KEYS.items():
        raw = os.getenv(name, "").strip()
        if not raw:
            continue
        try:
            values[field_name] = int(raw)
        except ValueError as e:
            raise ConfigError(f"Environment variable {name}={raw!r} is not an integer") from e
    return values


def resolve_run_config(flag_values: dict, config_path: str | None = None) -> RunConfig:
    """Layer defaults < environment < config file < flags; None flags are unset."""
    known = {f.name for f in fields(RunConfig)}
    merged = environment_values()
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update({k: v for k, v in flag_values.items() if v is not None and k in known})
    return RunConfig(**merged)
