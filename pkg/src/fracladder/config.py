"""Configuration for fracladder runs."""

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from .errors import ConfigError, DomainError
from .ladder import DEFAULT_MAX_LEVEL
from .powerexp import check_alpha


def _env_bool(name: str, default: bool) -> bool:
    return os.getenv(name, str(default)).lower() == "true"


def _env(name: str, default: Any, convert: Callable[[str], Any]) -> Any:
    """Read and convert one FRACLADDER_* variable.

    Raises:
        ConfigError: if the value cannot be converted
    """
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return convert(raw)
    except ValueError:
        raise ConfigError(f"invalid value for {name}: {raw!r}")


class FracladderConfig:
    """Defaults, overridable through FRACLADDER_* environment variables."""

    # Grid settings
    K_MAX = 20.0
    POINTS = 4096

    # Ladder settings
    MAX_LEVEL = DEFAULT_MAX_LEVEL

    # Execution settings
    WORKERS = 4
    LOG_LEVEL = os.getenv("FRACLADDER_LOG_LEVEL", "WARNING")
    SEED = 2016

    # Evaluate the printed E_2 formula verbatim in reports
    VERBATIM_E2 = _env_bool("FRACLADDER_VERBATIM_E2", False)

    @classmethod
    def get_grid_defaults(cls) -> Dict[str, Any]:
        """Get grid defaults from the environment.

        Returns:
            Dictionary with k_max and points

        Raises:
            ConfigError: if a variable is malformed
        """
        return {
            'k_max': _env("FRACLADDER_K_MAX", cls.K_MAX, float),
            'points': _env("FRACLADDER_POINTS", cls.POINTS, int),
        }

    @classmethod
    def get_all_settings(cls) -> Dict[str, Any]:
        """Get every environment-backed setting.

        Returns:
            Dictionary mapping setting names to their current values

        Raises:
            ConfigError: if a variable is malformed
        """
        settings = cls.get_grid_defaults()
        settings.update({
            'max_level': _env("FRACLADDER_MAX_LEVEL", cls.MAX_LEVEL, int),
            'workers': _env("FRACLADDER_WORKERS", cls.WORKERS, int),
            'log_level': os.getenv("FRACLADDER_LOG_LEVEL", cls.LOG_LEVEL),
            'seed': _env("FRACLADDER_SEED", cls.SEED, int),
            'verbatim_e2': _env_bool("FRACLADDER_VERBATIM_E2", cls.VERBATIM_E2),
        })
        return settings


@dataclass(frozen=True)
class Tolerances:
    """Pass thresholds of the verification suite."""
    kernel: float = 1e-12
    factorization: float = 1e-10
    closed_form: float = 1e-12
    energy: float = 1e-12
    recovery: float = 1e-10
    eigen: float = 1e-10
    node: float = 1e-9
    roundtrip: float = 1e-10
    gaussian: float = 1e-6
    residual: float = 1e-5

    def overridden(self, value: float) -> "Tolerances":
        """Every threshold replaced by one value."""
        return Tolerances(**{f.name: value for f in fields(self)})


FIGURE_ALPHAS: Tuple[float, ...] = (1.2, 1.5)
DEFAULT_ALPHAS: Tuple[float, ...] = (1.2, 1.5, 2.0)
DEFAULT_LEVELS: Tuple[int, ...] = (0, 1, 2)
FORMATS = ("csv", "svg", "json")


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs; validated by validate()."""
    alphas: Tuple[float, ...] = DEFAULT_ALPHAS
    levels: Tuple[int, ...] = DEFAULT_LEVELS
    k_max: float = FracladderConfig.K_MAX
    points: int = FracladderConfig.POINTS
    tolerances: Tolerances = field(default_factory=Tolerances)
    out_dir: Path = Path("fracladder-out")
    formats: Tuple[str, ...] = ("csv",)
    max_level: int = FracladderConfig.MAX_LEVEL
    workers: int = FracladderConfig.WORKERS
    seed: int = FracladderConfig.SEED
    random_members: int = 50
    energy_k_max: float = 3.0
    plot_x_max: float = 6.0
    residual_origin_window: float = 0.25
    verbatim_e2: bool = FracladderConfig.VERBATIM_E2
    overlay: bool = False

    def validate(self) -> "RunConfig":
        """Check invariants and return self.

        Raises:
            ConfigError: if any field is out of range
        """
        if not self.alphas:
            raise ConfigError("at least one Lévy index is required")
        for alpha in self.alphas:
            try:
                check_alpha(alpha)
            except DomainError as e:
                raise ConfigError(str(e))
        if not self.levels:
            raise ConfigError("at least one state index is required")
        for n in self.levels:
            if n < 0 or n > self.max_level:
                raise ConfigError(f"state index {n} must lie in 0..{self.max_level}")
        if self.k_max <= 0:
            raise ConfigError(f"k_max must be positive, got {self.k_max}")
        if self.points < 16 or self.points & (self.points - 1):
            raise ConfigError(f"points must be a power of two >= 16, got {self.points}")
        for f in fields(self.tolerances):
            if getattr(self.tolerances, f.name) < 0:
                raise ConfigError(f"tolerance {f.name} must not be negative")
        for fmt in self.formats:
            if fmt not in FORMATS:
                raise ConfigError(f"unknown output format {fmt!r}; choose from {', '.join(FORMATS)}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.random_members < 1:
            raise ConfigError("random_members must be at least 1")
        for name in ("energy_k_max", "plot_x_max", "residual_origin_window"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        return self


def parse_alpha_list(text: str) -> Tuple[float, ...]:
    """Parse "1.2,1.5" into floats, checking 1 < alpha <= 2."""
    values = []
    for item in _split(text):
        try:
            values.append(check_alpha(float(item)))
        except (ValueError, DomainError):
            raise ConfigError(f"invalid Lévy index {item!r}: must satisfy 1 < α ≤ 2")
    return tuple(values)


def parse_level_list(text: str) -> Tuple[int, ...]:
    """Parse "0,1,2" into non-negative integers."""
    try:
        values = tuple(int(item) for item in _split(text))
    except ValueError:
        raise ConfigError(f"invalid state index list {text!r}")
    if any(n < 0 for n in values):
        raise ConfigError(f"state indices must be non-negative, got {text!r}")
    return values


def _split(text: str) -> List[str]:
    return [item.strip() for item in str(text).split(",") if item.strip()]


def _coerce(key: str, raw: str) -> Any:
    """Convert a key=value string to the RunConfig field type."""
    converters = {
        'alpha': ('alphas', parse_alpha_list),
        'n': ('levels', parse_level_list),
        'k_max': ('k_max', float),
        'points': ('points', int),
        'out': ('out_dir', Path),
        'format': ('formats', lambda v: tuple(_split(v))),
        'max_level': ('max_level', int),
        'workers': ('workers', int),
        'seed': ('seed', int),
        'random_members': ('random_members', int),
        'energy_k_max': ('energy_k_max', float),
        'plot_x_max': ('plot_x_max', float),
        'residual_origin_window': ('residual_origin_window', float),
        'verbatim_e2': ('verbatim_e2', lambda v: v.strip().lower() in ("1", "true", "yes")),
        'overlay': ('overlay', lambda v: v.strip().lower() in ("1", "true", "yes")),
        'tol': ('tol', float),
    }
    if key not in converters:
        raise ConfigError(f"unknown configuration key {key!r}")
    name, convert = converters[key]
    try:
        return name, convert(raw)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"invalid value for {key}: {raw!r} ({e})")


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read a plain key=value file.

    Blank lines and lines starting with '#' are ignored; list values are
    comma-separated.

    Args:
        path: Configuration file

    Returns:
        Dictionary of RunConfig field overrides (plus 'tol' when given)
    """
    overrides: Dict[str, Any] = {}
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        name, converted = _coerce(key.strip().replace("-", "_"), value.strip())
        overrides[name] = converted
    return overrides


def build_run_config(config_file: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Merge defaults, environment, an optional file and flag overrides (flags win).

    A 'tol' entry replaces every tolerance.
    """
    settings = FracladderConfig.get_all_settings()
    merged: Dict[str, Any] = {
        'k_max': settings['k_max'],
        'points': settings['points'],
        'max_level': settings['max_level'],
        'workers': settings['workers'],
        'seed': settings['seed'],
        'verbatim_e2': settings['verbatim_e2'],
    }
    if config_file is not None:
        merged.update(load_config_file(config_file))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    tol = merged.pop('tol', None)
    config = replace(RunConfig(), **merged)
    if tol is not None:
        config = replace(config, tolerances=config.tolerances.overridden(tol))
    return config.validate()
