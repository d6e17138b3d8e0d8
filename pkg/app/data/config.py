"""
Configuration Module.

This module contains the run settings: a key/value file read with
python-dotenv, ``CATRON_<KEY>`` environment overrides and command-line
overrides, in that order of increasing precedence.
"""

import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import dotenv_values, load_dotenv

from app.core.errors import ConfigError
from app.core.model import ModelParams, PhaseGrid, make_grid, validate_params

logger = logging.getLogger(__name__)

ENV_PREFIX = "CATRON_"

# file/env key -> Settings field
_KEYS = {
    "G": "G",
    "Delta": "Delta",
    "eta": "eta",
    "fock_cutoff": "fock_cutoff",
    "x_min": "x_min",
    "x_max": "x_max",
    "p_min": "p_min",
    "p_max": "p_max",
    "nx": "n_x",
    "np": "n_p",
    "seed": "seed",
    "out": "out",
}


@dataclass(frozen=True)
class Settings:
    """
    Typed settings of a run. Defaults are the desk-scale profile.

    Args:
        G, Delta, eta: Model parameters
        fock_cutoff: Fock space dimension N
        x_min, x_max, p_min, p_max, n_x, n_p: Phase-space grid
        seed: Seed of every random sample drawn by the run
        out: Output directory
    """

    G: float = 10.0
    Delta: float = 7.0
    eta: float = 1.0
    fock_cutoff: int = 60
    x_min: float = -6.0
    x_max: float = 6.0
    p_min: float = -6.0
    p_max: float = 6.0
    n_x: int = 241
    n_p: int = 241
    seed: int = 0
    out: str = "out"

    @property
    def params(self) -> ModelParams:
        return validate_params(ModelParams(self.G, self.Delta, self.eta, self.fock_cutoff))

    @property
    def grid(self) -> PhaseGrid:
        return make_grid(((self.x_min, self.x_max), (self.p_min, self.p_max)), self.n_x, self.n_p)

    def with_grid(self, grid: PhaseGrid) -> "Settings":
        return replace(
            self,
            x_min=grid.x_min,
            x_max=grid.x_max,
            p_min=grid.p_min,
            p_max=grid.p_max,
            n_x=grid.n_x,
            n_p=grid.n_p,
        )


def _coerce(name: str, raw: Any) -> Any:
    kind = {f.name: f.type for f in fields(Settings)}[name]
    try:
        if kind in (int, "int"):
            return int(float(raw)) if str(raw).strip() != "" else None
        if kind in (float, "float"):
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad value for {name}: {raw!r}") from e


def _from_mapping(values: Dict[str, Optional[str]], origin: str) -> Dict[str, Any]:
    out = {}
    for key, raw in values.items():
        if raw is None:
            continue
        if key not in _KEYS:
            logger.warning("ignoring unknown key '%s' in %s", key, origin)
            continue
        out[_KEYS[key]] = _coerce(_KEYS[key], raw)
    return out


def load_settings(
    config_path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    env_file: Optional[str] = None,
) -> Settings:
    """
    Assemble settings from defaults, a config file, the environment and overrides.

    Args:
        config_path: Optional KEY=value file
        overrides: Field values that win over everything else (None entries skipped)
        env_file: Optional .env file loaded into the environment first

    Returns:
        Settings with validated model parameters and grid

    Raises:
        ConfigError: on unreadable files or malformed values
        NonPositiveEta, NegativeDrive, DegenerateGrid: on invalid physics
    """
    load_dotenv(env_file, override=False) if env_file else load_dotenv(override=False)
    values: Dict[str, Any] = {}

    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {config_path}")
        values.update(_from_mapping(dotenv_values(path), str(path)))

    env = {
        key[len(ENV_PREFIX):]: value
        for key, value in os.environ.items()
        if key.startswith(ENV_PREFIX)
    }
    values.update(_from_mapping(env, "environment"))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    settings = Settings(**values)
    # fail before any compute
    settings.params
    settings.grid
    logger.debug("settings: %s", settings)
    return settings


@dataclass
class RunConfig:
    """
    Everything needed to reproduce a run: settings, command and its options.
    """

    settings: Settings
    command: str
    options: Dict[str, Any] = field(default_factory=dict)

    def echo(self) -> str:
        """KEY=value text that :func:`load_settings` reads back."""
        inverse = {v: k for k, v in _KEYS.items()}
        lines = [f"# command={self.command}"]
        lines += [f"# {k}={v}" for k, v in sorted(self.options.items())]
        lines += [f"{inverse[k]}={v}" for k, v in asdict(self.settings).items()]
        return "\n".join(lines) + "\n"

    def write_echo(self, directory: Path) -> Path:
        path = Path(directory) / "config_echo.env"
        path.write_text(self.echo(), encoding="utf-8")
        return path
