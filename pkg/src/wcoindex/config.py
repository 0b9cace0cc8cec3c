import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union, overload

import yaml  # type: ignore
from loguru import logger

from .engine.veo import VeoStrategy
from .errors import ConfigurationError
from .utils.misc import make_bar, str_to_bool

PATHS_TO_TRY = [
    "./wco.yaml",
    os.path.expanduser("~/.config/wcoindex/config.yaml"),
]


@dataclass
class WcoConfig:
    """Engine and build defaults, read from YAML and the environment."""

    # Query evaluation
    limit: int = 1000  # 0 means unlimited
    timeout: float = 600.0  # seconds, 0 means none
    veo: str = "adaptive"
    estimator: str = "range"
    refined_levels: int = 3
    seed: Optional[int] = None

    # Index construction
    psi_sample_rate: int = 16

    verbose: bool = False

    @classmethod
    def from_dict(cls, config_dict: Optional[dict]):
        """Create WcoConfig instance from a dictionary, ignoring unknown keys."""
        config_dict = config_dict or {}
        unknown = sorted(k for k in config_dict if k not in cls.__annotations__)
        if unknown:
            logger.warning(f"Ignoring unknown configuration keys: {', '.join(unknown)}")
        valid_fields = {k: v for k, v in config_dict.items() if k in cls.__annotations__}
        return cls(**valid_fields)

    def to_dict(self) -> dict:
        """Convert WcoConfig instance to a sorted dictionary."""
        return dict(sorted(asdict(self).items()))

    def validate(self) -> None:
        """Check every value; raises `ConfigurationError` on the first bad one."""
        if self.limit < 0:
            raise ConfigurationError(f"limit must be >= 0, got {self.limit}")
        if self.timeout < 0:
            raise ConfigurationError(f"timeout must be >= 0, got {self.timeout}")
        if self.refined_levels < 0:
            raise ConfigurationError(
                f"refined_levels must be >= 0, got {self.refined_levels}"
            )
        if self.psi_sample_rate < 1:
            raise ConfigurationError(
                f"psi_sample_rate must be >= 1, got {self.psi_sample_rate}"
            )
        for veo in self.veo.split(","):
            for estimator in self.estimator.split(","):
                VeoStrategy.parse(veo, estimator, self.refined_levels)

    def strategies(self) -> List[VeoStrategy]:
        """Every (veo, estimator) pair; both keys accept comma-separated lists."""
        return [
            VeoStrategy.parse(veo, estimator, self.refined_levels)
            for veo in self.veo.split(",")
            for estimator in self.estimator.split(",")
        ]

    def __str__(self) -> str:
        """Provide a formatted string representation for logging."""
        return json.dumps(self.to_dict(), indent=4)

    def show(self, message: Optional[str] = None) -> None:
        """
        Display the current configuration in a formatted manner.

        Args:
            message (Optional[str]): Message to display before showing the configuration.
        """
        _show(str(self), message if message else "Current configuration:")


@dataclass
class EngineConfig:
    """Per-query evaluation settings."""

    limit: int = 1000
    timeout: Optional[float] = 600.0
    strategy: VeoStrategy = field(default_factory=VeoStrategy)
    order: Optional[List[str]] = None
    """Fixed elimination order; overrides the strategy when set."""
    seed: Optional[int] = None

    @classmethod
    def from_config(
        cls, config: WcoConfig, strategy: Optional[VeoStrategy] = None
    ) -> "EngineConfig":
        return cls(
            limit=config.limit,
            timeout=config.timeout or None,
            strategy=strategy or config.strategies()[0],
            seed=config.seed,
        )

    def with_order(self, order: List[str]) -> "EngineConfig":
        return replace(self, order=list(order))


def _show(body: str, message: Optional[str] = None) -> None:
    """Helper to display a formatted message with a bar."""
    logger.info(message if message else "")
    logger.info(make_bar())
    logger.info(body)
    logger.info(make_bar())


def _apply_env_overrides(config_data: WcoConfig) -> WcoConfig:
    """Apply environment variable overrides to the config"""
    try:
        if env_limit := os.getenv("WCO_LIMIT"):
            config_data.limit = int(env_limit)

        if env_timeout := os.getenv("WCO_TIMEOUT"):
            config_data.timeout = float(env_timeout)

        if env_refined := os.getenv("WCO_REFINED_LEVELS"):
            config_data.refined_levels = int(env_refined)

        if env_seed := os.getenv("WCO_SEED"):
            config_data.seed = int(env_seed)
    except ValueError as e:
        raise ConfigurationError(f"invalid environment override: {e}") from None

    if env_veo := os.getenv("WCO_VEO"):
        config_data.veo = env_veo

    if env_estimator := os.getenv("WCO_ESTIMATOR"):
        config_data.estimator = env_estimator

    if env_verbose := os.getenv("WCO_VERBOSE"):
        config_data.verbose = str_to_bool(env_verbose)

    return config_data


@overload
def load_config(
    optional_path: Optional[Union[str, Path]] = None,
    *,
    env_override: bool = True,
    as_is: Literal[False] = False,
) -> Tuple[WcoConfig, Optional[Path]]: ...
@overload
def load_config(
    optional_path: Optional[Union[str, Path]] = None,
    *,
    env_override: bool = True,
    as_is: Literal[True],
) -> Tuple[Optional[Dict[str, Any]], Optional[Path]]: ...


def load_config(
    optional_path: Optional[Union[str, Path]] = None,
    *,
    env_override: bool = True,
    as_is: bool = False,
) -> Tuple[Optional[Union[WcoConfig, Dict[str, Any]]], Optional[Path]]:
    """Loads configuration from file with optional environment variable overrides.

    Args:
        optional_path: Specific configuration file to load. If not provided,
            the first existing file of PATHS_TO_TRY is used.
        env_override: If True, WCO_* environment variables override file settings.
        as_is: If True, return the raw mapping read from the file.

    Returns:
        Tuple of (config, path it was loaded from). Without any file the
        defaults are returned with a ``None`` path.

    Raises:
        ConfigurationError: An explicitly given file is missing or is not valid YAML.
    """
    if optional_path and not os.path.exists(optional_path):
        raise ConfigurationError(f"configuration file not found: {optional_path}")
    paths_to_try = [str(optional_path)] if optional_path else PATHS_TO_TRY

    config_dict: Optional[Dict[str, Any]] = None
    actual_path: Optional[Path] = None
    for path in paths_to_try:
        if path and os.path.exists(path):
            with open(path, "r") as f:
                try:
                    config_dict = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    if optional_path:
                        raise ConfigurationError(f"invalid YAML in {path}: {e}") from None
                    logger.warning(f"Error loading config at {path}: {e}")
                    continue
            if not isinstance(config_dict, dict):
                raise ConfigurationError(f"{path} must contain a mapping")
            actual_path = Path(path).absolute()
            logger.debug(f"Loaded configuration from {actual_path}")
            break

    if as_is:
        return config_dict, actual_path

    config_data = WcoConfig.from_dict(config_dict)
    if env_override:
        config_data = _apply_env_overrides(config_data)
    return config_data, actual_path
