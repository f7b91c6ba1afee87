"""Configuration module for SPPS."""

from .models import (
    HillConfig,
    LayerConfig,
    NumericsConfig,
    RootFindConfig,
    RunConfig,
    SLConfig,
    WellConfig,
    ZSConfig,
    load_config,
    save_config,
)

__all__ = [
    "HillConfig",
    "LayerConfig",
    "NumericsConfig",
    "RootFindConfig",
    "RunConfig",
    "SLConfig",
    "WellConfig",
    "ZSConfig",
    "load_config",
    "save_config",
]
