"""Utility modules."""

from spps.utils.logging_utils import get_logger, setup_logger

__all__ = ["setup_logger", "get_logger"]
