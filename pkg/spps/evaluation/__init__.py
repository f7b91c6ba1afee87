"""Reproduction of published reference tables."""

from spps.evaluation.reproduce import ReproductionResult, load_references, reproduce, table_ids

__all__ = ["ReproductionResult", "load_references", "reproduce", "table_ids"]
