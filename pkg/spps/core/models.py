"""Shared data models for root localization and spectra."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class RegionKind(str, Enum):
    """Geometric constraints a located root must satisfy."""

    NONE = "none"
    HALF_PLANE = "half_plane"
    INTERVAL = "interval"
    DISK = "disk"


class DiscardReason(str, Enum):
    """Why a candidate root was dropped."""

    OUT_OF_TRUST = "out_of_trust"
    OUTSIDE_REGION = "outside_region"
    RESIDUAL = "residual"
    TRUNCATION_UNSTABLE = "truncation_unstable"
    DUPLICATE = "duplicate"
    INACCURATE = "inaccurate"


@dataclass(frozen=True)
class RootConstraint:
    """Region in which roots are sought."""

    kind: RegionKind = RegionKind.NONE
    lower: float = -np.inf
    upper: float = np.inf
    center: complex = 0.0
    radius: float = np.inf
    min_real: float = 0.0
    imag_tol: float = 1e-8

    @classmethod
    def none(cls) -> RootConstraint:
        return cls()

    @classmethod
    def right_half_plane(cls, min_real: float = 0.0) -> RootConstraint:
        """Re(l) > min_real."""
        return cls(kind=RegionKind.HALF_PLANE, min_real=min_real)

    @classmethod
    def interval(cls, lower: float, upper: float, imag_tol: float = 1e-8) -> RootConstraint:
        """Real roots in [lower, upper] (|Im l| <= imag_tol (1 + |l|))."""
        if upper < lower:
            raise ValueError(f"interval needs lower <= upper, got [{lower}, {upper}]")
        return cls(kind=RegionKind.INTERVAL, lower=lower, upper=upper, imag_tol=imag_tol)

    @classmethod
    def disk(cls, center: complex, radius: float) -> RootConstraint:
        return cls(kind=RegionKind.DISK, center=center, radius=radius)

    def admits(self, lam: complex) -> bool:
        if self.kind is RegionKind.HALF_PLANE:
            return lam.real > self.min_real
        if self.kind is RegionKind.INTERVAL:
            return (
                abs(lam.imag) <= self.imag_tol * (1.0 + abs(lam))
                and self.lower <= lam.real <= self.upper
            )
        if self.kind is RegionKind.DISK:
            return abs(lam - self.center) <= self.radius
        return True


@dataclass(frozen=True)
class Root:
    """A located root with its quality indicators."""

    value: complex
    residual: float
    stable: bool
    error_estimate: float = 0.0
    multiplicity: int = 1
    center: complex = 0.0

    @property
    def relative_error(self) -> float:
        return self.error_estimate / (1.0 + abs(self.value))

    def is_real(self, imag_tol: float = 1e-8) -> bool:
        return abs(self.value.imag) <= imag_tol * (1.0 + abs(self.value))


@dataclass(frozen=True)
class DiscardedRoot:
    value: complex
    reason: DiscardReason


@dataclass
class RootReport:
    """Accepted and discarded roots of one characteristic series."""

    roots: list[Root] = field(default_factory=list)
    discarded: list[DiscardedRoot] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.roots], dtype=complex)


@dataclass
class SpectrumResult:
    """Eigenvalues located by a (possibly multi-center) pipeline."""

    eigenvalues: list[Root] = field(default_factory=list)
    truncation_order: int = 0
    discarded: list[DiscardedRoot] = field(default_factory=list)
    nonreal: list[Root] = field(default_factory=list)
    centers: list[complex] = field(default_factory=list)
    failed_centers: list[complex] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.eigenvalues], dtype=complex)

    def real_values(self) -> np.ndarray:
        """Real parts of the eigenvalues, sorted ascending."""
        return np.sort(self.values.real)

    def __len__(self) -> int:
        return len(self.eigenvalues)
