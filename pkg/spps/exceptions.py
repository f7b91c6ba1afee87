"""Custom exceptions for SPPS.

Every exception carries a stable ``code`` naming the failure kind so callers
(and the CLI) can branch without parsing messages.
"""


class SPPSError(Exception):
    """Base exception for all SPPS errors."""

    code = "spps_error"

    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.context = context


# Configuration Errors
class ConfigurationError(SPPSError):
    """Raised when configuration is invalid or cannot be loaded."""

    code = "configuration_error"

    def __init__(self, message: str = "", line: int | None = None, **context):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, line=line, **context)
        self.line = line


class ToleranceFailure(SPPSError):
    """Raised when reproduced values miss their reference tolerances."""

    code = "tolerance_failure"


# Grid Errors
class GridError(SPPSError):
    """Raised for invalid grids or sampled data."""

    code = "grid_error"


class InvalidIntervalError(GridError):
    """Raised when the interval endpoints are not ordered (a >= b)."""

    code = "invalid_interval"


class GridTooCoarseError(GridError):
    """Raised when fewer than 8 subintervals are requested."""

    code = "grid_too_coarse"


class GridMismatchError(GridError):
    """Raised when sampled functions live on different grids."""

    code = "grid_mismatch"


class NonfiniteSampleError(GridError):
    """Raised when a sampled value is NaN or infinite."""

    code = "nonfinite_sample"

    def __init__(self, message: str = "", node_index: int | None = None):
        super().__init__(message, node_index=node_index)
        self.node_index = node_index


class DivisionByZeroError(GridError):
    """Raised when a pointwise division meets a zero denominator."""

    code = "division_by_zero"

    def __init__(self, message: str = "", node_index: int | None = None):
        super().__init__(message, node_index=node_index)
        self.node_index = node_index


# Formal Power Errors
class FormalPowerError(SPPSError):
    """Raised when a formal power family cannot serve a request."""

    code = "formal_power_error"


class InsufficientOrderError(FormalPowerError):
    """Raised when a series asks for members beyond the computed order."""

    code = "insufficient_order"


# Particular Solution Errors
class ParticularSolutionError(SPPSError):
    """Raised when a nonvanishing particular solution cannot be built."""

    code = "particular_solution_error"


class NonconvergentTailError(ParticularSolutionError):
    """Raised when the last series term is not negligible at the maximum order."""

    code = "nonconvergent_tail"


class VanishingSolutionError(ParticularSolutionError):
    """Raised when a particular solution vanishes at a grid node."""

    code = "vanishing_u0"


class ComplexCoefficientsUnsupportedError(ParticularSolutionError):
    """Raised when the v1 + i*v2 construction is asked for complex coefficients."""

    code = "complex_coefficients_unsupported"


# Root Finding Errors
class RootFindingError(SPPSError):
    """Raised when roots of a characteristic series cannot be located."""

    code = "root_finding_error"


class DegenerateSeriesError(RootFindingError):
    """Raised when all coefficients of a series vanish."""

    code = "degenerate_series"


class NoConvergenceError(RootFindingError):
    """Raised when Newton refinement does not converge."""

    code = "no_convergence"


# Spectral Problem Errors
class SpectralProblemError(SPPSError):
    """Raised when a spectral problem cannot be assembled or solved."""

    code = "spectral_problem_error"


class UnsupportedBoundaryConditionError(SpectralProblemError):
    """Raised for boundary condition combinations without a closed characteristic form."""

    code = "unsupported_left_bc"


class ShiftFailedError(SpectralProblemError):
    """Raised when no nodeless particular solution exists at a shift center."""

    code = "shift_failed_nodeless"


class NoRootInBracketError(SpectralProblemError):
    """Raised when a bracketing search finds no sign change."""

    code = "no_root_in_bracket"


class DegenerateMatchingError(SpectralProblemError):
    """Raised when f02(T) vanishes and the periodic matching is undefined."""

    code = "f02_T_zero"


class NotNodelessError(SpectralProblemError):
    """Raised when a periodic solution expected to be nodeless has a zero."""

    code = "not_nodeless"


class QuadraticDegenerateError(SpectralProblemError):
    """Raised when the self-matching quadratic carries no information."""

    code = "quadratic_degenerate"


class LambdaOutOfRangeError(SpectralProblemError):
    """Raised when a dispersion evaluator is called outside its validity range."""

    code = "lambda_out_of_range"


class AlphasNotEqualError(SpectralProblemError):
    """Raised when the polynomial well dispersion needs equal outer levels."""

    code = "alphas_not_equal"


class EvanescentWaveError(SpectralProblemError):
    """Raised when the transmitted wave is evanescent."""

    code = "evanescent_output"


class ResidualTooLargeError(SpectralProblemError):
    """Raised when an assembled eigenfunction misses its boundary conditions."""

    code = "residual_too_large"
