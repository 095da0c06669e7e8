"""Exception hierarchy shared by every lab module."""

from typing import Optional


class LabError(Exception):
    """Base exception for lab errors."""

    def __init__(self, message: str, troubleshooting: Optional[str] = None):
        self.message = message
        self.troubleshooting = troubleshooting or "Check the experiment configuration and input tables."
        super().__init__(f"{message} | Troubleshooting: {self.troubleshooting}")


class DistributionError(LabError, ValueError):
    """Exception for invalid probability tables or mismatched alphabets."""

    def __init__(self, message: str, troubleshooting: Optional[str] = None):
        default_help = (
            "Probabilities must be nonnegative and sum to 1 within 1e-9; "
            "tables are never renormalized, so fix the input rather than rescaling it."
        )
        super().__init__(message, troubleshooting or default_help)


class EnumerationLimitError(LabError):
    """Exception for exact sequence-space operations that would exceed the enumeration guard."""

    def __init__(self, message: str, troubleshooting: Optional[str] = None):
        default_help = "Reduce the blocklength or alphabet size; exact enumeration is capped at 2^20 outcomes."
        super().__init__(message, troubleshooting or default_help)


class InfeasibleDistortionError(LabError):
    """Exception for distortion targets no reconstruction can meet."""

    def __init__(self, message: str, troubleshooting: Optional[str] = None):
        default_help = "Choose a target distortion between the minimum achievable distortion and d_max."
        super().__init__(message, troubleshooting or default_help)


class CodebookError(LabError):
    """Exception for invalid codebooks or message indices."""


class CodebookBudgetError(CodebookError):
    """Exception for codebooks that would exceed the symbol budget."""

    def __init__(self, message: str, troubleshooting: Optional[str] = None):
        default_help = (
            "Lower the blocklength or rates, or raise SOFTCOVER_CODEBOOK_BUDGET "
            "if the machine has the memory for it."
        )
        super().__init__(message, troubleshooting or default_help)


class AllZeroLikelihoodError(LabError):
    """Exception raised when every codeword has zero likelihood for the observed sequence."""

    def __init__(self, message: str, troubleshooting: Optional[str] = None):
        default_help = (
            "The channel assigns probability zero to the sequence under every codeword; "
            "check that the codebook was generated from the channel's input marginal."
        )
        super().__init__(message, troubleshooting or default_help)


class ConfigError(LabError):
    """Exception for experiment configurations that cannot be run."""
