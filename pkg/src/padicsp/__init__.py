"""Exact p-adic symplectic workbench."""

__version__ = "0.1.0"

from .padic import (
    Mu8,
    PAdic,
    PadicError,
    PhaseQZ,
    PrimeCtx,
    hilbert_symbol,
    mu_psi,
    psi,
    weil_index,
)

__all__ = [
    "Mu8",
    "PAdic",
    "PadicError",
    "PhaseQZ",
    "PrimeCtx",
    "hilbert_symbol",
    "mu_psi",
    "psi",
    "weil_index",
    "__version__",
]
