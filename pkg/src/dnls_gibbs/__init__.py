"""Integrals of motion and Gibbs measures for the derivative nonlinear Schrodinger equation."""

__version__ = "0.1.0"

from .diffpoly import AB, PSI, DiffPoly, DiffPolyVector, functional_eq, parse, variational_derivative  # noqa: E402
from .errors import DnlsError  # noqa: E402
from .hierarchy import generate, q_decomposition, to_complex  # noqa: E402
from .spectral import FourierField, eval_functional, integrate_flow  # noqa: E402

__all__ = [
    "AB", "PSI", "DiffPoly", "DiffPolyVector", "DnlsError", "FourierField",
    "eval_functional", "functional_eq", "generate", "integrate_flow", "parse",
    "q_decomposition", "to_complex", "variational_derivative", "__version__",
]
