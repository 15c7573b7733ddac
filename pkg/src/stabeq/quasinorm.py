"""p-norms on R^d for 0 < p <= 1 and the quasi-norm inequalities they satisfy.

For p in (0, 1] the functional ||v||_p = (sum |v_i|^p)^(1/p) is a p-norm:
absolutely homogeneous, and p-subadditive in the sense
||u + v||^p <= ||u||^p + ||v||^p.  It is a quasi-norm with modulus of
concavity M = 2^(1/p - 1), i.e. ||u + v|| <= M (||u|| + ||v||).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class PNormSpace:
    """Codomain R^dim equipped with the l_p quasi-norm.

    dim : codomain dimension, >= 1
    p   : norm exponent, 0 < p <= 1
    """

    dim: int
    p: float

    def __post_init__(self) -> None:
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 1):
            raise InvalidInputError(f"dim must be a positive integer, got {self.dim!r}")
        if not (0.0 < self.p <= 1.0):
            raise InvalidInputError(f"p must satisfy 0 < p <= 1, got {self.p!r}")

    @property
    def modulus(self) -> float:
        """Modulus of concavity M = 2^(1/p - 1); equals 1 for p = 1."""
        return 2.0 ** (1.0 / self.p - 1.0)

    def pnorm(self, v: np.ndarray) -> np.ndarray | float:
        """(sum_i |v_i|^p)^(1/p) over the last axis.

        Accepts shape (dim,) or (..., dim); returns a scalar or shape (...,).
        """
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.dim:
            raise InvalidInputError(
                f"vector has {v.shape[-1]} components, space has dim {self.dim}"
            )
        out = np.sum(np.abs(v) ** self.p, axis=-1) ** (1.0 / self.p)
        return float(out) if out.ndim == 0 else out


def modulus_of_concavity(p: float) -> float:
    """2^(1/p - 1) for 0 < p <= 1."""
    if not (0.0 < p <= 1.0):
        raise InvalidInputError(f"p must satisfy 0 < p <= 1, got {p!r}")
    return 2.0 ** (1.0 / p - 1.0)


def power_sum_residual(xs: np.ndarray, p: float) -> float:
    """sum_i x_i^p - (sum_i x_i)^p for nonnegative x_i and 0 < p <= 1.

    Nonnegative by concavity of t^p; the quantity the series bounds lean on.
    """
    if not (0.0 < p <= 1.0):
        raise InvalidInputError(f"p must satisfy 0 < p <= 1, got {p!r}")
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise InvalidInputError("xs must be nonempty")
    if np.any(xs < 0) or not np.all(np.isfinite(xs)):
        raise InvalidInputError("xs must be finite and nonnegative")
    return float(np.sum(xs**p) - np.sum(xs) ** p)
