"""Difference operators for the mixed cubic-quadratic-additive equation family.

The central operator is

    D_f(x, y) = f(x+ky) + f(x-ky) - k^2 f(x+y) - k^2 f(x-y) - 2(1-k^2) f(x)

for an integer k with |k| >= 2.  D_f vanishes identically exactly on maps of
the form f(x) = a x^3 + b x^2 + c x (componentwise), which is what makes the
operator usable as a stability residual: a small ||D_f|| certifies f is near
such a solution.  Companion residuals for the pure quadratic and the two
cubic-flavored equations are provided under the same interface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInputError
from .quasinorm import PNormSpace


@dataclass(frozen=True)
class EquationParams:
    """Integer parameter k of the mixed equation; k in {-1, 0, 1} is degenerate."""

    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, (int, np.integer)):
            raise InvalidInputError(f"k must be an integer, got {self.k!r}")
        if self.k in (-1, 0, 1):
            raise InvalidInputError(f"k must satisfy |k| >= 2, got {self.k}")


class FunctionHandle:
    """A map R -> R^dim, normalized so the image of 0 is the zero vector.

    The wrapped callable must be vectorized: given a shape (N,) float array it
    returns shape (N,) (promoted to one component) or (N, dim).  The value at
    0 is evaluated once at construction and subtracted from every evaluation,
    so handle(0) == 0 exactly; the subtracted vector is kept as ``offset``.
    """

    def __init__(
        self,
        fn: Callable[[np.ndarray], np.ndarray],
        space: PNormSpace,
        magnitude_fn: Callable[[np.ndarray], np.ndarray] | None = None,
    ):
        self.space = space
        self._fn = fn
        self._magnitude_fn = magnitude_fn
        self.offset = np.zeros(space.dim)
        self.offset = self._eval(np.zeros(1))[0].copy()

    @classmethod
    def from_scalar(
        cls, fn: Callable[[float], float | np.ndarray], space: PNormSpace
    ) -> "FunctionHandle":
        """Wrap a scalar-argument callable (slow path: Python loop per point)."""

        def vec(xs: np.ndarray) -> np.ndarray:
            return np.array([np.asarray(fn(float(x)), dtype=float) for x in xs])

        return cls(vec, space)

    @classmethod
    def polynomial(cls, space: PNormSpace, a3, a2, a1) -> "FunctionHandle":
        """Componentwise a3 x^3 + a2 x^2 + a1 x; coefficients scalar or (dim,)."""
        c3 = np.broadcast_to(np.asarray(a3, dtype=float), (space.dim,)).copy()
        c2 = np.broadcast_to(np.asarray(a2, dtype=float), (space.dim,)).copy()
        c1 = np.broadcast_to(np.asarray(a1, dtype=float), (space.dim,)).copy()

        def poly(xs: np.ndarray) -> np.ndarray:
            x = xs[:, None]
            return ((c3 * x + c2) * x + c1) * x

        return cls(poly, space)

    def _eval(self, xs: np.ndarray) -> np.ndarray:
        out = np.asarray(self._fn(xs), dtype=float)
        if out.ndim == 1:
            out = out[:, None]
        if out.shape != (xs.size, self.space.dim):
            raise InvalidInputError(
                f"callable returned shape {out.shape}, expected ({xs.size}, {self.space.dim})"
            )
        return out - self.offset

    def __call__(self, x) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        flat = self._eval(xs.reshape(-1))
        if xs.ndim == 0:
            return flat[0]
        return flat.reshape(xs.shape + (self.space.dim,))

    def eval_magnitude(self, x, values: np.ndarray | None = None) -> np.ndarray:
        """Size of the largest quantity summed while evaluating handle(x).

        eps times this is the rounding scale of one evaluation.  A plain
        handle reports |handle(x)| + |offset| (pass values to reuse an
        already computed handle(x)); handles built from cancelling
        combinations, like parity parts, install a magnitude_fn that reports
        the pre-cancellation term sizes instead.  Limit iterations use this
        to floor their stopping tolerance at machine precision.
        """
        xs = np.asarray(x, dtype=float)
        flat = xs.reshape(-1)
        if self._magnitude_fn is not None:
            mag = np.asarray(self._magnitude_fn(flat), dtype=float)
            if mag.ndim == 1:
                mag = mag[:, None]
            if mag.shape != (flat.size, self.space.dim):
                raise InvalidInputError(
                    f"magnitude callable returned shape {mag.shape}, "
                    f"expected ({flat.size}, {self.space.dim})"
                )
        else:
            if values is None:
                vals = self._eval(flat)
            else:
                vals = np.asarray(values, dtype=float).reshape(
                    flat.size, self.space.dim
                )
            mag = np.abs(vals) + np.abs(self.offset)
        if xs.ndim == 0:
            return mag[0]
        return mag.reshape(xs.shape + (self.space.dim,))


@dataclass(frozen=True)
class EquationKind:
    """Tag selecting one residual operator; general_mixed carries its k."""

    tag: str
    params: EquationParams | None = None

    _TAGS = ("general_mixed", "quadratic", "cubic", "cubic_additive")

    def __post_init__(self) -> None:
        if self.tag not in self._TAGS:
            raise InvalidInputError(f"unknown equation tag {self.tag!r}")
        if self.tag == "general_mixed" and self.params is None:
            raise InvalidInputError("general_mixed requires EquationParams")

    @classmethod
    def general_mixed(cls, params: EquationParams) -> "EquationKind":
        return cls("general_mixed", params)

    @classmethod
    def quadratic(cls) -> "EquationKind":
        return cls("quadratic")

    @classmethod
    def cubic(cls) -> "EquationKind":
        return cls("cubic")

    @classmethod
    def cubic_additive(cls) -> "EquationKind":
        return cls("cubic_additive")


def _broadcast_pair(x, y):
    xs, ys = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return xs, ys


def _operator_terms(f: FunctionHandle, params: EquationParams, X, Y):
    """The five evaluation streams of D_f and their signed coefficients."""
    k = float(params.k)
    k2 = k * k
    vals = [f(X + k * Y), f(X - k * Y), f(X + Y), f(X - Y), f(X)]
    coeffs = [1.0, 1.0, -k2, -k2, -2.0 * (1.0 - k2)]
    return vals, coeffs


def difference_operator(f: FunctionHandle, params: EquationParams, x, y) -> np.ndarray:
    """D_f(x, y); vectorized, broadcasting x against y.

    Returns shape (dim,) for scalar inputs, otherwise broadcast_shape + (dim,).
    Five evaluations of f per point.
    """
    xs, ys = _broadcast_pair(x, y)
    X, Y = xs.reshape(-1), ys.reshape(-1)
    vals, coeffs = _operator_terms(f, params, X, Y)
    out = sum(c * v for c, v in zip(coeffs, vals))
    if xs.ndim == 0:
        return out[0]
    return out.reshape(xs.shape + (f.space.dim,))


def residual(f: FunctionHandle, kind: EquationKind, x, y) -> np.ndarray:
    """Residual of f in the equation selected by kind, at (x, y)."""
    if kind.tag == "general_mixed":
        return difference_operator(f, kind.params, x, y)
    xs, ys = _broadcast_pair(x, y)
    X, Y = xs.reshape(-1), ys.reshape(-1)
    if kind.tag == "quadratic":
        out = f(X + Y) + f(X - Y) - 2.0 * f(X) - 2.0 * f(Y)
    elif kind.tag == "cubic":
        out = (
            f(2 * X + Y) + f(2 * X - Y) - 2.0 * f(X + Y) - 2.0 * f(X - Y) - 12.0 * f(X)
        )
    else:  # cubic_additive
        out = (
            f(2 * X + Y)
            + f(2 * X - Y)
            - 2.0 * f(X + Y)
            - 2.0 * f(X - Y)
            - 2.0 * f(2 * X)
            + 4.0 * f(X)
        )
    if xs.ndim == 0:
        return out[0]
    return out.reshape(xs.shape + (f.space.dim,))


def parity_split(f: FunctionHandle) -> tuple[FunctionHandle, FunctionHandle]:
    """Even and odd parts, e(x) = (f(x)+f(-x))/2 and o(x) = (f(x)-f(-x))/2.

    The parts are exactly symmetric (floating add is commutative and subtract
    antisymmetric); reassembly e + o matches f to within 1 ulp.  Where one
    parity dominates, the other part is a small difference of large values,
    so both handles report the half-sum of |f(x)| and |f(-x)| as their
    evaluation magnitude rather than the cancelled result.
    """

    def even(xs: np.ndarray) -> np.ndarray:
        return 0.5 * (f(xs) + f(-xs))

    def odd(xs: np.ndarray) -> np.ndarray:
        return 0.5 * (f(xs) - f(-xs))

    def halves_scale(xs: np.ndarray) -> np.ndarray:
        return 0.5 * (np.abs(f(xs)) + np.abs(f(-xs)))

    return (
        FunctionHandle(even, f.space, magnitude_fn=halves_scale),
        FunctionHandle(odd, f.space, magnitude_fn=halves_scale),
    )


def mixed_fourth_residual(f: FunctionHandle, x) -> np.ndarray:
    """f(4x) - 10 f(2x) + 16 f(x); separates the cubic and additive scales.

    Vanishes iff the dyadic scaling of f is consistent with a cubic+additive
    odd part (it is -8 x^2 on a pure square, nonzero, which is the point:
    quadratic content survives).
    """
    xs = np.asarray(x, dtype=float)
    return f(4.0 * xs) - 10.0 * f(2.0 * xs) + 16.0 * f(xs)


def biadditive_form(q: FunctionHandle, x, y) -> np.ndarray:
    """Polarization (q(x+y) - q(x-y))/4 of a quadratic map q."""
    xs, ys = _broadcast_pair(x, y)
    return 0.25 * (q(xs + ys) - q(xs - ys))


@dataclass
class SolutionReport:
    """Grid verification verdict for one equation and one candidate map."""

    equation: str
    k: int | None
    max_residual: float
    argmax_point: tuple[float, float]
    scale: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "equation": self.equation,
            "k": self.k,
            "max_residual": self.max_residual,
            "argmax_point": list(self.argmax_point),
            "scale": self.scale,
            "pass": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def verify_solution(
    f: FunctionHandle, params: EquationParams, grid, tol: float
) -> SolutionReport:
    """Max pnorm(D_f) over a grid of (x, y) pairs, judged against tol * scale.

    scale = 1 + the largest pnorm among every f-evaluation the operator makes
    on the grid, so tol is relative to the magnitudes actually computed.
    """
    pts = np.asarray(grid, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise InvalidInputError("grid must be a nonempty array of (x, y) pairs")
    if tol < 0:
        raise InvalidInputError(f"tol must be nonnegative, got {tol!r}")
    X, Y = pts[:, 0], pts[:, 1]
    vals, coeffs = _operator_terms(f, params, X, Y)
    resid = sum(c * v for c, v in zip(coeffs, vals))
    norms = f.space.pnorm(resid)
    scale = 1.0 + max(float(np.max(f.space.pnorm(v))) for v in vals)
    idx = int(np.argmax(norms))
    max_residual = float(norms[idx])
    return SolutionReport(
        equation="general_mixed",
        k=params.k,
        max_residual=max_residual,
        argmax_point=(float(X[idx]), float(Y[idx])),
        scale=scale,
        passed=bool(max_residual <= tol * scale),
    )
