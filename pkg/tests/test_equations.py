"""Difference operator, companion residuals, parity split, grid verification."""

import numpy as np
import pytest

from stabeq import (
    EquationKind,
    EquationParams,
    FunctionHandle,
    InvalidInputError,
    PNormSpace,
    biadditive_form,
    difference_operator,
    mixed_fourth_residual,
    parity_split,
    residual,
    verify_solution,
)

SPACE1 = PNormSpace(1, 1.0)

RNG_SEED = 20260821


def poly_handle(a3, a2, a1, space=SPACE1):
    return FunctionHandle.polynomial(space, a3, a2, a1)


def rand_points(n, lo=-5.0, hi=5.0, seed=RNG_SEED):
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, n)


# --- parameter and handle plumbing ---------------------------------------


@pytest.mark.parametrize("k", [0, 1, -1, 2.5, "2"])
def test_params_reject_degenerate_k(k):
    with pytest.raises(InvalidInputError):
        EquationParams(k)


@pytest.mark.parametrize("k", [2, -2, 3, -5, np.int64(4)])
def test_params_accept_valid_k(k):
    assert EquationParams(k).k == k


def test_handle_normalizes_value_at_zero():
    f = FunctionHandle(lambda xs: (xs + 7.0)[:, None], SPACE1)
    assert f(0.0) == pytest.approx(0.0, abs=0.0)
    assert f.offset[0] == 7.0
    assert f(2.0)[0] == 2.0


def test_handle_shape_validation():
    with pytest.raises(InvalidInputError):
        FunctionHandle(lambda xs: np.zeros((xs.size, 3)), SPACE1)


def test_handle_scalar_and_array_calls():
    f = poly_handle(0.0, 1.0, 0.0)
    assert f(3.0).shape == (1,)
    assert f(np.array([1.0, 2.0, 3.0])).shape == (3, 1)
    grid = np.ones((2, 5))
    assert f(grid).shape == (2, 5, 1)
    assert np.all(f(grid) == 1.0)


def test_from_scalar_wraps_python_callable():
    f = FunctionHandle.from_scalar(lambda x: x**3, SPACE1)
    assert f(2.0)[0] == 8.0
    assert np.allclose(f(np.array([1.0, -2.0]))[:, 0], [1.0, -8.0])


def test_polynomial_vector_coefficients():
    space = PNormSpace(2, 1.0)
    f = FunctionHandle.polynomial(space, (1.0, 0.0), (0.0, 1.0), 0.0)
    out = f(2.0)
    assert out[0] == 8.0 and out[1] == 4.0


def test_eval_magnitude_default_includes_offset():
    f = FunctionHandle(lambda xs: (xs + 7.0)[:, None], SPACE1)
    mag = f.eval_magnitude(np.array([3.0]))
    # |f(3)| + |offset| = 3 + 7
    assert mag[0, 0] == pytest.approx(10.0)


def test_eval_magnitude_parity_sees_cancellation_scale():
    f = poly_handle(1.0, 1.0, 0.0)  # x^3 + x^2
    even, odd = parity_split(f)
    x = np.array([10.0])
    # even(10) = 100 but both halves evaluate f at +-10, sizes 1100 and 900
    assert even(x)[0, 0] == pytest.approx(100.0)
    assert even.eval_magnitude(x)[0, 0] == pytest.approx(0.5 * (1100.0 + 900.0))
    assert odd.eval_magnitude(x)[0, 0] == pytest.approx(1000.0)


# --- the difference operator ----------------------------------------------


def test_operator_vanishes_on_exact_solutions():
    f = poly_handle(2.0, -1.0, 5.0)
    pts = rand_points(200)
    for k in (2, -2, 3):
        vals = difference_operator(f, EquationParams(k), pts, pts[::-1])
        scale = 1.0 + np.max(np.abs(f(pts + k * pts[::-1])))
        assert np.max(np.abs(vals)) <= 1e-10 * scale


def test_operator_on_quartic_matches_symbolic_expansion():
    """D_f for f(x) = x^4 collapses to 2 k^2 (k^2 - 1) y^4.

    The reference is an independent symbolic expansion, not the module.
    """
    sympy = pytest.importorskip("sympy")
    x, y, k = sympy.symbols("x y k")
    f = lambda t: t**4
    expr = (
        f(x + k * y)
        + f(x - k * y)
        - k**2 * f(x + y)
        - k**2 * f(x - y)
        - 2 * (1 - k**2) * f(x)
    )
    assert sympy.expand(expr - 2 * k**2 * (k**2 - 1) * y**4) == 0

    quartic = FunctionHandle(lambda xs: (xs**4)[:, None], SPACE1)
    rng = np.random.default_rng(RNG_SEED)
    X = rng.uniform(-5, 5, 500)
    Y = rng.uniform(0.5, 5, 500) * rng.choice([-1.0, 1.0], 500)
    for kv in (2, 3):
        got = difference_operator(quartic, EquationParams(kv), X, Y)[:, 0]
        want = 2.0 * kv**2 * (kv**2 - 1) * Y**4
        assert np.max(np.abs(got - want) / np.abs(want)) < 1e-9


def test_operator_scalar_call_and_broadcasting():
    f = poly_handle(0.0, 0.0, 1.0)
    out = difference_operator(f, EquationParams(2), 1.0, 2.0)
    assert out.shape == (1,)
    X = np.linspace(-1, 1, 7)
    out2 = difference_operator(f, EquationParams(2), X, 0.5)
    assert out2.shape == (7, 1)


def test_operator_vector_codomain():
    space = PNormSpace(2, 0.5)
    f = FunctionHandle.polynomial(space, (1.0, 0.0), (0.0, 2.0), (3.0, -1.0))
    pts = rand_points(50)
    vals = difference_operator(f, EquationParams(2), pts, -pts)
    assert vals.shape == (50, 2)
    assert np.max(np.abs(vals)) < 1e-9 * (1.0 + np.max(np.abs(f(3 * pts))))


# --- companion residuals --------------------------------------------------


def test_quadratic_residual_separates_parities():
    q = poly_handle(0.0, 3.0, 0.0)
    pts = rand_points(100)
    vals = residual(q, EquationKind.quadratic(), pts, pts[::-1])
    assert np.max(np.abs(vals)) < 1e-10 * (1 + np.max(np.abs(q(2 * pts))))
    c = poly_handle(1.0, 0.0, 0.0)
    vals_c = residual(c, EquationKind.quadratic(), 2.0, 1.0)
    assert abs(vals_c[0]) > 1.0  # cubic maps are not quadratic solutions


def test_pure_cubic_residual():
    c = poly_handle(4.0, 0.0, 0.0)
    pts = rand_points(100)
    vals = residual(c, EquationKind.cubic(), pts, pts[::-1])
    assert np.max(np.abs(vals)) < 1e-9 * (1 + np.max(np.abs(c(3 * pts))))
    a = poly_handle(0.0, 0.0, 1.0)  # additive maps fail this equation: -12x survives
    assert residual(a, EquationKind.cubic(), 1.0, 1.0)[0] == -12.0


def test_cubic_additive_residual_absorbs_additive_part():
    mixed = poly_handle(4.0, 0.0, -3.0)  # cubic plus additive, no quadratic
    pts = rand_points(100)
    vals = residual(mixed, EquationKind.cubic_additive(), pts, pts[::-1])
    assert np.max(np.abs(vals)) < 1e-9 * (1 + np.max(np.abs(mixed(3 * pts))))
    q = poly_handle(0.0, 1.0, 0.0)
    assert abs(residual(q, EquationKind.cubic_additive(), 1.0, 2.0)[0]) > 1.0


def test_general_mixed_dispatch_matches_difference_operator():
    f = poly_handle(1.0, 2.0, 3.0)
    kind = EquationKind.general_mixed(EquationParams(3))
    pts = rand_points(20)
    a = residual(f, kind, pts, pts / 2)
    b = difference_operator(f, EquationParams(3), pts, pts / 2)
    assert np.array_equal(a, b)


def test_equation_kind_validation():
    with pytest.raises(InvalidInputError):
        EquationKind("unknown_tag")
    with pytest.raises(InvalidInputError):
        EquationKind("general_mixed")  # missing params


# --- parity split ---------------------------------------------------------


def test_parity_split_known_values():
    f = FunctionHandle(lambda xs: (xs**4 + xs**5)[:, None], SPACE1)
    even, odd = parity_split(f)
    assert even(2.0)[0] == 16.0
    assert odd(2.0)[0] == 32.0


def test_parity_split_exact_symmetry_and_reassembly():
    f = FunctionHandle(
        lambda xs: (np.exp(0.3 * xs) + 0.1 * np.sin(2 * xs))[:, None], SPACE1
    )
    even, odd = parity_split(f)
    xs = rand_points(1000)
    e, o = even(xs), odd(xs)
    # symmetry is exact in floating point, not just approximate
    assert np.array_equal(e, even(-xs))
    assert np.array_equal(o, -odd(-xs))
    # reassembly agrees to 1 ulp of the dominant half evaluation
    fv = f(xs)
    dominant = np.maximum(np.abs(fv), np.abs(f(-xs)))
    assert np.all(np.abs(e + o - fv) <= np.spacing(dominant))


def test_parity_split_reproducible():
    f = poly_handle(1.0, 1.0, 1.0)
    xs = rand_points(64)
    e1, o1 = (part(xs) for part in parity_split(f))
    e2, o2 = (part(xs) for part in parity_split(f))
    assert np.array_equal(e1, e2) and np.array_equal(o1, o2)


def test_mixed_fourth_residual():
    q = poly_handle(0.0, 1.0, 0.0)
    # f(4x) - 10 f(2x) + 16 f(x) = (16 - 40 + 16) x^2 = -8 x^2
    assert mixed_fourth_residual(q, 1.0)[0] == -8.0
    assert mixed_fourth_residual(q, 2.0)[0] == -32.0
    ca = poly_handle(2.0, 0.0, -1.0)
    vals = mixed_fourth_residual(ca, rand_points(50))
    assert np.max(np.abs(vals)) < 1e-9 * (1 + np.max(np.abs(ca(4 * rand_points(50)))))


def test_biadditive_form_polarizes_squares():
    q = poly_handle(0.0, 1.0, 0.0)
    # (q(x+y) - q(x-y)) / 4 = x y
    assert biadditive_form(q, 3.0, 5.0)[0] == 15.0
    X = rand_points(40)
    Y = rand_points(40, seed=RNG_SEED + 1)
    vals = biadditive_form(q, X, Y)[:, 0]
    assert np.allclose(vals, X * Y, rtol=1e-12, atol=1e-9)


# --- grid verification ----------------------------------------------------


def grid_pairs(n=21):
    pts = np.linspace(-5, 5, n)
    X, Y = np.meshgrid(pts, pts, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def test_verify_solution_passes_exact_polynomial():
    f = poly_handle(2.0, -1.0, 5.0)
    report = verify_solution(f, EquationParams(2), grid_pairs(), 1e-9)
    assert report.passed
    assert report.equation == "general_mixed"
    assert report.k == 2
    assert report.max_residual <= 1e-9 * report.scale
    data = report.to_json()
    assert data["pass"] is True
    assert set(data) == {"equation", "k", "max_residual", "argmax_point", "scale", "pass"}


def test_verify_solution_rejects_quartic():
    f = FunctionHandle(lambda xs: (xs**4)[:, None], SPACE1)
    report = verify_solution(f, EquationParams(2), grid_pairs(), 1e-9)
    assert not report.passed
    x_star, y_star = report.argmax_point
    # residual is 24 y^4, largest at the grid corner
    assert abs(y_star) == 5.0
    assert report.max_residual == pytest.approx(24 * 5.0**4, rel=1e-9)


def test_verify_solution_validation():
    f = poly_handle(1.0, 0.0, 0.0)
    with pytest.raises(InvalidInputError):
        verify_solution(f, EquationParams(2), np.zeros((0, 2)), 1e-9)
    with pytest.raises(InvalidInputError):
        verify_solution(f, EquationParams(2), np.zeros((4, 3)), 1e-9)
    with pytest.raises(InvalidInputError):
        verify_solution(f, EquationParams(2), grid_pairs(5), -1.0)
