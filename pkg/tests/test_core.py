import numpy as np
import pytest

from pldc.admm import FitConfig, fit_lp
from pldc.core import (
    add,
    build_from_witness,
    evaluate,
    fold_standardizer,
    interpolate_quadratic_shift,
    kink_abscissae,
    linear_spline,
    local_gradient,
    scale,
    seminorm_bound,
    witness_residuals,
)
from pldc.errors import DimensionMismatchError, DuplicateInputError, PlaneLimitError
from pldc.models import Dataset, MaxAffine, PLDCModel, Standardizer


def hinge_pair():
    """max(0, x) - max(0, x - 1)."""
    phi1 = MaxAffine.from_planes([(0.0, 0.0), (1.0, 0.0)])
    phi2 = MaxAffine.from_planes([(0.0, 0.0), (1.0, -1.0)])
    return PLDCModel(phi1, phi2)


def random_model(rng, d=2, k=3):
    phi1 = MaxAffine(rng.standard_normal((k, d)), rng.standard_normal(k))
    phi2 = MaxAffine(rng.standard_normal((k, d)), rng.standard_normal(k))
    return PLDCModel(phi1, phi2)


# ---------------- Evaluation ----------------

def test_evaluate_single_kink():
    assert evaluate(hinge_pair(), np.array([0.5])) == pytest.approx(0.5)
    assert evaluate(hinge_pair(), np.array([3.0])) == pytest.approx(1.0)
    assert evaluate(hinge_pair(), np.array([-2.0])) == pytest.approx(0.0)


def test_evaluate_rejects_wrong_width():
    with pytest.raises(DimensionMismatchError):
        evaluate(hinge_pair(), np.array([1.0, 2.0]))


def test_predict_matches_pointwise_evaluation(rng):
    model = random_model(rng)
    X = rng.standard_normal((50, 2))
    expected = [evaluate(model, x) for x in X]
    np.testing.assert_allclose(model.predict(X), expected, rtol=0, atol=1e-12)


def test_max_affine_midpoint_convexity(rng):
    phi = MaxAffine(rng.standard_normal((5, 3)), rng.standard_normal(5))
    X, Y = rng.standard_normal((100, 3)), rng.standard_normal((100, 3))
    mid = phi.value((X + Y) / 2)
    assert np.all(mid <= (phi.value(X) + phi.value(Y)) / 2 + 1e-12)


def test_max_affine_needs_a_plane():
    with pytest.raises(DimensionMismatchError):
        MaxAffine(np.zeros((0, 2)), np.zeros(0))


def test_local_gradient_in_raw_coordinates():
    phi1 = MaxAffine(np.array([[2.0, -1.0]]), np.array([0.0]))
    phi2 = MaxAffine.constant(0.0, 2)
    st = Standardizer(mean=[1.0, 0.0], scale=[2.0, 1.0])
    model = PLDCModel(phi1, phi2, standardizer=st)
    np.testing.assert_allclose(local_gradient(model, np.array([0.3, 0.7])), [1.0, -1.0])


# ---------------- Construction ----------------

def test_build_from_witness_single_point_is_constant():
    model = build_from_witness(np.array([[5.0]]), [3.0], [0.0], [[0.0]], [[0.0]])
    assert evaluate(model, np.array([-40.0])) == pytest.approx(3.0)
    assert evaluate(model, np.array([5.0])) == pytest.approx(3.0)


def test_build_from_witness_interpolates_oracle_solution(rng):
    x = rng.standard_normal((5, 2))
    y = rng.standard_normal(5)
    data = Dataset.from_arrays(x, y, standardize=False)
    model, report = fit_lp(data, FitConfig(lam=0.5))
    yhat = model.meta["witness"]["yhat"]
    np.testing.assert_allclose(model.predict(x), yhat, rtol=0, atol=1e-9)
    r1, r2 = witness_residuals(x, **{k: model.meta["witness"][k] for k in ("yhat", "z", "a", "b")})
    assert r1.min() >= -1e-9 and r2.min() >= -1e-9


def test_build_from_witness_accepts_infeasible_witness():
    x = np.array([[0.0], [1.0]])
    # slopes of the wrong sign break the first family
    model = build_from_witness(x, [0.0, 1.0], [0.0, 0.0], [[-5.0], [-5.0]], [[0.0], [0.0]])
    assert model.phi1.n_planes == 2
    r1, _ = witness_residuals(x, [0.0, 1.0], [0.0, 0.0], [[-5.0], [-5.0]], [[0.0], [0.0]])
    assert r1.min() < 0


def test_build_from_witness_checks_shapes():
    with pytest.raises(DimensionMismatchError):
        build_from_witness(np.zeros((2, 1)), [0.0], [0.0, 0.0], np.zeros((2, 1)), np.zeros((2, 1)))


def test_quadratic_shift_two_points():
    data = Dataset.from_arrays([[0.0], [1.0]], [0.0, 1.0], standardize=False)
    h = interpolate_quadratic_shift(data)
    assert h.meta["C"] == pytest.approx(1.0)
    for x in (-1.0, 0.0, 0.25, 1.0, 2.5):
        assert h(np.array([x])) == pytest.approx(max(0.0, x) - max(0.0, x - 1.0))


def test_quadratic_shift_interpolates_random_data(rng):
    x = rng.standard_normal((20, 3))
    y = rng.standard_normal(20)
    data = Dataset.from_arrays(x, y)
    h = interpolate_quadratic_shift(data)
    assert np.max(np.abs(h.predict(x) - y)) <= 1e-9


def test_quadratic_shift_constant_responses():
    data = Dataset.from_arrays([[0.0], [1.0], [3.0]], [2.0, 2.0, 2.0], standardize=False)
    h = interpolate_quadratic_shift(data)
    assert h.meta["C"] == 0.0
    assert h(np.array([10.0])) == pytest.approx(2.0)


def test_quadratic_shift_bound_is_twice_c_times_largest_norm(rng):
    for _ in range(10):
        x = rng.standard_normal((12, 3))
        data = Dataset.from_arrays(x, rng.standard_normal(12), standardize=False)
        h = interpolate_quadratic_shift(data)
        expected = 2.0 * h.meta["C"] * np.max(np.abs(data.x).sum(axis=1))
        assert seminorm_bound(h) == pytest.approx(expected, rel=1e-13, abs=1e-10)


def test_duplicate_inputs_with_different_responses_are_rejected():
    with pytest.raises(DuplicateInputError):
        Dataset.from_arrays([[1.0], [1.0]], [0.0, 1.0])


def test_dataset_leaves_caller_arrays_writable():
    x = np.array([[0.0], [1.0]])
    Dataset.from_arrays(x, [0.0, 1.0])
    x[0, 0] = 5.0


# ---------------- Seminorm bound and algebra ----------------

def test_seminorm_bound_sums_part_maxima():
    phi1 = MaxAffine(np.array([[1.0, -2.0], [0.5, 0.5]]), np.zeros(2))
    phi2 = MaxAffine(np.array([[0.0, 4.0]]), np.zeros(1))
    assert seminorm_bound(PLDCModel(phi1, phi2)) == pytest.approx(7.0)


def test_scale_negative_swaps_parts():
    model = PLDCModel(MaxAffine.from_planes([(0.0, 0.0), (1.0, 0.0)]), MaxAffine.constant(0.0, 1))
    flipped = scale(model, -1.0)
    assert flipped(np.array([1.0])) == pytest.approx(-1.0)
    assert flipped.phi2.n_planes == 2


def test_scale_is_pointwise(rng):
    model = random_model(rng)
    X = rng.standard_normal((30, 2))
    np.testing.assert_allclose(scale(model, 3.7).predict(X), 3.7 * model.predict(X), atol=1e-12)
    assert seminorm_bound(scale(model, -2.0)) == pytest.approx(2.0 * seminorm_bound(model))


def test_add_additive_inverse(rng):
    model = random_model(rng)
    zero = add(model, scale(model, -1.0))
    assert np.max(np.abs(zero.predict(rng.standard_normal((40, 2))))) <= 1e-10


def test_add_is_pointwise(rng):
    m1, m2 = random_model(rng), random_model(rng)
    X = rng.standard_normal((100, 2))
    np.testing.assert_allclose(add(m1, m2).predict(X), m1.predict(X) + m2.predict(X), atol=1e-10)


def test_add_bound_triangle_inequality(rng):
    for _ in range(50):
        m1 = random_model(rng, k=int(rng.integers(1, 5)))
        m2 = random_model(rng, k=int(rng.integers(1, 5)))
        assert seminorm_bound(add(m1, m2)) <= seminorm_bound(m1) + seminorm_bound(m2) + 1e-12


def test_add_folds_different_standardizers(rng):
    m1 = PLDCModel(random_model(rng).phi1, random_model(rng).phi2,
                   standardizer=Standardizer([0.5, -1.0], [2.0, 3.0]))
    m2 = random_model(rng)
    total = add(m1, m2)
    assert total.standardizer is None
    X = rng.standard_normal((20, 2))
    np.testing.assert_allclose(total.predict(X), m1.predict(X) + m2.predict(X), atol=1e-10)


def test_add_respects_plane_cap(rng):
    m = random_model(rng, k=3)
    with pytest.raises(PlaneLimitError):
        add(m, m, max_planes=8)


def test_fold_standardizer_keeps_predictions(rng):
    model = PLDCModel(random_model(rng).phi1, random_model(rng).phi2,
                      standardizer=Standardizer([1.0, 2.0], [0.5, 4.0]))
    X = rng.standard_normal((25, 2))
    np.testing.assert_allclose(fold_standardizer(model).predict(X), model.predict(X), atol=1e-12)


# ---------------- One-dimensional structure ----------------

def test_kinks_of_single_hinge_pair():
    np.testing.assert_allclose(kink_abscissae(hinge_pair()), [0.0, 1.0])


def test_fitted_model_is_affine_between_training_inputs():
    rng = np.random.default_rng(11)
    x = np.sort(rng.uniform(-2.0, 2.0, 7))
    y = np.sin(2.0 * x) + 0.1 * rng.standard_normal(7)
    data = Dataset.from_arrays(x[:, None], y)
    model, _ = fit_lp(data, FitConfig(lam=0.3))
    edges = np.concatenate([[x[0] - 1.0], x, [x[-1] + 1.0]])
    for lo, hi in zip(edges[:-1], edges[1:]):
        values = model.predict(np.linspace(lo, hi, 21)[:, None])
        # second differences vanish on an affine piece
        assert np.max(np.abs(np.diff(values, 2))) <= 1e-6
    assert model.meta["construction"] == "linear_spline"


def test_linear_spline_through_three_points():
    model = linear_spline([[0.0], [2.0], [1.0]], [0.0, 0.0, 1.0])
    np.testing.assert_allclose(model.predict(np.array([[-1.0], [0.5], [1.0], [1.5], [3.0]])),
                               [-1.0, 0.5, 1.0, 0.5, -1.0], atol=1e-12)
    np.testing.assert_allclose(model.phi1.slopes[:, 0], [1.0, 1.0])
    np.testing.assert_allclose(model.phi2.slopes[:, 0], [0.0, 2.0])
    np.testing.assert_allclose(kink_abscissae(model), [1.0])


def test_linear_spline_single_knot_is_constant():
    model = linear_spline([[4.0]], [2.5])
    assert model(np.array([-10.0])) == pytest.approx(2.5)
    assert seminorm_bound(model) == 0.0


def test_linear_spline_rejects_bad_knots():
    with pytest.raises(DuplicateInputError):
        linear_spline([[1.0], [1.0]], [0.0, 0.0])
    with pytest.raises(DimensionMismatchError):
        linear_spline(np.zeros((3, 2)), np.zeros(3))


def test_kinks_need_one_dimension(rng):
    with pytest.raises(DimensionMismatchError):
        kink_abscissae(random_model(rng))
