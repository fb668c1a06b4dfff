import numpy as np
import pytest

from app.models.lorenz import (
    TRUE_INITIAL_STATE,
    LorenzModel,
    lorenz_jacobian,
    lorenz_rhs,
    rk4_step,
)
from app.schemas.dynamics import LorenzParams

PARAMS = LorenzParams()


def test_rhs_at_true_initial_state():
    np.testing.assert_allclose(lorenz_rhs(np.array(TRUE_INITIAL_STATE), PARAMS), [10.0, -4.25, -0.25 - 20.5 * 8.0 / 3.0])


def test_rhs_at_simple_point():
    np.testing.assert_allclose(lorenz_rhs(np.array([1.0, 1.0, 27.0]), PARAMS), [0.0, 0.0, 1.0 - 27.0 * 8.0 / 3.0])


def test_rhs_accepts_batches():
    batch = np.array([TRUE_INITIAL_STATE, [1.0, 1.0, 27.0]])
    np.testing.assert_allclose(lorenz_rhs(batch, PARAMS)[1], lorenz_rhs(batch[1], PARAMS))


def test_jacobian_rows():
    J = lorenz_jacobian(np.array([2.0, 3.0, 5.0]), PARAMS)
    np.testing.assert_allclose(J[0], [-10.0, 10.0, 0.0])
    np.testing.assert_allclose(J[1], [23.0, -1.0, -2.0])
    np.testing.assert_allclose(J[2], [3.0, 2.0, -8.0 / 3.0])


def test_jacobian_matches_finite_differences(rng):
    u = rng.normal(size=3) * 5
    eps = 1e-6
    columns = [
        (lorenz_rhs(u + eps * e, PARAMS) - lorenz_rhs(u - eps * e, PARAMS)) / (2 * eps) for e in np.eye(3)
    ]
    np.testing.assert_allclose(lorenz_jacobian(u, PARAMS), np.column_stack(columns), atol=1e-6)


def test_zero_time_step_is_identity():
    model = LorenzModel(LorenzParams.model_construct(dt=0.0))
    u = np.array(TRUE_INITIAL_STATE)
    np.testing.assert_array_equal(model.step(u), u)


def test_rk4_matches_straight_line_formula():
    u = np.array([1.0, -2.0, 15.0])
    dt = PARAMS.dt

    def f(x):
        return np.array([10.0 * (x[1] - x[0]), x[0] * (28.0 - x[2]) - x[1], x[0] * x[1] - 8.0 / 3.0 * x[2]])

    k1 = f(u)
    k2 = f(u + dt / 2 * k1)
    k3 = f(u + dt / 2 * k2)
    k4 = f(u + dt * k3)
    expected = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    np.testing.assert_allclose(rk4_step(u, PARAMS), expected, rtol=1e-14)


def test_rk4_fourth_order_convergence():
    u0 = np.array(TRUE_INITIAL_STATE)
    T = 0.2

    def integrate(dt):
        model = LorenzModel(LorenzParams(dt=dt))
        return model.rollout(u0, int(round(T / dt)))[-1]

    reference = integrate(0.00025)
    coarse = np.linalg.norm(integrate(0.004) - reference)
    fine = np.linalg.norm(integrate(0.002) - reference)
    assert 12.0 <= coarse / fine <= 20.0


def test_tangent_matches_central_difference(lorenz_model, rng):
    for _ in range(10):
        u = np.array(TRUE_INITIAL_STATE) + rng.normal(size=3)
        v = rng.normal(size=3)
        eps = 1e-6
        fd = (lorenz_model.step(u + eps * v) - lorenz_model.step(u - eps * v)) / (2 * eps)
        tl = lorenz_model.tangent(u, v)
        assert np.linalg.norm(fd - tl) <= 1e-6 * np.linalg.norm(tl)


def test_adjoint_dot_product_identity(lorenz_model, rng):
    worst = 0.0
    for _ in range(1000):
        u, v, w = rng.normal(size=(3, 3)) * np.array([10.0, 10.0, 20.0])
        lhs = np.dot(lorenz_model.tangent(u, v), w)
        rhs = np.dot(v, lorenz_model.adjoint(u, w))
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    assert worst <= 1e-12


def test_tangent_chain_rule_over_two_steps(lorenz_model, rng):
    u0 = np.array(TRUE_INITIAL_STATE)
    u1 = lorenz_model.step(u0)
    v = rng.normal(size=3)
    composed = lorenz_model.tangent(u1, lorenz_model.tangent(u0, v))
    eps = 1e-6
    fd = (
        lorenz_model.step(lorenz_model.step(u0 + eps * v)) - lorenz_model.step(lorenz_model.step(u0 - eps * v))
    ) / (2 * eps)
    np.testing.assert_allclose(composed, fd, rtol=1e-6, atol=1e-8)


def test_tangent_matrix_matches_columnwise_tangent(lorenz_model):
    u = np.array(TRUE_INITIAL_STATE)
    columns = np.column_stack([lorenz_model.tangent(u, e) for e in np.eye(3)])
    np.testing.assert_allclose(lorenz_model.tangent_matrix(u), columns)


@pytest.mark.parametrize("stride", [1, 5])
def test_batch_rollout_matches_single_rollouts(lorenz_model, rng, stride):
    starts = np.array(TRUE_INITIAL_STATE) + rng.normal(size=(4, 3))
    batch = lorenz_model.batch_rollout(starts, 20, stride=stride)
    assert batch.shape == (20 // stride + 1, 4, 3)
    for b, start in enumerate(starts):
        np.testing.assert_allclose(batch[:, b], lorenz_model.rollout(start, 20)[::stride], rtol=1e-13)


def test_invalid_time_step_rejected():
    with pytest.raises(ValueError):
        LorenzParams(dt=-0.01)
