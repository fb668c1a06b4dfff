import numpy as np
import pytest

from app.core.errors import AdmmFailure, ConfigError
from app.models.lorenz import TRUE_INITIAL_STATE
from app.models.vorticity import VorticityModel
from app.schemas.dynamics import VorticityConfig
from app.schemas.solvers import AdmmParams
from app.services.admm_solver import (
    AdmmSolver,
    Given,
    Rollout,
    Zeros,
    block_update,
    dual_update,
    init_state,
    linearized_gradient,
    outer_iteration,
    primal_update,
    primal_update_first,
    primal_update_interior,
    primal_update_last,
    solve,
)
from app.schemas.run_config import RunConfig
from app.services.experiment_service import ExperimentService
from app.services.fourdvar import AssimilationProblem, generate_observations
from scripts.compare_runtimes import SCHEMES, time_scheme
from tests.conftest import LinearToyModel, make_problem

UNIT = AdmmParams(s=1.0, eta=1.0, mu=1.0)


def _state(problem, trajectory, duals=None):
    state = init_state(problem, Given(np.array(trajectory, dtype=float)))
    if duals is not None:
        state.duals = np.array(duals, dtype=float)
    return state


def test_first_block_by_hand(identity_model):
    prob = make_problem(identity_model, [[0.0], [9.0]])
    state = _state(prob, [[2.0], [3.0]])
    np.testing.assert_allclose(primal_update_first(state, prob, UNIT), [1.5])


def test_interior_block_by_hand(identity_model):
    prob = make_problem(identity_model, [[0.0], [9.0]], q=2)
    state = _state(prob, [[0.5], [1.0], [1.5]], duals=[[0.5], [0.5]])
    np.testing.assert_allclose(primal_update_interior(1, state, prob, UNIT), [1.0])


def test_last_block_by_hand(identity_model):
    prob = make_problem(identity_model, [[0.0], [3.0]])
    state = _state(prob, [[1.0], [2.0]])
    np.testing.assert_allclose(primal_update_last(state, prob, UNIT), [2.0])


def test_dual_step_by_hand(identity_model):
    prob = make_problem(identity_model, [[0.0], [0.0]])
    state = _state(prob, [[1.0], [3.0]])
    np.testing.assert_allclose(dual_update(state, prob, AdmmParams(s=2.0, eta=1.0, mu=1.0)), [[-1.0]])


def test_interior_index_checked(identity_model):
    prob = make_problem(identity_model, [[0.0], [0.0]])
    state = _state(prob, [[0.0], [0.0]])
    with pytest.raises(ConfigError):
        primal_update_interior(1, state, prob, UNIT)


def test_first_block_is_stationary_point(short_lorenz_problem, rng):
    prob = short_lorenz_problem
    params = AdmmParams()
    state = _state(prob, prob.obs.truth + rng.normal(size=prob.obs.truth.shape), duals=rng.normal(size=(prob.N, 3)))
    x = primal_update_first(state, prob, params)
    g = linearized_gradient(0, state, prob, params)
    residual = (
        params.mu * prob.obs.T_o * (x - prob.obs.observations[0])
        + params.mu * prob.alpha * (x - prob.obs.background)
        + (x - state.primal[0]) / params.eta
        - g / params.s
    )
    np.testing.assert_allclose(residual, 0.0, atol=1e-9)


def test_interior_block_is_stationary_point(short_lorenz_problem, rng):
    prob = short_lorenz_problem
    params = AdmmParams()
    state = _state(prob, prob.obs.truth + rng.normal(size=prob.obs.truth.shape), duals=rng.normal(size=(prob.N, 3)))
    k = prob.obs.q
    x = primal_update_interior(k, state, prob, params)
    a = state.forecasts[k - 1] + params.s * state.duals[k - 1]
    g = linearized_gradient(k, state, prob, params)
    residual = (
        params.mu * prob.obs.T_o * (x - prob.obs.observations[1])
        + (x - a) / params.s
        + (x - state.primal[k]) / params.eta
        - g / params.s
    )
    np.testing.assert_allclose(residual, 0.0, atol=1e-9)


@pytest.fixture(scope="module")
def vorticity_problem():
    model = VorticityModel(VorticityConfig(m=6, poisson_method="direct"))
    obs = generate_observations(model, model.initial_state(), N=2, q=1, noise_std=0.0, seed=3)
    return AssimilationProblem(model=model, obs=obs, alpha=0.1, mu=20.0)


def test_energy_norm_blocks_are_stationary(vorticity_problem, rng):
    prob = vorticity_problem
    params = AdmmParams(mu=20.0, cg_tol=1e-12)
    truth = prob.obs.truth
    state = _state(prob, truth + rng.normal(size=truth.shape), duals=rng.normal(size=(prob.N, prob.model.dim)))
    M = prob.norm.weight

    x = primal_update_first(state, prob, params)
    g = linearized_gradient(0, state, prob, params)
    residual = (
        params.mu * M(prob.obs.T_o * (x - prob.obs.observations[0]) + prob.alpha * (x - prob.obs.background))
        + (x - state.primal[0]) / params.eta
        - g / params.s
    )
    assert np.linalg.norm(residual) <= 1e-6 * np.linalg.norm(g / params.s)

    x = primal_update_last(state, prob, params)
    a = state.forecasts[-1] + params.s * state.duals[-1]
    residual = (
        params.mu * prob.obs.T_o * M(x - prob.obs.observations[-1])
        + (x - a) / params.s
        + (x - state.primal[-1]) / params.eta
    )
    assert np.linalg.norm(residual) <= 1e-6 * np.linalg.norm(a / params.s)


def test_truth_is_a_fixed_point(short_lorenz_problem):
    prob = short_lorenz_problem
    state = init_state(prob, Given(prob.obs.truth))
    advanced = outer_iteration(state, prob, AdmmParams())
    np.testing.assert_allclose(advanced.primal, prob.obs.truth, atol=1e-10)
    np.testing.assert_allclose(advanced.duals, 0.0, atol=1e-8)
    assert advanced.outer_iter == 1


def test_block_order_does_not_matter(short_lorenz_problem):
    prob = short_lorenz_problem
    params = AdmmParams()
    state = init_state(prob, Rollout(np.array([-3.0, -3.0, 10.0])))
    advanced = outer_iteration(state, prob, params)
    reversed_blocks = {k: primal_update(k, state, prob, params) for k in reversed(range(prob.N + 1))}
    np.testing.assert_array_equal(advanced.primal, np.array([reversed_blocks[k] for k in range(prob.N + 1)]))


def test_duals_use_the_new_primal(short_lorenz_problem):
    prob = short_lorenz_problem
    params = AdmmParams()
    state = init_state(prob, Zeros())
    advanced = outer_iteration(state, prob, params)
    forecasts = np.array([prob.model.step(u) for u in advanced.primal[:-1]])
    np.testing.assert_allclose(advanced.duals, state.duals - (advanced.primal[1:] - forecasts) / params.s, atol=1e-12)


def test_threads_give_identical_history(short_lorenz_problem):
    serial_state, serial = solve(short_lorenz_problem, AdmmParams(max_outer=10), Zeros())
    parallel_state, parallel = solve(short_lorenz_problem, AdmmParams(max_outer=10, threads=4), Zeros())
    np.testing.assert_array_equal(serial_state.primal, parallel_state.primal)
    assert [r.constraint_error for r in serial] == [r.constraint_error for r in parallel]


def test_init_modes(short_lorenz_problem):
    prob = short_lorenz_problem
    np.testing.assert_array_equal(init_state(prob, Zeros()).primal, np.zeros((prob.N + 1, 3)))
    guess = np.array([-3.0, -3.0, 10.0])
    np.testing.assert_allclose(init_state(prob, Rollout(guess)).primal, prob.model.rollout(guess, prob.N))
    assert not np.any(init_state(prob, Zeros()).duals)
    with pytest.raises(ConfigError):
        init_state(prob, Given(np.zeros((prob.N, 3))))


def test_zero_sweeps_records_initial_state(short_lorenz_problem):
    _, history = solve(short_lorenz_problem, AdmmParams(max_outer=0), Zeros(), reference=short_lorenz_problem.obs.truth)
    assert len(history) == 1
    assert history[0].iter == 0
    assert history[0].total_error == pytest.approx(np.linalg.norm(short_lorenz_problem.obs.truth))


def test_history_iterations_have_no_gaps(short_lorenz_problem):
    _, history = solve(short_lorenz_problem, AdmmParams(max_outer=7), Zeros())
    assert [r.iter for r in history] == list(range(8))


def test_constraint_tolerance_stops_early(short_lorenz_problem):
    _, history = solve(short_lorenz_problem, AdmmParams(max_outer=50, constraint_tol=1e30), Zeros())
    assert len(history) == 2


def test_converges_to_regularized_minimizer(identity_model):
    # ½(u−1)² + ¼u² + ½(u−3)² é mínimo em u = 1.6 com λ = −1.4
    prob = make_problem(identity_model, [[1.0], [3.0]], alpha=0.5, background=[0.0])
    state, history = solve(prob, AdmmParams(s=1.0, eta=1.0, mu=1.0, max_outer=200), Zeros())
    np.testing.assert_allclose(state.primal, [[1.6], [1.6]], atol=1e-8)
    np.testing.assert_allclose(state.duals, [[-1.4]], atol=1e-8)
    assert history[-1].constraint_error < 1e-16


def test_non_finite_sweep_raises_with_partial_history(identity_model):
    prob = make_problem(identity_model, [[np.nan], [1.0]])
    with pytest.raises(AdmmFailure) as info:
        solve(prob, AdmmParams(max_outer=5), Zeros())
    assert len(info.value.history) == 1


def test_checkpoint_callback(short_lorenz_problem):
    seen = []
    AdmmSolver(short_lorenz_problem, AdmmParams(max_outer=5)).solve(
        Zeros(), checkpoint_every=2, on_checkpoint=lambda state: seen.append(state.outer_iter)
    )
    assert seen == [2, 4]


def test_record_callback_sees_every_sweep(short_lorenz_problem):
    seen = []
    AdmmSolver(short_lorenz_problem, AdmmParams(max_outer=3)).solve(Zeros(), on_record=lambda r: seen.append(r.iter))
    assert seen == [0, 1, 2, 3]


def test_gauss_seidel_keeps_truth_and_first_block(short_lorenz_problem):
    prob = short_lorenz_problem
    params = AdmmParams(schedule="gauss-seidel")
    state = init_state(prob, Given(prob.obs.truth))
    np.testing.assert_allclose(outer_iteration(state, prob, params).primal, prob.obs.truth, atol=1e-10)

    state = init_state(prob, Rollout(np.array([-3.0, -3.0, 10.0])))
    jacobi = outer_iteration(state, prob, AdmmParams())
    gauss_seidel = outer_iteration(state, prob, params)
    np.testing.assert_array_equal(jacobi.primal[0], gauss_seidel.primal[0])
    after_observation = prob.obs.q + 1
    assert not np.allclose(jacobi.primal[after_observation], gauss_seidel.primal[after_observation])


def _expansive_state():
    prob = make_problem(LinearToyModel([[3.0]]), [[0.0], [0.0]])
    return prob, _state(prob, [[1.0], [3.0]])


def test_block_update_shrinks_eta_until_majorization_holds():
    prob, state = _expansive_state()
    u, forecast, eta = block_update(0, state, prob, UNIT)
    # 2·9·‖Δu‖² ≤ ‖Δu‖²/η exige η ≤ 1/18
    assert eta == pytest.approx(1.0 / 32.0)
    np.testing.assert_allclose(forecast, 3.0 * u)
    moved = np.sum((u - state.primal[0]) ** 2)
    assert moved > 0
    assert UNIT.coupling_factor * np.sum((forecast - 3.0) ** 2) / UNIT.s <= moved / eta


def test_block_update_without_backtracking_keeps_eta():
    prob, state = _expansive_state()
    params = AdmmParams(s=1.0, eta=1.0, mu=1.0, prox_backtrack=None)
    u, _, eta = block_update(0, state, prob, params)
    assert eta == 1.0
    np.testing.assert_allclose(u, primal_update_first(state, prob, params))


def test_last_block_is_never_shrunk():
    prob, state = _expansive_state()
    _, forecast, eta = block_update(prob.N, state, prob, UNIT)
    assert forecast is None
    assert eta == UNIT.eta


def test_shrunk_etas_persist_across_sweeps():
    prob, state = _expansive_state()
    first = outer_iteration(state, prob, UNIT)
    assert first.etas[0] == pytest.approx(1.0 / 32.0)
    assert first.etas[-1] == UNIT.eta
    second = outer_iteration(first, prob, UNIT)
    assert np.all(second.etas <= first.etas)


@pytest.mark.slow
def test_lorenz_precise_observations_recover_truth(lorenz_problem):
    state, history = solve(
        lorenz_problem,
        AdmmParams(mu=100.0, eta=0.1, s=2.0 / 3.0, max_outer=600),
        Rollout(np.array([-3.0, -3.0, 10.0])),
        reference=lorenz_problem.obs.truth,
    )
    assert history[-1].constraint_error <= 1e-4 * history[1].constraint_error
    assert np.linalg.norm(state.primal[0] - np.array(TRUE_INITIAL_STATE)) < 0.1


@pytest.mark.slow
def test_lorenz_noisy_observations_plateau(lorenz_model):
    obs = generate_observations(lorenz_model, np.array(TRUE_INITIAL_STATE), N=300, q=30, noise_std=1.0, seed=42)
    prob = AssimilationProblem(model=lorenz_model, obs=obs, alpha=0.1, mu=100.0)
    state, history = solve(prob, AdmmParams(max_outer=1000), Rollout(np.array([-3.0, -3.0, 10.0])), reference=obs.truth)
    constraint = np.array([r.constraint_error for r in history[50:]])
    rising = np.count_nonzero(np.diff(constraint) > 0)
    assert rising <= 0.01 * len(constraint)

    errors = np.array([r.total_error for r in history])
    assert errors[-1] > 0
    assert abs(errors[-1] - errors[-101]) <= 1e-2 * errors[-1]
    # ruído unitário por componente: o erro em u₀ fica abaixo de ‖ε‖ esperado
    assert np.linalg.norm(state.primal[0] - obs.truth[0]) < np.sqrt(3) * obs.noise_std


@pytest.mark.slow
def test_vorticity_assimilation_recovers_final_field(tmp_path):
    service = ExperimentService(RunConfig(model="vorticity2d", output_dir=str(tmp_path)))
    obs = service.observations()
    prob = service.problem(obs)
    config = service.config
    params = AdmmParams(s=config.s, eta=config.eta, mu=config.mu, max_outer=config.max_iters, threads=config.threads)
    state, history = solve(prob, params, Zeros(), reference=obs.truth)
    assert history[-1].constraint_error <= 1e-3 * history[1].constraint_error
    noise = prob.norm.sq(obs.observations[-1] - obs.truth[-1])
    assert prob.norm.sq(state.primal[-1] - obs.truth[-1]) < noise


@pytest.fixture(scope="module")
def burgers_runs():
    return {model: time_scheme(model, 500) for model in SCHEMES}


@pytest.mark.slow
@pytest.mark.parametrize("model", SCHEMES)
def test_burgers_schemes_converge(burgers_runs, model):
    run = burgers_runs[model]
    assert run["constraint_ratio"] < 1e-2
    assert run["final_observation_rms"] < 0.1


@pytest.mark.slow
def test_burgers_runtime_ordering(burgers_runs):
    seconds = [burgers_runs[model]["seconds"] for model in SCHEMES]
    assert seconds[0] < seconds[1] < seconds[2]
