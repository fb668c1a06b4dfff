import numpy as np
import pytest

from app.models.base import DynamicalModel
from app.models.lorenz import LorenzModel, TRUE_INITIAL_STATE
from app.services.fourdvar import AssimilationProblem, ObservationSet, generate_observations


class LinearToyModel(DynamicalModel):
    """H(u) = A·u; usado para conferir as fórmulas fechadas à mão."""

    name = "linear-toy"

    def __init__(self, matrix, dt: float = 1.0, initial=None):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        self._dt = dt
        self._initial = np.zeros(self.matrix.shape[0]) if initial is None else np.asarray(initial, dtype=float)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dt(self) -> float:
        return self._dt

    def step(self, u):
        return self.matrix @ np.asarray(u, dtype=float)

    def tangent(self, u, v):
        return self.matrix @ np.asarray(v, dtype=float)

    def adjoint(self, u, w):
        return self.matrix.T @ np.asarray(w, dtype=float)

    def initial_state(self):
        return self._initial.copy()


def make_problem(model, observations, q=1, T_o=1.0, alpha=0.0, mu=1.0, background=None):
    observations = np.atleast_2d(np.asarray(observations, dtype=float))
    obs = ObservationSet(
        observations=observations,
        background=observations[0].copy() if background is None else np.asarray(background, dtype=float),
        q=q,
        T_o=T_o,
        noise_std=0.0,
        seed=0,
    )
    return AssimilationProblem(model=model, obs=obs, alpha=alpha, mu=mu)


@pytest.fixture
def identity_model():
    return LinearToyModel([[1.0]])


@pytest.fixture
def lorenz_model():
    return LorenzModel()


@pytest.fixture
def lorenz_problem(lorenz_model):
    """Lorenz com T = 3, T_o = 0.3 e observações precisas."""
    obs = generate_observations(lorenz_model, np.array(TRUE_INITIAL_STATE), N=300, q=30, noise_std=0.0, seed=42)
    return AssimilationProblem(model=lorenz_model, obs=obs, alpha=0.1, mu=100.0)


@pytest.fixture
def short_lorenz_problem(lorenz_model):
    """Janela curta (N = 30, q = 10) para testes rápidos do ADMM."""
    obs = generate_observations(lorenz_model, np.array(TRUE_INITIAL_STATE), N=30, q=10, noise_std=0.0, seed=42)
    return AssimilationProblem(model=lorenz_model, obs=obs, alpha=0.1, mu=100.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
