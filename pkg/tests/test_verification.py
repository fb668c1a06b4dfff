import pytest

from app.core.errors import VerificationFailure
from app.models.burgers_fd import BurgersFDModel
from app.models.burgers_fem import BurgersFEMModel
from app.models.burgers_spectral import BurgersSpectralModel
from app.models.lorenz import LorenzModel
from app.models.vorticity import VorticityModel
from app.schemas.dynamics import VorticityConfig
from app.services.verification import (
    DOT_PRODUCT_THRESHOLD,
    VORTICITY_DOT_PRODUCT_THRESHOLD,
    CorruptedAdjointModel,
    check_adjoint,
    thresholds_for,
)


def test_lorenz_adjoint_is_exact():
    report = check_adjoint(LorenzModel(), trials=100)
    assert report.passed
    assert report.dot_product_error <= 1e-12
    assert report.trials == 100


@pytest.mark.parametrize("model_cls", [BurgersFDModel, BurgersFEMModel, BurgersSpectralModel])
def test_burgers_adjoints_pass(model_cls):
    report = check_adjoint(model_cls(), trials=20)
    assert report.passed
    assert report.dot_product_error <= DOT_PRODUCT_THRESHOLD


def test_vorticity_adjoint_passes_on_small_grid():
    report = check_adjoint(VorticityModel(VorticityConfig(m=11, sor_tol=1e-12)), trials=5)
    assert report.passed
    assert report.dot_product_threshold == VORTICITY_DOT_PRODUCT_THRESHOLD


def test_checks_are_reproducible():
    first = check_adjoint(BurgersFDModel(), trials=5, seed=3)
    second = check_adjoint(BurgersFDModel(), trials=5, seed=3)
    assert first.as_dict() == second.as_dict()


def test_corrupted_adjoint_is_detected():
    corrupted = CorruptedAdjointModel(LorenzModel())
    report = check_adjoint(corrupted, trials=10, raise_on_failure=False)
    assert not report.passed
    assert report.as_dict()["passed"] is False
    assert report.tangent_error <= 1e-4
    with pytest.raises(VerificationFailure) as info:
        check_adjoint(corrupted, trials=10)
    assert info.value.test_name == "dot_product"
    assert info.value.exit_code == 5


def test_thresholds_follow_wrapped_model():
    vorticity = VorticityModel(VorticityConfig(m=5, poisson_method="direct"))
    assert thresholds_for(LorenzModel()) == (1e-10, 1e-4)
    assert thresholds_for(vorticity) == (1e-8, 1e-3)
    assert thresholds_for(CorruptedAdjointModel(vorticity)) == (1e-8, 1e-3)
