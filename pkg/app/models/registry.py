import logging
from typing import Type

from pydantic import BaseModel, ValidationError

from app.core.errors import ConfigError
from app.models.base import DynamicalModel
from app.models.burgers_fd import BurgersFDModel
from app.models.burgers_fem import BurgersFEMModel
from app.models.burgers_spectral import BurgersSpectralModel
from app.models.lorenz import LorenzModel
from app.models.vorticity import VorticityModel
from app.schemas.dynamics import (
    BurgersFDConfig,
    BurgersFEMConfig,
    BurgersSpectralConfig,
    LorenzParams,
    VorticityConfig,
)

logger = logging.getLogger(__name__)

MODEL_REGISTRY = {
    "lorenz": (LorenzModel, LorenzParams),
    "burgers-fd": (BurgersFDModel, BurgersFDConfig),
    "burgers-fem": (BurgersFEMModel, BurgersFEMConfig),
    "burgers-spectral": (BurgersSpectralModel, BurgersSpectralConfig),
    "vorticity2d": (VorticityModel, VorticityConfig),
}


def validated(schema: Type[BaseModel], **values) -> BaseModel:
    """Constrói um schema convertendo ValidationError em ConfigError."""
    try:
        return schema(**values)
    except ValidationError as e:
        raise ConfigError(f"Configuração inválida para {schema.__name__}: {e}") from e


def build_model(name: str, **params) -> DynamicalModel:
    """
    Instancia o modelo pelo nome; `params` contém apenas os campos do schema
    do modelo (valores None são ignorados e ficam com o padrão).
    """
    if name not in MODEL_REGISTRY:
        raise ConfigError(f"Modelo desconhecido: {name}. Opções: {', '.join(MODEL_REGISTRY)}")
    model_cls, schema = MODEL_REGISTRY[name]
    fields = {key: value for key, value in params.items() if key in schema.model_fields and value is not None}
    config = validated(schema, **fields)
    logger.debug(f"Modelo {name} construído com {config}")
    return model_cls(config)
