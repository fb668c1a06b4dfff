"""
Driver dos experimentos gêmeos.

    python -m app.cli <generate-obs|solve|check-adjoint|landscape> [--config arquivo] [--chave valor ...]

O arquivo de configuração é plano (`chave = valor`, `#` inicia comentário);
as opções `--chave valor` sobrescrevem o arquivo. Códigos de saída:
0 sucesso, 2 configuração, 3 estagnação/não convergência, 4 E/S, 5 verificação.
"""
import argparse
import logging
import sys
from typing import Dict, List, Optional

from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import ArtifactIOError, AssimilationError, ConfigError
from app.schemas.run_config import RunConfig
from app.services.experiment_service import ExperimentService

logger = logging.getLogger(__name__)

COMMANDS = ("generate-obs", "solve", "check-adjoint", "landscape")


def read_config_file(path: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise ArtifactIOError(f"Não foi possível ler o arquivo de configuração: {e}", path=path) from e
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: linha sem '=': {raw.strip()}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{number}: chave vazia")
        values[key] = value
    return values


def parse_overrides(tokens: List[str]) -> Dict[str, str]:
    values: Dict[str, str] = {}
    index = 0
    while index < len(tokens):
        token = tokens[index]
        if not token.startswith("--"):
            raise ConfigError(f"Argumento inesperado: {token}")
        key = token[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            index += 1
        else:
            if index + 1 >= len(tokens):
                raise ConfigError(f"Opção --{key} sem valor")
            value = tokens[index + 1]
            index += 2
        values[key.replace("-", "_")] = value
    return values


def load_config(config_path: Optional[str], overrides: Dict[str, str]) -> RunConfig:
    values = read_config_file(config_path) if config_path else {}
    values.update(overrides)
    if "model" not in values:
        raise ConfigError("Chave obrigatória ausente: model")
    try:
        return RunConfig(**values)
    except ValidationError as e:
        keys = ", ".join(".".join(str(part) for part in err["loc"]) for err in e.errors())
        raise ConfigError(f"Configuração inválida ({keys}): {e}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="admm4dvar", description="4D-Var por ADMM multibloco linearizado", allow_abbrev=False
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", dest="config_path", default=None, help="Arquivo `chave = valor`")
    parser.add_argument("--threads", type=int, default=None, help="Número máximo de trabalhadores")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    try:
        overrides = parse_overrides(rest)
        if args.threads is not None:
            overrides["threads"] = str(args.threads)
        service = ExperimentService(load_config(args.config_path, overrides))

        if args.command == "generate-obs":
            result = service.generate_obs()
        elif args.command == "solve":
            result = service.solve()
        elif args.command == "landscape":
            result = service.landscape()
        else:
            report = service.check_adjoint()
            print(f"dot_product_max_rel_error = {report.dot_product_error:.3e} (limite {report.dot_product_threshold:.0e})")
            print(f"tangent_max_rel_error = {report.tangent_error:.3e} (limite {report.tangent_threshold:.0e})")
            if not report.passed:
                failing = "dot_product" if report.dot_product_error > report.dot_product_threshold else "tangent_finite_difference"
                print(f"FALHOU: {failing}", file=sys.stderr)
                return 5
            return 0
    except AssimilationError as e:
        if isinstance(e, ArtifactIOError):
            print(f"erro: {e} [{e.path}]", file=sys.stderr)
        else:
            print(f"erro: {e}", file=sys.stderr)
        return e.exit_code

    for path in result["files"]:
        print(path)
    return 0


def main():
    logging.basicConfig(level=settings.LOG_LEVEL)
    sys.exit(run())


if __name__ == "__main__":
    main()
