import csv
import logging
import os
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from app.core.errors import ArtifactIOError
from app.utils.numerics import Grid2D

logger = logging.getLogger(__name__)


def fmt(value) -> str:
    """Números com 17 dígitos significativos (reprodutíveis bit a bit)."""
    if value is None:
        return "nan"
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


class ArtifactRepository:
    """
    Persistência dos artefatos de uma execução (CSV e meta.txt) num diretório.
    Toda falha de E/S vira ArtifactIOError com o caminho envolvido.
    """

    def __init__(self, output_dir: str):
        self.output_dir = output_dir

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def _ensure_dir(self):
        try:
            os.makedirs(self.output_dir, exist_ok=True)
        except OSError as e:
            logger.error(f"Erro ao criar diretório {self.output_dir}: {e}")
            raise ArtifactIOError(f"Não foi possível criar o diretório de saída: {e}", path=self.output_dir) from e

    def _write_rows(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
        self._ensure_dir()
        target = self.path(name)
        try:
            with open(target, "w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([fmt(value) for value in row])
        except OSError as e:
            logger.error(f"Erro ao escrever {target}: {e}")
            raise ArtifactIOError(f"Falha ao escrever artefato: {e}", path=target) from e
        logger.info(f"Artefato gravado: {target}")
        return target

    def write_trajectory(self, name: str, trajectory: np.ndarray, steps: Optional[Sequence[int]] = None) -> str:
        """CSV `k,component,value`; k é o índice de passo do modelo."""
        steps = range(len(trajectory)) if steps is None else steps
        rows = (
            (k, component, value)
            for k, state in zip(steps, trajectory)
            for component, value in enumerate(state)
        )
        return self._write_rows(name, ("k", "component", "value"), rows)

    def write_observations(self, observations: np.ndarray, q: int) -> str:
        return self.write_trajectory("observations.csv", observations, steps=[k * q for k in range(len(observations))])

    def write_admm_history(self, history: List) -> str:
        rows = ((r.iter, r.total_error, r.constraint_error, r.objective) for r in history)
        return self._write_rows("history.csv", ("iter", "total_error", "constraint_error", "objective"), rows)

    def write_baseline_history(self, history: List) -> str:
        rows = ((r.iter, r.objective, r.grad_norm, r.step_size) for r in history)
        return self._write_rows("history.csv", ("iter", "objective", "grad_norm", "step_size"), rows)

    def write_landscape(self, rows: Iterable[Sequence]) -> str:
        return self._write_rows("landscape.csv", ("x0", "y0", "z0", "F"), rows)

    def write_field_snapshot(self, name: str, field: np.ndarray, grid: Grid2D) -> str:
        """Campo de vorticidade no interior, CSV `i,j,omega` em ordem row-major (índices a partir de 1)."""
        values = grid.as_field(field)
        rows = ((i + 1, j + 1, values[i, j]) for i, j in np.ndindex(values.shape))
        return self._write_rows(name, ("i", "j", "omega"), rows)

    def write_meta(self, meta: Dict) -> str:
        self._ensure_dir()
        target = self.path("meta.txt")
        try:
            with open(target, "w", encoding="utf-8") as f:
                for key in sorted(meta):
                    f.write(f"{key} = {fmt(meta[key])}\n")
        except OSError as e:
            logger.error(f"Erro ao escrever {target}: {e}")
            raise ArtifactIOError(f"Falha ao escrever meta.txt: {e}", path=target) from e
        return target

    def write_report(self, name: str, report: Dict) -> str:
        return self._write_rows(name, ("key", "value"), sorted(report.items()))

    @staticmethod
    def read_trajectory(path: str) -> np.ndarray:
        """Lê um CSV `k,component,value` de volta para uma matriz (passos, dim)."""
        try:
            with open(path, newline="", encoding="utf-8") as f:
                records = [(int(r["k"]), int(r["component"]), float(r["value"])) for r in csv.DictReader(f)]
        except (OSError, KeyError, ValueError) as e:
            logger.error(f"Erro ao ler trajetória {path}: {e}")
            raise ArtifactIOError(f"Falha ao ler trajetória: {e}", path=path) from e
        if not records:
            raise ArtifactIOError("Arquivo de trajetória vazio.", path=path)
        steps = sorted({k for k, _, _ in records})
        dim = max(c for _, c, _ in records) + 1
        index = {k: row for row, k in enumerate(steps)}
        trajectory = np.zeros((len(steps), dim))
        for k, component, value in records:
            trajectory[index[k], component] = value
        return trajectory
