import math
from typing import Dict

from pydantic import BaseModel, ConfigDict, Field, model_validator

from heatnet.core.exceptions import DiscretizationError
from heatnet.network.graph import Network, PipeArc
from heatnet.schemas.enums import MixingModel, Scheme


class Discretization(BaseModel):
    """
    Equidistant space-time grid: t_i = iT/N and x_{a,k} = kL_a/M_a.

    ``cells`` holds M_a per pipe id.
    """
    model_config = ConfigDict(frozen=True)

    horizon: float = Field(gt=0)
    steps: int = Field(ge=1)
    cells: Dict[str, int]
    scheme: Scheme = Scheme.IMPLICIT
    mixing: MixingModel = MixingModel.NLP

    @model_validator(mode="after")
    def _positive_cells(self) -> "Discretization":
        for pipe_id, m in self.cells.items():
            if m < 1:
                raise ValueError(f"pipe {pipe_id}: need at least one cell, got {m}")
        return self

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def dt_hours(self) -> float:
        return self.dt / 3600.0

    def time(self, i: int) -> float:
        return i * self.horizon / self.steps

    def cells_of(self, pipe: PipeArc) -> int:
        try:
            return self.cells[pipe.id]
        except KeyError:
            raise DiscretizationError(f"no cell count for pipe '{pipe.id}'", key=pipe.id) from None

    def dx(self, pipe: PipeArc) -> float:
        return pipe.length / self.cells_of(pipe)

    @classmethod
    def build(
        cls,
        network: Network,
        horizon: float,
        dt: float,
        dx: float,
        scheme: Scheme = Scheme.IMPLICIT,
        mixing: MixingModel = MixingModel.NLP,
    ) -> "Discretization":
        """Grid from step sizes; Δt must divide T, M_a = ceil(L_a / Δx)"""
        if dt <= 0 or dx <= 0:
            raise DiscretizationError(f"step sizes must be positive (dt={dt}, dx={dx})")
        ratio = horizon / dt
        steps = int(round(ratio))
        if steps < 1 or abs(steps - ratio) > 1e-9 * max(ratio, 1.0):
            raise DiscretizationError(f"dt={dt} s does not divide the horizon {horizon} s", key="dt")
        cells = {p.id: max(1, math.ceil(p.length / dx - 1e-9)) for p in network.pipes}
        return cls(horizon=horizon, steps=steps, cells=cells, scheme=scheme, mixing=mixing)

    @classmethod
    def uniform(
        cls,
        network: Network,
        horizon: float,
        steps: int,
        cells: int = 1,
        scheme: Scheme = Scheme.IMPLICIT,
        mixing: MixingModel = MixingModel.NLP,
    ) -> "Discretization":
        return cls(
            horizon=horizon,
            steps=steps,
            cells={p.id: cells for p in network.pipes},
            scheme=scheme,
            mixing=mixing,
        )
