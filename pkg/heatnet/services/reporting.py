"""Output artifacts of a run: report, time series, fixing, trajectory"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

from heatnet.assemble.discretization import Discretization
from heatnet.assemble.scenario import Scenario
from heatnet.control.state import ControlTrajectory
from heatnet.core.exceptions import HeatNetError
from heatnet.network.graph import Network
from heatnet.presolve.directions import DirectionFixing
from heatnet.schemas.report import SolveReport

logger = logging.getLogger(__name__)

TIMESERIES_COLUMNS = ["time", "P_w", "P_g", "P_p", "demand", "outlet_temperature", "mass_flow"]

PathLike = Union[str, Path]


def write_json(data: Any, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return path


def write_report(report: SolveReport, path: PathLike) -> Path:
    return write_json(report.model_dump(mode="json", exclude_none=True), path)


def timeseries_frame(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    trajectory: ControlTrajectory,
) -> pd.DataFrame:
    """Depot controls, aggregated demand, outlet temperature and mass flow per time point"""
    depot = network.depot.id
    demand = scenario.aggregated_demand()
    if demand.size == 0:
        # no consumer series: nothing is withdrawn
        demand = np.zeros(len(trajectory))
    frame = pd.DataFrame(
        {
            "time": [disc.time(s.time_index) for s in trajectory.snapshots],
            "P_w": trajectory.series(("P_w",)),
            "P_g": trajectory.series(("P_g",)),
            "P_p": trajectory.series(("P_p",)),
            "demand": demand[: len(trajectory)],
            "outlet_temperature": trajectory.series(("theta_head", depot)),
            "mass_flow": trajectory.series(("q", depot)),
        },
        columns=TIMESERIES_COLUMNS,
    )
    return frame


def write_timeseries(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, sep=",", float_format="%.6f", lineterminator="\n")
    return path


def write_fixing(fixing: DirectionFixing, path: PathLike, presolved: bool = True) -> Path:
    data: Dict[str, Any] = {"presolve": presolved, **fixing.to_summary()}
    return write_json(data, path)


def write_trajectory(trajectory: ControlTrajectory, path: PathLike) -> Path:
    return write_json(trajectory.to_document(), path)


def load_trajectory(path: PathLike) -> ControlTrajectory:
    return ControlTrajectory.from_document(json.loads(Path(path).read_text(encoding="utf-8")))


def write_error(error: HeatNetError, out_dir: PathLike) -> Path:
    return write_json(error.to_dict(), Path(out_dir) / "error.json")
