"""
Tests for the command-line interface: exit codes, error JSON and written
artifacts.
"""

import copy
import json

import pandas as pd
import pytest

from heatnet.assemble.discretization import Discretization
from heatnet.assemble.scenario import Scenario
from heatnet.cli import EXIT_INVALID_INPUT, EXIT_OK, main
from heatnet.control.state import ControlTrajectory, StateSnapshot
from heatnet.network.loader import dump_network, load_network
from heatnet.services.reporting import timeseries_frame
from heatnet.services.synthetic import aroma_like


def _last_json(capsys):
    lines = [line for line in capsys.readouterr().out.splitlines() if line.strip()]
    return json.loads(lines[-1])


@pytest.mark.unit
@pytest.mark.cli
class TestGenerate:
    """Test the generate command."""

    def test_aroma_like(self, tmp_path, capsys):
        """Test that network and scenario files are written and load back."""
        code = main(["generate", "--kind", "aroma_like", "--seed", "0", "--out", str(tmp_path)])
        assert code == EXIT_OK
        paths = _last_json(capsys)
        network = load_network(paths["network"])
        assert len(network.nodes) == 18
        assert len(network.consumers) == 5
        scenario = json.loads((tmp_path / "scenario.json").read_text())
        assert scenario["synthetic"] is True
        assert len(scenario["demands"]) == 5

    def test_tree(self, tmp_path):
        """Test the tree size option."""
        assert main(["generate", "--kind", "tree", "--size", "2", "--out", str(tmp_path)]) == EXIT_OK
        assert len(load_network(tmp_path / "network.json").pipes) == 4

    def test_unknown_kind(self, tmp_path, capsys):
        """Test that an invalid choice is a usage error."""
        code = main(["generate", "--kind", "ring", "--out", str(tmp_path)])
        assert code == EXIT_INVALID_INPUT
        assert _last_json(capsys)["error"] == "UsageError"


@pytest.mark.unit
@pytest.mark.cli
class TestPresolve:
    """Test the presolve command."""

    def test_fixing_written(self, tmp_path, capsys):
        """Test the summary line and fixing.json for the AROMA-like network."""
        dump_network(aroma_like(seed=0), tmp_path / "network.json")
        code = main(["presolve", "--network", str(tmp_path / "network.json"), "--out", str(tmp_path)])
        assert code == EXIT_OK
        summary = _last_json(capsys)
        assert summary["fixed"] == 6
        assert summary["pipes"] == 18
        fixing = json.loads((tmp_path / "fixing.json").read_text())
        assert fixing["presolve"] is True
        assert {"pf0", "pb0", "pf7", "pb7", "pf8", "pb8"} <= set(fixing["pos"])
        assert fixing["neg"] == []
        assert len(fixing["undecided"]) == 12

    def test_malformed_network(self, tmp_path, capsys, minimal_document):
        """Test exit code 2 and the key path in the error JSON."""
        doc = copy.deepcopy(minimal_document)
        del doc["pipes"][1]["diameter"]
        (tmp_path / "network.json").write_text(json.dumps(doc))
        code = main(["presolve", "--network", str(tmp_path / "network.json"), "--out", str(tmp_path)])
        assert code == EXIT_INVALID_INPUT
        error = _last_json(capsys)
        assert error["error"] == "NetworkValidationError"
        assert error["key"] == "pipes.1.diameter"
        assert json.loads((tmp_path / "error.json").read_text()) == error

    def test_missing_file(self, tmp_path, capsys):
        """Test that an unreadable input is invalid input, not a crash."""
        code = main(["presolve", "--network", str(tmp_path / "absent.json"), "--out", str(tmp_path)])
        assert code == EXIT_INVALID_INPUT
        assert "cannot read" in _last_json(capsys)["message"]


@pytest.mark.unit
@pytest.mark.cli
class TestRunOptions:
    """Test argument validation of the run command."""

    def test_missing_required(self, capsys):
        """Test that a missing --network is a usage error."""
        assert main(["run", "--scenario", "s.json"]) == EXIT_INVALID_INPUT
        assert _last_json(capsys)["error"] == "UsageError"

    def test_malformed_solver_option(self, capsys):
        """Test that a solver option needs KEY=VALUE."""
        code = main(["run", "--network", "n.json", "--scenario", "s.json", "--solver-option", "kkt_tol"])
        assert code == EXIT_INVALID_INPUT

    def test_unknown_solver_option(self, tmp_path, capsys):
        """Test that an unknown solver parameter is rejected before any solve."""
        code = main(["run", "--network", "n.json", "--scenario", "s.json", "--out", str(tmp_path),
                     "--solver-option", "tolerance=1e-8"])
        assert code == EXIT_INVALID_INPUT
        assert _last_json(capsys)["key"] == "solver_option"

    def test_ic_only_and_skip_ic_exclusive(self, capsys):
        """Test the mutually exclusive phase switches."""
        code = main(["run", "--network", "n.json", "--scenario", "s.json", "--ic-only", "--skip-ic"])
        assert code == EXIT_INVALID_INPUT

    def test_dt_must_divide_horizon(self, tmp_path, capsys):
        """Test the discretization error of a run."""
        main(["generate", "--kind", "tree", "--size", "1", "--out", str(tmp_path)])
        capsys.readouterr()
        code = main(["run", "--network", str(tmp_path / "network.json"),
                     "--scenario", str(tmp_path / "scenario.json"), "--out", str(tmp_path), "--dt", "7000"])
        assert code == EXIT_INVALID_INPUT
        assert _last_json(capsys)["error"] == "DiscretizationError"


@pytest.mark.integration
@pytest.mark.slow
@pytest.mark.cli
class TestRun:
    """Test complete runs on a small tree network."""

    def _inputs(self, tmp_path):
        main(["generate", "--kind", "tree", "--size", "1", "--out", str(tmp_path)])
        return ["--network", str(tmp_path / "network.json"), "--scenario", str(tmp_path / "scenario.json"),
                "--out", str(tmp_path / "run"), "--dt", "43200", "--dx", "200"]

    def test_ic_only(self, tmp_path):
        """Test that an IC-only report has no full-horizon timing."""
        code = main(["run", *self._inputs(tmp_path), "--ic-only"])
        assert code == EXIT_OK
        report = json.loads((tmp_path / "run" / "report.json").read_text())
        assert "t_nlp" not in report
        assert report["time_steps"] == 2
        assert report["ic_steps"] >= 2
        assert "t_stat" in report
        frame = pd.read_csv(tmp_path / "run" / "timeseries.csv")
        assert list(frame.columns) == ["time", "P_w", "P_g", "P_p", "demand", "outlet_temperature", "mass_flow"]
        assert list(frame["time"]) == [0.0, 43200.0, 86400.0]

    def test_full_run(self, tmp_path):
        """Test the artifacts of a full run warm-started from the stationary state."""
        code = main(["run", *self._inputs(tmp_path), "--skip-ic", "--dump-model", str(tmp_path / "model.txt")])
        assert code == EXIT_OK
        out = tmp_path / "run"
        report = json.loads((out / "report.json").read_text())
        assert "t_nlp" in report
        assert "t_ic" not in report
        assert report["presolve"] is True
        trajectory = json.loads((out / "trajectory.json").read_text())
        assert len(trajectory["snapshots"]) == 3
        assert (out / "fixing.json").exists()
        assert (tmp_path / "model.txt").read_text().strip()


@pytest.mark.unit
@pytest.mark.cli
class TestTimeseries:
    """Test the time series table written next to the report."""

    def _trajectory(self, network, steps):
        depot = network.depot.id
        values = {("P_w",): 1e3, ("P_g",): 0.0, ("P_p",): 10.0, ("theta_head", depot): 360.0, ("q", depot): 2.0}
        return ControlTrajectory([StateSnapshot(i, dict(values)) for i in range(steps + 1)])

    def test_without_consumer_series(self, minimal_network, costs):
        """Test a zero demand column when the scenario has no demand series."""
        disc = Discretization.uniform(minimal_network, horizon=3600.0, steps=2)
        scenario = Scenario(name="empty", horizon=3600.0, demands={}, costs=costs)
        frame = timeseries_frame(minimal_network, scenario, disc, self._trajectory(minimal_network, 2))
        assert list(frame["demand"]) == [0.0, 0.0, 0.0]
        assert list(frame["time"]) == [0.0, 1800.0, 3600.0]

    def test_demand_column(self, minimal_network, costs):
        """Test that the demand column sums the consumer series."""
        disc = Discretization.uniform(minimal_network, horizon=3600.0, steps=2)
        scenario = Scenario(name="steps", horizon=3600.0, demands={"c": (1e3, 2e3, 3e3)}, costs=costs)
        frame = timeseries_frame(minimal_network, scenario, disc, self._trajectory(minimal_network, 2))
        assert list(frame["demand"]) == [1e3, 2e3, 3e3]
        assert list(frame.columns) == ["time", "P_w", "P_g", "P_p", "demand", "outlet_temperature", "mass_flow"]
