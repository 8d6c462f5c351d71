"""
Unit tests for the network data model, loader and pipe physics.

Tests cover document parsing and validation errors with key paths,
incidence sets, friction factor and cross section formulas.
"""

import copy
import json
import math

import pytest

from heatnet.core.exceptions import NetworkValidationError, UnknownNodeError
from heatnet.network.loader import dump_network, load_network, network_to_document, parse_network
from heatnet.network.physics import area, cross_section, friction_factor, nikuradse
from heatnet.schemas.enums import Side


@pytest.mark.unit
@pytest.mark.network
class TestParseNetwork:
    """Test parsing and validating network documents."""

    def test_minimal_document(self, minimal_network):
        """Test the smallest legal topology."""
        assert len(minimal_network.nodes) == 4
        assert len(minimal_network.arcs) == 4
        assert minimal_network.counts()["consumers"] == 1

    def test_defaults_applied(self, minimal_network):
        """Test default node bounds and fluid constants."""
        node = minimal_network.node("f0")
        assert node.temperature_bounds == (273.15, 473.15)
        assert node.pressure_bounds == (1e5, 25e5)
        assert minimal_network.fluid.density == 997.0
        assert math.isinf(minimal_network.depot.max_waste_power)

    def test_depot_tail_on_forward_side(self, minimal_document):
        """Test side-rule violation for a depot leaving the forward side."""
        doc = copy.deepcopy(minimal_document)
        doc["depot"]["from"] = "f1"
        doc["depot"]["to"] = "f0"
        with pytest.raises(NetworkValidationError, match="side-rule violation") as exc:
            parse_network(doc)
        assert exc.value.key == "depot"

    def test_pipe_across_sides(self, minimal_document):
        """Test side-rule violation for a pipe joining both sides."""
        doc = copy.deepcopy(minimal_document)
        doc["pipes"][0]["to"] = "b1"
        with pytest.raises(NetworkValidationError, match="side-rule violation"):
            parse_network(doc)

    def test_missing_field_reports_key_path(self, minimal_document):
        """Test that a schema error names the offending key."""
        doc = copy.deepcopy(minimal_document)
        del doc["pipes"][1]["diameter"]
        with pytest.raises(NetworkValidationError) as exc:
            parse_network(doc)
        assert exc.value.key == "pipes.1.diameter"

    def test_unknown_key_rejected(self, minimal_document):
        """Test that unknown keys are rejected."""
        doc = copy.deepcopy(minimal_document)
        doc["pipes"][0]["colour"] = "red"
        with pytest.raises(NetworkValidationError) as exc:
            parse_network(doc)
        assert exc.value.key == "pipes.0.colour"

    def test_two_depots(self, minimal_document):
        """Test that more than one depot arc is rejected."""
        doc = copy.deepcopy(minimal_document)
        second = dict(doc["depot"], id="depot2")
        doc["depot"] = [doc["depot"], second]
        with pytest.raises(NetworkValidationError, match="exactly one depot"):
            parse_network(doc)

    def test_unknown_endpoint(self, minimal_document):
        """Test an arc that references a missing node."""
        doc = copy.deepcopy(minimal_document)
        doc["consumers"][0]["to"] = "b9"
        with pytest.raises(NetworkValidationError, match="unknown node") as exc:
            parse_network(doc)
        assert exc.value.key == "c"

    def test_disconnected(self, minimal_document):
        """Test that a disconnected graph is rejected."""
        doc = copy.deepcopy(minimal_document)
        doc["nodes"] += [{"id": "f8", "side": "forward_flow"}, {"id": "f9", "side": "forward_flow"}]
        doc["pipes"].append(
            {"id": "px", "from": "f8", "to": "f9", "length": 10.0, "diameter": 0.1,
             "roughness": 1e-4, "heat_transfer": 1.0}
        )
        with pytest.raises(NetworkValidationError, match="not connected"):
            parse_network(doc)

    def test_isolated_node(self, minimal_document):
        """Test that a node without arcs is rejected."""
        doc = copy.deepcopy(minimal_document)
        doc["nodes"].append({"id": "f9", "side": "forward_flow"})
        with pytest.raises(NetworkValidationError, match="no incident arc") as exc:
            parse_network(doc)
        assert exc.value.key == "f9"

    def test_consumer_inlet_below_return(self, minimal_document):
        """Test that the minimum inlet temperature must exceed the return temperature."""
        doc = copy.deepcopy(minimal_document)
        doc["consumers"][0]["min_inlet_temp"] = 320.0
        with pytest.raises(NetworkValidationError):
            parse_network(doc)

    def test_input_order_irrelevant(self, minimal_document):
        """Test that dense indices do not depend on document order."""
        doc = copy.deepcopy(minimal_document)
        doc["nodes"].reverse()
        doc["pipes"].reverse()
        a = parse_network(minimal_document)
        b = parse_network(doc)
        assert a.node_index == b.node_index
        assert a.arc_index == b.arc_index

    def test_json_text_input(self, minimal_document):
        """Test parsing from JSON text."""
        network = parse_network(json.dumps(minimal_document))
        assert network.node("b1").side is Side.BACKWARD

    def test_document_round_trip(self, minimal_network, tmp_path):
        """Test writing a network and loading it back."""
        path = tmp_path / "net.json"
        dump_network(minimal_network, path)
        loaded = load_network(path)
        assert network_to_document(loaded) == network_to_document(minimal_network)
        assert loaded.name == "net"

    def test_aroma_like_counts(self, aroma_network):
        """Test the synthetic AROMA-like topology statistics."""
        counts = aroma_network.counts()
        assert counts["nodes"] == 18
        assert counts["arcs"] == 24
        assert counts["pipes"] == 18
        assert counts["consumers"] == 5


@pytest.mark.unit
@pytest.mark.network
class TestIncidence:
    """Test δ-sets of nodes."""

    def test_depot_head(self, minimal_network):
        """Test that the depot arc enters its head."""
        delta_in, delta_out = minimal_network.incidence("f0")
        assert "depot" in delta_in
        assert delta_out == {"pf"}

    def test_sets_disjoint(self, aroma_network):
        """Test that incoming and outgoing sets are disjoint."""
        for node in aroma_network.nodes:
            delta_in, delta_out = aroma_network.incidence(node.id)
            assert not delta_in & delta_out

    def test_totals(self, aroma_network):
        """Test that in- and out-degrees both sum to the arc count."""
        total_in = sum(len(aroma_network.incidence(n.id)[0]) for n in aroma_network.nodes)
        total_out = sum(len(aroma_network.incidence(n.id)[1]) for n in aroma_network.nodes)
        assert total_in == total_out == len(aroma_network.arcs)

    def test_junction_degree(self, aroma_network):
        """Test a cycle junction with three incident pipes."""
        delta_in, delta_out = aroma_network.incidence("f3")
        pipes = {a for a in delta_in | delta_out if a.startswith("p")}
        assert len(pipes) == 3

    def test_unknown_node(self, minimal_network):
        """Test lookup of a missing node."""
        with pytest.raises(UnknownNodeError):
            minimal_network.incidence("nowhere")


@pytest.mark.unit
@pytest.mark.network
class TestPhysics:
    """Test friction factor and cross section."""

    def test_friction_reference_value(self):
        """Test λ for D=0.1 m and k=1e-4 m."""
        assert nikuradse(0.1, 1e-4) == pytest.approx(0.019627, rel=1e-4)

    def test_friction_ratio_ten(self):
        """Test λ for D/k = 10."""
        assert nikuradse(1.0, 0.1) == pytest.approx((2 + 1.138) ** -2, rel=1e-12)

    def test_friction_identity_case(self):
        """Test λ = 1 where the log term equals 1 - 1.138."""
        ratio = 10 ** ((1 - 1.138) / 2)
        assert nikuradse(ratio, 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_friction_monotone(self):
        """Test that λ decreases with D/k."""
        ratios = [1.5, 3.0, 10.0, 100.0, 1e3, 1e4]
        values = [nikuradse(r, 1.0) for r in ratios]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_friction_rejects_nonpositive(self):
        """Test nonpositive diameter and roughness."""
        with pytest.raises(NetworkValidationError):
            nikuradse(0.0, 1e-4)
        with pytest.raises(NetworkValidationError):
            nikuradse(0.1, -1.0)

    def test_friction_outside_domain(self):
        """Test D/k at or below the domain limit."""
        with pytest.raises(NetworkValidationError, match="Nikuradse domain"):
            nikuradse(0.1, 1.0)

    def test_friction_of_pipe(self, minimal_network):
        """Test the pipe-level helper."""
        assert friction_factor(minimal_network.arc("pf")) == pytest.approx(0.019627, rel=1e-4)

    def test_cross_section(self, minimal_network):
        """Test A = π(D/2)²."""
        assert area(0.2) == pytest.approx(0.0314159, rel=1e-5)
        assert area(2 / math.sqrt(math.pi)) == pytest.approx(1.0)
        assert cross_section(minimal_network.arc("pf")) == pytest.approx(math.pi * 0.05 ** 2)

    def test_cross_section_zero_diameter(self):
        """Test that D=0 is rejected."""
        with pytest.raises(NetworkValidationError):
            area(0.0)
