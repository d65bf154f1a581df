"""
Tests for problem-file parsing and name resolution.
"""

import json
import os
import tempfile

import pytest

from errors import InputError
from gauges import PairPotential, PointPotential
from metric_core import MultiValuedMap, SingleValuedMap
from problem_file import Problem, parse_problem

EXAMPLE = {
    "space": {"line": [0, 1, 3]},
    "maps": {
        "T": {"0": "0", "1": "0", "3": "1"},
        "M": {"0": ["0"], "1": ["0", "1"], "3": ["1"]},
    },
    "gauges": {"half": {"kind": "banach", "params": {"alpha": 0.5}}},
    "potentials": {
        "phi": {"values": {"0": 0, "1": 2, "3": 6}},
        "Phi": {"matrix": [[0, 4, 12], [4, 0, 8], [12, 8, 0]]},
    },
    "sets": {"A": ["0", "1"]},
    "bellman": {
        "states": ["w"],
        "decisions": ["y"],
        "reward": [[1.0]],
        "transition": [[0]],
        "aggregator": {"form": "affine", "params": {"c": 0.0, "beta": 0.5}},
    },
}


def load(data) -> Problem:
    return Problem.from_bytes(json.dumps(data).encode())


def with_change(path, value):
    data = json.loads(json.dumps(EXAMPLE))
    node = data
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value
    return data


class TestParse:
    """Test decoding and schema validation."""

    def test_example_parses(self):
        """The example file validates."""
        model = parse_problem(json.dumps(EXAMPLE).encode())
        assert model.space.line == [0, 1, 3]
        assert model.gauges["half"].kind == "banach"

    def test_bad_json(self):
        """Decode errors carry line and column."""
        with pytest.raises(InputError, match=r"<input>:1:\d+"):
            parse_problem(b'{"space": ')

    def test_unknown_key(self):
        """Unknown top-level keys are rejected with their location."""
        with pytest.raises(InputError, match="spaces"):
            parse_problem(json.dumps({"spaces": {}}).encode())

    def test_space_sources(self):
        """Exactly one of dist or line."""
        with pytest.raises(InputError, match="^space"):
            parse_problem(json.dumps({"space": {"line": [0, 1], "dist": [[0, 1], [1, 0]]}}).encode())

    def test_from_path(self):
        """Files are read from disk; missing files are input errors."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "problem.json")
            with open(path, "w") as f:
                json.dump(EXAMPLE, f)
            assert Problem.from_path(path).space().n == 3
            with pytest.raises(InputError):
                Problem.from_path(os.path.join(tmpdir, "missing.json"))


class TestResolve:
    """Test resolution of named objects."""

    def test_space_from_matrix(self):
        """A dist block with labels builds the space."""
        problem = load({"space": {"labels": ["a", "b"], "dist": [[0, 2], [2, 0]]}})
        assert problem.space().labels == ("a", "b")

    def test_single_valued_map(self):
        """Label-to-label maps are single-valued, in label order."""
        T = load(EXAMPLE).map("T")
        assert isinstance(T, SingleValuedMap)
        assert T.image == (0, 0, 1)

    def test_multivalued_map(self):
        """Label-to-list maps are set-valued."""
        M = load(EXAMPLE).map("M")
        assert isinstance(M, MultiValuedMap)
        assert M(1).members == (0, 1)

    def test_mixed_map(self):
        """Mixing labels and lists is refused."""
        problem = load(with_change(["maps", "T", "3"], ["1"]))
        with pytest.raises(InputError, match="maps.T"):
            problem.map("T")

    def test_missing_image(self):
        """Maps must be total."""
        data = with_change(["maps", "T"], {"0": "0", "1": "0"})
        with pytest.raises(InputError, match="no image for point '3'"):
            load(data).map("T")

    def test_unknown_image_label(self):
        """Images must be labels of the space."""
        with pytest.raises(InputError, match="maps.T"):
            load(with_change(["maps", "T", "3"], "7")).map("T")

    def test_dangling_name(self):
        """Unknown names list the known ones."""
        with pytest.raises(InputError, match=r"gauges.nope: no such entry \(known: half\)"):
            load(EXAMPLE).gauge("nope")

    def test_gauge(self):
        """Gauges are labelled with their name."""
        gauge = load(EXAMPLE).gauge("half")
        assert gauge.eval(2.0) == 1.0
        assert gauge.label == "half"

    def test_bad_gauge_params(self):
        """Gauge errors are located."""
        data = with_change(["gauges", "half", "params"], {"alpha": 1.5})
        with pytest.raises(InputError, match="gauges.half"):
            load(data).gauge("half")

    def test_potentials(self):
        """Point and pair potentials resolve to their types."""
        problem = load(EXAMPLE)
        phi = problem.potential("phi")
        assert isinstance(phi, PointPotential)
        assert list(phi.values) == [0.0, 2.0, 6.0]
        assert isinstance(problem.potential("Phi"), PairPotential)

    def test_potential_missing_label(self):
        """Point potentials must cover the space."""
        data = with_change(["potentials", "phi", "values"], {"0": 0, "1": 2})
        with pytest.raises(InputError, match="potentials.phi"):
            load(data).potential("phi")

    def test_point_sets(self):
        """Named sets and comma lists both resolve."""
        problem = load(EXAMPLE)
        assert problem.point_set("A").members == (0, 1)
        assert problem.point_set("3, 0").members == (0, 2)
        with pytest.raises(InputError):
            problem.point_set("")

    def test_bellman_problem(self):
        """The bellman block builds a problem."""
        bp = load(EXAMPLE).bellman_problem()
        assert bp.n_states == 1
        assert bp.aggregator.form == "affine"

    def test_bad_transition(self):
        """Out-of-range transitions are located in the bellman block."""
        data = with_change(["bellman", "transition"], [[3]])
        with pytest.raises(InputError, match=r"bellman: transition\[0\]\[0\]"):
            load(data).bellman_problem()

    def test_no_space(self):
        """Commands needing a space fail cleanly without one."""
        with pytest.raises(InputError, match="^space"):
            load({"bellman": EXAMPLE["bellman"]}).space()
