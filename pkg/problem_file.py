"""JSON problem files: pydantic models plus name resolution into library objects."""

import json
from contextlib import contextmanager
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from bellman import BellmanProblem, make_aggregator
from errors import InputError
from gauges import Gauge, PairPotential, PointPotential, make_gauge
from metric_core import FiniteMetricSpace, MultiValuedMap, PointSet, SingleValuedMap


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SpaceModel(_Model):
    labels: list[str] | None = None
    dist: list[list[float]] | None = None
    # points on the real line, d(x, y) = |x - y|
    line: list[float] | None = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.dist is None) == (self.line is None):
            raise ValueError("give exactly one of 'dist' or 'line'")
        return self


class GaugeModel(_Model):
    kind: str
    params: dict[str, float] = Field(default_factory=dict)
    table: list[tuple[float, float]] | None = None


class PotentialModel(_Model):
    # point potential phi(x) by label, or a pair potential Phi(x, y) in label order
    values: dict[str, float] | None = None
    matrix: list[list[float]] | None = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.values is None) == (self.matrix is None):
            raise ValueError("give exactly one of 'values' or 'matrix'")
        return self


class AggregatorModel(_Model):
    form: str
    params: dict[str, Any] = Field(default_factory=dict)


class BellmanModel(_Model):
    states: list[str]
    decisions: list[str]
    reward: list[list[float]]
    transition: list[list[int]]
    aggregator: AggregatorModel


class ProblemFile(_Model):
    space: SpaceModel | None = None
    maps: dict[str, dict[str, str | list[str]]] = Field(default_factory=dict)
    gauges: dict[str, GaugeModel] = Field(default_factory=dict)
    potentials: dict[str, PotentialModel] = Field(default_factory=dict)
    sets: dict[str, list[str]] = Field(default_factory=dict)
    bellman: BellmanModel | None = None


@contextmanager
def located(location: str):
    """Prefix InputErrors raised inside the block with a problem-file location."""
    try:
        yield
    except InputError as e:
        raise InputError(f"{location}: {e}") from e


def validation_message(e: ValidationError) -> str:
    err = e.errors()[0]
    loc = ".".join(str(part) for part in err["loc"]) or "<root>"
    return f"{loc}: {err['msg']}"


def parse_problem(data: bytes, source: str = "<input>") -> ProblemFile:
    """Decode and validate; every failure becomes an InputError with a location."""
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"{source}: not UTF-8 text: {e}") from e
    try:
        return ProblemFile.model_validate(raw)
    except ValidationError as e:
        raise InputError(validation_message(e)) from e


class Problem:
    """A validated problem file with lazily built, name-resolved objects."""

    def __init__(self, model: ProblemFile):
        self.model = model
        self._space: FiniteMetricSpace | None = None

    @classmethod
    def from_bytes(cls, data: bytes, source: str = "<input>") -> "Problem":
        return cls(parse_problem(data, source))

    @classmethod
    def from_path(cls, path: str) -> "Problem":
        try:
            with open(path, "rb") as f:
                data = f.read()
        except OSError as e:
            raise InputError(f"{path}: {e.strerror}") from e
        return cls.from_bytes(data, path)

    def space(self) -> FiniteMetricSpace:
        if self._space is None:
            spec = self.model.space
            if spec is None:
                raise InputError("space: the problem file has no space block")
            with located("space"):
                if spec.line is not None:
                    self._space = FiniteMetricSpace.on_line(spec.line, spec.labels)
                else:
                    self._space = FiniteMetricSpace.from_matrix(spec.dist, spec.labels)
        return self._space

    def _lookup(self, section: str, table: dict, name: str):
        if name not in table:
            known = ", ".join(sorted(table)) or "none"
            raise InputError(f"{section}.{name}: no such entry (known: {known})")
        return table[name]

    def map(self, name: str) -> SingleValuedMap | MultiValuedMap:
        entry = self._lookup("maps", self.model.maps, name)
        space = self.space()
        with located(f"maps.{name}"):
            missing = [label for label in space.labels if label not in entry]
            if missing:
                raise InputError(f"no image for point {missing[0]!r}")
            for label in entry:
                space.index(label)
            images = [entry[label] for label in space.labels]
            if all(isinstance(v, str) for v in images):
                return SingleValuedMap(tuple(space.index(v) for v in images)).check_in(space)
            if all(isinstance(v, list) for v in images):
                return MultiValuedMap(tuple(space.point_set_from_labels(v) for v in images)).check_in(space)
            raise InputError("images must be all labels (single-valued) or all lists (multi-valued)")

    def gauge(self, name: str) -> Gauge:
        entry = self._lookup("gauges", self.model.gauges, name)
        with located(f"gauges.{name}"):
            return make_gauge(entry.kind, entry.params, table=entry.table, label=name)

    def potential(self, name: str) -> PointPotential | PairPotential:
        entry = self._lookup("potentials", self.model.potentials, name)
        space = self.space()
        with located(f"potentials.{name}"):
            if entry.values is not None:
                for label in entry.values:
                    space.index(label)
                missing = [label for label in space.labels if label not in entry.values]
                if missing:
                    raise InputError(f"no value for point {missing[0]!r}")
                return PointPotential(tuple(entry.values[label] for label in space.labels), label=name)
            pair = PairPotential(entry.matrix, label=name)
            if pair.matrix.shape[0] != space.n:
                raise InputError(f"matrix is {pair.matrix.shape[0]}x{pair.matrix.shape[0]}, space has {space.n} points")
            return pair

    def point_set(self, spec: str) -> PointSet:
        """Resolve a named set, or a comma-separated list of labels."""
        space = self.space()
        if spec in self.model.sets:
            with located(f"sets.{spec}"):
                return space.point_set_from_labels(self.model.sets[spec])
        labels = [s.strip() for s in spec.split(",") if s.strip()]
        with located(f"set {spec!r}"):
            return space.point_set_from_labels(labels)

    def bellman_problem(self) -> BellmanProblem:
        spec = self.model.bellman
        if spec is None:
            raise InputError("bellman: the problem file has no bellman block")
        with located("bellman.aggregator"):
            aggregator = make_aggregator(spec.aggregator.form, spec.aggregator.params)
        with located("bellman"):
            return BellmanProblem(
                states=tuple(spec.states),
                decisions=tuple(spec.decisions),
                reward=spec.reward,
                transition=spec.transition,
                aggregator=aggregator,
            )
