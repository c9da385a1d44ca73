"""Scenario file I/O.

Scenarios are JSON with every complex entry written as a two-element
``[re, im]`` array, which keeps files unambiguous and locale-independent:

    {
      "system": {
        "factors": [["S", 2]],
        "state": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
        "hamiltonian": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
        "t0": 0.0
      },
      "events": [
        {"time": 1.0, "detector": "F", "targets": ["S"],
         "kraus": [{"outcome": "up",   "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]},
                   {"outcome": "down", "matrix": [[[0,0],[0,0]],[[0,0],[1,0]]]}]}
      ],
      "queries": [
        {"t": 3.0, "assignment": {"F": "up"}},
        {"t": 3.0, "full_table": true},
        {"t": 3.0, "target": {"F": "up"}, "given": {"W": "yes"}}
      ]
    }

Hermiticity, Kraus completeness, schedule ordering, and all dimensions are
validated on load; failures name the offending key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hilbert import (
    LayoutError,
    Operator,
    StateVector,
    SubsystemLayout,
    TOL_EQUALITY,
)
from .instrument import DetectorModel, KrausSet, validate
from .timeline import EventSchedule, ScheduleError


class ScenarioError(ValueError):
    """Scenario content is invalid; the message names the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class Query:
    t: float
    mode: str  # "assignment" | "conditional" | "table"
    assignment: dict = field(default_factory=dict)
    target: dict = field(default_factory=dict)
    given: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    psi0: StateVector
    t0: float
    h_system: Operator
    schedule: EventSchedule
    queries: tuple[Query, ...]


def _complex_scalar(value, key: str) -> complex:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise ScenarioError(key, "complex entries must be [re, im] pairs")
    re, im = value
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
        raise ScenarioError(key, "complex entries must be [re, im] pairs of numbers")
    return complex(float(re), float(im))


def _complex_vector(values, key: str) -> np.ndarray:
    if not isinstance(values, list):
        raise ScenarioError(key, "expected a list of [re, im] pairs")
    return np.array([_complex_scalar(v, f"{key}[{i}]") for i, v in enumerate(values)])


def _complex_matrix(values, key: str) -> np.ndarray:
    if not isinstance(values, list) or not values:
        raise ScenarioError(key, "expected a non-empty list of rows")
    rows = [_complex_vector(row, f"{key}[{i}]") for i, row in enumerate(values)]
    widths = {row.size for row in rows}
    if len(widths) != 1:
        raise ScenarioError(key, "rows have inconsistent lengths")
    return np.array(rows)


def _require(mapping, key: str, context: str):
    if not isinstance(mapping, dict):
        raise ScenarioError(context, "expected an object")
    if key not in mapping:
        raise ScenarioError(f"{context}.{key}" if context else key, "missing required key")
    return mapping[key]


def _str_map(value, key: str) -> dict[str, str]:
    if not isinstance(value, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in value.items()
    ):
        raise ScenarioError(key, "expected an object mapping detector names to outcome labels")
    return dict(value)


def _parse_system(data) -> tuple[StateVector, Operator, float | None]:
    factors = _require(data, "factors", "system")
    if not isinstance(factors, list) or not factors:
        raise ScenarioError("system.factors", "expected a non-empty list of [label, dim] pairs")
    pairs = []
    for i, item in enumerate(factors):
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], str)):
            raise ScenarioError(f"system.factors[{i}]", "expected a [label, dim] pair")
        pairs.append((item[0], int(item[1])))
    try:
        layout = SubsystemLayout(tuple(pairs))
    except LayoutError as err:
        raise ScenarioError("system.factors", str(err)) from None

    amps = _complex_vector(_require(data, "state", "system"), "system.state")
    if amps.size != layout.dim:
        raise ScenarioError(
            "system.state", f"length {amps.size} does not match system dimension {layout.dim}"
        )
    norm = float(np.linalg.norm(amps))
    if norm < 1e-9:
        raise ScenarioError("system.state", "state vector has (near-)zero norm")
    # Normalize only when needed so canonical files round-trip bit-identically.
    if abs(norm - 1.0) > TOL_EQUALITY:
        amps = amps / norm
    psi0 = StateVector(layout, amps)

    h_matrix = _complex_matrix(_require(data, "hamiltonian", "system"), "system.hamiltonian")
    if h_matrix.shape != (layout.dim, layout.dim):
        raise ScenarioError(
            "system.hamiltonian",
            f"shape {h_matrix.shape} does not match system dimension {layout.dim}",
        )
    h_system = Operator(layout, h_matrix)
    if not h_system.is_hermitian():
        raise ScenarioError("system.hamiltonian", "matrix is not Hermitian (tolerance 1e-10)")

    t0 = data.get("t0")
    if t0 is not None and not isinstance(t0, (int, float)):
        raise ScenarioError("system.t0", "expected a number")
    return psi0, h_system, None if t0 is None else float(t0)


def _parse_event(data, layouts_by_label: dict[str, SubsystemLayout], key: str):
    time = _require(data, "time", key)
    if not isinstance(time, (int, float)):
        raise ScenarioError(f"{key}.time", "expected a number")
    name = _require(data, "detector", key)
    if not isinstance(name, str) or not name:
        raise ScenarioError(f"{key}.detector", "expected a non-empty string")

    targets = _require(data, "targets", key)
    if not isinstance(targets, list) or not all(isinstance(t, str) for t in targets):
        raise ScenarioError(f"{key}.targets", "expected a list of factor labels")
    try:
        target_layout = SubsystemLayout(
            tuple(
                (label, layouts_by_label[label].dim_of(label))
                for label in targets
            )
        )
    except KeyError as err:
        raise ScenarioError(f"{key}.targets", f"unknown factor {err.args[0]!r}") from None
    except LayoutError as err:
        raise ScenarioError(f"{key}.targets", str(err)) from None

    raw_kraus = _require(data, "kraus", key)
    if not isinstance(raw_kraus, list) or not raw_kraus:
        raise ScenarioError(f"{key}.kraus", "expected a non-empty list of outcome entries")
    entries = []
    for i, item in enumerate(raw_kraus):
        outcome = _require(item, "outcome", f"{key}.kraus[{i}]")
        if not isinstance(outcome, str) or not outcome:
            raise ScenarioError(f"{key}.kraus[{i}].outcome", "expected a non-empty string")
        matrix = _complex_matrix(
            _require(item, "matrix", f"{key}.kraus[{i}]"), f"{key}.kraus[{i}].matrix"
        )
        if matrix.shape != (target_layout.dim, target_layout.dim):
            raise ScenarioError(
                f"{key}.kraus[{i}].matrix",
                f"shape {matrix.shape} does not match target dimension {target_layout.dim}",
            )
        entries.append((outcome, Operator(target_layout, matrix)))
    try:
        kraus = KrausSet(tuple(entries))
    except (ValueError, LayoutError) as err:
        raise ScenarioError(f"{key}.kraus", str(err)) from None

    report = validate(kraus)
    if not report.ok:
        raise ScenarioError(
            f"{key}.kraus",
            f"completeness violated by {report.max_deviation:.1e} at detector {name!r}",
        )

    ready_label = data.get("ready_label", "r")
    if not isinstance(ready_label, str) or not ready_label:
        raise ScenarioError(f"{key}.ready_label", "expected a non-empty string")
    try:
        detector = DetectorModel(name, kraus, ready_label=ready_label)
    except (ValueError, LayoutError) as err:
        raise ScenarioError(key, str(err)) from None
    return float(time), detector


def _parse_query(data, schedule: EventSchedule, key: str) -> Query:
    t = _require(data, "t", key)
    if not isinstance(t, (int, float)):
        raise ScenarioError(f"{key}.t", "expected a number")
    t = float(t)

    modes = [m for m in ("assignment", "target", "full_table") if m in data]
    if data.get("full_table"):
        return Query(t, "table")
    if "target" in data or "given" in data:
        target = _str_map(_require(data, "target", key), f"{key}.target")
        given = _str_map(_require(data, "given", key), f"{key}.given")
        _check_names(target, schedule, f"{key}.target")
        _check_names(given, schedule, f"{key}.given")
        if set(target) & set(given):
            raise ScenarioError(key, "target and given must name disjoint detectors")
        return Query(t, "conditional", target=target, given=given)
    if "assignment" in data:
        assignment = _str_map(data["assignment"], f"{key}.assignment")
        if not assignment:
            raise ScenarioError(f"{key}.assignment", "must name at least one detector")
        _check_names(assignment, schedule, f"{key}.assignment")
        return Query(t, "assignment", assignment=assignment)
    raise ScenarioError(key, f"query needs one of 'assignment', 'target'/'given', 'full_table'; got {modes}")


def _check_names(assignment: dict[str, str], schedule: EventSchedule, key: str) -> None:
    for det_name, outcome in assignment.items():
        try:
            det = schedule.detector(det_name)
        except KeyError:
            raise ScenarioError(
                key, f"unknown detector {det_name!r}; have {list(schedule.detector_labels)}"
            ) from None
        if outcome != det.ready_label and outcome not in det.kraus.outcome_labels:
            raise ScenarioError(
                key,
                f"unknown outcome {outcome!r} for detector {det_name!r}; "
                f"have {list(det.kraus.outcome_labels)} and ready label {det.ready_label!r}",
            )


def parse_scenario(data) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("", "top level must be an object")
    psi0, h_system, t0 = _parse_system(_require(data, "system", ""))

    layouts_by_label: dict[str, SubsystemLayout] = {
        label: psi0.layout for label in psi0.layout.labels
    }
    raw_events = _require(data, "events", "")
    if not isinstance(raw_events, list):
        raise ScenarioError("events", "expected a list")
    events = []
    for i, raw in enumerate(raw_events):
        time, det = _parse_event(raw, layouts_by_label, f"events[{i}]")
        if det.detector_label in layouts_by_label:
            raise ScenarioError(
                f"events[{i}].detector", f"label {det.detector_label!r} collides with an existing factor"
            )
        layouts_by_label[det.detector_label] = det.ancilla_layout
        events.append((time, det))
    try:
        schedule = EventSchedule(tuple(events))
    except ScheduleError as err:
        raise ScenarioError("events", str(err)) from None

    if t0 is None:
        t0 = schedule.times[0] - 1.0 if schedule.times else 0.0
    elif schedule.times and t0 >= schedule.times[0]:
        raise ScenarioError("system.t0", f"t0={t0} must precede the first event at {schedule.times[0]}")

    raw_queries = data.get("queries", [])
    if not isinstance(raw_queries, list):
        raise ScenarioError("queries", "expected a list")
    queries = tuple(
        _parse_query(raw, schedule, f"queries[{i}]") for i, raw in enumerate(raw_queries)
    )
    return Scenario(psi0, t0, h_system, schedule, queries)


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError("", f"not valid JSON: {err}") from None
    return parse_scenario(data)


def _pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix_pairs(matrix: np.ndarray) -> list:
    return [[_pair(entry) for entry in row] for row in np.asarray(matrix)]


def scenario_to_data(scenario: Scenario) -> dict:
    """Canonical JSON-ready form; parses back to a bit-identical model."""
    system = {
        "factors": [[label, dim] for label, dim in scenario.psi0.layout.factors],
        "state": [_pair(z) for z in scenario.psi0.amplitudes],
        "hamiltonian": _matrix_pairs(scenario.h_system.matrix),
        "t0": scenario.t0,
    }
    events = []
    for time, det in scenario.schedule.events:
        events.append(
            {
                "time": time,
                "detector": det.detector_label,
                "targets": list(det.kraus.target_labels),
                "kraus": [
                    {"outcome": label, "matrix": _matrix_pairs(op.matrix)}
                    for label, op in det.kraus.outcomes
                ],
                "ready_label": det.ready_label,
            }
        )
    queries = []
    for q in scenario.queries:
        if q.mode == "table":
            queries.append({"t": q.t, "full_table": True})
        elif q.mode == "conditional":
            queries.append({"t": q.t, "target": dict(q.target), "given": dict(q.given)})
        else:
            queries.append({"t": q.t, "assignment": dict(q.assignment)})
    return {"system": system, "events": events, "queries": queries}


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_data(scenario), indent=2) + "\n"


def parse_query_string(text: str, schedule: EventSchedule) -> Query:
    """Parse compact query syntax: 'F=up,W=yes@t=3.0', 'F=up|W=yes@t=3.0',
    or 'full-table@t=3.0'."""
    key = f"query {text!r}"
    if "@" not in text:
        raise ScenarioError(key, "missing '@t=<time>' suffix")
    body, _, time_part = text.rpartition("@")
    if not time_part.startswith("t="):
        raise ScenarioError(key, "time must be written as '@t=<time>'")
    try:
        t = float(time_part[2:])
    except ValueError:
        raise ScenarioError(key, f"cannot parse time {time_part[2:]!r}") from None

    def parse_pairs(chunk: str, part: str) -> dict[str, str]:
        pairs: dict[str, str] = {}
        for item in chunk.split(","):
            if "=" not in item:
                raise ScenarioError(key, f"{part} entry {item!r} is not of the form detector=outcome")
            det, _, outcome = item.partition("=")
            pairs[det.strip()] = outcome.strip()
        return pairs

    body = body.strip()
    if body in ("full-table", "full", "table"):
        return Query(t, "table")
    if "|" in body:
        target_part, _, given_part = body.partition("|")
        query = Query(
            t,
            "conditional",
            target=parse_pairs(target_part, "target"),
            given=parse_pairs(given_part, "given"),
        )
        _check_names(query.target, schedule, key)
        _check_names(query.given, schedule, key)
        if set(query.target) & set(query.given):
            raise ScenarioError(key, "target and given must name disjoint detectors")
        return query
    query = Query(t, "assignment", assignment=parse_pairs(body, "assignment"))
    _check_names(query.assignment, schedule, key)
    return query
