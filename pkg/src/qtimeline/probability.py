"""Outcome probabilities over history states at a fixed clock reading.

Every probability here is "at clock reading t": the joint weight of an
outcome assignment is the squared norm left after projecting each named
detector's record state out of the conditioned state, marginals simply skip
the unnamed detectors, and conditionals are Bayes quotients of the two.
Absolute probabilities marginalized over the clock are deliberately not
offered.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .hilbert import DomainError, StateVector, project_outcome
from .timeline import HistoryState, state_at

# Below this weight an event is treated as null and conditioning on it fails
# loudly instead of dividing.
NULL_EVENT_TOL = 1e-14


class ConditioningOnNullEvent(ZeroDivisionError):
    """The conditioning assignment has (numerically) zero probability."""


@dataclass(frozen=True)
class OutcomeQuery:
    """A (possibly partial) detector -> outcome assignment at one clock reading."""

    assignments: Mapping[str, str]
    t: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignments", dict(self.assignments))


@dataclass(frozen=True)
class ProbabilityTable:
    """Outcome-assignment grid at a fixed clock reading.

    ``rows`` maps assignment tuples (outcome label per entry of ``detectors``,
    in order) to raw probabilities.  ``given`` names the detectors that are
    conditioned on rather than jointly measured; when it is empty the rows of
    a full table sum to one.
    """

    detectors: tuple[str, ...]
    rows: tuple[tuple[tuple[str, ...], float], ...]
    t: float
    given: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for key, value in self.rows:
            if value < -1e-12:
                raise DomainError(f"negative probability {value} for {key}")

    def value(self, assignment: Mapping[str, str]) -> float:
        key = tuple(assignment[d] for d in self.detectors)
        for row_key, row_value in self.rows:
            if row_key == key:
                return row_value
        raise KeyError(f"no row {key} in table over {self.detectors}")

    @property
    def total(self) -> float:
        return sum(value for _, value in self.rows)

    def as_dict(self) -> dict[tuple[str, ...], float]:
        return dict(self.rows)


def _resolve_assignments(history: HistoryState, assignments: Mapping[str, str]):
    """Pair each named detector with its record vector, in schedule order."""
    known = set(history.schedule.detector_labels)
    unknown = set(assignments) - known
    if unknown:
        raise KeyError(f"unknown detectors {sorted(unknown)}; schedule has {sorted(known)}")
    resolved = []
    for _, det in history.schedule.events:
        if det.detector_label in assignments:
            label = assignments[det.detector_label]
            resolved.append((det.detector_label, det.record_state(label)))
    return resolved


def _weight(state: StateVector, resolved) -> float:
    for detector_label, record in resolved:
        state = project_outcome(state, detector_label, record)
    return float(state.norm**2)


def joint(history: HistoryState, query: OutcomeQuery) -> float:
    """Probability that every detector shows its assigned label at time t."""
    missing = set(history.schedule.detector_labels) - set(query.assignments)
    if missing:
        raise KeyError(f"joint requires a full assignment; missing {sorted(missing)}")
    resolved = _resolve_assignments(history, query.assignments)
    return _weight(state_at(history, query.t), resolved)


def marginal(history: HistoryState, query: OutcomeQuery) -> float:
    """Probability of a partial assignment, summing implicitly over the rest."""
    if not query.assignments:
        raise KeyError("marginal requires at least one named detector")
    resolved = _resolve_assignments(history, query.assignments)
    return _weight(state_at(history, query.t), resolved)


def conditional(
    history: HistoryState,
    target: Mapping[str, str],
    given: Mapping[str, str],
    t: float,
) -> float:
    """Bayes quotient P(target and given at t) / P(given at t)."""
    overlap = set(target) & set(given)
    if overlap:
        raise ValueError(f"target and given must name disjoint detectors; both name {sorted(overlap)}")
    state = state_at(history, t)
    denominator = _weight(state, _resolve_assignments(history, given))
    if denominator < NULL_EVENT_TOL:
        raise ConditioningOnNullEvent(
            f"conditioning assignment {dict(given)} has probability {denominator:.3e} at t={t}"
        )
    numerator = _weight(state, _resolve_assignments(history, {**target, **given}))
    return numerator / denominator


def outcome_labels_at(history: HistoryState, t: float) -> dict[str, tuple[str, ...]]:
    """Labels each detector can show at time t: its outcomes once fired, else ready."""
    labels: dict[str, tuple[str, ...]] = {}
    for event_time, det in history.schedule.events:
        if event_time <= t:
            labels[det.detector_label] = det.kraus.outcome_labels
        else:
            labels[det.detector_label] = (det.ready_label,)
    return labels


def full_table(history: HistoryState, t: float) -> ProbabilityTable:
    """Joint probabilities of every full assignment realizable at time t.

    Detectors whose event lies in the future report their ready label, which
    carries all of their weight, so the rows always sum to one.
    """
    labels = outcome_labels_at(history, t)
    detectors = history.schedule.detector_labels
    state = state_at(history, t)
    rows = []
    for combo in itertools.product(*(labels[d] for d in detectors)):
        assignment = dict(zip(detectors, combo))
        weight = _weight(state, _resolve_assignments(history, assignment))
        rows.append((combo, weight))
    return ProbabilityTable(detectors, tuple(rows), t)


def clamp_probability(value: float) -> float:
    """Clip reporting round-off into [0, 1]; raw values stay untouched elsewhere."""
    return min(max(value, 0.0), 1.0)
