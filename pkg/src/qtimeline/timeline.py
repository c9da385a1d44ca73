"""Piecewise history states for schedules of instantaneous measurements.

Between measurement events the dynamics is an analytic unitary flow, so the
global state over all clock readings is represented exactly as half-open time
segments, each carrying an anchor state on system (x) detector factors.  Time
is a query parameter: conditioning on a clock reading selects a segment and
evolves its anchor, and there is no discretized time grid anywhere.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    DomainError,
    LayoutError,
    Operator,
    StateVector,
    SubsystemLayout,
    apply_on,
    embed,
    tensor,
)
from .instrument import DetectorModel, apply_instrument


class ScheduleError(ValueError):
    """Event times are not strictly increasing or t0 is not before them."""


@dataclass(frozen=True, eq=False)
class EventSchedule:
    """Strictly increasing measurement times with attached detectors."""

    events: tuple[tuple[float, DetectorModel], ...]

    def __post_init__(self) -> None:
        entries = tuple((float(t), det) for t, det in self.events)
        object.__setattr__(self, "events", entries)
        times = [t for t, _ in entries]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ScheduleError(f"event times must be strictly increasing, got {times}")

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.events)

    @property
    def detector_labels(self) -> tuple[str, ...]:
        return tuple(det.detector_label for _, det in self.events)

    def detector(self, label: str) -> DetectorModel:
        for _, det in self.events:
            if det.detector_label == label:
                return det
        raise KeyError(f"no detector {label!r} in schedule; have {self.detector_labels}")

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True, eq=False)
class Segment:
    """One half-open interval [t_start, t_end) of pure unitary flow."""

    t_start: float
    t_end: float
    anchor_time: float
    anchor_state: StateVector

    def __post_init__(self) -> None:
        if not self.t_start < self.t_end:
            raise DomainError(f"empty segment [{self.t_start}, {self.t_end})")
        if not (self.t_start <= self.anchor_time < self.t_end):
            raise DomainError("anchor time must lie inside the segment")
        if not self.anchor_state.is_normalized:
            raise DomainError("segment anchor state must be normalized")

    def covers(self, t: float) -> bool:
        return self.t_start <= t < self.t_end


@dataclass(frozen=True, eq=False)
class HistoryState:
    """The global state over all clock readings, one segment per regime."""

    layout: SubsystemLayout
    h_system: Operator
    schedule: EventSchedule
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if len(self.segments) != len(self.schedule) + 1:
            raise DomainError("segment count must be event count + 1")
        w, v = np.linalg.eigh(self.h_system.matrix)
        object.__setattr__(self, "_eigvals", w)
        object.__setattr__(self, "_eigvecs", v)

    def system_propagator(self, dt: float) -> Operator:
        phases = np.exp(-1j * self._eigvals * dt)
        return Operator(self.h_system.layout, (self._eigvecs * phases) @ self._eigvecs.conj().T)

    def segment_at(self, t: float) -> Segment:
        index = bisect.bisect_right(self.schedule.times, t)
        return self.segments[index]


def build_history(
    psi0: StateVector,
    t0: float,
    h_system: Operator,
    schedule: EventSchedule,
) -> HistoryState:
    """Assemble the piecewise history of a schedule of measurements.

    Segment 0 carries ``psi0`` tensored with every detector's ready state,
    anchored at ``t0``.  Each later segment is produced by freely evolving the
    previous anchor to the event time and recording that event's outcome set
    into its ancilla; the final segment extends to +infinity.  Detector
    self-dynamics is trivial, so records persist unchanged once written.
    """
    if h_system.layout != psi0.layout:
        raise LayoutError("system Hamiltonian must act on the initial state's layout")
    if not h_system.is_hermitian():
        raise DomainError("system Hamiltonian must be Hermitian")
    if not psi0.is_normalized:
        raise DomainError("initial state must be normalized")
    if len(schedule) and not t0 < schedule.times[0]:
        raise ScheduleError(f"t0={t0} must precede the first event at {schedule.times[0]}")

    full = psi0.layout
    state = psi0
    for _, det in schedule.events:
        if det.detector_label in full:
            raise LayoutError(f"detector label {det.detector_label!r} collides with an existing factor")
        full = full.concat(det.ancilla_layout)
        state = tensor(state, det.ready_state())

    times = schedule.times
    first_end = times[0] if times else math.inf
    segments = [Segment(-math.inf, first_end, t0, state)]

    w, v = np.linalg.eigh(h_system.matrix)
    for k, (t_k, det) in enumerate(schedule.events):
        prev = segments[-1]
        phases = np.exp(-1j * w * (t_k - prev.anchor_time))
        u_small = Operator(h_system.layout, (v * phases) @ v.conj().T)
        evolved = apply_on(u_small, prev.anchor_state)
        post = apply_instrument(evolved, det)
        t_end = times[k + 1] if k + 1 < len(times) else math.inf
        segments.append(Segment(t_k, t_end, t_k, post))

    return HistoryState(full, h_system, schedule, tuple(segments))


def state_at(history: HistoryState, t: float) -> StateVector:
    """Condition the history on the clock reading ``t``.

    Locates the segment covering ``t`` and transports its anchor with the free
    propagator, extended by the identity on every detector factor.
    """
    seg = history.segment_at(t)
    return apply_on(history.system_propagator(t - seg.anchor_time), seg.anchor_state)


def constraint_residual(history: HistoryState, t: float, dt: float) -> float:
    """Finite-difference residual of the free-evolution equation at ``t``.

    Uses the symmetric difference over [t-dt, t+dt], which must lie within a
    single segment; the residual is O(dt^2) for the smooth in-segment flow and
    undefined across an event.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    seg = history.segment_at(t)
    if not (seg.covers(t - dt) and seg.covers(t + dt)):
        raise DomainError(f"interval [{t - dt}, {t + dt}] straddles an event boundary")
    psi_plus = state_at(history, t + dt).amplitudes
    psi_minus = state_at(history, t - dt).amplitudes
    psi_mid = state_at(history, t).amplitudes
    h_full = embed(history.h_system, history.h_system.layout.labels, history.layout).matrix
    residual = 1j * (psi_plus - psi_minus) / (2.0 * dt) - h_full @ psi_mid
    return float(np.linalg.norm(residual))
