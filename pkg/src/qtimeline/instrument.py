"""Generalized measurements: outcome-labeled Kraus families, their POVM
effects, and the unitary recording map onto an orthogonal detector ancilla."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .hilbert import (
    TOL_PREDICATE,
    DomainError,
    LayoutError,
    Operator,
    StateVector,
    SubsystemLayout,
    apply_on,
    basis_state,
)


class ValidationError(ValueError):
    """A Kraus family fails a structural requirement (e.g. completeness)."""


class StateError(ValueError):
    """A state does not satisfy an instrument precondition."""


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    max_deviation: float


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Ordered family of outcome-labeled Kraus operators on shared target factors."""

    outcomes: tuple[tuple[str, Operator], ...]

    def __post_init__(self) -> None:
        entries = tuple((str(label), op) for label, op in self.outcomes)
        object.__setattr__(self, "outcomes", entries)
        if not entries:
            raise ValidationError("a Kraus set needs at least one outcome")
        labels = [label for label, _ in entries]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate outcome labels: {labels}")
        reference = entries[0][1].layout
        for label, op in entries:
            if op.layout != reference:
                raise LayoutError(f"Kraus operator for {label!r} is not on layout {reference.labels}")

    @property
    def target_layout(self) -> SubsystemLayout:
        return self.outcomes[0][1].layout

    @property
    def target_labels(self) -> tuple[str, ...]:
        return self.target_layout.labels

    @property
    def outcome_labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.outcomes)

    def operator_for(self, outcome: str) -> Operator:
        for label, op in self.outcomes:
            if label == outcome:
                return op
        raise KeyError(f"unknown outcome {outcome!r}; have {self.outcome_labels}")


def validate(kraus: KrausSet) -> ValidationReport:
    """Check completeness sum(K^dag K) = I; reports the max-norm deviation."""
    dim = kraus.target_layout.dim
    total = np.zeros((dim, dim), dtype=np.complex128)
    for _, op in kraus.outcomes:
        total += op.matrix.conj().T @ op.matrix
    deviation = float(np.max(np.abs(total - np.eye(dim))))
    return ValidationReport(deviation <= TOL_PREDICATE, deviation)


@dataclass(frozen=True, eq=False)
class Effect(Operator):
    """Positive operator below the identity; assigns outcome probabilities."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.is_hermitian():
            raise DomainError("an effect must be Hermitian")
        eigenvalues = np.linalg.eigvalsh(self.matrix)
        if np.min(eigenvalues) < -TOL_PREDICATE or np.max(eigenvalues) > 1.0 + TOL_PREDICATE:
            raise DomainError("effect eigenvalues must lie in [0, 1] up to 1e-10")


def effect_of(kraus: KrausSet, outcome: str) -> Effect:
    op = kraus.operator_for(outcome)
    return Effect(op.layout, op.matrix.conj().T @ op.matrix)


@dataclass(frozen=True, eq=False)
class DetectorModel:
    """A Kraus family plus the ancilla that records its outcomes.

    The ancilla has one basis state per outcome plus a dedicated ready state,
    mutually orthonormal in the standard basis, so outcome records are exactly
    distinguishable and carry zero weight before the measurement happens.
    """

    detector_label: str
    kraus: KrausSet
    ready_index: int = 0
    outcome_basis: Mapping[str, int] | None = None
    ready_label: str = "r"

    def __post_init__(self) -> None:
        if self.outcome_basis is None:
            mapping = {label: i + 1 for i, label in enumerate(self.kraus.outcome_labels)}
        else:
            mapping = {str(k): int(v) for k, v in dict(self.outcome_basis).items()}
        object.__setattr__(self, "outcome_basis", MappingProxyType(mapping))
        if set(mapping) != set(self.kraus.outcome_labels):
            raise ValidationError("outcome basis must map exactly the Kraus outcome labels")
        indices = [self.ready_index, *mapping.values()]
        if len(set(indices)) != len(indices):
            raise ValidationError("ready and outcome basis indices must be distinct")
        if any(i < 0 or i >= self.ancilla_dim for i in indices):
            raise ValidationError(f"ancilla basis indices must lie in [0, {self.ancilla_dim})")
        if self.ready_label in self.kraus.outcome_labels:
            raise ValidationError(f"ready label {self.ready_label!r} collides with an outcome label")
        if self.detector_label in self.kraus.target_labels:
            raise LayoutError("a detector cannot target its own ancilla factor")

    @property
    def ancilla_dim(self) -> int:
        return len(self.kraus.outcomes) + 1

    @property
    def ancilla_layout(self) -> SubsystemLayout:
        return SubsystemLayout.of((self.detector_label, self.ancilla_dim))

    def record_state(self, label: str) -> StateVector:
        """Ancilla basis vector for an outcome label or the ready label."""
        if label == self.ready_label:
            return basis_state(self.ancilla_layout, self.ready_index)
        try:
            index = self.outcome_basis[label]
        except KeyError:
            raise KeyError(
                f"detector {self.detector_label!r} has no outcome {label!r}; "
                f"have {self.kraus.outcome_labels} and ready label {self.ready_label!r}"
            ) from None
        return basis_state(self.ancilla_layout, index)

    def ready_state(self) -> StateVector:
        return basis_state(self.ancilla_layout, self.ready_index)


def apply_instrument(state: StateVector, det: DetectorModel) -> StateVector:
    """Record one measurement: psi (x) |r> -> sum_m (K_m psi) (x) |m>.

    The detector factor of ``state`` must be in the ready state and the Kraus
    family complete; then the map is an isometry and the norm is preserved.
    """
    layout = state.layout
    if det.detector_label not in layout:
        raise LayoutError(f"state has no detector factor {det.detector_label!r}")
    if layout.dim_of(det.detector_label) != det.ancilla_dim:
        raise LayoutError(
            f"detector factor {det.detector_label!r} has dimension "
            f"{layout.dim_of(det.detector_label)}, expected {det.ancilla_dim}"
        )
    for label in det.kraus.target_labels:
        if label not in layout:
            raise LayoutError(f"Kraus target {label!r} not present in state layout")

    report = validate(det.kraus)
    if not report.ok:
        raise ValidationError(
            f"completeness violated by {report.max_deviation:.1e} at detector {det.detector_label!r}"
        )

    ax = layout.axis(det.detector_label)
    tens = state.as_tensor()
    moved = np.moveaxis(tens, ax, -1)
    off_ready = np.delete(moved, det.ready_index, axis=-1)
    if off_ready.size and np.max(np.abs(off_ready)) >= TOL_PREDICATE:
        raise StateError(f"detector {det.detector_label!r} is not in its ready state")

    rest_layout = layout.drop(det.detector_label)
    psi_rest = StateVector(rest_layout, np.ascontiguousarray(moved[..., det.ready_index]).reshape(-1))

    out = np.zeros(layout.dims, dtype=np.complex128)
    out_moved = np.moveaxis(out, ax, -1)
    for outcome, op in det.kraus.outcomes:
        branch = apply_on(op, psi_rest)
        out_moved[..., det.outcome_basis[outcome]] = branch.amplitudes.reshape(rest_layout.dims)
    return StateVector(layout, out.reshape(-1))
