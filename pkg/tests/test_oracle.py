import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtimeline.hilbert import (
    LayoutError,
    Operator,
    StateVector,
    SubsystemLayout,
    basis_state,
    propagator,
    tensor,
)
from qtimeline.instrument import DetectorModel, KrausSet
from qtimeline.oracle import sequential_born
from qtimeline.probability import OutcomeQuery, joint
from qtimeline.sampling import random_complete_kraus, random_hermitian, random_scenario, random_state
from qtimeline.timeline import EventSchedule, build_history
from qtimeline.wigner import friend_detector, wigner_detector

from helpers import all_assignments, closed_form_joint, random_unit_pair

S = SubsystemLayout.of(("S", 2))


def projective_detector(label="M"):
    return DetectorModel(
        label,
        KrausSet(
            (
                ("up", Operator(S, [[1, 0], [0, 0]])),
                ("down", Operator(S, [[0, 0], [0, 1]])),
            )
        ),
    )


def test_single_projective_event_on_eigenstate():
    schedule = EventSchedule(((1.0, projective_detector()),))
    h_zero = Operator(S, np.zeros((2, 2)))
    assert sequential_born(basis_state(S, 0), h_zero, schedule, {"M": "up"}) == pytest.approx(1.0)
    assert sequential_born(basis_state(S, 0), h_zero, schedule, {"M": "down"}) == pytest.approx(0.0)


def test_oracle_reproduces_wigner_grid():
    # The second Kraus acts on the first detector's record factor, so that
    # record must be carried coherently and read only at the end of the chain.
    rng = np.random.default_rng(23)
    for _ in range(5):
        a, b = random_unit_pair(rng)
        alpha, beta = random_unit_pair(rng)
        fd = friend_detector()
        psi0 = tensor(StateVector(S, [a, b]), fd.ready_state())
        schedule = EventSchedule(((1.0, fd), (2.0, wigner_detector(alpha, beta))))
        h_zero = Operator(S, np.zeros((2, 2)))
        expected = closed_form_joint(a, b, alpha, beta)
        for (f, w), value in expected.items():
            got = sequential_born(psi0, h_zero, schedule, {"F": f, "W": w})
            assert abs(got - value) < 1e-12


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_oracle_probabilities_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    sample = random_scenario(rng, events_range=(1, 2))
    u = propagator(sample.h_system, sample.schedule.times[0], sample.t0)
    psi_first = u.apply(sample.psi0)
    total = sum(
        sequential_born(psi_first, sample.h_system, sample.schedule, assignment)
        for assignment in all_assignments(sample.schedule)
    )
    assert abs(total - 1.0) < 1e-12


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_oracle_agrees_with_history_pipeline(seed):
    rng = np.random.default_rng(seed)
    sample = random_scenario(rng)
    history = build_history(sample.psi0, sample.t0, sample.h_system, sample.schedule)
    t = sample.schedule.times[-1] + 1.0
    u = propagator(sample.h_system, sample.schedule.times[0], sample.t0)
    psi_first = u.apply(sample.psi0)
    for assignment in all_assignments(sample.schedule):
        p_history = joint(history, OutcomeQuery(assignment, t))
        p_oracle = sequential_born(psi_first, sample.h_system, sample.schedule, assignment)
        assert abs(p_history - p_oracle) < 1e-10


def test_oracle_agrees_on_three_qubit_system():
    rng = np.random.default_rng(31)
    layout = SubsystemLayout.of(("Q0", 2), ("Q1", 2), ("Q2", 2))
    psi0 = random_state(rng, layout)
    h = random_hermitian(rng, layout)
    single = {label: SubsystemLayout.of((label, 2)) for label in layout.labels}
    events = tuple(
        (float(k + 1), DetectorModel(f"D{k}", random_complete_kraus(rng, single[label], 2)))
        for k, label in enumerate(layout.labels)
    )
    schedule = EventSchedule(events)
    history = build_history(psi0, 0.0, h, schedule)
    psi_first = propagator(h, 1.0, 0.0).apply(psi0)
    for assignment in all_assignments(schedule):
        p_history = joint(history, OutcomeQuery(assignment, 4.0))
        p_oracle = sequential_born(psi_first, h, schedule, assignment)
        assert abs(p_history - p_oracle) < 1e-10


def test_oracle_requires_every_outcome():
    schedule = EventSchedule(((1.0, projective_detector()),))
    h_zero = Operator(S, np.zeros((2, 2)))
    with pytest.raises(KeyError):
        sequential_born(basis_state(S, 0), h_zero, schedule, {})


def test_oracle_rejects_missing_target_factor():
    wd = wigner_detector(1.0, 0.0)  # acts on S and F, but psi0 has no F factor
    schedule = EventSchedule(((1.0, wd),))
    h_zero = Operator(S, np.zeros((2, 2)))
    with pytest.raises(LayoutError):
        sequential_born(basis_state(S, 0), h_zero, schedule, {"W": "yes"})
