import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtimeline.hilbert import (
    DomainError,
    LayoutError,
    Operator,
    StateVector,
    SubsystemLayout,
    apply_on,
    basis_state,
)
from qtimeline.instrument import DetectorModel, KrausSet, apply_instrument
from qtimeline.sampling import random_complete_kraus, random_hermitian, random_state
from qtimeline.timeline import (
    EventSchedule,
    ScheduleError,
    build_history,
    constraint_residual,
    state_at,
)
from qtimeline.wigner import WignerScenario, build as build_wigner

from helpers import expm_series

S = SubsystemLayout.of(("S", 2))
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


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


def test_schedule_requires_strictly_increasing_times():
    det = projective_detector
    with pytest.raises(ScheduleError):
        EventSchedule(((2.0, det("A")), (1.0, det("B"))))
    with pytest.raises(ScheduleError):
        EventSchedule(((1.0, det("A")), (1.0, det("B"))))


def test_empty_schedule_is_pure_free_evolution():
    rng = np.random.default_rng(0)
    h = random_hermitian(rng, S)
    psi0 = random_state(rng, S)
    history = build_history(psi0, 0.0, h, EventSchedule(()))
    assert len(history.segments) == 1
    assert history.segments[0].t_start == -math.inf
    assert history.segments[0].t_end == math.inf
    for t in (-2.0, 0.0, 1.7):
        expected = expm_series(-1j * np.asarray(h.matrix) * t) @ psi0.amplitudes
        np.testing.assert_allclose(state_at(history, t).amplitudes, expected, atol=1e-12)


def test_single_event_three_case_structure():
    # One measurement splits the line into ready-state and recorded regimes.
    rng = np.random.default_rng(1)
    h = random_hermitian(rng, S)
    psi0 = random_state(rng, S)
    det = projective_detector("M")
    t_m = 1.0
    history = build_history(psi0, 0.0, h, EventSchedule(((t_m, det),)))
    h_mat = np.asarray(h.matrix)

    t_before = 0.4
    expected_before = np.kron(expm_series(-1j * h_mat * t_before) @ psi0.amplitudes, [1, 0, 0])
    np.testing.assert_allclose(state_at(history, t_before).amplitudes, expected_before, atol=1e-12)

    t_after = 2.3
    psi_tm = expm_series(-1j * h_mat * t_m) @ psi0.amplitudes
    u_after = expm_series(-1j * h_mat * (t_after - t_m))
    expected_after = np.zeros(6, dtype=complex)
    for k_mat, record in ((np.diag([1, 0]), [0, 1, 0]), (np.diag([0, 1]), [0, 0, 1])):
        expected_after += np.kron(u_after @ k_mat @ psi_tm, record)
    np.testing.assert_allclose(state_at(history, t_after).amplitudes, expected_after, atol=1e-12)


def test_wigner_segment_anchors():
    rng = np.random.default_rng(4)
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    a, b = z[:2] / np.linalg.norm(z[:2])
    alpha, beta = z[2:] / np.linalg.norm(z[2:])
    history = build_wigner(WignerScenario(a=a, b=b, alpha=alpha, beta=beta, t_m=1.0, t_n=2.0))
    assert [seg.t_start for seg in history.segments] == [-math.inf, 1.0, 2.0]

    # between measurements: a|up,up> + b|down,down> with the last ancilla ready
    mid = history.segments[1].anchor_state.amplitudes.reshape(2, 3, 3)
    expected_mid = np.zeros((2, 3, 3), dtype=complex)
    expected_mid[0, 1, 0] = a
    expected_mid[1, 2, 0] = b
    np.testing.assert_allclose(mid, expected_mid, atol=1e-12)

    # after both: branch amplitudes written against the entangled yes/no vectors
    yes_vec = np.zeros(6, dtype=complex)
    yes_vec[1], yes_vec[5] = alpha, beta
    no_vec = np.zeros(6, dtype=complex)
    no_vec[1], no_vec[5] = -np.conj(beta), np.conj(alpha)
    sf = np.zeros(6, dtype=complex)
    sf[1], sf[5] = a, b
    expected_end = np.kron(np.outer(yes_vec, yes_vec.conj()) @ sf, [0, 1, 0])
    expected_end += np.kron(np.outer(no_vec, no_vec.conj()) @ sf, [0, 0, 1])
    np.testing.assert_allclose(history.segments[2].anchor_state.amplitudes, expected_end, atol=1e-12)


def test_state_constant_within_segments_for_zero_hamiltonian():
    history = build_wigner(WignerScenario(a=0.6, b=0.8, alpha=1.0, beta=0.0))
    for t1, t2 in ((1.0, 1.999), (2.0, 50.0), (-5.0, 0.999)):
        np.testing.assert_allclose(
            state_at(history, t1).amplitudes, state_at(history, t2).amplitudes, atol=1e-14
        )


def test_half_open_convention_at_event_time():
    history = build_wigner(WignerScenario(a=0.6, b=0.8, alpha=1.0, beta=0.0, t_m=1.0, t_n=2.0))
    at_event = state_at(history, 1.0)
    np.testing.assert_allclose(
        at_event.amplitudes, history.segments[1].anchor_state.amplitudes, atol=1e-14
    )
    just_before = state_at(history, 1.0 - 1e-9)
    np.testing.assert_allclose(
        just_before.amplitudes, history.segments[0].anchor_state.amplitudes, atol=1e-14
    )


def test_segment_boundary_consistency():
    rng = np.random.default_rng(9)
    lay = SubsystemLayout.of(("S", 3))
    h = random_hermitian(rng, lay)
    psi0 = random_state(rng, lay)
    detectors = [DetectorModel(f"D{k}", random_complete_kraus(rng, lay, 2)) for k in (1, 2)]
    schedule = EventSchedule(((1.0, detectors[0]), (2.0, detectors[1])))
    history = build_history(psi0, 0.0, h, schedule)

    for k, (t_k, det) in enumerate(schedule.events):
        evolved = state_at(history, t_k - 1e-12)  # left limit within previous segment
        # transport the tiny remaining step exactly, then record
        evolved = apply_on(history.system_propagator(1e-12), evolved)
        pushed = apply_instrument(evolved, det)
        np.testing.assert_allclose(
            pushed.amplitudes, state_at(history, t_k).amplitudes, atol=1e-10
        )


@given(t=st.floats(-50, 50))
@settings(max_examples=60, deadline=None)
def test_every_time_falls_in_exactly_one_segment(t):
    history = build_wigner(WignerScenario(a=0.6, b=0.8, alpha=0.8, beta=0.6, t_m=1.0, t_n=2.0))
    covering = [seg for seg in history.segments if seg.covers(t)]
    assert len(covering) == 1
    assert covering[0] is history.segment_at(t)


@given(seed=st.integers(0, 2**32 - 1), t=st.floats(-10, 10))
@settings(max_examples=40, deadline=None)
def test_norm_is_conserved_everywhere(seed, t):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, S)
    psi0 = random_state(rng, S)
    history = build_history(psi0, 0.0, h, EventSchedule(((1.0, projective_detector()),)))
    assert abs(state_at(history, t).norm - 1.0) < 1e-12


def test_build_history_rejects_bad_inputs():
    psi0 = basis_state(S, 0)
    h = Operator(S, np.zeros((2, 2)))
    sched = EventSchedule(((1.0, projective_detector("M"),),))
    with pytest.raises(ScheduleError):
        build_history(psi0, 1.0, h, sched)  # t0 not before first event
    with pytest.raises(DomainError):
        build_history(StateVector(S, [1, 1]), 0.0, h, sched)  # not normalized
    with pytest.raises(DomainError):
        build_history(psi0, 0.0, Operator(S, [[0, 1], [0, 0]]), sched)  # not Hermitian
    with pytest.raises(LayoutError):
        build_history(psi0, 0.0, h, EventSchedule(((1.0, projective_detector("S")),)))


def test_detector_label_collision_between_events():
    sched = EventSchedule(((1.0, projective_detector("M")), (2.0, projective_detector("M"))))
    with pytest.raises(LayoutError):
        build_history(basis_state(S, 0), 0.0, Operator(S, np.zeros((2, 2))), sched)


def test_constraint_residual_zero_hamiltonian():
    history = build_wigner(WignerScenario(a=0.6, b=0.8, alpha=1.0, beta=0.0))
    assert constraint_residual(history, 1.5, 1e-4) < 1e-14


def test_constraint_residual_second_order_bound():
    # Residual of the symmetric difference obeys ||H^3 psi|| dt^2 / 6 up to
    # higher-order terms.
    psi0 = StateVector(S, np.array([1, 1j]) / np.sqrt(2))
    h = Operator(S, SIGMA_Z)
    history = build_history(psi0, 0.0, h, EventSchedule(((1.0, projective_detector()),)))
    dt = 1e-4
    t = 0.5
    residual = constraint_residual(history, t, dt)
    psi_t = state_at(history, t).amplitudes
    h_full = np.kron(SIGMA_Z, np.eye(3))
    bound = np.linalg.norm(np.linalg.matrix_power(h_full, 3) @ psi_t) * dt**2 / 6
    assert residual < 1e-6
    assert residual <= bound * 1.001 + 1e-12


def test_constraint_residual_rejects_straddling_interval():
    history = build_wigner(WignerScenario(a=0.6, b=0.8, alpha=1.0, beta=0.0, t_m=1.0, t_n=2.0))
    with pytest.raises(DomainError):
        constraint_residual(history, 1.00005, 1e-3)
    with pytest.raises(DomainError):
        constraint_residual(history, 1.0, -1e-4)
