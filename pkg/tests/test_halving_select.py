"""Halving schedules and iterated selection certificates."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sampdisc import (
    DiscretizationError,
    DomainError,
    FrameBounds,
    FrameSystem,
    HalvingSchedule,
    OracleConfig,
    PreconditionError,
    check_cardinality_sandwich,
    halving_schedule,
    halving_select,
    halving_select_frame,
    partition_targets,
)

from helpers import svd_subset_bounds


def dft_frame(n, m):
    values = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(m)) / m)
    return FrameSystem(values / np.sqrt(m))


def test_schedule_frozen_delta_1_over_400():
    sched = halving_schedule(1.0 / 400.0)
    assert sched.steps[0] == (1.0, 1.0)
    assert sched.steps[1] == (0.375, 0.625)
    assert sched.steps[2] == (0.11095344553802569, 0.4400775907699572)
    assert sched.rounds == 2 and sched.L == 1
    assert sched.final_lower == 0.11095344553802569


def test_schedule_frozen_delta_009():
    sched = halving_schedule(0.009)
    assert sched.rounds == 1 and sched.L == 0
    assert sched.steps[1] == (0.26282917548737156, 0.7371708245126285)


def test_schedule_domain():
    for bad in (0.01, 0.0, -1e-3, 0.5):
        with pytest.raises(DomainError):
            halving_schedule(bad)


def test_schedule_consistency_guard():
    with pytest.raises(PreconditionError):
        HalvingSchedule(delta=1.0 / 400.0, steps=((1.0, 1.0), (0.4, 0.625)))
    with pytest.raises(PreconditionError):
        HalvingSchedule(delta=1.0 / 400.0, steps=((1.0, 1.0),))
    # final alpha here is 0.375 >= 100 delta, violating the sandwich
    with pytest.raises(PreconditionError):
        HalvingSchedule(delta=1.0 / 400.0, steps=((1.0, 1.0), (0.375, 0.625)))


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-6, max_value=0.009999999))
def test_schedule_recursion_and_sandwich(delta):
    sched = halving_schedule(delta)
    a, b = 1.0, 1.0
    for j in range(sched.rounds):
        assert sched.steps[j] == (a, b)
        assert a >= 100.0 * delta  # only qualifying steps are split
        a, b = partition_targets(a, b, delta)
    assert sched.steps[-1] == (a, b)
    assert 25.0 * delta <= a + 1e-12
    assert a < 100.0 * delta


def test_fast_path_identity():
    cert = halving_select(FrameSystem(np.eye(2)), 1.0)
    assert cert.fast_path
    assert cert.J == (0, 1)
    assert cert.schedule is None
    assert (cert.theoretical_lower, cert.theoretical_upper) == (1.0, 1.0)
    assert abs(cert.actual.lower - 1.0) < 1e-14
    assert cert.rescale == 1.0
    assert cert.rounds == ()


def test_fast_path_drops_zero_vectors():
    frame = FrameSystem(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
    cert = halving_select(frame, 1.5)
    assert cert.fast_path
    assert cert.J == (0, 1)
    assert abs(cert.actual.lower - 1.0) < 1e-14
    assert abs(cert.actual.upper - 1.0) < 1e-14


def test_norm_condition_names_offender():
    # vector 1 carries half the trace: norm^2 = 0.5 > delta = 2/8
    r2 = 1.0 / np.sqrt(2.0)
    vals = np.array(
        [[r2, r2, 0, 0, 0, 0, 0, 0], [0, 0, 0.5, 0.5, 0.5, 0.5, 0, 0]]
    )
    frame = FrameSystem(vals)
    with pytest.raises(PreconditionError) as err:
        halving_select(frame, 1.0)
    assert "vector 0" in str(err.value) or "vector 1" in str(err.value)


def test_theta_exceeding_ratio():
    with pytest.raises(PreconditionError):
        halving_select(FrameSystem(np.eye(2)), 1.5)


def test_non_tight_rejected():
    with pytest.raises(PreconditionError):
        halving_select(FrameSystem(np.eye(2) * 1.1), 1.0)


def test_iterative_dft_one_round():
    frame = dft_frame(2, 256)
    cert = halving_select(frame, 1.0, OracleConfig(seed=3))
    delta = 2.0 / 256.0
    assert not cert.fast_path
    assert cert.delta == delta
    assert cert.schedule.rounds == 1 and cert.schedule.L == 0
    assert len(cert.J) == 128
    assert cert.actual.lower >= 25.0 * delta - 1e-10
    assert cert.actual.lower >= cert.theoretical_lower - 1e-10
    assert cert.actual.upper <= cert.theoretical_upper + 1e-10
    assert cert.theoretical_lower == 0.2790291308792039
    assert cert.theoretical_upper == 0.7209708691207961
    # measured bounds are reproducible from the stored index set
    lo, up = svd_subset_bounds(frame, cert.J)
    assert abs(cert.actual.lower - lo) < 1e-12
    assert abs(cert.actual.upper - up) < 1e-12
    assert check_cardinality_sandwich(cert, frame)


def test_iterative_dft_two_rounds_nested():
    frame = dft_frame(2, 1024)
    cert = halving_select(frame, 1.0, OracleConfig(seed=2))
    assert cert.schedule.rounds == 2
    assert len(cert.J) <= 1024 / 4
    kept_chain = [r.kept for r in cert.rounds]
    assert set(kept_chain[1]) < set(kept_chain[0])
    assert set(cert.J) == set(kept_chain[1])
    for j, rnd in enumerate(cert.rounds):
        lo_t, up_t = partition_targets(
            cert.schedule.steps[j][0], cert.schedule.steps[j][1], cert.delta
        )
        assert rnd.target_lower == lo_t and rnd.target_upper == up_t
        assert rnd.measured.lower >= lo_t - 1e-10
        assert rnd.measured.upper <= up_t + 1e-10
        lo, up = svd_subset_bounds(frame, rnd.kept)
        assert abs(rnd.measured.lower - lo) < 1e-12
        assert abs(rnd.measured.upper - up) < 1e-12


def test_iterative_determinism():
    frame = dft_frame(2, 256)
    a = halving_select(frame, 1.0, OracleConfig(seed=9))
    b = halving_select(frame, 1.0, OracleConfig(seed=9))
    assert a.J == b.J
    assert a.actual == b.actual


def test_exhaustive_config_accepted_on_fast_path():
    # iterative halving needs m > 100 n (norms at most delta < A/100
    # while averaging A n/m), which always exceeds the exhaustive
    # enumeration limit of 24; the config is still accepted and the
    # fast path triggers
    j = np.arange(16)
    vals = np.stack([np.ones(16), 1.0 - 2.0 * (j & 1)]) / 4.0
    frame = FrameSystem(vals * np.sqrt(0.05))
    cert = halving_select_frame(
        frame,
        FrameBounds(0.05, 0.05),
        theta=0.05,
        config=OracleConfig(strategy="exhaustive"),
    )
    assert cert.fast_path
    assert cert.J == tuple(range(16))


def test_frame_variant_matches_plain_on_tight():
    frame = dft_frame(2, 256)
    plain = halving_select(frame, 1.0, OracleConfig(seed=4))
    seeded = halving_select_frame(
        frame, FrameBounds(1.0, 1.0), 1.0, OracleConfig(seed=4)
    )
    assert plain.J == seeded.J
    assert plain.actual == seeded.actual
    assert seeded.schedule.steps == plain.schedule.steps


def test_frame_variant_scaled_iterative():
    base = dft_frame(2, 256)
    frame = FrameSystem(base.vectors * np.sqrt(0.3))
    theta = 0.3
    delta = theta * 2.0 / 256.0
    cert = halving_select_frame(
        frame, FrameBounds(0.3, 0.3), theta, OracleConfig(seed=6)
    )
    assert not cert.fast_path
    assert cert.schedule.steps[0] == (0.3, 0.3)
    assert len(cert.J) <= 128
    assert cert.actual.lower >= 25.0 * delta - 1e-10
    assert cert.actual.upper <= cert.theoretical_upper + 1e-10


def test_frame_variant_fast_path_scaled():
    base = dft_frame(2, 64)
    frame = FrameSystem(base.vectors * np.sqrt(0.3))
    cert = halving_select_frame(frame, FrameBounds(0.3, 0.3), 0.3)
    assert cert.fast_path
    assert cert.theoretical_lower == 0.3 and cert.theoretical_upper == 0.3
    assert abs(cert.actual.lower - 0.3) < 1e-12


def test_frame_variant_validation():
    frame = dft_frame(2, 64)
    with pytest.raises(PreconditionError):
        halving_select_frame(frame, FrameBounds(0.0, 1.0), 1.0)
    with pytest.raises(PreconditionError):
        halving_select_frame(frame, FrameBounds(0.01, 1.0), 1.0)  # A <= delta
    with pytest.raises(PreconditionError):
        halving_select_frame(frame, FrameBounds(1.0, 0.5), 1.0)
    with pytest.raises(PreconditionError):
        halving_select_frame(frame, FrameBounds(0.5, 0.5), 1.0)  # does not hold


def test_cardinality_sandwich_rejections():
    frame = dft_frame(2, 256)
    cert = halving_select(frame, 1.0, OracleConfig(seed=3))
    assert check_cardinality_sandwich(cert, frame)
    empty = dataclasses.replace(cert, J=())
    assert not check_cardinality_sandwich(empty, frame)
    with pytest.raises(PreconditionError):
        check_cardinality_sandwich(dataclasses.replace(cert, J=(0, 999)), frame)
    # a zero vector smuggled into J defeats the norm-based bound
    padded = FrameSystem(
        np.hstack([frame.vectors, np.zeros((2, 1), dtype=complex)])
    )
    smuggled = dataclasses.replace(cert, J=cert.J + (256,))
    assert not check_cardinality_sandwich(smuggled, padded)
