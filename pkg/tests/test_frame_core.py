"""Frame operators, bounds, and their eigensolve plumbing."""

import numpy as np
import pytest

from sampdisc import (
    FrameBounds,
    FrameSystem,
    PreconditionError,
    extreme_eigenvalues,
    frame_bounds,
    frame_operator,
    subset_bounds,
    verify_tight,
    weighted_bounds,
    weighted_frame_operator,
)
from sampdisc.frame_core import hermitian_part

from helpers import loop_frame_operator, quad_form, random_tight_frame, svd_subset_bounds

R2 = 1.0 / np.sqrt(2.0)


def test_extreme_eigenvalues_frozen_2x2():
    # analytic eigenvalues of [[3/2, 1/2], [1/2, 1/2]] are 1 -+ sqrt(2)/2
    lo, hi = extreme_eigenvalues(np.array([[1.5, 0.5], [0.5, 0.5]]))
    assert abs(lo - 0.2928932188134524) < 1e-14
    assert abs(hi - 1.7071067811865475) < 1e-14


def test_extreme_eigenvalues_symmetrizes():
    lo, hi = extreme_eigenvalues(np.array([[1.0, 1.0], [0.0, 1.0]]))
    # hermitian part is [[1, .5], [.5, 1]]
    assert abs(lo - 0.5) < 1e-14 and abs(hi - 1.5) < 1e-14


def test_frame_system_validation():
    with pytest.raises(PreconditionError):
        FrameSystem(np.array([1.0, 2.0]))
    with pytest.raises(PreconditionError):
        FrameSystem(np.zeros((2, 0)))
    with pytest.raises(PreconditionError):
        FrameSystem(np.array([[np.nan, 1.0]]))
    frame = FrameSystem(np.array([[1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        frame.vectors[0, 0] = 5.0  # stored read-only


def test_fields():
    assert FrameSystem(np.eye(2)).field == "real"
    assert FrameSystem(np.eye(2) + 0j).field == "complex"


def test_two_copies_and_axis_frame():
    frame = FrameSystem(np.array([[R2, R2, 0.0], [0.0, 0.0, 1.0]]))
    op = frame_operator(frame)
    assert np.allclose(op, np.eye(2), atol=1e-15)
    assert verify_tight(frame, 1e-12)
    lo, hi = subset_bounds(frame, [0])
    assert lo == 0.0
    assert abs(hi - 0.5) < 1e-14
    assert subset_bounds(frame, []) == FrameBounds(0.0, 0.0)
    w_lo, w_hi = weighted_bounds(frame, [1.0, 0.0, 1.0])
    assert abs(w_lo - 0.5) < 1e-14 and abs(w_hi - 1.0) < 1e-14


def test_frame_operator_matches_loop_oracle():
    rng = np.random.default_rng(11)
    for field in ("real", "complex"):
        frame = random_tight_frame(rng, 4, 17, field=field)
        direct = frame_operator(frame)
        looped = loop_frame_operator(frame)
        assert np.abs(direct - looped).max() < 1e-13
        assert np.abs(direct - direct.conj().T).max() == 0.0  # exactly hermitian


def test_subset_bounds_match_svd_oracle():
    rng = np.random.default_rng(5)
    for field in ("real", "complex"):
        frame = random_tight_frame(rng, 3, 12, field=field)
        for _ in range(40):
            k = int(rng.integers(1, 12))
            subset = rng.choice(12, size=k, replace=False)
            got = subset_bounds(frame, subset)
            want_lo, want_hi = svd_subset_bounds(frame, subset)
            assert abs(got.lower - want_lo) < 1e-10
            assert abs(got.upper - want_hi) < 1e-10


def test_bounds_sandwich_quadratic_form():
    rng = np.random.default_rng(7)
    frame = random_tight_frame(rng, 3, 10, field="complex")
    lam = rng.uniform(0.0, 2.0, 10)
    lo, hi = weighted_bounds(frame, lam)
    for _ in range(100):
        w = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        w /= np.linalg.norm(w)
        val = quad_form(frame, lam, w)
        assert lo - 1e-10 <= val <= hi + 1e-10


def test_subset_bounds_monotone_under_inclusion():
    rng = np.random.default_rng(3)
    frame = random_tight_frame(rng, 3, 9)
    small = [1, 4, 7]
    big = [1, 2, 4, 7, 8]
    b_small = subset_bounds(frame, small)
    b_big = subset_bounds(frame, big)
    assert b_big.lower >= b_small.lower - 1e-12
    assert b_big.upper >= b_small.upper - 1e-12


def test_psd_clamping():
    rng = np.random.default_rng(9)
    frame = random_tight_frame(rng, 4, 6)
    b = subset_bounds(frame, [0, 1])  # rank <= 2 in dim 4
    assert b.lower == 0.0


def test_index_validation():
    frame = FrameSystem(np.eye(3))
    with pytest.raises(PreconditionError):
        subset_bounds(frame, [0, 3])
    with pytest.raises(PreconditionError):
        subset_bounds(frame, [-1])
    with pytest.raises(PreconditionError):
        subset_bounds(frame, [1, 1])


def test_weight_validation():
    frame = FrameSystem(np.eye(3))
    with pytest.raises(PreconditionError):
        weighted_bounds(frame, [1.0, -0.5, 1.0])
    with pytest.raises(PreconditionError):
        weighted_bounds(frame, [1.0, 1.0])
    with pytest.raises(PreconditionError):
        weighted_bounds(frame, [1.0, np.inf, 1.0])
    op = weighted_frame_operator(frame, [2.0, 3.0, 4.0])
    assert np.allclose(op, np.diag([2.0, 3.0, 4.0]))


def test_verify_tight_rejects_scaled():
    frame = FrameSystem(np.eye(3) * 1.1)
    assert not verify_tight(frame, 1e-8)
    assert verify_tight(frame, 0.3)
    with pytest.raises(PreconditionError):
        verify_tight(frame, 0.0)


def test_tight_random_frames_have_unit_bounds():
    rng = np.random.default_rng(21)
    for field in ("real", "complex"):
        frame = random_tight_frame(rng, 5, 23, field=field)
        lo, hi = frame_bounds(frame)
        assert abs(lo - 1.0) < 1e-12 and abs(hi - 1.0) < 1e-12


def test_norms_squared_matches_loop():
    rng = np.random.default_rng(13)
    frame = random_tight_frame(rng, 4, 11, field="complex")
    norms = frame.norms_squared()
    for j in range(11):
        v = frame.vectors[:, j]
        assert abs(norms[j] - float(np.vdot(v, v).real)) < 1e-15
    assert abs(norms.sum() - 4.0) < 1e-12  # trace of identity


def test_hermitian_part():
    m = np.array([[1.0, 2.0], [0.0, 1.0]])
    h = hermitian_part(m)
    assert np.array_equal(h, h.conj().T)
    assert np.allclose(h, [[1.0, 1.0], [1.0, 1.0]])
