"""Norm-equalizing duplication and weighted selection."""

import numpy as np
import pytest

from sampdisc import (
    DuplicationOverflowError,
    FrameSystem,
    OracleConfig,
    PreconditionError,
    duplicate_normalize,
    weighted_select,
)
from sampdisc.frame_core import weighted_bounds

from helpers import loop_frame_operator, quad_form, random_tight_frame


def line_frame(norms_squared):
    """Tight frame in R^1 from prescribed squared norms (must sum to 1)."""
    arr = np.sqrt(np.asarray(norms_squared, dtype=np.float64))
    return FrameSystem(arr[None, :])


def test_equal_norms_no_duplication():
    vals = np.exp(2j * np.pi * np.outer(np.arange(2), np.arange(8)) / 8)
    frame = FrameSystem(vals / np.sqrt(8))
    copies, dup = duplicate_normalize(frame)
    assert dup.counts == (1,) * 8
    assert dup.copy_to_source == tuple(range(8))
    assert dup.m_prime == 8
    assert dup.anchor == 0
    assert np.array_equal(copies.vectors, frame.vectors)


def test_one_to_four_split_frozen():
    frame = line_frame([0.2, 0.8])
    copies, dup = duplicate_normalize(frame)
    assert dup.counts == (1, 4)
    assert dup.copy_to_source == (0, 1, 1, 1, 1)
    assert dup.anchor == 0
    norms = copies.norms_squared()
    assert abs(norms[0] - 0.2) < 1e-15
    assert np.allclose(norms[1:], 0.2, atol=1e-15)


def test_fractional_ratio_floors():
    frame = line_frame([0.2, 0.5, 0.3])
    copies, dup = duplicate_normalize(frame)
    assert dup.counts == (1, 2, 1)
    assert dup.m_prime == 4
    # copy norms: 0.2, 0.25, 0.25, 0.3 -- all in [base, 2 base)
    norms = copies.norms_squared()
    assert norms.min() >= 0.2 - 1e-15
    assert norms.max() < 0.4


def test_zero_vector_rejected():
    # tight frame (operator = I) with a dead third column
    frame = FrameSystem(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
    with pytest.raises(PreconditionError) as err:
        duplicate_normalize(frame)
    assert "vector 2" in str(err.value)


def test_non_tight_rejected():
    with pytest.raises(PreconditionError):
        duplicate_normalize(FrameSystem(np.eye(2) * 1.2))


def test_copy_cap_overflow():
    frame = line_frame([1e-8, 1.0 - 1e-8])
    with pytest.raises(DuplicationOverflowError):
        duplicate_normalize(frame)
    # a generous cap lets it through; the count is floor of the realized
    # norm ratio (squaring the sqrt entries shifts it by an ulp, so the
    # naive (1-1e-8)/1e-8 arithmetic can land one off)
    copies, dup = duplicate_normalize(frame, cap=200_000_000)
    norms = frame.norms_squared()
    assert dup.counts[1] == int(np.floor(norms[1] / norms[0]))
    assert abs(dup.counts[1] - 1e8) <= 2


def test_duplication_preserves_operator_and_trace():
    rng = np.random.default_rng(17)
    for field in ("real", "complex"):
        frame = random_tight_frame(rng, 3, 15, field=field)
        copies, dup = duplicate_normalize(frame)
        op_orig = loop_frame_operator(frame)
        op_copy = loop_frame_operator(copies)
        assert np.abs(op_copy - op_orig).max() < 1e-13
        norms = copies.norms_squared()
        assert abs(norms.sum() - 3.0) < 1e-12
        assert norms.max() < 2.0 * 3.0 / dup.m_prime
        # copies of one source are contiguous, sources ascending
        assert list(dup.copy_to_source) == sorted(dup.copy_to_source)


def test_duplication_preserves_quadratic_form():
    rng = np.random.default_rng(23)
    frame = random_tight_frame(rng, 3, 12, field="complex")
    copies, _ = duplicate_normalize(frame)
    ones_orig = np.ones(frame.m)
    ones_copy = np.ones(copies.m)
    for _ in range(50):
        w = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        w /= np.linalg.norm(w)
        a = quad_form(frame, ones_orig, w)
        b = quad_form(copies, ones_copy, w)
        assert abs(a - b) < 1e-10


def test_weighted_single_vector_half():
    cert = weighted_select(line_frame([1.0]))
    assert cert.weights == (0.5,)
    assert cert.support == (0,)
    assert cert.bounds == (0.5, 0.5)
    assert cert.support_budget == 1
    assert cert.halving.fast_path


def test_weighted_fast_path_dft_frozen():
    vals = np.exp(2j * np.pi * np.outer(np.arange(2), np.arange(8)) / 8)
    frame = FrameSystem(vals / np.sqrt(8))
    cert = weighted_select(frame)
    # scale m'/2n = 2, every copy kept, counts 1
    assert cert.weights == (2.0,) * 8
    assert cert.support == tuple(range(8))
    assert abs(cert.bounds.lower - 2.0) < 1e-12
    assert abs(cert.bounds.upper - 2.0) < 1e-12


def test_weighted_iterative_line():
    # 300 equal vectors in R^1: copies = sources, delta = 1/150 < 1/100,
    # one halving round keeps 150, weights scale to 150 each
    frame = line_frame(np.full(300, 1.0 / 300.0))
    cert = weighted_select(frame, OracleConfig(seed=1))
    assert not cert.halving.fast_path
    assert cert.halving.schedule.rounds == 1
    assert cert.support_budget == 150
    assert len(cert.support) == 150
    assert cert.bounds.lower >= 25.0 - 1e-8
    assert abs(cert.bounds.lower - 75.0) < 1e-9  # 150 kept * 150 / 300
    nonzero = [w for w in cert.weights if w > 0]
    assert np.allclose(nonzero, 150.0)


def test_weighted_mixed_norms_iterative():
    # one heavy direction duplicated many times; support maps back to
    # far fewer sources than copies
    norms = np.concatenate([[80.0], np.full(100, 0.21)]) / 101.0
    frame = line_frame(norms / norms.sum())
    cert = weighted_select(frame, OracleConfig(seed=2))
    dup = cert.duplication
    assert dup.counts[0] == int(80.0 / 0.21)
    assert not cert.halving.fast_path
    assert cert.bounds.lower >= 25.0 - 1e-8
    assert len(cert.support) <= len(cert.halving.J)
    assert len(cert.support) < frame.m
    # bounds recompute from the stored weights alone
    lo, up = weighted_bounds(frame, np.asarray(cert.weights))
    assert abs(lo - cert.bounds.lower) < 1e-12
    assert abs(up - cert.bounds.upper) < 1e-12


def test_weighted_respects_cap():
    frame = line_frame([1e-8, 1.0 - 1e-8])
    with pytest.raises(DuplicationOverflowError):
        weighted_select(frame, cap=1000)


def test_weighted_reconstruction_identity():
    rng = np.random.default_rng(31)
    frame = random_tight_frame(rng, 4, 20)
    cert = weighted_select(frame, OracleConfig(seed=3))
    lam = np.asarray(cert.weights)
    assert (lam >= 0.0).all()
    assert set(np.flatnonzero(lam)) == set(cert.support)
    # the measured interval really bounds the weighted form
    for _ in range(50):
        w = rng.standard_normal(4)
        w /= np.linalg.norm(w)
        val = quad_form(frame, lam, w)
        assert cert.bounds.lower - 1e-9 <= val <= cert.bounds.upper + 1e-9
