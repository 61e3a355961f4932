"""Variational layer: velocity split, trace orthogonality, the
three-equation system and its conserved matrices."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matbratu import linalg
from matbratu.bdi import BdiGenerator, gauss_jet
from matbratu.errors import ValidationError
from matbratu.instances import random_bdi
from matbratu.lagrangian import (
    conserved_quantities,
    el_system_residuals,
    geodesic_residual,
    lagrangian_breakdown,
    trace_orthogonality,
)


def test_breakdown_zero_generator():
    gen = BdiGenerator(np.zeros((2, 2)), np.zeros((2, 1)), np.zeros((2, 2)))
    br = lagrangian_breakdown(gen, 0.7)
    assert br.total == br.kinetic_h == br.cross == br.twist == 0.0


def test_breakdown_b_only_flow():
    b = linalg.symmetrize(np.random.default_rng(1).uniform(-1, 1, (3, 3)))
    gen = BdiGenerator(b, np.zeros((3, 2)), np.zeros((3, 3)))
    br = lagrangian_breakdown(gen, 0.6)
    assert abs(br.cross) < 1e-12 and abs(br.twist) < 1e-12
    assert abs(br.total - np.trace(b @ b)) < 1e-12
    assert abs(br.kinetic_h - np.trace(b @ b)) < 1e-12


def test_breakdown_seeded_full_generator():
    gen = random_bdi(3, 2, seed=77, scale=0.6)
    assert linalg.max_norm(gen.c) > 0
    for s in (-0.8, 0.4, 1.1):
        br = lagrangian_breakdown(gen, s)
        gap = abs(br.total - (br.kinetic_h + br.cross + br.twist))
        assert gap < 1e-9
        B = gen.embed()
        assert abs(br.total - 0.5 * np.trace(B @ B)) < 1e-10


def test_trace_orthogonality_zero_operand():
    X1 = np.eye(5)  # block-diagonal counts as block lower triangular
    assert trace_orthogonality(X1, np.zeros((5, 5)), 2, 1) == 0.0


def test_trace_orthogonality_seeded():
    rng = np.random.default_rng(123)
    n, r = 3, 2
    cuts = (0, n, n + r, 2 * n + r)
    for _ in range(100):
        X1 = np.zeros((2 * n + r,) * 2)
        X2 = np.zeros((2 * n + r,) * 2)
        for i in range(3):
            for j in range(3):
                blk = (slice(cuts[i], cuts[i + 1]), slice(cuts[j], cuts[j + 1]))
                if j <= i:
                    X1[blk] = rng.standard_normal(X1[blk].shape)
                if j < i:
                    X2[blk] = rng.standard_normal(X2[blk].shape)
        assert trace_orthogonality(X1, X2, n, r) == 0.0


def test_trace_orthogonality_strict_pair():
    rng = np.random.default_rng(5)
    n, r = 2, 1
    X = np.zeros((5, 5))
    X[n:, :n] = rng.standard_normal((3, 2))
    X[n + r :, n : n + r] = rng.standard_normal((2, 1))
    assert trace_orthogonality(X, X, n, r) == 0.0


def test_trace_orthogonality_rejects_bad_pattern():
    bad = np.ones((5, 5))
    with pytest.raises(ValidationError):
        trace_orthogonality(bad, np.zeros((5, 5)), 2, 1)
    with pytest.raises(ValidationError):
        trace_orthogonality(np.zeros((5, 5)), np.eye(5), 2, 1)


@settings(deadline=None, max_examples=40)
@given(
    n=st.integers(min_value=1, max_value=4),
    r=st.integers(min_value=0, max_value=3),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_trace_orthogonality_property(n, r, seed):
    rng = np.random.default_rng(seed)
    cuts = (0, n, n + r, 2 * n + r)
    X1 = np.zeros((2 * n + r,) * 2)
    X2 = np.zeros((2 * n + r,) * 2)
    for i in range(3):
        for j in range(3):
            blk = (slice(cuts[i], cuts[i + 1]), slice(cuts[j], cuts[j + 1]))
            if j <= i:
                X1[blk] = rng.uniform(-10.0, 10.0, size=X1[blk].shape)
            if j < i:
                X2[blk] = rng.uniform(-10.0, 10.0, size=X2[blk].shape)
    assert trace_orthogonality(X1, X2, n, r) == 0.0


def test_geodesic_residual_zero_generator():
    gen = BdiGenerator(np.zeros((2, 2)), np.zeros((2, 1)), np.zeros((2, 2)))
    assert geodesic_residual(gen, np.linspace(0.0, 0.04, 5)) < 1e-14


def test_geodesic_residual_seeded():
    gen = random_bdi(3, 2, seed=2, scale=0.5)
    grid = np.linspace(0.0, 1.0, 101)
    assert geodesic_residual(gen, grid[:5]) < 1e-8
    assert geodesic_residual(gen, grid[48:53]) < 1e-8


def test_geodesic_residual_scaled_family():
    gen = random_bdi(2, 1, seed=3, scale=0.4)
    grid = 0.3 + 0.01 * np.arange(5)
    assert geodesic_residual(gen, grid) < 1e-8
    assert geodesic_residual(gen.scaled(2.0), grid) < 1e-8


def test_geodesic_residual_needs_five_points():
    gen = random_bdi(2, 1, seed=3)
    with pytest.raises(ValidationError):
        geodesic_residual(gen, np.linspace(0.0, 1.0, 4))


def test_el_zero_generator():
    gen = BdiGenerator(np.zeros((2, 2)), np.zeros((2, 1)), np.zeros((2, 2)))
    traj = el_system_residuals(gen, np.linspace(0.0, 1.0, 5))
    assert traj.max_residual() == 0.0


def test_el_c_zero_reduces_to_bratu():
    gen = random_bdi(3, 2, seed=31, scale=0.5)
    plain = BdiGenerator(gen.b, gen.a, np.zeros((3, 3)))
    traj = el_system_residuals(plain, np.linspace(0.0, 1.0, 9))
    assert traj.max_residual() < 1e-9
    # with c = 0 the first equation's right side equals (a a^T) h^{-1}
    # after substituting h n1' = a; check the two forms agree
    for s in (0.2, 0.7):
        jet = gauss_jet(plain, s)
        assert (
            linalg.max_norm(
                jet.h @ jet.dn1 @ jet.dn1.T - (plain.a @ plain.a.T) @ jet.hinv
            )
            < 1e-9
        )


def test_el_full_system_small_skew():
    c = np.array([[0.0, 0.3], [-0.3, 0.0]])
    gen = BdiGenerator(np.diag([0.2, -0.1]), np.array([[0.5], [0.1]]), c)
    traj = el_system_residuals(gen, np.linspace(0.0, 1.0, 11))
    assert traj.max_residual() < 1e-9


def test_conserved_b_only():
    b = linalg.symmetrize(np.random.default_rng(8).uniform(-1, 1, (3, 3)))
    gen = BdiGenerator(b, np.zeros((3, 2)), np.zeros((3, 3)))
    cq, drift = conserved_quantities(gen, np.linspace(0.0, 1.0, 11))
    assert linalg.max_norm(cq.c_tilde) < 1e-12
    assert linalg.max_norm(cq.a_tilde) < 1e-12
    assert drift < 1e-12


def test_conserved_match_generator_blocks():
    for seed in (11, 12, 13):
        gen = random_bdi(3, 2, seed=seed, scale=0.5)
        cq, drift = conserved_quantities(gen, np.linspace(0.0, 1.0, 21))
        assert linalg.max_norm(cq.c_tilde - gen.c) < 1e-9
        assert linalg.max_norm(cq.a_tilde - gen.a) < 1e-9
        assert drift < 1e-9


def test_conserved_drift_long_span():
    gen = random_bdi(2, 2, seed=21, scale=0.4)
    _, drift = conserved_quantities(gen, np.linspace(0.0, 2.0, 200))
    assert drift < 1e-9
