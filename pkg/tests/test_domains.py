"""Siegel and bounded realizations: kernels, the realization map, the
Cayley bridge, the SVD closed form and its power series."""

import math

import numpy as np
import pytest

from matbratu import linalg
from matbratu.bdi import BdiGenerator, block_gauss, exp_trajectory
from matbratu.domains import (
    BoundedGenerator,
    DomainPoint,
    bounded_basepoint,
    bounded_shilov,
    bounded_slack,
    canonicalize_siegel,
    cayley_map,
    cayley_matrix,
    closed_form_from_factors,
    closed_form_h,
    cone_action,
    delta,
    delta_bratu_point,
    delta_bratu_solution,
    delta_pathway_h,
    domain_action,
    eval_power_series,
    generator_svd,
    half_gauss_h,
    indefinite_form,
    isometry_generator,
    j_pairing,
    leading_block,
    power_series_h,
    psi,
    psi_pathway_h,
    shilov_basepoint,
    siegel_basepoint,
    siegel_slack,
    taylor_delta_fit,
    taylor_psi_fit,
    to_domain,
)
from matbratu.errors import (
    PointAtInfinityError,
    PreconditionError,
    ValidationError,
)
from matbratu.instances import random_bdi


def c_zero(gen):
    return BdiGenerator(gen.b, gen.a, np.zeros((gen.n, gen.n)))


def test_frame_constants_are_consistent():
    # L = A Jd A^T with A orthogonal
    for n, r in ((1, 0), (2, 1), (3, 2)):
        A = cayley_matrix(n, r)
        assert linalg.max_norm(A @ A.T - np.eye(2 * n + r)) < 1e-15
        assert linalg.max_norm(A @ j_pairing(n, r) @ A.T - indefinite_form(n, r)) < 1e-15


def test_basepoints_map_through_cayley():
    n, r = 2, 1
    v0 = cayley_map(siegel_basepoint(n, r))
    np.testing.assert_allclose(v0.U, bounded_basepoint(n, r).U, atol=1e-15)
    z = cayley_map(shilov_basepoint(n, r))
    np.testing.assert_allclose(z.U, bounded_shilov(n, r).U, atol=1e-15)


def test_delta_at_basepoint():
    u0 = siegel_basepoint(3, 2)
    np.testing.assert_allclose(delta(u0, u0), 2.0 * np.eye(3), atol=1e-15)


def test_delta_vanishes_on_shilov():
    w = shilov_basepoint(2, 1)
    np.testing.assert_allclose(delta(w, w), 0.0, atol=1e-15)
    np.testing.assert_allclose(siegel_slack(w), 0.0, atol=1e-15)


def test_slack_of_interior_point_is_spd():
    gen = random_bdi(2, 2, seed=3, scale=0.6)
    u = to_domain(exp_trajectory(gen, 0.8))
    slack = siegel_slack(u)
    assert linalg.is_spd(slack)
    # slack of the normalized representative equals the kernel diagonal
    assert linalg.max_norm(slack - linalg.symmetrize(delta(u, u))) < 1e-12


def test_delta_representative_independence():
    rng = np.random.default_rng(7)
    gen = random_bdi(3, 1, seed=7, scale=0.6)
    u1 = to_domain(exp_trajectory(gen, 0.4))
    u2 = to_domain(exp_trajectory(gen, 0.9))
    base = delta(u1, u2)
    for _ in range(10):
        g1 = np.linalg.qr(rng.standard_normal((3, 3)))[0] @ np.diag(
            rng.uniform(0.5, 2.0, 3)
        )
        g2 = np.linalg.qr(rng.standard_normal((3, 3)))[0] @ np.diag(
            rng.uniform(0.5, 2.0, 3)
        )
        moved = delta(
            DomainPoint(u1.U @ g1, 3, 1), DomainPoint(u2.U @ g2, 3, 1)
        )
        assert linalg.max_norm(moved - base) < 1e-10


def test_delta_point_at_infinity():
    # third block singular: cannot normalize against the Siegel frame
    U = np.vstack([np.eye(2), np.zeros((1, 2)), np.zeros((2, 2))])
    bad = DomainPoint(U, 2, 1)
    with pytest.raises(PointAtInfinityError):
        delta(bad, bad)


def test_realization_map_at_identity():
    gen = random_bdi(2, 1, seed=0)
    point = exp_trajectory(gen, 0.0)
    u = canonicalize_siegel(to_domain(point))
    np.testing.assert_allclose(u.U, siegel_basepoint(2, 1).U, atol=1e-14)
    np.testing.assert_allclose(leading_block(point), np.eye(2), atol=1e-14)


def test_half_leading_block_identity():
    for seed in range(50):
        n = 1 + seed % 4
        r = seed % 3
        gen = random_bdi(n, r, seed=seed, scale=0.5)
        point = exp_trajectory(gen, 0.3 + 0.1 * (seed % 4))
        u = to_domain(point)
        d = linalg.symmetrize(delta(u, u))
        gap = linalg.max_norm(0.5 * leading_block(point) - linalg.spd_inverse(d))
        assert gap < 1e-10


def test_equivariance_under_isometries():
    rng = np.random.default_rng(42)
    gen = random_bdi(2, 2, seed=15, scale=0.5)
    point = exp_trajectory(gen, 0.5)
    for _ in range(5):
        S = rng.standard_normal((6, 6))
        X = isometry_generator(2, 2, 0.5 * (S - S.T))
        g = linalg.expm(0.3 * X)
        left = canonicalize_siegel(to_domain(cone_action(g, point)))
        right = canonicalize_siegel(domain_action(g, to_domain(point)))
        assert linalg.max_norm(left.U - right.U) < 1e-10


def test_taylor_fit_zero_generator():
    gen = BdiGenerator(np.zeros((2, 2)), np.zeros((2, 1)), np.zeros((2, 2)))
    o1, o2 = taylor_delta_fit(gen)
    assert linalg.max_norm(o1) < 1e-10
    assert linalg.max_norm(o2) < 1e-8


def test_taylor_fit_a_only():
    a = np.array([[1.0], [0.5]])
    gen = BdiGenerator(np.zeros((2, 2)), a, np.zeros((2, 2)))
    o1, o2 = taylor_delta_fit(gen)
    assert linalg.max_norm(o1) < 1e-4
    assert linalg.max_norm(o2 - a @ a.T) < 1e-4


def test_taylor_fit_full_generator():
    gen = random_bdi(2, 1, seed=29, scale=0.7)
    o1, o2 = taylor_delta_fit(gen)
    assert linalg.max_norm(o1 + gen.c) < 1e-4
    target = gen.a @ gen.a.T - gen.b @ gen.c - gen.c @ gen.b
    assert linalg.max_norm(o2 - target) < 1e-4


def test_kernel_pathway_b_only():
    b = np.diag([0.3, -0.2])
    gen = BdiGenerator(b, np.zeros((2, 1)), np.zeros((2, 2)))
    for s in (0.0, 0.6):
        h = delta_pathway_h(gen, s)
        ref = 0.5 * linalg.expm(-2.0 * s * b)
        assert linalg.max_norm(h - ref) < 1e-12
    _, res = delta_bratu_point(gen, 0.6)
    assert res < 1e-9


def test_kernel_pathway_is_half_gauss():
    gen = c_zero(random_bdi(3, 2, seed=51, scale=0.5))
    for s in (0.2, 0.7, 1.1):
        gap = linalg.max_norm(delta_pathway_h(gen, s) - half_gauss_h(gen, s))
        assert gap < 1e-10


def test_kernel_bratu_scalar():
    gen = BdiGenerator(np.zeros((1, 1)), np.ones((1, 1)), np.zeros((1, 1)))
    traj = delta_bratu_solution(gen, np.linspace(0.0, 1.0, 6))
    assert traj.max_residual() < 1e-8
    for k, s in enumerate(traj.s):
        ref = 0.5 * math.cosh(math.sqrt(2.0) * s) ** 2
        assert abs(traj.h[k, 0, 0] - ref) < 1e-10


def test_kernel_bratu_rejects_nonzero_c():
    gen = random_bdi(2, 1, seed=70)
    with pytest.raises(PreconditionError):
        delta_bratu_solution(gen, np.linspace(0.0, 1.0, 5))


def test_psi_matches_delta_through_cayley():
    gen = random_bdi(2, 2, seed=33, scale=0.5)
    u1 = to_domain(exp_trajectory(gen, 0.3))
    u2 = to_domain(exp_trajectory(gen, 0.8))
    gap = linalg.max_norm(psi(cayley_map(u1), cayley_map(u2)) - delta(u1, u2))
    assert gap < 1e-10
    np.testing.assert_allclose(
        psi(bounded_basepoint(2, 2), bounded_basepoint(2, 2)),
        2.0 * np.eye(2),
        atol=1e-14,
    )


def test_bounded_membership_of_cayley_images():
    gen = random_bdi(2, 1, seed=44, scale=0.6)
    v = cayley_map(to_domain(exp_trajectory(gen, 0.7)))
    assert linalg.is_spd(bounded_slack(v))


def test_bounded_generator_shapes():
    gen = c_zero(random_bdi(2, 2, seed=3, scale=0.5))
    bounded = BoundedGenerator.from_bdi(gen)
    B = bounded.embed()
    assert np.array_equal(B, B.T)
    assert linalg.max_norm(B[:2, :2]) == 0.0
    assert linalg.max_norm(B[2:, 2:]) == 0.0
    with pytest.raises(ValidationError):
        BoundedGenerator.from_matrix(np.eye(6), 2)


def test_closed_form_zero_block():
    bounded = BoundedGenerator(np.zeros((3, 2)), 2, 1)
    traj = closed_form_h(bounded, np.linspace(-1.0, 1.0, 5))
    for k in range(5):
        np.testing.assert_allclose(traj.h[k], 0.5 * np.eye(2), atol=1e-15)


def test_closed_form_at_zero():
    bounded = BoundedGenerator.from_bdi(c_zero(random_bdi(2, 1, seed=10, scale=0.7)))
    traj = closed_form_h(bounded, np.array([0.0]))
    np.testing.assert_allclose(traj.h[0], 0.5 * np.eye(2), atol=1e-13)


def test_closed_form_scalar_against_kernel():
    # n = r = 1, unit singular value, several orientations of the C block
    for c1, c2 in ((1.0, 0.0), (0.0, 1.0), (0.6, 0.8)):
        bounded = BoundedGenerator(np.array([[c1], [c2]]), 1, 1)
        grid = np.linspace(-1.0, 1.0, 7)
        closed = closed_form_h(bounded, grid)
        kernel = psi_pathway_h(bounded, grid)
        assert linalg.max_norm(closed.h - kernel.h) < 1e-12


def test_closed_form_seeded_against_kernel():
    for seed in range(10):
        gen = random_bdi(2, 2, seed=seed, scale=0.5)
        bounded = BoundedGenerator.from_bdi(gen)
        grid = np.linspace(-0.8, 0.8, 7)
        closed = closed_form_h(bounded, grid)
        kernel = psi_pathway_h(bounded, grid)
        assert linalg.max_norm(closed.h - kernel.h) < 1e-9
        assert all(linalg.is_spd(closed.h[k]) for k in range(len(grid)))


def test_closed_form_gauge_invariance():
    rng = np.random.default_rng(2)
    # repeated singular values (two equal) plus a zero one
    q0 = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    p0 = np.linalg.qr(rng.standard_normal((4, 4)))[0]
    C = p0 @ linalg.bottom_embed(np.array([1.1, 1.1, 0.0]), 1) @ q0.T
    bounded = BoundedGenerator(C, 3, 1)
    grid = np.linspace(-0.7, 0.7, 5)
    base = closed_form_h(bounded, grid)
    kernel = psi_pathway_h(bounded, grid)
    assert linalg.max_norm(base.h - kernel.h) < 1e-9
    f = generator_svd(bounded)
    # sign flips and a permutation applied to matched columns
    flips = np.diag([-1.0, 1.0, -1.0])
    perm = [2, 0, 1]
    variant = closed_form_from_factors(
        (f.p @ flips)[:, perm], (f.q @ flips)[:, perm], f.sigma[perm], grid
    )
    assert linalg.max_norm(variant.h - base.h) < 1e-10
    # rotation inside the repeated block, independent rotation of the zero block
    theta = 0.77
    rot = np.eye(3)
    rot[:2, :2] = [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    variant2 = closed_form_from_factors(f.p @ rot, f.q @ rot, f.sigma, grid)
    assert linalg.max_norm(variant2.h - base.h) < 1e-10
    qz = f.q.copy()
    qz[:, 2] *= -1.0  # zero singular value: q column free independently of p
    variant3 = closed_form_from_factors(f.p, qz, f.sigma, grid)
    assert linalg.max_norm(variant3.h - base.h) < 1e-10


def test_power_series_leading_coefficients():
    bounded = BoundedGenerator.from_bdi(c_zero(random_bdi(2, 1, seed=12, scale=0.6)))
    coeffs = power_series_h(bounded, 3)
    np.testing.assert_allclose(coeffs[0], 0.5 * np.eye(2), atol=1e-15)
    f = generator_svd(bounded)
    first = -0.5 * (f.p @ np.diag(f.sigma) @ f.q.T + f.q @ np.diag(f.sigma) @ f.p.T)
    np.testing.assert_allclose(coeffs[1], first, atol=1e-14)


def test_power_series_matches_closed_form():
    gen = random_bdi(2, 2, seed=91, scale=0.5)
    bounded = BoundedGenerator.from_bdi(gen)
    coeffs = power_series_h(bounded, 12)
    grid = np.array([-0.5, -0.3, 0.3, 0.5])
    closed = closed_form_h(bounded, grid)
    for k, s in enumerate(grid):
        assert linalg.max_norm(eval_power_series(coeffs, s) - closed.h[k]) < 1e-10


def test_power_series_truncation_rate():
    bounded = BoundedGenerator.from_bdi(c_zero(random_bdi(2, 1, seed=55, scale=0.5)))
    sig_max = float(generator_svd(bounded).sigma.max())
    closed = closed_form_h(bounded, np.array([0.5]))
    for order in (4, 8, 12):
        coeffs = power_series_h(bounded, order)
        err = linalg.max_norm(eval_power_series(coeffs, 0.5) - closed.h[0])
        x = 2.0 * sig_max * 0.5
        bound = 0.5 * x ** (order + 1) / math.factorial(order + 1) * math.exp(x) + 1e-10
        assert err <= bound


def test_quadratic_hypothesis_on_bounded_side():
    # the bounded-side expansion of psi(z, exp(sB) z) starts at (a a^T) s^2/2
    # exactly when the skew block vanishes; verified per instance
    gen = c_zero(random_bdi(2, 1, seed=14, scale=0.6))
    bounded = BoundedGenerator.from_bdi(gen)
    o1, o2 = taylor_psi_fit(bounded)
    assert linalg.max_norm(o1) < 1e-4
    assert linalg.max_norm(o2 - gen.a @ gen.a.T) < 1e-4
