"""Verification suites: each check evaluates one identity on one instance
and reports a residual against its fixed tolerance.

Suites are grouped by layer (gauss, lagrangian, domain, series, oracle);
``all`` runs everything applicable to the instance type. The series suite
only exists for bdi instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bdi, ci, domains, lagrangian, linalg, oracle
from .bdi import BdiGenerator
from .ci import CiGenerator
from .errors import ValidationError

SUITES = ("all", "gauss", "lagrangian", "domain", "series", "oracle")

# parameter samples shared by the checks; kept small so a full run stays fast
_S_SAMPLES = (0.2, 0.45, 0.8)
_PAIR = (0.3, 0.6)


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def _well_conditioned(rng, n):
    # orthogonal @ diag @ orthogonal keeps the condition number below 4
    q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return q1 @ np.diag(rng.uniform(0.5, 2.0, size=n)) @ q2


def _bdi_gauss(gen: BdiGenerator) -> list[Check]:
    J = bdi.j_reflection(gen.n, gen.r)
    memb = trip = closure = semi = logd = 0.0
    B = gen.embed()
    for s in _S_SAMPLES:
        point = bdi.exp_trajectory(gen, s)
        G = point.G
        Ginv = linalg.spd_inverse(G)
        memb = max(
            memb,
            linalg.max_norm(J @ G @ J - Ginv) / max(1.0, linalg.max_norm(Ginv)),
        )
        factors = bdi.block_gauss(point)
        trip = max(
            trip,
            linalg.max_norm(bdi.gauss_compose(factors).G - G)
            / max(1.0, linalg.max_norm(G)),
        )
        closure = max(
            closure,
            linalg.max_norm(factors.n2 + factors.n2.T + factors.n1 @ factors.n1.T),
        )
        logd = max(logd, linalg.max_norm((B @ G) @ Ginv - B))
    s, t = _PAIR
    semi = linalg.max_norm(
        bdi.exp_trajectory(gen, s).G @ bdi.exp_trajectory(gen, t).G
        - bdi.exp_trajectory(gen, s + t).G
    ) / max(1.0, linalg.max_norm(bdi.exp_trajectory(gen, s + t).G))
    return [
        Check("cone_membership", memb, 1e-10),
        Check("gauss_round_trip", trip, 1e-11),
        Check("unipotent_closure", closure, 1e-10),
        Check("semigroup", semi, 1e-10),
        Check("log_derivative", logd, 1e-11),
    ]


def _bdi_lagrangian(gen: BdiGenerator, rng) -> list[Check]:
    B = gen.embed()
    half_tr = 0.5 * float(np.trace(B @ B))
    split = total_gap = 0.0
    for s in _S_SAMPLES:
        br = lagrangian.lagrangian_breakdown(gen, s)
        split = max(split, abs(br.total - (br.kinetic_h + br.cross + br.twist)))
        total_gap = max(total_gap, abs(br.total - half_tr))
    traj = lagrangian.el_system_residuals(gen, np.linspace(0.0, 1.0, 9))
    cq, drift = lagrangian.conserved_quantities(gen, np.linspace(0.0, 2.0, 21))
    match = max(
        linalg.max_norm(cq.c_tilde - gen.c), linalg.max_norm(cq.a_tilde - gen.a)
    )
    geo = lagrangian.geodesic_residual(gen, 0.5 + 0.01 * np.arange(5))
    ortho = 0.0
    n, r = gen.n, gen.r
    cuts = (0, n, n + r, 2 * n + r)
    for _ in range(50):
        X1 = np.zeros((2 * n + r, 2 * n + r))
        X2 = np.zeros((2 * n + r, 2 * n + r))
        for i in range(3):
            for j in range(3):
                blk = (slice(cuts[i], cuts[i + 1]), slice(cuts[j], cuts[j + 1]))
                if j <= i:
                    X1[blk] = rng.standard_normal(X1[blk].shape)
                if j < i:
                    X2[blk] = rng.standard_normal(X2[blk].shape)
        ortho = max(ortho, abs(lagrangian.trace_orthogonality(X1, X2, n, r)))
    return [
        Check("velocity_split", split, 1e-9),
        Check("velocity_total", total_gap, 1e-10),
        Check("el_eq_h", float(traj.residuals["eq_h"].max()), 1e-9),
        Check("el_eq_n1", float(traj.residuals["eq_n1"].max()), 1e-9),
        Check("el_eq_n2", float(traj.residuals["eq_n2"].max()), 1e-9),
        Check("conserved_match", match, 1e-9),
        Check("conserved_drift", drift, 1e-9),
        Check("geodesic_fd", geo, 1e-8),
        Check("trace_orthogonality", ortho, 0.0),
    ]


def _bdi_domain(gen: BdiGenerator, rng) -> list[Check]:
    n, r = gen.n, gen.r
    u0 = domains.siegel_basepoint(n, r)
    base = linalg.max_norm(domains.delta(u0, u0) - 2.0 * np.eye(n))
    half = comm = indep = equi = slack_neg = 0.0
    A = domains.cayley_matrix(n, r)
    for s in _S_SAMPLES:
        point = bdi.exp_trajectory(gen, s)
        u = domains.to_domain(point)
        d = domains.delta(u, u)
        half = max(
            half,
            linalg.max_norm(
                0.5 * domains.leading_block(point) - linalg.spd_inverse(linalg.symmetrize(d))
            ),
        )
        slack = domains.siegel_slack(u)
        slack_neg = max(slack_neg, max(0.0, -float(np.linalg.eigvalsh(slack).min())))
    s, t = _PAIR
    u1 = domains.to_domain(bdi.exp_trajectory(gen, s))
    u2 = domains.to_domain(bdi.exp_trajectory(gen, t))
    d12 = domains.delta(u1, u2)
    comm = linalg.max_norm(
        domains.psi(domains.cayley_map(u1), domains.cayley_map(u2)) - d12
    )
    g1 = _well_conditioned(rng, n)
    g2 = _well_conditioned(rng, n)
    indep = linalg.max_norm(
        domains.delta(
            domains.DomainPoint(u1.U @ g1, n, r), domains.DomainPoint(u2.U @ g2, n, r)
        )
        - d12
    )
    S = rng.standard_normal((2 * n + r, 2 * n + r))
    X = domains.isometry_generator(n, r, 0.5 * (S - S.T))
    g = linalg.expm(0.3 * X)
    point = bdi.exp_trajectory(gen, 0.4)
    left = domains.canonicalize_siegel(domains.to_domain(domains.cone_action(g, point)))
    right = domains.canonicalize_siegel(
        domains.domain_action(g, domains.to_domain(point))
    )
    equi = linalg.max_norm(left.U - right.U)
    o1, o2 = domains.taylor_delta_fit(gen)
    t1 = linalg.max_norm(o1 + gen.c)
    t2 = linalg.max_norm(o2 - (gen.a @ gen.a.T - gen.b @ gen.c - gen.c @ gen.b))
    checks = [
        Check("kernel_basepoint", base, 1e-12),
        Check("half_leading_block", half, 1e-10),
        Check("cayley_commutes", comm, 1e-10),
        Check("representative_independence", indep, 1e-10),
        Check("siegel_membership", slack_neg, 0.0),
        Check("equivariance", equi, 1e-10),
        Check("taylor_order1", t1, 1e-4),
        Check("taylor_order2", t2, 1e-4),
    ]
    if linalg.max_norm(gen.c) == 0.0:
        gap = fd = 0.0
        for s in _S_SAMPLES:
            h, res = domains.delta_bratu_point(gen, s)
            gap = max(gap, linalg.max_norm(h - domains.half_gauss_h(gen, s)))
            fd = max(fd, res)
        checks.append(Check("kernel_pathway_half", gap, 1e-10))
        checks.append(Check("kernel_bratu_fd", fd, 1e-8))
    return checks


def _bdi_series(gen: BdiGenerator, rng) -> list[Check]:
    bg = domains.BoundedGenerator.from_bdi(gen)
    grid = np.linspace(-0.5, 0.5, 5)
    closed = domains.closed_form_h(bg, grid)
    kernel = domains.psi_pathway_h(bg, grid)
    vs_kernel = linalg.max_norm(closed.h - kernel.h)
    coeffs = domains.power_series_h(bg, 12)
    trunc = 0.0
    for i, s in enumerate(grid):
        trunc = max(
            trunc, linalg.max_norm(domains.eval_power_series(coeffs, s) - closed.h[i])
        )
    f = domains.generator_svd(bg)
    flips = np.diag(rng.choice([-1.0, 1.0], size=bg.n))
    perm = rng.permutation(bg.n)
    p2 = (f.p @ flips)[:, perm]
    q2 = (f.q @ flips)[:, perm]
    sig2 = f.sigma[perm]
    gauge = linalg.max_norm(
        domains.closed_form_from_factors(p2, q2, sig2, grid).h - closed.h
    )
    checks = [
        Check("closed_form_vs_kernel", vs_kernel, 1e-9),
        Check("series_truncation", trunc, 1e-8),
        Check("svd_gauge", gauge, 1e-10),
    ]
    if linalg.max_norm(gen.c) == 0.0:
        o1, o2 = domains.taylor_psi_fit(bg)
        hyp = max(linalg.max_norm(o1), linalg.max_norm(o2 - gen.a @ gen.a.T))
        checks.append(Check("quadratic_hypothesis", hyp, 1e-4))
    return checks


def _bdi_oracle(gen: BdiGenerator) -> list[Check]:
    plain = BdiGenerator(gen.b, gen.a, np.zeros_like(gen.c))
    traj = oracle.integrate_bratu_bdi(
        np.eye(gen.n), plain.b, plain.a, (0.0, 1.0), 1e-3
    )
    ref = bdi.block_gauss(bdi.exp_trajectory(plain, 1.0)).h
    rk = linalg.max_norm(traj.h[-1] - ref)
    B = gen.embed()
    agree = 0.0
    for s in _S_SAMPLES:
        agree = max(
            agree, linalg.max_norm(oracle.series_expm(s * B) - linalg.expm(s * B))
        )
    return [
        Check("rk4_vs_exponential", rk, 1e-6),
        Check("series_expm_agreement", agree, 1e-10),
    ]


def _ci_gauss(gen: CiGenerator) -> list[Check]:
    K = ci.k_form(gen.n)
    memb = trip = sym = semi = logd = 0.0
    B = gen.embed()
    for s in _S_SAMPLES:
        point = ci.exp_trajectory(gen, s)
        G = point.G
        memb = max(memb, linalg.max_norm(G @ K @ G.T - K))
        factors = ci.block_gauss(point)
        trip = max(
            trip,
            linalg.max_norm(ci.gauss_compose(factors).G - G)
            / max(1.0, linalg.max_norm(G)),
        )
        raw_n1 = G[gen.n :, : gen.n] @ linalg.spd_inverse(factors.h)
        sym = max(sym, linalg.max_norm(raw_n1 - raw_n1.T))
        logd = max(logd, linalg.max_norm((B @ G) @ linalg.spd_inverse(G) - B))
    s, t = _PAIR
    semi = linalg.max_norm(
        ci.exp_trajectory(gen, s).G @ ci.exp_trajectory(gen, t).G
        - ci.exp_trajectory(gen, s + t).G
    ) / max(1.0, linalg.max_norm(ci.exp_trajectory(gen, s + t).G))
    return [
        Check("symplectic_membership", memb, 1e-10),
        Check("gauss_round_trip", trip, 1e-11),
        Check("n1_symmetry", sym, 1e-10),
        Check("semigroup", semi, 1e-10),
        Check("log_derivative", logd, 1e-11),
    ]


def _ci_lagrangian(gen: CiGenerator) -> list[Check]:
    B = gen.embed()
    half_tr = 0.5 * float(np.trace(B @ B))
    split = total_gap = 0.0
    for s in _S_SAMPLES:
        total, kin, cross = ci.lagrangian_identity(gen, s)
        split = max(split, abs(total - (kin + cross)))
        total_gap = max(total_gap, abs(total - half_tr))
    traj = ci.bratu_solution(gen, np.linspace(0.0, 1.0, 9))
    return [
        Check("velocity_split", split, 1e-9),
        Check("velocity_total", total_gap, 1e-10),
        Check("ci_equation", traj.max_residual(), 1e-9),
    ]


def _ci_domain(gen: CiGenerator, rng) -> list[Check]:
    n = gen.n
    u0 = ci.halfspace_basepoint(n)
    base = linalg.max_norm(np.abs(ci.delta(u0, u0) - 2.0 * np.eye(n)))
    half = herm = defect = gap = fd = 0.0
    for s in _S_SAMPLES:
        point = ci.exp_trajectory(gen, s)
        u = ci.to_domain(point)
        d = ci.delta(u, u)
        herm = max(herm, linalg.max_norm(np.abs(d - d.conj().T)))
        half = max(
            half,
            linalg.max_norm(
                np.abs(0.5 * ci.leading_block(point) - np.linalg.inv(d))
            ),
        )
        _, kd = ci.halfspace_membership(u)
        defect = max(defect, kd)
        h, res = ci.kernel_point(gen, s)
        gap = max(gap, linalg.max_norm(h - ci.half_gauss_h(gen, s)))
        fd = max(fd, res)
    Y = rng.standard_normal((2 * n, 2 * n))
    X = ci.isometry_generator(n, 0.5 * (Y + Y.T))
    g = linalg.expm(0.3 * X)
    point = ci.exp_trajectory(gen, 0.4)
    lhs = ci.to_domain(ci.cone_action(g, point)).U
    rhs = ci.domain_action(g, ci.to_domain(point)).U
    lhs = lhs @ np.linalg.inv(lhs[n:])
    rhs = rhs @ np.linalg.inv(rhs[n:])
    equi = linalg.max_norm(np.abs(lhs - rhs))
    return [
        Check("kernel_basepoint", base, 1e-12),
        Check("half_leading_block", half, 1e-10),
        Check("kernel_hermitian", herm, 1e-12),
        Check("lagrangian_plane_defect", defect, 1e-10),
        Check("kernel_pathway_half", gap, 1e-10),
        Check("kernel_bratu_fd", fd, 1e-8),
        Check("equivariance", equi, 1e-10),
    ]


def _ci_oracle(gen: CiGenerator) -> list[Check]:
    traj = oracle.integrate_bratu_ci(np.eye(gen.n), gen.b, gen.c, (0.0, 1.0), 1e-3)
    ref = ci.block_gauss(ci.exp_trajectory(gen, 1.0)).h
    rk = linalg.max_norm(traj.h[-1] - ref)
    B = gen.embed()
    agree = 0.0
    for s in _S_SAMPLES:
        agree = max(
            agree, linalg.max_norm(oracle.series_expm(s * B) - linalg.expm(s * B))
        )
    return [
        Check("rk4_vs_exponential", rk, 1e-6),
        Check("series_expm_agreement", agree, 1e-10),
    ]


def run_suite(gen, suite="all", seed=0) -> list[Check]:
    """Run one suite (or all applicable ones) on a generator."""
    if suite not in SUITES:
        raise ValidationError(f"unknown suite {suite!r}")
    rng = np.random.default_rng(seed)
    checks: list[Check] = []
    if isinstance(gen, BdiGenerator):
        if suite in ("all", "gauss"):
            checks += _bdi_gauss(gen)
        if suite in ("all", "lagrangian"):
            checks += _bdi_lagrangian(gen, rng)
        if suite in ("all", "domain"):
            checks += _bdi_domain(gen, rng)
        if suite in ("all", "series"):
            checks += _bdi_series(gen, rng)
        if suite in ("all", "oracle"):
            checks += _bdi_oracle(gen)
        return checks
    if isinstance(gen, CiGenerator):
        if suite == "series":
            raise ValidationError("the series suite applies only to bdi instances")
        if suite in ("all", "gauss"):
            checks += _ci_gauss(gen)
        if suite in ("all", "lagrangian"):
            checks += _ci_lagrangian(gen)
        if suite in ("all", "domain"):
            checks += _ci_domain(gen, rng)
        if suite in ("all", "oracle"):
            checks += _ci_oracle(gen)
        return checks
    raise ValidationError(f"unsupported generator {type(gen).__name__}")
