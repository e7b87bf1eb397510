"""Penalty loss, analytic gradients, and the descent loop."""

import math

import numpy as np
import pytest

from dtrealize.constraints import Constraint, ConstraintSystem, MissingVariable, \
    build_const, build_constsqu
from dtrealize.instances import fan_triangulation
from dtrealize.plane_graph import build_triangulation
from dtrealize.solver import (DEFAULT_DENOMINATORS, CompiledSystem, SolverConfig,
                              default_margin, initialize, penalty,
                              round_candidates, solve)

K4_ROT = {1: [2, 4, 3], 2: [3, 4, 1], 3: [1, 4, 2], 4: [1, 2, 3]}


def k4():
    return build_triangulation(4, K4_ROT, (1, 3, 2))


def _toy_system(relation: str) -> ConstraintSystem:
    """Single-constraint system over one variable x."""
    c = Constraint(((((("x",),), 1),)), relation, ("TOY",))
    return ConstraintSystem(((("x",),)), (c,), "CONST", "toy")


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(margin=0.0)
    with pytest.raises(ValueError):
        SolverConfig(denominators=(4, 1))


def test_penalty_hinge_example():
    # x > 0 at x = -1 with margin 1: hinge is 2, loss 4, d loss/dx = -4
    system = _toy_system(">")
    loss, grad = penalty(system, {("x",): -1.0}, margin=1.0)
    assert loss == 4.0
    assert grad[("x",)] == -4.0


def test_penalty_zero_at_satisfied():
    system = _toy_system(">")
    loss, grad = penalty(system, {("x",): 2.0}, margin=1.0)
    assert loss == 0.0
    assert grad[("x",)] == 0.0


def test_penalty_equality_residual():
    system = _toy_system("=")
    loss, grad = penalty(system, {("x",): 3.0}, margin=1.0)
    assert loss == 9.0
    assert grad[("x",)] == 6.0


def test_penalty_nonstrict_uses_zero_margin():
    system = _toy_system(">=")
    loss, _ = penalty(system, {("x",): 0.0}, margin=5.0)
    assert loss == 0.0


def test_penalty_missing_variable():
    with pytest.raises(MissingVariable):
        penalty(_toy_system(">"), {}, margin=1.0)


def _central_difference(comp, vec, margin, h=1e-6):
    out = np.zeros_like(vec)
    for i in range(len(vec)):
        up = vec.copy()
        dn = vec.copy()
        up[i] += h
        dn[i] -= h
        out[i] = (comp.loss(up, margin) - comp.loss(dn, margin)) / (2 * h)
    return out


@pytest.mark.parametrize("build", [build_const, build_constsqu])
def test_gradient_matches_finite_differences(build):
    system = build(k4())
    comp = CompiledSystem(system)
    rng = np.random.default_rng(42)
    for _ in range(10):
        vec = rng.uniform(-8, 8, comp.nv)
        _, grad = comp.loss_grad(vec, margin=1.0)
        fd = _central_difference(comp, vec, 1.0)
        denom = np.maximum(1.0, np.maximum(np.abs(grad), np.abs(fd)))
        assert float(np.max(np.abs(grad - fd) / denom)) < 1e-5


def test_loss_zero_iff_satisfied():
    system = build_constsqu(k4())
    comp = CompiledSystem(system)
    rng = np.random.default_rng(1)
    for _ in range(20):
        vec = rng.uniform(-50, 50, comp.nv)
        loss = comp.loss(vec, 1.0)
        ok, _ = comp.satisfied(vec, 1.0)
        assert (loss == 0.0) == ok


def test_default_margin_flavors():
    G = k4()
    pts = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (3.0, 3.0)]
    assert default_margin(build_constsqu(G), pts) == 1.0
    assert default_margin(build_const(G), pts) == pytest.approx(1e-3 * 100)


def test_initialize_deterministic_and_complete():
    G = fan_triangulation(6)
    system = build_constsqu(G)
    a = initialize(G, system, SolverConfig())
    b = initialize(G, system, SolverConfig())
    assert a == b
    assert set(a) == set(system.variables)
    # scaled so the minimum pairwise distance is at least 10 stencil units
    pts = [(a[("px", i)], a[("py", i)]) for i in range(1, 7)]
    mind = min(math.dist(p, q) for i, p in enumerate(pts) for q in pts[i + 1:])
    assert mind >= 10 - 1e-9


def test_initialize_accepts_warm_points():
    G = k4()
    system = build_const(G)
    warm = [(0.0, 10.0), (-9.0, -5.0), (9.0, -5.0), (0.0, 0.0)]
    a = initialize(G, system, SolverConfig(), points=warm)
    assert (a[("px", 1)], a[("py", 1)]) == (0.0, 10.0)


def test_solve_deterministic():
    G = k4()
    system = build_constsqu(G)
    cfg = SolverConfig(seed=3)
    out1 = solve(system, cfg, G=G)
    out2 = solve(system, cfg, G=G)
    assert out1.status == out2.status == "SATISFIED_FLOAT"
    assert out1.assignment == out2.assignment
    assert out1.iterations == out2.iterations
    assert out1.restart_index == out2.restart_index


def test_solve_warm_start_zero_iterations():
    G = k4()
    system = build_const(G)
    # an exact realization: satisfied immediately, no descent needed
    warm = [(0.0, 10.0), (-9.0, -5.0), (9.0, -5.0), (0.0, 0.0)]
    out = solve(system, SolverConfig(), G=G, initial_points=warm)
    assert out.status == "SATISFIED_FLOAT"
    assert out.iterations == 0


def test_solve_exhausted_with_zero_budget():
    # equality at a random start is violated, and no iterations may run
    system = _toy_system("=")
    out = solve(system, SolverConfig(max_iterations=0, restarts=0))
    assert out.status == "EXHAUSTED"


def test_solve_monotone_best_loss():
    # EXHAUSTED outcomes still report the best assignment found
    system = _toy_system("=")
    out = solve(system, SolverConfig(max_iterations=5, restarts=1))
    assert out.status in ("SATISFIED_FLOAT", "EXHAUSTED")
    assert out.assignment[("x",)] == out.assignment[("x",)]  # finite


def test_round_candidates_stream():
    cfg = SolverConfig(denominators=(10, 1000))
    cands = list(round_candidates({("x",): 1 / 3}, cfg))
    assert len(cands) == 2
    from fractions import Fraction
    assert cands[0][("x",)] == Fraction(1, 3)
    assert cands[1][("x",)] == Fraction(1, 3)


def test_round_candidates_exact_reproduction():
    cfg = SolverConfig()
    assert DEFAULT_DENOMINATORS[0] == 1
    cands = list(round_candidates({("x",): 3.0}, cfg))
    assert cands[0][("x",)] == 3
    assert len(cands) == len(DEFAULT_DENOMINATORS)
