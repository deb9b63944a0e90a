"""Optimality-condition residuals: stationarity, boundary, constrained, conserved."""

import math

import numpy as np
import pytest

from fracvar import (
    ConfigurationError,
    DegeneracyError,
    DifferenceKernel,
    DomainError,
    Grid,
    InputError,
    Lagrangian,
    NoetherGenerator,
    OperatorBinding,
    ParameterSet,
    PowerLawKernel,
    SampledFunction,
    VariationalProblem,
    dissipative_parameter,
    el_residual,
    evaluate_functional,
    interior_slice,
    interior_sup,
    isoperimetric_residual,
    natural_bc_residual,
    noether_drift,
    trapezoid,
)
from fracvar.experiments import damped_oscillator_problem

EXP_KERNEL = DifferenceKernel(lambda s: math.exp(-s))


def exp_binding(a=0.0, b=1.0):
    return OperatorBinding(ParameterSet(a, b, 1.0, 0.0), EXP_KERNEL)


def quadratic_tracking():
    return Lagrangian(
        lambda x1, x2, x3, x4, t: (x2 + t) ** 2,
        d1=lambda *a: 0.0,
        d2=lambda x1, x2, x3, x4, t: 2.0 * (x2 + t),
        d3=lambda *a: 0.0,
        d4=lambda *a: 0.0,
    )


# --- Lagrangian construction ------------------------------------------------


def test_lagrangian_needs_callable():
    with pytest.raises(InputError):
        Lagrangian(3.0)


def test_lagrangian_rejects_wrong_analytic_partial():
    with pytest.raises(InputError, match="partial"):
        Lagrangian(
            lambda x1, x2, x3, x4, t: x3 * x3,
            d3=lambda x1, x2, x3, x4, t: 7.0 * x3,  # should be 2*x3
        )


def test_lagrangian_accepts_consistent_partials():
    Lagrangian(
        lambda x1, x2, x3, x4, t: x1 * x1 + math.sin(x3),
        d1=lambda x1, x2, x3, x4, t: 2.0 * x1,
        d3=lambda x1, x2, x3, x4, t: math.cos(x3),
    )


# --- functional evaluation ---------------------------------------------------


def test_dirichlet_energy_of_identity():
    g = Grid(0.0, 1.0, 256)
    prob = VariationalProblem(Lagrangian(lambda x1, x2, x3, x4, t: x3 * x3), exp_binding())
    assert evaluate_functional(prob, SampledFunction(g, g.nodes)) == pytest.approx(1.0, abs=1e-12)


def test_volterra_solution_annihilates_tracking_functional():
    g = Grid(0.0, 1.0, 1024)
    prob = VariationalProblem(quadratic_tracking(), exp_binding())
    value = evaluate_functional(prob, SampledFunction(g, -1.0 - g.nodes))
    assert abs(value) < 1e-10


def test_oscillator_action_vanishes_on_half_period():
    g = Grid(0.0, math.pi, 4096)
    lag = Lagrangian(lambda x1, x2, x3, x4, t: 0.5 * x1 * x1 - 0.5 * x3 * x3)
    prob = VariationalProblem(lag, exp_binding(0.0, math.pi))
    assert abs(evaluate_functional(prob, SampledFunction(g, np.sin(g.nodes)))) < 1e-6


def test_boundary_violation_names_the_endpoint():
    g = Grid(0.0, 1.0, 64)
    prob = VariationalProblem(Lagrangian(lambda x1, x2, x3, x4, t: x1 * x1), exp_binding(), ya=0.0, yb=1.0)
    with pytest.raises(InputError, match="t=b"):
        evaluate_functional(prob, SampledFunction(g, np.zeros(65)))


# --- stationarity residual ----------------------------------------------------


def test_el_residual_classical_oscillator():
    g = Grid(0.0, math.pi, 2048)
    lag = Lagrangian(lambda x1, x2, x3, x4, t: 0.5 * x1 * x1 - 0.5 * x3 * x3)
    prob = VariationalProblem(lag, exp_binding(0.0, math.pi))
    res = el_residual(prob, SampledFunction(g, np.sin(g.nodes)))
    assert interior_sup(res.values) < 1e-4


def test_el_residual_zero_trajectory_is_exact():
    g = Grid(0.0, 1.0, 256)
    lag = Lagrangian(lambda x1, x2, x3, x4, t: x1 * x1 + x3 * x3)
    res = el_residual(VariationalProblem(lag, exp_binding()), SampledFunction(g, np.zeros(257)))
    assert np.array_equal(res.values, np.zeros(257))


def test_el_residual_matches_classical_form():
    g = Grid(0.0, 1.0, 1024)
    lag = Lagrangian(lambda x1, x2, x3, x4, t: x1 * x1 + x3 * x3)
    y = SampledFunction(g, np.sin(2.0 * g.nodes) + g.nodes)
    res = el_residual(VariationalProblem(lag, exp_binding()), y)
    dy = np.gradient(y.values, g.h, edge_order=2)
    independent = np.gradient(2.0 * dy, g.h, edge_order=2) - 2.0 * y.values
    assert np.abs(res.values - independent)[interior_slice(1024)].max() < 1e-6


def test_el_residual_additive_for_analytic_partials():
    g = Grid(0.0, 1.0, 1024)
    y = SampledFunction(g, np.sin(2.0 * g.nodes) + g.nodes)
    zero = lambda *a: 0.0
    f1 = Lagrangian(lambda x1, x2, x3, x4, t: x1 * x1,
                    d1=lambda x1, x2, x3, x4, t: 2 * x1, d2=zero, d3=zero, d4=zero)
    f2 = Lagrangian(lambda x1, x2, x3, x4, t: x2 * x2 + x3 * x3,
                    d1=zero, d2=lambda x1, x2, x3, x4, t: 2 * x2,
                    d3=lambda x1, x2, x3, x4, t: 2 * x3, d4=zero)
    f12 = Lagrangian(lambda x1, x2, x3, x4, t: x1 * x1 + x2 * x2 + x3 * x3,
                     d1=lambda x1, x2, x3, x4, t: 2 * x1, d2=lambda x1, x2, x3, x4, t: 2 * x2,
                     d3=lambda x1, x2, x3, x4, t: 2 * x3, d4=zero)
    binding = exp_binding()
    r1 = el_residual(VariationalProblem(f1, binding), y).values
    r2 = el_residual(VariationalProblem(f2, binding), y).values
    r12 = el_residual(VariationalProblem(f12, binding), y).values
    assert np.abs(r12 - r1 - r2).max() < 1e-10


def test_first_variation_pairs_with_residual():
    """Central-difference Gateaux derivative equals the negated residual pairing."""
    g = Grid(0.0, 1.0, 2048)
    t = g.nodes
    lag = Lagrangian(
        lambda x1, x2, x3, x4, t: x1 * x1 + 0.5 * x3 * x3 + 0.25 * x2 * x2 + 0.1 * x4 * x4,
        d1=lambda x1, x2, x3, x4, t: 2.0 * x1,
        d2=lambda x1, x2, x3, x4, t: 0.5 * x2,
        d3=lambda x1, x2, x3, x4, t: x3,
        d4=lambda x1, x2, x3, x4, t: 0.2 * x4,
    )
    prob = VariationalProblem(lag, exp_binding(), ya=0.0, yb=0.0)
    y = SampledFunction(g, 0.3 * np.sin(np.pi * t))
    eta = (t * (1.0 - t)) ** 2 * np.sin(3.0 * t)
    h = 1e-5
    jp = evaluate_functional(prob, SampledFunction(g, y.values + h * eta))
    jm = evaluate_functional(prob, SampledFunction(g, y.values - h * eta))
    gateaux = (jp - jm) / (2.0 * h)
    res = el_residual(prob, y)
    paired = -trapezoid(SampledFunction(g, res.values * eta))
    assert gateaux == pytest.approx(paired, rel=2e-3)


# --- natural boundary condition -----------------------------------------------


def test_natural_condition_constant_trajectory():
    g = Grid(0.0, 1.0, 256)
    prob = VariationalProblem(Lagrangian(lambda x1, x2, x3, x4, t: x3 * x3), exp_binding())
    assert natural_bc_residual(prob, SampledFunction(g, np.full(257, 4.0))) == 0.0


def test_natural_condition_detects_transport():
    g = Grid(0.0, 1.0, 256)
    prob = VariationalProblem(Lagrangian(lambda x1, x2, x3, x4, t: x3 * x3), exp_binding())
    assert natural_bc_residual(prob, SampledFunction(g, g.nodes)) == pytest.approx(2.0, abs=1e-10)


def test_natural_condition_caputo_constant():
    g = Grid(0.0, 1.0, 1024)
    binding = OperatorBinding(ParameterSet(0.0, 1.0, 1.0, 0.0), PowerLawKernel(0.5, "derivative"))
    prob = VariationalProblem(Lagrangian(lambda x1, x2, x3, x4, t: x4 * x4), binding)
    assert natural_bc_residual(prob, SampledFunction(g, np.full(1025, 3.0))) < 1e-8


def test_natural_condition_requires_free_boundary():
    g = Grid(0.0, 1.0, 64)
    prob = VariationalProblem(Lagrangian(lambda x1, x2, x3, x4, t: x3 * x3), exp_binding(), ya=0.0)
    with pytest.raises(InputError, match="free left boundary"):
        natural_bc_residual(prob, SampledFunction(g, np.zeros(65)))


# --- constrained stationarity ----------------------------------------------


def test_multiplier_is_one_when_objective_equals_constraint():
    g = Grid(0.0, 1.0, 1024)
    lag = quadratic_tracking()
    y = SampledFunction(g, -1.0 - g.nodes)
    prob = VariationalProblem(lag, exp_binding(), ya=-1.0, yb=-2.0)
    level = evaluate_functional(prob, y)
    report = isoperimetric_residual(prob, lag, level, y)
    assert report.multiplier == 1.0
    assert report.residual == 0.0


def test_constraint_violation_is_rejected():
    g = Grid(0.0, 1.0, 256)
    lag = quadratic_tracking()
    prob = VariationalProblem(lag, exp_binding())
    with pytest.raises(InputError, match="constraint"):
        isoperimetric_residual(prob, lag, 10.0, SampledFunction(g, -1.0 - g.nodes))


def test_degenerate_constraint_has_no_multiplier():
    g = Grid(0.0, 1.0, 256)
    y = SampledFunction(g, g.nodes**2)
    # d/dt[1] == 0 pointwise, so the side condition gives no stationarity signal
    flux = Lagrangian(lambda x1, x2, x3, x4, t: x3,
                      d1=lambda *a: 0.0, d2=lambda *a: 0.0,
                      d3=lambda *a: 1.0, d4=lambda *a: 0.0)
    prob = VariationalProblem(Lagrangian(lambda x1, x2, x3, x4, t: x1 * x1), exp_binding())
    level = evaluate_functional(VariationalProblem(flux, exp_binding()), y)
    with pytest.raises(DegeneracyError):
        isoperimetric_residual(prob, flux, level, y)


# --- conserved quantities ----------------------------------------------------


def test_classical_momentum_is_conserved():
    g = Grid(0.0, 1.0, 512)
    lag = Lagrangian(lambda x1, x2, x3, x4, t: x3 * x3)
    prob = VariationalProblem(lag, exp_binding())
    report = noether_drift(prob, SampledFunction(g, g.nodes), NoetherGenerator(lambda t, y: 1.0))
    assert report.drift < 1e-12


def test_zero_trajectory_conserves_zero():
    g = Grid(0.0, 1.0, 256)
    binding = OperatorBinding(ParameterSet(0.0, 1.0, 1.0, 0.0), PowerLawKernel(0.5, "derivative"))
    prob = VariationalProblem(Lagrangian(lambda x1, x2, x3, x4, t: x4 * x4), binding)
    report = noether_drift(prob, SampledFunction(g, np.zeros(257)), NoetherGenerator(lambda t, y: 1.0))
    assert np.abs(report.constant.values).max() == 0.0
    assert report.drift == 0.0


def test_noether_warns_off_extremal():
    g = Grid(0.0, 1.0, 512)
    lag = Lagrangian(lambda x1, x2, x3, x4, t: x1 * x1 + x3 * x3)
    prob = VariationalProblem(lag, exp_binding())
    junk = SampledFunction(g, np.cosh(3.0 * g.nodes))
    with pytest.warns(UserWarning, match="stationarity"):
        noether_drift(prob, junk, NoetherGenerator(lambda t, y: 1.0))


def test_noether_rejects_weighted_problems():
    g = Grid(0.0, 1.0, 256)
    lag = Lagrangian(lambda x1, x2, x3, x4, t: x3 * x3)
    weight = SampledFunction(g, np.exp(0.1 * (1.0 - g.nodes)))
    prob = VariationalProblem(lag, exp_binding(), weight=weight)
    with pytest.raises(ConfigurationError):
        noether_drift(prob, SampledFunction(g, g.nodes), NoetherGenerator(lambda t, y: 1.0))


# --- weighted (action-dissipative) problems -----------------------------------


def test_dissipative_parameter_of_exponential_weight():
    g = Grid(0.0, 1.0, 1024)
    weight = SampledFunction(g, np.exp(0.1 * (1.0 - g.nodes)))
    delta = dissipative_parameter(weight)
    assert np.abs(delta.values + 0.1).max() < 1e-6


def test_dissipative_parameter_of_unit_weight():
    g = Grid(0.0, 1.0, 64)
    delta = dissipative_parameter(SampledFunction(g, np.ones(65)))
    assert np.abs(delta.values).max() == 0.0


def test_dissipative_parameter_needs_positive_weight():
    g = Grid(0.0, 1.0, 64)
    with pytest.raises(DomainError):
        dissipative_parameter(SampledFunction(g, np.cos(4.0 * g.nodes)))


def test_damped_oscillator_satisfies_weighted_stationarity():
    g = Grid(0.0, 1.0, 2048)
    prob, y = damped_oscillator_problem(g)
    assert interior_sup(el_residual(prob, y).values) < 1e-3
