"""Truncated-Fock simulation: the brute-force reference route.

Everything here is checked against closed-form algebra or analytic
thermal sums, never against another part of the simulation itself.
"""

import math

import numpy as np
import pytest

from cavework.charfun import CharfunParams, closed_form, closed_form_general
from cavework.driving import DrivingProtocol, ResonanceKind, interaction_generator
from cavework.errors import TruncationLeakError
from cavework.fock import (
    JointDistribution,
    TruncatedFockSpace,
    build_evolution,
    charfun_numeric,
    quadratic_operator,
    two_point_measurement,
)
from cavework.symplectic import QuadraticForm
from conftest import closed_protocol, synthetic_case

DOF = ResonanceKind.DOUBLE
SUF = ResonanceKind.SUM
DIF = ResonanceKind.DIFFERENCE

MODE = (0, 0, 1)
MODE2 = (0, 0, 2)


def single_mode_space(n_max=30, w0=1.0, w1=None, budget=4096):
    return TruncatedFockSpace([(MODE, w0, w1 if w1 else w0)], n_max, budget=budget)


def test_space_validation():
    with pytest.raises(ValueError):
        TruncatedFockSpace([], 10)
    with pytest.raises(ValueError):
        TruncatedFockSpace([(MODE, 0.0, 1.0)], 10)
    with pytest.raises(ValueError):
        TruncatedFockSpace([(MODE, 1.0, 1.0)], 0)
    with pytest.raises(ValueError):
        TruncatedFockSpace([(MODE, 1.0, 1.0), (MODE2, 2.0, 2.0)], (3,))
    with pytest.raises(ValueError):
        single_mode_space(n_max=5000)  # 5001 states > default budget
    big = single_mode_space(n_max=5000, budget=6000)
    assert big.dimension == 5001


def test_thermal_weights_are_geometric():
    beta, w = 1.0, 1.3
    space = single_mode_space(n_max=12, w0=w)
    p = space.thermal_weights(beta)
    ratio = math.exp(-beta * w)
    assert p[0] == pytest.approx(1.0 - ratio, rel=1e-14)
    assert np.allclose(p[1:] / p[:-1], ratio, rtol=1e-12)
    # truncated sum misses exactly the analytic geometric tail
    assert p.sum() == pytest.approx(1.0 - ratio**13, rel=1e-13)


def test_thermal_weights_product_basis():
    space = TruncatedFockSpace([(MODE, 1.0, 1.0), (MODE2, 2.0, 2.0)], (4, 3))
    beta = 0.7
    p = space.thermal_weights(beta)
    occ = space.occupations()
    assert occ.shape == (20, 2)
    z = 1.0 / ((1.0 - math.exp(-beta)) * (1.0 - math.exp(-2.0 * beta)))
    for row, prob in zip(occ, p):
        e = row[0] * 1.0 + row[1] * 2.0
        assert prob == pytest.approx(math.exp(-beta * e) / z, rel=1e-13)


def test_trivial_evolution_is_a_single_zero_peak():
    space = single_mode_space(n_max=25)
    proto = closed_protocol(2.0)
    gen = QuadraticForm(np.zeros((2, 2)), (MODE,))
    u = build_evolution(space, gen, proto, beta=1.0)
    dist = two_point_measurement(space, u, beta=1.0)
    assert len(dist.peaks) == 1
    w, dn, p = dist.peaks[0]
    assert w == 0.0 and dn == 0
    assert p == pytest.approx(space.thermal_weights(1.0).sum(), rel=1e-14)
    assert dist.total_probability() + dist.residual_mass == pytest.approx(
        1.0, abs=1e-14
    )
    assert charfun_numeric(dist, 0.0, 0.0) == pytest.approx(
        dist.total_probability(), abs=1e-15
    )


def test_oracle_matches_closed_form_single_mode():
    beta, g_tau = 1.0, 0.3
    tau = math.pi
    case = synthetic_case(DOF, 1.0, None, g_tau, tau)
    space = single_mode_space(n_max=36)
    proto = closed_protocol(2.0, half_periods=2)
    assert proto.tau == tau
    u_mat = build_evolution(space, interaction_generator([case]), proto, beta=beta)
    dist = two_point_measurement(space, u_mat, beta)
    params = CharfunParams(variant=DOF, beta=beta, omega_k=(1.0, 1.0), g_tau=g_tau)
    for u in np.linspace(-2.0, 2.0, 5):
        for v in (0.0, 1.1, -2.4):
            got = charfun_numeric(dist, float(u), v)
            want = closed_form(params, float(u), v)
            assert abs(got - want) < 1e-8


def test_oracle_matches_general_endpoint_form():
    # boundary parks at a different position: endpoint frequency shifts
    beta, g_tau, w0, w1 = 0.8, 0.25, 1.0, 1.15
    tau = 1.3
    case = synthetic_case(DOF, w0, None, g_tau, tau)
    space = single_mode_space(n_max=40, w0=w0, w1=w1)
    proto = DrivingProtocol(lambda0=1.0, epsilon=0.05, omega_drive=2.0, tau=tau)
    assert not proto.is_closed
    u_mat = build_evolution(space, interaction_generator([case]), proto, beta=beta)
    dist = two_point_measurement(space, u_mat, beta)
    params = CharfunParams(variant=DOF, beta=beta, omega_k=(w0, w1), g_tau=g_tau)
    for u in (0.0, 0.6, -1.4, 2.2):
        got = charfun_numeric(dist, u, 0.3)
        want = closed_form_general(params, u, 0.3).g
        assert abs(got - want) < 1e-7, u


def test_pair_resonance_work_lattice():
    # sum-resonance transitions live on the integer lattice of 2a + b
    beta, g_tau = 0.9, 0.2
    tau = math.pi
    case = synthetic_case(SUF, 2.0, 1.0, g_tau, tau)
    space = TruncatedFockSpace(
        [(case.k, 2.0, 2.0), (case.p, 1.0, 1.0)], (18, 24), budget=4096
    )
    proto = closed_protocol(3.0, half_periods=3)
    u_mat = build_evolution(space, interaction_generator([case]), proto, beta=beta)
    dist = two_point_measurement(space, u_mat, beta)
    # pair creation changes N in steps of 2; roundoff puts ~1e-30 slivers
    # on forbidden transitions, so bound the stray mass, not each peak
    off_lattice = sum(p for w, _, p in dist.peaks if abs(w - round(w)) > 1e-9)
    odd = sum(p for _, dn, p in dist.peaks if dn % 2)
    assert off_lattice < 1e-12
    assert odd < 1e-12
    params = CharfunParams(
        variant=SUF, beta=beta, omega_k=(2.0, 2.0), omega_p=(1.0, 1.0), g_tau=g_tau
    )
    for u, v in [(0.5, 0.0), (-1.2, 0.7)]:
        assert abs(charfun_numeric(dist, u, v) - closed_form(params, u, v)) < 1e-7


def test_truncation_leak_guard():
    case = synthetic_case(DOF, 1.0, None, 1.0, math.pi)
    space = single_mode_space(n_max=3)
    proto = closed_protocol(2.0)
    with pytest.raises(TruncationLeakError):
        build_evolution(space, interaction_generator([case]), proto, beta=0.5)
    # without a declared state there is nothing to certify, so no guard
    u = build_evolution(space, interaction_generator([case]), proto, beta=None)
    assert u.shape == (4, 4)


def test_quadratic_operator_guards():
    space = single_mode_space(n_max=6)
    aa_only = np.zeros((2, 2), dtype=complex)
    aa_only[0, 0] = 1.0
    with pytest.raises(ValueError, match="Hermitian"):
        quadratic_operator(space, QuadraticForm(aa_only, (MODE,)))
    with pytest.raises(ValueError, match="not in the space"):
        quadratic_operator(space, QuadraticForm(np.zeros((2, 2)), ((9, 9, 9),)))
    with pytest.raises(ValueError, match="every space mode"):
        two = TruncatedFockSpace([(MODE, 1.0, 1.0), (MODE2, 2.0, 2.0)], (3, 3))
        quadratic_operator(two, QuadraticForm(np.zeros((2, 2))))


def test_number_conserving_exchange_block():
    # the exchange generator commutes with total N: delta_n is always 0
    beta, g_tau = 0.7, 0.4
    tau = math.pi
    case = synthetic_case(DIF, 2.0, 1.0, g_tau, tau)
    space = TruncatedFockSpace(
        [(case.k, 2.0, 2.0), (case.p, 1.0, 1.0)], (16, 32), budget=4096
    )
    proto = closed_protocol(1.0, half_periods=1)
    u_mat = build_evolution(space, interaction_generator([case]), proto, beta=beta)
    dist = two_point_measurement(space, u_mat, beta)
    moved = sum(p for _, dn, p in dist.peaks if dn != 0)
    assert moved < 1e-12


def test_to_csv_layout():
    dist = JointDistribution(((0.0, 0, 0.75), (2.0, 2, 0.25)), 1e-12)
    text = dist.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "w,delta_n,prob"
    assert lines[1] == "0,0,0.75"
    assert lines[-1] == "# residual_mass=1e-12"
