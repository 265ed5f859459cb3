"""Closed-form characteristic functions and their exact identities."""

import cmath
import dataclasses
import math

import numpy as np
import pytest
from scipy.integrate import quad

from cavework.cavity import Polarization, RectangularGeometry, mode_frequency
from cavework.charfun import (
    CharfunParams,
    adiabatic_mode_factor,
    classical_charfun,
    classical_work_cdf,
    classical_work_pdf,
    closed_form,
    closed_form_general,
    grand_potential_diff,
    moments,
    multi_resonance_product,
)
from cavework.distributions import WorkLattice, extract_marginal_work
from cavework.driving import ResonanceKind
from cavework.errors import CoupledResonanceError, DegenerateResonanceError
from conftest import synthetic_case

DOF = ResonanceKind.DOUBLE
SUF = ResonanceKind.SUM
DIF = ResonanceKind.DIFFERENCE


def make_params(variant, beta=0.5, wk=2.0, wp=1.0, g_tau=0.3, hbar=1.0):
    if variant is DOF:
        return CharfunParams(
            variant=variant, beta=beta, omega_k=(wk, wk), g_tau=g_tau, hbar=hbar
        )
    return CharfunParams(
        variant=variant,
        beta=beta,
        omega_k=(wk, wk),
        omega_p=(wp, wp),
        g_tau=g_tau,
        hbar=hbar,
    )


ALL = [make_params(v) for v in (DOF, SUF, DIF)]


def test_frozen_reference_value():
    # pinned regression point: beta*omega = 0.2, g tau = 0.3, u = pi/(2 omega)
    params = CharfunParams(variant=DOF, beta=0.2, omega_k=(1.0, 1.0), g_tau=0.3)
    val = closed_form(params, math.pi / 2.0, 0.0)
    assert val.real == pytest.approx(0.3096720794294158, abs=1e-14)
    assert abs(val.imag) < 1e-15


def test_normalization():
    for params in ALL:
        assert closed_form(params, 0.0, 0.0) == pytest.approx(1.0, abs=1e-14)


def test_jarzynski_identity_closed_endpoints():
    # equal endpoints: <e^{-beta w}> = 1 exactly, all variants
    for params in ALL:
        assert abs(closed_form(params, 1j * params.beta, 0.0) - 1.0) < 1e-12


def test_mode_exchange_symmetry():
    for variant in (SUF, DIF):
        a = make_params(variant, wk=2.0, wp=0.7)
        b = make_params(variant, wk=0.7, wp=2.0)
        for u, v in [(0.35, 0.0), (-1.1, 0.6), (0.2 + 0.1j, -0.4)]:
            assert closed_form(a, u, v) == pytest.approx(closed_form(b, u, v))


def test_general_reduces_to_closed_at_equal_endpoints():
    for params in ALL:
        for u, v in [(0.4, 0.0), (-0.8, 1.2)]:
            got = closed_form_general(params, u, v)
            want = closed_form(params, u, v)
            assert abs(got.g - want) < 1e-13
            assert abs(got.g_bar - want) < 1e-13


def open_params(variant, beta=0.6, hbar=1.0):
    if variant is DOF:
        return CharfunParams(
            variant=variant, beta=beta, omega_k=(1.0, 1.3), g_tau=0.25, hbar=hbar
        )
    return CharfunParams(
        variant=variant,
        beta=beta,
        omega_k=(2.0, 2.4),
        omega_p=(1.0, 0.8),
        g_tau=0.25,
        hbar=hbar,
    )


def test_general_drift_relation():
    # g = g_bar * exp(i u dPhi) with dPhi from the participating modes
    for variant in (DOF, SUF, DIF):
        params = open_params(variant)
        dphi = grand_potential_diff(
            params.frequency_pairs(), 0.0, 0.0, params.beta
        ).value
        for u in (0.3, -1.7, 0.5 + 0.2j):
            got = closed_form_general(params, u, 0.9)
            assert abs(got.g - got.g_bar * cmath.exp(1j * u * dphi)) < 1e-12


def test_jarzynski_open_endpoints():
    # <e^{-beta w}> = e^{-beta dPhi}; equivalently g_bar(i beta) = 1
    for variant in (DOF, SUF, DIF):
        params = open_params(variant)
        dphi = grand_potential_diff(
            params.frequency_pairs(), 0.0, 0.0, params.beta
        ).value
        got = closed_form_general(params, 1j * params.beta, 0.0)
        assert abs(got.g - math.exp(-params.beta * dphi)) < 1e-12
        assert abs(got.g_bar - 1.0) < 1e-12


def test_zero_coupling_is_adiabatic_product():
    for variant in (DOF, SUF, DIF):
        base = open_params(variant)
        params = CharfunParams(
            variant=variant,
            beta=base.beta,
            omega_k=base.omega_k,
            omega_p=base.omega_p,
            g_tau=0.0,
        )
        for u in (0.45, -2.3):
            want = 1.0 + 0.0j
            for w0, w1 in params.frequency_pairs():
                want *= adiabatic_mode_factor(w0, w1, params.beta, u)
            assert abs(closed_form_general(params, u, 0.0).g - want) < 1e-12


def test_adiabatic_factor_values():
    beta, w0, w1 = 0.7, 1.0, 1.4
    assert adiabatic_mode_factor(w0, w0, beta, 0.33) == 1.0
    got = adiabatic_mode_factor(w0, w1, beta, 1j * beta)
    want = (1.0 - math.exp(-beta * w0)) / (1.0 - math.exp(-beta * w1))
    assert got == pytest.approx(want, rel=1e-14)
    with pytest.raises(ValueError):
        adiabatic_mode_factor(w0, w1, -1.0, 0.0)


def test_grand_potential_hand_sum():
    beta = 0.8
    pairs = [(1.0, 1.3), (2.0, 1.7)]
    want = sum(
        math.log(1.0 - math.exp(-beta * w1)) - math.log(1.0 - math.exp(-beta * w0))
        for w0, w1 in pairs
    ) / beta
    got = grand_potential_diff(pairs, 0.0, 0.0, beta)
    assert got.value == pytest.approx(want, rel=1e-13)
    # closed endpoints carry no free-energy change
    assert grand_potential_diff([(1.0, 1.0)], 0.0, 0.0, beta).value == 0.0


def test_grand_potential_geometry_route():
    geom = RectangularGeometry(lx=0.9, ly=1.1)
    beta, lam0, lam1 = 0.6, 1.0, 1.2
    modes = [(0, 1, 1), (1, 1, 2)]
    via_geom = grand_potential_diff(
        modes, lam0, lam1, beta, geometry=geom, polarization=Polarization.TE
    )
    pairs = [
        (
            mode_frequency(geom, Polarization.TE, m, lam0),
            mode_frequency(geom, Polarization.TE, m, lam1),
        )
        for m in modes
    ]
    via_pairs = grand_potential_diff(pairs, 0.0, 0.0, beta)
    assert via_geom.value == pytest.approx(via_pairs.value, rel=1e-13)
    assert via_geom.modes == tuple(modes)


def test_classical_charfun_is_fourier_transform_of_pdf():
    for variant, r in [(SUF, 0.5), (DIF, 0.4)]:
        g_tau, beta = 0.3, 1.3
        for u in (0.4, 1.9, -0.8):

            def ft(part, u=u):
                f = lambda w: part(
                    classical_work_pdf(variant, r, g_tau, beta, w)
                    * cmath.exp(1j * u * w)
                )
                lo = quad(f, -60.0 / beta, 0.0, limit=200)[0]
                hi = quad(f, 0.0, 60.0 / beta, limit=200)[0]
                return lo + hi

            got = ft(lambda z: z.real) + 1j * ft(lambda z: z.imag)
            want = classical_charfun(variant, r, g_tau, u / beta)
            assert abs(got - want) < 1e-9


def test_classical_cdf_matches_pdf_integral():
    variant, r, g_tau, beta = SUF, 0.5, 0.3, 1.0
    pts = np.array([-3.0, -0.7, 0.0, 0.4, 2.5])
    cdf = classical_work_cdf(variant, r, g_tau, beta, pts)
    assert np.all(np.diff(cdf) > 0.0)
    for w, c in zip(pts, cdf):
        num = quad(
            lambda x: classical_work_pdf(variant, r, g_tau, beta, x),
            -80.0,
            float(w),
            limit=400,
        )[0]
        assert c == pytest.approx(num, abs=1e-9)
    assert classical_work_cdf(variant, r, g_tau, beta, 60.0) == pytest.approx(
        1.0, abs=1e-12
    )


def test_classical_double_mean():
    # d/du_tilde of the single-mode classical form at 0 gives 2 sinh^2 g
    g_tau = 0.37
    h = 1e-6
    vals = [classical_charfun(DOF, None, g_tau, s * h) for s in (-1, 1)]
    mean = (-1j * (vals[1] - vals[0]) / (2.0 * h)).real
    assert mean == pytest.approx(2.0 * math.sinh(g_tau) ** 2, rel=1e-8)


def test_classical_degenerate_ratio_rejected():
    with pytest.raises(DegenerateResonanceError):
        classical_charfun(DIF, 1.0, 0.3, 0.2)


def test_quantum_charfun_approaches_classical_limit():
    # shrink hbar*omega/ (1/beta): the quantum G tends to the hbar->0 form
    beta, g_tau = 1.0, 0.3
    for variant, r in [(SUF, 0.5), (DIF, 0.5), (DOF, None)]:
        for u in (0.3, 1.1):
            want = classical_charfun(variant, r, g_tau, u / beta)
            errs = []
            for eta in (1e-2, 1e-3):
                wk = 2.0 * eta
                wp = None if variant is DOF else eta
                params = make_params(variant, beta=beta, wk=wk, wp=wp, g_tau=g_tau)
                errs.append(abs(closed_form(params, u, 0.0) - want))
            assert errs[1] < 1e-2 * abs(want)
            assert errs[1] < 0.2 * errs[0]


def test_moments_match_lattice_average():
    # derivative route vs. explicit sum over inverted peak weights
    params = make_params(SUF, beta=0.4, wk=2.0, wp=1.0, g_tau=0.3)
    lattice = WorkLattice(spacing=3.0)
    peaks = extract_marginal_work(lambda u: closed_form(params, u, 0.0), lattice)
    mean_sum = sum(w * p for w, p in peaks)
    var_sum = sum((w - mean_sum) ** 2 * p for w, p in peaks)
    mean, var = moments(params, order=2)
    assert mean == pytest.approx(mean_sum, rel=1e-8)
    # the lattice sum drops sub-1e-12 tail peaks, which w^2 amplifies
    assert var == pytest.approx(var_sum, rel=1e-6)


def test_multi_resonance_product_factorizes():
    tau = math.pi
    case1 = synthetic_case(DOF, 1.0, None, 0.3, tau)
    case2 = dataclasses.replace(
        synthetic_case(SUF, 3.0, 2.0, 0.2, tau), k=(0, 1, 1), p=(0, 1, 2)
    )
    beta = 0.5
    p1 = CharfunParams.from_case(case1, beta, tau)
    p2 = CharfunParams.from_case(case2, beta, tau)
    u, v = 0.7, -0.4
    got = multi_resonance_product([case1, case2], [p1, p2], u, v)
    want = closed_form(p1, u, v) * closed_form(p2, u, v)
    assert got == pytest.approx(want, rel=1e-14)
    shared = dataclasses.replace(case2, k=(0, 0, 1))
    with pytest.raises(CoupledResonanceError):
        multi_resonance_product([case1, shared], [p1, p2], u, v)


def test_params_validation():
    with pytest.raises(ValueError):
        CharfunParams(variant=DOF, beta=-1.0, omega_k=(1.0, 1.0), g_tau=0.3)
    with pytest.raises(ValueError):
        CharfunParams(
            variant=DOF, beta=1.0, omega_k=(1.0, 1.0), omega_p=(2.0, 2.0), g_tau=0.3
        )
    with pytest.raises(ValueError):
        CharfunParams(variant=SUF, beta=1.0, omega_k=(1.0, 1.0), g_tau=0.3)
    with pytest.raises(DegenerateResonanceError):
        CharfunParams(
            variant=DIF,
            beta=1.0,
            omega_k=(1.0, 1.0),
            omega_p=(1.0 + 1e-12, 1.0),
            g_tau=0.3,
        )
    with pytest.raises(ValueError):
        CharfunParams(variant=DOF, beta=1.0, omega_k=(-1.0, 1.0), g_tau=0.3)


def test_from_case_maps_endpoints():
    tau = 2.0
    case = synthetic_case(SUF, 2.0, 1.0, 0.3, tau)
    params = CharfunParams.from_case(
        case, beta=0.5, tau=tau, final_frequencies={case.k: 2.2}
    )
    assert params.omega_k == (2.0, 2.2)
    assert params.omega_p == (1.0, 1.0)
    assert params.g_tau == pytest.approx(0.3)
    assert not params.is_closed
