# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Qubit and displaced oscillator examples.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import solve_ivp

from workmeter import examples as ex
from workmeter import quantum as qm
from workmeter.collision import (
    QubitProtocol, effective_unitary, endpoint_hamiltonians,
)
from workmeter.errors import ProtocolError, TruncationLeakError


DELTA_F_QUBIT = np.log(np.cosh(1.) / np.cosh(0.5))


def chain_holds(row, tol=1e-9):
    return (row.delta_F <= row.delta_F_tilde + tol and
            row.delta_F_tilde <= row.avg_work + tol)


@pytest.mark.parametrize('variant', [1, 2])
def test_qubit_endpoints_shared(variant):
    H_SC = ex.qubit_coupling(variant)
    H_A, H_B = endpoint_hamiltonians(H_SC, ex.qubit_protocol(variant, 1.))
    assert_allclose(H_A, qm.SIGMA_X, atol=1e-12)
    assert_allclose(H_B, -0.5 * qm.SIGMA_Y, atol=1e-12)


def test_qubit_unknown_variant():
    with pytest.raises(ProtocolError):
        ex.qubit_coupling(3)
    with pytest.raises(ProtocolError):
        ex.qubit_protocol(0, 1.)


def test_qubit_free_energy():
    assert ex.qubit_free_energy(1.) == pytest.approx(DELTA_F_QUBIT)
    assert ex.qubit_free_energy(1.) == pytest.approx(0.31368, abs=1e-5)
    for beta in (0.5, 2.):
        result = ex.qubit_example(1, 1., 100, beta)
        assert result.delta_F == pytest.approx(ex.qubit_free_energy(beta),
                                               abs=1e-12)


def test_qubit_sudden_quench():
    result = ex.qubit_example(1, 0.05, 400)
    assert result.delta_F_tilde == pytest.approx(np.log(np.cosh(1.)),
                                                 abs=1e-2)
    assert result.delta_F_tilde < result.avg_work
    assert chain_holds(result)


def test_qubit_adiabatic_variant1():
    result = ex.qubit_example(1, 50., 40000)
    assert result.delta_F == pytest.approx(DELTA_F_QUBIT, abs=1e-12)
    assert abs(result.delta_F_tilde - result.delta_F) <= 0.01
    assert chain_holds(result)


def test_qubit_variant2_reaches_free_energy():
    rows = ex.figure1_scan('qubit', 2, N=4000, workers=1)
    assert len(rows) == 40
    assert all(chain_holds(row) for row in rows)
    assert min(abs(r.delta_F_tilde - r.delta_F) for r in rows) <= 0.01


@pytest.mark.full_scale
@pytest.mark.parametrize('variant', [1, 2])
def test_qubit_figure_scan(variant):
    rows = ex.figure1_scan('qubit', variant)
    assert all(chain_holds(row) for row in rows)
    assert abs(rows[-1].delta_F_tilde - rows[-1].delta_F) <= 0.01
    assert rows[0].delta_F_tilde == pytest.approx(np.log(np.cosh(1.)),
                                                  abs=1e-2)


def test_fock_space():
    space = ex.FockSpace(10)
    comm = qm.commutator(space.a, space.adag)
    # the top level is corrupted by the truncation
    assert_allclose(comm[:-1, :-1], np.eye(9), atol=1e-12)
    assert_allclose(space.adag @ space.a, space.number, atol=1e-12)
    assert space.coupling().dim == 20
    with pytest.raises(ValueError):
        ex.FockSpace(1)


@pytest.mark.parametrize('index', [1, 2, 3, 4])
def test_oscillator_free_energy(index):
    protocol = ex.oscillator_protocol(index, 3.)
    assert ex.oscillator_free_energy(protocol) == pytest.approx(-0.25)


def test_oscillator_unknown_protocol():
    with pytest.raises(ProtocolError):
        ex.oscillator_protocol(5, 1.)


def test_oscillator_zero_force():
    protocol = QubitProtocol(lambda t: 0. * t, lambda t: 0. * t, 2.)
    assert ex.oscillator_p(protocol) == 0
    assert ex.oscillator_work_analytic(protocol) == 0


def test_oscillator_needs_zero_start():
    protocol = QubitProtocol(lambda t: np.pi / 2 + 0. * t,
                             lambda t: 0. * t, 2.)
    with pytest.raises(ProtocolError):
        ex.oscillator_p(protocol)


def test_oscillator_adiabatic_limit():
    protocol = ex.oscillator_protocol(1, 50.)
    assert ex.oscillator_work_analytic(protocol) == pytest.approx(
        -0.25, abs=1e-3)


def test_oscillator_protocol3_period():
    """A linear force ramp lasting one period does no excess work.
    """
    protocol = ex.oscillator_protocol(3, 2 * np.pi)
    assert ex.oscillator_p(protocol) == pytest.approx(-0.5, abs=1e-9)
    assert ex.oscillator_work_analytic(protocol) == pytest.approx(
        -0.25, abs=1e-9)


def test_oscillator_work_matches_ode():
    """Closed form against an independent integration of
    ``dp/dt = -i omega p - i f``.
    """
    protocol = ex.oscillator_protocol(4, 3.7)

    def rhs(t, y):
        p = y[0] + 1j * y[1]
        dp = -1j * p - 1j * ex.oscillator_force(protocol, t)
        return [dp.real, dp.imag]

    sol = solve_ivp(rhs, (0., 3.7), [0., 0.], method='DOP853', rtol=1e-12,
                    atol=1e-13)
    p = sol.y[0, -1] + 1j * sol.y[1, -1]
    fT = ex.oscillator_force(protocol, 3.7)
    work = abs(p) ** 2 + 2 * (np.conj(fT) * p).real
    assert ex.oscillator_p(protocol) == pytest.approx(p, abs=1e-9)
    assert ex.oscillator_work_analytic(protocol) == pytest.approx(
        work, abs=1e-8)


def test_oscillator_excess_work_non_negative():
    for index in (1, 2, 3, 4):
        for T in (0.3, 2., 7.):
            protocol = ex.oscillator_protocol(index, T)
            assert ex.oscillator_work_analytic(protocol) >= \
                ex.oscillator_free_energy(protocol) - 1e-12


def test_oscillator_numeric_matches_closed_form():
    protocol = ex.oscillator_protocol(1, 5.)
    analytic = ex.oscillator_work_analytic(protocol)
    works = [ex.oscillator_numeric(protocol, 10000, 40, n0)
             for n0 in range(4)]
    assert_allclose(works, analytic, atol=1e-4)
    assert max(works) - min(works) <= 1e-4


def test_oscillator_truncation_converged():
    protocol = ex.oscillator_protocol(2, 3.)
    coarse = ex.oscillator_numeric(protocol, 4000, 30)
    fine = ex.oscillator_numeric(protocol, 4000, 40)
    assert coarse == pytest.approx(fine, abs=1e-6)


def test_oscillator_truncation_leak():
    protocol = ex.oscillator_protocol(1, 5.)
    with pytest.raises(TruncationLeakError):
        ex.oscillator_numeric(protocol, 2000, 12, g=12.)


def test_oscillator_unitary_closed_form():
    space = ex.FockSpace(40)
    protocol = ex.oscillator_protocol(2, 2.)
    numeric = effective_unitary(space.coupling(), protocol, 10000)
    analytic = ex.oscillator_unitary_analytic(protocol, space)
    assert_allclose(numeric[:, :5], analytic[:, :5], atol=1e-5)


def test_oscillator_one_point():
    protocol = ex.oscillator_protocol(4, 4.)
    result = ex.oscillator_one_point(protocol, 4000)
    assert result.delta_F == pytest.approx(-0.25, abs=1e-6)
    # the work is the same for every initial Fock state
    assert result.delta_F_tilde == pytest.approx(result.avg_work, abs=1e-6)
    assert result.avg_work == pytest.approx(
        ex.oscillator_work_analytic(protocol), abs=1e-4)
    assert chain_holds(result)


def test_oscillator_scan_protocol4():
    rows = ex.figure1_scan('oscillator', 4, workers=1)
    assert all(chain_holds(row) for row in rows)
    assert all(row.delta_F == pytest.approx(-0.25) for row in rows)
    assert min(r.delta_F_tilde - r.delta_F for r in rows) <= 0.01


def test_oscillator_adiabatic_tail():
    rows = ex.figure1_scan('oscillator', 1, workers=1)
    gaps = [row.delta_F_tilde - row.delta_F for row in rows[-3:]]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] <= 0.01


def test_figure1_scan_pool_matches_serial():
    grid = [0.1, 1., 10.]
    serial = ex.figure1_scan('qubit', 1, grid, N=500, workers=1)
    pooled = ex.figure1_scan('qubit', 1, grid, N=500, workers=2)
    assert [row.T for row in pooled] == grid
    assert_allclose(np.array(pooled), np.array(serial), atol=1e-14)


def test_figure1_scan_validation():
    with pytest.raises(ProtocolError):
        ex.figure1_scan('pendulum', 1)
    with pytest.raises(ProtocolError):
        ex.figure1_scan('qubit', 7)


@pytest.mark.full_scale
def test_oscillator_numeric_scan():
    rows = ex.figure1_scan('oscillator', 3, ex.default_grid(0.5, 20., 8),
                           N=10000, numeric=True)
    analytic = ex.figure1_scan('oscillator', 3, ex.default_grid(0.5, 20., 8))
    for row, reference in zip(rows, analytic):
        assert row.avg_work == pytest.approx(reference.avg_work, abs=1e-4)
