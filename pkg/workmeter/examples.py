# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Worked systems driven through a control qubit.

- a qubit system with two different couplings that share the same end
  point Hamiltonians ``H_A = sigma_x`` and ``H_B = -sigma_y / 2``
- a harmonic oscillator displaced by the complex force
  ``f(t) = g/2 sin(theta) exp(i phi)`` which has a closed form solution
"""
import functools
import logging
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm

from .errors import ProtocolError, TruncationLeakError
from .quantum import (
    SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Y, dagger, ket, projector,
)
from .collision import (
    DEFAULT_COLLISIONS, JointHamiltonian, QubitProtocol, effective_unitary,
    endpoint_hamiltonians, linear_protocol,
)
from .fluctuation import DEFAULT_BETA, modified_je


log = logging.getLogger('workmeter').getChild('examples')

# |0> is the lower control level
CONTROL_RAISE = np.outer(ket(1, 2), ket(0, 2))
CONTROL_LOWER = dagger(CONTROL_RAISE)

DEFAULT_TRUNCATION = 40
LEAK_FRACTION = 0.1
LEAK_THRESHOLD = 1e-6


def qubit_coupling(variant):
    """Joint Hamiltonian of the qubit example ``variant`` (1 or 2).
    """
    if variant == 1:
        matrix = (np.kron(SIGMA_X, projector(ket(0, 2))) -
                  0.5 * np.kron(SIGMA_Y, projector(ket(1, 2))))
    elif variant == 2:
        matrix = 2. * (np.kron(SIGMA_PLUS, CONTROL_LOWER) +
                       np.kron(SIGMA_MINUS, CONTROL_RAISE))
    else:
        raise ProtocolError("Unknown qubit variant {!r}".format(variant))
    return JointHamiltonian(matrix, 2, 2)


def qubit_protocol(variant, duration):
    """Linear control protocol used with coupling ``variant``.
    """
    if variant == 1:
        return linear_protocol(0., np.pi, 0., 0., duration, 'qubit-1')
    elif variant == 2:
        return linear_protocol(
            np.pi / 2., np.pi / 6., 0., np.pi / 2., duration, 'qubit-2')
    raise ProtocolError("Unknown qubit variant {!r}".format(variant))


def qubit_free_energy(beta=DEFAULT_BETA):
    """``dF = -ln(Z_B / Z_A) / beta = ln[cosh(beta) / cosh(beta / 2)] / beta``
    for both variants.
    """
    return np.log(np.cosh(beta) / np.cosh(beta / 2.)) / beta


def qubit_example(variant, duration, N=DEFAULT_COLLISIONS, beta=DEFAULT_BETA,
                  protocol=None):
    """Run the one point measurement scheme for a qubit example.
    """
    H_SC = qubit_coupling(variant)
    protocol = protocol or qubit_protocol(variant, duration)
    U = effective_unitary(H_SC, protocol, N)
    H_A, H_B = endpoint_hamiltonians(H_SC, protocol)
    return modified_je(H_A, H_B, U, beta)


class FockSpace(object):
    """Number basis ``|0>, ..., |D-1>`` of an oscillator of frequency
    ``omega`` coupled with strength ``g`` to a control qubit.
    """
    def __init__(self, D=DEFAULT_TRUNCATION, omega=1., g=1.):
        if D < 2:
            raise ValueError("Fock truncation must be >= 2, got {}".format(D))
        self.D = D
        self.omega = float(omega)
        self.g = float(g)
        self.a = np.diag(np.sqrt(np.arange(1, D)), k=1).astype(complex)
        self.adag = dagger(self.a)
        self.number = np.diag(np.arange(D)).astype(complex)

    @property
    def hamiltonian(self):
        return self.omega * (self.number + 0.5 * np.eye(self.D))

    def coupling(self):
        """``omega (a^dag a + 1/2) (x) I + g (a (x) s_+ + a^dag (x) s_-)``.
        """
        matrix = (np.kron(self.hamiltonian, np.eye(2)) +
                  self.g * (np.kron(self.a, CONTROL_RAISE) +
                            np.kron(self.adag, CONTROL_LOWER)))
        return JointHamiltonian(matrix, self.D, 2)

    def displacement(self, alpha):
        return expm(alpha * self.adag - np.conj(alpha) * self.a)

    def fock(self, n):
        return ket(n, self.D)

    def __repr__(self):
        return 'FockSpace(D={}, omega={}, g={})'.format(
            self.D, self.omega, self.g)


_OSCILLATOR_ANGLES = {
    1: (lambda s: np.pi * s / 2., lambda s: 0. * s,
        lambda s: np.pi / 2. + 0. * s, lambda s: 0. * s),
    2: (lambda s: np.pi * s / 2., lambda s: np.pi * s / 2.,
        lambda s: np.pi / 2. + 0. * s, lambda s: np.pi / 2. + 0. * s),
    3: (lambda s: np.arcsin(s), lambda s: 0. * s,
        lambda s: 1. / np.sqrt(1. - s ** 2), lambda s: 0. * s),
    4: (lambda s: np.arcsin(s), lambda s: 2. * np.pi * s,
        lambda s: 1. / np.sqrt(1. - s ** 2), lambda s: 2. * np.pi + 0. * s),
}


def oscillator_protocol(index, duration):
    """Control protocol ``index`` (1 to 4) of the displaced oscillator.

    The angles are functions of ``s = t / T``; protocols 3 and 4 have a
    singular ``d theta / dt`` at ``t = T``.
    """
    try:
        theta, phi, dtheta, dphi = _OSCILLATOR_ANGLES[index]
    except KeyError:
        raise ProtocolError("Unknown oscillator protocol {!r}".format(index))
    T = float(duration)

    def scaled(fn, rate=1.):
        return lambda t: rate * fn(np.asarray(t, dtype=float) / T)

    return QubitProtocol(
        scaled(theta), scaled(phi), T,
        dtheta=scaled(dtheta, 1. / T), dphi=scaled(dphi, 1. / T),
        name='oscillator-{}'.format(index),
    )


def oscillator_force(protocol, t, g=1.):
    """``f(t) = g/2 sin(theta(t)) exp(i phi(t))``.
    """
    t = np.asarray(t, dtype=float)
    return 0.5 * g * np.sin(protocol.theta(t)) * np.exp(1j * protocol.phi(t))


def _check_start(protocol, g):
    f0 = oscillator_force(protocol, 0., g)
    if abs(f0) > 1e-12:
        raise ProtocolError(
            "Closed form needs f(0) = 0, got f(0) = {}".format(f0))


def _complex_quad(fn, lower, upper, tol=1e-10):
    re, _ = quad(lambda s: fn(s).real, lower, upper, epsabs=tol,
                 epsrel=tol, limit=200)
    im, _ = quad(lambda s: fn(s).imag, lower, upper, epsabs=tol,
                 epsrel=tol, limit=200)
    return re + 1j * im


def oscillator_p(protocol, omega=1., g=1., t=None):
    """Displacement ``p(t) = -i exp(-i omega t) int_0^t exp(i omega s) f(s) ds``.
    """
    _check_start(protocol, g)
    t = protocol.duration if t is None else float(t)
    integral = _complex_quad(
        lambda s: np.exp(1j * omega * s) * oscillator_force(protocol, s, g),
        0., t)
    return complex(-1j * np.exp(-1j * omega * t) * integral)


def oscillator_chi(protocol, omega=1., g=1., t=None):
    """Global phase ``chi(t) = -int_0^t Re[p(s) f*(s)] ds``.
    """
    _check_start(protocol, g)
    t = protocol.duration if t is None else float(t)

    def integrand(s):
        p = oscillator_p(protocol, omega, g, s)
        return (p * np.conj(oscillator_force(protocol, s, g))).real

    value, _ = quad(integrand, 0., t, epsabs=1e-9, epsrel=1e-9, limit=100)
    return -value


def oscillator_work_analytic(protocol, omega=1., g=1.):
    """``W = omega |p(T)|^2 + 2 Re[f*(T) p(T)]``, the same for every ``|n>``.
    """
    p = oscillator_p(protocol, omega, g)
    fT = oscillator_force(protocol, protocol.duration, g)
    return float(omega * abs(p) ** 2 + 2. * (np.conj(fT) * p).real)


def oscillator_free_energy(protocol, omega=1., g=1.):
    """``dF = (|f(0)|^2 - |f(T)|^2) / omega``; independent of ``phi``.
    """
    f0 = oscillator_force(protocol, 0., g)
    fT = oscillator_force(protocol, protocol.duration, g)
    return float((abs(f0) ** 2 - abs(fT) ** 2) / omega)


def oscillator_unitary_analytic(protocol, space):
    """``exp(i chi) D[p(T)] exp(-i omega T (a^dag a + 1/2))`` on ``space``.
    """
    T = protocol.duration
    p = oscillator_p(protocol, space.omega, space.g)
    chi = oscillator_chi(protocol, space.omega, space.g)
    free = np.exp(-1j * space.omega * T * (np.arange(space.D) + 0.5))
    return np.exp(1j * chi) * space.displacement(p) * free[np.newaxis, :]


def _check_leak(state, space):
    top = int(np.ceil(LEAK_FRACTION * space.D))
    leak = float(np.sum(np.abs(state[-top:]) ** 2))
    if leak > LEAK_THRESHOLD:
        raise TruncationLeakError(
            "Population {:.3e} in the top {} of {} Fock levels".format(
                leak, top, space.D))
    return leak


def oscillator_numeric(protocol, N=DEFAULT_COLLISIONS, D=DEFAULT_TRUNCATION,
                       n0=0, omega=1., g=1.):
    """Work done on Fock state ``|n0>`` on the truncated space.

    The propagator is the collision model's effective unitary.
    """
    space = FockSpace(D, omega, g)
    if not 0 <= n0 < D:
        raise ValueError("Fock state {} outside truncation {}".format(n0, D))
    H_SC = space.coupling()
    U = effective_unitary(H_SC, protocol, N)
    H_A, H_B = endpoint_hamiltonians(H_SC, protocol)
    final = U @ space.fock(n0)
    _check_leak(final, space)
    work = (np.vdot(final, H_B @ final) - H_A[n0, n0]).real
    return float(work)


def oscillator_one_point(protocol, N=DEFAULT_COLLISIONS,
                         D=DEFAULT_TRUNCATION, beta=DEFAULT_BETA, omega=1.,
                         g=1.):
    """One point measurement scheme on the truncated oscillator.
    """
    space = FockSpace(D, omega, g)
    H_SC = space.coupling()
    U = effective_unitary(H_SC, protocol, N)
    for n in range(int(np.ceil((1. - LEAK_FRACTION) * D)) // 2):
        _check_leak(U[:, n], space)
    H_A, H_B = endpoint_hamiltonians(H_SC, protocol)
    return modified_je(H_A, H_B, U, beta)


Figure1Row = namedtuple('Figure1Row', [
    'T', 'delta_F', 'delta_F_tilde', 'avg_work'])


def default_grid(T_min=0.05, T_max=50., points=40):
    """Log spaced switching times.
    """
    return np.geomspace(T_min, T_max, points)


def _figure1_point(kind, index, N, beta, omega, g, numeric, D, T):
    T = float(T)
    if kind == 'qubit':
        result = qubit_example(index, T, N, beta)
        return Figure1Row(T, result.delta_F, result.delta_F_tilde,
                          result.avg_work)

    protocol = oscillator_protocol(index, T)
    if numeric:
        result = oscillator_one_point(protocol, N, D, beta, omega, g)
        return Figure1Row(T, result.delta_F, result.delta_F_tilde,
                          result.avg_work)

    # the work does not depend on the initial Fock state: dF~ = <W>
    work = oscillator_work_analytic(protocol, omega, g)
    return Figure1Row(T, oscillator_free_energy(protocol, omega, g),
                      work, work)


def figure1_scan(kind, index, T_grid=None, N=DEFAULT_COLLISIONS,
                 beta=DEFAULT_BETA, omega=1., g=1., numeric=False,
                 D=DEFAULT_TRUNCATION, workers=None):
    """Tabulate ``(T, dF, dF~, <W>)`` over a grid of switching times.

    ``kind`` is ``'qubit'`` (``index`` the coupling variant) or
    ``'oscillator'`` (``index`` the protocol number). Grid points are
    evaluated by a process pool unless ``workers == 1``; rows are always
    returned in grid order.
    """
    if kind not in ('qubit', 'oscillator'):
        raise ProtocolError("Unknown example kind {!r}".format(kind))
    if kind == 'qubit':
        qubit_coupling(index)
    else:
        oscillator_protocol(index, 1.)
    grid = default_grid() if T_grid is None else np.asarray(T_grid, float)

    point = functools.partial(
        _figure1_point, kind, index, N, beta, omega, g, numeric, D)
    if workers == 1:
        rows = [point(T) for T in grid]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(point, grid))

    log.info("scanned {} {} over {} switching times".format(
        kind, index, len(rows)))
    return rows
