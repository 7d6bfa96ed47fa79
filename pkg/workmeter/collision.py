# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Collision model of a system driven by a sequence of control ancillas.

Each ancilla is prepared in the current control state, collides once with
the system for ``dt`` and is discarded. In the limit of short collisions the
system evolves unitarily under the *relative Hamiltonian*
``<psi_C| H_SC |psi_C>``.
"""
import logging
from collections import namedtuple

import numpy as np

from .errors import DimensionError, ProtocolError
from .quantum import (
    as_hermitian, as_pure, dagger, expm_hermitian, projector,
    partial_trace_second, expectation,
)


log = logging.getLogger('workmeter').getChild('collision')

# number of complex entries processed per vectorized batch
CHUNK_ELEMENTS = 2 ** 20

DEFAULT_COLLISIONS = 40000


class JointHamiltonian(object):
    """A hermitian coupling ``H_SC`` on ``S (x) C``.
    """
    def __init__(self, matrix, dimS, dimC):
        matrix = as_hermitian(matrix)
        if matrix.shape[0] != dimS * dimC:
            raise DimensionError(
                "H_SC of dim {} does not factor as {} x {}".format(
                    matrix.shape[0], dimS, dimC))
        self.matrix = matrix
        self.dimS = dimS
        self.dimC = dimC
        # H[(s, j), (t, k)] -> blocks[s, j, t, k]
        self.blocks = matrix.reshape(dimS, dimC, dimS, dimC)

    @property
    def dim(self):
        return self.dimS * self.dimC

    def __repr__(self):
        return '{}(dimS={}, dimC={})'.format(
            type(self).__name__, self.dimS, self.dimC)


class ControlProtocol(object):
    """A differentiable path ``t -> |psi_C(t)>`` on ``[0, T]``.

    ``state_fn`` and the optional ``derivative_fn`` map an array of times of
    shape ``(n,)`` to an array of vectors of shape ``(n, dimC)``. Without an
    analytic derivative central differences are used.
    """
    def __init__(self, duration, state_fn, derivative_fn=None, name=None):
        if not duration > 0:
            raise ProtocolError(
                "Protocol duration must be positive, got {!r}".format(
                    duration))
        self.duration = float(duration)
        self.state_fn = state_fn
        self.derivative_fn = derivative_fn
        self.name = name or type(self).__name__

    @property
    def analytic(self):
        return self.derivative_fn is not None

    def states(self, times):
        return np.asarray(
            self.state_fn(np.asarray(times, dtype=float)), dtype=complex)

    def derivatives(self, times, step=None):
        """Tangent vectors ``|d psi_C / dt>`` at ``times``.

        ``step`` is the finite difference step used when no analytic
        derivative is available; near the protocol ends the difference
        becomes one-sided.
        """
        times = np.asarray(times, dtype=float)
        if self.derivative_fn is not None:
            return np.asarray(self.derivative_fn(times), dtype=complex)

        step = step or self.duration * 1e-6
        lo = np.clip(times - step, 0., self.duration)
        hi = np.clip(times + step, 0., self.duration)
        diff = self.states(hi) - self.states(lo)
        return diff / (hi - lo)[:, np.newaxis]

    def state_at(self, t):
        return as_pure(self.states(np.atleast_1d(t))[0])

    def derivative_at(self, t, step=None):
        return self.derivatives(np.atleast_1d(t), step=step)[0]

    def rescaled(self, duration):
        """The same shape run over a different duration.
        """
        scale = self.duration / float(duration)

        def state_fn(times):
            return self.state_fn(times * scale)

        derivative_fn = None
        if self.derivative_fn is not None:
            def derivative_fn(times):
                return self.derivative_fn(times * scale) * scale

        return ControlProtocol(duration, state_fn, derivative_fn, self.name)

    def __repr__(self):
        return '{}(T={})'.format(self.name, self.duration)


def qubit_state(theta, phi):
    """``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>`` for arrays of angles.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack(
        [np.cos(theta / 2.) + 0j, np.exp(1j * phi) * np.sin(theta / 2.)],
        axis=-1)


class QubitProtocol(ControlProtocol):
    """Qubit control parametrized by angle functions ``theta(t)``, ``phi(t)``.

    The angle functions must accept arrays. When both ``dtheta`` and
    ``dphi`` are given the state derivative is analytic.
    """
    def __init__(self, theta, phi, duration, dtheta=None, dphi=None,
                 name=None):
        self.theta = theta
        self.phi = phi
        self.dtheta = dtheta
        self.dphi = dphi
        derivative_fn = None
        if dtheta is not None and dphi is not None:
            derivative_fn = self._derivative
        super(QubitProtocol, self).__init__(
            duration, self._state, derivative_fn, name)

    def _state(self, times):
        return qubit_state(self.theta(times), self.phi(times))

    def _derivative(self, times):
        theta, phi = self.theta(times), self.phi(times)
        dtheta, dphi = self.dtheta(times), self.dphi(times)
        half = np.asarray(theta, dtype=float) / 2.
        upper = -0.5 * np.sin(half) * dtheta + 0j
        lower = np.exp(1j * phi) * (
            1j * dphi * np.sin(half) + 0.5 * np.cos(half) * dtheta)
        return np.stack([upper * np.ones_like(lower), lower], axis=-1)

    def rescaled(self, duration):
        scale = self.duration / float(duration)
        dtheta = dphi = None
        if self.dtheta is not None and self.dphi is not None:
            def dtheta(t):
                return self.dtheta(t * scale) * scale

            def dphi(t):
                return self.dphi(t * scale) * scale

        return QubitProtocol(
            lambda t: self.theta(t * scale), lambda t: self.phi(t * scale),
            duration, dtheta, dphi, self.name)


def linear_protocol(theta0, theta1, phi0, phi1, duration, name='linear'):
    """Qubit protocol with angles interpolated linearly in time.
    """
    T = float(duration)

    def const(value):
        return lambda t: value * np.ones_like(np.asarray(t, dtype=float))

    return QubitProtocol(
        lambda t: theta0 + (theta1 - theta0) * np.asarray(t) / T,
        lambda t: phi0 + (phi1 - phi0) * np.asarray(t) / T,
        T,
        dtheta=const((theta1 - theta0) / T),
        dphi=const((phi1 - phi0) / T),
        name=name,
    )


def constant_protocol(psi, duration):
    """A control that never changes; its derivative is identically zero.
    """
    psi = as_pure(psi)

    def state_fn(times):
        return np.tile(psi, (len(times), 1))

    def derivative_fn(times):
        return np.zeros((len(times), len(psi)), dtype=complex)

    return ControlProtocol(duration, state_fn, derivative_fn, 'constant')


DiscretizedProtocol = namedtuple(
    'DiscretizedProtocol', ['N', 'dt', 'times', 'states', 'derivatives'])


def discretize(protocol, N, sampling='midpoint'):
    """Sample a protocol at ``N`` collisions of length ``dt = T / N``.

    ``sampling='midpoint'`` uses ``t_i = (i + 1/2) dt``; ``'left'`` uses
    ``t_i = i dt``. Numeric derivatives use the step ``dt / 10``.
    """
    if int(N) != N or N < 1:
        raise ProtocolError("Need N >= 1 collisions, got {!r}".format(N))
    N = int(N)
    dt = protocol.duration / N
    offset = {'midpoint': 0.5, 'left': 0.}.get(sampling)
    if offset is None:
        raise ValueError("Unsupported sampling '{}'".format(sampling))
    times = (np.arange(N) + offset) * dt
    return DiscretizedProtocol(
        N, dt, times,
        protocol.states(times),
        protocol.derivatives(times, step=dt / 10.),
    )


def _check_control(H_SC, psiC):
    psiC = np.asarray(psiC, dtype=complex)
    if psiC.shape[-1] != H_SC.dimC:
        raise DimensionError(
            "Control state of dim {} for a control space of dim {}".format(
                psiC.shape[-1], H_SC.dimC))
    return psiC


def relative_hamiltonian(H_SC, psiC):
    """``<psi_C| H_SC |psi_C>``, the effective Hamiltonian on the system.

    ``psiC`` may be a stack of control states of shape ``(n, dimC)``, in
    which case a stack of relative Hamiltonians is returned.
    """
    psiC = _check_control(H_SC, psiC)
    return np.einsum(
        '...j,sjtk,...k->...st', np.conj(psiC), H_SC.blocks, psiC)


def relative_hamiltonian_derivative(H_SC, psiC, dpsiC):
    """Time derivative of the relative Hamiltonian along a protocol.
    """
    psiC = _check_control(H_SC, psiC)
    dpsiC = _check_control(H_SC, dpsiC)
    cross = np.einsum(
        '...j,sjtk,...k->...st', np.conj(dpsiC), H_SC.blocks, psiC)
    return cross + dagger(cross)


def endpoint_hamiltonians(H_SC, protocol):
    """The relative Hamiltonians ``(H_A, H_B)`` at ``t = 0`` and ``t = T``.
    """
    states = protocol.states(np.array([0., protocol.duration]))
    H_A, H_B = relative_hamiltonian(H_SC, states)
    return H_A, H_B


def collision_propagator(H_SC, dt):
    """Joint propagator ``exp(-i H_SC dt)`` of a single collision.
    """
    return expm_hermitian(H_SC.matrix, dt)


def collide(rho, psiC, propagator):
    """Joint state right after one collision of ``rho`` with ``|psiC>``.
    """
    joint = np.kron(rho, projector(psiC))
    return propagator @ joint @ dagger(propagator)


def collision_step_exact(rho, H_SC, psiC, dt, propagator=None):
    """Single collision map ``Tr_C{ e^{-iH dt} (rho (x) |psi><psi|) e^{iH dt} }``.
    """
    if dt < 0:
        raise ProtocolError("Collision time must be >= 0, got {}".format(dt))
    rho = np.asarray(rho, dtype=complex)
    psiC = _check_control(H_SC, psiC)
    if rho.shape != (H_SC.dimS, H_SC.dimS):
        raise DimensionError(
            "System state of shape {} for a system of dim {}".format(
                rho.shape, H_SC.dimS))
    if propagator is None:
        propagator = collision_propagator(H_SC, dt)
    joint = collide(rho, psiC, propagator)
    return partial_trace_second(joint, H_SC.dimS, H_SC.dimC)


def _first_order(rho, H, dt):
    out = rho - 1j * dt * (H @ rho - rho @ H)
    out = (out + dagger(out)) / 2.
    return out / np.trace(out).real


def collision_step_first_order(rho, H_SC, psiC, dt):
    """``rho - i dt [H_S^psi, rho]``, re-hermitized and renormalized.
    """
    H = relative_hamiltonian(H_SC, psiC)
    return _first_order(np.asarray(rho, dtype=complex), H, dt)


def _chunk_size(dim):
    return max(1, CHUNK_ELEMENTS // (dim * dim))


def ordered_product(stack):
    """Time ordered product ``U_{n-1} ... U_1 U_0`` of a stack of matrices.
    """
    stack = np.asarray(stack)
    while len(stack) > 1:
        carry = None
        if len(stack) % 2:
            carry, stack = stack[-1:], stack[:-1]
        stack = stack[1::2] @ stack[0::2]
        if carry is not None:
            stack = np.concatenate([stack, carry])
    return stack[0]


def step_propagators(H_SC, grid):
    """Yield ``exp(-i H_S(t_i) dt)`` for every collision in chunks.
    """
    size = _chunk_size(H_SC.dimS)
    for start in range(0, grid.N, size):
        H = relative_hamiltonian(H_SC, grid.states[start:start + size])
        yield expm_hermitian(H, grid.dt)


def effective_unitary(H_SC, protocol, N=DEFAULT_COLLISIONS,
                      sampling='midpoint'):
    """Zeno-limit propagator ``T exp(-i int H_S(t) dt)`` on the system.

    The protocol is sampled once per collision interval and the short-time
    propagators are multiplied in time order.
    """
    grid = discretize(protocol, N, sampling)
    U = np.eye(H_SC.dimS, dtype=complex)
    for chunk in step_propagators(H_SC, grid):
        U = ordered_product(chunk) @ U
    return U


Evolution = namedtuple('Evolution', ['state', 'trajectory', 'times'])


def evolve(rho0, H_SC, protocol, N=DEFAULT_COLLISIONS, step='first_order',
           trajectory=False, sampling='midpoint'):
    """Drive ``rho0`` through ``N`` collisions.

    ``step`` selects the per-collision map:

    - ``'first_order'``: ``rho - i dt [H_S^psi, rho]`` (the default)
    - ``'exact'``: the full joint collision with the ancilla
    - ``'unitary'``: conjugation with ``exp(-i H_S^psi dt)``

    With ``trajectory=True`` the states *before* every collision are
    returned as a ``(N, dimS, dimS)`` array alongside the sample times.
    """
    rho = np.asarray(rho0, dtype=complex)
    grid = discretize(protocol, N, sampling)
    states = np.empty((grid.N,) + rho.shape, dtype=complex) \
        if trajectory else None

    if step == 'exact':
        V = collision_propagator(H_SC, grid.dt)
        for i, psi in enumerate(grid.states):
            if trajectory:
                states[i] = rho
            rho = collision_step_exact(rho, H_SC, psi, grid.dt, propagator=V)
    elif step in ('first_order', 'unitary'):
        size = _chunk_size(H_SC.dimS)
        for start in range(0, grid.N, size):
            Hs = relative_hamiltonian(H_SC, grid.states[start:start + size])
            Us = expm_hermitian(Hs, grid.dt) if step == 'unitary' else None
            for k, H in enumerate(Hs):
                if trajectory:
                    states[start + k] = rho
                if Us is None:
                    rho = _first_order(rho, H, grid.dt)
                else:
                    rho = Us[k] @ rho @ dagger(Us[k])
    else:
        raise ValueError("Unsupported collision step '{}'".format(step))

    log.debug("evolved {} collisions of {} ({} steps)".format(
        grid.N, protocol, step))
    return Evolution(rho, states, grid.times if trajectory else None)


def energy_change(H_SC, protocol, rho0, rhoT):
    """``Tr{H_B rho_T} - Tr{H_A rho_0}`` with the protocol's end points.
    """
    H_A, H_B = endpoint_hamiltonians(H_SC, protocol)
    return expectation(H_B, rhoT) - expectation(H_A, rho0)


def internal_energy_work(H_SC, protocol, states, N=None, sampling='midpoint'):
    """Riemann sum of ``Tr{dH_S/dt rho(t_i)} dt`` along a trajectory.

    ``states`` are the system states before each collision as produced by
    ``evolve(..., trajectory=True)`` or the work meter.
    """
    states = np.asarray(states, dtype=complex)
    grid = discretize(protocol, N or len(states), sampling)
    if len(states) != grid.N:
        raise DimensionError("Got {} states for {} collisions".format(
            len(states), grid.N))
    dH = relative_hamiltonian_derivative(H_SC, grid.states, grid.derivatives)
    powers = np.einsum('nij,nji->n', dH, states).real
    return float(np.sum(powers) * grid.dt)
