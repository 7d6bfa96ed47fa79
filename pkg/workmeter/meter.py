# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
External work measurement on the control ancillas.

The meter never looks at the system Hamiltonian. Every ancilla is collided
with the system, then the work increment observable ``Omega`` built from
the (experimenter known) control state and its time derivative is measured
on the outgoing ancilla.
"""
import logging
from collections import namedtuple

import numpy as np

from .errors import DimensionError
from .quantum import (
    dagger, partial_trace_first, partial_trace_second,
    to_density, TOL,
)
from .collision import (
    DEFAULT_COLLISIONS, collide, collision_propagator, discretize,
)


log = logging.getLogger('workmeter').getChild('meter')


AncillaKick = namedtuple('AncillaKick', ['vector'])
AncillaKick.__doc__ = """First order change ``|psi_C^*> = |psi_C> + dt |vector>``
of a control state during one collision.
"""


def control_hamiltonian(H_SC, system_state):
    """Partial average of ``H_SC`` over the system: ``Tr_S{rho_S H_SC}``.
    """
    rho = to_density(system_state)
    if rho.shape != (H_SC.dimS, H_SC.dimS):
        raise DimensionError(
            "System state of shape {} for a system of dim {}".format(
                rho.shape, H_SC.dimS))
    return np.einsum('ts,sjtk->jk', rho, H_SC.blocks)


def ancilla_kick(H_SC, system_state, psiC):
    """``-i H_C^{psi_S} |psi_C>`` for a pure or mixed system state.
    """
    psiC = np.asarray(psiC, dtype=complex)
    if psiC.shape != (H_SC.dimC,):
        raise DimensionError(
            "Control state of shape {} for a control space of dim {}".format(
                psiC.shape, H_SC.dimC))
    return AncillaKick(-1j * control_hamiltonian(H_SC, system_state) @ psiC)


def work_increment(psiC_dot, kick, dt):
    """``dW = -2 dt Im<psi_C_dot|psi_kick>``.
    """
    vector = kick.vector if isinstance(kick, AncillaKick) else kick
    return float(-2. * dt * np.vdot(psiC_dot, vector).imag)


class WorkIncrementObservable(namedtuple(
        'WorkIncrementObservable',
        ['omega', 'zeta', 'alpha', 'phi_plus', 'phi_minus'])):
    """Two outcome observable on an outgoing ancilla.

    ``omega = (|phi_-><phi_-| - |phi_+><phi_+|) / (2 alpha) + zeta I`` with
    ``|phi_+-> = |psi_C> +- i alpha |psi_C_dot>``. A static control has
    ``alpha = None`` and ``omega = 0``.
    """
    __slots__ = ()

    @property
    def degenerate(self):
        return self.alpha is None

    def expectation(self, rho):
        return float(np.trace(self.omega @ rho).real)

    def outcomes(self, rho):
        """Eigenvalues of ``omega`` and their probabilities in ``rho``.
        """
        vals, vecs = np.linalg.eigh(self.omega)
        probs = np.einsum('ki,kl,li->i', np.conj(vecs), rho, vecs).real
        probs = np.clip(probs, 0., None)
        return vals, probs / probs.sum()


def work_observable(psiC, psiC_dot):
    """Build the work increment observable for one collision.
    """
    psi = np.asarray(psiC, dtype=complex)
    dpsi = np.asarray(psiC_dot, dtype=complex)
    speed = np.vdot(dpsi, dpsi).real
    if speed <= TOL.algebraic ** 2:
        zero = np.zeros((len(psi), len(psi)), dtype=complex)
        return WorkIncrementObservable(zero, 0., None, psi, psi)

    alpha = np.sqrt(np.vdot(psi, psi).real / speed)
    zeta = 2. * np.vdot(dpsi, psi).imag
    cross = np.multiply.outer(psi, np.conj(dpsi))
    omega = 1j * (cross - dagger(cross)) + zeta * np.eye(len(psi))
    return WorkIncrementObservable(
        omega, float(zeta), float(alpha),
        psi + 1j * alpha * dpsi,
        psi - 1j * alpha * dpsi,
    )


WorkRecord = namedtuple('WorkRecord', [
    'increments', 'total', 'mode', 'times', 'states', 'final_state'])
WorkRecord.__doc__ = """Outcome of a work measurement along a protocol.

``states`` holds the system states before every collision when requested
and is ``None`` otherwise.
"""

SampledWork = namedtuple('SampledWork', [
    'totals', 'mean_increments', 'mean', 'stderr', 'times'])


def _collisions(rho0, H_SC, grid):
    """Run the collision sequence yielding the meter's view of each step.

    Yields ``(rho_S, rho_C, observable)`` with the system state before the
    collision and the ancilla state after it.
    """
    rho = to_density(rho0)
    V = collision_propagator(H_SC, grid.dt)
    for psi, dpsi in zip(grid.states, grid.derivatives):
        joint = collide(rho, psi, V)
        rho_C = partial_trace_first(joint, H_SC.dimS, H_SC.dimC)
        yield rho, rho_C, work_observable(psi, dpsi)
        rho = partial_trace_second(joint, H_SC.dimS, H_SC.dimC)
    yield rho, None, None


def measure_work(rho0, H_SC, protocol, N=DEFAULT_COLLISIONS,
                 mode='expectation', rng=None, record_states=False,
                 sampling='midpoint'):
    """Accumulate the measured work increments along ``protocol``.

    In ``'expectation'`` mode each increment is ``Tr{Omega_i rho_C^*}``; in
    ``'sampled'`` mode a single outcome of ``Omega_i`` is drawn with ``rng``
    for every ancilla.
    """
    if mode not in ('expectation', 'sampled'):
        raise ValueError("Unsupported measurement mode '{}'".format(mode))
    if mode == 'sampled' and rng is None:
        raise ValueError("Sampled mode needs an explicit rng")

    grid = discretize(protocol, N, sampling)
    increments = np.empty(grid.N)
    states = np.empty((grid.N, H_SC.dimS, H_SC.dimS), dtype=complex) \
        if record_states else None

    steps = _collisions(rho0, H_SC, grid)
    for i, (rho, rho_C, observable) in enumerate(steps):
        if observable is None:
            final = rho
            break
        if record_states:
            states[i] = rho
        if mode == 'expectation':
            increments[i] = observable.expectation(rho_C)
        else:
            vals, probs = observable.outcomes(rho_C)
            increments[i] = vals[rng.choice(len(vals), p=probs)]

    total = float(np.sum(increments))
    log.debug("measured W = {:.6g} over {} collisions ({})".format(
        total, grid.N, mode))
    return WorkRecord(increments, total, mode, grid.times, states, final)


def sample_work(rho0, H_SC, protocol, shots, rng, N=DEFAULT_COLLISIONS,
                sampling='midpoint'):
    """Draw ``shots`` independent sampled-mode runs in one pass.

    The system is never measured so all runs share one system trajectory;
    only the ancilla outcomes differ between shots.
    """
    if shots < 1:
        raise ValueError("Need at least one shot, got {}".format(shots))
    grid = discretize(protocol, N, sampling)
    totals = np.zeros(shots)
    means = np.empty(grid.N)

    steps = _collisions(rho0, H_SC, grid)
    for i, (rho, rho_C, observable) in enumerate(steps):
        if observable is None:
            break
        vals, probs = observable.outcomes(rho_C)
        edges = np.cumsum(probs)[:-1]
        picks = np.searchsorted(edges, rng.random(shots), side='right')
        draws = vals[picks]
        means[i] = draws.mean()
        totals += draws

    stderr = float(totals.std(ddof=1) / np.sqrt(shots)) if shots > 1 else 0.
    log.info("sampled {} shots: <W> = {:.6g} +- {:.2g}".format(
        shots, totals.mean(), stderr))
    return SampledWork(totals, means, float(totals.mean()), stderr,
                       grid.times)
