# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Work fluctuation relations.

Two schemes are provided:

- the two point measurement (TPM) scheme with its exact Jarzynski identity
  ``<exp(-beta W)> = Z_B / Z_A``
- the one point measurement scheme where only the initial energy is
  measured and the conditional average works ``<W_a>`` are obtained from the
  external work meter. It obeys the modified equality
  ``E_a[exp(-beta <W_a>)] = exp(-beta dF) exp(-S(rho~ || rho_th))``.
"""
import logging
from collections import namedtuple

import numpy as np
from scipy.special import logsumexp

from .errors import BoundViolationError, DimensionError, NotUnitaryError
from .quantum import (
    TOL, as_hermitian, dagger, gibbs_relative_entropy, gibbs_weights,
    is_unitary, log_partition_function, spectral, spectral_projectors,
)


log = logging.getLogger('workmeter').getChild('fluctuation')

DEFAULT_BETA = 1.


TPMDistribution = namedtuple('TPMDistribution', [
    'probabilities', 'works', 'energies_A', 'energies_B'])
TPMDistribution.__doc__ = """Joint statistics of the two energy measurements.

``probabilities[a, b]`` is the probability to find eigenspace ``a`` of
``H_A`` first and eigenspace ``b`` of ``H_B`` second; ``works[a, b]`` is
``E_b - E_a``.
"""


def _as_channel(U, weights):
    """Normalize a unitary or a stack of unitaries to ``(stack, weights)``.
    """
    stack = np.asarray(U, dtype=complex)
    if stack.ndim == 2:
        stack = stack[np.newaxis]
    if stack.ndim != 3 or stack.shape[-1] != stack.shape[-2]:
        raise DimensionError(
            "Expected a unitary or a stack of unitaries, got shape {}".format(
                np.shape(U)))
    for k, Uk in enumerate(stack):
        if not is_unitary(Uk, TOL.unitary):
            raise NotUnitaryError(
                "Propagator {} deviates from unitarity by {:.3e}".format(
                    k, np.max(np.abs(dagger(Uk) @ Uk - np.eye(len(Uk))))))

    if weights is None:
        weights = np.full(len(stack), 1. / len(stack))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(stack),) or np.any(weights < 0):
        raise ValueError("Invalid channel weights {!r}".format(weights))
    return stack, weights / weights.sum()


def tpm_distribution(H_A, H_B, U, beta=DEFAULT_BETA, weights=None):
    """Two point measurement statistics for a thermal start in ``H_A``.

    ``U`` is a unitary or a stack of unitaries forming the mixed unitary
    channel ``rho -> sum_k w_k U_k rho U_k^dag``. Degenerate eigenvalues are
    measured with Lüders projectors.
    """
    H_A, H_B = as_hermitian(H_A), as_hermitian(H_B)
    if H_A.shape != H_B.shape:
        raise DimensionError("H_A and H_B shapes differ: {} vs {}".format(
            H_A.shape, H_B.shape))
    stack, weights = _as_channel(U, weights)
    if stack.shape[-1] != H_A.shape[0]:
        raise DimensionError("Propagator of dim {} for H_A of dim {}".format(
            stack.shape[-1], H_A.shape[0]))

    groups_A = spectral_projectors(H_A)
    groups_B = spectral_projectors(H_B)
    E_A = np.array([e for e, _ in groups_A])
    E_B = np.array([e for e, _ in groups_B])
    P_A = np.array([P for _, P in groups_A])
    P_B = np.array([P for _, P in groups_B])

    # P_a rho P_a = exp(-beta E_a) / Z_A P_a for a thermal start
    lnZ_A = log_partition_function(H_A, beta)
    pops = np.exp(-beta * E_A - lnZ_A)

    moved = np.einsum('k,kij,ajl,kml->aim', weights, stack, P_A,
                      np.conj(stack))
    overlap = np.einsum('bij,aji->ab', P_B, moved).real
    probs = np.clip(pops[:, np.newaxis] * overlap, 0., None)
    works = E_B[np.newaxis, :] - E_A[:, np.newaxis]
    return TPMDistribution(probs, works, E_A, E_B)


def jarzynski_average(dist, beta=DEFAULT_BETA):
    """``<exp(-beta W)>`` over a TPM distribution.
    """
    return float(np.sum(dist.probabilities * np.exp(-beta * dist.works)))


def _eigenbasis_works(H_A, H_B, U):
    H_A, H_B = as_hermitian(H_A), as_hermitian(H_B)
    U = np.asarray(U, dtype=complex)
    if not (H_A.shape == H_B.shape == U.shape):
        raise DimensionError("Shapes of H_A {}, H_B {} and U {} differ".format(
            H_A.shape, H_B.shape, U.shape))
    energies, basis = spectral(H_A)
    evolved = U @ basis
    # h_a = <a|U^dag H_B U|a>
    final = np.einsum('ia,ij,ja->a', np.conj(evolved), H_B, evolved).real
    return energies, evolved, final


def one_point_work(H_A, H_B, U, a_index):
    """``<W_a> = Tr{H_B U|a><a|U^dag} - E_a`` for eigenvector ``a`` of ``H_A``.

    Eigenvectors are indexed in the ascending order of ``spectral(H_A)``.
    """
    energies, _, final = _eigenbasis_works(H_A, H_B, U)
    if not 0 <= a_index < len(energies):
        raise IndexError("Eigen index {} out of range for dim {}".format(
            a_index, len(energies)))
    return float(final[a_index] - energies[a_index])


def best_guess_state(H_A, H_B, U, beta=DEFAULT_BETA):
    """``sum_a exp(-beta h_a) U|a><a|U^dag / Z~`` with ``h_a = <a|U^dag H_B U|a>``.
    """
    _, evolved, final = _eigenbasis_works(H_A, H_B, U)
    weights = gibbs_weights(final, beta)
    return (evolved * weights) @ dagger(evolved)


class OnePointResult(namedtuple('OnePointResult', [
        'energies', 'probabilities', 'works', 'lhs', 'delta_F_tilde',
        'delta_F', 'entropy', 'avg_work', 'beta'])):
    """Outcome of the one point measurement scheme.

    ``works[a]`` is the conditional average work ``<W_a>`` for initial
    outcome ``energies[a]`` which occurs with ``probabilities[a]``.
    """
    __slots__ = ()

    @property
    def residual(self):
        """Deviation from ``lhs = exp(-beta dF) exp(-S)``.
        """
        return abs(self.lhs - np.exp(
            -self.beta * self.delta_F - self.entropy))

    def bounds_hold(self, tol=1e-9):
        return (self.delta_F <= self.delta_F_tilde + tol and
                self.delta_F_tilde <= self.avg_work + tol)

    def check_bounds(self, tol=1e-9):
        """Raise ``BoundViolationError`` unless ``dF <= dF~ <= <W>``.
        """
        if not self.bounds_hold(tol):
            raise BoundViolationError(
                "dF={:.12g}, dF~={:.12g}, <W>={:.12g}".format(
                    self.delta_F, self.delta_F_tilde, self.avg_work))
        return self


def modified_je(H_A, H_B, U, beta=DEFAULT_BETA):
    """Evaluate the one point measurement scheme for propagator ``U``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive, got {!r}".format(beta))
    energies, evolved, final = _eigenbasis_works(H_A, H_B, U)
    lnZ_A = log_partition_function(H_A, beta)
    lnZ_B = log_partition_function(H_B, beta)
    probs = np.exp(-beta * energies - lnZ_A)
    works = final - energies

    # ln E_a[exp(-beta <W_a>)] = ln Z~ - ln Z_A
    log_lhs = logsumexp(-beta * final) - lnZ_A
    rho_tilde = (evolved * gibbs_weights(final, beta)) @ dagger(evolved)
    entropy = gibbs_relative_entropy(rho_tilde, H_B, beta)
    log.debug("one point scheme: ln Z~ - ln Z_A = {:.6g}, S = {:.6g}".format(
        log_lhs, entropy))

    return OnePointResult(
        energies=energies,
        probabilities=probs,
        works=works,
        lhs=float(np.exp(log_lhs)),
        delta_F_tilde=float(-log_lhs / beta),
        delta_F=float(-(lnZ_B - lnZ_A) / beta),
        entropy=entropy,
        avg_work=float(np.dot(probs, works)),
        beta=beta,
    )
