# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Dense finite-dimensional quantum linear algebra.

Operators are plain ``numpy`` arrays of shape ``(d, d)``, pure states are
1-d arrays and density matrices are ``(d, d)`` arrays. Most functions also
broadcast over leading "stack" axes so that whole protocols can be handled
in one call.
"""
import logging
from collections import namedtuple

import numpy as np
from scipy.special import logsumexp, xlogy
from scipy.stats import unitary_group

from .errors import DimensionError, NotHermitianError, IllConditionedError


log = logging.getLogger('workmeter').getChild('quantum')


Tolerances = namedtuple('Tolerances', [
    'structural',   # reconstruction, trace and unitarity of derived objects
    'algebraic',    # exact algebraic identities
    'hermitian',    # hermiticity of user input
    'unitary',      # unitarity of user supplied propagators
    'clamp',        # eigenvalue floor for matrix logarithms
    'positive',     # most negative eigenvalue accepted as PSD
])

TOL = Tolerances(
    structural=1e-10,
    algebraic=1e-12,
    hermitian=1e-12,
    unitary=1e-9,
    clamp=1e-14,
    positive=-1e-10,
)


IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# spin convention on a system qubit: sigma_+ = (sigma_x + i sigma_y) / 2
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)


SpectralDecomposition = namedtuple(
    'SpectralDecomposition', ['eigenvalues', 'eigenvectors'])
SpectralDecomposition.__doc__ = """Ascending eigenvalues and the matching
orthonormal eigenvectors stored as the *columns* of ``eigenvectors``.
"""


def dagger(M):
    """Conjugate transpose over the last two axes.
    """
    return np.conj(np.swapaxes(M, -1, -2))


def commutator(A, B):
    return A @ B - B @ A


def ket(index, dim):
    """Computational basis vector ``|index>`` of a ``dim`` level system.
    """
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.
    return vec


def projector(psi):
    """Return ``|psi><psi|`` (no normalization is applied).
    """
    psi = np.asarray(psi, dtype=complex)
    return np.multiply.outer(psi, np.conj(psi))


def _scale(M):
    return max(1., float(np.max(np.abs(M)))) if M.size else 1.


def as_operator(M):
    """Validate and return ``M`` as a complex square matrix.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionError(
            "Expected a square matrix, got shape {}".format(M.shape))
    return M


def is_hermitian(M, tol=TOL.hermitian):
    M = np.asarray(M)
    return np.max(np.abs(M - dagger(M))) <= tol * _scale(M)


def is_unitary(U, tol=TOL.unitary):
    U = np.asarray(U)
    eye = np.eye(U.shape[-1])
    return np.max(np.abs(dagger(U) @ U - eye)) <= tol


def as_hermitian(H, tol=TOL.hermitian):
    """Validate and return ``H`` as a hermitian operator.
    """
    H = as_operator(H)
    if not is_hermitian(H, tol):
        raise NotHermitianError(
            "Operator deviates from its adjoint by {:.3e}".format(
                np.max(np.abs(H - dagger(H)))))
    return H


def as_density(rho):
    """Validate and return ``rho`` as a density matrix.
    """
    rho = as_hermitian(rho, tol=TOL.structural)
    trace = np.trace(rho).real
    if abs(trace - 1.) > TOL.structural:
        raise ValueError("Density matrix has trace {!r}".format(trace))
    lowest = np.linalg.eigvalsh(rho)[0]
    if lowest < TOL.positive:
        raise ValueError(
            "Density matrix has negative eigenvalue {!r}".format(lowest))
    return rho


def as_pure(psi):
    """Validate and return ``psi`` as a normalized state vector.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size < 1:
        raise DimensionError(
            "Expected a state vector, got shape {}".format(psi.shape))
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.) > TOL.algebraic:
        raise ValueError("State vector has squared norm {!r}".format(norm))
    return psi


def to_density(state):
    """Return the density matrix of a pure state or pass a matrix through.
    """
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return projector(state)
    return state


def tensor(A, B):
    """Kronecker product ``A (x) B``.
    """
    return np.kron(as_operator(A), as_operator(B))


def _split(M, dimA, dimB):
    M = np.asarray(M)
    if M.shape[-2:] != (dimA * dimB, dimA * dimB):
        raise DimensionError(
            "Matrix of shape {} does not factor as {} x {}".format(
                M.shape[-2:], dimA, dimB))
    return M.reshape(M.shape[:-2] + (dimA, dimB, dimA, dimB))


def partial_trace_second(M, dimA, dimB):
    """Trace out the second factor of an operator on ``A (x) B``.
    """
    return np.einsum('...ijkj->...ik', _split(M, dimA, dimB))


def partial_trace_first(M, dimA, dimB):
    """Trace out the first factor of an operator on ``A (x) B``.
    """
    return np.einsum('...ijik->...jk', _split(M, dimA, dimB))


def expm_hermitian(H, t):
    """Return ``exp(-i H t)`` through the spectral decomposition of ``H``.

    ``H`` may carry leading stack axes in which case one propagator per
    stacked generator is returned.
    """
    H = np.asarray(H, dtype=complex)
    vals, vecs = np.linalg.eigh(H)
    phases = np.exp(-1j * vals * t)
    return (vecs * phases[..., np.newaxis, :]) @ dagger(vecs)


def spectral(H):
    """Spectral decomposition of a hermitian operator.
    """
    H = as_hermitian(H)
    vals, vecs = np.linalg.eigh(H)
    return SpectralDecomposition(vals, vecs)


def spectral_projectors(H, tol=TOL.structural):
    """Group the spectrum of ``H`` into eigenspaces.

    Returns a list of ``(energy, projector)`` pairs in ascending energy
    order; eigenvalues closer than ``tol`` share one (Lüders) projector.
    """
    vals, vecs = spectral(H)
    groups = []
    start = 0
    for k in range(1, len(vals) + 1):
        if k == len(vals) or vals[k] - vals[k - 1] > tol:
            block = vecs[:, start:k]
            groups.append((float(np.mean(vals[start:k])),
                           block @ dagger(block)))
            start = k
    return groups


def gibbs_weights(energies, beta):
    """Normalized Boltzmann weights of a list of energies.
    """
    energies = np.asarray(energies, dtype=float)
    logits = -beta * energies
    return np.exp(logits - logsumexp(logits))


def thermal_state(H, beta):
    """Return ``exp(-beta H) / Z``.
    """
    vals, vecs = spectral(H)
    weights = gibbs_weights(vals, beta)
    return (vecs * weights) @ dagger(vecs)


def log_partition_function(H, beta):
    vals = np.linalg.eigvalsh(as_hermitian(H))
    return float(logsumexp(-beta * vals))


def partition_function(H, beta):
    """``Z = Tr exp(-beta H)``.
    """
    return float(np.exp(log_partition_function(H, beta)))


def free_energy(H, beta):
    """``F = -ln(Z) / beta`` for ``beta > 0``.
    """
    if not beta > 0:
        raise ValueError(
            "Free energy requires beta > 0, got {!r}".format(beta))
    return -log_partition_function(H, beta) / beta


def von_neumann_entropy(rho):
    probs = np.clip(np.linalg.eigvalsh(as_hermitian(rho, TOL.structural)),
                    0., None)
    return float(-np.sum(xlogy(probs, probs)))


def relative_entropy(rho, sigma, strict=True):
    """Quantum relative entropy ``S(rho || sigma) = Tr rho (ln rho - ln sigma)``.

    Zero eigenvalues of ``rho`` contribute nothing. Eigenvalues of ``sigma``
    below ``TOL.clamp`` raise ``IllConditionedError``; with ``strict=False``
    they are clamped to ``TOL.clamp`` and a warning is logged instead.
    """
    rho = as_hermitian(rho, TOL.structural)
    sigma = as_hermitian(sigma, TOL.structural)
    if rho.shape != sigma.shape:
        raise DimensionError("Shapes {} and {} differ".format(
            rho.shape, sigma.shape))

    probs = np.clip(np.linalg.eigvalsh(rho), 0., None)
    svals, svecs = np.linalg.eigh(sigma)
    if svals[0] < TOL.clamp:
        msg = "sigma has eigenvalue {:.3e} below the clamp {:.0e}".format(
            svals[0], TOL.clamp)
        if strict:
            raise IllConditionedError(msg)
        log.warning(msg + ", clamping")
        svals = np.clip(svals, TOL.clamp, None)

    # populations of rho in the eigenbasis of sigma
    pops = np.einsum('ki,kl,li->i', np.conj(svecs), rho, svecs).real
    value = np.sum(xlogy(probs, probs)) - np.dot(pops, np.log(svals))
    return float(max(value, 0.))


def gibbs_relative_entropy(rho, H, beta):
    """``S(rho || exp(-beta H) / Z)`` with the Gibbs logarithm taken exactly.

    ``ln sigma = -beta H - ln Z`` is used directly, so a Gibbs state with
    vanishing populations at large ``beta`` needs no clamping.
    """
    rho = as_hermitian(rho, TOL.structural)
    H = as_hermitian(H, TOL.structural)
    if rho.shape != H.shape:
        raise DimensionError("Shapes {} and {} differ".format(
            rho.shape, H.shape))
    probs = np.clip(np.linalg.eigvalsh(rho), 0., None)
    energy = float(np.real(np.trace(rho @ H)))
    value = (np.sum(xlogy(probs, probs)) + beta * energy +
             log_partition_function(H, beta))
    return float(max(value, 0.))


def expectation(A, state):
    """Expectation value of ``A`` in a pure state or a density matrix.
    """
    A = as_operator(A)
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != A.shape[0]:
        raise DimensionError("Operator of dim {} on state of dim {}".format(
            A.shape[0], state.shape[0]))
    if state.ndim == 1:
        value = np.vdot(state, A @ state)
    else:
        value = np.trace(A @ state)
    if abs(value.imag) > TOL.structural * _scale(A):
        raise NotHermitianError(
            "Expectation value has imaginary part {:.3e}".format(value.imag))
    return float(value.real)


def random_hermitian(dim, rng):
    """A GUE-like hermitian matrix: complex gaussian entries, symmetrized.
    """
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (G + dagger(G)) / 2.


def random_unitary(dim, rng):
    """Haar distributed unitary.
    """
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return np.asarray(unitary_group.rvs(dim, random_state=rng), dtype=complex)


def random_density(dim, rng, rank=None):
    """Random full (or given ``rank``) density matrix.
    """
    rank = rank or dim
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal(
        (dim, rank))
    rho = G @ dagger(G)
    return rho / np.trace(rho).real
