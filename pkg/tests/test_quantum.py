# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Dense quantum linear algebra tests.
"""
import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from workmeter import quantum as qm
from workmeter.errors import (
    DimensionError, IllConditionedError, NotHermitianError,
)


def test_tensor_basics():
    assert_allclose(qm.tensor(np.eye(2), np.eye(2)), np.eye(4))
    out = qm.tensor(qm.SIGMA_X, qm.projector(qm.ket(0, 2)))
    expected = np.zeros((4, 4))
    expected[0, 2] = expected[2, 0] = 1
    assert_allclose(out, expected)
    assert_allclose(qm.tensor(np.diag([1, 2]), np.diag([3, 4])),
                    np.diag([3, 4, 6, 8]))


def test_partial_traces(rng):
    rho = qm.random_density(3, rng)
    sigma = qm.random_density(2, rng)
    joint = qm.tensor(rho, sigma)
    assert_allclose(qm.partial_trace_second(joint, 3, 2), rho, atol=1e-12)
    assert_allclose(qm.partial_trace_first(joint, 3, 2), sigma, atol=1e-12)

    bell = (qm.ket(0, 4) + qm.ket(3, 4)) / np.sqrt(2)
    assert_allclose(qm.partial_trace_second(qm.projector(bell), 2, 2),
                    np.eye(2) / 2, atol=1e-12)

    H = qm.random_hermitian(6, rng)
    assert np.trace(qm.partial_trace_second(H, 3, 2)) == pytest.approx(
        np.trace(H), abs=1e-12)


def test_partial_trace_positive(rng):
    rho = qm.random_density(6, rng)
    for reduced in (qm.partial_trace_second(rho, 3, 2),
                    qm.partial_trace_first(rho, 3, 2)):
        assert np.linalg.eigvalsh(reduced)[0] >= -1e-12
        assert np.trace(reduced).real == pytest.approx(1, abs=1e-12)


def test_partial_trace_dim_mismatch():
    with pytest.raises(DimensionError):
        qm.partial_trace_second(np.eye(6), 2, 2)


def test_expm_hermitian():
    assert_allclose(qm.expm_hermitian(qm.SIGMA_X, 0.), np.eye(2))
    assert_allclose(qm.expm_hermitian(qm.SIGMA_Z, np.pi / 2),
                    np.diag([-1j, 1j]), atol=1e-15)
    t = 0.3
    assert_allclose(
        qm.expm_hermitian(qm.SIGMA_X, t),
        np.cos(t) * np.eye(2) - 1j * np.sin(t) * qm.SIGMA_X, atol=1e-12)


def test_expm_unitary_over_range(rng):
    for dim in (2, 5, 8):
        H = qm.random_hermitian(dim, rng)
        H *= 10 / np.linalg.norm(H, 2)
        for t in (-100., -1., 0.37, 100.):
            assert qm.is_unitary(qm.expm_hermitian(H, t), 1e-10)


def test_expm_stacked(rng):
    stack = np.array([qm.random_hermitian(3, rng) for _ in range(4)])
    batched = qm.expm_hermitian(stack, 0.7)
    for H, U in zip(stack, batched):
        assert_allclose(U, qm.expm_hermitian(H, 0.7), atol=1e-12)


def test_spectral_pauli():
    vals, vecs = qm.spectral(qm.SIGMA_Z)
    assert_allclose(vals, [-1, 1])
    assert abs(vecs[1, 0]) == pytest.approx(1)
    assert abs(vecs[0, 1]) == pytest.approx(1)

    vals, vecs = qm.spectral(qm.SIGMA_X)
    assert_allclose(vals, [-1, 1], atol=1e-15)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert abs(np.vdot(minus, vecs[:, 0])) == pytest.approx(1)


def test_spectral_reconstruction(rng):
    H = qm.random_hermitian(5, rng)
    vals, vecs = qm.spectral(H)
    assert np.all(np.diff(vals) >= 0)
    assert_allclose((vecs * vals) @ qm.dagger(vecs), H, atol=1e-10)
    assert_allclose(qm.dagger(vecs) @ vecs, np.eye(5), atol=1e-10)


def test_spectral_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        qm.spectral(np.array([[0, 1], [0, 0]]))


def test_spectral_projectors_group_degenerate():
    H = np.diag([0., 1., 1., 2.])
    groups = qm.spectral_projectors(H)
    assert [energy for energy, _ in groups] == pytest.approx([0, 1, 2])
    assert_allclose(groups[1][1], np.diag([0, 1, 1, 0]), atol=1e-12)
    assert_allclose(sum(P for _, P in groups), np.eye(4), atol=1e-12)


def test_thermal_state():
    assert_allclose(qm.thermal_state(qm.SIGMA_X, 0.), np.eye(2) / 2,
                    atol=1e-15)
    assert_allclose(qm.thermal_state(qm.SIGMA_Z, 1.),
                    np.diag([0.11920292, 0.88079708]), atol=1e-8)


def test_thermal_state_gibbs_weights(rng):
    H = qm.random_hermitian(4, rng)
    rho = qm.thermal_state(H, 0.8)
    assert_allclose(qm.commutator(rho, H), 0, atol=1e-12)
    vals = qm.spectral(H).eigenvalues
    weights = np.exp(-0.8 * vals) / np.sum(np.exp(-0.8 * vals))
    assert_allclose(np.linalg.eigvalsh(rho), np.sort(weights), atol=1e-12)


def test_partition_and_free_energy():
    assert qm.partition_function(qm.SIGMA_Z, 1.) == pytest.approx(
        2 * np.cosh(1), abs=1e-12)
    assert qm.free_energy(qm.SIGMA_Z, 1.) == pytest.approx(-1.12692, abs=1e-5)
    assert qm.partition_function(np.zeros((3, 3)), 2.) == pytest.approx(3)
    assert qm.free_energy(np.zeros((3, 3)), 2.) == pytest.approx(
        -np.log(3) / 2)
    with pytest.raises(ValueError):
        qm.free_energy(qm.SIGMA_Z, 0.)


def test_free_energy_gauge_shift(rng):
    H = qm.random_hermitian(3, rng)
    assert qm.free_energy(H + 2.5 * np.eye(3), 0.7) == pytest.approx(
        qm.free_energy(H, 0.7) + 2.5, abs=1e-12)


def test_free_energy_monotone_in_beta(rng):
    H = qm.random_hermitian(4, rng)
    H -= np.trace(H) / 4 * np.eye(4)
    values = [qm.free_energy(H, beta) for beta in np.linspace(0.05, 10, 60)]
    assert np.all(np.diff(values) <= 1e-12)


def test_relative_entropy_examples():
    rho = np.diag([0.2, 0.8])
    assert qm.relative_entropy(rho, rho) == pytest.approx(0, abs=1e-12)
    assert qm.relative_entropy(qm.projector(qm.ket(0, 2)),
                               np.eye(2) / 2) == pytest.approx(np.log(2))
    assert qm.relative_entropy(rho, np.eye(2) / 2) == pytest.approx(
        0.2 * np.log(0.4) + 0.8 * np.log(1.6))


def test_relative_entropy_non_negative(rng):
    for _ in range(1000):
        rho = qm.random_density(3, rng)
        sigma = qm.random_density(3, rng)
        assert qm.relative_entropy(rho, sigma) >= 0
        assert qm.relative_entropy(rho, rho) <= 1e-10


def test_relative_entropy_ill_conditioned(caplog):
    singular = np.diag([1., 0.])
    with pytest.raises(IllConditionedError):
        qm.relative_entropy(np.eye(2) / 2, singular)

    with caplog.at_level(logging.WARNING):
        value = qm.relative_entropy(np.eye(2) / 2, singular, strict=False)
    assert np.isfinite(value) and value > 0
    assert 'clamp' in caplog.text


def test_gibbs_relative_entropy_matches_general(rng):
    for _ in range(50):
        rho = qm.random_density(3, rng)
        H = qm.random_hermitian(3, rng)
        assert qm.gibbs_relative_entropy(rho, H, 0.7) == pytest.approx(
            qm.relative_entropy(rho, qm.thermal_state(H, 0.7)), abs=1e-9)


def test_gibbs_relative_entropy_cold(caplog):
    """Vanishing Gibbs populations stay exact without a clamp warning.
    """
    with caplog.at_level(logging.WARNING):
        value = qm.gibbs_relative_entropy(np.eye(2) / 2, 30 * qm.SIGMA_X, 2.)
    assert value == pytest.approx(np.log(np.cosh(60.)), rel=1e-12)
    assert 'clamp' not in caplog.text
    with pytest.raises(DimensionError):
        qm.gibbs_relative_entropy(np.eye(2) / 2, np.eye(3), 1.)


def test_expectation():
    assert qm.expectation(qm.SIGMA_Z, qm.ket(0, 2)) == pytest.approx(1)
    assert qm.expectation(qm.SIGMA_X, np.eye(2) / 2) == pytest.approx(0)
    with pytest.raises(DimensionError):
        qm.expectation(qm.SIGMA_Z, np.eye(3) / 3)


def test_expectation_spectral(rng):
    H = qm.random_hermitian(4, rng)
    rho = qm.random_density(4, rng)
    vals, vecs = qm.spectral(H)
    pops = np.einsum('ki,kl,li->i', np.conj(vecs), rho, vecs).real
    assert qm.expectation(H, rho) == pytest.approx(np.dot(vals, pops),
                                                   abs=1e-10)


def test_validators():
    with pytest.raises(DimensionError):
        qm.as_operator(np.ones((2, 3)))
    with pytest.raises(ValueError):
        qm.as_density(np.eye(2))
    with pytest.raises(ValueError):
        qm.as_pure([1, 1])
    assert_allclose(qm.as_density(np.eye(2) / 2), np.eye(2) / 2)


def test_random_samplers(rng):
    assert qm.is_hermitian(qm.random_hermitian(5, rng))
    assert qm.is_unitary(qm.random_unitary(5, rng))
    rho = qm.random_density(4, rng, rank=1)
    assert np.trace(rho @ rho).real == pytest.approx(1)
