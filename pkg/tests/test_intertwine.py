"""Staged isomorphisms between close algebras and their implementations."""

import numpy as np
import pytest
from scipy.linalg import expm

from cstarlab.algebra import ConcreteAlgebra
from cstarlab.certs import (
    PAPER_BUDGET,
    ContradictionError,
    SpectralGapError,
    WindowError,
)
from cstarlab.cpmaps import LinMap, mult_defect
from cstarlab.geometry import near_inclusion
from cstarlab.instances import block_algebra
from cstarlab.intertwine import (
    IsoResult,
    close_isomorphism,
    half_flip_cpc,
    implement_unitarily,
    near_embedding_nuclear,
    unit_match,
)
from cstarlab.linalg import dagger, opnorm, rng_for


def small_rotation(N: int, eps: float, seed: int) -> np.ndarray:
    rng = rng_for(seed, "test-iso-rotation")
    g = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    h = g + dagger(g)
    return expm(1j * eps * h / opnorm(h))


def conjugated_pair(sizes, N, eps, seed):
    A = block_algebra(sizes, N)
    u = small_rotation(N, eps, seed)
    return A, A.conjugated(u), u


# ---------------------------------------------------------------------------
# close isomorphisms
# ---------------------------------------------------------------------------

def test_close_isomorphism_conjugated_pair():
    A, B, u = conjugated_pair((2, 1), 3, 1e-5, 4)
    gamma = 2.0 * opnorm(u - np.eye(3))
    res = close_isomorphism(A, B, gamma, seed=4)
    assert res.converged and res.surjective
    assert res.passed
    theta = res.map
    rng = rng_for(4, "iso-check")
    for _ in range(4):
        x = A.random_selfadjoint(rng)
        y = A.random_selfadjoint(rng)
        assert opnorm(theta(x @ y) - theta(x) @ theta(y)) < 1e-9
        assert B.residual(theta(x)) < 1e-8
    for key in ("closeness", "homomorphism", "image-membership",
                "injectivity", "surjectivity", "forward-closeness",
                "backward-closeness"):
        assert key in res.certificates, key
        assert res.certificates[key].passed, key


def test_close_isomorphism_inverse_round_trip():
    A, B, u = conjugated_pair((2,), 3, 1e-6, 9)
    gamma = 2.0 * opnorm(u - np.eye(3))
    res = close_isomorphism(A, B, gamma, seed=9)
    assert res.inverse is not None
    rng = rng_for(9, "inverse-check")
    for _ in range(4):
        x = A.random_selfadjoint(rng)
        assert opnorm(res.inverse(res.map(x)) - x) < 1e-8


def test_close_isomorphism_dim_mismatch_contradicts():
    A = block_algebra((2, 1), 3)
    B = block_algebra((3,), 3)
    with pytest.raises(ContradictionError):
        close_isomorphism(A, B, 1e-6)


def test_close_isomorphism_window_on_paper_track():
    A, B, _ = conjugated_pair((2,), 3, 1e-4, 1)
    with pytest.raises(WindowError):
        close_isomorphism(A, B, 1e-3, budget=PAPER_BUDGET)


# ---------------------------------------------------------------------------
# one-sided near embeddings
# ---------------------------------------------------------------------------

def test_near_embedding_into_larger_algebra():
    B = block_algebra((2, 2), 4)
    A0 = block_algebra((2,), 4)
    u = small_rotation(4, 1e-6, 7)
    A = A0.conjugated(u)
    cert_inc = near_inclusion(A, B)
    theta, cert = near_embedding_nuclear(A, B, cert_inc, seed=7)
    assert cert.verdict == "pass"
    for x in A.basis:
        xn = x / opnorm(x)
        assert B.residual(theta(xn)) < 1e-8
        assert opnorm(theta(xn) - xn) <= cert.ceiling + 1e-12


# ---------------------------------------------------------------------------
# half flip transport
# ---------------------------------------------------------------------------

def test_half_flip_cpc_close_to_identity():
    A, B, u = conjugated_pair((2,), 3, 1e-4, 11)
    gamma = 2.0 * opnorm(u - np.eye(3))
    phi, cert = half_flip_cpc(A, B, gamma, seed=11)
    assert cert.verdict == "pass"
    for x in A.basis:
        xn = x / opnorm(x)
        assert opnorm(phi(xn) - xn) <= cert.ceiling + 1e-12


def test_half_flip_needs_single_block():
    A = block_algebra((2, 1), 3)
    with pytest.raises(ValueError):
        half_flip_cpc(A, A, 1e-4)


# ---------------------------------------------------------------------------
# unitary implementation
# ---------------------------------------------------------------------------

def test_implement_unitarily_conjugates_exactly():
    A, B, u0 = conjugated_pair((2, 1), 3, 1e-5, 13)
    gamma = 2.0 * opnorm(u0 - np.eye(3))
    alpha = close_isomorphism(A, B, gamma, seed=13)
    u, cert = implement_unitarily(alpha, seed=13)
    assert cert.verdict == "pass"
    assert opnorm(dagger(u) @ u - np.eye(3)) < 1e-10
    for b in A.basis:
        assert opnorm(u @ b @ dagger(u) - alpha.map(b)) < 1e-8
    assert cert.details["u_norm"] <= cert.details["u_norm_ceiling"] + 1e-9


def test_implement_unitarily_rejects_ambient_mismatch():
    A = block_algebra((2,), 3)
    B = block_algebra((2,), 4)
    images = []
    for b in A.basis:
        m = np.zeros((4, 4), dtype=complex)
        m[:3, :3] = b
        images.append(m)
    theta = LinMap(A, 4, tuple(images), codomain_algebra=B)
    alpha = IsoResult(map=theta, inverse=None, conjugators=[], trace=[],
                      certificates={}, eta=0.0, mu=0.0, nu=0.0,
                      converged=True, surjective=False)
    with pytest.raises(ValueError):
        implement_unitarily(alpha)


def test_implement_unitarily_rejects_non_homomorphism():
    A = block_algebra((2,), 3)
    rng = rng_for(2, "non-hom")
    images = []
    for b in A.basis:
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        images.append(b + 0.05 * g / opnorm(g))
    theta = LinMap(A, 3, tuple(images), codomain_algebra=A)
    defect = mult_defect(theta, list(A.basis)).defect
    assert defect > 1e-3  # the perturbation really breaks multiplicativity
    alpha = IsoResult(map=theta, inverse=None, conjugators=[], trace=[],
                      certificates={}, eta=0.0, mu=0.0, nu=0.0,
                      converged=True, surjective=False)
    with pytest.raises(ValueError):
        implement_unitarily(alpha, mode="exact")


# ---------------------------------------------------------------------------
# unit matching
# ---------------------------------------------------------------------------

def test_unit_match_conjugates_supports():
    A, B, u0 = conjugated_pair((2,), 4, 1e-3, 17)
    gamma = 2.0 * opnorm(u0 - np.eye(4))
    u, cert = unit_match(A, B, gamma)
    assert cert.verdict == "pass"
    assert opnorm(u @ A.support @ dagger(u) - B.support) < 1e-10


def test_unit_match_orthogonal_supports():
    e00 = np.zeros((2, 2), dtype=complex)
    e00[0, 0] = 1.0
    e11 = np.zeros((2, 2), dtype=complex)
    e11[1, 1] = 1.0
    A = ConcreteAlgebra.from_basis([e00], 2)
    B = ConcreteAlgebra.from_basis([e11], 2)
    with pytest.raises(SpectralGapError):
        unit_match(A, B, 0.3)
