"""Completely positive maps: Choi matrices, classification, dilation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cstarlab.algebra import FDAlgebra, dagger, opnorm
from cstarlab.cpmaps import (
    LinMap,
    arveson_restrict,
    cb_bracket,
    check_stinespring_inequality,
    choi,
    classify,
    conditional_expectation,
    from_choi,
    kraus_operators,
    mult_defect,
    stinespring,
    ucp_extension,
)
from cstarlab.instances import block_algebra
from cstarlab.linalg import rng_for


def random_ucp(fd: FDAlgebra, N: int, seed: int = 0) -> LinMap:
    # compress an amplified defining representation by a Haar isometry
    rng = rng_for(seed, "test-ucp")
    D = fd.d * N
    g = rng.standard_normal((D, N)) + 1j * rng.standard_normal((D, N))
    v, _ = np.linalg.qr(g)
    images = tuple(dagger(v) @ np.kron(fd.matrix_unit(k, i, j), np.eye(N)) @ v
                   for (k, i, j) in fd.unit_labels())
    return LinMap(fd, N, images)


def random_selfadjoint_map(fd: FDAlgebra, N: int, seed: int = 0) -> LinMap:
    rng = rng_for(seed, "test-sa-map")
    images = []
    for _ in range(fd.dim_linear):
        g = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        images.append(0.1 * (g + dagger(g)))
    return LinMap(fd, N, tuple(images))


# ---------------------------------------------------------------------------
# Choi correspondence
# ---------------------------------------------------------------------------

@given(seed=st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=30, deadline=None)
def test_choi_round_trip(seed):
    fd = FDAlgebra((2, 1))
    phi = random_selfadjoint_map(fd, 3, seed)
    back = from_choi(choi(phi), fd.block_sizes, 3)
    for a, b in zip(phi.images, back.images):
        assert opnorm(a - b) < 1e-12


def test_choi_of_ucp_is_psd():
    fd = FDAlgebra((2,))
    phi = random_ucp(fd, 4, seed=3)
    C = choi(phi)
    assert opnorm(C - dagger(C)) < 1e-12
    assert np.linalg.eigvalsh(C).min() > -1e-12


def test_classify_ucp():
    fd = FDAlgebra((2, 1))
    phi = random_ucp(fd, 5, seed=11)
    cls = classify(phi)
    assert cls.cp and cls.cpc and cls.ucp
    assert cls.unit_defect < 1e-10


def test_classify_transpose_not_cp():
    # the transpose map on M_2 is positive but not completely positive
    fd = FDAlgebra((2,))
    images = tuple(fd.matrix_unit(k, i, j).T for (k, i, j) in fd.unit_labels())
    phi = LinMap(fd, 2, images)
    cls = classify(phi)
    assert not cls.cp
    assert cls.choi_min_eig < -0.5


def test_classify_cp_not_contractive():
    fd = FDAlgebra((2,))
    phi = random_ucp(fd, 3, seed=5).scaled(2.0)
    cls = classify(phi)
    assert cls.cp and not cls.cpc and not cls.ucp


# ---------------------------------------------------------------------------
# Stinespring dilation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("sizes", [(2,), (1, 1), (2, 1), (3,)])
def test_stinespring_reconstructs(sizes):
    fd = FDAlgebra(sizes)
    phi = random_ucp(fd, 4, seed=sum(sizes))
    dil = stinespring(phi)
    rng = rng_for(99, "stinespring-check")
    for _ in range(4):
        x = fd.random_element(rng)
        assert opnorm(dil.reconstruct(x) - phi(x)) < 1e-10
    assert dil.rep_hom_residual() < 1e-10


def test_stinespring_isometry_for_ucp():
    fd = FDAlgebra((2, 1))
    phi = random_ucp(fd, 4, seed=2)
    dil = stinespring(phi)
    v = dil.isometry
    assert opnorm(dagger(v) @ v - np.eye(v.shape[1])) < 1e-10
    p = dil.compression
    assert opnorm(p @ p - p) < 1e-10


def test_kraus_operators_sum():
    fd = FDAlgebra((2,))
    phi = random_ucp(fd, 3, seed=7)
    ops = kraus_operators(phi)
    # completeness: sum_t K_t 1 K_t* recovers phi(1) blockwise
    total = np.zeros((3, 3), dtype=complex)
    for block in ops:
        for K in block:
            total = total + K @ dagger(K)
    assert opnorm(total - phi(fd.unit())) < 1e-10


def test_schwarz_inequality_for_cpc():
    fd = FDAlgebra((2, 1))
    phi = random_ucp(fd, 4, seed=13)
    rng = rng_for(13, "schwarz")
    for _ in range(5):
        x, y = fd.random_element(rng), fd.random_element(rng)
        ok, margin = check_stinespring_inequality(phi, x, y)
        assert ok, f"Schwarz defect bound violated by {margin:.3g}"


def test_mult_defect_zero_for_hom():
    fd = FDAlgebra((2,))
    images = tuple(fd.matrix_unit(k, i, j) for (k, i, j) in fd.unit_labels())
    phi = LinMap(fd, 2, images)
    rng = rng_for(0, "defect")
    X = [fd.random_element(rng) for _ in range(4)]
    rep = mult_defect(phi, X)
    assert rep.defect < 1e-12
    assert len(rep.table) == 8  # each element and its adjoint


# ---------------------------------------------------------------------------
# cb norm bracket
# ---------------------------------------------------------------------------

def test_cb_bracket_cp_is_exact():
    fd = FDAlgebra((2, 1))
    phi = random_ucp(fd, 4, seed=4)
    lo, hi = cb_bracket(phi)
    assert lo == hi
    assert abs(hi - 1.0) < 1e-10


def test_cb_bracket_transpose():
    # cb norm of the transpose on M_2 equals 2; the bracket must contain it
    fd = FDAlgebra((2,))
    images = tuple(fd.matrix_unit(k, i, j).T for (k, i, j) in fd.unit_labels())
    phi = LinMap(fd, 2, images)
    lo, hi = cb_bracket(phi, samples=24, seed=1)
    assert lo <= 2.0 + 1e-9
    assert hi >= 2.0 - 1e-9
    assert lo >= 1.0 - 1e-9


# ---------------------------------------------------------------------------
# expectations, restrictions, extensions
# ---------------------------------------------------------------------------

def test_conditional_expectation_idempotent():
    A = block_algebra((2, 1), 4)
    E = conditional_expectation(A)
    rng = rng_for(21, "cond-exp")
    for _ in range(4):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert opnorm(E(E(g)) - E(g)) < 1e-10
        assert A.residual(E(g)) < 1e-10
    cls = classify(E)
    assert cls.cp and cls.ucp


def test_arveson_restrict_close_on_window():
    # restriction of the expectation onto a conjugated copy stays close on
    # the sampled window when the copy is a small rotation
    A = block_algebra((2, 1), 3)
    rng = rng_for(3, "arveson")
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    h = 1e-3 * (g + dagger(g)) / opnorm(g + dagger(g))
    from scipy.linalg import expm
    u = expm(1j * h)
    B = A.conjugated(u)
    X = [b.copy() for b in A.basis]
    gamma = max(B.residual(x) for x in X)
    psi, cert = arveson_restrict(A, B, X, gamma=2.0 * gamma)
    assert cert.verdict == "pass"
    for x in X:
        assert B.residual(psi(x)) < 1e-8


def test_ucp_extension_unital():
    fd = FDAlgebra((2,))
    # a cpc map that is not unital: scale a ucp compression
    phi = random_ucp(fd, 3, seed=9).scaled(0.7)
    ext = ucp_extension(phi, mode="tilde")
    assert ext.domain.block_sizes == (2, 1)
    val = ext(ext.domain_unit())
    assert opnorm(val - np.eye(3)) < 1e-10
    cls = classify(ext)
    assert cls.ucp
