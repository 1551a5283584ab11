"""Exact averaging families and the constructions built on them."""

import numpy as np
import pytest
from scipy.linalg import expm

from cstarlab.algebra import FDAlgebra
from cstarlab.linalg import dagger, hs_inner, opnorm
from cstarlab.averaging import (
    commutant_lift,
    exact_diagonal,
    improve_multiplicativity,
    intertwining_unitary,
    polar_unitary,
    projection_conjugator,
    unitary_commutant_lift,
    weyl_unitaries,
)
from cstarlab.certs import PAPER_BUDGET, SpectralGapError, WindowError
from cstarlab.cpmaps import LinMap
from cstarlab.instances import block_algebra
from cstarlab.linalg import rng_for

PROFILES = [(1,), (2,), (1, 1), (2, 1), (3,), (2, 2), (2, 1, 1)]


def inclusion_map(sizes, N: int) -> LinMap:
    A = block_algebra(sizes, N)
    fd = A.structure().fd if hasattr(A, "structure") else None
    return LinMap(A, N, tuple(A.basis), codomain_algebra=A)


def embedded(fd: FDAlgebra, N: int) -> LinMap:
    # exact unital-on-support homomorphism into M_N, N >= fd.d
    images = []
    for (k, i, j) in fd.unit_labels():
        m = np.zeros((N, N), dtype=complex)
        m[:fd.d, :fd.d] = fd.matrix_unit(k, i, j)
        images.append(m)
    return LinMap(fd, N, tuple(images))


# ---------------------------------------------------------------------------
# unitary families
# ---------------------------------------------------------------------------

def test_weyl_unitaries_orthogonal_basis():
    for n in (2, 3):
        fam = weyl_unitaries(n)
        assert len(fam) == n * n
        for a, u in enumerate(fam):
            assert opnorm(dagger(u) @ u - np.eye(n)) < 1e-12
            for v in fam[a + 1:]:
                assert abs(hs_inner(u, v)) < 1e-12


@pytest.mark.parametrize("sizes", PROFILES)
def test_exact_diagonal_verifies(sizes):
    fd = FDAlgebra(sizes)
    avg = exact_diagonal(fd)
    r = len(sizes)
    expected = 2 ** (r - 1) * int(np.prod([n * n for n in sizes]))
    assert len(avg) == expected
    cert = avg.verify()
    assert cert.verdict == "pass"


def test_twirl_lands_in_commutant():
    A = block_algebra((2, 1), 4)
    avg = exact_diagonal(A)
    rng = rng_for(3, "twirl")
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    t = avg.twirl(g)
    for b in A.basis:
        assert opnorm(t @ b - b @ t) < 1e-11
    # expectation property: twirling twice changes nothing
    assert opnorm(avg.twirl(t) - t) < 1e-11


def test_pair_of_inclusion_is_unit():
    fd = FDAlgebra((2, 1))
    phi = embedded(fd, 3)
    avg = exact_diagonal(fd)
    s = avg.pair(phi, phi)
    assert opnorm(s - phi(fd.unit())) < 1e-11


# ---------------------------------------------------------------------------
# polar constructions
# ---------------------------------------------------------------------------

def test_polar_unitary_bound():
    rng = rng_for(1, "polar")
    for t in range(20):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        m = np.eye(4) + 0.4 * g / opnorm(g)
        u, cert = polar_unitary(m)
        assert cert.verdict == "pass"
        assert opnorm(dagger(u) @ u - np.eye(4)) < 1e-12


def test_projection_conjugator_exact():
    rng = rng_for(2, "projconj")
    p = np.zeros((4, 4), dtype=complex)
    p[0, 0] = p[1, 1] = 1.0
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = 0.3 * (g + dagger(g)) / opnorm(g + dagger(g))
    v = expm(1j * h)
    q = v @ p @ dagger(v)
    w, cert = projection_conjugator(p, q)
    assert cert.verdict == "pass"
    assert opnorm(w @ p @ dagger(w) - q) < 1e-10


def test_projection_conjugator_rejects_non_projection():
    with pytest.raises(ValueError):
        projection_conjugator(0.5 * np.eye(2), np.eye(2))


def test_projection_conjugator_orthogonal_ranges():
    p = np.diag([1.0, 0.0]).astype(complex)
    q = np.diag([0.0, 1.0]).astype(complex)
    with pytest.raises(SpectralGapError):
        projection_conjugator(p, q)


# ---------------------------------------------------------------------------
# multiplicativity repair
# ---------------------------------------------------------------------------

def test_repair_of_exact_hom_is_exact():
    fd = FDAlgebra((2, 1))
    phi = embedded(fd, 4)
    rep = improve_multiplicativity(phi, seed=0)
    assert rep.passed
    rng = rng_for(0, "repair-check")
    for _ in range(5):
        x = fd.random_element(rng)
        y = fd.random_element(rng)
        d = opnorm(rep.psi(x @ y) - rep.psi(x) @ rep.psi(y))
        assert d < 1e-9
    assert rep.gamma < 1e-7


def test_repair_certificates_reported():
    fd = FDAlgebra((2,))
    phi = embedded(fd, 3)
    rep = improve_multiplicativity(phi, seed=1)
    for key in ("drift", "conjugator", "distance", "multiplicativity"):
        assert key in rep.certificates
        assert rep.certificates[key].passed


def test_repair_window_enforced_on_paper_track():
    fd = FDAlgebra((2,))
    phi = embedded(fd, 3)
    with pytest.raises(WindowError):
        improve_multiplicativity(phi, gamma=0.07, budget=PAPER_BUDGET)


# ---------------------------------------------------------------------------
# intertwiners
# ---------------------------------------------------------------------------

def test_intertwining_unitary_exact_pair():
    fd = FDAlgebra((2, 1))
    phi1 = embedded(fd, 4)
    rng = rng_for(5, "intertwine")
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = (g + dagger(g)) / opnorm(g + dagger(g))
    u0 = expm(1j * 2e-2 * h)
    phi2 = phi1.conjugated(u0)
    res = intertwining_unitary(phi1, phi2, seed=5)
    assert res.passed
    assert res.certificates["residual"].achieved < 1e-10
    bound = 2.0 * np.sqrt(2.0) * res.gamma + 5.0 * np.sqrt(2.0) * res.delta
    assert opnorm(res.u - np.eye(4)) <= bound + 1e-9


def test_intertwining_window_enforced_on_paper_track():
    fd = FDAlgebra((2,))
    phi = embedded(fd, 3)
    with pytest.raises(WindowError):
        intertwining_unitary(phi, phi, gamma=0.1, delta=0.0,
                             budget=PAPER_BUDGET)


# ---------------------------------------------------------------------------
# commutant lifts
# ---------------------------------------------------------------------------

def commutant_element(rng) -> np.ndarray:
    # the commutant of M_2 (+) 0 inside M_4 is scalars (+) M_2
    lam = rng.standard_normal()
    m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = out[1, 1] = lam
    out[2:, 2:] = m
    return out


def test_commutant_lift_exact_commutation():
    A = block_algebra((2,), 4)
    rng = rng_for(7, "comm-lift")
    c = commutant_element(rng)
    noise = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = c + 1e-3 * noise / opnorm(noise)
    lift = commutant_lift(m, A)
    assert lift.passed
    for b in A.basis:
        assert opnorm(lift.value @ b - b @ lift.value) < 1e-11
    assert opnorm(lift.value - m) <= 2.0 * lift.delta + 1e-10


def test_commutant_lift_preserves_selfadjoint():
    A = block_algebra((2,), 4)
    rng = rng_for(8, "comm-lift-sa")
    c = commutant_element(rng)
    m = c + dagger(c)
    lift = commutant_lift(m, A)
    assert opnorm(lift.value - dagger(lift.value)) < 1e-12


def test_unitary_commutant_lift():
    A = block_algebra((2,), 4)
    rng = rng_for(9, "u-lift")
    c = commutant_element(rng)
    h = (c + dagger(c)) / opnorm(c + dagger(c))
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    hn = h + 1e-3 * (g + dagger(g)) / opnorm(g + dagger(g))
    u = expm(1j * 0.5 * hn)
    lift = unitary_commutant_lift(u, A)
    assert lift.passed
    v = lift.value
    assert opnorm(dagger(v) @ v - np.eye(4)) < 1e-10
    for b in A.basis:
        assert opnorm(v @ b - b @ v) < 1e-9
