"""Distance between subalgebras: witnesses, near inclusions, brackets."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from cstarlab.algebra import dagger, opnorm
from cstarlab.certs import ContradictionError
from cstarlab.geometry import (
    SampleSpec,
    equality_criterion,
    kk_distance,
    near_inclusion,
    nearest_in_ball,
    nearest_in_span,
    sample_unit_ball,
    span_distance_lower,
    tensor_lift,
)
from cstarlab.instances import block_algebra
from cstarlab.linalg import rng_for


def small_rotation(N: int, eps: float, seed: int) -> np.ndarray:
    rng = rng_for(seed, "test-rotation")
    g = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    h = g + dagger(g)
    return expm(1j * eps * h / opnorm(h))


# ---------------------------------------------------------------------------
# single-element distance
# ---------------------------------------------------------------------------

def test_nearest_in_span_member_is_exact():
    A = block_algebra((2, 1), 4)
    rng = rng_for(5, "member")
    x = A.random_selfadjoint(rng)
    b, d = nearest_in_span(x, A)
    assert d < 1e-10
    assert opnorm(b - x) < 1e-10


def test_nearest_in_span_beats_hs_projection():
    # subgradient refinement must not be worse than the HS warm start
    A = block_algebra((2,), 3)
    rng = rng_for(8, "warmstart")
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    y0 = A.project(g)
    _, d = nearest_in_span(g, A)
    assert d <= opnorm(g - y0) + 1e-12


def test_nearest_in_ball_respects_norm():
    A = block_algebra((2,), 3)
    rng = rng_for(9, "ball")
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b, d = nearest_in_ball(3.0 * g / opnorm(g), A)
    assert opnorm(b) <= 1.0 + 1e-9
    assert d >= 2.0 - 1e-6  # the target has norm 3, the ball caps at 1


def test_span_distance_lower_is_lower():
    A = block_algebra((2, 1), 4)
    rng = rng_for(12, "duality")
    for _ in range(6):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        lb = span_distance_lower(g, A)
        _, ub = nearest_in_span(g, A)
        assert lb <= ub + 1e-10


# ---------------------------------------------------------------------------
# sampling and two-sided distance
# ---------------------------------------------------------------------------

def test_sample_unit_ball_contractions():
    A = block_algebra((2, 1), 4)
    spec = SampleSpec(seed=4, n_selfadjoint=5, n_unitary=5)
    samples = sample_unit_ball(A, spec)
    assert len(samples) == A.dim + 10
    for label, x in samples:
        assert opnorm(x) <= 1.0 + 1e-9
        assert A.residual(x) < 1e-10


def test_sample_unit_ball_deterministic():
    A = block_algebra((2,), 3)
    spec = SampleSpec(seed=7)
    s1 = sample_unit_ball(A, spec)
    s2 = sample_unit_ball(A, spec)
    for (l1, x1), (l2, x2) in zip(s1, s2):
        assert l1 == l2
        assert opnorm(x1 - x2) == 0.0


def test_kk_distance_self_is_zero():
    A = block_algebra((2, 1), 4)
    iv = kk_distance(A, A)
    assert iv.lo <= iv.hi
    assert iv.hi < 1e-9


@given(seed=st.integers(min_value=0, max_value=10 ** 4))
@settings(max_examples=15, deadline=None)
def test_kk_distance_conjugation_bound(seed):
    # d(A, uAu*) <= 2 ||u - 1|| for any unitary u
    A = block_algebra((2, 1), 3)
    u = small_rotation(3, 5e-3, seed)
    B = A.conjugated(u)
    iv = kk_distance(A, B, spec=SampleSpec(seed=seed, n_selfadjoint=4, n_unitary=4))
    assert iv.lo <= iv.hi + 1e-12
    assert iv.hi <= 2.0 * opnorm(u - np.eye(3)) + 1e-9


def test_near_inclusion_direction_tag():
    A = block_algebra((2,), 3)
    u = small_rotation(3, 1e-3, 2)
    cert = near_inclusion(A, A.conjugated(u))
    assert cert.direction == "A->B"
    assert cert.gamma_lo <= cert.gamma_hi + 1e-12
    assert cert.witnesses
    assert cert.recheck() <= cert.gamma_hi + 1e-9


# ---------------------------------------------------------------------------
# amplification and equality
# ---------------------------------------------------------------------------

def test_tensor_lift_certifies_amplified_distance():
    A = block_algebra((2, 1), 3)
    u = small_rotation(3, 2e-3, 6)
    B = A.conjugated(u)
    gamma = 2.0 * opnorm(u - np.eye(3))
    n = 2
    rng = rng_for(6, "tensor")
    X = []
    for _ in range(3):
        x = A.random_selfadjoint(rng)
        amp = np.kron(x, np.eye(n))
        X.append(amp / max(opnorm(amp), 1e-12))
    wits, cert = tensor_lift(X, B, n, gamma)
    assert cert.verdict == "pass"
    assert len(wits) == 3


def test_tensor_lift_rejects_bad_shape():
    A = block_algebra((2,), 3)
    with pytest.raises(ValueError):
        tensor_lift([np.eye(5)], A, 2, 0.1)


def test_equality_criterion_accepts_self():
    A = block_algebra((2, 1), 4)
    cert = near_inclusion(A, A)
    assert equality_criterion(A, A, cert)


def test_equality_criterion_rejects_far_algebra():
    A = block_algebra((2, 1), 4)
    u = small_rotation(4, 0.5, 3)
    B = A.conjugated(u)
    # basis of A is not inside span(B), so equality must be rejected
    cert = near_inclusion(B, A)
    assert not equality_criterion(A, B, cert)


def test_equality_criterion_contradiction():
    # proper subalgebra with a certificate claiming gamma < 1 is contradictory
    A = block_algebra((2, 1), 4)   # dim 5
    B = block_algebra((2, 2), 4)   # dim 8, contains a (2,1) copy? no; force via fake cert
    cert = near_inclusion(A, A)    # gamma ~ 0 but dims differ below
    cert.direction = "B->A"
    with pytest.raises(ContradictionError):
        equality_criterion(A, B, cert)
