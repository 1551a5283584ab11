"""Operator-norm geometry between subalgebras: near inclusions, the
Hausdorff distance between unit balls, tensor-amplified witness lifts, and
the subspace equality criterion.

The distance between unit balls is estimated from both sides.  Upper bounds
come from explicit witnesses found by projected subgradient descent on the
convex problem min ||x - b|| over b in a subspace (optionally intersected
with the unit ball); lower bounds come from trace-norm dual certificates.
Suprema over the unit ball are sampled (basis elements, random self-adjoint
contractions, random unitaries), so the reported gamma_hi is an honest
sampled estimate with stored witnesses, not a proof of the supremum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import ConcreteAlgebra, _Span
from .certs import TOL_ALG, Certificate, ContradictionError, provenance_stamp
from .linalg import clip_spectrum, dagger, herm, hs_norm, opnorm, rng_for, tracenorm

__all__ = [
    "SampleSpec",
    "Witness",
    "NearInclusionCert",
    "DistanceInterval",
    "nearest_in_ball",
    "nearest_in_span",
    "span_distance_lower",
    "near_inclusion",
    "kk_distance",
    "tensor_lift",
    "equality_criterion",
    "sample_unit_ball",
]


@dataclass(frozen=True)
class SampleSpec:
    """How to sample the unit ball of an algebra."""

    seed: int = 0
    n_selfadjoint: int = 64
    n_unitary: int = 64
    include_basis: bool = True
    iters: int = 500

    def to_dict(self) -> dict:
        return {"kind": "sample_spec", "schema_version": 1, "seed": self.seed,
                "n_selfadjoint": self.n_selfadjoint, "n_unitary": self.n_unitary,
                "include_basis": self.include_basis, "iters": self.iters}


@dataclass
class Witness:
    label: str
    x: np.ndarray
    b: np.ndarray
    ub: float
    lb: float


@dataclass
class NearInclusionCert:
    """Sampled certificate for A subset_gamma B."""

    gamma_hi: float
    gamma_lo: float
    witnesses: list[Witness]
    sample_spec: SampleSpec
    direction: str = ""

    def __post_init__(self):
        if self.gamma_lo > self.gamma_hi + 1e-12:
            raise ValueError("inconsistent bracket: gamma_lo > gamma_hi")

    def recheck(self, tol: float = 1e-12) -> float:
        """Worst deviation between stored witness bounds and recomputation."""
        worst = 0.0
        for w in self.witnesses:
            worst = max(worst, abs(opnorm(w.x - w.b) - w.ub))
        return worst


@dataclass
class DistanceInterval:
    """Two-sided bracket for the unit-ball Hausdorff distance d(A, B)."""

    lo: float
    hi: float
    lo_witness: np.ndarray | None
    hi_assignment: dict
    cert_ab: NearInclusionCert | None = None
    cert_ba: NearInclusionCert | None = None

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi + 1e-12 and self.hi <= 2.0 + 1e-9):
            raise ValueError("distance interval must satisfy 0 <= lo <= hi <= 2")


# ---------------------------------------------------------------------------
# convex witness search
# ---------------------------------------------------------------------------

def _top_singular_pair(m: np.ndarray):
    u, s, vh = np.linalg.svd(m)
    return u[:, 0], vh[0, :].conj(), float(s[0])


def nearest_in_span(x: np.ndarray, span: _Span | ConcreteAlgebra,
                    ball: bool = False, iters: int = 500,
                    tol: float = 1e-12) -> tuple[np.ndarray, float]:
    """Minimize ||x - b||_op over b in the given subspace (intersected with
    the operator-norm unit ball when requested).

    Projected subgradient descent on a convex objective: the subgradient of
    the operator norm at the residual is the top singular dyad u v*, which is
    HS-projected onto the subspace; steps shrink like c/sqrt(k); the best
    feasible iterate is tracked.  Warm start at the HS projection of x.
    """
    sp = span.span() if isinstance(span, ConcreteAlgebra) else span
    y = sp.project(x)
    if ball:
        nrm = opnorm(y)
        if nrm > 1.0:
            y = y / nrm
    best, best_val = y, opnorm(x - y)
    if best_val <= tol:
        return best, float(best_val)
    c = max(best_val, 10 * tol)
    for k in range(1, iters + 1):
        r = x - y
        u, v, s = _top_singular_pair(r)
        if s <= tol:
            return y, float(s)
        g = sp.project(np.outer(u, v.conj()))
        y = y + (c / np.sqrt(k)) * g
        if ball:
            nrm = opnorm(y)
            if nrm > 1.0:
                y = y / nrm
        val = opnorm(x - y)
        if val < best_val:
            best, best_val = y, val
    return best, float(best_val)


def nearest_in_ball(x: np.ndarray, B: ConcreteAlgebra, iters: int = 500,
                    tol: float = 1e-12) -> tuple[np.ndarray, float]:
    """Witness in the unit ball of span(B) nearly closest to x in operator
    norm, with its certified distance ||x - b||."""
    return nearest_in_span(x, B, ball=True, iters=iters, tol=tol)


def span_distance_lower(x: np.ndarray, span: _Span | ConcreteAlgebra) -> float:
    """Certified lower bound for dist_op(x, span) by trace-norm duality.

    The HS-orthogonal residual r = x - P(x), normalised in trace norm, is a
    dual functional vanishing on the subspace, so |tr(W* x)| = ||r||_HS^2 /
    ||r||_tr bounds the operator-norm distance from below.
    """
    sp = span.span() if isinstance(span, ConcreteAlgebra) else span
    r = x - sp.project(x)
    nrm_hs = hs_norm(r)
    if nrm_hs <= 1e-14:
        return 0.0
    return float(nrm_hs ** 2 / tracenorm(r))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def sample_unit_ball(A: ConcreteAlgebra, spec: SampleSpec) -> list[tuple[str, np.ndarray]]:
    """Deterministic sample of the unit ball of A: operator-normalised basis
    elements, random self-adjoint contractions (spectral clipping), and
    random unitaries exp(i h) of A (relative to its support)."""
    out: list[tuple[str, np.ndarray]] = []
    if spec.include_basis:
        for idx, b in enumerate(A.basis):
            nrm = opnorm(b)
            if nrm > 1e-14:
                out.append((f"basis[{idx}]", b / nrm))
    rng = rng_for(spec.seed, "unit-ball", A.ambient_dim, A.dim)
    for t in range(spec.n_selfadjoint):
        h = A.random_selfadjoint(rng)
        out.append((f"sa[{t}]", clip_spectrum(h, -1.0, 1.0)))
    for t in range(spec.n_unitary):
        h = A.random_selfadjoint(rng)
        nrm = opnorm(h)
        if nrm > 1e-14:
            h = h / nrm
        out.append((f"u[{t}]", A.unitary_from(np.pi * 0.5 * h)))
    return out


# ---------------------------------------------------------------------------
# near inclusions and distance
# ---------------------------------------------------------------------------

def near_inclusion(A: ConcreteAlgebra, B: ConcreteAlgebra,
                   spec: SampleSpec | None = None, ball: bool = False,
                   keep_witnesses: int = 8) -> NearInclusionCert:
    """Sampled estimate of the one-sided constant sup dist(x, B) over the
    unit ball of A.  Witnesses are unconstrained in B by default (set ball
    for unit-ball witnesses as in the two-sided distance)."""
    spec = spec or SampleSpec()
    samples = sample_unit_ball(A, spec)
    wits: list[Witness] = []
    for label, x in samples:
        b, ub = nearest_in_span(x, B, ball=ball, iters=spec.iters)
        lb = span_distance_lower(x, B)
        wits.append(Witness(label=label, x=x, b=b, ub=ub, lb=lb))
    gamma_hi = max((w.ub for w in wits), default=0.0)
    gamma_lo = max((w.lb for w in wits), default=0.0)
    wits.sort(key=lambda w: -w.ub)
    return NearInclusionCert(gamma_hi=float(gamma_hi), gamma_lo=float(gamma_lo),
                             witnesses=wits[:keep_witnesses], sample_spec=spec,
                             direction="A->B")


def kk_distance(A: ConcreteAlgebra, B: ConcreteAlgebra,
                spec: SampleSpec | None = None) -> DistanceInterval:
    """Two-sided bracket for the Hausdorff distance between unit balls.

    Witnesses are constrained to the unit ball of the target algebra, one
    sampled sup per direction; lo is the best dual lower bound over all
    samples, hi the worst achieved witness distance.
    """
    spec = spec or SampleSpec()
    cert_ab = near_inclusion(A, B, spec=spec, ball=True)
    cert_ba = near_inclusion(B, A, spec=spec, ball=True)
    cert_ba.direction = "B->A"
    hi = max(cert_ab.gamma_hi, cert_ba.gamma_hi)
    lo = max(cert_ab.gamma_lo, cert_ba.gamma_lo)
    lo_wit = None
    pool = cert_ab.witnesses + cert_ba.witnesses
    if pool:
        lo_wit = max(pool, key=lambda w: w.lb).x
    assignment = {
        "direction_hi": "A->B" if cert_ab.gamma_hi >= cert_ba.gamma_hi else "B->A",
        "n_samples_per_direction": len(sample_unit_ball(A, spec)),
        "sample_spec": spec.to_dict(),
    }
    return DistanceInterval(lo=float(min(lo, hi)), hi=float(hi), lo_witness=lo_wit,
                            hi_assignment=assignment, cert_ab=cert_ab, cert_ba=cert_ba)


# ---------------------------------------------------------------------------
# tensor-amplified witnesses
# ---------------------------------------------------------------------------

class _TensorSpan:
    """Span of span(B) (x) M_n inside M_{mn}, optionally as a 1 x r block row
    of such spaces for rectangular witnesses."""

    def __init__(self, B: ConcreteAlgebra, n: int, r: int = 1):
        self.B, self.n, self.r = B, n, r
        N = B.ambient_dim
        self.rows = N * n
        self.cols = N * n * r
        Q = []
        for blk in range(r):
            for b in B.basis:
                for i in range(n):
                    for j in range(n):
                        m = np.zeros((self.rows, self.cols), dtype=complex)
                        e = np.zeros((n, n))
                        e[i, j] = 1.0
                        m[:, blk * N * n:(blk + 1) * N * n] = np.kron(b, e)
                        Q.append(m.reshape(-1))
        self.Q = np.array(Q)

    def project(self, x: np.ndarray) -> np.ndarray:
        c = self.Q.conj() @ x.reshape(-1)
        return (self.Q.T @ c).reshape(self.rows, self.cols)


def tensor_lift(X, B: ConcreteAlgebra, n: int, gamma: float,
                iters: int = 500, tol: float = TOL_ALG) -> tuple[list[np.ndarray], Certificate]:
    """Witnesses in span(B) (x) M_n for elements of the unit ball of
    A (x) M_n (rectangular block rows allowed), certified against the
    amplification-stable ceiling 2*gamma + gamma^2 valid for A subset_gamma B.

    Returns the witnesses and a certificate with the worst achieved distance.
    """
    X = [np.asarray(x, dtype=complex) for x in X]
    if not X:
        raise ValueError("empty witness request")
    N = B.ambient_dim
    worst = 0.0
    witnesses = []
    spans: dict[int, _TensorSpan] = {}
    for x in X:
        rows, cols = x.shape
        if rows != N * n or cols % (N * n):
            raise ValueError("element shape incompatible with the amplification")
        r = cols // (N * n)
        sp = spans.get(r)
        if sp is None:
            sp = spans[r] = _TensorSpan(B, n, r)
        y = sp.project(x)
        best, best_val = y, opnorm(x - y)
        c = max(best_val, 1e-10)
        for k in range(1, iters + 1):
            if best_val <= 1e-13:
                break
            rmat = x - y
            u, s, vh = np.linalg.svd(rmat)
            g = sp.project(np.outer(u[:, 0], vh[0, :]))
            y = y + (c / np.sqrt(k)) * g
            val = opnorm(x - y)
            if val < best_val:
                best, best_val = y, val
        witnesses.append(best)
        worst = max(worst, best_val)
    ceiling = 2.0 * gamma + gamma * gamma
    cert = Certificate.build(
        name="tensor-amplified-witnesses",
        formula="dist(x, B (x) M_n) <= 2*gamma + gamma^2 on the unit ball",
        inputs={"gamma": gamma, "n": n, "count": len(X)},
        ceiling=ceiling + tol, achieved=worst,
        provenance=provenance_stamp())
    return witnesses, cert


# ---------------------------------------------------------------------------
# equality criterion
# ---------------------------------------------------------------------------

def equality_criterion(A: ConcreteAlgebra, B: ConcreteAlgebra,
                       cert: NearInclusionCert, tol: float = TOL_ALG) -> bool:
    """Decide A = B from: A a verified subspace of span(B), plus a sampled
    near-inclusion certificate B subset_gamma A with gamma_hi < 1.

    At finite dimension a proper subalgebra misses some unit-ball element of
    B by at least distance one, so gamma_hi < 1 with matching dimensions
    certifies equality; gamma_hi < 1 with differing dimensions is impossible
    and raises :class:`ContradictionError` (the certificate under-sampled).
    """
    for b in A.basis:
        if B.residual(b) > tol:
            return False
    if cert.gamma_hi >= 1.0:
        return False
    if A.dim != B.dim:
        raise ContradictionError(
            f"B subset_{cert.gamma_hi:.3g} A certified but dim A = {A.dim} != "
            f"dim B = {B.dim}; a proper inclusion forces distance >= 1, so the "
            "sampled certificate missed its witness")
    return True
