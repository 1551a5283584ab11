"""Iterative intertwining between close algebras: the staged construction of
a *-isomorphism from a supply of cpc maps, the two-sided close-isomorphism
driver, near embeddings, half-flip transport maps, and exact unitary
implementation of isomorphisms.

The staged construction keeps a growing finite set of unit-ball elements,
asks a producer callback for a cpc map close to the inclusion on that set,
repairs it to a homomorphism, and aligns it with the previous stage by a
unitary close to one.  With the exact averaging machinery every stage's
repaired map is a homomorphism to machine precision and consecutive aligned
stages agree to machine precision, so the iteration settles in two or three
stages; all stated drift budgets are still tracked and certified.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import ConcreteAlgebra
from .certs import (TOL_ALG, TOL_CONV, Certificate, ContradictionError,
                    SpectralGapError, ToleranceBudget, DEFAULT_BUDGET,
                    WINDOW_ISO_ETA, WINDOW_ISO_GAMMA, WINDOW_ISO_MU,
                    provenance_stamp)
from .cpmaps import LinMap, arveson_restrict, classify, mult_defect
from .averaging import (exact_diagonal, improve_multiplicativity,
                        intertwining_unitary, projection_conjugator)
from .geometry import DistanceInterval, NearInclusionCert, nearest_in_ball
from .linalg import clip_spectrum, dagger, hs_norm, opnorm, rng_for

__all__ = [
    "StageRecord",
    "IsoResult",
    "expectation_producer",
    "intertwining_iso",
    "close_isomorphism",
    "near_embedding_nuclear",
    "half_flip_cpc",
    "implement_unitarily",
    "unit_match",
]


# ---------------------------------------------------------------------------
# result containers
# ---------------------------------------------------------------------------

@dataclass
class StageRecord:
    stage: int
    n_X: int
    n_Y: int
    n_Z: int
    delta_target: float
    producer_closeness: float
    phi_defect: float
    theta_defect: float
    image_residual: float
    drift: float
    drift_ceiling: float
    u_norm: float

    def to_dict(self) -> dict:
        return {"kind": "stage_record", "schema_version": 1, **self.__dict__}


@dataclass
class IsoResult:
    """A constructed *-homomorphism with its staged provenance.

    map sends the domain algebra into the codomain algebra; inverse is set
    when the map is a bijection onto the codomain.  trace records one row per
    stage; certificates hold the quantitative claims.
    """

    map: LinMap
    inverse: LinMap | None
    conjugators: list[np.ndarray]
    trace: list[StageRecord]
    certificates: dict
    eta: float
    mu: float
    nu: float
    converged: bool
    surjective: bool

    @property
    def passed(self) -> bool:
        return self.converged and all(c.passed for c in self.certificates.values())

    def to_dict(self) -> dict:
        return {"kind": "iso_result", "schema_version": 1,
                "eta": self.eta, "mu": self.mu, "nu": self.nu,
                "converged": self.converged, "surjective": self.surjective,
                "n_stages": len(self.trace),
                "trace": [r.to_dict() for r in self.trace],
                "certificates": {k: c.to_dict() for k, c in self.certificates.items()}}


# ---------------------------------------------------------------------------
# producers
# ---------------------------------------------------------------------------

def expectation_producer(A: ConcreteAlgebra, B: ConcreteAlgebra, eta: float):
    """Producer callback backed by the expectation onto B.

    Returns a function Z -> (phi, cert) where phi is the restriction of the
    expectation onto B to A, certified eta-close to the inclusion on Z;
    valid whenever A sits inside B to eta/2 in operator norm.
    """
    def produce(Z):
        return arveson_restrict(A, B, Z, gamma=eta / 2.0)
    return produce


# ---------------------------------------------------------------------------
# the staged intertwining
# ---------------------------------------------------------------------------

def _add_unique(pool: list, seen: set, elements) -> None:
    for x in elements:
        key = np.asarray(x, dtype=complex).tobytes()
        if key not in seen:
            seen.add(key)
            pool.append(np.asarray(x, dtype=complex))


def _averaging_parts(A: ConcreteAlgebra, seed: int) -> list[np.ndarray]:
    """Unit-ball elements of A carrying the averaging family of the unitized
    block model: for each term u~ = (block part, scalar), the element
    (block part - scalar * 1) / 2 mapped back into A."""
    bm = A.block_model(seed=seed)
    from .algebra import FDAlgebra
    fd_ext = FDAlgebra(tuple(bm.fd.block_sizes) + (1,))
    avg = exact_diagonal(fd_ext)
    d = bm.fd.d
    parts = []
    for u in avg.terms:
        scalar = u[d, d]
        inner = (u[:d, :d] - scalar * np.eye(d)) / 2.0
        parts.append(bm.to_concrete(inner))
    return parts


def _hom_defect(phi: LinMap, seed: int, n_pairs: int = 16) -> float:
    """Multiplicativity and adjoint defect on the basis and sampled pairs."""
    A = phi.domain
    basis = [b / max(opnorm(b), 1e-300) for b in A.basis]
    worst = mult_defect(phi, basis).defect
    for b in basis:
        worst = max(worst, opnorm(phi(dagger(b)) - dagger(phi(b))))
    rng = rng_for(seed, "hom-defect", A.ambient_dim)
    for _ in range(n_pairs):
        x = clip_spectrum(A.random_selfadjoint(rng), -1.0, 1.0)
        y = clip_spectrum(A.random_selfadjoint(rng), -1.0, 1.0)
        worst = max(worst, opnorm(phi(x @ y) - phi(x) @ phi(y)))
    return float(worst)


def intertwining_iso(A: ConcreteAlgebra, B: ConcreteAlgebra, eta: float,
                     X_A=None, mu: float = 1e-4, max_iter: int = 12,
                     producer=None, surjectivity_delta: float | None = None,
                     seed: int = 0,
                     budget: ToleranceBudget = DEFAULT_BUDGET) -> IsoResult:
    """Staged construction of an injective *-homomorphism alpha: A -> B with
    ||alpha(x) - x|| <= 8 sqrt(6) eta^{1/2} + eta + mu for x in X_A.

    Requires a producer Z -> (cpc map eta-close to the inclusion on Z, cert);
    defaults to the expectation onto B.  Each stage repairs the produced map
    to a homomorphism and aligns it with the previous stage by a unitary
    close to one; the loop stops when the aligned maps agree on the basis to
    tol_conv twice in a row.  When surjectivity_delta is given (B inside A to
    that level, at most 1/5), codomain basis elements are pulled through the
    accumulated conjugators and tracked, and the result is certified onto B
    by dimension count.
    """
    budget.require_window("iso-eta", eta, WINDOW_ISO_ETA)
    budget.require_window("iso-mu", mu, WINDOW_ISO_MU)
    nu = mu / 2.0
    if producer is None:
        producer = expectation_producer(A, B, eta)
    norm_basis = [b / max(opnorm(b), 1e-300) for b in A.basis]
    if X_A is None:
        X_A = list(norm_basis)
    else:
        X_A = [np.asarray(x, dtype=complex) for x in X_A]
    bound_main = 8.0 * np.sqrt(6.0) * np.sqrt(eta) + eta + mu
    bound_nu = 8.0 * np.sqrt(6.0) * np.sqrt(eta) + eta + nu

    avg_parts = _averaging_parts(A, seed)
    B_norm_basis = [b / max(opnorm(b), 1e-300) for b in B.basis]

    X: list[np.ndarray] = []
    seen_X: set = set()
    _add_unique(X, seen_X, X_A)
    trace: list[StageRecord] = []
    conjugators: list[np.ndarray] = []
    theta_prev: LinMap | None = None
    alpha: LinMap | None = None
    accumulated = np.eye(A.ambient_dim, dtype=complex)
    delta_target = 1.0
    streak = 0
    converged = False
    worst_membership = 0.0
    tracking_ok = surjectivity_delta is not None
    pull_worst = 0.0

    for n in range(1, max_iter + 1):
        a_n = norm_basis[(n - 1) % len(norm_basis)]
        _add_unique(X, seen_X, [a_n])
        if surjectivity_delta is not None:
            # track codomain basis elements through the accumulated conjugators
            for b in B_norm_basis:
                pulled = dagger(accumulated) @ b @ accumulated
                x, dist = nearest_in_ball(pulled, A, iters=80)
                pull_worst = max(pull_worst, dist)
                if dist <= 2.0 / 5.0 + budget.tol_alg:
                    _add_unique(X, seen_X, [x])
                else:
                    tracking_ok = False
        delta_target = min(delta_target, 2.0 ** (-n), nu / (5.0 * np.sqrt(2.0)))
        Y = list(X)
        seen_Y = set(seen_X)
        _add_unique(Y, seen_Y, avg_parts)
        Z = Y
        Zp = list(Z)
        seen_Z = set(seen_Y)
        _add_unique(Zp, seen_Z, [dagger(z) for z in Z])
        _add_unique(Zp, seen_Z, [z @ dagger(z) for z in list(Zp)])

        phi, prod_cert = producer(Zp)
        closeness = max(opnorm(phi(z) - z) for z in Zp)
        phi_defect = mult_defect(phi, Z).defect
        gamma_repair = max(3.0 * eta, phi_defect)

        repair = improve_multiplicativity(phi, gamma=gamma_repair,
                                          seed=seed + n, budget=budget)
        theta_raw = repair.psi
        residual = max(B.residual(img) / max(hs_norm(img), 1e-300)
                       for img in theta_raw.images)
        worst_membership = max(worst_membership, residual)
        theta = LinMap(A, A.ambient_dim,
                       tuple(B.project(img) for img in theta_raw.images),
                       codomain_algebra=B)
        theta_defect = _hom_defect(theta, seed + n)

        drift, u_norm = 0.0, 0.0
        drift_ceiling = 2.0 ** (-(n - 1)) * nu
        if theta_prev is None:
            alpha = theta
            u = np.eye(A.ambient_dim, dtype=complex)
        else:
            res = intertwining_unitary(theta_prev, theta, seed=seed + n,
                                       budget=budget)
            u = res.u
            u_norm = float(opnorm(u - np.eye(A.ambient_dim)))
            aligned = theta.conjugated(u)
            drift = max(opnorm(aligned(x) - theta_prev(x)) for x in X)
            accumulated = accumulated @ u
            alpha = theta.conjugated(accumulated)
        conjugators.append(u)
        theta_prev = theta
        trace.append(StageRecord(
            stage=n, n_X=len(X), n_Y=len(Y), n_Z=len(Zp),
            delta_target=float(delta_target),
            producer_closeness=float(closeness),
            phi_defect=float(phi_defect), theta_defect=float(theta_defect),
            image_residual=float(residual), drift=float(drift),
            drift_ceiling=float(drift_ceiling), u_norm=float(u_norm)))
        if n >= 2:
            streak = streak + 1 if drift < budget.tol_conv else 0
            if streak >= 2:
                converged = True
                break

    if not converged:
        rows = "; ".join(f"stage {r.stage}: drift {r.drift:.3g}" for r in trace)
        raise RuntimeError(
            f"intertwining did not converge within {max_iter} stages ({rows})")

    # final map: re-project the accumulated conjugation into the codomain span
    final_residual = max(B.residual(img) / max(hs_norm(img), 1e-300)
                         for img in alpha.images)
    worst_membership = max(worst_membership, final_residual)
    alpha = LinMap(A, A.ambient_dim, tuple(B.project(img) for img in alpha.images),
                   codomain_algebra=B)

    achieved = max(opnorm(alpha(x) - x) for x in X_A)
    cert_close = Certificate.build(
        name="iso-closeness",
        formula="||alpha(x) - x|| <= 8 sqrt(6) eta^{1/2} + eta + mu on X_A",
        inputs={"eta": eta, "mu": mu, "n_points": len(X_A)},
        ceiling=float(bound_main), achieved=float(achieved),
        provenance=provenance_stamp(seed))
    cert_hom = Certificate.build(
        name="homomorphism",
        formula="multiplicativity and adjoint defect <= tol_alg",
        inputs={}, ceiling=budget.tol_alg,
        achieved=float(_hom_defect(alpha, seed + 101)),
        provenance=provenance_stamp(seed))
    cert_member = Certificate.build(
        name="image-membership",
        formula="relative HS residual of images in span(B) <= tol_alg before snapping",
        inputs={}, ceiling=budget.tol_alg, achieved=float(worst_membership),
        provenance=provenance_stamp(seed))

    action = np.array([B.coeffs(img) for img in alpha.images]).T
    svals = np.linalg.svd(action, compute_uv=False)
    sigma_min = float(svals[-1]) if svals.size else 0.0
    margins = [max(0.0, 1.0 - opnorm(alpha(x))) for x in norm_basis]
    cert_inj = Certificate.build(
        name="injectivity",
        formula="||alpha(x)|| >= ||x|| - (8 sqrt(6) eta^{1/2} + eta + nu)",
        inputs={"eta": eta, "nu": nu},
        ceiling=float(bound_nu), achieved=float(max(margins)),
        details={"action_sigma_min": sigma_min},
        provenance=provenance_stamp(seed))
    drift_ratio = max((r.drift / r.drift_ceiling for r in trace if r.stage >= 2),
                      default=0.0)
    cert_drift = Certificate.build(
        name="drift-telescoping",
        formula="||alpha_{n+1}(x) - alpha_n(x)|| <= 2^{-n} nu per stage",
        inputs={"nu": nu}, ceiling=1.0, achieved=float(drift_ratio),
        provenance=provenance_stamp(seed))
    certs = {"closeness": cert_close, "homomorphism": cert_hom,
             "image-membership": cert_member, "injectivity": cert_inj,
             "drift": cert_drift}

    surjective = False
    inverse = None
    if sigma_min > budget.tol_alg and A.dim == B.dim:
        surjective = True
        Minv = np.linalg.inv(action)
        inv_images = []
        for j in range(B.dim):
            coeffs = Minv[:, j]
            inv_images.append(sum(c * a for c, a in zip(coeffs, A.basis)))
        inverse = LinMap(B, B.ambient_dim, tuple(inv_images), codomain_algebra=A)
    if surjectivity_delta is not None:
        margin = (8.0 * np.sqrt(2.0) * bound_nu + 2.0 * nu + bound_nu
                  + 2.0 * surjectivity_delta)
        certs["surjectivity"] = Certificate.build(
            name="surjectivity",
            formula="dim alpha(A) = dim B with alpha(A) in B; "
                    "density margin 8 sqrt(2) b + 2 nu + b + 2 delta < 1",
            inputs={"delta": surjectivity_delta, "dim_A": A.dim, "dim_B": B.dim},
            ceiling=0.0, achieved=0.0 if surjective else 1.0,
            details={"density_margin": float(margin), "pullback_worst": float(pull_worst),
                     "tracking_ok": bool(tracking_ok)},
            provenance=provenance_stamp(seed))

    return IsoResult(map=alpha, inverse=inverse, conjugators=conjugators,
                     trace=trace, certificates=certs, eta=float(eta),
                     mu=float(mu), nu=float(nu), converged=converged,
                     surjective=surjective)


# ---------------------------------------------------------------------------
# two-sided driver
# ---------------------------------------------------------------------------

def _distance_hi(dist_cert) -> float:
    if isinstance(dist_cert, DistanceInterval):
        return float(dist_cert.hi)
    if isinstance(dist_cert, NearInclusionCert):
        return float(dist_cert.gamma_hi)
    return float(dist_cert)


def close_isomorphism(A: ConcreteAlgebra, B: ConcreteAlgebra, dist_cert,
                      X=None, Y=None, mu: float | None = None, seed: int = 0,
                      budget: ToleranceBudget = DEFAULT_BUDGET) -> IsoResult:
    """Surjective *-isomorphism theta: A -> B from a two-sided distance
    certificate, with ||theta(x) - x|| and ||theta^{-1}(y) - y|| at most
    28 gamma^{1/2} on the requested sets.

    Enlarges X with near-best unit-ball approximants of each y in Y, runs the
    staged intertwining with eta = 2 gamma, and certifies both directional
    bounds (the reverse direction through the chain
    ||theta^{-1}(y) - y|| <= 2 ||x - y|| + ||theta(x) - y||).
    """
    gamma = _distance_hi(dist_cert)
    budget.require_window("close-isomorphism", gamma, WINDOW_ISO_GAMMA)
    if A.dim != B.dim:
        raise ContradictionError(
            f"distance certificate {gamma:.3g} < 1 between algebras of "
            f"different dimensions {A.dim} != {B.dim}")
    if mu is None:
        mu = min(np.sqrt(gamma), 1.0 / 4000.0)
    X = [np.asarray(x, dtype=complex) for x in (X or [])]
    X += [b / max(opnorm(b), 1e-300) for b in A.basis]
    if Y is None:
        Y = [b / max(opnorm(b), 1e-300) for b in B.basis]
    else:
        Y = [np.asarray(y, dtype=complex) for y in Y]
    pairs = []
    for y in Y:
        x, dist = nearest_in_ball(y, A, iters=200)
        pairs.append((y, x, dist))
        X.append(x)

    surj_delta = gamma if gamma <= 1.0 / 5.0 else None
    res = intertwining_iso(A, B, eta=2.0 * gamma, X_A=X, mu=mu,
                           producer=expectation_producer(A, B, 2.0 * gamma),
                           surjectivity_delta=surj_delta, seed=seed,
                           budget=budget)
    theta = res.map
    ceiling = 28.0 * np.sqrt(gamma)
    fwd = max(opnorm(theta(x) - x) for x in X)
    res.certificates["forward-closeness"] = Certificate.build(
        name="forward-closeness",
        formula="||theta(x) - x|| <= 28 gamma^{1/2} on X",
        inputs={"gamma": gamma, "n_points": len(X)},
        ceiling=float(ceiling), achieved=float(fwd),
        provenance=provenance_stamp(seed))
    if res.inverse is None:
        raise SpectralGapError("constructed map is not invertible; "
                               "cannot certify the reverse bound")
    bwd, chain_worst = 0.0, 0.0
    for y, x, dist in pairs:
        bwd = max(bwd, opnorm(res.inverse(y) - y))
        chain_worst = max(chain_worst, 2.0 * dist + opnorm(theta(x) - y))
    res.certificates["backward-closeness"] = Certificate.build(
        name="backward-closeness",
        formula="||theta^{-1}(y) - y|| <= 2 ||x - y|| + ||theta(x) - y|| "
                "<= 28 gamma^{1/2} on Y",
        inputs={"gamma": gamma, "n_points": len(pairs)},
        ceiling=float(ceiling), achieved=float(bwd),
        details={"chain_bound": float(chain_worst)},
        provenance=provenance_stamp(seed))
    return res


def near_embedding_nuclear(A: ConcreteAlgebra, B: ConcreteAlgebra, gamma_cert,
                           X=None, mu: float | None = None, seed: int = 0,
                           budget: ToleranceBudget = DEFAULT_BUDGET
                           ) -> tuple[LinMap, Certificate]:
    """Injective *-homomorphism theta: A -> B with ||theta(x) - x|| <=
    28 gamma^{1/2} on X, from a one-sided near inclusion A in B at gamma."""
    gamma = _distance_hi(gamma_cert)
    budget.require_window("near-embedding", gamma, WINDOW_ISO_GAMMA)
    if mu is None:
        mu = min(np.sqrt(gamma), 1.0 / 4000.0)
    if X is None:
        X = [b / max(opnorm(b), 1e-300) for b in A.basis]
    else:
        X = [np.asarray(x, dtype=complex) for x in X]
    res = intertwining_iso(A, B, eta=2.0 * gamma, X_A=X, mu=mu,
                           producer=expectation_producer(A, B, 2.0 * gamma),
                           seed=seed, budget=budget)
    achieved = max(opnorm(res.map(x) - x) for x in X)
    cert = Certificate.build(
        name="near-embedding",
        formula="||theta(x) - x|| <= 28 gamma^{1/2} on X",
        inputs={"gamma": gamma, "n_points": len(X),
                "sigma_min": res.certificates["injectivity"].details["action_sigma_min"]},
        ceiling=float(28.0 * np.sqrt(gamma)), achieved=float(achieved),
        provenance=provenance_stamp(seed))
    return res.map, cert


# ---------------------------------------------------------------------------
# half flip transport
# ---------------------------------------------------------------------------

def _projection_near_unit(e: np.ndarray, B: ConcreteAlgebra, gamma: float,
                          tol: float) -> np.ndarray:
    """Projection p in B with ||p - e|| <= 2 gamma, from the spectral cut of
    a hermitian near-best approximant of the support projection e."""
    y, dist = nearest_in_ball(e, B, iters=300)
    h = (y + dagger(y)) / 2.0
    vals, vecs = np.linalg.eigh(h)
    if np.any((vals > 0.45) & (vals < 0.55)):
        raise SpectralGapError(
            "no spectral gap at 1/2 when cutting the approximate unit; "
            "the near-inclusion certificate looks invalid")
    keep = vals >= 0.55
    p = vecs[:, keep] @ dagger(vecs[:, keep])
    if opnorm(p - e) > 2.0 * gamma + 10 * tol:
        raise SpectralGapError(
            f"no projection within 2*gamma = {2 * gamma:.3g} of the unit "
            f"(got {opnorm(p - e):.3g}); the certificate looks invalid")
    return p


def half_flip_cpc(A: ConcreteAlgebra, B: ConcreteAlgebra, gamma_cert, X=None,
                  seed: int = 0,
                  budget: ToleranceBudget = DEFAULT_BUDGET
                  ) -> tuple[LinMap, Certificate]:
    """Transport cpc map phi: A -> B for a single full matrix block A near B,
    built through the exact tensor flip of A.

    Steps: cut a projection p in B near the unit of A, conjugate it onto the
    unit by a unitary u with ||u - I|| <= sqrt(2) ||p - 1_A||, compress B to
    B0 = 1_A u B u* 1_A, lift the exact flip v in A (x) A to a unit-ball
    witness w in span(B0 (x) A), and slice with a vector state:
    phi(x) = u* R(w (1 (x) x) w*) u.  Certified ceiling
    8 alpha + 4 alpha^2 + 4 sqrt(2) gamma with
    alpha = (4 sqrt(2) + 1) gamma + 4 sqrt(2) gamma^2.
    """
    from .geometry import nearest_in_span
    gamma = _distance_hi(gamma_cert)
    struct = A.structure(seed=seed)
    if len(struct.summands) != 1:
        raise ValueError("the flip construction needs a single full matrix block")
    n_blk = struct.summands[0][0]
    N = A.ambient_dim
    e = A.support
    if X is None:
        X = [b / max(opnorm(b), 1e-300) for b in A.basis]
    else:
        X = [np.asarray(x, dtype=complex) for x in X]

    p = _projection_near_unit(e, B, gamma, budget.tol_alg)
    u, cert_u = projection_conjugator(p, e)
    b0_raw = [e @ (u @ b @ dagger(u)) @ e for b in B.basis]
    B0 = ConcreteAlgebra.from_basis(b0_raw, N)

    units = struct.matrix_units[0]
    v = np.zeros((N * N, N * N), dtype=complex)
    for i in range(n_blk):
        for j in range(n_blk):
            v += np.kron(units[i][j], units[j][i])

    # witness for the flip inside span(B0) (x) span(A)
    pair_basis = [np.kron(b, a) for b in B0.basis for a in A.basis]
    from .algebra import ConcreteAlgebra as _CA
    tensor_span = _CA.from_basis(pair_basis, N * N)
    w, wdist = nearest_in_span(v, tensor_span.span(), ball=True, iters=300)
    alpha = (4.0 * np.sqrt(2.0) + 1.0) * gamma + 4.0 * np.sqrt(2.0) * gamma ** 2
    alpha_prime = gamma + 4.0 * np.sqrt(2.0) * gamma * (1.0 + gamma)
    w_ceiling = 2.0 * (2.0 * alpha_prime + alpha_prime ** 2)

    vals, vecs = np.linalg.eigh(e)
    xi = vecs[:, vals > 0.5][:, 0]

    def slice_map(m: np.ndarray) -> np.ndarray:
        m4 = m.reshape(N, N, N, N)
        return np.einsum("ikjl,k,l->ij", m4, xi.conj(), xi)

    images = []
    for b in A.basis:
        mid = w @ np.kron(e, b) @ dagger(w)
        images.append(dagger(u) @ slice_map(mid) @ u)
    phi = LinMap(A, N, tuple(images), codomain_algebra=B)

    worst = max(opnorm(phi(x) - x) for x in X)
    member = max(B.residual(img) / max(hs_norm(img), 1e-300) for img in phi.images)
    ceiling = 8.0 * alpha + 4.0 * alpha ** 2 + 4.0 * np.sqrt(2.0) * gamma
    cls = classify(phi)
    cert = Certificate.build(
        name="half-flip-transport",
        formula="||phi(x) - x|| <= 8 alpha + 4 alpha^2 + 4 sqrt(2) gamma, "
                "alpha = (4 sqrt(2) + 1) gamma + 4 sqrt(2) gamma^2",
        inputs={"gamma": gamma, "alpha": float(alpha), "n_points": len(X)},
        ceiling=float(ceiling), achieved=float(worst),
        details={"witness_distance": float(wdist),
                 "witness_ceiling": float(w_ceiling),
                 "projection_distance": float(opnorm(p - e)),
                 "conjugator_norm": cert_u.achieved,
                 "image_residual": float(member),
                 "cpc": bool(cls.cpc)},
        provenance=provenance_stamp(seed))
    return phi, cert


# ---------------------------------------------------------------------------
# unitary implementation
# ---------------------------------------------------------------------------

def implement_unitarily(alpha: IsoResult, mode: str = "exact", seed: int = 0,
                        budget: ToleranceBudget = DEFAULT_BUDGET
                        ) -> tuple[np.ndarray, Certificate]:
    """Unitary u with u x u* = alpha.map(x) for all x in the domain, so the
    domain algebra is carried onto its image as a subspace.

    Uses the averaged intertwiner between the inclusion and the map, both
    exact homomorphisms, so the conjugation identity holds to machine
    precision; ||u - I|| <= 2 sqrt(2) gamma where gamma is the measured basis
    deviation of the map from the inclusion.
    """
    theta = alpha.map
    A = theta.domain
    if not isinstance(A, ConcreteAlgebra):
        raise ValueError("unitary implementation needs a concrete domain")
    B = theta.codomain_algebra
    if B is not None and B.ambient_dim != A.ambient_dim:
        raise ValueError("domain and codomain must share the ambient dimension")
    defect = _hom_defect(theta, seed)
    if mode == "exact" and defect > budget.tol_alg:
        raise ValueError(
            f"map is not a homomorphism to tol_alg (defect {defect:.3g}); "
            "repair it before implementing unitarily")
    inclusion = LinMap(A, A.ambient_dim, tuple(A.basis), codomain_algebra=A)
    gamma_basis = theta.basis_distance(inclusion)
    try:
        res = intertwining_unitary(theta, inclusion, gamma=gamma_basis,
                                   delta=defect, seed=seed, budget=budget)
    except SpectralGapError as exc:
        sizes = A.structure().block_sizes
        raise SpectralGapError(
            f"no near-identity implementation: averaged intertwiner is "
            f"singular for block sizes {sizes} ({exc})") from exc
    u = res.u
    N = A.ambient_dim
    worst_conj = max(opnorm(u @ b @ dagger(u) - theta(b)) / max(opnorm(b), 1e-300)
                     for b in A.basis)
    unitary_defect = opnorm(dagger(u) @ u - np.eye(N))
    subspace = 0.0
    if B is not None:
        for b in A.basis:
            img = u @ b @ dagger(u)
            subspace = max(subspace, B.residual(img) / max(hs_norm(img), 1e-300))
        for b in B.basis:
            back = dagger(u) @ b @ u
            subspace = max(subspace, A.residual(back) / max(hs_norm(back), 1e-300))
    cert = Certificate.build(
        name="unitary-implementation",
        formula="u x u* = alpha(x) on the basis; ||u - 1|| <= 2 sqrt(2) gamma "
                "+ 5 sqrt(2) delta; u A u* = B as subspaces",
        inputs={"gamma_basis": float(gamma_basis), "defect": float(defect)},
        ceiling=budget.tol_alg, achieved=float(worst_conj),
        details={"u_norm": float(opnorm(u - np.eye(N))),
                 "u_norm_ceiling": res.certificates["norm"].ceiling,
                 "unitary_defect": float(unitary_defect),
                 "subspace_residual": float(subspace),
                 "subspace_ceiling": 10.0 * TOL_ALG},
        provenance=provenance_stamp(seed))
    return u, cert


def unit_match(A: ConcreteAlgebra, B: ConcreteAlgebra, dist_cert,
               budget: ToleranceBudget = DEFAULT_BUDGET
               ) -> tuple[np.ndarray, Certificate]:
    """Unitary u with u 1_A u* = 1_B and ||u - 1|| <= 2 sqrt(2) gamma, valid
    for d(A, B) < gamma < 1/4."""
    gamma = _distance_hi(dist_cert)
    beta = opnorm(A.support - B.support)
    if beta >= 1.0:
        raise SpectralGapError(
            f"support projections at distance {beta:.3g} >= 1 cannot be matched")
    u, cert_c = projection_conjugator(A.support, B.support)
    cert = Certificate.build(
        name="unit-match",
        formula="||u - 1|| <= 2 sqrt(2) gamma, u 1_A u* = 1_B",
        inputs={"gamma": gamma, "beta": float(beta)},
        ceiling=float(2.0 * np.sqrt(2.0) * gamma), achieved=cert_c.achieved,
        slack=budget.tol_exact,
        details={"conjugation_defect": cert_c.details.get("conjugation_defect", 0.0)},
        provenance=provenance_stamp())
    return u, cert
