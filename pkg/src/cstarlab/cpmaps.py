"""Linear maps between matrix algebras: Choi matrices, positivity classes,
Kraus and Stinespring forms, defects, expectations, and cb-norm brackets.

Conventions.  A :class:`LinMap` stores the images of the canonical basis of
its domain: matrix units (lexicographic in (block, row, column)) for an
:class:`~cstarlab.algebra.FDAlgebra` domain, the HS-orthonormal basis for a
:class:`~cstarlab.algebra.ConcreteAlgebra` domain.  The Choi matrix of a map
with block domain is the block-diagonal sum over summands of
C_k = sum_ij e_ij (x) phi(e_ij^(k)), an (n_k N) x (n_k N) matrix; the map is
completely positive iff every block is positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import BlockModel, ConcreteAlgebra, FDAlgebra
from .certs import (
    TOL_ALG,
    TOL_PSD,
    TOL_RANK,
    Certificate,
    provenance_stamp,
)
from .linalg import dagger, herm, hs_norm, opnorm, psd_part

__all__ = [
    "LinMap",
    "Ternary",
    "choi",
    "from_choi",
    "classify",
    "kraus_operators",
    "StinespringDilation",
    "stinespring",
    "DefectReport",
    "mult_defect",
    "check_stinespring_inequality",
    "conditional_expectation",
    "arveson_restrict",
    "ucp_extension",
    "cb_bracket",
]


@dataclass
class Ternary:
    """Positivity classification: each flag is True/False with a residual."""

    cp: bool
    cpc: bool
    ucp: bool
    choi_min_eig: float
    norm_of_unit: float
    unit_defect: float


@dataclass
class LinMap:
    """Linear map from a finite-dimensional C*-algebra into M_N.

    domain: FDAlgebra (abstract blocks) or ConcreteAlgebra (subalgebra of an
    ambient matrix algebra).  images[i] = value on the i-th canonical basis
    element.  codomain_algebra, when set, declares that images are expected
    to lie in that subalgebra; certificates can then measure the residual.
    """

    domain: FDAlgebra | ConcreteAlgebra
    codomain_dim: int
    images: tuple[np.ndarray, ...]
    codomain_algebra: ConcreteAlgebra | None = None
    _choi: list[np.ndarray] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        imgs = []
        for m in self.images:
            m = np.asarray(m, dtype=complex)
            if m.shape != (self.codomain_dim, self.codomain_dim):
                raise ValueError("image has wrong codomain shape")
            imgs.append(m)
        n_basis = (self.domain.dim_linear if isinstance(self.domain, FDAlgebra)
                   else self.domain.dim)
        if len(imgs) != n_basis:
            raise ValueError("action matrix shape does not match the domain dimension")
        object.__setattr__(self, "images", tuple(imgs))

    # -- evaluation ----------------------------------------------------------

    def domain_coeffs(self, x: np.ndarray) -> np.ndarray:
        if isinstance(self.domain, FDAlgebra):
            return self.domain.coeffs(x)
        return self.domain.coeffs(x)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        c = self.domain_coeffs(x)
        out = np.zeros((self.codomain_dim, self.codomain_dim), dtype=complex)
        for ci, im in zip(c, self.images):
            if ci != 0:
                out = out + ci * im
        return out

    def domain_unit(self) -> np.ndarray:
        if isinstance(self.domain, FDAlgebra):
            return self.domain.unit()
        return self.domain.unit

    def codomain_unit(self) -> np.ndarray:
        if self.codomain_algebra is not None:
            return self.codomain_algebra.support
        return np.eye(self.codomain_dim, dtype=complex)

    def value_on_unit(self) -> np.ndarray:
        return self(self.domain_unit())

    # -- arithmetic -----------------------------------------------------------

    def _same_domain(self, other: "LinMap"):
        if self.codomain_dim != other.codomain_dim:
            raise ValueError("codomain mismatch")
        if len(self.images) != len(other.images):
            raise ValueError("domain mismatch")

    def __sub__(self, other: "LinMap") -> "LinMap":
        self._same_domain(other)
        return LinMap(self.domain, self.codomain_dim,
                      tuple(a - b for a, b in zip(self.images, other.images)))

    def __add__(self, other: "LinMap") -> "LinMap":
        self._same_domain(other)
        return LinMap(self.domain, self.codomain_dim,
                      tuple(a + b for a, b in zip(self.images, other.images)))

    def scaled(self, c: float) -> "LinMap":
        return LinMap(self.domain, self.codomain_dim,
                      tuple(c * a for a in self.images),
                      codomain_algebra=self.codomain_algebra)

    def conjugated(self, u: np.ndarray) -> "LinMap":
        """Ad(u) composed after the map."""
        return LinMap(self.domain, self.codomain_dim,
                      tuple(u @ a @ dagger(u) for a in self.images))

    def basis_distance(self, other: "LinMap", normalize: bool = True) -> float:
        """max over canonical basis elements b of ||phi(b) - psi(b)||, with b
        rescaled to operator norm one when normalize is set."""
        self._same_domain(other)
        worst = 0.0
        basis = (self.domain.units() if isinstance(self.domain, FDAlgebra)
                 else list(self.domain.basis))
        for b, x, y in zip(basis, self.images, other.images):
            scale = opnorm(b) if normalize else 1.0
            worst = max(worst, opnorm(x - y) / max(scale, 1e-300))
        return worst

    # -- block model ----------------------------------------------------------

    def to_block_model(self, seed: int = 0) -> tuple["LinMap", BlockModel]:
        """Equivalent map with FDAlgebra domain (multiplicities squashed)."""
        if isinstance(self.domain, FDAlgebra):
            return self, None  # already abstract
        bm = self.domain.block_model(seed=seed)
        images = tuple(self(bm.to_concrete(u)) for u in bm.fd.units())
        return LinMap(bm.fd, self.codomain_dim, images,
                      codomain_algebra=self.codomain_algebra), bm


# ---------------------------------------------------------------------------
# Choi matrices
# ---------------------------------------------------------------------------

def _require_fd(phi: LinMap) -> FDAlgebra:
    if not isinstance(phi.domain, FDAlgebra):
        raise ValueError("operation requires a matrix-algebra (block) domain; "
                         "convert with to_block_model first")
    return phi.domain


def choi_blocks(phi: LinMap) -> list[np.ndarray]:
    """Per-summand Choi matrices C_k = sum_ij e_ij (x) phi(e_ij^(k))."""
    if phi._choi is not None:
        return phi._choi
    fd = _require_fd(phi)
    N = phi.codomain_dim
    blocks = []
    pos = 0
    for n in fd.block_sizes:
        C = np.zeros((n * N, n * N), dtype=complex)
        for i in range(n):
            for j in range(n):
                C[i * N:(i + 1) * N, j * N:(j + 1) * N] = phi.images[pos]
                pos += 1
        blocks.append(C)
    object.__setattr__(phi, "_choi", blocks)
    return blocks


def choi(phi: LinMap) -> np.ndarray:
    """Full Choi matrix: block-diagonal sum of the per-summand blocks."""
    blocks = choi_blocks(phi)
    size = sum(b.shape[0] for b in blocks)
    C = np.zeros((size, size), dtype=complex)
    off = 0
    for b in blocks:
        C[off:off + b.shape[0], off:off + b.shape[0]] = b
        off += b.shape[0]
    return C


def from_choi(C: np.ndarray, block_sizes, codomain_dim: int) -> LinMap:
    """Inverse of :func:`choi` for the given block sizes."""
    fd = FDAlgebra(tuple(block_sizes))
    N = codomain_dim
    images = []
    off = 0
    for n in fd.block_sizes:
        blk = C[off:off + n * N, off:off + n * N]
        for i in range(n):
            for j in range(n):
                images.append(np.array(blk[i * N:(i + 1) * N, j * N:(j + 1) * N]))
        off += n * N
    return LinMap(fd, N, tuple(images))


def classify(phi: LinMap, tol_psd: float = TOL_PSD, tol_alg: float = TOL_ALG) -> Ternary:
    """cp iff the Choi blocks are Hermitian psd up to tol_psd; cpc adds
    ||phi(1)|| <= 1 + tol_psd; ucp instead requires phi(1) to equal the
    codomain unit up to tol_alg."""
    work = phi if isinstance(phi.domain, FDAlgebra) else phi.to_block_model()[0]
    min_eig = np.inf
    herm_resid = 0.0
    for C in choi_blocks(work):
        herm_resid = max(herm_resid, opnorm(C - dagger(C)))
        vals = np.linalg.eigvalsh(herm(C))
        min_eig = min(min_eig, float(vals.min(initial=np.inf)))
    if not np.isfinite(min_eig):
        min_eig = 0.0
    unit_img = phi.value_on_unit()
    nrm1 = opnorm(unit_img)
    unit_defect = opnorm(unit_img - phi.codomain_unit())
    cp = (herm_resid <= tol_psd) and (min_eig >= -tol_psd)
    cpc = cp and nrm1 <= 1.0 + tol_psd
    ucp = cp and unit_defect <= tol_alg
    return Ternary(cp=cp, cpc=cpc, ucp=ucp, choi_min_eig=min_eig,
                   norm_of_unit=nrm1, unit_defect=unit_defect)


def kraus_operators(phi: LinMap, tol_psd: float = TOL_PSD) -> list[list[np.ndarray]]:
    """Per-block Kraus operators of a cp map from the eigendecomposition of
    its Choi blocks (eigenvalues below tol_psd are discarded)."""
    fd = _require_fd(phi)
    N = phi.codomain_dim
    out = []
    for n, C in zip(fd.block_sizes, choi_blocks(phi)):
        vals, vecs = np.linalg.eigh(herm(C))
        ops = []
        for lam, v in zip(vals, vecs.T):
            if lam < tol_psd:
                continue
            M = v.reshape(n, N)  # rows indexed by the domain block
            ops.append(np.sqrt(lam) * M.T)  # N x n, K e_j = sqrt(lam) M[j,:]
        out.append(ops)
    return out


# ---------------------------------------------------------------------------
# Stinespring dilation
# ---------------------------------------------------------------------------

@dataclass
class StinespringDilation:
    """Minimal dilation phi(x) = E (V* pi(x) V) E* of a ucp map.

    pi is a unital *-representation of the block domain on C^K given by its
    values on matrix units; V: C^{d'} -> C^K is an isometry; E: C^{d'} -> C^N
    embeds the support corner of the codomain (E = identity when phi(1) = 1).
    p = V V* is the compression projection.
    """

    fd: FDAlgebra
    dilation_dim: int
    rep_images: tuple[np.ndarray, ...]
    isometry: np.ndarray        # K x d'
    embed: np.ndarray           # N x d'

    def rep(self, x: np.ndarray) -> np.ndarray:
        c = self.fd.coeffs(x)
        out = np.zeros((self.dilation_dim, self.dilation_dim), dtype=complex)
        for ci, im in zip(c, self.rep_images):
            if ci != 0:
                out = out + ci * im
        return out

    @property
    def compression(self) -> np.ndarray:
        return self.isometry @ dagger(self.isometry)

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        V, E = self.isometry, self.embed
        return E @ (dagger(V) @ self.rep(x) @ V) @ dagger(E)

    def defect_identity_residual(self, phi: LinMap, a: np.ndarray) -> float:
        """Residual of phi(aa*) - phi(a)phi(a*) = p pi(a)(1-p) pi(a)* p read
        through the embedding."""
        V, E = self.isometry, self.embed
        K = self.dilation_dim
        pa = self.rep(a)
        lhs = phi(a @ dagger(a)) - phi(a) @ phi(dagger(a))
        inner = dagger(V) @ pa @ (np.eye(K) - self.compression) @ dagger(pa) @ V
        rhs = E @ inner @ dagger(E)
        return opnorm(lhs - rhs)

    def rep_hom_residual(self) -> float:
        """Worst multiplicativity/adjoint residual of pi on matrix units."""
        fd = self.fd
        worst = 0.0
        labels = fd.unit_labels()
        img = {lbl: im for lbl, im in zip(labels, self.rep_images)}
        unit = sum(img[(k, i, i)] for (k, i, j) in labels if i == j)
        worst = max(worst, opnorm(unit - np.eye(self.dilation_dim)))
        for (k, i, j) in labels:
            worst = max(worst, opnorm(dagger(img[(k, i, j)]) - img[(k, j, i)]))
            for (k2, a, b) in labels:
                prod = img[(k, i, j)] @ img[(k2, a, b)]
                target = img[(k, i, b)] if (k == k2 and j == a) else np.zeros_like(prod)
                worst = max(worst, opnorm(prod - target))
        return worst


def stinespring(phi: LinMap, tol_psd: float = TOL_PSD) -> StinespringDilation:
    """Minimal Stinespring dilation of a ucp map with block domain.

    When phi(1) is a proper support projection e, the codomain is first
    compressed to the corner e M_N e; the returned embed isometry undoes the
    compression.
    """
    fd = _require_fd(phi)
    N = phi.codomain_dim
    cls = classify(phi)
    if not cls.ucp:
        raise ValueError(
            f"stinespring requires a ucp map (unit defect {cls.unit_defect:.2e}, "
            f"choi min eig {cls.choi_min_eig:.2e})")
    unit_img = herm(phi.value_on_unit())
    vals, vecs = np.linalg.eigh(unit_img)
    keep = vals > 0.5
    E = vecs[:, keep]  # N x d'
    dprime = E.shape[1]

    ops_per_block = kraus_operators(phi, tol_psd=tol_psd)
    comp_ops = [[dagger(E) @ K for K in ops] for ops in ops_per_block]

    K_total = sum(n * len(ops) for n, ops in zip(fd.block_sizes, comp_ops))
    if K_total == 0:
        raise ValueError("zero map cannot be ucp")
    V = np.zeros((K_total, dprime), dtype=complex)
    rep_images = [np.zeros((K_total, K_total), dtype=complex) for _ in range(fd.dim_linear)]
    labels = fd.unit_labels()
    off = 0
    for k, (n, ops) in enumerate(zip(fd.block_sizes, comp_ops)):
        r = len(ops)
        if r == 0:
            continue
        size = n * r
        # V_k xi = sum_alpha (K_alpha^H xi) tensor e_alpha, K ordering (i, alpha)
        for alpha, Kop in enumerate(ops):
            KH = dagger(Kop)  # n x d'
            for i in range(n):
                V[off + i * r + alpha, :] = KH[i, :]
        for pos, (kk, i, j) in enumerate(labels):
            if kk != k:
                continue
            blockimg = np.zeros((size, size), dtype=complex)
            for alpha in range(r):
                blockimg[i * r + alpha, j * r + alpha] = 1.0
            rep_images[pos][off:off + size, off:off + size] = blockimg
        off += size

    dil = StinespringDilation(fd=fd, dilation_dim=K_total,
                              rep_images=tuple(rep_images),
                              isometry=V, embed=E)
    return dil


# ---------------------------------------------------------------------------
# defects and inequalities
# ---------------------------------------------------------------------------

@dataclass
class DefectReport:
    """Multiplicativity defect of a map over a test set closed under
    adjoints: defect = max ||phi(x)phi(x*) - phi(xx*)||."""

    defect: float
    table: list[tuple[str, float]]

    def to_dict(self) -> dict:
        return {"kind": "defect_report", "schema_version": 1,
                "defect": self.defect, "table": [[n, v] for n, v in self.table]}


def mult_defect(phi: LinMap, X, labels=None) -> DefectReport:
    """Defect over X union X*; X elements live in the domain's ambient."""
    rows = []
    worst = 0.0
    labels = labels or [f"x{i}" for i in range(len(X))]
    for lbl, x in zip(labels, X):
        for tag, y in ((lbl, x), (lbl + "*", dagger(x))):
            val = opnorm(phi(y) @ phi(dagger(y)) - phi(y @ dagger(y)))
            rows.append((tag, float(val)))
            worst = max(worst, val)
    return DefectReport(defect=float(worst), table=rows)


def check_stinespring_inequality(phi: LinMap, x: np.ndarray, y: np.ndarray,
                                 tol: float = 1e-10) -> tuple[bool, float]:
    """Schwarz-type inequality for cpc maps:
    ||phi(x)phi(y) - phi(xy)|| <= gap(x) + gap(y) + cross terms, verified in
    the two-sided defect form

        ||phi(xy) - phi(x)phi(y)|| <= ||phi(xx*) - phi(x)phi(x*)||^{1/2}
                                      * ||phi(y*y) - phi(y*)phi(y)||^{1/2}
                                      (+ tol)

    which is the defect estimate used throughout the averaging arguments.
    """
    lhs = opnorm(phi(x @ y) - phi(x) @ phi(y))
    dx = opnorm(phi(x @ dagger(x)) - phi(x) @ phi(dagger(x)))
    dy = opnorm(phi(dagger(y) @ y) - phi(dagger(y)) @ phi(y))
    rhs = np.sqrt(max(dx, 0.0)) * np.sqrt(max(dy, 0.0))
    return lhs <= rhs + tol, float(lhs - rhs)


# ---------------------------------------------------------------------------
# expectations and extensions
# ---------------------------------------------------------------------------

def conditional_expectation(A: ConcreteAlgebra) -> LinMap:
    """HS-orthogonal projection of M_N onto span(A) as a map on the full
    matrix algebra.

    For A unital in the ambient this is the trace-preserving conditional
    expectation (ucp, A-bimodular).  For a non-unital A it equals that
    expectation composed with the support compression and is still cpc.
    """
    N = A.ambient_dim
    fd = FDAlgebra((N,))
    images = []
    for (k, i, j) in fd.unit_labels():
        e = np.zeros((N, N), dtype=complex)
        e[i, j] = 1.0
        images.append(A.project(e))
    return LinMap(fd, N, tuple(images), codomain_algebra=A)


def arveson_restrict(A: ConcreteAlgebra, B: ConcreteAlgebra, X,
                     gamma: float, tol: float = TOL_ALG) -> tuple[LinMap, Certificate]:
    """Restrict the expectation onto B to the subalgebra A.

    Produces a cpc map phi: A -> B with ||phi(x) - x|| <= 2 gamma + tol for
    every x in X, valid whenever each x in X lies within gamma of B in
    operator norm (the expectation is a contraction fixing B).
    """
    E = conditional_expectation(B)
    images = tuple(E(b) for b in A.basis)
    phi = LinMap(A, A.ambient_dim, images, codomain_algebra=B)
    X = list(X)
    worst = 0.0
    for x in X:
        worst = max(worst, opnorm(phi(x) - x))
    cert = Certificate.build(
        name="expectation-restriction",
        formula="||phi(x) - x|| <= 2*gamma + tol on X",
        inputs={"gamma": gamma, "n_points": len(X)},
        ceiling=2.0 * gamma + tol, achieved=worst,
        provenance=provenance_stamp())
    return phi, cert


def ucp_extension(phi: LinMap, mode: str = "tilde") -> LinMap:
    """Extend a cpc map to a ucp map on the unitized domain.

    mode "tilde": the domain gains a one-dimensional block and the new
    block's unit is sent to (codomain unit) - phi(1); this is always ucp for
    cpc phi.  mode "dagger": a finite-dimensional algebra already contains
    its unit, so the extension-by-unit degenerates: the map is returned
    unchanged when it is already ucp and an error is raised otherwise.
    """
    work = phi if isinstance(phi.domain, FDAlgebra) else phi.to_block_model()[0]
    cls = classify(work)
    if mode == "dagger":
        if cls.ucp:
            return work
        raise ValueError(
            "dagger extension needs a non-unital domain; finite-dimensional "
            "algebras are unital, so only already-ucp maps pass through")
    if mode != "tilde":
        raise ValueError(f"unknown mode {mode!r}")
    if not cls.cpc:
        raise ValueError(
            f"ucp_extension requires a cpc map (||phi(1)|| = {cls.norm_of_unit:.6g}, "
            f"choi min eig {cls.choi_min_eig:.2e})")
    fd = work.domain
    fd2 = FDAlgebra(tuple(fd.block_sizes) + (1,))
    slack = work.codomain_unit() - work.value_on_unit()
    images = list(work.images) + [slack]
    return LinMap(fd2, work.codomain_dim, tuple(images),
                  codomain_algebra=work.codomain_algebra)


# ---------------------------------------------------------------------------
# completely bounded norm brackets
# ---------------------------------------------------------------------------

def _reshuffle(phi: LinMap) -> np.ndarray:
    """R[(a,i),(j,b)] = phi(e_ij)[a,b] over the pinched full-matrix domain.

    Composing with the block pinching is a complete isometry for the cb norm,
    so the bracket may be computed on the full matrix algebra M_d.
    """
    work = phi if isinstance(phi.domain, FDAlgebra) else phi.to_block_model()[0]
    fd, N = work.domain, work.codomain_dim
    d = fd.d
    R = np.zeros((N * d, d * N), dtype=complex)
    for (k, i, j), img in zip(fd.unit_labels(), work.images):
        gi = fd.offsets[k] + i
        gj = fd.offsets[k] + j
        for a in range(N):
            R[a * d + gi, gj * N:(gj + 1) * N] = img[a, :]
    return R


def _pair_bound(As, Bs) -> float:
    P = sum(a @ dagger(a) for a in As)
    Q = sum(dagger(b) @ b for b in Bs)
    return float(np.sqrt(max(opnorm(P), 0.0) * max(opnorm(Q), 0.0)))


def _balance(As, Bs, rounds: int = 3):
    As, Bs = list(As), list(Bs)
    for _ in range(rounds):
        changed = False
        for idx in range(len(As)):
            na, nb = opnorm(As[idx]), opnorm(Bs[idx])
            if na < 1e-300 or nb < 1e-300:
                continue
            s = np.sqrt(na / nb)
            if abs(s - 1.0) > 1e-3:
                As[idx] = As[idx] / s
                Bs[idx] = Bs[idx] * s
                changed = True
        if not changed:
            break
    return As, Bs


def cb_bracket(phi: LinMap, samples: int = 12, seed: int = 0,
               tol_psd: float = TOL_PSD) -> tuple[float, float]:
    """Certified bracket lo <= ||phi||_cb <= hi.

    Verified-cp maps give the exact value ||phi(1)||.  Otherwise the upper
    bound is the best factorization bound ||sum A A*||^{1/2} ||sum B* B||^{1/2}
    over Kraus-type decompositions obtained from the Choi eigendecomposition
    and the reshuffled SVD, with per-term rebalancing; the lower bound samples
    ||(phi (x) id_N)(x)|| over random contractions (exact at amplification N).
    """
    work = phi if isinstance(phi.domain, FDAlgebra) else phi.to_block_model()[0]
    fd, N = work.domain, work.codomain_dim
    d = fd.d
    cls = classify(work, tol_psd=tol_psd)
    if cls.cp:
        val = cls.norm_of_unit
        return val, val

    # upper bounds from factorizations of the pinched-domain Choi
    candidates = []
    # (1) Hermitian eigendecomposition when the Choi is Hermitian
    Cfull = np.zeros((d * N, d * N), dtype=complex)
    labels = fd.unit_labels()
    for (k, i, j), img in zip(labels, work.images):
        gi, gj = fd.offsets[k] + i, fd.offsets[k] + j
        Cfull[gi * N:(gi + 1) * N, gj * N:(gj + 1) * N] = img
    if opnorm(Cfull - dagger(Cfull)) <= 1e-10 * max(opnorm(Cfull), 1.0):
        vals, vecs = np.linalg.eigh(herm(Cfull))
        As, Bs = [], []
        for lam, v in zip(vals, vecs.T):
            if abs(lam) < 1e-14:
                continue
            M = v.reshape(d, N)
            K = np.sqrt(abs(lam)) * M.T  # N x d
            As.append(np.sign(lam) * K)
            Bs.append(dagger(K))
        if As:
            As, Bs = _balance(As, Bs)
            candidates.append(("choi-eig", _pair_bound(As, Bs)))
    # (2) SVD of the reshuffle
    R = _reshuffle(work)
    u, s, vh = np.linalg.svd(R)
    As, Bs = [], []
    for sv, uc, vr in zip(s, u.T, vh):
        if sv < 1e-14:
            continue
        As.append(np.sqrt(sv) * uc.reshape(N, d))
        Bs.append(np.sqrt(sv) * vr.reshape(d, N))
    if As:
        As, Bs = _balance(As, Bs)
        candidates.append(("reshuffle-svd", _pair_bound(As, Bs)))
    if not candidates:
        return 0.0, 0.0
    hi = min(v for _, v in candidates)

    # lower bound: sampled amplified norms
    from .linalg import random_contraction, rng_for
    rng = rng_for(seed, "cb-bracket")
    lo = 0.0
    amp = N
    for _ in range(samples):
        x = random_contraction(rng, d * amp)
        out = np.zeros((N * amp, N * amp), dtype=complex)
        for (k, i, j), img in zip(labels, work.images):
            gi, gj = fd.offsets[k] + i, fd.offsets[k] + j
            xij = x[gi * amp:(gi + 1) * amp, gj * amp:(gj + 1) * amp]
            out += np.kron(img, xij)
        lo = max(lo, opnorm(out))
    lo = min(lo, hi)
    return float(lo), float(hi)
