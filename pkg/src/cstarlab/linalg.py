"""Dense complex linear algebra helpers shared by all modules.

Matrices are numpy complex128 arrays.  Norm conventions: ``opnorm`` is the
operator (spectral) norm, ``hs_inner``/``hs_norm`` the Hilbert-Schmidt ones
with inner product tr(a* b).  All randomness flows through counter-based
Philox generators derived from explicit integer seeds, so every computation
in the package replays bit-identically from its seed.
"""

from __future__ import annotations

import zlib

import numpy as np
import scipy.linalg

__all__ = [
    "dagger",
    "herm",
    "opnorm",
    "hs_inner",
    "hs_norm",
    "tracenorm",
    "rng_for",
    "random_complex",
    "random_hermitian",
    "random_unitary",
    "random_contraction",
    "eigh_fun",
    "psd_sqrt",
    "psd_pinv",
    "psd_part",
    "range_projection",
    "clip_spectrum",
    "expm_i",
    "polar_factor",
    "partial_isometry_polar",
    "principal_log_unitary",
    "cluster_values",
    "is_projection_residual",
]


def dagger(x: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return x.conj().T


def herm(x: np.ndarray) -> np.ndarray:
    """Hermitian part (x + x*)/2."""
    return 0.5 * (x + dagger(x))


def opnorm(x: np.ndarray) -> float:
    """Operator norm (largest singular value)."""
    if x.size == 0:
        return 0.0
    return float(np.linalg.norm(x, 2))


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(a* b), antilinear in the first slot."""
    return complex(np.vdot(a, b))


def hs_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def tracenorm(x: np.ndarray) -> float:
    """Trace norm (sum of singular values)."""
    return float(np.linalg.svd(x, compute_uv=False).sum())


# ---------------------------------------------------------------------------
# seeded randomness
# ---------------------------------------------------------------------------

def _tag_to_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    return zlib.crc32(str(tag).encode("utf8"))


def rng_for(seed: int, *tags) -> np.random.Generator:
    """Counter-based generator for (seed, purpose-tags).

    Distinct tag tuples give statistically independent, reproducible streams;
    the same tuple always replays the same stream on every platform.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_tag_to_int(t) for t in tags))
    return np.random.Generator(np.random.Philox(ss))


def random_complex(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    """Standard complex Gaussian matrix."""
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    return herm(random_complex(rng, n))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish unitary via QR of a Ginibre matrix with phase fixing."""
    q, r = np.linalg.qr(random_complex(rng, n))
    d = np.diagonal(r)
    ph = d / np.abs(np.where(np.abs(d) < 1e-300, 1.0, d))
    return q * ph


def random_contraction(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    g = random_complex(rng, rows, cols)
    nrm = opnorm(g)
    return g if nrm <= 1.0 else g / nrm


# ---------------------------------------------------------------------------
# functional calculus
# ---------------------------------------------------------------------------

def eigh_fun(h: np.ndarray, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix by eigendecomposition."""
    vals, vecs = np.linalg.eigh(herm(h))
    return (vecs * f(vals)) @ dagger(vecs)


def psd_sqrt(h: np.ndarray) -> np.ndarray:
    return eigh_fun(h, lambda t: np.sqrt(np.clip(t, 0.0, None)))


def psd_part(h: np.ndarray) -> np.ndarray:
    """Positive part of the Hermitian part (nearest psd in HS norm)."""
    return eigh_fun(h, lambda t: np.clip(t, 0.0, None))


def psd_pinv(h: np.ndarray, rel_cutoff: float = 1e-8) -> np.ndarray:
    """Spectral pseudoinverse of a psd matrix, zeroing eigenvalues below
    rel_cutoff times the largest."""
    vals, vecs = np.linalg.eigh(herm(h))
    top = float(vals.max(initial=0.0))
    cut = rel_cutoff * max(top, 1e-300)
    inv = np.where(vals > cut, 1.0 / np.where(vals > cut, vals, 1.0), 0.0)
    return (vecs * inv) @ dagger(vecs)


def range_projection(h: np.ndarray, rel_cutoff: float = 1e-8) -> np.ndarray:
    """Projection onto the span of eigenvectors with eigenvalue above
    rel_cutoff times the largest (h psd)."""
    vals, vecs = np.linalg.eigh(herm(h))
    top = float(vals.max(initial=0.0))
    cut = rel_cutoff * max(top, 1e-300)
    keep = vals > cut
    v = vecs[:, keep]
    return v @ dagger(v)


def clip_spectrum(h: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Spectral clipping of a Hermitian matrix into [lo, hi].

    The clipping function fixes 0, so elements of a non-unital subalgebra
    stay inside it.
    """
    return eigh_fun(h, lambda t: np.clip(t, lo, hi))


def expm_i(h: np.ndarray) -> np.ndarray:
    """exp(i h) for Hermitian h, exactly unitary up to eigh accuracy."""
    vals, vecs = np.linalg.eigh(herm(h))
    return (vecs * np.exp(1j * vals)) @ dagger(vecs)


# ---------------------------------------------------------------------------
# polar decompositions and logarithms
# ---------------------------------------------------------------------------

def polar_factor(x: np.ndarray) -> np.ndarray:
    """Unitary polar factor u = U V* from the SVD x = U S V*."""
    u, _, vh = np.linalg.svd(x)
    return u @ vh


def partial_isometry_polar(x: np.ndarray, rel_cutoff: float = 1e-8) -> np.ndarray:
    """Partial isometry part of x: singular vectors with singular value above
    rel_cutoff times the largest are kept, the rest are zeroed."""
    u, s, vh = np.linalg.svd(x)
    top = float(s.max(initial=0.0))
    keep = s > rel_cutoff * max(top, 1e-300)
    return u[:, keep] @ vh[keep, :]


def principal_log_unitary(u: np.ndarray, gap_tol: float = 1e-6) -> np.ndarray:
    """Hermitian h with exp(i h) = u and spectrum in (-pi, pi).

    Rejects unitaries with spectrum within gap_tol of -1, where the principal
    branch is discontinuous.
    """
    n = u.shape[0]
    if opnorm(dagger(u) @ u - np.eye(n)) > 1e-8:
        raise ValueError("principal_log_unitary: input is not unitary")
    vals = np.linalg.eigvals(u)
    if np.abs(vals + 1.0).min(initial=2.0) < gap_tol:
        raise ValueError("principal_log_unitary: spectrum touches -1, no principal branch")
    logu = scipy.linalg.logm(u)
    h = herm(logu / 1j)
    if opnorm(expm_i(h) - u) > 1e-8:
        raise ValueError("principal_log_unitary: reconstruction failed")
    return h


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def cluster_values(vals: np.ndarray, rel_gap: float = 1e-6) -> list[np.ndarray]:
    """Group sorted real values into clusters separated by gaps larger than
    rel_gap times the overall spread.  Returns index arrays per cluster."""
    vals = np.asarray(vals, dtype=float)
    order = np.argsort(vals)
    sv = vals[order]
    spread = max(float(sv[-1] - sv[0]), 1e-300) if len(sv) else 0.0
    thresh = rel_gap * max(spread, 1.0)
    groups: list[list[int]] = []
    for pos, idx in enumerate(order):
        if groups and sv[pos] - vals[groups[-1][-1]] <= thresh:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return [np.array(g) for g in groups]


def is_projection_residual(p: np.ndarray) -> float:
    """max(||p^2 - p||, ||p - p*||)."""
    return max(opnorm(p @ p - p), opnorm(p - dagger(p)))
