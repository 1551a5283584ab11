"""Seeded generation of test instances: pairs of close subalgebras produced
by named recipes, random order-zero maps, and the built-in commutative
nuclear-dimension decompositions.

Every recipe is a pure function of (recipe, params, seed) through the
counter-based generator, so re-execution reproduces bit-identical matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import ConcreteAlgebra, FDAlgebra, generate_algebra
from .cpmaps import LinMap, choi_blocks, from_choi
from .geometry import DistanceInterval
from .linalg import (clip_spectrum, dagger, expm_i, herm, hs_norm, opnorm,
                     psd_part, random_hermitian, random_unitary, rng_for)
from .orderzero import NucDimDecomposition, OrderZeroMap
from .serialize import matrix_to_json, to_jsonable

__all__ = [
    "Instance",
    "block_algebra",
    "base_algebra",
    "gen_instance",
    "random_order_zero",
    "hat_decomposition",
]

RECIPES = ("conjugation", "choi-noise", "block-rotation")

_NAMED = {
    "M2": (2,),
    "M3": (3,),
    "M2+M1": (2, 1),
    "M2+M2": (2, 2),
    "diag2": (1, 1),
    "diag3": (1, 1, 1),
    "diag4": (1, 1, 1, 1),
}


@dataclass
class Instance:
    """A generated pair of close subalgebras with its recipe provenance."""

    A: ConcreteAlgebra
    B: ConcreteAlgebra
    recipe: str
    params: dict
    true_unitary: np.ndarray | None
    seed: int

    def dist_hint(self) -> DistanceInterval | None:
        """Constructive distance bound d(A, B) <= 2 ||u - I|| when the
        instance was produced by conjugation with a known unitary."""
        if self.true_unitary is None:
            return None
        hi = min(2.0 * opnorm(self.true_unitary - np.eye(self.A.ambient_dim)), 2.0)
        return DistanceInterval(lo=0.0, hi=float(hi), lo_witness=None,
                                hi_assignment={"method": "conjugation-bound"})

    def to_dict(self) -> dict:
        return {"kind": "instance", "schema_version": 1,
                "recipe": self.recipe, "seed": self.seed,
                "params": to_jsonable(self.params),
                "A": to_jsonable(self.A), "B": to_jsonable(self.B),
                "true_unitary": None if self.true_unitary is None
                else matrix_to_json(self.true_unitary)}


def block_algebra(sizes, ambient: int | None = None) -> ConcreteAlgebra:
    """Blocks of the given sizes placed consecutively on the diagonal."""
    sizes = tuple(int(n) for n in sizes)
    d = sum(sizes)
    N = ambient if ambient is not None else d
    if d > N:
        raise ValueError(f"blocks of total size {d} do not fit in M_{N}")
    fd = FDAlgebra(sizes)
    basis = []
    for u in fd.units():
        m = np.zeros((N, N), dtype=complex)
        m[:d, :d] = u
        basis.append(m)
    return ConcreteAlgebra.from_basis(basis, N)


def base_algebra(name, ambient: int | None = None) -> ConcreteAlgebra:
    """Resolve a named profile ("M2", "M2+M1", "diag3", ...) or a size tuple
    into a concrete block algebra."""
    if isinstance(name, ConcreteAlgebra):
        return name
    if isinstance(name, (tuple, list)):
        return block_algebra(name, ambient)
    if name in _NAMED:
        return block_algebra(_NAMED[name], ambient)
    if name.startswith("full"):
        n = int(name[4:])
        if ambient is not None and ambient != n:
            return block_algebra((n,), ambient)
        return ConcreteAlgebra.full(n)
    parts = name.split(",")
    if all(p.strip().isdigit() and int(p) > 0 for p in parts):
        return block_algebra(tuple(int(p) for p in parts), ambient)
    raise ValueError(f"unknown algebra profile {name!r}")


def gen_instance(recipe: str, params: dict, seed: int = 0) -> Instance:
    """Generate a pair of close algebras.

    conjugation: B = e^{i eps h} A e^{-i eps h}, h a random ambient
    self-adjoint with ||h|| = 1.  choi-noise: perturb the block embedding's
    Choi blocks by Hermitian HS noise of size eps, clip back to psd, and
    generate B from the perturbed images.  block-rotation: conjugation with a
    generator supported on one structural block of A, so the other blocks do
    not move.
    """
    if recipe not in RECIPES:
        raise ValueError(f"unknown recipe {recipe!r}; choose one of {RECIPES}")
    params = dict(params)
    ambient = int(params.get("ambient", 4))
    eps = float(params.get("eps", 1e-4))
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    A = base_algebra(params.get("algebra", "M2"), ambient)
    N = A.ambient_dim
    rng = rng_for(seed, "instance", recipe)

    if recipe == "conjugation":
        h = random_hermitian(rng, N)
        h = h / max(opnorm(h), 1e-300)
        u = expm_i(eps * h)
        B = A.conjugated(u)
        return Instance(A=A, B=B, recipe=recipe, params=params,
                        true_unitary=u, seed=seed)

    if recipe == "block-rotation":
        struct = A.structure(seed=seed)
        k = int(params.get("block", 0))
        if not 0 <= k < len(struct.summands):
            raise ValueError(f"block index {k} out of range")
        units = struct.matrix_units[k]
        z = sum(units[i][i] for i in range(len(units)))
        h = herm(z @ random_hermitian(rng, N) @ z)
        h = h / max(opnorm(h), 1e-300)
        u = expm_i(eps * h)
        B = A.conjugated(u)
        return Instance(A=A, B=B, recipe=recipe, params=params,
                        true_unitary=u, seed=seed)

    # choi-noise
    bm = A.block_model(seed=seed)
    fd = bm.fd
    rho = LinMap(fd, N, tuple(bm.to_concrete(u) for u in fd.units()))
    noisy_blocks = []
    for C in choi_blocks(rho):
        noise = random_hermitian(rng, C.shape[0])
        noise = noise / max(hs_norm(noise), 1e-300)
        noisy_blocks.append(psd_part(herm(C + eps * noise)))
    size = sum(b.shape[0] for b in noisy_blocks)
    Cfull = np.zeros((size, size), dtype=complex)
    off = 0
    for b in noisy_blocks:
        Cfull[off:off + b.shape[0], off:off + b.shape[0]] = b
        off += b.shape[0]
    psi = from_choi(Cfull, fd.block_sizes, N)
    B = generate_algebra(list(psi.images), N)
    return Instance(A=A, B=B, recipe=recipe, params=params,
                    true_unitary=None, seed=seed)


def random_order_zero(sizes, N: int, seed: int = 0,
                      damping=(0.4, 1.0)) -> OrderZeroMap:
    """Random order-zero map from the block algebra of the given sizes into
    M_N: a conjugated block embedding pi damped by a positive contraction
    h = sum c_k pi(1_k) in the commutant of pi."""
    fd = FDAlgebra(tuple(int(n) for n in sizes))
    if fd.d > N:
        raise ValueError(f"blocks of total size {fd.d} do not embed in M_{N}")
    rng = rng_for(seed, "order-zero", fd.d, N)
    v = random_unitary(rng, N)
    images = []
    for u in fd.units():
        m = np.zeros((N, N), dtype=complex)
        m[:fd.d, :fd.d] = u
        images.append(v @ m @ dagger(v))
    pi = LinMap(fd, N, tuple(images))
    h = np.zeros((N, N), dtype=complex)
    lo, hi = damping
    for k in range(len(fd.block_sizes)):
        c = float(rng.uniform(lo, hi))
        h = h + c * pi(fd.block_unit(k))
    carrier = ConcreteAlgebra.from_basis(list(images), N)
    return OrderZeroMap.from_pair(pi, herm(h), codomain_algebra=carrier)


def hat_decomposition(n_grid: int, step: int = 2):
    """Two-color decomposition of the diagonal algebra on a grid through
    piecewise-linear hat functions at every step-th grid point.

    Same-color hats have disjoint grid supports, so both upward maps are
    exactly order zero, while the composite reproduces only the nodal
    interpolant: the defect is a genuine interpolation error.  Returns
    (A, decomposition, X) with X the smooth test functions used to measure
    the defect.
    """
    if n_grid < 3 or (n_grid - 1) % step:
        raise ValueError("need a grid with (n_grid - 1) divisible by step")
    A = ConcreteAlgebra.diagonal(n_grid)
    nodes = list(range(0, n_grid, step))
    grid = np.arange(n_grid) / (n_grid - 1)

    def hat(center: int) -> np.ndarray:
        vals = np.maximum(0.0, 1.0 - np.abs(np.arange(n_grid) - center) / step)
        return np.diag(vals.astype(complex))

    fd = FDAlgebra((1,) * len(nodes))
    down = LinMap(A, fd.d, tuple(
        np.diag(np.array([1.0 + 0j if nodes[m] == j else 0.0
                          for m in range(len(nodes))]))
        for j in range(n_grid)))
    pieces = (tuple(m for m in range(len(nodes)) if m % 2 == 0),
              tuple(m for m in range(len(nodes)) if m % 2 == 1))
    ups = []
    for group in pieces:
        sub = FDAlgebra((1,) * len(group))
        hats = [hat(nodes[m]) for m in group]
        supports = [np.diag((np.diag(h_m).real > 1e-12).astype(complex))
                    for h_m in hats]
        up_map = LinMap(sub, n_grid, tuple(hats), codomain_algebra=A)
        pi = LinMap(sub, n_grid, tuple(supports))
        ups.append(OrderZeroMap(map=up_map, pi=pi, h=herm(sum(hats))))
    dec = NucDimDecomposition(F=fd, pieces=pieces, down=down, ups=tuple(ups),
                              defect=0.0)
    X = [np.diag(grid.astype(complex)),
         np.diag((grid ** 2).astype(complex)),
         np.diag((grid * (1.0 - grid)).astype(complex))]
    dec.defect = float(max(opnorm(dec.compose(x) - x) for x in X))
    return A, dec, X
