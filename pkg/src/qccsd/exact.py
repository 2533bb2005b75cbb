"""Exact diagonalization inside a fixed (N_alpha, N_beta) sector."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from qccsd.fermion import ActiveSpace, MolecularIntegrals, active_problem
from qccsd.pauli import PauliSum

DENSE_LIMIT = 4000
DEGENERACY_TOL = 1e-9


class SectorLeakageError(ValueError):
    """The operator maps sector states outside the sector."""


class EigensolverError(RuntimeError):
    pass


def _masks(n: int, k: int) -> list[int]:
    return [sum(1 << i for i in c) for c in combinations(range(n), k)]


@dataclass(frozen=True)
class SectorBasis:
    """Sorted occupation bitmasks with ``n_alpha`` set bits in the low block and ``n_beta`` in the high block."""

    n_spatial: int
    n_alpha: int
    n_beta: int

    def __post_init__(self):
        if not (0 <= self.n_alpha <= self.n_spatial and 0 <= self.n_beta <= self.n_spatial):
            raise ValueError(
                f"({self.n_alpha}, {self.n_beta}) electrons do not fit {self.n_spatial} orbitals per spin"
            )

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial

    @cached_property
    def states(self) -> np.ndarray:
        a = np.array(_masks(self.n_spatial, self.n_alpha), dtype=np.int64)
        b = np.array(_masks(self.n_spatial, self.n_beta), dtype=np.int64) << self.n_spatial
        out = np.sort((a[:, None] | b[None, :]).ravel())
        out.setflags(write=False)
        return out

    @property
    def dim(self) -> int:
        return self.states.size

    def index_of(self, mask: int) -> int:
        pos = int(np.searchsorted(self.states, mask))
        if pos >= self.dim or self.states[pos] != mask:
            raise ValueError(f"basis state {mask:#b} is outside the ({self.n_alpha}, {self.n_beta}) sector")
        return pos

    def __contains__(self, mask: int) -> bool:
        pos = int(np.searchsorted(self.states, mask))
        return pos < self.dim and self.states[pos] == mask


def sector_hamiltonian(h: PauliSum, sector: SectorBasis, leak_tol: float = 1e-10) -> sp.csr_matrix:
    """Sparse matrix of ``h`` in the sector basis.

    Terms sharing an X/Y pattern are summed before the leakage check, since
    individual Pauli strings of a number-conserving operator do leave the sector.
    """
    if h.n_qubits != sector.n_qubits:
        raise ValueError(f"operator on {h.n_qubits} qubits, sector on {sector.n_qubits}")
    states = sector.states
    dim = states.size
    by_x: dict[int, np.ndarray] = {}
    for (x, z), c in h.items():
        ny = bin(x & z).count("1")
        signs = 1.0 - 2.0 * (np.bitwise_count(states & z) & 1)
        vals = (c * 1j**ny) * signs
        if x in by_x:
            by_x[x] = by_x[x] + vals
        else:
            by_x[x] = vals
    rows, cols, data = [], [], []
    cols_all = np.arange(dim)
    for x, vals in by_x.items():
        targets = states ^ x
        pos = np.minimum(np.searchsorted(states, targets), dim - 1)
        inside = states[pos] == targets
        if not inside.all():
            leak = float(np.abs(vals[~inside]).max())
            if leak > leak_tol:
                raise SectorLeakageError(
                    f"operator leaks out of the ({sector.n_alpha}, {sector.n_beta}) sector "
                    f"(amplitude {leak:.3g})"
                )
        rows.append(pos[inside])
        cols.append(cols_all[inside])
        data.append(vals[inside])
    data = np.concatenate(data) if data else np.zeros(0, complex)
    if data.size and np.abs(data.imag).max() < 1e-12:
        data = data.real
    mat = sp.coo_matrix(
        (data, (np.concatenate(rows) if rows else [], np.concatenate(cols) if cols else [])),
        shape=(dim, dim),
    )
    return mat.tocsr()


@dataclass
class GroundState:
    energy: float
    vector: np.ndarray
    sector: SectorBasis
    subspace: np.ndarray  # columns span the (possibly degenerate) ground space
    residual: float

    @property
    def degenerate(self) -> bool:
        return self.subspace.shape[1] > 1

    def __iter__(self):
        yield self.energy
        yield self.vector


def sector_ground_state(
    h: PauliSum,
    sector: SectorBasis,
    dense_limit: int = DENSE_LIMIT,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> GroundState:
    """Lowest eigenpair of ``h`` restricted to ``sector``.

    Dense ``eigh`` up to ``dense_limit`` states, ARPACK Lanczos above.
    """
    H = sector_hamiltonian(h, sector)
    if sector.dim <= dense_limit:
        vals, vecs = np.linalg.eigh(H.toarray())
    else:
        k = min(6, sector.dim - 2)
        try:
            vals, vecs = eigsh(H, k=k, which="SA", tol=1e-13, maxiter=20 * sector.dim)
        except ArpackNoConvergence as exc:
            raise EigensolverError(f"Lanczos did not converge: {exc}") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    e0 = float(vals[0])
    ndeg = int(np.sum(vals - e0 < degeneracy_tol))
    v = vecs[:, 0]
    # deterministic global phase: largest component real positive
    i = int(np.argmax(np.abs(v)))
    v = v * (abs(v[i]) / v[i])
    residual = float(np.linalg.norm(H @ v - e0 * v))
    if residual > 1e-9:
        raise EigensolverError(f"ground-state residual {residual:.3g} exceeds 1e-9")
    return GroundState(e0, v, sector, vecs[:, :ndeg], residual)


def hf_ground_overlap(ground: GroundState, hf_mask: int) -> float:
    """``|<HF|ground>|**2``; for a degenerate ground space, the largest value over it."""
    i = ground.sector.index_of(hf_mask)
    return float(min(1.0, np.sum(np.abs(ground.subspace[i]) ** 2)))


def fci_ground_state(mi: MolecularIntegrals, active: ActiveSpace | None = None) -> tuple[GroundState, int]:
    """Sector FCI on the (active) molecular Hamiltonian; returns ``(ground, hf_mask)``."""
    act, ham, hf = active_problem(mi, active)
    sector = SectorBasis(act.n_spatial, act.n_alpha, act.n_beta)
    return sector_ground_state(ham, sector), hf
