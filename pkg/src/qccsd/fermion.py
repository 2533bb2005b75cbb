"""Second-quantized operators, Jordan-Wigner mapping and molecular Hamiltonians.

Spin orbitals use block ordering: for ``n`` active spatial orbitals the alpha
spin orbitals occupy modes ``0..n-1`` and the beta ones ``n..2n-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from qccsd.pauli import DROP_TOL, PauliSum, PauliTerm, multiply

Ladder = tuple[int, int]  # (mode, 1 for creation / 0 for annihilation)


def _in_order(left: Ladder, right: Ladder) -> bool:
    if left[1] != right[1]:
        return left[1] > right[1]
    return left[0] >= right[0]


def _normal_order(ops: Sequence[Ladder], coeff: complex) -> dict[tuple[Ladder, ...], complex]:
    """Expand a ladder-operator product into canonical-order terms.

    Canonical order: creators left of annihilators, mode indices descending
    inside each group. Every transposition flips the sign; ``a_p a_p^dag``
    also spawns the contracted term.
    """
    out: dict[tuple[Ladder, ...], complex] = {}
    stack = [(list(ops), coeff)]
    while stack:
        ops, c = stack.pop()
        for i in range(1, len(ops)):
            for j in range(i, 0, -1):
                left, right = ops[j - 1], ops[j]
                if _in_order(left, right):
                    break
                if left[1] == 0 and right[1] == 1 and left[0] == right[0]:
                    stack.append((ops[: j - 1] + ops[j + 1 :], c))
                ops[j - 1], ops[j] = right, left
                c = -c
        if any(ops[k] == ops[k + 1] for k in range(len(ops) - 1)):
            continue
        key = tuple(ops)
        out[key] = out.get(key, 0.0) + c
    return out


class FermionOperator:
    """Sum of normal-ordered ladder-operator products over ``n_modes`` modes."""

    def __init__(self, n_modes: int, terms: Iterable[tuple[Sequence[Ladder], complex]] = ()):
        self.n_modes = n_modes
        acc: dict[tuple[Ladder, ...], complex] = {}
        for ops, c in terms:
            for mode, dag in ops:
                if not 0 <= mode < n_modes:
                    raise ValueError(f"mode {mode} out of range for {n_modes} modes")
                if dag not in (0, 1):
                    raise ValueError(f"dagger flag must be 0 or 1, got {dag!r}")
            for key, v in _normal_order(ops, complex(c)).items():
                acc[key] = acc.get(key, 0.0) + v
        self.terms = {k: v for k, v in acc.items() if abs(v) >= DROP_TOL}

    @classmethod
    def from_term(cls, n_modes: int, ops: Sequence[Ladder], coeff: complex = 1.0):
        return cls(n_modes, [(ops, coeff)])

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: FermionOperator) -> FermionOperator:
        if self.n_modes != other.n_modes:
            raise ValueError("mode count mismatch")
        return FermionOperator(self.n_modes, [*self.terms.items(), *other.terms.items()])

    def __sub__(self, other: FermionOperator) -> FermionOperator:
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            if self.n_modes != other.n_modes:
                raise ValueError("mode count mismatch")
            return FermionOperator(
                self.n_modes,
                [(a + b, ca * cb) for a, ca in self.terms.items() for b, cb in other.terms.items()],
            )
        return FermionOperator(self.n_modes, [(k, v * other) for k, v in self.terms.items()])

    __rmul__ = __mul__

    def adjoint(self) -> FermionOperator:
        return FermionOperator(
            self.n_modes,
            [(tuple((m, 1 - d) for m, d in reversed(k)), v.conjugate()) for k, v in self.terms.items()],
        )

    def constant(self) -> complex:
        return self.terms.get((), 0.0)

    def __repr__(self):
        def fmt(k):
            return " ".join(f"a{m}{'^' if d else ''}" for m, d in k) or "1"

        body = " + ".join(f"({v:.6g}) {fmt(k)}" for k, v in list(self.terms.items())[:5])
        return f"FermionOperator[{self.n_modes}]({body}{' + ...' if len(self) > 5 else ''})"


@lru_cache(maxsize=4096)
def _ladder_paulis(mode: int, dagger: int, n: int) -> tuple[PauliTerm, PauliTerm]:
    lower = (1 << mode) - 1
    bit = 1 << mode
    # a = (X + iY)/2 Z_{<j};  a^dag = (X - iY)/2 Z_{<j}
    return (
        PauliTerm(n, bit, lower, 0.5),
        PauliTerm(n, bit, bit | lower, -0.5j if dagger else 0.5j),
    )


def jordan_wigner(op: FermionOperator) -> PauliSum:
    """Map to qubits with ``a_j -> (X_j + iY_j)/2 Z_{j-1}...Z_0``."""
    n = op.n_modes
    acc: dict[tuple[int, int], complex] = {}
    for ops, coeff in op.terms.items():
        partial = [PauliTerm(n, 0, 0, coeff)]
        for mode, dag in ops:
            if not 0 <= mode < n:
                raise ValueError(f"mode {mode} out of range for {n} modes")
            pair = _ladder_paulis(mode, dag, n)
            partial = [multiply(p, f) for p in partial for f in pair]
        for p in partial:
            acc[p.key] = acc.get(p.key, 0.0) + p.coeff
    return PauliSum._from_dict(n, acc)


@dataclass(frozen=True)
class ActiveSpace:
    """Frozen (always doubly occupied) and removed (always empty) spatial orbitals."""

    n_frozen: int = 0
    n_removed: int = 0

    def validate(self, n_spatial: int, n_alpha: int, n_beta: int) -> None:
        if self.n_frozen < 0 or self.n_removed < 0:
            raise ValueError("active-space counts must be non-negative")
        if self.n_frozen + self.n_removed >= n_spatial:
            raise ValueError(
                f"frozen ({self.n_frozen}) + removed ({self.n_removed}) leaves no active "
                f"orbitals out of {n_spatial}"
            )
        if self.n_frozen > min(n_alpha, n_beta):
            raise ValueError(
                f"cannot freeze {self.n_frozen} orbitals with only {n_alpha} alpha / "
                f"{n_beta} beta electrons"
            )
        n_act = n_spatial - self.n_frozen - self.n_removed
        if max(n_alpha, n_beta) - self.n_frozen > n_act:
            raise ValueError("removing virtuals leaves too few orbitals for the electrons")


@dataclass(frozen=True)
class MolecularIntegrals:
    """MO-basis integrals. ``two_body[p, q, r, s]`` is ``(pq|rs)`` in chemists' notation."""

    one_body: np.ndarray
    two_body: np.ndarray
    n_alpha: int
    n_beta: int
    core_energy: float = 0.0
    orbital_energies: np.ndarray | None = None
    scf_energy: float | None = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        h = np.asarray(self.one_body, dtype=float)
        g = np.asarray(self.two_body, dtype=float)
        n = h.shape[0]
        if h.shape != (n, n) or g.shape != (n, n, n, n):
            raise ValueError(f"inconsistent integral shapes {h.shape} and {g.shape}")
        if self.n_alpha < 0 or self.n_beta < 0 or self.n_alpha > n or self.n_beta > n:
            raise ValueError(f"electron counts ({self.n_alpha}, {self.n_beta}) do not fit {n} orbitals")
        object.__setattr__(self, "one_body", h)
        object.__setattr__(self, "two_body", g)
        object.__setattr__(self, "core_energy", float(self.core_energy))
        eps = self.orbital_energies
        if eps is None:
            eps = fock_diagonal(h, g, self.n_alpha, self.n_beta)
        object.__setattr__(self, "orbital_energies", np.asarray(eps, dtype=float))

    @property
    def n_spatial(self) -> int:
        return self.one_body.shape[0]

    @property
    def n_electrons(self) -> int:
        return self.n_alpha + self.n_beta

    def symmetry_error(self) -> float:
        """Largest violation of one-body symmetry or 8-fold two-body symmetry."""
        h, g = self.one_body, self.two_body
        errs = [np.abs(h - h.T).max(initial=0.0)]
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            errs.append(np.abs(g - g.transpose(perm)).max(initial=0.0))
        return float(max(errs))


def fock_diagonal(h: np.ndarray, g: np.ndarray, n_alpha: int, n_beta: int) -> np.ndarray:
    """Alpha Fock diagonal for the determinant filling the lowest-index orbitals."""
    occ_a = np.arange(n_alpha)
    occ_b = np.arange(n_beta)
    coul = np.einsum("ppii->p", g[:, :, occ_a][:, :, :, occ_a]) + np.einsum(
        "ppii->p", g[:, :, occ_b][:, :, :, occ_b]
    )
    exch = np.einsum("piip->p", g[:, occ_a][:, :, occ_a])
    return np.diag(h) + coul - exch


def freeze_core(mi: MolecularIntegrals, active: ActiveSpace) -> MolecularIntegrals:
    """Fold frozen doubly occupied orbitals into the core and drop removed virtuals.

    Orbitals are first sorted by ascending orbital energy (stable, so ties
    keep their original order).
    """
    active.validate(mi.n_spatial, mi.n_alpha, mi.n_beta)
    if active.n_frozen == 0 and active.n_removed == 0:
        return mi
    order = np.argsort(mi.orbital_energies, kind="stable")
    nf, n = active.n_frozen, mi.n_spatial
    frz = order[:nf]
    act = order[nf : n - active.n_removed]
    h, g = mi.one_body, mi.two_body

    core = mi.core_energy
    core += 2.0 * h[frz, frz].sum()
    core += np.einsum("iijj->", 2.0 * g[np.ix_(frz, frz, frz, frz)])
    core -= np.einsum("ijji->", g[np.ix_(frz, frz, frz, frz)])

    h_act = h[np.ix_(act, act)].copy()
    h_act += 2.0 * np.einsum("pqii->pq", g[np.ix_(act, act, frz, frz)])
    h_act -= np.einsum("piiq->pq", g[np.ix_(act, frz, frz, act)])
    g_act = g[np.ix_(act, act, act, act)]

    return MolecularIntegrals(
        one_body=h_act,
        two_body=g_act,
        n_alpha=mi.n_alpha - nf,
        n_beta=mi.n_beta - nf,
        core_energy=core,
        orbital_energies=mi.orbital_energies[act],
        scf_energy=mi.scf_energy,
        metadata={**mi.metadata, "active_space": active, "active_orbitals": act.tolist()},
    )


def build_hamiltonian(
    mi: MolecularIntegrals, active: ActiveSpace | None = None, tol: float = DROP_TOL
) -> FermionOperator:
    r"""Spin-orbital Hamiltonian ``h0 + sum h_pq a+_p a_q + 1/2 sum <pq|sr> a+_p a+_q a_r a_s``.

    The chemists' integral ``(ps|qr)`` multiplies ``a+_{p s1} a+_{q s2} a_{r s2} a_{s s1}``.
    """
    if active is not None:
        mi = freeze_core(mi, active)
    n = mi.n_spatial
    h, g = mi.one_body, mi.two_body
    terms: list[tuple[tuple[Ladder, ...], float]] = [((), mi.core_energy)]
    for spin in (0, n):
        for p in range(n):
            for q in range(n):
                if abs(h[p, q]) >= tol:
                    terms.append((((p + spin, 1), (q + spin, 0)), h[p, q]))
    for p, s, q, r in zip(*np.nonzero(np.abs(g) >= tol)):
        v = 0.5 * g[p, s, q, r]
        for s1 in (0, n):
            for s2 in (0, n):
                if s1 == s2 and (p == q or r == s):
                    continue
                terms.append((((p + s1, 1), (q + s2, 1), (r + s2, 0), (s + s1, 0)), v))
    return FermionOperator(2 * n, terms)


def qubit_hamiltonian(mi: MolecularIntegrals, active: ActiveSpace | None = None) -> PauliSum:
    """Jordan-Wigner image of :func:`build_hamiltonian`, with real coefficients."""
    ham = jordan_wigner(build_hamiltonian(mi, active))
    if ham.max_imag() > 1e-12:
        raise ValueError(f"Hamiltonian has imaginary Pauli coefficients ({ham.max_imag():.3g})")
    return ham.real()


def hf_reference(n_spatial: int, n_alpha: int, n_beta: int) -> int:
    """Occupation bitmask filling the lowest orbitals of each spin block."""
    if not (0 <= n_alpha <= n_spatial and 0 <= n_beta <= n_spatial):
        raise ValueError(f"({n_alpha}, {n_beta}) electrons do not fit {n_spatial} orbitals per spin")
    return ((1 << n_alpha) - 1) | (((1 << n_beta) - 1) << n_spatial)


def active_problem(mi: MolecularIntegrals, active: ActiveSpace | None = None):
    """Return ``(active integrals, qubit Hamiltonian, HF bitmask)``."""
    act = freeze_core(mi, active) if active is not None else mi
    ham = qubit_hamiltonian(act)
    return act, ham, hf_reference(act.n_spatial, act.n_alpha, act.n_beta)
