"""Dense statevector simulation with in-place, bitmask-indexed gate kernels.

Multi-qubit gates read their qubit list with the first-listed qubit as the most
significant local bit, so for ``exchange_double(theta, a, b, c, d)`` local index
5 is ``|a b c d> = |0101>`` and local index 10 is ``|1010>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

import numpy as np

from qccsd.pauli import PauliTerm, basis_indices, z_signs

EXCHANGE_SINGLE = "exchange_single"
EXCHANGE_DOUBLE = "exchange_double"
RY = "ry"
PAULI_X = "x"
CNOT = "cnot"
CONTROLLED_RY = "controlled_ry"
PAULI_EXP = "pauli_exp"

_ARITY = {EXCHANGE_SINGLE: 2, EXCHANGE_DOUBLE: 4, RY: 1, PAULI_X: 1, CNOT: 2}
KINDS = (EXCHANGE_SINGLE, EXCHANGE_DOUBLE, RY, PAULI_X, CNOT, CONTROLLED_RY, PAULI_EXP)


@dataclass(frozen=True)
class Gate:
    """A gate on explicit qubit indices.

    ``controlled_ry`` lists its controls first and the target last. ``pauli_exp``
    realizes ``exp(-i angle/2 * c P)`` for the attached Pauli term ``c P`` with
    real ``c``; its qubits are the term's support.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0
    pauli: PauliTerm | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "angle", float(self.angle))
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"duplicate qubit indices {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {qubits}")
        if self.kind in _ARITY and len(qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubits, got {len(qubits)}")
        if self.kind == CONTROLLED_RY and len(qubits) < 2:
            raise ValueError("controlled_ry needs at least one control and a target")
        if self.kind == PAULI_EXP:
            if self.pauli is None:
                raise ValueError("pauli_exp gate needs a Pauli term")
            if abs(self.pauli.coeff.imag) > 1e-12:
                raise ValueError("pauli_exp needs a real Pauli coefficient")

    @classmethod
    def exchange_single(cls, theta: float, a: int, b: int) -> Gate:
        return cls(EXCHANGE_SINGLE, (a, b), theta)

    @classmethod
    def exchange_double(cls, theta: float, a: int, b: int, c: int, d: int) -> Gate:
        return cls(EXCHANGE_DOUBLE, (a, b, c, d), theta)

    @classmethod
    def ry(cls, angle: float, q: int) -> Gate:
        return cls(RY, (q,), angle)

    @classmethod
    def x(cls, q: int) -> Gate:
        return cls(PAULI_X, (q,))

    @classmethod
    def cnot(cls, control: int, target: int) -> Gate:
        return cls(CNOT, (control, target))

    @classmethod
    def controlled_ry(cls, angle: float, controls: Sequence[int], target: int) -> Gate:
        return cls(CONTROLLED_RY, (*controls, target), angle)

    @classmethod
    def pauli_exp(cls, term: PauliTerm, angle: float) -> Gate:
        qubits = tuple(q for q in range(term.n_qubits) if term.support >> q & 1)
        return cls(PAULI_EXP, qubits, angle, term)

    def check_register(self, n_qubits: int) -> None:
        if any(q >= n_qubits for q in self.qubits):
            raise ValueError(f"{self.kind} on qubits {self.qubits} exceeds {n_qubits}-qubit register")
        if self.pauli is not None and self.pauli.n_qubits != n_qubits:
            raise ValueError(f"Pauli term on {self.pauli.n_qubits} qubits in a {n_qubits}-qubit register")

    def to_matrix(self, n_qubits: int) -> np.ndarray:
        """Full ``2**n x 2**n`` unitary, built column by column from the kernels."""
        dim = 1 << n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for col in range(dim):
            amps = np.zeros(dim, dtype=complex)
            amps[col] = 1.0
            _apply(amps, self, n_qubits)
            out[:, col] = amps
        return out


class StateVector:
    """``2**n`` complex amplitudes, qubit 0 = least significant index bit."""

    def __init__(self, amplitudes, n_qubits: int | None = None):
        amps = np.array(amplitudes, dtype=complex)
        if n_qubits is None:
            n_qubits = int(amps.size).bit_length() - 1
        if amps.shape != (1 << n_qubits,):
            raise ValueError(f"amplitude array of shape {amps.shape} is not 2**{n_qubits}")
        self.amplitudes = amps
        self.n_qubits = n_qubits

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes, self.n_qubits)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self):
        return self.amplitudes.size

    def __repr__(self):
        nz = np.flatnonzero(self.probabilities() > 1e-12)
        shown = ", ".join(f"{self.amplitudes[i]:.4g}|{i:0{self.n_qubits}b}>" for i in nz[:4])
        return f"StateVector[{self.n_qubits}]({shown}{', ...' if nz.size > 4 else ''})"


def prepare_basis_state(n_qubits: int, mask: int) -> StateVector:
    if not 0 <= mask < 1 << n_qubits:
        raise ValueError(f"occupation mask {mask:#b} out of range for {n_qubits} qubits")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[mask] = 1.0
    return StateVector(amps, n_qubits)


@lru_cache(maxsize=4096)
def _pattern(n_qubits: int, ones: int, zeros: int) -> np.ndarray:
    """Basis indices with every bit of ``ones`` set and every bit of ``zeros`` clear."""
    idx = basis_indices(n_qubits)
    sel = idx[(idx & (ones | zeros)) == ones]
    sel.setflags(write=False)
    return sel


@lru_cache(maxsize=1024)
def _pauli_factor(n_qubits: int, x: int, z: int) -> np.ndarray:
    ny = bin(x & z).count("1")
    f = (1j**ny) * z_signs(n_qubits, z)
    f.setflags(write=False)
    return f


def _bits(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def _rotate(amps, i_lo, i_hi, c, s):
    # [lo, hi] <- [[c, -s], [s, c]] [lo, hi]
    lo = amps[i_lo]
    hi = amps[i_hi]
    amps[i_lo] = c * lo - s * hi
    amps[i_hi] = s * lo + c * hi


def _apply(amps: np.ndarray, g: Gate, n: int) -> None:
    g.check_register(n)
    kind, q = g.kind, g.qubits
    if kind == EXCHANGE_SINGLE:
        # local |01> (index 1) and |10> (index 2) mix: U|10> = cos|10> - sin|01>
        i10 = _pattern(n, 1 << q[0], 1 << q[1])
        i01 = i10 ^ _bits(q)
        _rotate(amps, i01, i10, np.cos(g.angle), np.sin(g.angle))
    elif kind == EXCHANGE_DOUBLE:
        # local |0101> (index 5) and |1010> (index 10) mix
        i1010 = _pattern(n, _bits((q[0], q[2])), _bits((q[1], q[3])))
        i0101 = i1010 ^ _bits(q)
        _rotate(amps, i0101, i1010, np.cos(g.angle), np.sin(g.angle))
    elif kind == RY:
        i0 = _pattern(n, 0, 1 << q[0])
        _rotate(amps, i0, i0 | (1 << q[0]), np.cos(g.angle / 2), np.sin(g.angle / 2))
    elif kind == CONTROLLED_RY:
        t = q[-1]
        i0 = _pattern(n, _bits(q[:-1]), 1 << t)
        _rotate(amps, i0, i0 | (1 << t), np.cos(g.angle / 2), np.sin(g.angle / 2))
    elif kind == PAULI_X:
        amps[:] = amps[basis_indices(n) ^ (1 << q[0])]
    elif kind == CNOT:
        i = _pattern(n, 1 << q[0], 1 << q[1])
        j = i | (1 << q[1])
        amps[i], amps[j] = amps[j], amps[i].copy()
    elif kind == PAULI_EXP:
        p = g.pauli
        half = 0.5 * g.angle * p.coeff.real
        flipped = (_pauli_factor(n, p.x, p.z) * amps)[basis_indices(n) ^ p.x]
        amps *= np.cos(half)
        amps -= 1j * np.sin(half) * flipped
    else:  # pragma: no cover - guarded by Gate.__post_init__
        raise ValueError(kind)


def apply_gate(psi: StateVector, gate: Gate) -> StateVector:
    out = psi.copy()
    _apply(out.amplitudes, gate, out.n_qubits)
    return out


def run_circuit(psi: StateVector, gates: Iterable[Gate]) -> StateVector:
    """Apply ``gates`` left to right (first gate acts first)."""
    out = psi.copy()
    for g in gates:
        _apply(out.amplitudes, g, out.n_qubits)
    return out


def circuit_matrix(gates: Sequence[Gate], n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    mat = np.eye(dim, dtype=complex)
    for col in range(dim):
        for g in gates:
            _apply(mat[:, col], g, n_qubits)
    return mat


def hamming_weight_distribution(psi: StateVector) -> dict[int, float]:
    """Probability mass per basis-state popcount (weights with zero mass omitted)."""
    weights = np.bitwise_count(basis_indices(psi.n_qubits))
    mass = np.bincount(weights, weights=psi.probabilities(), minlength=psi.n_qubits + 1)
    return {int(w): float(p) for w, p in enumerate(mass) if p > 0}


def spin_sector_distribution(psi: StateVector, n_spatial: int) -> dict[tuple[int, int], float]:
    """Probability mass per (alpha count, beta count) under block spin ordering."""
    idx = basis_indices(psi.n_qubits)
    block = (1 << n_spatial) - 1
    na = np.bitwise_count(idx & block).astype(np.int64)
    nb = np.bitwise_count(idx >> n_spatial).astype(np.int64)
    mass = np.bincount(na * (n_spatial + 1) + nb, weights=psi.probabilities())
    return {
        (int(k) // (n_spatial + 1), int(k) % (n_spatial + 1)): float(p)
        for k, p in enumerate(mass)
        if p > 0
    }


def dump_state(psi: StateVector, stream: TextIO, threshold: float = 1e-12) -> None:
    """Write ``index real imag`` for basis states with probability above ``threshold``."""
    for i in np.flatnonzero(psi.probabilities() > threshold):
        a = psi.amplitudes[i]
        stream.write(f"{i} {a.real:.17g} {a.imag:.17g}\n")
