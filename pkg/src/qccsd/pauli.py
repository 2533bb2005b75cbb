"""Pauli strings in symplectic (x, z) bitmask form.

Qubit ``q`` of a term carries X when only bit ``q`` of ``x`` is set, Z when only
bit ``q`` of ``z`` is set, Y when both are set. All phases live in the complex
coefficient. Basis states are little-endian: qubit 0 is the least significant
bit of the basis index, and kets are written ``|q_{n-1} ... q_0>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, TextIO

import numpy as np

DROP_TOL = 1e-12
MAX_DENSE_QUBITS = 12

_I_POW = (1, 1j, -1, -1j)
_LETTER_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_TOKEN = re.compile(r"^([XYZ])(\d+)$")


def _popcount(v: int) -> int:
    return bin(v).count("1")


@lru_cache(maxsize=32)
def basis_indices(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    idx.setflags(write=False)
    return idx


def z_signs(n_qubits: int, z: int) -> np.ndarray:
    """(-1)**popcount(b & z) for every basis index b."""
    idx = basis_indices(n_qubits)
    return 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)


@dataclass(frozen=True)
class PauliTerm:
    n_qubits: int
    x: int
    z: int
    coeff: complex = 1.0

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if self.n_qubits < 0 or not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"bitmasks x={self.x}, z={self.z} exceed {self.n_qubits} qubits")
        object.__setattr__(self, "coeff", complex(self.coeff))

    @classmethod
    def from_label(cls, label: str, n_qubits: int, coeff: complex = 1.0) -> PauliTerm:
        """Parse ``"X0 Z2 Y5"``; ``"I"`` or an empty string is the identity."""
        x = z = 0
        for tok in label.split():
            if tok == "I":
                continue
            m = _TOKEN.match(tok)
            if m is None:
                raise ValueError(f"bad Pauli token {tok!r}")
            q = int(m.group(2))
            if q >= n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
            if (x | z) >> q & 1:
                raise ValueError(f"qubit {q} repeated in {label!r}")
            bx, bz = _LETTER_BITS[m.group(1)]
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z, coeff)

    @classmethod
    def from_ops(cls, ops: dict[int, str], n_qubits: int, coeff: complex = 1.0) -> PauliTerm:
        return cls.from_label(" ".join(f"{p}{q}" for q, p in sorted(ops.items())), n_qubits, coeff)

    @property
    def key(self) -> tuple[int, int]:
        return self.x, self.z

    @property
    def support(self) -> int:
        return self.x | self.z

    def letter(self, q: int) -> str:
        return "IXZY"[(self.x >> q & 1) | (self.z >> q & 1) << 1]

    def label(self) -> str:
        toks = [f"{self.letter(q)}{q}" for q in range(self.n_qubits) if self.support >> q & 1]
        return " ".join(toks) if toks else "I"

    def with_coeff(self, coeff: complex) -> PauliTerm:
        return PauliTerm(self.n_qubits, self.x, self.z, coeff)

    def commutes_with(self, other: PauliTerm) -> bool:
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            return multiply(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return self.with_coeff(self.coeff * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.with_coeff(self.coeff * other)
        return NotImplemented

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Return ``P|psi>`` using bit flips and sign masks only."""
        ny = _popcount(self.x & self.z)
        v = (self.coeff * _I_POW[ny % 4]) * z_signs(self.n_qubits, self.z) * psi
        return v[basis_indices(self.n_qubits) ^ self.x]

    def to_matrix(self) -> np.ndarray:
        return PauliSum(self.n_qubits, [self]).to_matrix()

    def __repr__(self):
        return f"PauliTerm({self.coeff:.6g} * {self.label()}, n={self.n_qubits})"


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Operator product ``a @ b`` as a single Pauli term.

    Writing each term as ``i**|x&z| X^x Z^z`` and commuting ``Z^z1`` past ``X^x2``
    gives the phase exponent below (mod 4).
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")
    x, z = a.x ^ b.x, a.z ^ b.z
    k = _popcount(a.x & a.z) + _popcount(b.x & b.z) + 2 * _popcount(a.z & b.x) - _popcount(x & z)
    return PauliTerm(a.n_qubits, x, z, a.coeff * b.coeff * _I_POW[k % 4])


class PauliSum:
    """Linear combination of Pauli strings, keyed by ``(x, z)``.

    Treated as immutable: arithmetic returns new objects. Term order is the
    order of first insertion, which keeps every reduction deterministic.
    """

    def __init__(self, n_qubits: int, terms: Iterable[PauliTerm] = (), drop_tol: float = DROP_TOL):
        self.n_qubits = n_qubits
        self.drop_tol = drop_tol
        acc: dict[tuple[int, int], complex] = {}
        for t in terms:
            if t.n_qubits != n_qubits:
                raise ValueError(f"term on {t.n_qubits} qubits added to {n_qubits}-qubit sum")
            acc[t.key] = acc.get(t.key, 0.0) + t.coeff
        self._terms = {k: c for k, c in acc.items() if abs(c) >= drop_tol}

    @classmethod
    def _from_dict(cls, n_qubits, coeffs, drop_tol=DROP_TOL) -> PauliSum:
        out = cls.__new__(cls)
        out.n_qubits = n_qubits
        out.drop_tol = drop_tol
        out._terms = {k: complex(c) for k, c in coeffs.items() if abs(c) >= drop_tol}
        return out

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls(n_qubits, [PauliTerm(n_qubits, 0, 0, coeff)])

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        for (x, z), c in self._terms.items():
            yield PauliTerm(self.n_qubits, x, z, c)

    def __contains__(self, key):
        return key in self._terms

    def coefficient(self, key: tuple[int, int] | str) -> complex:
        if isinstance(key, str):
            key = PauliTerm.from_label(key, self.n_qubits).key
        return self._terms.get(key, 0.0)

    def items(self):
        return self._terms.items()

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __add__(self, other):
        if isinstance(other, PauliTerm):
            return add_into(self, other)
        if isinstance(other, PauliSum):
            self._check(other.n_qubits)
            acc = dict(self._terms)
            for k, c in other._terms.items():
                acc[k] = acc.get(k, 0.0) + c
            return PauliSum._from_dict(self.n_qubits, acc, self.drop_tol)
        if isinstance(other, (int, float, complex, np.number)):
            return self + PauliTerm(self.n_qubits, 0, 0, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum._from_dict(
                self.n_qubits, {k: c * other for k, c in self._terms.items()}, self.drop_tol
            )
        if isinstance(other, PauliTerm):
            other = PauliSum(other.n_qubits, [other])
        if isinstance(other, PauliSum):
            self._check(other.n_qubits)
            acc: dict[tuple[int, int], complex] = {}
            for a in self:
                for b in other:
                    p = multiply(a, b)
                    acc[p.key] = acc.get(p.key, 0.0) + p.coeff
            return PauliSum._from_dict(self.n_qubits, acc, self.drop_tol)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def _check(self, n):
        if n != self.n_qubits:
            raise ValueError(f"qubit count mismatch: {self.n_qubits} vs {n}")

    def adjoint(self) -> PauliSum:
        return PauliSum._from_dict(
            self.n_qubits, {k: c.conjugate() for k, c in self._terms.items()}, self.drop_tol
        )

    def max_imag(self) -> float:
        return max((abs(c.imag) for c in self._terms.values()), default=0.0)

    def real(self) -> PauliSum:
        return PauliSum._from_dict(
            self.n_qubits, {k: c.real for k, c in self._terms.items()}, self.drop_tol
        )

    def to_matrix(self, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix, little-endian."""
        if self.n_qubits > max_qubits:
            raise ValueError(
                f"{self.n_qubits} qubits exceeds the dense-matrix guard of {max_qubits}"
            )
        dim = 1 << self.n_qubits
        idx = basis_indices(self.n_qubits)
        mat = np.zeros((dim, dim), dtype=complex)
        for t in self:
            ny = _popcount(t.x & t.z)
            mat[idx ^ t.x, idx] += t.coeff * _I_POW[ny % 4] * z_signs(self.n_qubits, t.z)
        return mat

    def apply(self, psi) -> np.ndarray:
        psi = np.asarray(getattr(psi, "amplitudes", psi))
        out = np.zeros_like(psi, dtype=complex)
        for t in self:
            out += t.apply(psi)
        return out

    def to_text(self) -> str:
        lines = [f"{c.real:.17g} {c.imag:.17g} {self._label(k)}" for k, c in self._terms.items()]
        return "\n".join(lines) + ("\n" if lines else "")

    def _label(self, key):
        return PauliTerm(self.n_qubits, *key).label()

    def dump(self, stream: TextIO) -> None:
        stream.write(f"# n_qubits={self.n_qubits}\n")
        stream.write(self.to_text())

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> PauliSum:
        """Inverse of :meth:`dump` / :meth:`to_text`."""
        rows = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = re.search(r"n_qubits=(\d+)", line)
                if m and n_qubits is None:
                    n_qubits = int(m.group(1))
                continue
            parts = line.split(maxsplit=2)
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected '<re> <im> <label>'")
            rows.append((complex(float(parts[0]), float(parts[1])), parts[2]))
        if n_qubits is None:
            n_qubits = 1 + max(
                (int(q) for _, lab in rows for q in re.findall(r"\d+", lab)), default=-1
            )
        return cls(n_qubits, [PauliTerm.from_label(lab, n_qubits, c) for c, lab in rows])

    def __repr__(self):
        body = " + ".join(f"({c:.6g}) {self._label(k)}" for k, c in list(self._terms.items())[:6])
        more = " + ..." if len(self) > 6 else ""
        return f"PauliSum[n={self.n_qubits}]({body}{more})"


def add_into(total: PauliSum, term: PauliTerm) -> PauliSum:
    """Return ``total + term``, dropping the key if the merged coefficient vanishes."""
    total._check(term.n_qubits)
    acc = dict(total._terms)
    acc[term.key] = acc.get(term.key, 0.0) + term.coeff
    return PauliSum._from_dict(total.n_qubits, acc, total.drop_tol)


def expectation(op: PauliSum, psi, norm_tol: float = 1e-10) -> float:
    """``Re <psi|op|psi>`` term by term, without building a matrix."""
    amps = np.asarray(getattr(psi, "amplitudes", psi))
    if amps.shape != (1 << op.n_qubits,):
        raise ValueError(f"state of shape {amps.shape} does not match {op.n_qubits} qubits")
    norm = float(np.vdot(amps, amps).real)
    if abs(norm - 1.0) > norm_tol:
        raise ValueError(f"state is not normalized (norm**2 = {norm!r})")
    total = 0.0
    for t in op:
        total += np.vdot(amps, t.apply(amps)).real
    return float(total)
