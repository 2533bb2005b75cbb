"""Excitation lists and circuits for the QCCSD and first-order Trotter UCCSD ansaetze.

Parameters are ordered as the excitations: alpha singles, beta singles,
alpha-beta doubles, alpha-alpha doubles, beta-beta doubles. Circuits apply the
gates in that same order in time (first parameter's gate acts first).

Sign conventions, fixed by dense equivalence tests:

* ``decompose_exchange_single(theta)`` and ``decompose_exchange_double(theta)``
  reproduce ``exchange_single(EXCHANGE_SINGLE_SIGN * theta)`` and
  ``exchange_double(EXCHANGE_DOUBLE_SIGN * theta)``.
* The UCCSD factor ``exp(theta (a+_v a_o - h.c.))`` with its Z string removed
  equals ``exchange_single(-theta)`` on ``(o, v)``; the double-excitation factor
  with parity strings removed equals ``exchange_double(-theta)`` on
  ``(o1, v1, o2, v2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from qccsd.fermion import FermionOperator, jordan_wigner
from qccsd.pauli import PauliSum, PauliTerm
from qccsd.sim import (
    CNOT,
    EXCHANGE_DOUBLE,
    EXCHANGE_SINGLE,
    PAULI_EXP,
    Gate,
    circuit_matrix,
)

EXCHANGE_SINGLE_SIGN = 1
EXCHANGE_DOUBLE_SIGN = 1
ELEMENTARY_PER_SINGLE = 3
ELEMENTARY_PER_DOUBLE = 11

MIXED, ALPHA, BETA = "mixed", "alpha", "beta"

# letters on (o1, v1, o2, v2), in the printed row order of the JW-expanded double
DOUBLE_PATTERN_ORDER = ("XXXY", "XYXX", "XYYY", "YYXY", "XXYX", "YXXX", "YXYY", "YYYX")
SINGLE_PATTERN_ORDER = ("YX", "XY")


@dataclass(frozen=True)
class ExcitationList:
    """Spin-preserving excitations on ``n_qubits`` spin orbitals.

    Singles are ``(occupied, virtual)``; doubles are ``(occ1, virt1, occ2, virt2)``,
    which is also the qubit order handed to the four-qubit exchange gate.
    """

    n_qubits: int
    singles: tuple[tuple[int, int], ...]
    doubles: tuple[tuple[int, int, int, int], ...]
    double_kinds: tuple[str, ...]

    @property
    def n_params(self) -> int:
        return len(self.singles) + len(self.doubles)

    def __len__(self):
        return self.n_params

    def __iter__(self):
        yield from self.singles
        yield from self.doubles


def excitation_count(n_occ_alpha: int, n_virt_alpha: int, n_occ_beta: int, n_virt_beta: int) -> int:
    oa, va, ob, vb = n_occ_alpha, n_virt_alpha, n_occ_beta, n_virt_beta
    return oa * va + ob * vb + oa * va * ob * vb + comb(oa, 2) * comb(va, 2) + comb(ob, 2) * comb(vb, 2)


def excitation_list_from_orbitals(
    alpha_occ: Sequence[int],
    alpha_virt: Sequence[int],
    beta_occ: Sequence[int],
    beta_virt: Sequence[int],
    n_qubits: int,
) -> ExcitationList:
    """Five nested loop groups: alpha singles, beta singles, mixed doubles, then same-spin doubles."""
    all_q = [*alpha_occ, *alpha_virt, *beta_occ, *beta_virt]
    if len(set(all_q)) != len(all_q) or any(not 0 <= q < n_qubits for q in all_q):
        raise ValueError("orbital index lists must be disjoint and inside the register")
    singles = [(i, j) for i in alpha_occ for j in alpha_virt]
    singles += [(k, l) for k in beta_occ for l in beta_virt]
    doubles, kinds = [], []
    for i in alpha_occ:
        for j in alpha_virt:
            for k in beta_occ:
                for l in beta_virt:
                    doubles.append((i, j, k, l))
                    kinds.append(MIXED)
    for occ, virt, tag in ((alpha_occ, alpha_virt, ALPHA), (beta_occ, beta_virt, BETA)):
        for a, i in enumerate(occ):
            for b, k in enumerate(virt):
                for j in occ[a + 1 :]:
                    for l in virt[b + 1 :]:
                        doubles.append((i, k, j, l))
                        kinds.append(tag)
    return ExcitationList(n_qubits, tuple(singles), tuple(doubles), tuple(kinds))


def build_excitation_list(n_spatial: int, n_alpha: int, n_beta: int) -> ExcitationList:
    """Excitations for the HF determinant filling the lowest orbitals of each spin block."""
    if not (0 <= n_alpha <= n_spatial and 0 <= n_beta <= n_spatial):
        raise ValueError(f"({n_alpha}, {n_beta}) electrons do not fit {n_spatial} orbitals per spin")
    n = n_spatial
    return excitation_list_from_orbitals(
        list(range(n_alpha)),
        list(range(n_alpha, n)),
        [n + i for i in range(n_beta)],
        [n + i for i in range(n_beta, n)],
        2 * n,
    )


def _check_params(ex: ExcitationList, params) -> np.ndarray:
    theta = np.asarray(params, dtype=float).ravel()
    if theta.size != ex.n_params:
        raise ValueError(f"expected {ex.n_params} parameters, got {theta.size}")
    return theta


def qccsd_circuit(ex: ExcitationList, params) -> list[Gate]:
    """One two-qubit exchange gate per single, one four-qubit exchange gate per double."""
    theta = _check_params(ex, params)
    ns = len(ex.singles)
    gates = [Gate.exchange_single(t, o, v) for t, (o, v) in zip(theta[:ns], ex.singles)]
    gates += [Gate.exchange_double(t, *q) for t, q in zip(theta[ns:], ex.doubles)]
    return gates


def _pattern(term: PauliTerm, qubits: Sequence[int]) -> str:
    return "".join(term.letter(q) for q in qubits)


def single_generator(occ: int, virt: int, n_qubits: int) -> PauliSum:
    """JW image of ``a+_virt a_occ - a+_occ a_virt``."""
    op = FermionOperator(n_qubits, [(((virt, 1), (occ, 0)), 1.0), (((occ, 1), (virt, 0)), -1.0)])
    return jordan_wigner(op)


def double_generator(o1: int, v1: int, o2: int, v2: int, n_qubits: int) -> PauliSum:
    """JW image of ``a+_v1 a+_v2 a_o2 a_o1 - h.c.``."""
    op = FermionOperator(
        n_qubits,
        [
            (((v1, 1), (v2, 1), (o2, 0), (o1, 0)), 1.0),
            (((o1, 1), (o2, 1), (v2, 0), (v1, 0)), -1.0),
        ],
    )
    return jordan_wigner(op)


@lru_cache(maxsize=8192)
def _exponential_terms(excitation: tuple[int, ...], n_qubits: int) -> tuple[PauliTerm, ...]:
    """Real-weighted Pauli strings ``w P`` with ``exp(theta G) = prod exp(-i theta/2 w P)``."""
    if len(excitation) == 2:
        gen = single_generator(*excitation, n_qubits)
        order = SINGLE_PATTERN_ORDER
    else:
        gen = double_generator(*excitation, n_qubits)
        order = DOUBLE_PATTERN_ORDER
    terms = []
    for t in gen:
        if abs(t.coeff.real) > 1e-12:
            raise ValueError("anti-Hermitian generator expected")
        # theta * (i b) P = -i theta/2 * (-2 b) P
        terms.append(t.with_coeff(-2.0 * t.coeff.imag))
    rank = {p: r for r, p in enumerate(order)}
    terms.sort(key=lambda t: rank[_pattern(t, excitation)])
    return tuple(terms)


def uccsd_trotter_circuit(ex: ExcitationList, params) -> list[Gate]:
    """First-order Trotter UCCSD: two Pauli exponentials per single, eight per double."""
    theta = _check_params(ex, params)
    gates = []
    for t, exc in zip(theta, ex):
        gates += [Gate.pauli_exp(term, t) for term in _exponential_terms(tuple(exc), ex.n_qubits)]
    return gates


def decompose_exchange_single(theta: float, qubits: Sequence[int]) -> list[Gate]:
    """CNOT, controlled-Ry(2 theta), CNOT."""
    a, b = qubits
    if a == b:
        raise ValueError("exchange gate needs two distinct qubits")
    return [Gate.cnot(a, b), Gate.controlled_ry(2.0 * theta, [b], a), Gate.cnot(a, b)]


def decompose_exchange_double(theta: float, qubits: Sequence[int]) -> list[Gate]:
    """CNOT ladder, X-conjugated triply controlled Ry(2 theta), mirrored ladder."""
    a, b, c, d = qubits
    if len({a, b, c, d}) != 4:
        raise ValueError("double exchange gate needs four distinct qubits")
    ladder = [Gate.cnot(a, c), Gate.cnot(b, d), Gate.cnot(a, b), Gate.x(c), Gate.x(d)]
    return [*ladder, Gate.controlled_ry(2.0 * theta, [b, c, d], a), *reversed(ladder)]


def decompose(gates: Sequence[Gate]) -> list[Gate]:
    """Replace exchange gates by their elementary circuits; other gates pass through."""
    out = []
    for g in gates:
        if g.kind == EXCHANGE_SINGLE:
            out += decompose_exchange_single(EXCHANGE_SINGLE_SIGN * g.angle, g.qubits)
        elif g.kind == EXCHANGE_DOUBLE:
            out += decompose_exchange_double(EXCHANGE_DOUBLE_SIGN * g.angle, g.qubits)
        else:
            out.append(g)
    return out


def gate_counts(ex: ExcitationList) -> dict[str, int]:
    """Parameter, exchange-gate and elementary-gate counts, plus the UCCSD comparison."""
    qccsd = qccsd_circuit(ex, np.zeros(ex.n_params))
    uccsd = uccsd_trotter_circuit(ex, np.zeros(ex.n_params))
    # standard CNOT ladder: 2 (weight - 1) CNOTs per Pauli exponential
    ucc_cnots = sum(2 * (len(g.qubits) - 1) for g in uccsd if g.kind == PAULI_EXP)
    return {
        "params": ex.n_params,
        "exchange_gates": len(qccsd),
        "elementary_gates": len(decompose(qccsd)),
        "elementary_cnots": sum(g.kind == CNOT for g in decompose(qccsd)),
        "uccsd_exponentials": len(uccsd),
        "uccsd_cnots": ucc_cnots,
    }


def strip_parity(term: PauliTerm) -> PauliTerm:
    """Drop Z factors, keeping only the X/Y letters."""
    return PauliTerm(term.n_qubits, term.x, term.z & term.x, term.coeff)


def verify_parity_removal(qubits: Sequence[int], theta: float, n_qubits: int | None = None) -> float:
    """Max-abs gap between the parity-stripped UCCSD factor and the exchange gate at ``-theta``.

    ``qubits`` is ``(i, j)`` with virtual ``i`` above occupied ``j`` for a single,
    or ``(i, j, k, l)`` with virtuals ``i < j``, occupieds ``l < k`` and
    ``j > k > i > l`` for a double.
    """
    qubits = tuple(int(q) for q in qubits)
    n = n_qubits if n_qubits is not None else max(qubits) + 1
    if len(qubits) == 2:
        i, j = qubits
        if not i > j >= 0:
            raise ValueError(f"single excitation needs i > j, got {qubits}")
        excitation = (j, i)
        target = Gate.exchange_single(-theta, j, i)
    elif len(qubits) == 4:
        i, j, k, l = qubits
        if not j > k > i > l >= 0:
            raise ValueError(f"double excitation needs j > k > i > l, got {qubits}")
        excitation = (l, i, k, j)
        target = Gate.exchange_double(-theta, l, i, k, j)
    else:
        raise ValueError("expected 2 or 4 qubit indices")
    if max(qubits) >= n:
        raise ValueError(f"qubits {qubits} exceed register of {n}")
    stripped = [Gate.pauli_exp(strip_parity(t), theta) for t in _exponential_terms(excitation, n)]
    return float(np.abs(circuit_matrix(stripped, n) - target.to_matrix(n)).max())

