"""Molecular integrals: a small STO-3G engine for hydrogen, closed-shell RHF and FCIDUMP I/O."""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import TextIO

import numpy as np
from scipy.special import erf

from qccsd.fermion import MolecularIntegrals

BOHR_ANGSTROM = 0.52917721092
ANGSTROM_TO_BOHR = 1.0 / BOHR_ANGSTROM
ATOMIC_NUMBER = {"H": 1, "He": 2, "Li": 3, "Be": 4, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9}


class ScfError(RuntimeError):
    pass


class FcidumpError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


@dataclass
class Geometry:
    """Atoms as ``(symbol, (x, y, z))`` in Angstrom."""

    atoms: list[tuple[str, tuple[float, float, float]]]
    charge: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        self.atoms = [(sym.capitalize(), tuple(float(c) for c in xyz)) for sym, xyz in self.atoms]
        for sym, _ in self.atoms:
            if sym not in ATOMIC_NUMBER:
                raise ValueError(f"unknown element {sym!r}")
        if self.multiplicity < 1 or (self.n_electrons + self.multiplicity - 1) % 2:
            raise ValueError(
                f"multiplicity {self.multiplicity} inconsistent with {self.n_electrons} electrons"
            )

    @property
    def n_electrons(self) -> int:
        return sum(ATOMIC_NUMBER[s] for s, _ in self.atoms) - self.charge

    @property
    def coords_bohr(self) -> np.ndarray:
        return np.array([xyz for _, xyz in self.atoms]).reshape(-1, 3) * ANGSTROM_TO_BOHR

    @classmethod
    def hydrogen_chain(cls, n_atoms: int, spacing: float) -> Geometry:
        """Linear, equally spaced H chain along z."""
        return cls([("H", (0.0, 0.0, i * spacing)) for i in range(n_atoms)], multiplicity=1 + n_atoms % 2)

    @classmethod
    def from_xyz(cls, text: str) -> Geometry:
        lines = text.splitlines()
        if len(lines) < 2:
            raise ValueError("XYZ input needs a count line and a comment line")
        try:
            count = int(lines[0].split()[0])
        except (IndexError, ValueError):
            raise ValueError("XYZ line 1: expected the atom count") from None
        comment = lines[1]
        charge = int(m.group(1)) if (m := re.search(r"charge\s*=\s*(-?\d+)", comment)) else 0
        mult = int(m.group(1)) if (m := re.search(r"multiplicity\s*=\s*(\d+)", comment)) else None
        atoms = []
        for lineno, line in enumerate(lines[2:], 3):
            parts = line.split()
            if not parts:
                continue
            if len(parts) < 4:
                raise ValueError(f"XYZ line {lineno}: expected 'element x y z'")
            try:
                atoms.append((parts[0], tuple(float(v) for v in parts[1:4])))
            except ValueError:
                raise ValueError(f"XYZ line {lineno}: non-numeric coordinate") from None
        if len(atoms) != count:
            raise ValueError(f"XYZ declares {count} atoms but lists {len(atoms)}")
        if mult is None:
            mult = 1 + (sum(ATOMIC_NUMBER.get(a[0].capitalize(), 0) for a in atoms) - charge) % 2
        return cls(atoms, charge, mult)

    def to_xyz(self, comment: str = "") -> str:
        body = "\n".join(f"{s} {x:.10f} {y:.10f} {z:.10f}" for s, (x, y, z) in self.atoms)
        return f"{len(self.atoms)}\n{comment}\n{body}\n"


@dataclass
class AOIntegrals:
    overlap: np.ndarray
    kinetic: np.ndarray
    nuclear: np.ndarray
    eri: np.ndarray
    nuclear_repulsion: float
    geometry: Geometry | None = field(default=None, repr=False)

    @property
    def hcore(self) -> np.ndarray:
        return self.kinetic + self.nuclear


def load_sto3g_hydrogen() -> tuple[np.ndarray, np.ndarray]:
    data = json.loads(resources.files("qccsd").joinpath("data/sto3g_h.json").read_text())
    return np.array(data["exponents"]), np.array(data["coefficients"])


def boys0(x):
    """Order-zero Boys function ``F0(x) = int_0^1 exp(-x t^2) dt``."""
    x = np.asarray(x, dtype=float)
    small = x < 1e-8
    xs = np.where(small, 1.0, x)
    big = 0.5 * np.sqrt(np.pi / xs) * erf(np.sqrt(xs))
    return np.where(small, 1.0 - x / 3.0 + x * x / 10.0, big)


def sto3g_hydrogen_integrals(geom: Geometry) -> AOIntegrals:
    """Overlap, kinetic, nuclear-attraction and ERI tensors over contracted 1s functions."""
    for sym, _ in geom.atoms:
        if sym != "H":
            raise ValueError(f"built-in STO-3G engine handles hydrogen only, got {sym!r}")
    centers = geom.coords_bohr
    n = len(centers)
    if n == 0:
        raise ValueError("empty geometry")
    dist = np.linalg.norm(centers[:, None] - centers[None], axis=-1)
    if n > 1 and np.min(dist[np.triu_indices(n, 1)]) < 1e-8:
        raise ValueError("coincident nuclei")

    alpha, coef = load_sto3g_hydrogen()
    d = coef * (2.0 * alpha / np.pi) ** 0.75
    # renormalize the contraction exactly
    pp = alpha[:, None] + alpha[None]
    d = d / np.sqrt(np.einsum("i,j,ij->", d, d, (np.pi / pp) ** 1.5))

    k = len(alpha)
    a = np.tile(alpha, n)  # primitive exponents, basis-function major
    c = np.tile(d, n)
    cen = np.repeat(centers, k, axis=0)

    p = a[:, None] + a[None]
    mu = a[:, None] * a[None] / p
    r2 = ((cen[:, None] - cen[None]) ** 2).sum(-1)
    kab = np.exp(-mu * r2)
    cc = c[:, None] * c[None]
    P = (a[:, None, None] * cen[:, None] + a[None, :, None] * cen[None]) / p[..., None]

    s_prim = cc * (np.pi / p) ** 1.5 * kab
    t_prim = s_prim * mu * (3.0 - 2.0 * mu * r2)
    v_prim = np.zeros_like(s_prim)
    for zc in centers:
        v_prim -= cc * (2.0 * np.pi / p) * kab * boys0(p * ((P - zc) ** 2).sum(-1))

    pq = p[:, :, None, None] * p[None, None]
    rpq2 = ((P[:, :, None, None] - P[None, None]) ** 2).sum(-1)
    eri_prim = (
        2.0 * np.pi**2.5 / (pq * np.sqrt(p[:, :, None, None] + p[None, None]))
        * (cc * kab)[:, :, None, None] * (cc * kab)[None, None]
        * boys0(pq / (p[:, :, None, None] + p[None, None]) * rpq2)
    )

    def contract2(m):
        return m.reshape(n, k, n, k).sum(axis=(1, 3))

    eri = eri_prim.reshape(n, k, n, k, n, k, n, k).sum(axis=(1, 3, 5, 7))
    iu = np.triu_indices(n, 1)
    vnn = float(np.sum(1.0 / dist[iu])) if n > 1 else 0.0
    return AOIntegrals(contract2(s_prim), contract2(t_prim), contract2(v_prim), eri, vnn, geom)


def _fix_signs(c: np.ndarray) -> np.ndarray:
    # first non-negligible coefficient of each MO positive
    out = c.copy()
    for j in range(c.shape[1]):
        lead = np.flatnonzero(np.abs(c[:, j]) > 1e-8)
        if lead.size and c[lead[0], j] < 0:
            out[:, j] *= -1
    return out


def _diis_extrapolate(focks: list[np.ndarray], errors: list[np.ndarray]) -> np.ndarray:
    """Pulay extrapolation; drops the oldest vectors while the system is ill-conditioned."""
    while True:
        m = len(focks)
        E = np.array([e.ravel() for e in errors])
        B = np.empty((m + 1, m + 1))
        B[:m, :m] = E @ E.T
        scale = float(np.abs(np.diag(B[:m, :m])).max())
        B[:m, :m] /= scale if scale > 0 else 1.0
        B[m, :m] = B[:m, m] = -1.0
        B[m, m] = 0.0
        if m == 1 or np.linalg.cond(B) < 1e12:
            break
        del focks[0], errors[0]
    rhs = np.zeros(m + 1)
    rhs[m] = -1.0
    w = np.linalg.lstsq(B, rhs, rcond=None)[0][:m]
    return sum(wi * Fi for wi, Fi in zip(w, focks))


def rhf_solve(
    ao: AOIntegrals,
    n_electrons: int,
    max_cycles: int = 200,
    conv_tol: float = 1e-10,
    damping: float = 0.5,
    damp_cycles: int = 5,
    diis_space: int = 8,
) -> MolecularIntegrals:
    """Closed-shell SCF, then transform the AO integrals to the MO basis.

    Convergence is on the max-abs change of the density matrix. The first
    ``damp_cycles`` density updates are mixed 50/50 with the previous density;
    after that, Pulay DIIS over the last ``diis_space`` Fock matrices (0 disables it).
    """
    if n_electrons % 2 or n_electrons <= 0:
        raise ValueError(f"closed-shell RHF needs a positive even electron count, got {n_electrons}")
    S, H, eri = ao.overlap, ao.hcore, ao.eri
    nbf = S.shape[0]
    nocc = n_electrons // 2
    if nocc > nbf:
        raise ValueError(f"{n_electrons} electrons do not fit {nbf} basis functions")
    s, U = np.linalg.eigh(S)
    X = U @ np.diag(s**-0.5) @ U.T

    def fock(P):
        J = np.einsum("pqrs,rs->pq", eri, P)
        K = np.einsum("prqs,rs->pq", eri, P)
        return H + J - 0.5 * K

    def diag(F):
        eps, cp = np.linalg.eigh(X.T @ F @ X)
        return eps, X @ cp

    P = np.zeros_like(S)
    history: list[float] = []
    focks: list[np.ndarray] = []
    errors: list[np.ndarray] = []
    dP = np.inf
    for cycle in range(1, max_cycles + 1):
        F = fock(P)
        history.append(0.5 * float(np.sum(P * (H + F))) + ao.nuclear_repulsion)
        if cycle > damp_cycles and diis_space:
            focks.append(F)
            errors.append(X.T @ (F @ P @ S - S @ P @ F) @ X)
            del focks[:-diis_space], errors[:-diis_space]
            F = _diis_extrapolate(focks, errors)
        _, C = diag(F)
        P_new = 2.0 * C[:, :nocc] @ C[:, :nocc].T
        if cycle <= damp_cycles:
            P_new = damping * P + (1.0 - damping) * P_new
        dP = float(np.abs(P_new - P).max())
        P = P_new
        if dP < conv_tol:
            break
    else:
        raise ScfError(f"SCF did not converge in {max_cycles} cycles (last density change {dP:.3e})")

    F = fock(P)
    energy = 0.5 * float(np.sum(P * (H + F))) + ao.nuclear_repulsion
    history.append(energy)
    eps, C = diag(F)
    C = _fix_signs(C)

    h_mo = C.T @ H @ C
    g_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", C, C, C, C, eri, optimize=True)
    return MolecularIntegrals(
        one_body=h_mo,
        two_body=g_mo,
        n_alpha=nocc,
        n_beta=nocc,
        core_energy=ao.nuclear_repulsion,
        orbital_energies=eps,
        scf_energy=energy,
        metadata={
            "mo_coeff": C,
            "scf_history": history,
            "scf_cycles": cycle,
            "nuclear_repulsion": ao.nuclear_repulsion,
        },
    )


def hydrogen_chain_integrals(n_atoms: int, spacing: float) -> MolecularIntegrals:
    geom = Geometry.hydrogen_chain(n_atoms, spacing)
    return rhf_solve(sto3g_hydrogen_integrals(geom), geom.n_electrons)


def geometry_integrals(geom: Geometry) -> MolecularIntegrals:
    if geom.multiplicity != 1:
        raise ValueError("built-in RHF handles closed-shell singlets only")
    return rhf_solve(sto3g_hydrogen_integrals(geom), geom.n_electrons)


# FCIDUMP


def _header_values(header: str, lineno: int) -> dict[str, list[int]]:
    body = re.sub(r"^\s*&FCI", "", header, flags=re.IGNORECASE)
    body = re.sub(r"(&END|/)\s*$", "", body.strip(), flags=re.IGNORECASE)
    parts = re.split(r"([A-Za-z_][A-Za-z0-9_]*)\s*=", body)
    if parts[0].strip(" ,"):
        raise FcidumpError(f"unexpected header content {parts[0].strip()!r}", lineno)
    out = {}
    for key, raw in zip(parts[1::2], parts[2::2]):
        vals = [v for v in re.split(r"[,\s]+", raw) if v]
        try:
            out[key.upper()] = [int(v) for v in vals]
        except ValueError:
            # non-integer keys (e.g. UHF=.FALSE.) are tolerated and ignored
            out[key.upper()] = []
    return out


def parse_fcidump(source: str | TextIO) -> MolecularIntegrals:
    """Read an FCIDUMP (chemists' notation, 1-based) into MO integrals with full 8-fold symmetry."""
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()
    if not lines or not lines[0].lstrip().upper().startswith("&FCI"):
        raise FcidumpError("file must start with an '&FCI' namelist header", 1)
    header_lines = []
    end = None
    for i, line in enumerate(lines):
        header_lines.append(line)
        stripped = line.strip().upper()
        if stripped.endswith("&END") or stripped.endswith("/"):
            end = i
            break
    if end is None:
        raise FcidumpError("header is not terminated by '/' or '&END'", len(lines))
    hdr = _header_values(" ".join(header_lines), 1)
    for key in ("NORB", "NELEC"):
        if len(hdr.get(key, [])) != 1:
            raise FcidumpError(f"header is missing {key}", 1)
    norb, nelec = hdr["NORB"][0], hdr["NELEC"][0]
    ms2 = hdr.get("MS2", [0])[0] if hdr.get("MS2") else 0
    if norb <= 0 or nelec < 0 or (nelec + ms2) % 2 or abs(ms2) > nelec:
        raise FcidumpError(f"inconsistent header NORB={norb} NELEC={nelec} MS2={ms2}", 1)

    h = np.zeros((norb, norb))
    g = np.zeros((norb, norb, norb, norb))
    eps = np.zeros(norb)
    seen_eps = np.zeros(norb, dtype=bool)
    core = 0.0
    for lineno, line in enumerate(lines[end + 1 :], end + 2):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FcidumpError(f"expected 'value i j k l', got {line.strip()!r}", lineno)
        try:
            val = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(v) for v in parts[1:])
        except ValueError:
            raise FcidumpError(f"non-numeric record {line.strip()!r}", lineno) from None
        if not all(0 <= v <= norb for v in (i, j, k, l)):
            raise FcidumpError(f"index out of range 0..{norb} in {line.strip()!r}", lineno)
        if i and j and k and l:
            i, j, k, l = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in ((i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k)):
                g[a, b, c, d] = g[c, d, a, b] = val
        elif i and j and not k and not l:
            h[i - 1, j - 1] = h[j - 1, i - 1] = val
        elif i and not j and not k and not l:
            eps[i - 1] = val
            seen_eps[i - 1] = True
        elif not (i or j or k or l):
            core = val
        else:
            raise FcidumpError(f"unrecognised index pattern {(i, j, k, l)}", lineno)

    return MolecularIntegrals(
        one_body=h,
        two_body=g,
        n_alpha=(nelec + ms2) // 2,
        n_beta=(nelec - ms2) // 2,
        core_energy=core,
        orbital_energies=eps if seen_eps.all() else None,
        metadata={"orbsym": hdr.get("ORBSYM"), "isym": (hdr.get("ISYM") or [1])[0]},
    )


def read_fcidump(path) -> MolecularIntegrals:
    with open(path) as f:
        return parse_fcidump(f)


def write_fcidump(mi: MolecularIntegrals, stream: TextIO, tol: float = 1e-15) -> None:
    """Write unique-symmetry records with 17 significant digits."""
    n = mi.n_spatial
    orbsym = mi.metadata.get("orbsym") or [1] * n
    stream.write(
        f"&FCI NORB={n},NELEC={mi.n_electrons},MS2={mi.n_alpha - mi.n_beta},\n"
        f" ORBSYM={','.join(str(s) for s in orbsym)},\n ISYM={mi.metadata.get('isym', 1)},\n&END\n"
    )

    def rec(v, i, j, k, l):
        stream.write(f"{v: .16e} {i:4d} {j:4d} {k:4d} {l:4d}\n")

    g = mi.two_body
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    if abs(g[i, j, k, l]) > tol:
                        rec(g[i, j, k, l], i + 1, j + 1, k + 1, l + 1)
    for i in range(n):
        for j in range(i + 1):
            if abs(mi.one_body[i, j]) > tol:
                rec(mi.one_body[i, j], i + 1, j + 1, 0, 0)
    for i in range(n):
        rec(mi.orbital_energies[i], i + 1, 0, 0, 0)
    rec(mi.core_energy, 0, 0, 0, 0)


def fcidump_text(mi: MolecularIntegrals, tol: float = 1e-15) -> str:
    buf = io.StringIO()
    write_fcidump(mi, buf, tol)
    return buf.getvalue()
