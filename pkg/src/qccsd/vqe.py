"""Variational loop: energy objective, finite-difference gradient, box-constrained quasi-Newton."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TextIO

import numpy as np

from qccsd.ansatz import ExcitationList, build_excitation_list, qccsd_circuit, uccsd_trotter_circuit
from qccsd.exact import SectorBasis, sector_hamiltonian
from qccsd.fermion import ActiveSpace, MolecularIntegrals, active_problem
from qccsd.pauli import PauliSum
from qccsd.sim import Gate, StateVector, prepare_basis_state, run_circuit

log = logging.getLogger(__name__)

QCCSD = "qccsd"
UCCSD = "uccsd"
ANSATZE = (QCCSD, UCCSD)


class VqeError(RuntimeError):
    pass


@dataclass
class VqeProblem:
    """Hamiltonian, reference determinant and ansatz for one VQE run.

    Energies are evaluated with the Hamiltonian projected onto the reference's
    (N_alpha, N_beta) sector; both ansaetze keep the state inside it.
    """

    hamiltonian: PauliSum
    reference: int
    excitations: ExcitationList
    ansatz: str = QCCSD

    def __post_init__(self):
        if self.ansatz not in ANSATZE:
            raise ValueError(f"unknown ansatz {self.ansatz!r}; expected one of {ANSATZE}")
        n = self.hamiltonian.n_qubits
        if n % 2 or n != self.excitations.n_qubits:
            raise ValueError(
                f"Hamiltonian has {n} qubits but the excitation list spans {self.excitations.n_qubits}"
            )
        if not 0 <= self.reference < 1 << n:
            raise ValueError("reference bitmask out of range")

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    @property
    def n_spatial(self) -> int:
        return self.n_qubits // 2

    @property
    def n_params(self) -> int:
        return self.excitations.n_params

    @cached_property
    def sector(self) -> SectorBasis:
        block = (1 << self.n_spatial) - 1
        return SectorBasis(
            self.n_spatial,
            bin(self.reference & block).count("1"),
            bin(self.reference >> self.n_spatial).count("1"),
        )

    @cached_property
    def sector_matrix(self):
        return sector_hamiltonian(self.hamiltonian, self.sector)

    def circuit(self, theta) -> list[Gate]:
        if self.ansatz == QCCSD:
            return qccsd_circuit(self.excitations, theta)
        return uccsd_trotter_circuit(self.excitations, theta)

    def state(self, theta) -> StateVector:
        return run_circuit(prepare_basis_state(self.n_qubits, self.reference), self.circuit(theta))


def objective(problem: VqeProblem, theta) -> float:
    """``<phi(theta)|H|phi(theta)>`` in Hartree."""
    amps = problem.state(theta).amplitudes[problem.sector.states]
    leak = 1.0 - float(np.vdot(amps, amps).real)
    if abs(leak) > 1e-10:
        raise VqeError(f"ansatz state leaked {leak:.3g} probability out of the reference sector")
    return float(np.vdot(amps, problem.sector_matrix @ amps).real)


def gradient(
    problem: VqeProblem,
    theta,
    step: float = 1e-4,
    bounds: tuple[float, float] = (-math.pi, math.pi),
    f0: float | None = None,
) -> np.ndarray:
    """Central differences; one-sided where a stencil point would leave the box."""
    theta = np.asarray(theta, dtype=float)
    lo, hi = bounds
    grad = np.empty_like(theta)
    for k in range(theta.size):
        up, dn = theta.copy(), theta.copy()
        up[k] += step
        dn[k] -= step
        if up[k] > hi:
            f0 = objective(problem, theta) if f0 is None else f0
            grad[k] = (f0 - objective(problem, dn)) / step
        elif dn[k] < lo:
            f0 = objective(problem, theta) if f0 is None else f0
            grad[k] = (objective(problem, up) - f0) / step
        else:
            grad[k] = (objective(problem, up) - objective(problem, dn)) / (2 * step)
    return grad


@dataclass
class VqeOptions:
    max_iters: int = 500
    ftol: float = 1e-6  # Hartree, |E_k - E_{k+1}| between accepted iterates
    gtol: float = 1e-9  # projected-gradient infinity norm
    bounds: tuple[float, float] = (-math.pi, math.pi)
    fd_step: float = 1e-4
    armijo: float = 1e-4
    max_backtracks: int = 40


@dataclass
class VqeResult:
    energy: float
    parameters: np.ndarray
    iterations: int
    converged: bool
    history: list[float]
    n_evals: int
    grad_norms: list[float] = field(default_factory=list)
    evals_at: list[int] = field(default_factory=list)
    message: str = ""

    def write_trace(self, stream: TextIO) -> None:
        stream.write("iteration,energy,grad_norm,evals\n")
        for k, (e, gn, ne) in enumerate(zip(self.history, self.grad_norms, self.evals_at)):
            stream.write(f"{k},{e:.12f},{gn:.6e},{ne}\n")


def minimize(problem: VqeProblem, theta0=None, options: VqeOptions | None = None) -> VqeResult:
    """Projected BFGS with Armijo backtracking on the box.

    Stops when an accepted step lowers the energy by less than ``ftol`` or after
    ``max_iters`` accepted steps (then returns the best point, unconverged).
    """
    opts = options or VqeOptions()
    lo, hi = opts.bounds
    n = problem.n_params
    x = np.zeros(n) if theta0 is None else np.array(theta0, dtype=float).ravel()
    if x.size != n:
        raise ValueError(f"expected {n} initial parameters, got {x.size}")
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError("initial parameters lie outside the bounds")

    evals = 0

    def f(t):
        nonlocal evals
        evals += 1
        val = objective(problem, t)
        if not math.isfinite(val):
            raise VqeError(f"objective returned {val!r} at parameters {t.tolist()}")
        return val

    def grad(t, ft):
        nonlocal evals
        g = gradient(problem, t, opts.fd_step, opts.bounds, f0=ft)
        evals += 2 * n
        return g

    fx = f(x)
    history = [fx]
    if n == 0:
        return VqeResult(fx, x, 0, True, history, evals, [0.0], [evals], "no excitations")

    g = grad(x, fx)
    grad_norms = [float(np.linalg.norm(g))]
    evals_at = [evals]
    hinv = np.eye(n)
    fresh = True  # hinv is the identity
    it = 0
    converged = False
    message = "iteration limit reached"
    while it < opts.max_iters:
        pinned = ((x <= lo) & (g > 0)) | ((x >= hi) & (g < 0))
        pg = np.where(pinned, 0.0, g)
        if np.abs(pg).max() < opts.gtol:
            converged, message = True, "projected gradient below gtol"
            break
        d = -(hinv @ pg)
        d[pinned] = 0.0
        if d @ pg >= 0:
            hinv, fresh = np.eye(n), True
            d = -pg
        alpha = 1.0
        for _ in range(opts.max_backtracks):
            x_new = np.clip(x + alpha * d, lo, hi)
            f_new = f(x_new)
            if f_new <= fx + opts.armijo * (g @ (x_new - x)):
                break
            alpha *= 0.5
        else:
            if not fresh:
                hinv, fresh = np.eye(n), True
                continue
            message = "line search failed along the projected gradient"
            converged = bool(np.abs(pg).max() < 1e-6)
            break

        g_new = grad(x_new, f_new)
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if fresh:
                hinv = np.eye(n) * (sy / float(y @ y))
            rho = 1.0 / sy
            v = np.eye(n) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
            fresh = False
        drop = fx - f_new
        x, fx, g = x_new, f_new, g_new
        it += 1
        history.append(fx)
        grad_norms.append(float(np.linalg.norm(g)))
        evals_at.append(evals)
        log.debug("iter %d  E=%.10f  dE=%.3e  |g|=%.3e", it, fx, drop, grad_norms[-1])
        if abs(drop) < opts.ftol:
            converged, message = True, f"energy change {drop:.3e} below ftol"
            break
    return VqeResult(fx, x, it, converged, history, evals, grad_norms, evals_at, message)


def build_problem(
    mi: MolecularIntegrals, active: ActiveSpace | None = None, ansatz: str = QCCSD
) -> VqeProblem:
    act, ham, hf = active_problem(mi, active)
    ex = build_excitation_list(act.n_spatial, act.n_alpha, act.n_beta)
    return VqeProblem(ham, hf, ex, ansatz)
