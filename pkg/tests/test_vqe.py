import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from oracles import random_integrals
from qccsd.ansatz import MIXED, ExcitationList
from qccsd.exact import fci_ground_state
from qccsd.fermion import MolecularIntegrals, hf_reference, qubit_hamiltonian
from qccsd.integrals import hydrogen_chain_integrals
from qccsd.vqe import QCCSD, UCCSD, VqeError, VqeOptions, VqeProblem, build_problem, gradient, minimize, objective

H2 = hydrogen_chain_integrals(2, 0.735)
H4 = hydrogen_chain_integrals(4, 1.0)
E_FCI_H2 = fci_ground_state(H2)[0].energy
E_FCI_H4 = fci_ground_state(H4)[0].energy


def h2_double_only():
    ex = ExcitationList(4, (), ((0, 1, 2, 3),), (MIXED,))
    return VqeProblem(qubit_hamiltonian(H2), hf_reference(2, 1, 1), ex)


def exact_1d_minimum(problem):
    """E(t) = a + b cos 2t + c sin 2t for a single exchange-gate parameter."""
    ts = np.array([0.0, np.pi / 4, np.pi / 2])
    e = [objective(problem, [t]) for t in ts]
    A = np.column_stack([np.ones(3), np.cos(2 * ts), np.sin(2 * ts)])
    a, b, c = np.linalg.solve(A, e)
    t_star = 0.5 * np.arctan2(-c, -b)
    return t_star, a - np.hypot(b, c)


# objective


@pytest.mark.parametrize("ansatz", [QCCSD, UCCSD])
def test_zero_parameters_give_hf_energy(ansatz):
    for mi in (H2, H4):
        p = build_problem(mi, ansatz=ansatz)
        assert objective(p, np.zeros(p.n_params)) == pytest.approx(mi.scf_energy, abs=1e-8)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.sampled_from([QCCSD, UCCSD]))
def test_variational_bound_at_random_parameters(seed, ansatz):
    rng = np.random.default_rng(seed)
    for mi, e_fci in ((H2, E_FCI_H2), (H4, E_FCI_H4)):
        p = build_problem(mi, ansatz=ansatz)
        assert objective(p, rng.uniform(-np.pi, np.pi, p.n_params)) >= e_fci - 1e-10


def test_h2_double_sweep_reaches_fci():
    p = h2_double_only()
    grid = np.linspace(-np.pi, np.pi, 721)
    energies = np.array([objective(p, [t]) for t in grid])
    assert np.abs(np.diff(energies)).max() < 0.02  # smooth on a half-degree grid
    k = int(np.argmin(energies))
    res = minimize_scalar(lambda t: objective(p, [t]), bounds=(grid[k - 1], grid[k + 1]), method="bounded",
                          options={"xatol": 1e-10})
    assert res.fun == pytest.approx(E_FCI_H2, abs=1e-6)
    assert exact_1d_minimum(p)[1] == pytest.approx(E_FCI_H2, abs=1e-10)


def test_objective_is_deterministic(rng):
    p = build_problem(H4)
    theta = rng.uniform(-1, 1, p.n_params)
    assert objective(p, theta) == objective(p, theta.copy())


def test_leaking_circuit_is_reported():
    ex = ExcitationList(4, ((0, 3),), (), ())  # alpha -> beta breaks the reference sector
    p = VqeProblem(qubit_hamiltonian(H2), hf_reference(2, 1, 1), ex)
    with pytest.raises(VqeError, match="leaked"):
        objective(p, [0.3])


def test_problem_validation():
    ex = ExcitationList(6, (), (), ())
    with pytest.raises(ValueError, match="qubits"):
        VqeProblem(qubit_hamiltonian(H2), 0b0101, ex)
    with pytest.raises(ValueError, match="ansatz"):
        build_problem(H2, ansatz="adapt")


# gradient


def test_gradient_vanishes_at_one_parameter_optimum():
    p = h2_double_only()
    t_star, _ = exact_1d_minimum(p)
    assert abs(gradient(p, [t_star])[0]) < 1e-6


def test_gradient_step_halving_self_consistency(rng):
    p = build_problem(H4)
    theta = rng.uniform(-1.0, 1.0, p.n_params)
    g4 = gradient(p, theta, step=1e-4)
    g5 = gradient(p, theta, step=1e-5)
    big = np.abs(g5) > 1e-3
    assert big.sum() > 5
    np.testing.assert_allclose(g4[big], g5[big], rtol=1e-3)


def test_gradient_matches_analytic_derivative():
    p = h2_double_only()
    ts = np.array([0.0, np.pi / 4, np.pi / 2])
    A = np.column_stack([np.ones(3), np.cos(2 * ts), np.sin(2 * ts)])
    _, b, c = np.linalg.solve(A, [objective(p, [t]) for t in ts])
    for t in (-2.0, 0.3, 1.1):
        assert gradient(p, [t])[0] == pytest.approx(-2 * b * np.sin(2 * t) + 2 * c * np.cos(2 * t), abs=1e-7)


def test_single_gradients_vanish_at_hf_for_canonical_orbitals():
    for mi in (H4, hydrogen_chain_integrals(4, 1.8)):
        p = build_problem(mi)
        # Brillouin: <HF|H|single> = 0, read from the exact sector matrix
        H = p.sector_matrix.toarray()
        i_hf = p.sector.index_of(p.reference)
        for o, v in p.excitations.singles:
            j = p.sector.index_of(p.reference ^ (1 << o) ^ (1 << v))
            assert abs(H[i_hf, j]) < 1e-8
        g = gradient(p, np.zeros(p.n_params))
        assert np.abs(g[: len(p.excitations.singles)]).max() < 1e-6
        assert np.abs(g[len(p.excitations.singles):]).max() > 1e-3


def test_gradient_uses_one_sided_stencil_at_bounds():
    p = h2_double_only()
    t = np.pi - 5e-5
    g = gradient(p, [t])[0]
    one_sided = (objective(p, [t]) - objective(p, [t - 1e-4])) / 1e-4
    assert g == one_sided


# minimize


def test_h2_converges_to_fci_from_zero():
    res = minimize(build_problem(H2))
    assert res.converged
    assert res.energy == pytest.approx(E_FCI_H2, abs=1e-6)


def test_zero_excitation_problem_returns_hf_immediately(rng):
    h, g = random_integrals(2, rng)
    mi = MolecularIntegrals(h, g, 2, 2)
    res = minimize(build_problem(mi))
    assert res.iterations == 0 and res.converged
    assert res.energy == pytest.approx(objective(build_problem(mi), []), abs=0)


@pytest.mark.parametrize("ansatz", [QCCSD, UCCSD])
def test_h4_equilibrium_within_two_millihartree(ansatz):
    p = build_problem(H4, ansatz=ansatz)
    res = minimize(p)
    assert res.converged
    assert abs(res.energy - E_FCI_H4) <= 2e-3
    assert res.energy >= E_FCI_H4 - 1e-10
    assert res.energy <= H4.scf_energy + 1e-12
    assert res.energy == pytest.approx(objective(p, res.parameters), abs=1e-12)
    assert np.all(np.diff(res.history) <= 1e-12)
    assert len(res.history) == res.iterations + 1
    assert res.iterations <= 500
    assert res.n_evals >= res.iterations


def test_minimize_is_bit_reproducible():
    a = minimize(build_problem(H4))
    b = minimize(build_problem(H4))
    assert a.energy == b.energy and a.iterations == b.iterations
    np.testing.assert_array_equal(a.parameters, b.parameters)
    assert a.history == b.history


def test_iteration_cap_returns_best_point_unconverged():
    res = minimize(build_problem(H4), options=VqeOptions(max_iters=2))
    assert res.iterations == 2 and not res.converged
    assert res.energy == min(res.history)


def test_stopping_rule_uses_energy_change():
    res = minimize(build_problem(H4), options=VqeOptions(ftol=1e-6))
    assert res.converged
    assert abs(res.history[-1] - res.history[-2]) < 1e-6 or "gradient" in res.message
    assert all(abs(a - b) >= 1e-6 for a, b in zip(res.history[:-2], res.history[1:-1]))


def test_parameters_respect_bounds():
    opts = VqeOptions(bounds=(-0.05, 0.05))
    res = minimize(build_problem(H4), options=opts)
    assert np.all(np.abs(res.parameters) <= 0.05)
    assert res.energy <= H4.scf_energy + 1e-12


def test_initial_point_validation():
    p = build_problem(H2)
    with pytest.raises(ValueError, match="expected 3"):
        minimize(p, np.zeros(2))
    with pytest.raises(ValueError, match="bounds"):
        minimize(p, [4.0, 0.0, 0.0])


def test_non_finite_objective_aborts(monkeypatch):
    import qccsd.vqe as vqe_mod

    monkeypatch.setattr(vqe_mod, "objective", lambda problem, theta: float("nan"))
    with pytest.raises(VqeError, match="nan"):
        minimize(build_problem(H2))


def test_trace_csv():
    res = minimize(build_problem(H2))
    buf = io.StringIO()
    res.write_trace(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "iteration,energy,grad_norm,evals"
    assert len(lines) == res.iterations + 2
    k, e, gn, ne = lines[-1].split(",")
    assert int(k) == res.iterations and float(e) == pytest.approx(res.energy, abs=1e-11)
