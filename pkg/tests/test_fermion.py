import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (
    annihilator,
    creator,
    ladder_product,
    number_operator,
    random_integrals,
    sector_mask,
    spin_orbital_hamiltonian,
)
from qccsd.exact import SectorBasis, sector_ground_state
from qccsd.fermion import (
    ActiveSpace,
    FermionOperator,
    MolecularIntegrals,
    build_hamiltonian,
    freeze_core,
    hf_reference,
    jordan_wigner,
    qubit_hamiltonian,
)
from qccsd.integrals import hydrogen_chain_integrals
from qccsd.pauli import expectation
from qccsd.sim import prepare_basis_state

ladders = st.tuples(st.integers(0, 3), st.integers(0, 1))


def sector_energy(mi, active=None):
    ham = qubit_hamiltonian(mi, active)
    m = ham.n_qubits // 2
    na = mi.n_alpha - (active.n_frozen if active else 0)
    nb = mi.n_beta - (active.n_frozen if active else 0)
    return sector_ground_state(ham, SectorBasis(m, na, nb)).energy


# Jordan-Wigner


def test_number_operator_image():
    op = jordan_wigner(FermionOperator.from_term(1, [(0, 1), (0, 0)]))
    assert op.coefficient("I") == pytest.approx(0.5)
    assert op.coefficient("Z0") == pytest.approx(-0.5)
    assert len(op) == 2


def test_adjacent_single_generator_has_no_z_string():
    op = FermionOperator(2, [(((1, 1), (0, 0)), 1.0), (((0, 1), (1, 0)), -1.0)])
    img = jordan_wigner(op)
    assert len(img) == 2
    assert img.coefficient("Y0 X1") == pytest.approx(0.5j)
    assert img.coefficient("X0 Y1") == pytest.approx(-0.5j)


def test_single_generator_z_string_spans_interior_qubits():
    op = FermionOperator(4, [(((3, 1), (0, 0)), 1.0), (((0, 1), (3, 0)), -1.0)])
    labels = {t.label() for t in jordan_wigner(op)}
    assert labels == {"Y0 Z1 Z2 X3", "X0 Z1 Z2 Y3"}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_anticommutation_relations(n):
    a = [jordan_wigner(FermionOperator.from_term(n, [(j, 0)])).to_matrix() for j in range(n)]
    ad = [jordan_wigner(FermionOperator.from_term(n, [(j, 1)])).to_matrix() for j in range(n)]
    eye = np.eye(1 << n)
    for i in range(n):
        for j in range(n):
            np.testing.assert_allclose(a[i] @ ad[j] + ad[j] @ a[i], eye * (i == j), atol=1e-12)
            np.testing.assert_allclose(a[i] @ a[j] + a[j] @ a[i], 0, atol=1e-12)


def test_ladder_images_match_kron_oracle():
    for n in (1, 3, 4):
        for j in range(n):
            np.testing.assert_allclose(
                jordan_wigner(FermionOperator.from_term(n, [(j, 0)])).to_matrix(), annihilator(j, n), atol=1e-15
            )
            np.testing.assert_allclose(
                jordan_wigner(FermionOperator.from_term(n, [(j, 1)])).to_matrix(), creator(j, n), atol=1e-15
            )


@given(st.lists(st.tuples(st.lists(ladders, max_size=4), st.complex_numbers(max_magnitude=2)), max_size=4))
def test_normal_ordering_and_mapping_match_dense_products(terms):
    op = FermionOperator(4, terms)
    ref = sum((c * ladder_product(ops, 4) for ops, c in terms), np.zeros((16, 16), complex))
    np.testing.assert_allclose(jordan_wigner(op).to_matrix(), ref, atol=1e-11)


@given(st.lists(st.tuples(st.lists(ladders, min_size=1, max_size=4), st.complex_numbers(max_magnitude=2)), max_size=4))
def test_canonical_order_invariant(terms):
    op = FermionOperator(4, terms)
    for key, _ in op:
        daggers = [d for _, d in key]
        assert daggers == sorted(daggers, reverse=True)
        for group in (1, 0):
            modes = [m for m, d in key if d == group]
            assert modes == sorted(modes, reverse=True) and len(set(modes)) == len(modes)


@given(st.lists(st.tuples(st.lists(ladders, max_size=4), st.complex_numbers(max_magnitude=2)), max_size=4))
def test_hermitian_operator_maps_to_real_hermitian_sum(terms):
    op = FermionOperator(4, terms)
    herm = op + op.adjoint()
    img = jordan_wigner(herm)
    assert img.max_imag() < 1e-12
    m = img.to_matrix()
    np.testing.assert_allclose(m, m.conj().T, atol=1e-12)


def test_mode_out_of_range():
    with pytest.raises(ValueError, match="out of range"):
        FermionOperator.from_term(2, [(2, 1)])


# Hamiltonian assembly


def test_one_orbital_toy_hamiltonian():
    mi = MolecularIntegrals(np.array([[-1.0]]), np.zeros((1, 1, 1, 1)), 1, 0, core_energy=0.3)
    ham = build_hamiltonian(mi)
    assert dict(ham.terms) == {(): 0.3, ((0, 1), (0, 0)): -1.0, ((1, 1), (1, 0)): -1.0}


@pytest.mark.parametrize("m", [2, 3])
def test_qubit_hamiltonian_matches_dense_second_quantization(m, rng):
    h, g = random_integrals(m, rng)
    mi = MolecularIntegrals(h, g, 1, 1, core_energy=0.7)
    np.testing.assert_allclose(
        qubit_hamiltonian(mi).to_matrix(), spin_orbital_hamiltonian(h, g, 0.7), atol=1e-11
    )


def test_hamiltonian_conserves_particle_number_and_sz(rng):
    h, g = random_integrals(3, rng)
    H = qubit_hamiltonian(MolecularIntegrals(h, g, 2, 1)).to_matrix()
    N = number_operator(6)
    Sz = sum(creator(j, 6) @ annihilator(j, 6) * (1 if j < 3 else -1) for j in range(6))
    assert np.abs(H @ N - N @ H).max() < 1e-12
    assert np.abs(H @ Sz - Sz @ H).max() < 1e-12


def test_h2_hamiltonian_is_real_and_hermitian():
    ham = qubit_hamiltonian(hydrogen_chain_integrals(2, 0.735))
    assert ham.n_qubits == 4 and ham.max_imag() == 0.0
    m = ham.to_matrix()
    np.testing.assert_allclose(m, m.conj().T, atol=1e-14)


def test_ground_energy_invariant_under_orbital_relabelling(rng):
    h, g = random_integrals(3, rng)
    e0 = sector_energy(MolecularIntegrals(h, g, 2, 2))
    perm = np.array([2, 0, 1])
    hp = h[np.ix_(perm, perm)]
    gp = g[np.ix_(perm, perm, perm, perm)]
    assert sector_energy(MolecularIntegrals(hp, gp, 2, 2)) == pytest.approx(e0, abs=1e-10)


def test_two_body_symmetry_partners_give_identical_operator(rng):
    h, g = random_integrals(2, rng)
    ref = qubit_hamiltonian(MolecularIntegrals(h, g, 1, 1))
    for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0)):
        other = qubit_hamiltonian(MolecularIntegrals(h, g.transpose(perm).copy(), 1, 1))
        assert np.abs((ref - other).to_matrix()).max() < 1e-12


@pytest.mark.parametrize("n_atoms,spacing", [(2, 0.735), (4, 1.0), (6, 1.2), (4, 2.0)])
def test_hf_expectation_equals_rhf_energy(n_atoms, spacing):
    mi = hydrogen_chain_integrals(n_atoms, spacing)
    ham = qubit_hamiltonian(mi)
    psi = prepare_basis_state(ham.n_qubits, hf_reference(mi.n_spatial, mi.n_alpha, mi.n_beta))
    assert expectation(ham, psi) == pytest.approx(mi.scf_energy, abs=1e-8)


# frozen core


def test_no_frozen_no_removed_is_identity(rng):
    h, g = random_integrals(3, rng)
    mi = MolecularIntegrals(h, g, 2, 2)
    assert freeze_core(mi, ActiveSpace()) is mi


@pytest.mark.parametrize("frozen_index", [0, 2])
def test_frozen_core_matches_constrained_full_space_fci(frozen_index, rng):
    """Active-space FCI equals full-space FCI restricted to determinants with the core doubly occupied."""
    h, g = random_integrals(3, rng)
    eps = np.array([-1.0, 0.0, 1.0])
    eps = np.roll(eps, frozen_index)  # the frozen orbital is the one with the lowest energy
    mi = MolecularIntegrals(h, g, 2, 2, core_energy=0.25, orbital_energies=eps)
    act = freeze_core(mi, ActiveSpace(n_frozen=1))
    assert act.n_spatial == 2 and (act.n_alpha, act.n_beta) == (1, 1)
    assert act.metadata["active_orbitals"] == [q for q in range(3) if q != frozen_index]

    H = spin_orbital_hamiltonian(h, g, 0.25)
    idx = np.arange(64)
    core = (1 << frozen_index) | (1 << (frozen_index + 3))
    keep = sector_mask(3, 2, 2) & ((idx & core) == core)
    e_ref = np.linalg.eigvalsh(H[np.ix_(keep, keep)])[0]
    assert sector_energy(mi, ActiveSpace(n_frozen=1)) == pytest.approx(e_ref, abs=1e-10)


def test_frozen_core_is_exact_when_core_is_decoupled(rng):
    m = 3
    h = rng.normal(size=(m, m))
    h = 0.5 * (h + h.T)
    h[0, :] = h[:, 0] = 0.0
    h[0, 0] = -20.0
    B = rng.normal(size=(m, m, 3)) * 0.3
    B = 0.5 * (B + B.transpose(1, 0, 2))
    B[0, 1:] = B[1:, 0] = 0.0
    g = np.einsum("pqk,rsk->pqrs", B, B)
    mi = MolecularIntegrals(h, g, 2, 2)
    assert sector_energy(mi, ActiveSpace(n_frozen=1)) == pytest.approx(sector_energy(mi), abs=1e-10)


def test_beh2_sized_active_space_gives_ten_qubits(rng):
    h, g = random_integrals(7, rng, scale=0.1)
    mi = MolecularIntegrals(h, g, 3, 3, orbital_energies=np.arange(7.0))
    act = freeze_core(mi, ActiveSpace(n_frozen=1, n_removed=1))
    assert act.n_spatial == 5 and (act.n_alpha, act.n_beta) == (2, 2)
    assert qubit_hamiltonian(act).n_qubits == 10


def test_active_space_validation():
    with pytest.raises(ValueError):
        ActiveSpace(3, 0).validate(4, 2, 2)
    with pytest.raises(ValueError):
        ActiveSpace(2, 2).validate(4, 2, 2)
    with pytest.raises(ValueError):
        ActiveSpace(0, 3).validate(4, 2, 2)


# HF reference


@pytest.mark.parametrize(
    "n_spatial,n_alpha,n_beta,qubits",
    [(2, 1, 1, {0, 2}), (4, 2, 2, {0, 1, 4, 5}), (5, 2, 2, {0, 1, 5, 6})],
)
def test_hf_reference(n_spatial, n_alpha, n_beta, qubits):
    assert hf_reference(n_spatial, n_alpha, n_beta) == sum(1 << q for q in qubits)


def test_hf_reference_too_many_electrons():
    with pytest.raises(ValueError):
        hf_reference(2, 3, 1)
