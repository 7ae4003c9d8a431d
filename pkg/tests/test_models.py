import math
import warnings

import numpy as np
import pytest

from dtcchain.models import (HARMONIC_ALPHA_N5, CircuitParams, ColdAtomParams, CouplingSet, build_xxz,
                             circuit_couplings, cold_atom_couplings, fermionic_couplings, ghz, mhz,
                             mirror_complete, permutation_hamiltonian)
from dtcchain.spin import HilbertSpace, commutator, product_state, site_reversal, total_sz

SPACE5 = HilbertSpace(5)


def _couplings(n, eta0=0.0, ex=0.0, ey=0.0, ez=0.0, omega=0.0):
    full = lambda v, k: np.full(k, v, dtype=float) if np.isscalar(v) else np.asarray(v, float)
    return CouplingSet(full(eta0, n - 1), full(ex, n - 1), full(ey, n - 1), full(ez, n - 1), full(omega, n))


class TestBuildXXZ:
    def test_pure_field(self):
        h = build_xxz(_couplings(5, omega=1.0))
        w, v = np.linalg.eigh(h.matrix)
        assert w[0] == pytest.approx(-2.5)
        assert abs(v[0, 0]) == pytest.approx(1.0)

    def test_two_site_heisenberg_spectrum(self):
        # singlet/triplet of sigma.sigma are -3/+1, so -1/4 + (1/4) sigma.sigma -> {-1, 0, 0, 0}
        h = build_xxz(_couplings(2, eta0=-0.25, ex=0.25, ey=0.25, ez=0.25))
        assert np.allclose(np.linalg.eigvalsh(h.matrix), [-1, 0, 0, 0], atol=1e-14)

    def test_hermitian(self, rng):
        c = CouplingSet(*(rng.normal(size=4) for _ in range(4)), rng.normal(size=5))
        h = build_xxz(c)
        assert np.max(np.abs(h.matrix - h.matrix.conj().T)) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            build_xxz(_couplings(4), SPACE5)
        with pytest.raises(ValueError):
            CouplingSet(np.zeros(4), np.zeros(4), np.zeros(4), np.zeros(3), np.zeros(5))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            _couplings(3, ez=[1.0, math.nan])


class TestColdAtom:
    def test_substitution_arithmetic(self):
        c = cold_atom_couplings(ColdAtomParams(n_sites=2, g=5.0, kappa=2.0, alpha=[2.16612]))
        # g=5 keeps the warning quiet; rescale to the g=1 values
        assert c.eta0[0] * 5 == pytest.approx(-2.16612, abs=1e-12)
        assert c.etax[0] * 5 == pytest.approx(1.08306, abs=1e-12)
        assert c.etay[0] == c.etax[0]
        assert c.etaz[0] == 0.0

    def test_g_one_warns(self):
        with pytest.warns(UserWarning):
            c = cold_atom_couplings(ColdAtomParams(n_sites=2, g=1.0, kappa=2.0, alpha=[2.16612]))
        assert c.eta0[0] == pytest.approx(-2.16612)
        assert c.etax[0] == pytest.approx(1.08306)

    def test_kappa_two_is_pure_xx(self):
        c = cold_atom_couplings(ColdAtomParams(g=10, kappa=2.0))
        assert np.all(c.etaz == 0.0)

    def test_infinite_kappa_isotropic(self):
        c = cold_atom_couplings(ColdAtomParams(g=10, kappa=math.inf))
        assert np.array_equal(c.etaz, c.etax)
        assert np.all(c.omega == 0)

    def test_default_alpha(self):
        assert ColdAtomParams().alpha == HARMONIC_ALPHA_N5
        assert HARMONIC_ALPHA_N5 == HARMONIC_ALPHA_N5[::-1]

    @pytest.mark.parametrize("kw", [{"g": 0}, {"g": -1}, {"kappa": 0}, {"kappa": -2}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ColdAtomParams(**kw)

    def test_strong_coupling_regime_quiet(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            ColdAtomParams(g=10)


class TestFermionicLimit:
    def test_values(self):
        c = fermionic_couplings(10.0, HARMONIC_ALPHA_N5)
        assert c.etax[0] == pytest.approx(0.108306, abs=1e-15)
        assert c.etaz[0] == c.etax[0] == c.etay[0]
        assert c.eta0[0] == pytest.approx(-0.108306, abs=1e-15)
        assert np.all(c.etaz - c.etax == 0)

    def test_annihilates_polarized(self):
        h = build_xxz(fermionic_couplings(10.0, HARMONIC_ALPHA_N5))
        up = product_state("UUUUU")
        assert np.max(np.abs(h.apply(up))) < 1e-14

    @pytest.mark.parametrize("g", [1.0, 10.0, 100.0])
    def test_matches_permutation_form(self, g):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            a = build_xxz(fermionic_couplings(g, HARMONIC_ALPHA_N5)).matrix
        b = permutation_hamiltonian(g, HARMONIC_ALPHA_N5).matrix
        assert np.max(np.abs(a - b)) < 1e-12


class TestPermutationHamiltonian:
    def test_polarized_zero(self):
        h = permutation_hamiltonian(10.0, HARMONIC_ALPHA_N5)
        assert np.max(np.abs(h.apply(product_state("DDDDD")))) == 0

    def test_two_site_spectrum(self):
        # 1 - P is 2 on the singlet and 0 on the triplet
        a, g = 2.16612, 10.0
        w = np.linalg.eigvalsh(permutation_hamiltonian(g, [a]).matrix)
        assert np.allclose(w, [-2 * a / g, 0, 0, 0], atol=1e-14)

    def test_negative_semidefinite(self):
        w = np.linalg.eigvalsh(permutation_hamiltonian(10.0, HARMONIC_ALPHA_N5).matrix)
        assert w.max() < 1e-12

    def test_swaps_neighbours(self):
        # (1 - P_{12}) |UD...> = |UD...> - |DU...>
        h = permutation_hamiltonian(1.0, [1.0, 0.0])
        out = h.apply(product_state("UDU"))
        exp = -(product_state("UDU").amplitudes - product_state("DUU").amplitudes)
        assert np.allclose(out, exp)

    def test_bad_g(self):
        with pytest.raises(ValueError):
            permutation_hamiltonian(0.0, HARMONIC_ALPHA_N5)


class TestCircuit:
    def test_table_rotating_frame(self):
        c = circuit_couplings(CircuitParams.reference(), "rotating")
        exp = 2 * np.pi * 1e-3 * np.array([168.9, -29.07, -29.07, 168.9])
        assert np.allclose(c.etaz, exp, rtol=0, atol=1e-15)
        assert np.all(c.etax == 0) and np.all(c.etay == 0) and np.all(c.eta0 == 0)
        assert np.all(c.omega == 0)

    def test_mirror_completion(self):
        assert mirror_complete((17.0, 35.6, 43.361), 5) == (17.0, 35.6, 43.361, 35.6, 17.0)
        assert mirror_complete((168.9, -29.07), 4) == (168.9, -29.07, -29.07, 168.9)

    def test_units(self):
        assert ghz(1.0) == pytest.approx(2 * np.pi)
        assert mhz(1000.0) == pytest.approx(2 * np.pi)

    def test_rotating_is_diagonal_and_commutes_with_each_sz(self):
        from dtcchain.spin import embed_single, pauli
        h = build_xxz(circuit_couplings(CircuitParams.reference(), "rotating"))
        assert np.count_nonzero(h.matrix - np.diag(np.diag(h.matrix))) == 0
        for i in range(1, 6):
            assert np.max(np.abs(commutator(h, embed_single(pauli("z"), i, SPACE5)))) < 1e-12

    def test_lab_minus_rotating(self):
        p = CircuitParams.reference()
        diff = build_xxz(circuit_couplings(p, "lab")).matrix - build_xxz(circuit_couplings(p, "rotating")).matrix
        from dtcchain.spin import embed_single, pauli
        field = sum(-0.5 * p.omega_q[i] * embed_single(pauli("z"), i + 1, SPACE5).matrix for i in range(5))
        assert np.max(np.abs(diff - field)) < 1e-12

    def test_symmetric_flag_checked(self):
        p = CircuitParams.reference()
        with pytest.raises(ValueError):
            CircuitParams(p.omega_q, p.jz + [0, 0, 0, 1e-3], p.amplitude, symmetric=True)

    def test_default_amplitude(self):
        p = CircuitParams.reference()
        assert p.amplitude == pytest.approx(100 * 2 * np.pi * 0.1689)
        assert CircuitParams.reference(interacting=False).amplitude == p.amplitude
        assert p.pulse_duration == pytest.approx(np.pi / p.amplitude)

    def test_uncertainties_are_metadata(self):
        p = CircuitParams.reference()
        assert p.uncertainties["omega_ghz"] == (0.048, 0.21, 0.048, 0.21, 0.048)

    @pytest.mark.parametrize("kw", [{"amplitude": 0}, {"epsilon": math.pi}, {"zeta": -1}])
    def test_invalid(self, kw):
        base = dict(omega_q=np.ones(3), jz=np.zeros(2), amplitude=1.0)
        base.update(kw)
        with pytest.raises(ValueError):
            CircuitParams(**base)

    def test_bad_frame(self):
        with pytest.raises(ValueError):
            circuit_couplings(CircuitParams.reference(), "interaction")


BUILDERS = {
    "fermion": lambda: fermionic_couplings(10, HARMONIC_ALPHA_N5),
    "boson": lambda: cold_atom_couplings(ColdAtomParams(g=10, kappa=0.1)),
    "xx": lambda: cold_atom_couplings(ColdAtomParams(g=10, kappa=2)),
    "circuit-rot": lambda: circuit_couplings(CircuitParams.reference(), "rotating"),
    "circuit-lab": lambda: circuit_couplings(CircuitParams.reference(), "lab"),
}


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_magnetization_conserved(name):
    h = build_xxz(BUILDERS[name]())
    assert np.max(np.abs(commutator(h, total_sz(SPACE5)))) < 1e-10


@pytest.mark.parametrize("name", ["fermion", "boson", "xx", "circuit-rot", "circuit-lab"])
def test_parity_symmetry(name):
    h = build_xxz(BUILDERS[name]())
    r = site_reversal(SPACE5)
    assert np.max(np.abs(commutator(h, r))) < 1e-10


def test_asymmetric_couplings_break_parity():
    h = build_xxz(cold_atom_couplings(ColdAtomParams(g=10, kappa=0.1, alpha=[1, 2, 3, 4])))
    assert np.max(np.abs(commutator(h, site_reversal(SPACE5)))) > 1e-3
