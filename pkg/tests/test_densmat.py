import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from purigate.densmat import (
    CNOT,
    SWAP,
    DensityMatrix,
    InvariantError,
    StateVector,
    UnitaryGate,
    apply_unitary,
    bell_phi,
    check_state,
    ket,
    make_pure,
    maximally_mixed,
    overlap,
    partial_trace,
    partial_transpose,
    tensor,
)
from purigate.linalg import hermitian_eigvals, hermitian_min_eig
from purigate.noise import werner
from oracles import min_eig_bisection, random_density, random_unitary

PLUS = StateVector(np.array([1, 1]) / np.sqrt(2))


def dm(rng, n):
    return DensityMatrix(random_density(rng, n))


class TestConstruction:
    def test_make_pure_basis(self):
        np.testing.assert_array_equal(make_pure(ket("0")).matrix, np.diag([1, 0]))

    def test_make_pure_plus(self):
        np.testing.assert_allclose(make_pure(PLUS).matrix, np.full((2, 2), 0.5), atol=1e-15)

    def test_make_pure_bell(self):
        expected = np.zeros((4, 4))
        expected[np.ix_([0, 3], [0, 3])] = 0.5
        np.testing.assert_allclose(make_pure(bell_phi()).matrix, expected, atol=1e-15)

    def test_bell_amplitudes(self):
        np.testing.assert_allclose(bell_phi().amplitudes, [2**-0.5, 0, 0, 2**-0.5])

    def test_unnormalized_vector_rejected(self):
        with pytest.raises(InvariantError):
            StateVector(np.array([1.0, 1.0]))

    @pytest.mark.parametrize("m, msg", [
        (np.diag([0.5, 0.6]), "trace"),
        (np.array([[0.5, 0.1], [0.3, 0.5]]), "Hermitian"),
        (np.diag([1.2, -0.2]), "positive"),
    ])
    def test_invalid_density_rejected(self, m, msg):
        with pytest.raises(InvariantError, match=msg):
            DensityMatrix(m)

    def test_non_unitary_gate_rejected(self):
        with pytest.raises(InvariantError):
            UnitaryGate(np.array([[1, 1], [0, 1]]))

    def test_immutable(self):
        rho = make_pure(ket("0"))
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 0.0

    def test_too_many_qubits(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(128) / 128)


class TestTensor:
    def test_projector(self):
        out = tensor(make_pure(ket("0")), make_pure(ket("1")))
        np.testing.assert_array_equal(out.matrix, make_pure(ket("01")).matrix)

    def test_trace_and_psd_of_werner_pair(self):
        out = tensor(werner(0.3), werner(0.8))
        assert np.trace(out.matrix).real == pytest.approx(1.0, abs=1e-12)
        assert hermitian_min_eig(out.matrix) >= -1e-12


class TestApplyUnitary:
    def test_cnot_flips(self):
        out = apply_unitary(make_pure(ket("10")), CNOT, [0, 1])
        np.testing.assert_allclose(out.matrix, make_pure(ket("11")).matrix, atol=1e-15)

    def test_reversed_targets(self):
        # control on qubit 1
        out = apply_unitary(make_pure(ket("01")), CNOT, [1, 0])
        np.testing.assert_allclose(out.matrix, make_pure(ket("11")).matrix, atol=1e-15)

    def test_nonadjacent_targets(self):
        out = apply_unitary(make_pure(ket("100")), CNOT, [0, 2])
        np.testing.assert_allclose(out.matrix, make_pure(ket("101")).matrix, atol=1e-15)

    def test_maximally_mixed_invariant(self, rng):
        u = UnitaryGate(random_unitary(rng, 4))
        out = apply_unitary(maximally_mixed(3), u, [2, 0])
        np.testing.assert_allclose(out.matrix, np.eye(8) / 8, atol=1e-14)

    def test_involution(self, rng):
        rho = dm(rng, 3)
        twice = apply_unitary(apply_unitary(rho, CNOT, [1, 2]), CNOT, [1, 2])
        np.testing.assert_allclose(twice.matrix, rho.matrix, atol=1e-12)

    def test_bad_targets(self):
        rho = maximally_mixed(2)
        with pytest.raises(IndexError):
            apply_unitary(rho, CNOT, [0, 2])
        with pytest.raises(ValueError, match="duplicate"):
            apply_unitary(rho, CNOT, [1, 1])
        with pytest.raises(ValueError, match="arity"):
            apply_unitary(rho, CNOT, [0])


class TestPartialTrace:
    def test_bell_marginal(self):
        out = partial_trace(make_pure(bell_phi()), [0])
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-15)

    def test_product_state(self, rng):
        a, b = dm(rng, 2), dm(rng, 1)
        np.testing.assert_allclose(partial_trace(tensor(a, b), [0, 1]).matrix, a.matrix, atol=1e-12)
        np.testing.assert_allclose(partial_trace(tensor(a, b), [2]).matrix, b.matrix, atol=1e-12)

    def test_keep_order_is_respected(self, rng):
        a, b = dm(rng, 1), dm(rng, 1)
        swapped = partial_trace(tensor(a, b), [1, 0])
        np.testing.assert_allclose(swapped.matrix, np.kron(b.matrix, a.matrix), atol=1e-12)

    @pytest.mark.parametrize("x", [-1 / 3, 0.0, 0.4, 1.0])
    def test_werner_marginals(self, x):
        m = werner(x).matrix
        # direct oracle: sum the 2x2 blocks by hand
        direct_first = np.array([[m[0, 0] + m[1, 1], m[0, 2] + m[1, 3]],
                                 [m[2, 0] + m[3, 1], m[2, 2] + m[3, 3]]])
        np.testing.assert_allclose(direct_first, np.eye(2) / 2, atol=1e-15)
        for keep in ([0], [1]):
            np.testing.assert_allclose(partial_trace(werner(x), keep).matrix, np.eye(2) / 2, atol=1e-15)

    def test_empty_keep_rejected(self):
        with pytest.raises(ValueError):
            partial_trace(maximally_mixed(2), [])

    def test_commutes_with_swap_relabeling(self, rng):
        rho = dm(rng, 3)
        swapped = apply_unitary(rho, SWAP, [0, 2])
        np.testing.assert_allclose(partial_trace(swapped, [2]).matrix,
                                   partial_trace(rho, [0]).matrix, atol=1e-12)
        np.testing.assert_allclose(partial_trace(swapped, [0, 1]).matrix,
                                   partial_trace(rho, [2, 1]).matrix, atol=1e-12)


class TestPartialTranspose:
    def test_product_state_is_ppt(self, rng):
        pt = partial_transpose(tensor(dm(rng, 1), dm(rng, 1)), [0])
        assert hermitian_min_eig(pt) >= -1e-10

    def test_bell_min_eigenvalue(self):
        pt = partial_transpose(make_pure(bell_phi()), [1])
        assert min_eig_bisection(pt) == pytest.approx(-0.5, abs=1e-10)
        assert hermitian_min_eig(pt) == pytest.approx(-0.5, abs=1e-12)

    def test_werner_boundary(self):
        pt = partial_transpose(werner(1 / 3), [0])
        assert min_eig_bisection(pt) == pytest.approx(0.0, abs=1e-10)
        assert hermitian_min_eig(pt) == pytest.approx(0.0, abs=1e-10)

    def test_involution_and_trace(self, rng):
        rho = dm(rng, 3)
        pt = partial_transpose(rho, [0, 2])
        assert np.trace(pt) == pytest.approx(1.0)
        np.testing.assert_allclose(pt, pt.conj().T, atol=1e-15)
        np.testing.assert_array_equal(partial_transpose(pt, [0, 2]), rho.matrix)


class TestOverlap:
    def test_self_overlap(self):
        assert overlap(make_pure(bell_phi()), bell_phi()) == pytest.approx(1.0)

    def test_maximally_mixed(self):
        assert overlap(maximally_mixed(2), bell_phi()) == pytest.approx(0.25)

    @pytest.mark.parametrize("x", [-0.2, 0.0, 0.5, 0.9])
    def test_werner_fidelity(self, x):
        phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        direct = (phi.conj() @ werner(x).matrix @ phi).real
        assert overlap(werner(x), bell_phi()) == pytest.approx(direct, abs=1e-15)
        assert overlap(werner(x), bell_phi()) == pytest.approx(x + (1 - x) / 4, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            overlap(maximally_mixed(3), bell_phi())


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_unitary_preserves_spectrum(seed, n):
    rng = np.random.default_rng(seed)
    rho = dm(rng, n)
    targets = rng.choice(n, size=2, replace=False)
    out = apply_unitary(rho, UnitaryGate(random_unitary(rng, 4)), targets)
    check_state(out.matrix)
    np.testing.assert_allclose(hermitian_eigvals(out.matrix), hermitian_eigvals(rho.matrix), atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_partial_trace_of_product(seed, na, nb):
    rng = np.random.default_rng(seed)
    a, b = dm(rng, na), dm(rng, nb)
    out = partial_trace(tensor(a, b), list(range(na)))
    np.testing.assert_allclose(out.matrix, a.matrix, atol=1e-12)
