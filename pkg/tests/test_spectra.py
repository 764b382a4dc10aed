from __future__ import annotations

import numpy as np
import pytest

from hopfjordan.core.errors import (
    ContractViolationError,
    ShapeError,
    SingularInputError,
    UnsupportedSizeError,
)
from hopfjordan.spectra import (
    Tolerance,
    commutant_preserving_root,
    commute_check,
    eigenvalues,
    invariance_check,
    is_linear_contraction,
    max_norm,
    nilpotent_mth_root,
    orbit_budget,
    orbit_converges,
    principal_root,
    root_decomposition,
)

J2 = np.array([[0, 1], [0, 0]], dtype=np.complex128)


def _close(A, B, eps=1e-10) -> bool:
    return max_norm(np.asarray(A) - np.asarray(B)) <= eps


def test_eigenvalues_examples() -> None:
    (value, mult), = eigenvalues(np.eye(2))
    assert mult == 2 and abs(value - 1) < 1e-12

    pairs = eigenvalues(np.diag([2.0, 3.0]))
    assert [m for _, m in pairs] == [1, 1]
    assert abs(pairs[0][0] - 2) < 1e-12 and abs(pairs[1][0] - 3) < 1e-12

    (value, mult), = eigenvalues(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert mult == 2 and abs(value - 1) < 1e-12


def test_eigenvalues_rejects_large_dimension() -> None:
    with pytest.raises(UnsupportedSizeError):
        eigenvalues(np.eye(9))


def test_root_decomposition_diagonal() -> None:
    dec = root_decomposition(np.diag([2.0, 3.0]))
    assert dec.multiplicities == (1, 1)
    assert _close(dec.projectors[0], np.diag([1, 0]))
    assert _close(dec.projectors[1], np.diag([0, 1]))
    assert all(_close(N, np.zeros((2, 2))) for N in dec.nilpotents)


def test_root_decomposition_jordan_block() -> None:
    dec = root_decomposition(np.array([[5.0, 1.0], [0.0, 5.0]]))
    assert dec.multiplicities == (2,)
    assert _close(dec.projectors[0], np.eye(2))
    assert _close(dec.nilpotents[0], J2)
    assert abs(dec.eigenvalues[0] - 5) < 1e-12


def test_root_decomposition_conjugated_blocks() -> None:
    S = np.array([[1, 2, 0], [0, 1, 1], [1, 0, 1]], dtype=np.complex128)
    S_inv = np.linalg.inv(S)
    block = np.array([[2, 1, 0], [0, 2, 0], [0, 0, 7]], dtype=np.complex128)
    K = S @ block @ S_inv
    dec = root_decomposition(K, Tolerance(eigen_cluster_eps=1e-5, residual_eps=1e-8))

    assert dec.multiplicities == (2, 1)
    expected_planes = [S @ np.diag([1, 1, 0]) @ S_inv, S @ np.diag([0, 0, 1]) @ S_inv]
    for P, expected in zip(dec.projectors, expected_planes):
        assert _close(P, expected, 1e-6)
    assert _close(dec.reconstruct(), K, 1e-8)
    P1, P2 = dec.projectors
    assert _close(P1 @ P2, np.zeros((3, 3)), 1e-8)
    assert _close(P1 @ P1, P1, 1e-8)


def test_root_decomposition_singular() -> None:
    with pytest.raises(SingularInputError):
        root_decomposition(np.diag([1.0, 0.0]))


def test_nilpotent_mth_root_examples() -> None:
    assert _close(nilpotent_mth_root(4, np.zeros((2, 2)), 2), 2 * np.eye(2))
    S = nilpotent_mth_root(4, J2, 2)
    assert _close(S, [[2, 0.25], [0, 2]])
    assert _close(S @ S, [[4, 1], [0, 4]])
    N = np.array([[0, 3, 1], [0, 0, 2], [0, 0, 0]], dtype=np.complex128)
    assert _close(nilpotent_mth_root(1, N, 1), np.eye(3) + N)


def test_nilpotent_mth_root_errors() -> None:
    with pytest.raises(SingularInputError):
        nilpotent_mth_root(0, J2, 2)
    with pytest.raises(ContractViolationError):
        nilpotent_mth_root(1, np.eye(2), 2)


def test_principal_branch() -> None:
    assert abs(principal_root(-4, 2) - 2j) < 1e-12
    # a negative zero imaginary part must not flip the branch
    assert abs(principal_root(complex(-4, -0.0), 2) - 2j) < 1e-12


def test_commutant_preserving_root_examples() -> None:
    assert _close(commutant_preserving_root(np.diag([4.0, 9.0]), 2), np.diag([2, 3]))

    K = np.array([[4, 1], [0, 4]], dtype=np.complex128)
    root = commutant_preserving_root(K, 2)
    assert _close(root, [[2, 0.25], [0, 2]])
    A = np.array([[1, 1], [0, 1]], dtype=np.complex128)
    assert commute_check(A, K) and commute_check(A, root)

    root3 = commutant_preserving_root(0.5 * np.eye(3), 3)
    assert _close(root3, 0.5 ** (1 / 3) * np.eye(3))


def test_commutant_preserving_root_identity_order() -> None:
    K = np.array([[1, 2], [3, 4]], dtype=np.complex128)
    assert np.array_equal(commutant_preserving_root(K, 1), K)


def test_commute_check_examples(rng: np.random.Generator) -> None:
    assert commute_check(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
    assert not commute_check(np.array([[0.0, 1.0], [1.0, 0.0]]), np.diag([1.0, 2.0]))
    K = rng.standard_normal((4, 4)) * 0.5
    assert commute_check(K, _polynomial(K, [0.3, -1.0, 0.5]))
    with pytest.raises(ShapeError):
        commute_check(np.eye(2), np.eye(3))


def test_invariance_check_examples(rng: np.random.Generator) -> None:
    K = np.diag([1.0, 2.0, 2.0]) + np.triu(rng.standard_normal((3, 3)) * 0.1, 1)
    dec = root_decomposition(K)
    assert invariance_check(np.eye(3), dec)
    assert invariance_check(K, dec)
    assert invariance_check(_polynomial(K, [1.0, 2.0, -0.5]), dec)
    assert not invariance_check(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]]), dec)


def test_linear_contraction_examples() -> None:
    assert is_linear_contraction(np.diag([0.5, 1 / 3]))
    assert not is_linear_contraction(np.diag([0.5, 2.0]))
    assert not is_linear_contraction(np.diag([0.5, 0.0]))


def test_orbit_converges_examples() -> None:
    assert orbit_converges(0.5 * np.eye(2), [1, 1], 60)
    assert not orbit_converges(2 * np.eye(2), [1, 0], 200)
    # transient growth to about 400 before decay
    K = np.array([[0.9, 10], [0, 0.9]])
    assert orbit_converges(K, [0, 1], 400)
    assert not orbit_converges(K, [0, 1], 20)


def test_orbit_converges_near_unit_radius() -> None:
    slow = 0.999 * np.eye(2)
    assert orbit_converges(slow, [1, 0], 20000)
    assert not orbit_converges(slow, [1, 0], 5000)
    assert not orbit_converges(np.eye(2), [1, 0], 20000)


def test_orbit_budget_examples() -> None:
    assert orbit_budget(0.5, 1e-8, 200) == 254
    assert orbit_budget(1.0, 1e-8, 200) == 200
    assert orbit_budget(0.0, 1e-8, 200) == 200
    assert orbit_budget(0.5, 0.0, 200) == 200
    budget = orbit_budget(0.999, 1e-8, 200)
    assert 0.999 ** (budget - 200) < 1e-15
    assert orbit_converges(0.999 * np.eye(2), [1, 1], budget)


def _polynomial(K: np.ndarray, coefficients) -> np.ndarray:
    result = np.zeros_like(K, dtype=np.complex128)
    for c in reversed(list(coefficients)):
        result = result @ K + c * np.eye(K.shape[0])
    return result


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(Z)
    return Q


def _jordan_block(lam: complex, size: int) -> np.ndarray:
    return lam * np.eye(size, dtype=np.complex128) + np.diag(np.ones(size - 1), 1)


@pytest.mark.parametrize("size, lam", [(3, 2.0), (4, -1.5 + 0.5j)], ids=["J3", "J4"])
def test_large_jordan_blocks_at_default_tolerance(rng: np.random.Generator, size: int, lam: complex) -> None:
    for _ in range(20):
        Q = _random_unitary(rng, size)
        K = Q @ _jordan_block(lam, size) @ Q.conj().T
        (value, mult), = eigenvalues(K)
        assert mult == size and abs(value - lam) < 1e-10
        A = _polynomial(K, [0.3, -1.0, 0.5, 0.25])
        for m in (2, 3, 5):
            root = commutant_preserving_root(K, m)
            assert max_norm(np.linalg.matrix_power(root, m) - K) <= 1e-8 * max(1.0, max_norm(K))
            assert max_norm(A @ root - root @ A) <= 1e-7


def test_jordan_block_beside_simple_eigenvalue(rng: np.random.Generator) -> None:
    T = np.zeros((4, 4), dtype=np.complex128)
    T[:3, :3] = _jordan_block(2.0, 3)
    T[3, 3] = 0.5
    Q = _random_unitary(rng, 4)
    K = Q @ T @ Q.conj().T
    dec = root_decomposition(K)
    assert dec.multiplicities == (1, 3)
    assert abs(dec.eigenvalues[0] - 0.5) < 1e-10 and abs(dec.eigenvalues[1] - 2) < 1e-10
    assert max_norm(dec.reconstruct() - K) <= 1e-8 * max_norm(K)
    assert invariance_check(_polynomial(K, [1.0, -0.5, 0.2]), dec)
    root = commutant_preserving_root(K, 2)
    assert max_norm(root @ root - K) <= 1e-8 * max(1.0, max_norm(K))


def _separated_spectrum(rng: np.random.Generator, count: int) -> list[complex]:
    values: list[complex] = []
    while len(values) < count:
        z = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        if all(abs(z - w) >= 0.1 for w in values):
            values.append(complex(z))
    return values


def _random_invertible(rng: np.random.Generator, n: int, block: int) -> np.ndarray:
    """``Q·T·Q*`` with T upper triangular, built from Jordan chains of length ``block``."""
    while True:
        T = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), 1) * 0.3
        values = _separated_spectrum(rng, -(-n // block))
        diagonal = [values[i // block] for i in range(n)]
        for i in range(n - 1):
            if i // block == (i + 1) // block:
                T[i, i + 1] = 1.0
        T = T + np.diag(diagonal)
        Q = _random_unitary(rng, n)
        K = Q @ T @ Q.conj().T
        if np.linalg.cond(K) <= 1e4:
            return K


def _root_cases(seed: int = 7, count: int = 200):
    rng = np.random.default_rng(seed)
    for k in range(count):
        n = int(rng.integers(2, 7))
        # every fourth matrix is defective, alternating 2×2 and 3×3 chains
        block = 1 if k % 4 else (2 if k % 8 == 0 else 3)
        K = _random_invertible(rng, n, block)
        samples = [_polynomial(K, rng.standard_normal(int(rng.integers(1, n + 2))) * 0.5) for _ in range(5)]
        yield K, samples


@pytest.mark.slow
def test_root_suite() -> None:
    for K, samples in _root_cases():
        assert np.linalg.cond(K) <= 1e4
        for m in range(1, 6):
            root = commutant_preserving_root(K, m)
            residual = max_norm(np.linalg.matrix_power(root, m) - K)
            assert residual <= 1e-8 * max(1.0, max_norm(K))
            for A in samples:
                assert max_norm(A @ root - root @ A) <= 1e-7


@pytest.mark.slow
def test_root_subspaces_are_invariant() -> None:
    for K, samples in _root_cases():
        dec = root_decomposition(K)
        assert max_norm(dec.reconstruct() - K) <= 1e-8 * max(1.0, max_norm(K))
        assert max_norm(sum(dec.projectors) - np.eye(K.shape[0])) <= 1e-8
        for A in samples:
            assert invariance_check(A, dec)
