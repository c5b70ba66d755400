"""Effective one-particle Hamiltonians of the XY chain and their
diagonalization.

The chain maps onto quasi-free fermions with tridiagonal matrices A
(hopping/field) and B (pairing).  The isotropic chain is governed by A
alone; the anisotropic chain by the 2x2-block Jacobi matrix M acting on
the interleaved vector (c_1, c_1^*, ..., c_n, c_n^*).  A Bogoliubov
transformation W (orthogonal, W J W^t = J with J = sigma_x per block)
brings M to +/-lambda_j block-diagonal form, with lambda_j the singular
values of A + B.  Many-body energies are sum(2 lambda_j over occupied
modes) - E0 with E0 = sum(lambda_j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disorder import ChainSpec

SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def s_gamma(gamma: float) -> np.ndarray:
    """Bond block of M: S(gamma) = [[1, gamma], [-gamma, -1]]."""
    return np.array([[1.0, gamma], [-gamma, -1.0]])


def build_A(chain: ChainSpec) -> np.ndarray:
    """Tridiagonal matrix with diagonal -nu and off-diagonal mu."""
    A = np.diag(-chain.nu_array())
    mu = chain.mu_array()
    if chain.n > 1:
        idx = np.arange(chain.n - 1)
        A[idx, idx + 1] = mu
        A[idx + 1, idx] = mu
    return A


def build_B(chain: ChainSpec) -> np.ndarray:
    """Antisymmetric pairing matrix: super-diagonal mu_j*gamma_j."""
    B = np.zeros((chain.n, chain.n))
    if chain.n > 1:
        idx = np.arange(chain.n - 1)
        mg = chain.mu_array() * chain.gamma_array()
        B[idx, idx + 1] = mg
        B[idx + 1, idx] = -mg
    return B


def build_M(chain: ChainSpec) -> np.ndarray:
    """2n x 2n block-Jacobi effective Hamiltonian in the interleaved
    (c_j, c_j^*) ordering: diagonal blocks -nu_j sigma_z, bond blocks
    mu_j S(gamma_j) above and its transpose below."""
    n = chain.n
    M = np.zeros((2 * n, 2 * n))
    for j in range(n):
        M[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = -chain.nu[j] * SIGMA_Z
    for j in range(n - 1):
        blk = chain.mu[j] * s_gamma(chain.gamma[j])
        M[2 * j : 2 * j + 2, 2 * j + 2 : 2 * j + 4] = blk
        M[2 * j + 2 : 2 * j + 4, 2 * j : 2 * j + 2] = blk.T
    return M


def block_j(n: int) -> np.ndarray:
    """J = (sigma_x)^{+n}: swaps c_j and c_j^* within each block."""
    J = np.zeros((2 * n, 2 * n))
    for j in range(n):
        J[2 * j, 2 * j + 1] = 1.0
        J[2 * j + 1, 2 * j] = 1.0
    return J


def _fix_column_signs(V: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Make the largest-magnitude component of each column positive."""
    V = V.copy()
    for k in range(V.shape[1]):
        col = V[:, k]
        piv = int(np.argmax(np.abs(col)))
        if abs(col[piv]) > tol and col[piv] < 0:
            V[:, k] = -col
    return V


@dataclass
class SpectralDecomposition:
    """Eigensystem of a real symmetric matrix, ascending eigenvalues,
    sign-fixed orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def function_of(self, g) -> np.ndarray:
        """g(X) via the spectral theorem; g applied elementwise to the
        eigenvalues (may return complex values, e.g. g = exp(-it.))."""
        V = self.eigenvectors
        return (V * g(self.eigenvalues)) @ V.T

    def propagator(self, t: float, scale: float = 1.0) -> np.ndarray:
        """exp(-1j * scale * t * X)."""
        return self.function_of(lambda lam: np.exp(-1j * scale * t * lam))


class EigensolverError(RuntimeError):
    pass


def diagonalize_A(chain: ChainSpec) -> SpectralDecomposition:
    """Fast path for the tridiagonal one-particle matrix of a chain
    (scipy's tridiagonal solver), same conventions as diagonalize."""
    from scipy.linalg import eigh_tridiagonal

    if chain.n == 1:
        return SpectralDecomposition(
            eigenvalues=np.array([-chain.nu[0]]), eigenvectors=np.eye(1)
        )
    try:
        lam, V = eigh_tridiagonal(-chain.nu_array(), chain.mu_array())
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"tridiagonal eigensolver failed: {exc}") from exc
    return SpectralDecomposition(eigenvalues=lam, eigenvectors=_fix_column_signs(V))


def diagonalize(X: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a real symmetric matrix with the
    deterministic sign convention; residuals are verified."""
    X = np.asarray(X, dtype=float)
    sym_err = np.max(np.abs(X - X.T)) if X.size else 0.0
    if sym_err > 1e-12:
        raise ValueError(f"matrix not symmetric: max asymmetry {sym_err:.3e}")
    try:
        lam, V = np.linalg.eigh(X)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(
            f"eigh failed for {X.shape[0]}x{X.shape[0]} matrix "
            f"(norm {np.linalg.norm(X):.3e}): {exc}"
        ) from exc
    V = _fix_column_signs(V)
    scale = max(np.max(np.abs(lam)), 1.0) if lam.size else 1.0
    resid = np.max(np.abs(X @ V - V * lam)) if lam.size else 0.0
    orth = np.max(np.abs(V.T @ V - np.eye(len(lam)))) if lam.size else 0.0
    if resid > 1e-10 * scale or orth > 1e-10:
        raise EigensolverError(
            f"eigensolver residuals too large: |XV-VL|={resid:.3e}, "
            f"|V^tV-I|={orth:.3e}"
        )
    return SpectralDecomposition(eigenvalues=lam, eigenvectors=V)


@dataclass
class BogoliubovDecomposition:
    """Orthogonal W with W J W^t = J and W M W^t = diag(+l_j, -l_j) blocks;
    lambda ascending >= 0, E0 = sum(lambda).  `degenerate` flags mode
    energies that collide (or vanish) within 1e-12; eigenstate-resolved
    quantities downstream inherit the flag."""

    W: np.ndarray
    lam: np.ndarray
    E0: float
    degenerate: bool

    @property
    def n(self) -> int:
        return len(self.lam)


def bogoliubov(chain: ChainSpec) -> BogoliubovDecomposition:
    """Bogoliubov decomposition from the SVD A + B = Phi diag(l) Psi^t.

    With g_j, h_j the right/left singular vector pairs, the rows
    (2j, 2j+1) of W are the interleavings of ((g+h)/2, (g-h)/2) and
    ((g-h)/2, (g+h)/2); this satisfies all constraints identically, and
    they are verified before returning.
    """
    n = chain.n
    A = build_A(chain)
    B = build_B(chain)
    Phi, lam, PsiT = np.linalg.svd(A + B)
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    Phi = Phi[:, order]
    Psi = PsiT.T[:, order]
    # deterministic signs: flip (g, h) pairs together
    for k in range(n):
        piv = int(np.argmax(np.abs(Psi[:, k])))
        if abs(Psi[piv, k]) > 1e-12 and Psi[piv, k] < 0:
            Psi[:, k] = -Psi[:, k]
            Phi[:, k] = -Phi[:, k]

    W = np.zeros((2 * n, 2 * n))
    phi = 0.5 * (Psi + Phi)  # c-components of the +lambda eigenvectors
    psi = 0.5 * (Psi - Phi)  # c^*-components
    W[0::2, 0::2] = phi.T
    W[0::2, 1::2] = psi.T
    W[1::2, 0::2] = psi.T
    W[1::2, 1::2] = phi.T

    M = build_M(chain)
    J = block_j(n)
    orth = np.max(np.abs(W @ W.T - np.eye(2 * n)))
    jerr = np.max(np.abs(W @ J @ W.T - J))
    D = W @ M @ W.T
    target = np.zeros((2 * n, 2 * n))
    target[0::2, 0::2] = np.diag(lam)
    target[1::2, 1::2] = np.diag(-lam)
    derr = np.max(np.abs(D - target))
    if orth > 1e-10 or jerr > 1e-10 or derr > 1e-9 * max(1.0, np.max(lam, initial=1.0)):
        raise EigensolverError(
            f"bogoliubov constraints violated: |WW^t-I|={orth:.3e}, "
            f"|WJW^t-J|={jerr:.3e}, |WMW^t-D|={derr:.3e}"
        )
    gaps = np.diff(lam) if n > 1 else np.array([np.inf])
    degenerate = bool(lam[0] < 1e-12 or (n > 1 and np.min(gaps) < 1e-12))
    return BogoliubovDecomposition(W=W, lam=lam, E0=float(np.sum(lam)), degenerate=degenerate)


def many_body_energy(bog: BogoliubovDecomposition, alpha) -> float:
    """Eigenvalue of H for occupation pattern alpha: 2*sum(lam[alpha=1]) - E0."""
    alpha = np.asarray(alpha)
    return float(2.0 * np.sum(bog.lam[alpha == 1]) - bog.E0)


def all_many_body_energies(bog: BogoliubovDecomposition) -> np.ndarray:
    """All 2^n eigenvalues of H, in alpha-bit order (alpha_1 the fastest bit
    would be ambiguous; here index a runs 0..2^n-1 with alpha_j = bit j of a)."""
    n = bog.n
    if n > 24:
        raise ValueError("2^n enumeration capped at n=24")
    energies = np.zeros(2**n)
    for j in range(n):
        bit = (np.arange(2**n) >> j) & 1
        energies += 2.0 * bog.lam[j] * bit
    return energies - bog.E0


def alpha_from_index(a: int, n: int) -> np.ndarray:
    """Occupation bits of enumeration index a (alpha_j = bit j of a)."""
    return (a >> np.arange(n)) & 1


def export_matrix_csv(X: np.ndarray, path) -> None:
    """Dense row-major CSV dump for debugging."""
    X = np.atleast_2d(np.asarray(X))
    with open(path, "w") as fh:
        for row in X:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
