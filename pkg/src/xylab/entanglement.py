"""Bipartite entanglement of quasi-free states from correlation matrices.

The entropy of the reduction to the left end [1, ell] is the entropy of
the upper-left 2*ell block of the correlation matrix, -sum zeta ln zeta
over its eigenvalues (natural-log units).  The cross-cut block norms
give a computable upper bound, 2 ln 2 times their sum, which feeds the
area-law checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disorder import ChainSpec
from .hamiltonian import BogoliubovDecomposition, build_M, diagonalize
from .quasifree import CorrelationMatrix, eigenstate_gamma, evolve_gamma, quench_initial_gamma

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class Cut:
    """Bipartition [1, ell] | [ell+1, n]."""

    ell: int

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError(f"ell must be >= 1, got {self.ell}")

    def check(self, n: int) -> None:
        if not 1 <= self.ell < n:
            raise ValueError(f"cut ell={self.ell} requires 1 <= ell < n={n}")


@dataclass
class EntanglementRecord:
    entropy: float
    ps_bound: float
    label: object
    ell: int
    strategy: str = "exact"


def block_spectral_norms(gamma: np.ndarray, n: int) -> np.ndarray:
    """n x n table of spectral norms of the 2x2 blocks (vectorized via
    the closed form for 2x2 singular values)."""
    blocks = gamma.reshape(n, 2, n, 2).transpose(0, 2, 1, 3)
    frob2 = np.sum(np.abs(blocks) ** 2, axis=(2, 3))
    det = blocks[..., 0, 0] * blocks[..., 1, 1] - blocks[..., 0, 1] * blocks[..., 1, 0]
    disc = np.sqrt(np.maximum(frob2**2 - 4.0 * np.abs(det) ** 2, 0.0))
    return np.sqrt(0.5 * (frob2 + disc))


def entropy_from_gamma(cm: CorrelationMatrix, cut: Cut) -> float:
    """Von Neumann entropy of the reduction to [1, ell]: -sum zeta ln zeta
    over the upper-left 2*ell block spectrum, eigenvalues clamped to
    [1e-12, 1 - 1e-12] (projector spectra hit exact 0/1)."""
    cut.check(cm.n)
    block = cm.gamma[: 2 * cut.ell, : 2 * cut.ell]
    zeta = np.linalg.eigvalsh(block)
    if zeta[0] < -1e-9 or zeta[-1] > 1 + 1e-9:
        raise ValueError(
            f"restricted spectrum outside [0,1]: [{zeta[0]:.3e}, {zeta[-1]:.3e}]"
        )
    zeta = np.clip(zeta, 1e-12, 1 - 1e-12)
    return float(-np.sum(zeta * np.log(zeta)))


def entropy_from_right_block(cm: CorrelationMatrix, cut: Cut) -> float:
    """Entropy computed from the complement block (equal to the left one
    for pure states)."""
    cut.check(cm.n)
    block = cm.gamma[2 * cut.ell :, 2 * cut.ell :]
    zeta = np.clip(np.linalg.eigvalsh(block), 1e-12, 1 - 1e-12)
    return float(-np.sum(zeta * np.log(zeta)))


def ps_bound(cm: CorrelationMatrix, cut: Cut) -> float:
    """Cross-cut bound 2 ln 2 * sum_{j<=ell} sum_{k>ell} ||gamma(j,k)||."""
    cut.check(cm.n)
    norms = block_spectral_norms(cm.gamma, cm.n)
    return float(2.0 * LN2 * np.sum(norms[: cut.ell, cut.ell :]))


def area_law_constant(C: float, eta: float) -> float:
    """2 ln 2 * C e^{-eta} / (1 - e^{-eta})^2: the disorder-averaged
    entanglement bound implied by eigencorrelator decay at rate eta."""
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    q = np.exp(-eta)
    return float(2.0 * LN2 * C * q / (1.0 - q) ** 2)


def _iter_alpha(n: int):
    for a in range(2**n):
        yield (a >> np.arange(n)) & 1


def max_eigenstate_entropy(
    bog: BogoliubovDecomposition,
    cut: Cut,
    strategy: str = "exhaustive",
    samples: int = 200,
    seed: int = 0,
) -> EntanglementRecord:
    """Maximum entanglement over eigenstate labels: exhaustive for
    n <= 14, uniform sampling otherwise (a lower bound on the sup,
    recorded in the strategy field)."""
    n = bog.n
    cut.check(n)
    if strategy == "exhaustive":
        if n > 14:
            raise ValueError("exhaustive strategy capped at n=14")
        labels = _iter_alpha(n)
        tag = "exhaustive"
    elif strategy == "sampled":
        rng = np.random.default_rng(seed)
        labels = (rng.integers(0, 2, size=n) for _ in range(samples))
        tag = f"sampled({samples})"
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    # spectrum of the restricted block via the 2n x 2ell slice of W
    WA = bog.W[:, : 2 * cut.ell]
    best = -1.0
    best_alpha = None
    for alpha in labels:
        sel = np.empty(2 * n)
        sel[0::2] = 1 - alpha
        sel[1::2] = alpha
        block = WA.T @ (sel[:, None] * WA)
        zeta = np.clip(np.linalg.eigvalsh(block), 1e-12, 1 - 1e-12)
        s = float(-np.sum(zeta * np.log(zeta)))
        if s > best:
            best = s
            best_alpha = np.array(alpha, dtype=int)
    bound = ps_bound(eigenstate_gamma(bog, best_alpha), cut)
    return EntanglementRecord(
        entropy=best, ps_bound=bound, label=tuple(best_alpha), ell=cut.ell, strategy=tag
    )


def quench_entropy(
    chain: ChainSpec, cut: Cut, alpha_left, alpha_right, times
) -> np.ndarray:
    """Entanglement of an initially unentangled pair of half-chain
    eigenstates, evolved under the full chain; one entropy per time."""
    cut.check(chain.n)
    gamma0, _, _ = quench_initial_gamma(chain, cut.ell, alpha_left, alpha_right)
    sd = diagonalize(build_M(chain))
    out = np.empty(len(times))
    for i, t in enumerate(times):
        out[i] = entropy_from_gamma(evolve_gamma(gamma0, sd, float(t)), cut)
    return out


def thermal_entanglement_of_formation_bound(
    bog: BogoliubovDecomposition,
    cut: Cut,
    beta: float,
    sample_count: int = 200,
    seed: int = 0,
) -> float:
    """Upper bound on the entanglement of formation of the Gibbs state:
    the Gibbs-weighted average of eigenstate entanglements.  Exact mode
    enumeration for n <= 14; otherwise the factorized Gibbs weights are
    sampled (occupations are independent Bernoulli)."""
    n = bog.n
    cut.check(n)
    WA = bog.W[:, : 2 * cut.ell]

    def entropy_of(alpha):
        sel = np.empty(2 * n)
        sel[0::2] = 1 - alpha
        sel[1::2] = alpha
        zeta = np.clip(np.linalg.eigvalsh(WA.T @ (sel[:, None] * WA)), 1e-12, 1 - 1e-12)
        return float(-np.sum(zeta * np.log(zeta)))

    if n <= 14:
        if np.isinf(beta):
            return entropy_of(np.zeros(n, dtype=int))
        # energies 2*sum(lam[occupied]) - E0; the E0 shift cancels in the weights
        total = 0.0
        norm = 0.0
        for alpha in _iter_alpha(n):
            w = float(np.exp(-2.0 * beta * np.sum(bog.lam[alpha == 1])))
            total += w * entropy_of(alpha)
            norm += w
        return total / norm
    from scipy.special import expit

    rng = np.random.default_rng(seed)
    p_occ = expit(-2.0 * beta * bog.lam)
    acc = 0.0
    for _ in range(sample_count):
        alpha = (rng.random(n) < p_occ).astype(int)
        acc += entropy_of(alpha)
    return acc / sample_count
