"""Eigencorrelators, dynamic amplitudes, decay fits, and the commutator
bounds built from them.

The eigencorrelator table majorizes every bounded spectral function of
the effective Hamiltonian entrywise; in particular it dominates the
time-evolution amplitudes uniformly in t.  Disorder-averaged tables are
fitted log-linearly in distance, and the fitted constants (C, eta) feed
the zero-velocity commutator bounds and the transport/entanglement
bounds downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disorder import EnsembleSpec, sample_chain
from .hamiltonian import SpectralDecomposition, build_M, diagonalize, diagonalize_A


def eigencorrelator_table(sd: SpectralDecomposition, block: bool = False) -> np.ndarray:
    """n x n table Q(j,k) majorizing |g(X)_{jk}| over all |g| <= 1.

    Scalar case: Q(j,k) = sum_r |phi_r(j)| |phi_r(k)| (exact supremum).
    Block case (2n x 2n input, 2x2 blocks per site pair): the sum of
    spectral norms of the eigenprojector blocks, an upper bound for the
    supremum; each projector block is rank one, so its norm is the
    product of the per-site Euclidean norms of the eigenvector.
    """
    V = sd.eigenvectors
    if not block:
        aV = np.abs(V)
        return aV @ aV.T
    if sd.dim % 2:
        raise ValueError("block table requires even dimension")
    n = sd.dim // 2
    U = np.sqrt(V[0::2, :] ** 2 + V[1::2, :] ** 2)  # n x 2n per-site norms
    return U @ U.T


def dynamic_amplitude_sup(
    sd: SpectralDecomposition, times, block: bool = False
) -> np.ndarray:
    """Entrywise max over the time grid of the propagator amplitudes:
    |exp(-itX)_{jk}| in the scalar case, the 2x2-block spectral norms of
    exp(-2itM) in the block case (the mode dynamics carries the factor 2).
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ValueError("time grid must be nonempty")
    V = sd.eigenvectors
    lam = sd.eigenvalues
    if not block:
        out = np.zeros((sd.dim, sd.dim))
        for t in times:
            P = (V * np.exp(-1j * t * lam)) @ V.T
            np.maximum(out, np.abs(P), out=out)
        return out
    if sd.dim % 2:
        raise ValueError("block amplitudes require even dimension")
    n = sd.dim // 2
    out = np.zeros((n, n))
    for t in times:
        P = (V * np.exp(-2j * t * lam)) @ V.T
        blocks = P.reshape(n, 2, n, 2).transpose(0, 2, 1, 3)
        frob2 = np.sum(np.abs(blocks) ** 2, axis=(2, 3))
        det = blocks[..., 0, 0] * blocks[..., 1, 1] - blocks[..., 0, 1] * blocks[..., 1, 0]
        disc = np.sqrt(np.maximum(frob2**2 - 4.0 * np.abs(det) ** 2, 0.0))
        np.maximum(out, np.sqrt(0.5 * (frob2 + disc)), out=out)
    return out


def distance_profile(table: np.ndarray, max_distance: int | None = None) -> np.ndarray:
    """Mean of the table over pairs at each separation d = 0..max_distance."""
    n = table.shape[0]
    dmax = n - 1 if max_distance is None else min(max_distance, n - 1)
    out = np.empty(dmax + 1)
    for d in range(dmax + 1):
        out[d] = np.mean(np.diagonal(table, offset=d))
    return out


@dataclass(frozen=True)
class DecayFit:
    """Exponential-decay fit v_d ~ C exp(-eta d) on a distance profile."""

    C: float
    eta: float
    r_squared: float
    min_distance: int


def fit_decay(averaged, min_distance: int, max_distance: int | None = None) -> DecayFit:
    """Least squares on (d, log v_d) over distances >= min_distance.

    `averaged` is indexed by distance (entry d is the mean at separation
    d).  Degenerate (constant) data fits eta = 0 with r_squared = 0.
    """
    v = np.asarray(averaged, dtype=float)
    dmax = len(v) - 1 if max_distance is None else min(max_distance, len(v) - 1)
    d = np.arange(min_distance, dmax + 1)
    if len(d) < 3:
        raise ValueError("need at least 3 distances in the fit window")
    vals = v[d]
    if np.any(vals <= 0):
        raise ValueError("fit window contains nonpositive values")
    y = np.log(vals)
    var_y = float(np.sum((y - y.mean()) ** 2))
    if var_y < 1e-24:
        return DecayFit(C=float(np.exp(y.mean())), eta=0.0, r_squared=0.0, min_distance=min_distance)
    slope, intercept = np.polyfit(d, y, 1)
    resid = y - (slope * d + intercept)
    r2 = 1.0 - float(np.sum(resid**2)) / var_y
    return DecayFit(
        C=float(np.exp(intercept)),
        eta=float(-slope),
        r_squared=r2,
        min_distance=min_distance,
    )


def lr_commutator_bound(
    fit: DecayFit, j: int, k: int, b_norm: float = 1.0, kind: str = "local"
) -> float:
    """Zero-velocity commutator bound at separation |j - k| from fitted
    (C, eta): the iterated sum over the string gives

        fermion mode:   4 C ||B|| e^{-eta |j-k|} / (1 - e^{-eta})
        local operator: 96 C ||B|| e^{-eta |j-k|} / (1 - e^{-eta})^2,

    the latter uniform over unit-norm observables at the two sites.
    """
    if fit.eta <= 0:
        raise ValueError("commutator bound needs a positive fitted decay rate")
    d = abs(k - j)
    q = np.exp(-fit.eta)
    if kind == "fermion":
        return float(4.0 * fit.C * b_norm * np.exp(-fit.eta * d) / (1.0 - q))
    if kind == "local":
        return float(96.0 * fit.C * b_norm * np.exp(-fit.eta * d) / (1.0 - q) ** 2)
    raise ValueError(f"unknown bound kind {kind!r}")


def averaged_eigencorrelator(
    ensemble: EnsembleSpec, block: bool = False, max_distance: int | None = None
) -> np.ndarray:
    """Disorder-averaged distance profile of the eigencorrelator table,
    accumulated in realization-index order."""
    acc = None
    for i in range(ensemble.realizations):
        chain = sample_chain(ensemble, i)
        sd = diagonalize(build_M(chain)) if block else diagonalize_A(chain)
        prof = distance_profile(eigencorrelator_table(sd, block=block), max_distance)
        acc = prof if acc is None else acc + prof
    return acc / ensemble.realizations


def averaged_amplitude_profile(
    ensemble: EnsembleSpec, times, block: bool = False, max_distance: int | None = None
) -> np.ndarray:
    """Disorder-averaged distance profile of sup-over-grid amplitudes."""
    acc = None
    for i in range(ensemble.realizations):
        chain = sample_chain(ensemble, i)
        sd = diagonalize(build_M(chain)) if block else diagonalize_A(chain)
        prof = distance_profile(dynamic_amplitude_sup(sd, times, block=block), max_distance)
        acc = prof if acc is None else acc + prof
    return acc / ensemble.realizations
