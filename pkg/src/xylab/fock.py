"""Localization centers, eigenfunction decay certificates, and
Fock-lattice overlap diagnostics.

Each eigenvector of the one-particle matrix gets an injectively assigned
center site via maximum bipartite matching on its large-component set;
certified exponential decay around the centers then controls both the
Slater-determinant overlaps between interacting and non-interacting
many-body eigenbases (through the structured-determinant bound) and the
local occupation numbers of configurations with no particle nearby.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .eigencorrelator import DecayFit
from .hamiltonian import SpectralDecomposition
from .quasifree import GrowthFunction, configuration_distance, growth_series


def hopcroft_karp(adjacency: list, n_right: int) -> list:
    """Maximum-cardinality matching of a bipartite graph.

    adjacency[u] lists the right-vertices reachable from left-vertex u;
    returns match_left with match_left[u] = matched right vertex or -1.
    """
    n_left = len(adjacency)
    INF = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left

    def bfs() -> bool:
        queue = deque()
        found = False
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        free_dist = INF
        while queue:
            u = queue.popleft()
            if dist[u] < free_dist:
                for v in adjacency[u]:
                    w = match_r[v]
                    if w == -1:
                        free_dist = dist[u] + 1
                        found = True
                    elif dist[w] == INF:
                        dist[w] = dist[u] + 1
                        queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adjacency[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] == -1:
                dfs(u)
    return match_l


@dataclass
class CenterAssignment:
    """Injective eigenvector -> site map; matched is True when the large
    component sets admitted a perfect matching, fallback_count counts
    greedy repairs otherwise."""

    centers: tuple
    alpha_used: float
    matched: bool
    fallback_count: int


def locate_centers(sd: SpectralDecomposition, alpha: float = 1.25) -> CenterAssignment:
    """Assign a center site to each eigenvector.

    Candidate sites for eigenvector r are those with |phi_r(j)| >= n^-alpha;
    a maximum matching on that bipartite graph yields injective centers
    (a perfect matching exists in exact arithmetic for alpha > 1).
    Unmatched eigenvectors fall back to their largest components, with
    injectivity repaired greedily by next-largest ones.
    """
    if alpha <= 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    V = np.abs(sd.eigenvectors)
    n = V.shape[0]
    thresh = float(n) ** (-alpha)
    adjacency = [list(np.nonzero(V[:, r] >= thresh)[0]) for r in range(n)]
    match = hopcroft_karp(adjacency, n)
    matched = all(m != -1 for m in match)
    centers = list(match)
    fallback = 0
    if not matched:
        taken = set(m for m in match if m != -1)
        for r in range(n):
            if centers[r] == -1:
                fallback += 1
                for j in np.argsort(-V[:, r]):
                    if int(j) not in taken:
                        centers[r] = int(j)
                        taken.add(int(j))
                        break
    return CenterAssignment(
        centers=tuple(c + 1 for c in centers),
        alpha_used=alpha,
        matched=matched,
        fallback_count=fallback,
    )


@dataclass
class DecayCertificate:
    """Result of checking |phi_r(j)| <= exp(-eta |j - k_r|) beyond the
    n^tau window; certified iff no violations."""

    eta: float
    tau: float
    violations: list
    certified: bool


def certify_decay(
    sd: SpectralDecomposition, centers: CenterAssignment, eta: float, tau: float
) -> DecayCertificate:
    """Check exponential decay around the assigned centers at rate eta,
    for all site separations >= n^tau."""
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if not 0 < tau < 1:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    V = np.abs(sd.eigenvectors)
    n = V.shape[0]
    window = float(n) ** tau
    sites = np.arange(1, n + 1)
    violations = []
    for r in range(n):
        dist = np.abs(sites - centers.centers[r])
        mask = dist >= window
        bound = np.exp(-eta * dist[mask])
        bad = np.nonzero(V[mask, r] > bound)[0]
        for b in bad:
            j = sites[mask][b]
            violations.append((r + 1, int(j), float(V[j - 1, r]), float(np.exp(-eta * abs(j - centers.centers[r])))))
    return DecayCertificate(eta=eta, tau=tau, violations=violations, certified=not violations)


def fermion_configuration(seq, n: int | None = None) -> tuple:
    """Strictly increasing occupied-mode/site indices (1-based)."""
    cfg = tuple(int(v) for v in seq)
    if any(b <= a for a, b in zip(cfg, cfg[1:])):
        raise ValueError(f"configuration must be strictly increasing: {cfg}")
    if cfg and (cfg[0] < 1 or (n is not None and cfg[-1] > n)):
        raise ValueError(f"configuration entries outside [1, {n}]: {cfg}")
    return cfg


def slater_overlap(U: np.ndarray, k_config, j_config) -> float:
    """Signed overlap between the interacting eigenstate occupying modes
    k and the spin basis vector with up-spins at sites j:

        (-1)^(sum j_m - r) det( phi_{k_m}(j_l) ),

    with phi_k = column k of U.  Different cardinalities give exact 0
    (particle number conservation).
    """
    n = U.shape[0]
    k = fermion_configuration(k_config, n)
    j = fermion_configuration(j_config, n)
    if len(k) != len(j):
        return 0.0
    if len(k) == 0:
        return 1.0
    r = len(k)
    sub = U[np.ix_(np.array(j) - 1, np.array(k) - 1)].T  # rows modes, cols sites
    sign = -1.0 if (sum(j) - r) % 2 else 1.0
    return float(sign * np.linalg.det(sub))


def occupation_number(U: np.ndarray, k_config, x: int) -> float:
    """Occupation of site x in the eigenstate with modes k: the exact
    identity sum_m |phi_{k_m}(x)|^2."""
    n = U.shape[0]
    k = fermion_configuration(k_config, n)
    if not 1 <= x <= n:
        raise ValueError(f"site {x} outside [1, {n}]")
    if not k:
        return 0.0
    return float(np.sum(U[x - 1, np.array(k) - 1] ** 2))


def occupation_bound(eta: float, dmin: float) -> float:
    """2 / (e^{2 eta dmin} - 1): decay-certified bound on the occupation
    at distance dmin from the nearest occupied-mode center."""
    return 2.0 / np.expm1(2.0 * eta * dmin)


def sample_configuration_pairs(
    n: int,
    tau: float,
    count: int,
    seed: int = 0,
    r_max: int = 5,
    max_tries: int = 200000,
) -> list:
    """Sample (k, j) configuration pairs with equal cardinality r in
    [1, r_max] conditioned on D(k, j) >= 2 n^tau, fixed seed."""
    rng = np.random.default_rng(seed)
    dmin = 2.0 * float(n) ** tau
    pairs = []
    tries = 0
    while len(pairs) < count and tries < max_tries:
        tries += 1
        r = int(rng.integers(1, r_max + 1))
        k = tuple(sorted(rng.choice(n, size=r, replace=False) + 1))
        j = tuple(sorted(rng.choice(n, size=r, replace=False) + 1))
        if configuration_distance(k, j) >= dmin:
            pairs.append((k, j))
    if len(pairs) < count:
        raise ValueError(
            f"could not sample {count} pairs with D >= {dmin:.1f} at n={n}"
        )
    return pairs


@dataclass
class OverlapCheckReport:
    checked: int
    skipped: int
    passed: int
    pass_fraction: float
    constant: float
    eta: float
    eta0: float
    tau: float
    worst_ratio: float


def fock_localization_check(
    U: np.ndarray,
    fit: DecayFit,
    tau: float,
    eta0: float,
    pairs,
    eta: float | None = None,
) -> OverlapCheckReport:
    """Check the configuration-distance decay of basis overlaps:

        |overlap(k, j)| <= 8 max(I, sqrt(I)) n^{2 tau}
                           * exp(-(eta - eta0)/4 * D(k, j)),

    with I = C * sum_l (1 + l) exp(-eta0 K(l)) for the growth profile K
    thresholded at n^tau, eta defaulting to half the fitted decay rate,
    and C the fitted prefactor.  Pairs violating D >= 2 n^tau are
    skipped and reported.
    """
    n = U.shape[0]
    if eta is None:
        eta = 0.5 * fit.eta
    if not 0 < eta0 < eta:
        raise ValueError(f"need 0 < eta0 < eta, got eta0={eta0}, eta={eta}")
    cut = float(n) ** tau
    K = GrowthFunction(kind="thresholded", tau_cut=cut)
    I = fit.C * growth_series(K, eta0)
    const = 8.0 * max(I, np.sqrt(I)) * float(n) ** (2.0 * tau)
    checked = skipped = passed = 0
    worst = 0.0
    for k, j in pairs:
        D = configuration_distance(k, j)
        if D < 2.0 * cut:
            skipped += 1
            continue
        checked += 1
        val = abs(slater_overlap(U, k, j))
        bound = const * np.exp(-0.25 * (eta - eta0) * D)
        ratio = val / bound if bound > 0 else np.inf
        worst = max(worst, ratio)
        if val <= bound:
            passed += 1
    frac = passed / checked if checked else 1.0
    return OverlapCheckReport(
        checked=checked,
        skipped=skipped,
        passed=passed,
        pass_fraction=frac,
        constant=const,
        eta=eta,
        eta0=eta0,
        tau=tau,
        worst_ratio=worst,
    )
