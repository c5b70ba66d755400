"""Disorder realizations of the chain parameters (mu_j, gamma_j, nu_j).

Sampling is counter-based: realization i of an ensemble depends only on
(base_seed, i), so realizations can be generated in any order or in
parallel with identical results.  All randomness goes through an
in-package SplitMix64 stream, so fixtures are stable across platforms
and numpy versions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer: one avalanche round of a 64-bit word."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK64
    return x ^ (x >> 31)


def _uniform_stream(seed: int, count: int) -> np.ndarray:
    """`count` uniforms in [0, 1) from the SplitMix64 stream at `seed`.

    Draw k is the finalizer applied to seed + k * golden-gamma, which is
    exactly the state sequence of the splitmix64 generator.
    """
    if count == 0:
        return np.zeros(0)
    ks = np.arange(1, count + 1, dtype=np.uint64)
    x = np.uint64(seed & _MASK64) + ks * np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    x = x ^ (x >> np.uint64(31))
    return (x >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class Distribution:
    """Bounded single-parameter distribution: uniform(lo, hi) or constant."""

    kind: str
    lo: float = 0.0
    hi: float = 0.0
    value: float = 0.0

    def __post_init__(self):
        if self.kind == "uniform":
            if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
                raise ValueError("uniform bounds must be finite")
            if not self.lo < self.hi:
                raise ValueError(f"uniform requires lo < hi, got [{self.lo}, {self.hi}]")
        elif self.kind == "constant":
            if not np.isfinite(self.value):
                raise ValueError("constant value must be finite")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi) if self.kind == "uniform" else self.value

    @property
    def variance(self) -> float:
        return (self.hi - self.lo) ** 2 / 12.0 if self.kind == "uniform" else 0.0

    @property
    def abs_max(self) -> float:
        """Largest |value| the distribution can produce."""
        if self.kind == "uniform":
            return max(abs(self.lo), abs(self.hi))
        return abs(self.value)

    def to_json(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform", "lo": self.lo, "hi": self.hi}
        return {"kind": "constant", "value": self.value}

    @staticmethod
    def from_json(obj: dict) -> "Distribution":
        kind = obj.get("kind")
        if kind == "uniform":
            return Distribution("uniform", lo=float(obj["lo"]), hi=float(obj["hi"]))
        if kind == "constant":
            return Distribution("constant", value=float(obj["value"]))
        raise ValueError(f"unknown distribution kind {kind!r}")


def uniform(lo: float, hi: float) -> Distribution:
    return Distribution("uniform", lo=lo, hi=hi)


def constant(value: float) -> Distribution:
    return Distribution("constant", value=value)


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble of disordered chains: length, parameter distributions, seeding."""

    n: int
    mu_dist: Distribution
    gamma_dist: Distribution
    nu_dist: Distribution
    base_seed: int
    realizations: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if not 0 <= self.base_seed <= _MASK64:
            raise ValueError("base_seed must fit in 64 bits")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mu": self.mu_dist.to_json(),
            "gamma": self.gamma_dist.to_json(),
            "nu": self.nu_dist.to_json(),
            "base_seed": self.base_seed,
            "realizations": self.realizations,
        }

    @staticmethod
    def from_json(obj: dict) -> "EnsembleSpec":
        return EnsembleSpec(
            n=int(obj["n"]),
            mu_dist=Distribution.from_json(obj["mu"]),
            gamma_dist=Distribution.from_json(obj["gamma"]),
            nu_dist=Distribution.from_json(obj["nu"]),
            base_seed=int(obj["base_seed"]),
            realizations=int(obj["realizations"]),
        )


@dataclass(frozen=True)
class ChainSpec:
    """One disorder realization: couplings mu (n-1), anisotropies gamma (n-1),
    fields nu (n)."""

    n: int
    mu: tuple
    gamma: tuple
    nu: tuple
    realization_index: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if len(self.mu) != self.n - 1 or len(self.gamma) != self.n - 1:
            raise ValueError("mu and gamma must have length n-1")
        if len(self.nu) != self.n:
            raise ValueError("nu must have length n")
        for name, seq in (("mu", self.mu), ("gamma", self.gamma), ("nu", self.nu)):
            if seq and not np.all(np.isfinite(seq)):
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def isotropic(self) -> bool:
        return all(g == 0.0 for g in self.gamma)

    def mu_array(self) -> np.ndarray:
        return np.asarray(self.mu, dtype=float)

    def gamma_array(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)

    def nu_array(self) -> np.ndarray:
        return np.asarray(self.nu, dtype=float)


def make_chain(mu, gamma, nu, realization_index: int = 0) -> ChainSpec:
    """ChainSpec from raw sequences (convenience for tests and fixtures)."""
    nu = tuple(float(v) for v in nu)
    return ChainSpec(
        n=len(nu),
        mu=tuple(float(v) for v in mu),
        gamma=tuple(float(v) for v in gamma),
        nu=nu,
        realization_index=realization_index,
    )


def _sample_dist(dist: Distribution, seed: int, offset: int, count: int):
    """Sample `count` values; constants consume no stream positions, so
    comparative ensembles (e.g. differing only in a constant eps) see
    identical random fields."""
    if dist.kind == "constant":
        return (dist.value,) * count, offset
    u = _uniform_stream(seed, offset + count)[offset:]
    vals = dist.lo + (dist.hi - dist.lo) * u
    return tuple(vals.tolist()), offset + count


def sample_chain(spec: EnsembleSpec, i: int) -> ChainSpec:
    """Draw realization i of the ensemble.

    The per-realization stream seed is splitmix64(base_seed XOR i);
    entries are drawn in order mu_1..mu_{n-1}, gamma_1..gamma_{n-1},
    nu_1..nu_n.
    """
    if not 0 <= i < spec.realizations:
        raise IndexError(f"realization index {i} outside [0, {spec.realizations})")
    seed = splitmix64(spec.base_seed ^ i)
    n = spec.n
    mu, off = _sample_dist(spec.mu_dist, seed, 0, n - 1)
    gamma, off = _sample_dist(spec.gamma_dist, seed, off, n - 1)
    nu, _ = _sample_dist(spec.nu_dist, seed, off, n)
    return ChainSpec(n=n, mu=mu, gamma=gamma, nu=nu, realization_index=i)


def high_disorder_chain(
    n: int, eps: float, nu_dist: Distribution, seed: int, i: int
) -> ChainSpec:
    """Isotropic chain with constant coupling eps and random field: the
    high-disorder model (eps close to 0 means strong relative disorder).

    eps = 0 gives the decoupled reference chain.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    spec = EnsembleSpec(
        n=n,
        mu_dist=constant(eps),
        gamma_dist=constant(0.0),
        nu_dist=nu_dist,
        base_seed=seed,
        realizations=i + 1,
    )
    return sample_chain(spec, i)


def high_disorder_ensemble(
    n: int, eps: float, nu_dist: Distribution, seed: int, realizations: int
) -> EnsembleSpec:
    """EnsembleSpec for the high-disorder model."""
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    return EnsembleSpec(
        n=n,
        mu_dist=constant(eps),
        gamma_dist=constant(0.0),
        nu_dist=nu_dist,
        base_seed=seed,
        realizations=realizations,
    )
