"""Unit-mean power-fading distributions.

Each model describes the small-scale power fluctuation of one link class and
is normalized so E[X] = 1 exactly.  Besides sampling, every model exposes the
exponential-moment complement E[1 - exp(-s X)], the kernel that the analytic
interference functionals integrate over.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FadingModel",
    "RayleighPower",
    "NakagamiPower",
    "RicianPower",
    "Deterministic",
    "LinkFadingConfig",
]


class FadingModel:
    """Base class for nonnegative unit-mean power fading."""

    def sample(self, rng: np.random.Generator, size=None):
        """Draw fading power values; reproducible given the generator state."""
        raise NotImplementedError

    def one_minus_exp_moment(self, s):
        """E[1 - exp(-s X)] for s >= 0; lies in [0, 1) and is 0 at s = 0."""
        raise NotImplementedError

    def _check_s(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0.0):
            raise ValueError("s must be nonnegative")
        return s


@dataclass(frozen=True)
class RayleighPower(FadingModel):
    """Power of a Rayleigh envelope: Exponential(mean 1)."""

    def sample(self, rng, size=None):
        return rng.standard_exponential(size)

    def one_minus_exp_moment(self, s):
        s = self._check_s(s)
        return s / (1.0 + s)


@dataclass(frozen=True)
class NakagamiPower(FadingModel):
    """Power of a Nakagami-m envelope: Gamma(shape m, scale 1/m)."""

    m: float = 4.0

    def __post_init__(self):
        if self.m < 0.5:
            raise ValueError("Nakagami shape m must be >= 0.5")

    def sample(self, rng, size=None):
        return rng.gamma(self.m, 1.0 / self.m, size)

    def one_minus_exp_moment(self, s):
        s = self._check_s(s)
        return 1.0 - (1.0 + s / self.m) ** (-self.m)


@dataclass(frozen=True)
class RicianPower(FadingModel):
    """Power of a Ricean envelope with K-factor, normalized to unit mean.

    X = |Z|^2 with Z complex Gaussian of mean sqrt(K/(K+1)) and variance
    1/(K+1); equivalently a scaled noncentral chi-square with 2 degrees of
    freedom, whose Laplace transform is available in closed form.
    """

    k_factor: float = 10.0

    def __post_init__(self):
        if self.k_factor < 0.0:
            raise ValueError("Rician K-factor must be >= 0")

    def sample(self, rng, size=None):
        k = self.k_factor
        mean = np.sqrt(k / (k + 1.0))
        sigma = np.sqrt(0.5 / (k + 1.0))
        re = rng.normal(mean, sigma, size)
        im = rng.normal(0.0, sigma, size)
        return re * re + im * im

    def one_minus_exp_moment(self, s):
        s = self._check_s(s)
        k = self.k_factor
        scale = (k + 1.0) / (k + 1.0 + s)
        return 1.0 - scale * np.exp(-k * s / (k + 1.0 + s))


@dataclass(frozen=True)
class Deterministic(FadingModel):
    """No fading: X = 1 always."""

    def sample(self, rng, size=None):
        return 1.0 if size is None else np.ones(size)

    def one_minus_exp_moment(self, s):
        s = self._check_s(s)
        return -np.expm1(-s)


@dataclass(frozen=True)
class LinkFadingConfig:
    """Fading models for the three link roles.

    `desired` applies to the serving link, `mainlobe` to interferers whose
    beam covers the user, `sidelobe` to the rest.  The roles need not share a
    distribution; each must be unit-mean (guaranteed by construction).
    """

    desired: FadingModel = NakagamiPower(4.0)
    mainlobe: FadingModel = NakagamiPower(4.0)
    sidelobe: FadingModel = RayleighPower()
