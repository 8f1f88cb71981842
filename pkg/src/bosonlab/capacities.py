"""Closed-form capacities of the lossy bosonic channel, in nats per channel use.

``c_privacy`` is conditional on the second minimum-output-entropy
conjecture; reports label it as the conjectured privacy capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .entropy import g, g_inv
from .errors import DivergenceError, DomainError


@dataclass(frozen=True)
class ChannelParams:
    """Transmissivity ``eta``, input photon budget ``n_bar``, noise photons ``n_noise``."""

    eta: float
    n_bar: float
    n_noise: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"eta must lie in [0, 1], got {self.eta}")
        if self.n_bar < 0:
            raise DomainError(f"n_bar must be >= 0, got {self.n_bar}")
        if self.n_noise < 0:
            raise DomainError(f"n_noise must be >= 0, got {self.n_noise}")


def c_shannon(p: ChannelParams) -> float:
    """Classical AWGN capacity ``ln[1 + eta N_bar / ((1-eta) N)]``."""
    if p.n_bar == 0:
        return 0.0
    noise = (1.0 - p.eta) * p.n_noise
    if noise == 0:
        raise DivergenceError(
            "Shannon capacity diverges without noise (n_noise = 0 or eta = 1)"
        )
    return math.log1p(p.eta * p.n_bar / noise)


def c_homodyne(p: ChannelParams) -> float:
    return 0.5 * math.log1p(4.0 * p.eta * p.n_bar / (2.0 * (1.0 - p.eta) * p.n_noise + 1.0))


def c_heterodyne(p: ChannelParams) -> float:
    return math.log1p(p.eta * p.n_bar / ((1.0 - p.eta) * p.n_noise + 1.0))


def c_pure_loss(p: ChannelParams) -> float:
    """Pure-loss capacity ``g(eta N_bar)``; ignores ``n_noise``."""
    return g(p.eta * p.n_bar)


def c_thermal_lower(p: ChannelParams) -> float:
    noise = (1.0 - p.eta) * p.n_noise
    return g(p.eta * p.n_bar + noise) - g(noise)


def c_privacy(p: ChannelParams) -> float:
    """Privacy capacity of the noiseless wiretap channel: ``g(eta N) - g((1-eta) N)``
    for ``eta > 1/2``, else 0.  ``n_noise`` is ignored (vacuum environment)."""
    if p.eta <= 0.5:
        return 0.0
    return g(p.eta * p.n_bar) - g((1.0 - p.eta) * p.n_bar)


def c_privacy_asymptotic(eta: float) -> float:
    """High-photon-number limit ``max{0, ln eta - ln(1-eta)}``."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if eta <= 0.5:
        return 0.0
    if eta == 1.0:
        return math.inf
    return math.log(eta) - math.log1p(-eta)


def privacy_inner_objective(K: float, eta: float) -> float:
    """``K - g[(1-eta) g_inv(K) / eta]``, Bob's entropy minus Eve's minimum at fixed K."""
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}")
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must lie in (0, 1], got {eta}")
    return K - g((1.0 - eta) * g_inv(K) / eta)


CAPACITY_FUNCTIONS = {
    "shannon": c_shannon,
    "homodyne": c_homodyne,
    "heterodyne": c_heterodyne,
    "pure_loss": c_pure_loss,
    "thermal_lower": c_thermal_lower,
    "privacy": c_privacy,
}
