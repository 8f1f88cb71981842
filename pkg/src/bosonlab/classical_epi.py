"""Gaussian closed forms for the three classical entropy-power-inequality forms.

Two conventions are offered.  ``"doubled"`` uses ``h = n ln(2 pi e s^2)``
per i.i.d. component, twice the usual value, with ``P = e^{h/n} / (2 pi e)``.
``"standard"`` uses ``h = (n/2) ln(2 pi e s^2)`` and ``P = e^{2h/n} / (2 pi e)``.  Each entropy
power inverts its own entropy, so a Gaussian's entropy power is its variance
under either convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DimensionMismatchError, DomainError

CONVENTIONS = ("doubled", "standard")


def _exponent(convention: str) -> float:
    if convention == "doubled":
        return 1.0
    if convention == "standard":
        return 2.0
    raise DomainError(f"unknown convention {convention!r}; use 'doubled' or 'standard'")


@dataclass(frozen=True)
class GaussianVectorSpec:
    """``n`` i.i.d. zero-mean real Gaussian components of the given variance."""

    n: int
    variance_per_component: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"dimension must be >= 1, got {self.n}")
        if not self.variance_per_component > 0:
            raise DomainError("variance must be positive")


@dataclass(frozen=True)
class EpiSlacks:
    slack_power: float
    slack_entropy: float
    slack_convex: float


def gaussian_diff_entropy(spec: GaussianVectorSpec, convention: str = "doubled") -> float:
    k = _exponent(convention)
    return spec.n / k * math.log(2 * math.pi * math.e * spec.variance_per_component)


def entropy_power(h: float, n: int, convention: str = "doubled") -> float:
    k = _exponent(convention)
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return math.exp(k * h / n) / (2 * math.pi * math.e)


def epi_gaussian_slacks(
    x: GaussianVectorSpec, y: GaussianVectorSpec, eta: float, convention: str = "doubled"
) -> EpiSlacks:
    """Slacks of the power, entropy and convex EPI forms for ``Z = sqrt(eta) X + sqrt(1-eta) Y``."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if x.n != y.n:
        raise DimensionMismatchError("X and Y must have the same dimension")
    n = x.n
    z = GaussianVectorSpec(n, eta * x.variance_per_component + (1 - eta) * y.variance_per_component)
    h_x, h_y, h_z = (gaussian_diff_entropy(s, convention) for s in (x, y, z))
    p_x, p_y, p_z = (entropy_power(h, n, convention) for h in (h_x, h_y, h_z))
    # Z~ mixes Gaussians whose variances are the entropy powers of X and Y
    z_tilde = GaussianVectorSpec(n, eta * p_x + (1 - eta) * p_y)
    return EpiSlacks(
        slack_power=p_z - eta * p_x - (1 - eta) * p_y,
        slack_entropy=h_z - gaussian_diff_entropy(z_tilde, convention),
        slack_convex=h_z - eta * h_x - (1 - eta) * h_y,
    )
