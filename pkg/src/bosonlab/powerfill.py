"""Water-filling of a total photon budget across parallel lossy modes.

Maximizes ``sum_s C(eta_s, N_s)`` subject to ``sum_s N_s <= budget`` where C
is the pure-loss capacity ``g(eta N)`` or the privacy capacity
``g(eta N) - g((1-eta) N)``.  Both per-mode marginals are strictly
decreasing in N and diverge at ``N -> 0+`` on admissible modes, so the KKT
point is found by inverting each marginal at a common multiplier and
bisecting the multiplier until the budget is spent.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .capacities import ChannelParams, c_privacy, c_pure_loss
from .errors import DomainError

OBJECTIVES = ("pure_loss", "privacy")
KKT_TOL = 1e-7
# smallest normal double; roots below it are reported as 0
TINY = sys.float_info.min


def _log1p_inv(c: float, N: float) -> float:
    """``ln(1 + 1/(c N))`` without overflow when ``c N`` underflows."""
    t = c * N
    if t >= 1.0:
        return math.log1p(1.0 / t)
    return math.log1p(t) - math.log(c) - math.log(N)


def marginal(eta: float, N: float, objective_kind: str) -> float:
    """Derivative of the per-mode capacity with respect to N."""
    if N <= 0:
        return math.inf if admissible(eta, objective_kind) else 0.0
    if not admissible(eta, objective_kind):
        return 0.0
    m = eta * _log1p_inv(eta, N)
    if objective_kind == "privacy" and eta < 1.0:
        m -= (1.0 - eta) * _log1p_inv(1.0 - eta, N)
    return m


def admissible(eta: float, objective_kind: str) -> bool:
    """Modes that can carry capacity; denormal ``eta`` counts as a dead mode."""
    if objective_kind == "privacy":
        return eta > 0.5
    return eta >= TINY


def mode_capacity(eta: float, N: float, objective_kind: str) -> float:
    p = ChannelParams(eta=eta, n_bar=N)
    return c_privacy(p) if objective_kind == "privacy" else c_pure_loss(p)


@dataclass
class PowerAllocation:
    etas: list
    budget: float
    allocation: list
    multiplier: float
    objective_value: float
    objective_kind: str
    active: list = field(default_factory=list)

    def kkt_residuals(self) -> list:
        """Per-mode KKT violation: ``|m(N_s) - lambda|`` if active, ``max(0, m(0+) - lambda)`` otherwise.

        ``0+`` is the smallest normal double, the closest a float allocation
        can get to zero.
        """
        res = []
        for eta, N in zip(self.etas, self.allocation):
            if N > 0:
                res.append(abs(marginal(eta, N, self.objective_kind) - self.multiplier))
            else:
                m0 = marginal(eta, TINY, self.objective_kind) if admissible(eta, self.objective_kind) else 0.0
                res.append(max(0.0, m0 - self.multiplier) if math.isfinite(self.multiplier) else 0.0)
        return res

    def to_dict(self) -> dict:
        return {
            "etas": list(self.etas),
            "budget": self.budget,
            "allocation": list(self.allocation),
            "multiplier": self.multiplier if math.isfinite(self.multiplier) else None,
            "objective_value": self.objective_value,
            "objective_kind": self.objective_kind,
        }


def _invert_marginal(eta: float, lam: float, kind: str) -> float:
    """N > 0 with ``marginal(N) = lam`` for an admissible mode."""
    hi = 1.0
    while marginal(eta, hi, kind) > lam:
        hi *= 2.0
    lo = hi / 2.0
    while marginal(eta, lo, kind) < lam:
        hi, lo = lo, lo / 2.0
        if lo < TINY:
            return 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or hi - lo <= 1e-16 * hi:
            break
        if marginal(eta, mid, kind) > lam:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def check_marginals_decreasing(etas, kind: str, budget: float) -> None:
    """Numerically confirm the marginals decrease on a log grid up to the budget."""
    grid = np.geomspace(max(budget, 1.0) * 1e-9, max(budget, 1.0) * 10.0, 200)
    for eta in etas:
        if not admissible(eta, kind):
            continue
        m = np.array([marginal(eta, N, kind) for N in grid])
        if np.any(np.diff(m) >= 0) or np.any(m <= 0):
            raise RuntimeError(f"marginal for eta={eta} is not positive and decreasing")


def sum_objective(alloc: PowerAllocation) -> float:
    return float(
        sum(mode_capacity(e, N, alloc.objective_kind) for e, N in zip(alloc.etas, alloc.allocation))
    )


def allocate(etas, budget: float, objective_kind: str = "pure_loss") -> PowerAllocation:
    """Optimal per-mode photon numbers for the given transmissivities and budget."""
    etas = [float(e) for e in etas]
    if not etas:
        raise DomainError("at least one mode is required")
    if budget < 0 or not math.isfinite(budget):
        raise DomainError(f"budget must be finite and >= 0, got {budget}")
    if objective_kind not in OBJECTIVES:
        raise DomainError(f"unknown objective {objective_kind!r}")
    for e in etas:
        if not 0.0 <= e <= 1.0:
            raise DomainError(f"transmissivity {e} outside [0, 1]")

    active = [i for i, e in enumerate(etas) if admissible(e, objective_kind)]
    alloc = [0.0] * len(etas)
    if budget == 0 or not active:
        lam = math.inf if (active and budget == 0) else 0.0
        out = PowerAllocation(etas, budget, alloc, lam, 0.0, objective_kind, active)
        out.objective_value = sum_objective(out)
        return out

    check_marginals_decreasing([etas[i] for i in active], objective_kind, budget)

    def spent(lam):
        return [_invert_marginal(etas[i], lam, objective_kind) for i in active]

    share = budget / len(active)
    lam_hi = max(marginal(etas[i], share, objective_kind) for i in active)
    while sum(spent(lam_hi)) > budget:
        lam_hi *= 2.0
    lam_lo = lam_hi / 2.0
    while sum(spent(lam_lo)) < budget:
        lam_lo /= 2.0
    for _ in range(200):
        mid = 0.5 * (lam_lo + lam_hi)
        if mid in (lam_lo, lam_hi) or lam_hi - lam_lo <= 1e-15 * lam_hi:
            break
        if sum(spent(mid)) > budget:
            lam_lo = mid
        else:
            lam_hi = mid
    lam = 0.5 * (lam_lo + lam_hi)
    Ns = spent(lam)
    total = sum(Ns)
    for i, N in zip(active, Ns):
        alloc[i] = N * (budget / total)
    out = PowerAllocation(etas, budget, alloc, lam, 0.0, objective_kind, active)
    out.objective_value = sum_objective(out)
    return out
