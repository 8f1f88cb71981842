"""Thermal entropy function g, its inverse, entropy photon numbers and EPnI slacks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

NEWTON_MAX_ITER = 200


def g(x):
    """Entropy in nats of a thermal state with mean photon number ``x``.

    ``g(x) = (x+1) ln(x+1) - x ln x``, evaluated as
    ``log1p(x) + x log1p(1/x)``, which is free of cancellation at both ends.
    Below 1 the second term is ``x (log1p(x) - ln x)`` so 1/x cannot overflow.
    Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError(f"g is defined for x >= 0, got {x!r}")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        safe = np.where(arr > 0, arr, 1.0)
        tail = np.where(safe < 1.0, np.log1p(safe) - np.log(safe), np.log1p(1.0 / safe))
        out = np.where(arr > 0, np.log1p(arr) + arr * tail, 0.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def g_prime(x: float) -> float:
    """``d/dx g(x) = ln(1 + 1/x)``."""
    if x <= 0:
        return math.inf
    if x < 1.0:
        return math.log1p(x) - math.log(x)
    return math.log1p(1.0 / x)


def _g_scalar(x: float) -> float:
    if x == 0.0:
        return 0.0
    return math.log1p(x) + x * g_prime(x)


def g_inv(S: float) -> float:
    """Mean photon number whose thermal entropy is ``S`` nats.

    Newton iteration kept inside a bisection bracket; falls back to pure
    bisection when a Newton step leaves the bracket.
    """
    S = float(S)
    if S < 0 or math.isnan(S):
        raise DomainError(f"g_inv is defined for S >= 0, got {S!r}")
    if S == 0.0:
        return 0.0
    if math.isinf(S):
        return math.inf
    lo, hi = 0.0, max(1.0, math.exp(S - 1.0))
    while _g_scalar(hi) < S:
        lo, hi = hi, hi * 2.0
    # g(x) ~ ln x + 1 for large x and ~ x(1 - ln x) for small x
    if S > 1.0:
        x = min(max(math.exp(S - 1.0) - 0.5, lo), hi)
    else:
        x = min(max(S / max(1.0 - math.log(S), 1.0), lo), hi)
    for _ in range(NEWTON_MAX_ITER):
        f = _g_scalar(x) - S
        if f == 0.0:
            return x
        if f > 0:
            hi = x
        else:
            lo = x
        step = f / g_prime(x) if x > 0 else math.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4e-16 * max(x, 1e-300) or hi - lo <= 4e-16 * hi:
            return x_new
        x = x_new
    # bisection fallback
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _g_scalar(mid) < S:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def entropy_photon_number(rho, n_modes: int | None = None) -> float:
    """``g_inv(S(rho) / n)``: the thermal photon number matching rho's per-mode entropy.

    Works for :class:`~bosonlab.fock.FockDensityOperator` and
    :class:`~bosonlab.gaussian.GaussianState`; ``n_modes`` defaults to the
    state's own mode count.
    """
    from .gaussian import GaussianState, gaussian_entropy, symplectic_eigenvalues
    from .fock import von_neumann_entropy

    if isinstance(rho, GaussianState):
        n = rho.n_modes if n_modes is None else n_modes
        if n == rho.n_modes == 1:
            # g_inv(g(nu - 1/2)) is nu - 1/2 exactly
            return max(float(symplectic_eigenvalues(rho.cov)[0]) - 0.5, 0.0)
        S = gaussian_entropy(rho)
    else:
        n = rho.mode_count if n_modes is None else n_modes
        S = von_neumann_entropy(rho)
    if n < 1:
        raise DomainError(f"n_modes must be >= 1, got {n}")
    return g_inv(S / n)


@dataclass(frozen=True)
class EpniVerdict:
    """Slacks of the three EPnI forms for one beamsplitter instance.

    ``n_form_slack``: N(c) - eta N(a) - (1-eta) N(b).
    ``s_form_slack``: S(c) - n g(eta N(a) + (1-eta) N(b)).
    ``third_form_slack``: S(c) - eta S(a) - (1-eta) S(b), reported only.
    """

    n_form_slack: float
    s_form_slack: float
    third_form_slack: float
    eta: float
    inputs_descriptor: str = ""
    entropies: tuple = ()
    photon_numbers: tuple = ()

    def sign_consistent(self, tol: float = 1e-9) -> bool:
        if abs(self.n_form_slack) <= tol:
            return True
        return np.sign(self.n_form_slack) == np.sign(self.s_form_slack)

    def third_form_implied(self, tol: float = 1e-9) -> bool:
        """False only when the n-form holds but the third form is violated."""
        return self.n_form_slack < 0 or self.third_form_slack >= -tol


def epni_slacks(
    S_a: float,
    S_b: float,
    S_c: float,
    eta: float,
    n_modes: int = 1,
    photon_numbers: tuple | None = None,
    descriptor: str = "",
) -> EpniVerdict:
    """Assemble an :class:`EpniVerdict` from the three entropies."""
    if photon_numbers is None:
        N_a, N_b, N_c = (g_inv(s / n_modes) for s in (S_a, S_b, S_c))
    else:
        N_a, N_b, N_c = photon_numbers
    mix = eta * N_a + (1.0 - eta) * N_b
    return EpniVerdict(
        n_form_slack=N_c - mix,
        s_form_slack=S_c - n_modes * g(mix),
        third_form_slack=S_c - eta * S_a - (1.0 - eta) * S_b,
        eta=eta,
        inputs_descriptor=descriptor,
        entropies=(S_a, S_b, S_c),
        photon_numbers=(N_a, N_b, N_c),
    )


def epni_evaluate(rho_a, rho_b, eta: float, descriptor: str = "") -> EpniVerdict:
    """EPnI slacks for the single-mode product input ``rho_a (x) rho_b``."""
    from .beamsplitter import channel_outputs
    from .fock import von_neumann_entropy

    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    rho_c, _ = channel_outputs(rho_a, rho_b, eta)
    S = tuple(von_neumann_entropy(r) for r in (rho_a, rho_b, rho_c))
    return epni_slacks(*S, eta=eta, n_modes=1, descriptor=descriptor)
