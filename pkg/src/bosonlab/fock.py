"""Truncated Fock-space density operators for one or two bosonic modes.

Two-mode matrices use first-mode-major flattening: basis index ``i * D + j``
labels ``|i>_1 |j>_2``.  Constructors refuse to build states whose
probability mass above the cutoff exceeds ``tail_tol`` instead of silently
renormalizing a badly truncated state.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Iterable

import numpy as np
from scipy import linalg, special
from scipy.stats import unitary_group

from .errors import (
    CutoffError,
    DimensionMismatchError,
    DomainError,
    NotAStateError,
    TruncationError,
)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
EIG_CLIP = 1e-10
TAIL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FockDensityOperator:
    """Density matrix on ``mode_count`` modes, each truncated to ``cutoff`` levels."""

    mode_count: int
    cutoff: int
    matrix: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        if self.mode_count not in (1, 2):
            raise DomainError(f"mode_count must be 1 or 2, got {self.mode_count}")
        if self.cutoff < 1:
            raise DomainError(f"cutoff must be positive, got {self.cutoff}")
        m = np.array(self.matrix, dtype=complex)
        side = self.cutoff**self.mode_count
        if m.shape != (side, side):
            raise DimensionMismatchError(
                f"expected a {side}x{side} matrix for mode_count={self.mode_count}, "
                f"cutoff={self.cutoff}; got {m.shape}"
            )
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise NotAStateError("matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotAStateError(f"trace is {tr!r}, expected 1")
        m /= tr
        if validate:
            lo = np.linalg.eigvalsh(m)[0] if side else 0.0
            if lo < -EIG_CLIP:
                raise NotAStateError(f"negative eigenvalue {lo:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def single(cls, matrix) -> "FockDensityOperator":
        matrix = np.asarray(matrix)
        return cls(1, matrix.shape[0], matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def padded(self, cutoff: int) -> "FockDensityOperator":
        """Embed into a larger cutoff by zero-padding the higher Fock levels."""
        if cutoff < self.cutoff:
            raise CutoffError(f"cannot pad cutoff {self.cutoff} down to {cutoff}")
        if cutoff == self.cutoff:
            return self
        D = self.cutoff
        if self.mode_count == 1:
            m = np.zeros((cutoff, cutoff), dtype=complex)
            m[:D, :D] = self.matrix
        else:
            t = self.matrix.reshape(D, D, D, D)
            big = np.zeros((cutoff,) * 4, dtype=complex)
            big[:D, :D, :D, :D] = t
            m = big.reshape(cutoff**2, cutoff**2)
        return _trusted(self.mode_count, cutoff, m)

    def support(self) -> int:
        """Number of Fock levels (per mode) that carry any population."""
        diag = self.populations()
        if self.mode_count == 2:
            D = self.cutoff
            d2 = diag.reshape(D, D)
            diag = np.maximum(d2.sum(axis=1), d2.sum(axis=0))
        nz = np.nonzero(diag > 0.0)[0]
        return int(nz[-1]) + 1 if nz.size else 1

    def populations(self) -> np.ndarray:
        return np.clip(np.diagonal(self.matrix).real, 0.0, None)

    def __repr__(self):
        return f"FockDensityOperator(mode_count={self.mode_count}, cutoff={self.cutoff})"


def _trusted(mode_count: int, cutoff: int, matrix: np.ndarray) -> FockDensityOperator:
    """Build without the O(d^3) spectrum check, for states PSD by construction."""
    return FockDensityOperator(mode_count, cutoff, matrix, validate=False)


def _from_ket(psi: np.ndarray) -> FockDensityOperator:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return _trusted(1, psi.size, np.outer(psi, psi.conj()))


def _from_populations(p: np.ndarray) -> FockDensityOperator:
    p = np.asarray(p, dtype=float)
    return _trusted(1, p.size, np.diag(p / p.sum()).astype(complex))


def _check_cutoff(D: int):
    if int(D) != D or D < 2:
        raise DomainError(f"cutoff must be an integer >= 2, got {D}")


def _required_cutoff(tail_at, tol: float, start: int) -> int:
    D = max(start, 2)
    while tail_at(D) > tol:
        D = int(np.ceil(D * 1.25)) + 1
        if D > 1_000_000:
            break
    return D


# ---------------------------------------------------------------------------
# State constructors
# ---------------------------------------------------------------------------


def make_number_state(i: int, D: int) -> FockDensityOperator:
    _check_cutoff(D)
    if not 0 <= i < D:
        raise CutoffError(f"number state |{i}> does not fit below cutoff {D}")
    psi = np.zeros(D, dtype=complex)
    psi[i] = 1.0
    return _from_ket(psi)


def coherent_amplitudes(alpha: complex, D: int) -> np.ndarray:
    """Fock amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)`` for n < D, by recursion."""
    c = np.empty(D, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, D):
        c[n] = c[n - 1] * alpha / np.sqrt(n)
    return c


def make_coherent_state(alpha: complex, D: int, tail_tol: float = TAIL_TOL) -> FockDensityOperator:
    _check_cutoff(D)
    lam = abs(alpha) ** 2
    # P(Poisson(lam) >= D) is the regularized lower incomplete gamma P(D, lam)
    tail = float(special.gammainc(D, lam)) if lam > 0 else 0.0
    if tail > tail_tol:
        need = _required_cutoff(lambda d: special.gammainc(d, lam), tail_tol, D)
        raise TruncationError(
            f"coherent state with |alpha|^2={lam:g} leaves tail mass {tail:.2e} above "
            f"cutoff {D}; use cutoff >= {need}",
            required_cutoff=need,
        )
    return _from_ket(coherent_amplitudes(complex(alpha), D))


def make_thermal_state(N: float, D: int, tail_tol: float = TAIL_TOL) -> FockDensityOperator:
    """Bose-Einstein diagonal state ``sum_i N^i/(N+1)^(i+1) |i><i|`` truncated at D."""
    _check_cutoff(D)
    if N < 0:
        raise DomainError(f"mean photon number must be >= 0, got {N}")
    if N == 0:
        return make_number_state(0, D)
    q = N / (N + 1.0)
    tail = q**D
    if tail > tail_tol:
        need = int(np.ceil(np.log(tail_tol) / np.log(q)))
        raise TruncationError(
            f"thermal state N={N:g} leaves tail mass {tail:.2e} above cutoff {D}; "
            f"use cutoff >= {need}",
            required_cutoff=need,
        )
    return _from_populations(q ** np.arange(D) / (N + 1.0))


def squeezed_vacuum_amplitudes(r: float, D: int) -> np.ndarray:
    """Even-photon series of the squeezed vacuum with x anti-squeezed by ``e^r``."""
    c = np.zeros(D, dtype=float)
    c[0] = 1.0 / np.sqrt(np.cosh(r))
    t = np.tanh(r)
    for n in range(2, D, 2):
        c[n] = c[n - 2] * t * np.sqrt((n - 1) / n)
    return c


def make_squeezed_vacuum_state(
    r: float, D: int, tail_tol: float = TAIL_TOL, phi: float = 0.0
) -> FockDensityOperator:
    """Squeezed vacuum rotated counterclockwise by ``phi`` in phase space, i.e. by ``exp(i phi N)``."""
    _check_cutoff(D)
    c = squeezed_vacuum_amplitudes(r, D)
    tail = max(0.0, 1.0 - float(np.sum(c**2)))
    if tail > tail_tol:
        need = _required_cutoff(
            lambda d: 1.0 - np.sum(squeezed_vacuum_amplitudes(r, d) ** 2), tail_tol, D
        )
        raise TruncationError(
            f"squeezed vacuum r={r:g} leaves tail mass {tail:.2e} above cutoff {D}; "
            f"use cutoff >= {need}",
            required_cutoff=need,
        )
    return _from_ket(c * np.exp(1j * phi * np.arange(D)))


def displacement_operator(alpha: complex, D: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, D)), 1)
    return linalg.expm(alpha * a.conj().T - np.conj(alpha) * a)


def make_displaced_thermal_state(
    N: float, alpha: complex, D: int, tail_tol: float = TAIL_TOL
) -> FockDensityOperator:
    """``D(alpha) rho_T(N) D(alpha)^dag`` computed in a padded space, then cut to D."""
    _check_cutoff(D)
    big = 2 * D + 20
    rho_t = make_thermal_state(N, big, tail_tol=1.0).matrix
    disp = displacement_operator(alpha, big)
    full = disp @ rho_t @ disp.conj().T
    block = full[:D, :D]
    tail = 1.0 - np.trace(block).real
    if tail > tail_tol:
        raise TruncationError(
            f"displaced thermal state leaves tail mass {tail:.2e} above cutoff {D}"
        )
    return FockDensityOperator(1, D, block / np.trace(block).real)


def make_random_pure_state(seed, D: int) -> FockDensityOperator:
    """Haar-random pure state: normalized i.i.d. standard complex normal vector."""
    _check_cutoff(D)
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(D) + 1j * rng.standard_normal(D)
    return _from_ket(psi)


def make_random_density(seed, D: int) -> FockDensityOperator:
    """Ginibre-ensemble mixed state ``G G^dag / tr``."""
    _check_cutoff(D)
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
    m = G @ G.conj().T
    return _trusted(1, D, m / np.trace(m).real)


def _spectrum_entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def _tempered(logp: np.ndarray, beta: float) -> np.ndarray:
    w = beta * logp
    w -= w.max()
    e = np.exp(w)
    return e / e.sum()


def make_fixed_entropy_density(
    seed, D: int, S_target: float, rotate: bool = True
) -> FockDensityOperator:
    """Random density operator whose von Neumann entropy equals ``S_target``.

    A random spectrum ``p`` is tempered to ``p**beta / Z`` with ``beta`` found
    by bisection, then conjugated by a Haar unitary (skipped when
    ``rotate=False``, leaving a Fock-diagonal state).
    """
    _check_cutoff(D)
    ln_d = np.log(D)
    if not (0.0 <= S_target <= ln_d + 1e-12):
        raise DomainError(f"target entropy {S_target} outside [0, ln {D}]")
    rng = np.random.default_rng(seed)
    if S_target == 0.0:
        if not rotate:
            return make_number_state(int(rng.integers(D)), D)
        return make_random_pure_state(rng, D)
    if S_target >= ln_d - 1e-12:
        return _trusted(1, D, np.eye(D, dtype=complex) / D)

    for _ in range(100):
        p = rng.dirichlet(np.ones(D))
        if np.min(p) <= 0.0 or np.ptp(p) == 0.0:
            continue
        logp = np.log(p)
        lo, hi = 0.0, 1.0
        h_lo, h_hi = ln_d, _spectrum_entropy(_tempered(logp, hi))
        while h_hi > S_target:
            lo, h_lo = hi, h_hi
            hi *= 2.0
            h_hi = _spectrum_entropy(_tempered(logp, hi))
            if hi > 1e12:
                break
        monotone = h_hi <= S_target <= h_lo
        for _ in range(300):
            if not monotone:
                break
            mid = 0.5 * (lo + hi)
            h_mid = _spectrum_entropy(_tempered(logp, mid))
            if not (h_hi - 1e-14 <= h_mid <= h_lo + 1e-14):
                monotone = False
                break
            if abs(h_mid - S_target) <= 1e-13 or mid in (lo, hi):
                lo = hi = mid
                break
            if h_mid > S_target:
                lo, h_lo = mid, h_mid
            else:
                hi, h_hi = mid, h_mid
        if not monotone:
            continue
        spec = _tempered(logp, 0.5 * (lo + hi))
        if abs(_spectrum_entropy(spec) - S_target) > 1e-10:
            continue
        if rotate:
            U = unitary_group.rvs(D, random_state=rng)
            m = (U * spec) @ U.conj().T
        else:
            m = np.diag(spec).astype(complex)
        return _trusted(1, D, m)
    raise RuntimeError("could not reach the target entropy after 100 spectra")


def tensor(a: FockDensityOperator, b: FockDensityOperator) -> FockDensityOperator:
    """Two-mode product state ``a (x) b``; the smaller cutoff is padded up."""
    if a.mode_count != 1 or b.mode_count != 1:
        raise DimensionMismatchError("tensor expects two single-mode states")
    D = max(a.cutoff, b.cutoff)
    a, b = a.padded(D), b.padded(D)
    return _trusted(2, D, np.kron(a.matrix, b.matrix))


# ---------------------------------------------------------------------------
# Functionals
# ---------------------------------------------------------------------------


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, FockDensityOperator):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def clipped_spectrum(rho) -> np.ndarray:
    """Eigenvalues with the ``[-1e-10, 0)`` band clipped to 0 and renormalized."""
    lam = np.linalg.eigvalsh(_as_matrix(rho))
    if lam.size and lam[0] < -EIG_CLIP:
        raise NotAStateError(f"negative eigenvalue {lam[0]:.3e}")
    lam = np.clip(lam, 0.0, None)
    return lam / lam.sum()


def von_neumann_entropy(rho) -> float:
    """``-tr(rho ln rho)`` in nats."""
    lam = clipped_spectrum(rho)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam))) + 0.0


def mean_photon_number(rho: FockDensityOperator, mode: int = 0) -> float:
    if not 0 <= mode < rho.mode_count:
        raise DomainError(f"mode {mode} out of range for {rho.mode_count}-mode state")
    D = rho.cutoff
    pops = rho.populations()
    n = np.arange(D, dtype=float)
    if rho.mode_count == 2:
        pops = pops.reshape(D, D).sum(axis=1 - mode)
    return float(pops @ n)


def mean_field(rho: FockDensityOperator) -> complex:
    """``tr(rho a)`` for a single-mode state."""
    a = np.diag(np.sqrt(np.arange(1, rho.cutoff)), 1)
    return complex(np.trace(rho.matrix @ a))


@dataclass(frozen=True)
class EnsembleMember:
    probability: float
    state: FockDensityOperator


def holevo_information(ensemble: Iterable) -> float:
    """``S(sum_j p_j s_j) - sum_j p_j S(s_j)`` for a finite ensemble."""
    members = [m if isinstance(m, EnsembleMember) else EnsembleMember(*m) for m in ensemble]
    if not members:
        raise DomainError("empty ensemble")
    probs = np.array([m.probability for m in members], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise DomainError(f"probabilities must be nonnegative and sum to 1, got {probs.sum()!r}")
    shape = members[0].state.matrix.shape
    if any(m.state.matrix.shape != shape for m in members):
        raise DimensionMismatchError("ensemble states have different dimensions")
    avg = sum(p * m.state.matrix for p, m in zip(probs, members))
    chi = von_neumann_entropy(avg) - sum(
        p * von_neumann_entropy(m.state) for p, m in zip(probs, members)
    )
    if chi < -1e-10:
        raise ArithmeticError(f"Holevo information came out negative: {chi}")
    return max(chi, 0.0)


def trace_distance(a: FockDensityOperator, b: FockDensityOperator) -> float:
    """``1/2 ||a - b||_1``; single-mode states of different cutoffs are padded."""
    if a.mode_count != b.mode_count:
        raise DimensionMismatchError("states have different mode counts")
    D = max(a.cutoff, b.cutoff)
    diff = a.padded(D).matrix - b.padded(D).matrix
    return float(min(1.0, 0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff)))))
