"""Covariance-matrix representation of Gaussian bosonic states.

Conventions: quadratures ordered ``(x_1, p_1, ..., x_n, p_n)`` with
``x = (a + a^dag)/sqrt(2)``, hbar = 1, so the vacuum has covariance ``I/2``
and a thermal state with mean photon number N has symplectic eigenvalue
``N + 1/2``.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Sequence

import numpy as np

from .entropy import EpniVerdict, epni_slacks, g
from .errors import DimensionMismatchError, DomainError, NotAStateError


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of ``cov``, ascending, one value per mode."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    if n == 1:
        return np.array([np.sqrt(max(np.linalg.det(cov), 0.0))])
    # eigenvalues of Omega @ cov come in pairs +-i nu
    vals = np.sort(np.abs(np.linalg.eigvals(symplectic_form(n) @ cov).imag))
    return vals[::2]


@dataclass(frozen=True, eq=False)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        mean = np.array(self.mean, dtype=float).ravel()
        cov = np.array(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise DimensionMismatchError(f"covariance must be 2n x 2n, got {cov.shape}")
        if mean.size != cov.shape[0]:
            raise DimensionMismatchError("mean vector and covariance sizes differ")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > 1e-12 * scale:
            raise NotAStateError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if validate:
            n = cov.shape[0] // 2
            lo = np.linalg.eigvalsh(cov + 0.5j * symplectic_form(n))[0]
            if lo < -1e-10 * scale:
                raise NotAStateError(f"covariance violates the uncertainty principle ({lo:.3e})")
            if symplectic_eigenvalues(cov)[0] < 0.5 - 1e-10:
                raise NotAStateError("symplectic eigenvalue below 1/2")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def marginal(self, modes: Sequence[int]) -> "GaussianState":
        idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes]).astype(int)
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)], validate=False)

    def __repr__(self):
        return f"GaussianState(n_modes={self.n_modes})"


def _rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def gaussian_vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))


def gaussian_thermal(N: float) -> GaussianState:
    if N < 0:
        raise DomainError(f"mean photon number must be >= 0, got {N}")
    return GaussianState(np.zeros(2), (N + 0.5) * np.eye(2))


def gaussian_coherent(alpha: complex) -> GaussianState:
    alpha = complex(alpha)
    return GaussianState(np.sqrt(2.0) * np.array([alpha.real, alpha.imag]), 0.5 * np.eye(2))


def gaussian_squeezed_vacuum(r: float, phi: float = 0.0) -> GaussianState:
    """``cov = diag(e^{2r}, e^{-2r}) / 2``, rotated by ``phi`` in phase space."""
    return gaussian_single_mode(N=0.0, r=r, phi=phi)


def gaussian_single_mode(N: float = 0.0, r: float = 0.0, phi: float = 0.0, alpha: complex = 0.0) -> GaussianState:
    """Displaced squeezed thermal state: thermal N, squeeze r at angle phi, displacement alpha.

    The phase convention matches ``exp(i phi a^dag a)`` acting on the Fock
    squeezed vacuum of :func:`bosonlab.fock.make_squeezed_vacuum_state`.
    """
    if N < 0:
        raise DomainError(f"mean photon number must be >= 0, got {N}")
    R = _rotation(phi)
    cov = (N + 0.5) * R @ np.diag([np.exp(2 * r), np.exp(-2 * r)]) @ R.T
    alpha = complex(alpha)
    return GaussianState(np.sqrt(2.0) * np.array([alpha.real, alpha.imag]), cov)


def gaussian_product(*states: GaussianState) -> GaussianState:
    mean = np.concatenate([s.mean for s in states])
    size = mean.size
    cov = np.zeros((size, size))
    k = 0
    for s in states:
        m = s.cov.shape[0]
        cov[k : k + m, k : k + m] = s.cov
        k += m
    return GaussianState(mean, cov, validate=False)


def gaussian_mean_photon_number(state: GaussianState) -> float:
    return float((np.trace(state.cov) + state.mean @ state.mean - state.n_modes) / 2.0)


def gaussian_entropy(state: GaussianState) -> float:
    """Von Neumann entropy ``sum_k g(nu_k - 1/2)`` in nats."""
    nu = symplectic_eigenvalues(state.cov)
    if np.min(nu) < 0.5 - 1e-10:
        raise NotAStateError(f"symplectic eigenvalue {np.min(nu):.6g} below 1/2")
    return float(np.sum(g(np.clip(nu - 0.5, 0.0, None))))


def beamsplitter_symplectic(eta: float, n_modes: int = 1) -> np.ndarray:
    """Orthogonal symplectic map for ``c = sqrt(eta) a + sqrt(1-eta) b``,
    ``e = sqrt(1-eta) a - sqrt(eta) b`` applied mode-wise.

    Input ordering is ``(a_1..a_n, b_1..b_n)``; output ``(c_1..c_n, e_1..e_n)``.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")
    t, s = np.sqrt(eta), np.sqrt(1.0 - eta)
    mix = np.array([[t, s], [s, -t]])
    return np.kron(mix, np.eye(2 * n_modes))


def gaussian_beamsplitter(state_a: GaussianState, state_b: GaussianState, eta: float) -> GaussianState:
    """Joint output of a mode-wise beamsplitter fed ``state_a (x) state_b``."""
    if state_a.n_modes != state_b.n_modes:
        raise DimensionMismatchError("inputs must have the same number of modes")
    S = beamsplitter_symplectic(eta, state_a.n_modes)
    joint = gaussian_product(state_a, state_b)
    return GaussianState(S @ joint.mean, S @ joint.cov @ S.T, validate=False)


def gaussian_epni_check(state_a: GaussianState, state_b: GaussianState, eta: float, descriptor: str = "") -> EpniVerdict:
    """Exact EPnI slacks for Gaussian product inputs (a proven case)."""
    from .entropy import entropy_photon_number

    n = state_a.n_modes
    out = gaussian_beamsplitter(state_a, state_b, eta)
    state_c = out.marginal(range(n))
    states = (state_a, state_b, state_c)
    S = tuple(gaussian_entropy(s) for s in states)
    N = tuple(entropy_photon_number(s) for s in states)
    return epni_slacks(*S, eta=eta, n_modes=n, photon_numbers=N, descriptor=descriptor)
