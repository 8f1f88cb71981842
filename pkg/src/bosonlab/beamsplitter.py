"""Photon-number-conserving beamsplitter on the truncated two-mode Fock space.

The unitary is stored as one block per total-photon-number sector.  With the
default ``"heisenberg"`` convention the induced mode transformation is

    b = sqrt(eta) a + sqrt(1-eta) f
    e = sqrt(1-eta) a - sqrt(eta) f

which is a rotation by ``theta = arccos(sqrt(eta))`` followed by a parity
flip on the second output.  ``convention="rotation"`` drops the flip, which
makes splitters compose additively in ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import sparse

from .errors import DimensionMismatchError, DomainError, PremiseError, TruncationError
from .fock import FockDensityOperator, _trusted, make_number_state, trace_distance

CONVENTIONS = ("heisenberg", "rotation")


@dataclass(frozen=True, eq=False)
class BeamsplitterUnitary:
    eta: float
    cutoff: int
    blocks: tuple
    sectors: tuple
    convention: str = "heisenberg"

    @property
    def theta(self) -> float:
        return float(np.arccos(np.sqrt(self.eta)))

    @cached_property
    def matrix(self) -> sparse.csr_matrix:
        """Full ``D^2 x D^2`` unitary as a sparse matrix."""
        rows, cols, vals = [], [], []
        for idx, B in zip(self.sectors, self.blocks):
            r, c = np.meshgrid(idx, idx, indexing="ij")
            rows.append(r.ravel())
            cols.append(c.ravel())
            vals.append(B.ravel())
        side = self.cutoff**2
        return sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(side, side),
        )

    def apply_to_vectors(self, psi: np.ndarray) -> np.ndarray:
        """Apply to the columns of a ``(D^2, k)`` array of two-mode kets."""
        out = np.empty_like(psi, dtype=complex)
        for idx, B in zip(self.sectors, self.blocks):
            out[idx] = B @ psi[idx]
        return out


def sector_indices(n: int, D: int) -> np.ndarray:
    """Flat indices ``j*D + (n-j)`` of the total-photon-number-n sector, j ascending."""
    j = np.arange(max(0, n - D + 1), min(n, D - 1) + 1)
    return j * D + (n - j)


def _sector_block(n: int, D: int, theta: float, flip: bool) -> np.ndarray:
    j = np.arange(max(0, n - D + 1), min(n, D - 1) + 1)
    size = j.size
    # a^dag f |j, n-j> = sqrt(j+1) sqrt(n-j) |j+1, n-j-1>
    coupling = theta * np.sqrt((j[:-1] + 1.0) * (n - j[:-1]))
    gen = np.zeros((size, size))
    gen[np.arange(1, size), np.arange(size - 1)] = coupling
    gen -= gen.T
    # gen is real antisymmetric, so 1j*gen is Hermitian
    w, V = np.linalg.eigh(1j * gen)
    block = (V * np.exp(-1j * w)) @ V.conj().T
    if flip:
        block = ((-1.0) ** (n - j))[:, None] * block
    return block


@lru_cache(maxsize=64)
def _build_cached(eta: float, D: int, convention: str) -> BeamsplitterUnitary:
    theta = float(np.arccos(np.sqrt(eta)))
    flip = convention == "heisenberg"
    sectors, blocks = [], []
    for n in range(2 * D - 1):
        idx = sector_indices(n, D)
        idx.setflags(write=False)
        B = _sector_block(n, D, theta, flip)
        B.setflags(write=False)
        sectors.append(idx)
        blocks.append(B)
    return BeamsplitterUnitary(float(eta), int(D), tuple(blocks), tuple(sectors), convention)


def build_bs_unitary(eta: float, D: int, convention: str = "heisenberg") -> BeamsplitterUnitary:
    """Beamsplitter of transmissivity ``eta`` on two modes of cutoff ``D``.

    Each sector block is the exponential of the tridiagonal generator
    ``theta (a^dag f - a f^dag)`` restricted to that sector.  Sectors with
    total photon number ``n >= D`` are cut by the truncation, so the result
    matches the physical beamsplitter only on inputs with fewer than ``D``
    photons in total; :func:`channel_outputs` pads inputs accordingly.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")
    if int(D) != D or D < 2:
        raise DomainError(f"cutoff must be an integer >= 2, got {D}")
    if convention not in CONVENTIONS:
        raise DomainError(f"unknown convention {convention!r}")
    return _build_cached(float(eta), int(D), convention)


def apply_bs(rho_joint: FockDensityOperator, U: BeamsplitterUnitary) -> FockDensityOperator:
    """``U rho U^dag`` for a two-mode density operator."""
    if rho_joint.mode_count != 2:
        raise DimensionMismatchError("apply_bs expects a two-mode state")
    if rho_joint.cutoff != U.cutoff:
        raise DimensionMismatchError(
            f"state cutoff {rho_joint.cutoff} does not match unitary cutoff {U.cutoff}"
        )
    Um = U.matrix
    left = Um @ rho_joint.matrix
    out = (Um @ left.conj().T).conj().T
    return _trusted(2, U.cutoff, out)


def partial_trace(rho_joint: FockDensityOperator, keep: int) -> FockDensityOperator:
    """Reduced state of mode ``keep`` (0 or 1) of a two-mode operator."""
    if rho_joint.mode_count != 2:
        raise DimensionMismatchError("partial_trace expects a two-mode state")
    D = rho_joint.cutoff
    t = rho_joint.matrix.reshape(D, D, D, D)
    if keep == 0:
        m = np.einsum("ijkj->ik", t)
    elif keep == 1:
        m = np.einsum("ijil->jl", t)
    else:
        raise DomainError(f"mode index must be 0 or 1, got {keep}")
    return _trusted(1, D, m)


def _components(rho: FockDensityOperator, floor: float = 1e-15):
    w, V = np.linalg.eigh(rho.matrix)
    keep = w > floor
    return w[keep], V[:, keep]


def channel_outputs(rho_a: FockDensityOperator, rho_f: FockDensityOperator, eta: float):
    """Both output marginals ``(rho_B, rho_E)`` of the splitter fed ``rho_a (x) rho_f``.

    The joint cutoff is raised to ``s_a + s_f - 1`` (``s`` = occupied Fock
    levels per input) so every sector the input touches is complete and the
    result is exact for the given inputs.  The product input is expanded in
    eigenvectors and each pure component is propagated as a ket.
    """
    if rho_a.mode_count != 1 or rho_f.mode_count != 1:
        raise DimensionMismatchError("channel_outputs expects single-mode inputs")
    Dj = max(rho_a.cutoff, rho_f.cutoff, rho_a.support() + rho_f.support() - 1, 2)
    U = build_bs_unitary(eta, Dj)
    wa, Va = _components(rho_a.padded(Dj))
    wf, Vf = _components(rho_f.padded(Dj))
    weights = np.outer(wa, wf).ravel()
    psi = np.einsum("ai,bk->abik", Va, Vf).reshape(Dj * Dj, -1)
    out = U.apply_to_vectors(psi) * np.sqrt(weights)
    T = out.reshape(Dj, Dj, -1)
    m_b = T.reshape(Dj, -1)
    m_e = T.transpose(1, 0, 2).reshape(Dj, -1)
    rho_b = m_b @ m_b.conj().T
    rho_e = m_e @ m_e.conj().T
    total = np.trace(rho_b).real
    if abs(total - weights.sum()) > 1e-9 or abs(total - 1.0) > 1e-9:
        raise TruncationError(f"beamsplitter output lost trace: {1.0 - total:.3e}")
    return _trusted(1, Dj, rho_b / total), _trusted(1, Dj, rho_e / total)


@dataclass(frozen=True)
class DegradedReport:
    trace_distance: float
    passed: bool
    degrading_eta: float
    eta: float


def verify_degraded(rho_a: FockDensityOperator, eta: float, tol: float = 1e-6) -> DegradedReport:
    """Check that Eve's state equals Bob's state sent through a ``(1-eta)/eta`` splitter."""
    if not 0.5 < eta <= 1.0:
        raise PremiseError(f"the wiretap channel is degraded only for eta > 1/2, got {eta}")
    vac = make_number_state(0, 2)
    rho_b, rho_e = channel_outputs(rho_a, vac, eta)
    eta_deg = (1.0 - eta) / eta
    rho_e_prime, _ = channel_outputs(rho_b, vac, eta_deg)
    d = trace_distance(rho_e, rho_e_prime)
    return DegradedReport(trace_distance=d, passed=d <= tol, degrading_eta=eta_deg, eta=eta)
