"""Randomized stress campaigns for the EPnI and the two minimum-output-entropy conjectures.

Every trial is a pure function of ``(master_seed, trial_id)``: the trial
seed is drawn from ``numpy.random.SeedSequence(master_seed, spawn_key=(trial_id,))``,
so reports do not depend on how trials are spread over workers.

Input states are described by :class:`StateSpec` records so a flagged trial
can be rebuilt at twice the cutoff.  Any slack below the tolerance is
refined that way; a refinement that moves the slack by more than ten times
the tolerance marks the trial as a truncation artifact, otherwise a
refined slack still below tolerance is a confirmed violation.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import optimize, special

from . import fock
from .beamsplitter import channel_outputs
from .entropy import EpniVerdict, epni_evaluate, g
from .errors import ConfigError, InvalidTrialError, PremiseError, TruncationError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CONJECTURES = ("epni", "moe1", "moe2")
PURE_FAMILIES = ("vacuum", "number", "coherent", "squeezed", "haar", "haar_even")
EPNI_FAMILIES = ("haar", "ginibre", "thermal", "displaced_thermal", "squeezed", "coherent")
MOE2_FAMILIES = ("fixed_entropy", "fixed_entropy_fock", "thermal")
DEFAULT_FAMILIES = {
    "epni": ("ginibre/ginibre",),
    "moe1": ("haar", "haar_even", "number", "coherent", "squeezed", "vacuum"),
    "moe2": ("fixed_entropy", "fixed_entropy_fock", "thermal"),
}


# ---------------------------------------------------------------------------
# State samplers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateSpec:
    """Recipe for a single-mode input that can be rebuilt at any cutoff >= ``native_cutoff``."""

    family: str
    params: dict
    native_cutoff: int

    def describe(self) -> str:
        inner = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(self.params.items()))
        return f"{self.family}({inner})"


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _coherent_max_sq(D: int, tol: float) -> float:
    """Largest |alpha|^2 whose Poisson tail above D stays below tol."""
    f = lambda lam: special.gammainc(D, lam) - tol  # noqa: E731
    return float(optimize.brentq(f, 0.0, 10.0 * D + 10.0, xtol=1e-14))


def _thermal_max(D: int, tol: float) -> float:
    q = tol ** (1.0 / D)
    return q / (1.0 - q)


def _squeeze_max(D: int, tol: float) -> float:
    tail = lambda r: 1.0 - np.sum(fock.squeezed_vacuum_amplitudes(r, D) ** 2) - tol  # noqa: E731
    return float(optimize.brentq(tail, 0.0, 10.0, xtol=1e-12))


def sample_spec(family: str, rng: np.random.Generator, D: int, tail_tol: float = fock.TAIL_TOL, **kw) -> StateSpec:
    """Draw a random member of ``family`` representable at cutoff ``D``.

    Amplitude ranges are always sized for the strict default tail bound;
    ``tail_tol`` is only stored for the later build.
    """
    seed = int(rng.integers(2**63 - 1))
    size_tol = fock.TAIL_TOL
    if family == "vacuum":
        p = {}
    elif family == "number":
        p = {"n": int(rng.integers(D))}
    elif family == "coherent":
        amp = math.sqrt(0.9 * _coherent_max_sq(D, size_tol)) * math.sqrt(rng.uniform())
        ph = rng.uniform(0, 2 * math.pi)
        p = {"alpha_re": amp * math.cos(ph), "alpha_im": amp * math.sin(ph)}
    elif family == "thermal":
        N = kw["N"] if "N" in kw else float(rng.uniform(0.0, 0.9 * _thermal_max(D, size_tol)))
        p = {"N": float(N)}
    elif family == "displaced_thermal":
        N = float(rng.uniform(0.0, 0.3 * _thermal_max(D, size_tol)))
        amp = math.sqrt(0.2 * _coherent_max_sq(D, size_tol)) * math.sqrt(rng.uniform())
        ph = rng.uniform(0, 2 * math.pi)
        p = {"N": N, "alpha_re": amp * math.cos(ph), "alpha_im": amp * math.sin(ph)}
    elif family == "squeezed":
        p = {
            "r": float(rng.uniform(0.0, 0.9 * _squeeze_max(D, size_tol))),
            "phi": float(rng.uniform(0, 2 * math.pi)),
        }
    elif family in ("haar", "haar_even", "ginibre"):
        p = {"seed": seed}
    elif family in ("fixed_entropy", "fixed_entropy_fock"):
        p = {"seed": seed, "S": float(kw["S"])}
    else:
        raise ConfigError(f"unknown sampler family {family!r}")
    if family in ("thermal", "coherent", "displaced_thermal", "squeezed"):
        p["tail_tol"] = tail_tol
    return StateSpec(family, p, D)


def build_state(spec: StateSpec, D: int | None = None) -> fock.FockDensityOperator:
    """Materialize ``spec`` at cutoff ``D`` (defaults to its native cutoff)."""
    D = spec.native_cutoff if D is None else D
    p, fam, nat = spec.params, spec.family, spec.native_cutoff
    tol = p.get("tail_tol", fock.TAIL_TOL)
    if fam == "vacuum":
        return fock.make_number_state(0, D)
    if fam == "number":
        return fock.make_number_state(p["n"], D)
    if fam == "coherent":
        return fock.make_coherent_state(complex(p["alpha_re"], p["alpha_im"]), D, tail_tol=tol)
    if fam == "thermal":
        return fock.make_thermal_state(p["N"], D, tail_tol=tol)
    if fam == "displaced_thermal":
        return fock.make_displaced_thermal_state(
            p["N"], complex(p["alpha_re"], p["alpha_im"]), D, tail_tol=tol
        )
    if fam == "squeezed":
        return fock.make_squeezed_vacuum_state(p["r"], D, tail_tol=tol, phi=p["phi"])
    # random families live on their native cutoff and are zero-padded
    if fam == "haar":
        rho = fock.make_random_pure_state(p["seed"], nat)
    elif fam == "haar_even":
        rng = np.random.default_rng(p["seed"])
        psi = np.zeros(nat, dtype=complex)
        k = (nat + 1) // 2
        psi[::2] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        rho = fock._from_ket(psi)
    elif fam == "ginibre":
        rho = fock.make_random_density(p["seed"], nat)
    elif fam == "fixed_entropy":
        rho = fock.make_fixed_entropy_density(p["seed"], nat, p["S"])
    elif fam == "fixed_entropy_fock":
        rho = fock.make_fixed_entropy_density(p["seed"], nat, p["S"], rotate=False)
    else:
        raise ConfigError(f"unknown sampler family {fam!r}")
    return rho.padded(D)


# ---------------------------------------------------------------------------
# Trial records
# ---------------------------------------------------------------------------


@dataclass
class StressTrialRecord:
    trial_id: int
    conjecture: str
    seed: int | None
    eta: float
    cutoff: int
    K: float | None
    inputs: dict
    s_out: float
    baseline: float
    slack: float
    verdict: EpniVerdict | None = None
    mean_field: float | None = None
    refined: bool = False
    refined_slack: float | None = None
    classification: str = "ok"
    sign_consistent: bool = True
    third_form_implied: bool = True

    def to_row(self) -> dict:
        v = self.verdict
        return {
            "trial_id": self.trial_id,
            "conjecture": self.conjecture,
            "seed": self.seed,
            "eta": self.eta,
            "cutoff": self.cutoff,
            "K": self.K,
            "inputs": "; ".join(f"{k}:{d}" for k, d in self.inputs.items()),
            "s_out": self.s_out,
            "baseline": self.baseline,
            "slack": self.slack,
            "n_form_slack": v.n_form_slack if v else None,
            "s_form_slack": v.s_form_slack if v else None,
            "third_form_slack": v.third_form_slack if v else None,
            "mean_field": self.mean_field,
            "refined": self.refined,
            "refined_slack": self.refined_slack,
            "classification": self.classification,
            "sign_consistent": self.sign_consistent,
        }


def _require_pure(rho: fock.FockDensityOperator):
    if fock.von_neumann_entropy(rho) > 1e-9:
        raise PremiseError("moe1 trials require a pure input on mode a")


def moe1_trial(psi_a: fock.FockDensityOperator, K: float, eta: float, D: int, tail_tol: float = fock.TAIL_TOL) -> StressTrialRecord:
    """Output entropy for ``psi_a (x) thermal(K)`` against the vacuum baseline ``g((1-eta) K)``."""
    _require_pure(psi_a)
    rho_b = fock.make_thermal_state(K, D, tail_tol=tail_tol)
    rho_c, _ = channel_outputs(psi_a.padded(max(D, psi_a.cutoff)), rho_b, eta)
    s_out = fock.von_neumann_entropy(rho_c)
    base = g((1.0 - eta) * K)
    return StressTrialRecord(
        trial_id=0, conjecture="moe1", seed=None, eta=eta, cutoff=D, K=K,
        inputs={"a": "given", "b": f"thermal(N={K:.6g})"},
        s_out=s_out, baseline=base, slack=s_out - base,
        mean_field=abs(fock.mean_field(psi_a)),
    )


def moe2_trial(rho_b: fock.FockDensityOperator, K: float, eta: float, D: int) -> StressTrialRecord:
    """Output entropy for ``vacuum (x) rho_b`` with ``S(rho_b) = g(K)``."""
    s_b = fock.von_neumann_entropy(rho_b)
    if abs(s_b - g(K)) > 1e-6:
        raise InvalidTrialError(f"rho_b has entropy {s_b:.9g}, expected g(K) = {g(K):.9g}")
    vac = fock.make_number_state(0, max(D, 2))
    rho_c, _ = channel_outputs(vac, rho_b, eta)
    s_out = fock.von_neumann_entropy(rho_c)
    base = g((1.0 - eta) * K)
    return StressTrialRecord(
        trial_id=0, conjecture="moe2", seed=None, eta=eta, cutoff=D, K=K,
        inputs={"a": "vacuum", "b": "given"},
        s_out=s_out, baseline=base, slack=s_out - base,
    )


def epni_trial(family_a: str, family_b: str, eta: float, D: int, seed: int, tail_tol: float = fock.TAIL_TOL) -> StressTrialRecord:
    """Draw independent inputs from the two families and evaluate all EPnI forms."""
    rng = np.random.default_rng(seed)
    spec_a = sample_spec(family_a, rng, D, tail_tol)
    spec_b = sample_spec(family_b, rng, D, tail_tol)
    rec = _epni_from_specs(spec_a, spec_b, eta, D)
    rec.seed = seed
    return rec


def _epni_from_specs(spec_a: StateSpec, spec_b: StateSpec, eta: float, D: int) -> StressTrialRecord:
    rho_a, rho_b = build_state(spec_a, D), build_state(spec_b, D)
    desc = f"{spec_a.describe()} x {spec_b.describe()}"
    v = epni_evaluate(rho_a, rho_b, eta, descriptor=desc)
    return StressTrialRecord(
        trial_id=0, conjecture="epni", seed=None, eta=eta, cutoff=D, K=None,
        inputs={"a": spec_a.describe(), "b": spec_b.describe()},
        s_out=v.entropies[2], baseline=v.entropies[2] - v.s_form_slack, slack=v.n_form_slack,
        verdict=v, sign_consistent=bool(v.sign_consistent()),
        third_form_implied=bool(v.third_form_implied()),
    )


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CampaignConfig:
    conjecture: str
    trials: int = 100
    cutoff: int = 6
    etas: tuple = (0.5,)
    Ks: tuple = (1.0,)
    master_seed: int = 0
    tolerance: float = -1e-9
    workers: int = 1
    families: tuple = ()
    thermal_tail_tol: float = fock.TAIL_TOL

    def __post_init__(self):
        object.__setattr__(self, "etas", tuple(float(e) for e in self.etas))
        object.__setattr__(self, "Ks", tuple(float(k) for k in self.Ks))
        if not self.families:
            object.__setattr__(self, "families", DEFAULT_FAMILIES.get(self.conjecture, ()))
        object.__setattr__(self, "families", tuple(self.families))

    def validate(self) -> None:
        if self.conjecture not in CONJECTURES:
            raise ConfigError(f"conjecture must be one of {CONJECTURES}, got {self.conjecture!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trial count must be a positive integer")
        if int(self.cutoff) != self.cutoff or self.cutoff < 2:
            raise ConfigError("cutoff must be an integer >= 2")
        if not self.etas or any(not 0.0 <= e <= 1.0 for e in self.etas):
            raise ConfigError("eta grid must be nonempty with values in [0, 1]")
        if self.conjecture != "epni" and (not self.Ks or any(k < 0 for k in self.Ks)):
            raise ConfigError("K grid must be nonempty with nonnegative values")
        if self.workers < 1:
            raise ConfigError("worker count must be >= 1")
        if self.tolerance > 0:
            raise ConfigError("violation tolerance must be <= 0")
        if not self.families:
            raise ConfigError("at least one sampler family is required")
        for fam in self.families:
            if self.conjecture == "epni":
                parts = fam.split("/")
                if len(parts) != 2 or any(p not in EPNI_FAMILIES for p in parts):
                    raise ConfigError(f"epni families look like 'ginibre/haar'; got {fam!r}")
            elif self.conjecture == "moe1" and fam not in PURE_FAMILIES:
                raise ConfigError(f"moe1 needs a pure-state family from {PURE_FAMILIES}; got {fam!r}")
            elif self.conjecture == "moe2" and fam not in MOE2_FAMILIES:
                raise ConfigError(f"moe2 family must be one of {MOE2_FAMILIES}; got {fam!r}")
        if self.conjecture == "moe2":
            for K in self.Ks:
                if g(K) > math.log(self.cutoff):
                    raise ConfigError(f"g(K={K}) exceeds ln(cutoff); raise the cutoff")
        if self.conjecture in ("moe1", "moe2"):
            for K in self.Ks:
                try:
                    fock.make_thermal_state(K, self.cutoff, tail_tol=self.thermal_tail_tol)
                except TruncationError as exc:
                    raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = asdict(self)
        d["etas"], d["Ks"], d["families"] = list(self.etas), list(self.Ks), list(self.families)
        return d


def trial_seed(master_seed: int, trial_id: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial_id,))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _moe_from_specs(conj: str, spec: StateSpec, K: float, eta: float, D: int, tail_tol: float) -> StressTrialRecord:
    rho = build_state(spec, D)
    if conj == "moe1":
        rec = moe1_trial(rho, K, eta, D, tail_tol=tail_tol)
        rec.inputs = {"a": spec.describe(), "b": f"thermal(N={K:.6g})"}
    else:
        rec = moe2_trial(rho, K, eta, D)
        rec.inputs = {"a": "vacuum", "b": spec.describe()}
    return rec


def run_trial(config: CampaignConfig, trial_id: int) -> StressTrialRecord:
    """Execute one trial, including doubled-cutoff refinement when flagged."""
    seed = trial_seed(config.master_seed, trial_id)
    rng = np.random.default_rng(seed)
    n_eta = len(config.etas)
    eta = config.etas[trial_id % n_eta]
    K = config.Ks[(trial_id // n_eta) % len(config.Ks)] if config.Ks else None
    family = config.families[int(rng.integers(len(config.families)))]
    D = config.cutoff
    tt = config.thermal_tail_tol

    if config.conjecture == "epni":
        fa, fb = family.split("/")
        specs = (sample_spec(fa, rng, D, tt), sample_spec(fb, rng, D, tt))
        run: Callable[[int], StressTrialRecord] = lambda d: _epni_from_specs(*specs, eta, d)  # noqa: E731
    else:
        if config.conjecture == "moe2":
            extra = {"S": g(K)} if family.startswith("fixed_entropy") else {"N": K}
        else:
            extra = {}
        spec = sample_spec(family, rng, D, tt, **extra)
        run = lambda d: _moe_from_specs(config.conjecture, spec, K, eta, d, tt)  # noqa: E731

    rec = run(D)
    rec.trial_id, rec.seed, rec.eta, rec.K = trial_id, seed, eta, K
    if rec.slack < config.tolerance:
        refined = run(2 * D)
        rec.refined, rec.refined_slack = True, refined.slack
        if abs(refined.slack - rec.slack) > 10.0 * abs(config.tolerance):
            rec.classification = "truncation_artifact"
        elif refined.slack < config.tolerance:
            rec.classification = "violation"
        else:
            rec.classification = "truncation_artifact"
    return rec


def _run_chunk(args):
    config, ids = args
    return [run_trial(config, i) for i in ids]


def baseline_regression(config: CampaignConfig, tol: float = 1e-6) -> float:
    """Check vacuum (x) thermal(K) reproduces ``g((1-eta) K)`` on the whole grid."""
    worst = 0.0
    for K in config.Ks:
        D = config.cutoff
        if K > 0:
            D = max(D, int(math.ceil(math.log(fock.TAIL_TOL) / math.log(K / (K + 1.0)))))
        vac = fock.make_number_state(0, D)
        th = fock.make_thermal_state(K, D)
        for eta in config.etas:
            rho_c, _ = channel_outputs(vac, th, eta)
            err = abs(fock.von_neumann_entropy(rho_c) - g((1.0 - eta) * K))
            worst = max(worst, err)
    if worst > tol:
        raise RuntimeError(f"baseline regression failed: max error {worst:.3e} > {tol:g}")
    return worst


@dataclass
class CampaignReport:
    config: CampaignConfig
    records: list
    runtime: float | None = None
    baseline_error: float | None = None
    timestamp: str | None = field(default=None)

    @property
    def slacks(self) -> np.ndarray:
        return np.array([r.slack for r in self.records], dtype=float)

    @property
    def min_slack(self) -> float:
        return float(np.min(self.slacks))

    @property
    def argmin(self) -> StressTrialRecord:
        return self.records[int(np.argmin(self.slacks))]

    @property
    def violations(self) -> list:
        return [r for r in self.records if r.classification == "violation"]

    @property
    def artifacts(self) -> list:
        return [r for r in self.records if r.classification == "truncation_artifact"]

    @property
    def sign_failures(self) -> list:
        return [r for r in self.records if not r.sign_consistent]

    def histogram(self, bins: int = 20) -> dict:
        counts, edges = np.histogram(self.slacks, bins=bins)
        return {"counts": counts.tolist(), "edges": [float(e) for e in edges]}

    def to_dict(self, include_timing: bool = True) -> dict:
        a = self.argmin
        d = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "trials_summarized": len(self.records),
            "min_slack": self.min_slack,
            "argmin": {"trial_id": a.trial_id, "seed": a.seed, "eta": a.eta, "K": a.K, "inputs": a.inputs},
            "violations": [r.to_row() for r in self.violations],
            "truncation_artifacts": [r.to_row() for r in self.artifacts],
            "sign_consistency_failures": len(self.sign_failures),
            "third_form_implication_failures": sum(not r.third_form_implied for r in self.records),
            "baseline_error": self.baseline_error,
            "histogram": self.histogram(),
            "runtime": self.runtime if include_timing else None,
        }
        if include_timing and self.timestamp:
            d["timestamp"] = self.timestamp
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        rows = [r.to_row() for r in self.records]
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_cell(v) for k, v in row.items()})
        return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return "" if v is None else v


def run_campaign(config: CampaignConfig) -> CampaignReport:
    """Run every trial of ``config`` and aggregate the results."""
    config.validate()
    start = time.perf_counter()
    baseline_error = baseline_regression(config) if config.conjecture != "epni" else None
    ids = list(range(config.trials))
    if config.workers == 1:
        records = [run_trial(config, i) for i in ids]
    else:
        n_chunks = config.workers * 4
        chunks = [ids[k::n_chunks] for k in range(n_chunks) if ids[k::n_chunks]]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_run_chunk, [(config, c) for c in chunks]))
        records = sorted((r for part in parts for r in part), key=lambda r: r.trial_id)
    for r in records:
        if r.classification == "violation":
            log.warning("confirmed violation in trial %d: %s", r.trial_id, r.inputs)
    return CampaignReport(
        config=config,
        records=records,
        runtime=time.perf_counter() - start,
        baseline_error=baseline_error,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%S"),
    )


def reproduce_trial(config: CampaignConfig, trial_id: int) -> StressTrialRecord:
    """Re-run a single trial of a campaign, e.g. to inspect a reported counterexample."""
    return run_trial(replace(config, workers=1), trial_id)
