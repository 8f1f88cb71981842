"""Command-line front end.

Exit codes: 0 success, 1 confirmed conjecture violation, 2 usage or
configuration error.  Every artifact carries ``schema_version``; CSV output
uses 12 significant digits.  A config file holds flat ``key = value`` lines
using the long flag names (``nbar = 1,10``); command-line flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time

from . import capacities as cap
from .beamsplitter import verify_degraded
from .classical_epi import GaussianVectorSpec, epi_gaussian_slacks
from .conjectures import SCHEMA_VERSION, CampaignConfig, run_campaign, sample_spec, build_state
from .errors import BosonLabError, ConfigError, DivergenceError, PremiseError
from .powerfill import allocate

import numpy as np

log = logging.getLogger("bosonlab")

CAPACITY_COLUMNS = [
    "eta", "n_bar", "n_noise", "shannon", "homodyne", "heterodyne",
    "pure_loss", "thermal_lower", "privacy", "privacy_asymptote",
]
NAT_COLUMNS = set(CAPACITY_COLUMNS[3:])
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
PRIVACY_NOTE = "privacy is a conjectured capacity; it assumes the thermal minimum-output-entropy conjecture (moe2)"


class UsageError(Exception):
    pass


def _floats(text) -> list:
    if text is None:
        return []
    if isinstance(text, (list, tuple)):
        return [float(t) for t in text]
    return [float(t) for t in str(text).replace(";", ",").split(",") if t.strip()]


def _words(text) -> list:
    if text is None:
        return []
    return [t.strip() for t in str(text).split(",") if t.strip()]


def read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def merged(args: argparse.Namespace, key: str, default=None):
    """Flag value if given, else config-file value, else default."""
    v = getattr(args, key, None)
    if v is not None:
        return v
    return args.file_config.get(key, default)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return "" if v is None else str(v)


def _to_unit(value, unit: str):
    if isinstance(value, float) and unit == "bits":
        return value / math.log(2)
    return value


def _header_lines(args) -> list:
    lines = [f"# schema_version: {SCHEMA_VERSION}"]
    if not _no_timestamp(args):
        lines.insert(0, f"# generated_at: {time.strftime('%Y-%m-%dT%H:%M:%S')}")
    return lines


def _no_timestamp(args) -> bool:
    v = merged(args, "no_timestamp", False)
    return v is True or str(v).lower() in ("1", "true", "yes")


def render_table(rows: list, columns: list, args, notes: tuple = ()) -> str:
    fmt = merged(args, "format", "csv")
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "columns": columns, "rows": rows}
        if notes:
            doc["notes"] = list(notes)
        if not _no_timestamp(args):
            doc["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise UsageError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    for line in _header_lines(args) + [f"# note: {n}" for n in notes]:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, args) -> None:
    out = merged(args, "out")
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _unit(args) -> str:
    unit = merged(args, "unit", "nats")
    if unit not in ("nats", "bits"):
        raise UsageError(f"unit must be 'nats' or 'bits', got {unit!r}")
    return unit


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def capacity_rows(etas, nbars, nnoises, unit: str = "nats") -> list:
    if not etas or not nbars or not nnoises:
        raise UsageError("capacity needs nonempty --eta, --nbar and --nnoise grids")
    rows = []
    for eta in etas:
        for nb in nbars:
            for nn in nnoises:
                p = cap.ChannelParams(eta=eta, n_bar=nb, n_noise=nn)
                row = {"eta": eta, "n_bar": nb, "n_noise": nn}
                for name, fn in cap.CAPACITY_FUNCTIONS.items():
                    try:
                        row[name] = _to_unit(fn(p), unit)
                    except DivergenceError:
                        row[name] = "div"
                row["privacy_asymptote"] = _to_unit(cap.c_privacy_asymptotic(eta), unit)
                rows.append(row)
    return rows


def cmd_capacity(args) -> int:
    rows = capacity_rows(
        _floats(merged(args, "eta")),
        _floats(merged(args, "nbar")),
        _floats(merged(args, "nnoise", "0")),
        _unit(args),
    )
    _emit(render_table(rows, CAPACITY_COLUMNS, args, notes=(PRIVACY_NOTE,)), args)
    return EXIT_OK


def cmd_stress(args) -> int:
    conj = merged(args, "conjecture", "epni")
    families = tuple(_words(merged(args, "families")))
    config = CampaignConfig(
        conjecture=conj,
        trials=int(merged(args, "trials", 100)),
        cutoff=int(merged(args, "cutoff", 6 if conj == "epni" else 30)),
        etas=tuple(_floats(merged(args, "eta", "0.3,0.5,0.7"))),
        Ks=tuple(_floats(merged(args, "K", "1"))),
        master_seed=int(merged(args, "seed", 0)),
        tolerance=float(merged(args, "tolerance", -1e-9)),
        workers=int(merged(args, "workers", 1)),
        families=families,
        thermal_tail_tol=float(merged(args, "thermal_tail_tol", 1e-9)),
    )
    report = run_campaign(config)
    text = report.to_json(include_timing=not _no_timestamp(args)) + "\n"
    _emit(text, args)
    trials_csv = merged(args, "trials_csv")
    if trials_csv:
        with open(trials_csv, "w") as fh:
            fh.write("\n".join(_header_lines(args)) + "\n" + report.to_csv())
    n_viol = len(report.violations)
    log.info(
        "%d trials, min slack %.3e, %d truncation artifacts, %d confirmed violations",
        len(report.records), report.min_slack, len(report.artifacts), n_viol,
    )
    return EXIT_VIOLATION if n_viol else EXIT_OK


DEGRADED_FAMILIES = ("coherent", "haar", "number", "thermal", "squeezed")


def cmd_degraded_check(args) -> int:
    etas = _floats(merged(args, "eta", "0.55,0.65,0.75,0.85,0.95"))
    families = _words(merged(args, "families", "coherent,haar"))
    if not families:
        raise UsageError("degraded-check needs at least one input family")
    if not etas:
        raise UsageError("degraded-check needs a nonempty --eta grid")
    for fam in families:
        if fam not in DEGRADED_FAMILIES:
            raise UsageError(f"unknown family {fam!r}; choose from {DEGRADED_FAMILIES}")
    bad = [e for e in etas if e <= 0.5]
    if bad:
        raise PremiseError(f"the channel is degraded only for eta > 1/2; got {bad}")
    D = int(merged(args, "cutoff", 12))
    samples = int(merged(args, "trials", 5))
    tol = float(merged(args, "tolerance", 1e-6))
    rng = np.random.default_rng(int(merged(args, "seed", 0)))
    rows = []
    for fam in families:
        for eta in etas:
            for k in range(samples):
                spec = sample_spec(fam, rng, D)
                rep = verify_degraded(build_state(spec), eta, tol)
                rows.append({
                    "family": fam, "eta": eta, "sample": k, "input": spec.describe(),
                    "degrading_eta": rep.degrading_eta,
                    "trace_distance": rep.trace_distance, "pass": rep.passed,
                })
    worst = max(r["trace_distance"] for r in rows)
    if merged(args, "format", "json") == "csv":
        text = render_table(rows, list(rows[0]), args)
    else:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "max_trace_distance": worst,
            "tolerance": tol,
            "passed": worst <= tol,
            "rows": rows,
        }
        if not _no_timestamp(args):
            doc["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    _emit(text, args)
    return EXIT_OK


def cmd_waterfill(args) -> int:
    etas = _floats(merged(args, "eta"))
    if not etas:
        raise UsageError("waterfill needs per-mode transmissivities via --eta")
    budget = float(merged(args, "nbar", 1.0))
    kind = merged(args, "objective", "pure_loss")
    alloc = allocate(etas, budget, kind)
    unit = _unit(args)
    if merged(args, "format", "json") == "csv":
        rows = [
            {"mode": i, "eta": e, "allocation": n, "multiplier": alloc.multiplier,
             "objective_kind": kind}
            for i, (e, n) in enumerate(zip(alloc.etas, alloc.allocation))
        ]
        text = render_table(rows, list(rows[0]), args)
    else:
        doc = alloc.to_dict()
        doc["objective_value"] = _to_unit(doc["objective_value"], unit)
        doc["unit"] = unit
        doc["schema_version"] = SCHEMA_VERSION
        if not _no_timestamp(args):
            doc["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    _emit(text, args)
    return EXIT_OK


def cmd_epi_demo(args) -> int:
    vx = float(merged(args, "var_x", 1.0))
    vy = float(merged(args, "var_y", 4.0))
    n = int(merged(args, "dim", 1))
    convention = merged(args, "convention", "doubled")
    unit = _unit(args)
    rows = []
    for eta in _floats(merged(args, "eta", "0,0.25,0.5,0.75,1")):
        s = epi_gaussian_slacks(GaussianVectorSpec(n, vx), GaussianVectorSpec(n, vy), eta, convention)
        rows.append({
            "eta": eta, "slack_power": s.slack_power,
            "slack_entropy": _to_unit(s.slack_entropy, unit),
            "slack_convex": _to_unit(s.slack_convex, unit),
        })
    if not rows:
        raise UsageError("epi-demo needs a nonempty --eta grid")
    _emit(render_table(rows, list(rows[0]), args), args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--eta", help="comma-separated transmissivities")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--unit", choices=["nats", "bits"])
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--seed", type=int)
    p.add_argument("--no-timestamp", dest="no_timestamp", action="store_const", const=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bosonlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="capacity table over an (eta, nbar, nnoise) grid")
    _common(p)
    p.add_argument("--nbar")
    p.add_argument("--nnoise")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("stress", help="randomized conjecture campaign")
    _common(p)
    p.add_argument("--conjecture", choices=["epni", "moe1", "moe2"])
    p.add_argument("--K")
    p.add_argument("--cutoff", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--families", help="sampler families; epni pairs look like ginibre/haar")
    p.add_argument("--workers", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--thermal-tail-tol", dest="thermal_tail_tol", type=float)
    p.add_argument("--trials-csv", dest="trials_csv", help="also write one CSV row per trial")
    p.set_defaults(func=cmd_stress)

    p = sub.add_parser("degraded-check", help="Eve's state vs degraded Bob state")
    _common(p)
    p.add_argument("--families")
    p.add_argument("--cutoff", type=int)
    p.add_argument("--trials", type=int, help="samples per (family, eta)")
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_degraded_check)

    p = sub.add_parser("waterfill", help="multi-mode photon budget allocation")
    _common(p)
    p.add_argument("--nbar", help="total photon budget")
    p.add_argument("--objective", choices=["pure_loss", "privacy"])
    p.set_defaults(func=cmd_waterfill)

    p = sub.add_parser("epi-demo", help="classical EPI slacks for Gaussian vectors")
    _common(p)
    p.add_argument("--var-x", dest="var_x", type=float)
    p.add_argument("--var-y", dest="var_y", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--convention", choices=["doubled", "standard"])
    p.set_defaults(func=cmd_epi_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.file_config = read_config_file(args.config) if args.config else {}
        return args.func(args)
    except (UsageError, BosonLabError, ValueError, OSError) as exc:
        print(f"bosonlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
