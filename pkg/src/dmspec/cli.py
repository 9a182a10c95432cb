"""Command-line front end.

Subcommands: bands, spectrum, gaps, ids, rotation, verify.  A JSON config
supplies the sampling function (sampling-module schema) plus a "command"
object with numeric parameters; flags override seed, output format and paths.
Outputs are deterministic for a fixed config: CSV (RFC 4180) or JSON, plus
optional SVG figures.  Exit codes: 0 success, 1 verification failure, 2 usage
or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import ids, sampling, schwartzman, spectrum, svgplot, verify
from .dynamics import enumerate_orbits
from .errors import DmspecError, NotHyperbolic


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _load_config(path: str | None):
    if path is None:
        return sampling.TrigPoly(), {}
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise DmspecError("config must be a JSON object")
    params = obj.pop("command", {})
    if not isinstance(params, dict):
        raise DmspecError("'command' must be a JSON object")
    return sampling.from_json(obj), params


def _emit(args, payload_json, rows, header):
    """Write either the JSON payload or CSV rows, to --out or stdout."""
    if args.format == "json":
        text = json.dumps(payload_json, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _seed_of(args, params) -> int:
    if args.seed is not None:
        return args.seed
    return int(params.get("seed", 0))


def cmd_bands(args) -> int:
    f, params = _load_config(args.config)
    max_period = int(params.get("max_period", 6))
    tol = float(params.get("tol", 1e-10))
    orbits = enumerate_orbits(max_period)
    per_orbit = [(o, spectrum.periodic_bands(o, f, tol=tol)) for o in orbits]
    merged = spectrum.SpectrumApprox(
        bands=spectrum.merge_bands([bands for _, bands in per_orbit], tol),
        max_period_used=max_period,
        tol=tol,
    )
    rows = []
    orbits_json = []
    for orbit, bands in per_orbit:
        orbits_json.append({
            "period": orbit.period,
            "point": orbit.label(),
            "bands": [[b.lo, b.hi] for b in bands],
        })
        for i, b in enumerate(bands):
            rows.append(["orbit", orbit.period, orbit.label(), i, _fmt(b.lo), _fmt(b.hi)])
    for i, b in enumerate(merged.bands):
        rows.append(["merged", max_period, "", i, _fmt(b.lo), _fmt(b.hi)])
    payload = {"orbits": orbits_json, "merged": merged.to_json()}
    _emit(args, payload, rows, ["source", "period", "point", "band_index", "lo", "hi"])
    if args.plot:
        per_period = {}
        for orbit, bands in per_orbit:
            per_period.setdefault(orbit.period, []).append(bands)
        per_period = {p: spectrum.merge_bands(v, tol) for p, v in per_period.items()}
        svgplot.band_diagram(per_period, merged, args.plot)
    return 0


def cmd_spectrum(args) -> int:
    f, params = _load_config(args.config)
    max_period = int(params.get("max_period", 6))
    tol = float(params.get("tol", 1e-10))
    s = spectrum.union_spectrum(f, max_period, tol=tol, threads=args.threads)
    rows = [[i, _fmt(b.lo), _fmt(b.hi)] for i, b in enumerate(s.bands)]
    payload = s.to_json()
    payload["hull"] = list(s.hull)
    payload["gaps"] = [list(g) for g in s.gaps]
    _emit(args, payload, rows, ["band_index", "lo", "hi"])
    if args.plot:
        svgplot.band_diagram({}, s, args.plot)
    return 0


def cmd_gaps(args) -> int:
    f, params = _load_config(args.config)
    max_period = int(params.get("max_period", 6))
    tol = float(params.get("tol", 1e-10))
    s = spectrum.union_spectrum(f, max_period, tol=tol, threads=args.threads)
    report = spectrum.gap_report(s, include_below_resolution=True)
    rows = []
    gaps_json = []
    for (lo, hi), width in report:
        below = width < s.resolution
        rows.append([_fmt(lo), _fmt(hi), _fmt(width), str(below).lower()])
        gaps_json.append({"lo": lo, "hi": hi, "length": width, "below_resolution": below})
    payload = {"gaps": gaps_json, "resolution": s.resolution,
               "max_period_used": s.max_period_used}
    _emit(args, payload, rows, ["lo", "hi", "length", "below_resolution"])
    return 0


def cmd_ids(args) -> int:
    f, params = _load_config(args.config)
    seed = _seed_of(args, params)
    max_period = int(params.get("max_period", 6))
    s = spectrum.union_spectrum(f, max_period, tol=float(params.get("tol", 1e-10)),
                                threads=args.threads)
    grid = ids.default_energy_grid(s.hull, int(params.get("grid_points", 2001)))
    table = ids.ids_estimate(
        f, grid,
        truncation_size=int(params.get("N", 512)),
        sample_count=int(params.get("M", 64)),
        seed=seed,
        threads=args.threads,
    )
    rows = [[_fmt(e), _fmt(k)] for e, k in zip(table.energies, table.k_values)]
    payload = table.to_json()
    payload["tolerance"] = table.tolerance
    _emit(args, payload, rows, ["E", "k"])
    if args.plot:
        svgplot.ids_staircase(table, s.bands, args.plot)
    return 0


def cmd_rotation(args) -> int:
    f, params = _load_config(args.config)
    seed = _seed_of(args, params)
    if args.energies:
        energies = [float(x) for x in args.energies.split(",")]
    else:
        energies = [float(x) for x in params.get("energies", [])]
    if not energies:
        raise DmspecError("rotation requires energies (config command.energies or --energies)")
    rows = []
    payload = []
    for E in energies:
        try:
            est = schwartzman.rotation_number(
                f, E,
                omega_samples=int(params.get("omega_samples", 32)),
                steps=int(params.get("steps", 2000)),
                substeps=int(params.get("substeps", 64)),
                seed=seed,
                depth=int(params.get("depth", 60)),
            )
        except NotHyperbolic:
            rows.append([_fmt(E), "", "", "not_hyperbolic", ""])
            payload.append({"E": E, "verdict": "not_hyperbolic"})
            continue
        verdict = schwartzman.integrality_check(est, tol=float(params.get("tol", 0.01)))
        rows.append([
            _fmt(E), _fmt(est.value), _fmt(est.stderr),
            verdict.verdict.value,
            "" if verdict.integer is None else str(verdict.integer),
        ])
        payload.append({
            "E": E, "value": est.value, "stderr": est.stderr,
            "steps": est.steps_used, "omega_samples": est.omega_samples,
            "verdict": verdict.verdict.value, "integer": verdict.integer,
        })
    _emit(args, {"rotation": payload}, rows,
          ["E", "value", "stderr", "verdict", "integer"])
    return 0


def cmd_verify(args) -> int:
    f, params = _load_config(args.config)
    seed = _seed_of(args, params)
    scale = verify.VerifyScale(
        max_period=int(params.get("max_period", 10)),
        shrink_periods=tuple(params.get("shrink_periods", (4, 6, 8, 10, 12))),
        band_tol=float(params.get("tol", 1e-10)),
        coarse_tol=float(params.get("coarse_tol", 0.02)),
        truncation_size=int(params.get("N", 512)),
        sample_count=int(params.get("M", 64)),
        grid_points=int(params.get("grid_points", 2001)),
        steps=int(params.get("steps", 2000)),
        omega_samples=int(params.get("omega_samples", 32)),
        substeps=int(params.get("substeps", 64)),
        depth=int(params.get("depth", 60)),
        oracle_max_period=int(params.get("oracle_max_period", 8)),
        threads=args.threads,
    )
    report = verify.run_verification(f, scale, seed=seed)
    rows = [[c["name"], str(c["passed"]).lower(), c["detail"]] for c in report["checks"]]
    _emit(args, report, rows, ["check", "passed", "detail"])
    return 0 if report["all_passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config (sampling schema + 'command' object)")
    common.add_argument("--seed", type=int, default=None, help="64-bit seed (overrides config)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--plot", help="write an SVG figure to this path")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads; 0 means all cores")
    parser = argparse.ArgumentParser(
        prog="dmspec",
        description="Spectra, density of states, and rotation numbers for "
                    "Schrodinger operators driven by expanding circle maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bands", parents=[common],
                   help="per-orbit band spectra and their union").set_defaults(fn=cmd_bands)
    sub.add_parser("spectrum", parents=[common],
                   help="merged band union").set_defaults(fn=cmd_spectrum)
    sub.add_parser("gaps", parents=[common],
                   help="interior gaps of the band union").set_defaults(fn=cmd_gaps)
    sub.add_parser("ids", parents=[common],
                   help="integrated density of states table").set_defaults(fn=cmd_ids)
    rot = sub.add_parser("rotation", parents=[common],
                         help="rotation numbers with integrality verdicts")
    rot.add_argument("--energies", help="comma-separated energies (overrides config)")
    rot.set_defaults(fn=cmd_rotation)
    sub.add_parser("verify", parents=[common],
                   help="run the verification suite").set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DmspecError, OSError, json.JSONDecodeError) as exc:
        print(f"dmspec: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
