"""Command-line front end.

Every subcommand writes one CSV (stdout unless ``--output``) and a JSON
summary echoing the resolved configuration: next to the CSV as
``<output>.json``, or on stderr when the CSV goes to stdout.

Angles are degrees on the command line and in CSV output.  A run can also be
described by a ``key = value`` config file passed with ``--config``; flags
given on the command line override the file.

Exit codes: 0 success, 2 invalid input, 3 physically undefined result.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import hom, optics, prepost, weakmeas
from .errors import PhysicsError, RangeError, ValidationError
from .qcore import basis_projector, ket

COMMANDS = ("threebox", "weakvalue", "interferometer", "readout-sweep", "fit", "hom-sweep")
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
GRID_ATOL = 1e-9


def parse_grid(spec: str) -> list[float]:
    """``start:stop:step`` -> inclusive lattice; a bare number is a one-point grid.

    ``stop`` is included when it lies on the lattice within 1e-9.
    """
    parts = spec.split(":")
    try:
        values = [float(x) for x in parts]
    except ValueError:
        raise RangeError(f"bad grid {spec!r}; expected start:stop:step") from None
    if len(values) == 1:
        return values
    if len(values) != 3:
        raise RangeError(f"bad grid {spec!r}; expected start:stop:step")
    start, stop, step = values
    if step <= 0 or stop < start:
        raise RangeError(f"bad grid {spec!r}; need step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + GRID_ATOL)) + 1
    return [start + k * step for k in range(n)]


def parse_list(spec: str) -> list[float]:
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise RangeError(f"bad number list {spec!r}") from None


def parse_amplitudes(spec: str) -> list[complex]:
    try:
        return [complex(x.strip().replace(" ", "")) for x in spec.split(",")]
    except ValueError:
        raise RangeError(f"bad amplitude list {spec!r}") from None


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        x = 0.0  # no "-0"
    return format(x, ".12g")


def deg(x: float) -> float:
    return math.degrees(x)


def _strength(G: float) -> optics.MeasurementStrength:
    return optics.strength_from_G(G)


# -- commands -----------------------------------------------------------------
# each returns (header, rows, summary)


def cmd_threebox(args):
    pp, projs = prepost.three_box_scenario()
    rows = []
    summary = {"overlap": pp.overlap.real}
    for label, proj in zip(prepost.PATHS3, projs):
        wv = prepost.weak_value(pp, proj).value
        abl = prepost.abl_probability(pp, proj)
        rows.append([label, wv.real, wv.imag, abl])
        summary[f"weak_value_{label}"] = wv.real
        summary[f"abl_{label}"] = abl
    summary["weak_value_sum"] = prepost.weak_value_sum(pp, projs).real
    return ["projector", "weak_value_re", "weak_value_im", "abl"], rows, summary


def cmd_weakvalue(args):
    if args.pre or args.post:
        if not (args.pre and args.post):
            raise RangeError("--pre and --post must be given together")
        pre_amps, post_amps = parse_amplitudes(args.pre), parse_amplitudes(args.post)
        if len(pre_amps) != len(post_amps):
            raise RangeError("--pre and --post need the same number of amplitudes")
        labels = tuple(args.labels.split(",")) if args.labels else tuple(
            chr(ord("A") + k) for k in range(len(pre_amps))
        )
        pp = prepost.PrePostSelection.create(ket(labels, pre_amps), ket(labels, post_amps))
    else:
        labels = optics.PATHS
        pp = optics.two_path_selection(args.p_A)
    projs = [basis_projector(labels, x) for x in labels]
    rows = []
    summary = {"overlap_re": pp.overlap.real, "overlap_im": pp.overlap.imag}
    for label, proj in zip(labels, projs):
        wv = prepost.weak_value(pp, proj).value
        try:
            abl = prepost.abl_probability(pp, proj)
        except PhysicsError:
            abl = math.nan
        rows.append([label, wv.real, wv.imag, abl])
    total = prepost.weak_value_sum(pp, projs)
    summary["weak_value_sum_re"] = total.real
    summary["weak_value_sum_im"] = total.imag
    return ["projector", "weak_value_re", "weak_value_im", "abl"], rows, summary


def cmd_interferometer(args):
    s = _strength(args.G)
    run = optics.run_interferometer(args.p_A, s, args.hwp_path, math.radians(args.hwp_angle))
    default_plate = args.hwp_path == "A" and math.isclose(args.hwp_angle, 45.0, abs_tol=1e-12)
    marks = hom.symmetric_angle_report(args.p_A, s) if default_plate else None
    record = {
        "p_A": run.p_A,
        "G": s.G,
        "theta_deg": deg(s.theta),
        "delta_theta_deg": deg(optics.delta_theta(s)),
        "output_angle_deg": deg(run.output_angle),
        "shift_deg": deg(run.shift),
        "shift_closed_form_deg": deg(optics.shift_angle_exact(args.p_A, s)) if default_plate else math.nan,
        "shift_approx_deg": deg(optics.shift_angle_approx(args.p_A, s.G)),
        "postselect_prob": run.postselect_prob,
        "amp_H": run.output_polarization.amplitudes[0].real,
        "amp_V": run.output_polarization.amplitudes[1].real,
        "restoration_hwp_deg": deg(optics.restoration_hwp_angle(run, s.theta)),
        "symmetric_mark_deg": deg(marks.paper_symmetric) if marks else math.nan,
        "small_G_mark_deg": deg(marks.small_G_mark) if marks else math.nan,
    }
    return list(record), [list(record.values())], record


def cmd_readout_sweep(args):
    grid = parse_grid(args.G)
    if args.trials:
        records = weakmeas.synthesize_sweep(args.p_A, grid, args.trials, args.seed, args.background)
        rows = [[r.G, r.counts_H, r.counts_V, r.trials, r.seed] for r in records]
        fit = weakmeas.fit_weak_value(records)
        header = ["G", "counts_H", "counts_V", "trials", "seed"]
    else:
        curve = weakmeas.readout_curve(args.p_A, grid)
        rows = [[pt.G, pt.P_V, pt.R, args.p_A] for pt in curve.points]
        fit = weakmeas.fit_weak_value(curve.points)
        header = ["G", "P_V", "R", "p_A_nominal"]
    summary = {"p_A_hat": fit.p_A, "fit_residual": fit.residual, "fit_stderr": fit.stderr}
    return header, rows, summary


def _read_samples(path: str) -> list:
    try:
        with open(path, newline="") as fh:
            table = list(csv.DictReader(fh))
    except OSError as exc:
        raise RangeError(f"cannot read {path}: {exc.strerror}") from None
    if not table:
        raise RangeError(f"{path} has no data rows")
    cols = set(table[0])
    try:
        if {"G", "counts_H", "counts_V", "trials"} <= cols:
            return [
                weakmeas.CountRecord(
                    G=float(r["G"]),
                    counts_V=int(r["counts_V"]),
                    counts_H=int(r["counts_H"]),
                    trials=int(r["trials"]),
                    seed=int(r.get("seed") or 0),
                )
                for r in table
            ]
        if {"G", "R"} <= cols:
            return [
                weakmeas.ReadoutPoint(float(r["G"]), float(r.get("P_V") or math.nan), float(r["R"]))
                for r in table
            ]
    except ValueError as exc:
        raise RangeError(f"{path}: {exc}") from None
    raise RangeError(f"{path}: need columns G,R or G,counts_H,counts_V,trials")


def cmd_fit(args):
    if args.input:
        samples = _read_samples(args.input)
        points = [weakmeas.counts_to_point(s) if isinstance(s, weakmeas.CountRecord) else s for s in samples]
    else:
        grid = parse_grid(args.G)
        if args.trials:
            records = weakmeas.synthesize_sweep(args.p_A, grid, args.trials, args.seed, args.background)
            if args.calibrate:
                # reference runs share trials/background; seeds are derived from --seed
                ref1, ref0 = np.random.SeedSequence([args.seed, 1]).generate_state(2, np.uint64)
                ones = weakmeas.synthesize_sweep(1.0, grid, args.trials, int(ref1), args.background)
                zeros = weakmeas.synthesize_sweep(0.0, grid, args.trials, int(ref0), args.background)
                points = [weakmeas.calibrate(r, o, z) for r, o, z in zip(records, ones, zeros)]
            else:
                points = [weakmeas.counts_to_point(r) for r in records]
        else:
            points = list(weakmeas.readout_curve(args.p_A, grid).points)
    fit = weakmeas.fit_weak_value(points)
    rows = [[pt.G, pt.R, pt.sigma, weakmeas.readout_closed_form(fit.p_A, pt.G)] for pt in points]
    summary = {
        "p_A_hat": fit.p_A,
        "fit_residual": fit.residual,
        "fit_stderr": fit.stderr,
    }
    return ["G", "R", "sigma_R", "R_model"], rows, summary


def cmd_hom_sweep(args):
    s = _strength(args.G)
    start, stop, step = _grid_triplet(args.grid)
    grid = hom.relative_grid(s, math.radians(start), math.radians(stop), math.radians(step))
    header = ["hwp5_deg", "relative_deg", "visibility", "p_A2", "G", "background_ratio"]
    rows, per_value = [], []
    for p2 in parse_list(args.p_A):
        if args.kappa is not None:
            ratio = hom.background_ratio_from_postselection(args.kappa, p2, s)
        else:
            ratio = args.background
        cfg = hom.default_pair(
            p2, s, p_A1=args.p_A1, hwp4_angle=math.radians(args.hwp4), background_ratio=ratio
        )
        sweep = hom.visibility_sweep(cfg, grid)
        for chi, rel, v in zip(sweep.hwp5_angles, sweep.relative_angles, sweep.visibilities):
            rows.append([deg(chi), deg(rel), v, p2, s.G, ratio])
        marks = hom.symmetric_angle_report(p2, s)
        per_value.append(
            {
                "p_A2": p2,
                "background_ratio": ratio,
                "argmax_relative_deg": deg(sweep.argmax_angle),
                "max_visibility": sweep.max_visibility,
                "exact_deg": deg(marks.exact),
                "paper_symmetric_deg": deg(marks.paper_symmetric),
                "small_G_mark_deg": deg(marks.small_G_mark),
                "exact_relative_deg": deg(marks.exact - s.theta),
                "paper_symmetric_relative_deg": deg(marks.paper_symmetric - s.theta),
                "small_G_mark_relative_deg": deg(marks.small_G_mark - s.theta),
            }
        )
    return header, rows, {"theta_deg": deg(s.theta), "sweeps": per_value}


def _grid_triplet(spec: str) -> tuple[float, float, float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise RangeError(f"bad grid {spec!r}; expected start:stop:step")
    parse_grid(spec)
    return tuple(float(x) for x in parts)


HANDLERS = {
    "threebox": cmd_threebox,
    "weakvalue": cmd_weakvalue,
    "interferometer": cmd_interferometer,
    "readout-sweep": cmd_readout_sweep,
    "fit": cmd_fit,
    "hom-sweep": cmd_hom_sweep,
}


# -- argument handling --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _add_output(p):
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.add_argument("--summary", help="summary JSON path (default: <output>.json, or stderr)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weakvalue", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="key = value run file (flags override it)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("threebox", help="weak values and ABL probabilities of the three-box selection")
    _add_output(p)

    p = sub.add_parser("weakvalue", help="path weak values for a two-path or custom selection")
    p.add_argument("--p_A", type=float, default=-1.0)
    p.add_argument("--pre", help="comma-separated amplitudes of the preselected state")
    p.add_argument("--post", help="comma-separated amplitudes of the postselected state")
    p.add_argument("--labels", help="comma-separated basis labels")
    _add_output(p)

    p = sub.add_parser("interferometer", help="output polarization and shift angles")
    p.add_argument("--p_A", type=float, default=-1.0)
    p.add_argument("--G", type=float, default=hom.EXPERIMENT_G)
    p.add_argument("--hwp_path", choices=optics.PATHS, default="A")
    p.add_argument("--hwp_angle", type=float, default=45.0, help="degrees")
    _add_output(p)

    for name, helptext in (
        ("readout-sweep", "normalized readout against G"),
        ("fit", "estimate the weak value by fitting readouts"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--p_A", type=float, default=-1.0)
        p.add_argument("--G", default="0.05:0.95:0.05", help="grid start:stop:step")
        p.add_argument("--trials", type=int, default=0, help="photon trials per point (0: exact)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--background", type=float, default=0.0, help="background click rate per failed trial")
        if name == "fit":
            p.add_argument("--input", help="CSV from readout-sweep to fit instead of simulating")
            p.add_argument("--calibrate", action="store_true", help="recalibrate with p_A=1 and p_A=0 reference runs")
        _add_output(p)

    p = sub.add_parser("hom-sweep", help="HOM visibility against the HWP5 angle")
    p.add_argument("--p_A", default=",".join(map(str, hom.HWP1_WEAK_VALUES)), help="comma-separated photon-2 weak values")
    p.add_argument("--G", type=float, default=hom.EXPERIMENT_G)
    p.add_argument("--grid", default="-45:45:0.05", help="HWP5 angle relative to theta, degrees")
    p.add_argument("--background", type=float, default=0.0, help="accidental-to-signal ratio")
    p.add_argument("--kappa", type=float, help="use ratio kappa / postselection probability instead")
    p.add_argument("--p_A1", type=float, default=1.0)
    p.add_argument("--hwp4", type=float, default=45.0, help="degrees")
    _add_output(p)
    return parser


def read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise RangeError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise RangeError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key] = value
    return out


def expand_config(argv: Sequence[str]) -> list[str]:
    """Splice a ``--config`` file into argv; explicit flags come last and win."""
    argv = list(argv)
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            del argv[i : i + 2]
            break
        if tok.startswith("--config="):
            path = tok.split("=", 1)[1]
            del argv[i]
            break
    if path is None:
        return argv
    conf = read_config(path)
    command = conf.pop("command", None)
    if argv and argv[0] in COMMANDS:
        command = argv.pop(0)
    if command is None:
        raise RangeError("config file has no 'command' and none was given")
    flags = []
    for key, value in conf.items():
        key = key.replace("-", "_")
        if value.lower() in ("true", "yes", "on"):
            flags.append(f"--{key}")
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            flags.append(f"--{key}={value}")
    return [command, *flags, *argv]


def resolved_config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "summary", "config")}


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return None if math.isnan(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        argv = expand_config(argv)
    except ValidationError as exc:
        print(f"weakvalue: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        header, rows, summary = HANDLERS[args.command](args)
    except ValidationError as exc:
        print(f"weakvalue {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PhysicsError as exc:
        print(f"weakvalue {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    text = render_csv(header, rows)
    doc = json.dumps(
        _jsonable({"config": resolved_config(args), "results": summary}), indent=2, sort_keys=True
    ) + "\n"
    try:
        if args.output:
            Path(args.output).write_text(text, newline="\n")
            Path(args.summary or f"{args.output}.json").write_text(doc)
        else:
            sys.stdout.write(text)
            if args.summary:
                Path(args.summary).write_text(doc)
            else:
                sys.stderr.write(doc)
    except OSError as exc:
        print(f"weakvalue: error: cannot write output: {exc.strerror}", file=sys.stderr)
        return EXIT_VALIDATION
    return 0


if __name__ == "__main__":
    sys.exit(main())
