"""Command-line interface: calibrate, sweep, predict, simulate, velocity, blur.

Every command is deterministic given its arguments (and seed where one
applies); data artifacts written via --csv-out are byte-identical across
identical invocations.
"""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .caldata import _data_lines, parse_calibration_csv, serialize_calibration_csv
from .depthmodel import (
    calibrate,
    estimate_velocity,
    load_profile,
    predict_depth,
    save_profile,
)
from .errors import CsvFormatError, DepthcalError
from .optics import (
    DefocusCamera,
    GroundPlaneCamera,
    blur_width,
    depth_from_blur,
    generate_synthetic_set,
    x0_of_camera,
)
from .polyfit import confidence_intervals, sweep_degrees


@dataclass(frozen=True)
class CommandOutcome:
    exit_code: int
    report: str
    artifact: str | None = None


def _parse_auto(value: str) -> tuple[int, int]:
    try:
        lo, hi = value.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected MIN:MAX degree range, got {value!r}"
        ) from None


def _parse_distances(value: str) -> list[float]:
    try:
        return [float(tok) for tok in value.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated distances, got {value!r}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--csv-out", metavar="PATH", default=None,
        help="also write the command's tabular output as CSV to PATH",
    )
    common.add_argument(
        "--quiet", action="store_true", help="suppress the textual report"
    )

    parser = argparse.ArgumentParser(
        prog="depthcal",
        description="Calibrate and query a pixel-depth to real-distance mapping.",
    )
    parser.add_argument("--version", action="version", version=f"depthcal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "calibrate", parents=[common],
        help="fit a polynomial profile from a calibration CSV",
    )
    p.add_argument("--csv", required=True, help="calibration CSV (photo_id,actual_depth_cm,pixel_depth,R,r)")
    p.add_argument("--height", type=float, required=True, help="camera height in cm")
    p.add_argument("--x0", type=float, default=None, help="closest sight distance in cm (metadata)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--degree", type=int, help="fixed polynomial degree")
    g.add_argument("--auto", type=_parse_auto, metavar="MIN:MAX",
                   help="sweep this degree range and keep the best by dof-adjusted RMSE")
    p.add_argument("-o", "--output", required=True, help="profile JSON output path")
    p.add_argument("--label", default="", help="camera label stored in the profile")

    p = sub.add_parser(
        "sweep", parents=[common],
        help="fit a range of degrees and rank them by dof-adjusted RMSE",
    )
    p.add_argument("--csv", required=True)
    p.add_argument("--height", type=float, required=True)
    p.add_argument("--range", type=_parse_auto, default=(6, 9), metavar="MIN:MAX")

    p = sub.add_parser(
        "predict", parents=[common],
        help="predict real depth for pixel-depth queries",
    )
    p.add_argument("profile", help="profile JSON path")
    p.add_argument("pixel_depths", type=float, nargs="+", help="pixel-depth queries")

    p = sub.add_parser(
        "simulate", parents=[common],
        help="generate a synthetic calibration CSV from a pinhole ground-plane camera",
    )
    p.add_argument("--f", type=float, required=True, help="focal length in pixels")
    p.add_argument("--h", type=float, required=True, help="camera height in cm")
    p.add_argument("--rows", type=int, required=True, help="image height in pixels (even)")
    p.add_argument("--noise", type=float, default=0.0, help="pixel noise sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", type=_parse_distances, required=True,
                   help="comma-separated ground distances in cm")

    p = sub.add_parser(
        "velocity", parents=[common],
        help="depth and velocity from timestamped pixel-depth samples",
    )
    p.add_argument("profile", help="profile JSON path")
    p.add_argument("samples", help="CSV with header t_s,pixel_depth")

    p = sub.add_parser(
        "blur", parents=[common],
        help="thin-lens defocus: blur width from distance, or distance from blur",
    )
    p.add_argument("--wd", type=float, required=True, help="aperture-lens product w*d")
    p.add_argument("--c", type=float, required=True, help="offset c")
    p.add_argument("--U", type=float, required=True, help="focus distance U")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--s", type=float, help="object distance (computes blur width)")
    g.add_argument("--b", type=float, help="blur width (computes distance)")
    p.add_argument("--side", choices=("near", "far"), default=None,
                   help="branch for --b: nearer or farther than the focus distance")
    return parser


def _fmt_coeff(v: float) -> str:
    return f"{v:.3e}"


def _load_csv_set(path: str, height: float, x0=None):
    text = Path(path).read_text(encoding="utf-8")
    return parse_calibration_csv(text, camera_height=height, x0=x0)


def _write_artifact(path: str | None, lines: list[str]) -> str | None:
    if path is None:
        return None
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def run_calibrate(args) -> CommandOutcome:
    cal_set = _load_csv_set(args.csv, args.height, args.x0)
    if args.degree is not None:
        profile = calibrate(cal_set, degree=args.degree, camera_label=args.label)
    else:
        profile = calibrate(
            cal_set, degree="auto", degree_range=args.auto, camera_label=args.label
        )
    Path(args.output).write_text(save_profile(profile), encoding="utf-8")

    xs = [float(v) for v in cal_set.pixel_depths]
    ys = list(cal_set.actual_depths)
    intervals = confidence_intervals(profile.model, xs, ys, level=0.95)
    stats = profile.stats
    lines = [
        f"camera: {profile.camera_label or '(unlabeled)'}",
        f"height_cm: {profile.camera_height:g}",
        f"observations: {stats.n}",
        f"degree: {profile.model.degree}",
        "coefficients (highest power first):",
    ]
    for rank, ci in enumerate(reversed(intervals), start=1):
        lines.append(
            f"  p{rank} = {_fmt_coeff(ci.estimate)}  "
            f"95% CI ({_fmt_coeff(ci.lower)}, {_fmt_coeff(ci.upper)})"
        )
    lines += [
        f"SSE: {stats.sse:.6g}",
        f"R-square: {stats.r_squared:.6g}",
        f"Adjusted R-square: {stats.adj_r_squared:.6g}",
        f"RMSE: {stats.rmse:.6g}",
        f"pixel_range: [{profile.pixel_range[0]}, {profile.pixel_range[1]}]",
        f"profile: {args.output}",
    ]
    csv_lines = ["power,coefficient,ci_lower,ci_upper"] + [
        f"{ci.index},{ci.estimate!r},{ci.lower!r},{ci.upper!r}" for ci in intervals
    ]
    artifact = _write_artifact(args.csv_out, csv_lines)
    return CommandOutcome(0, "\n".join(lines), artifact)


def run_sweep(args) -> CommandOutcome:
    cal_set = _load_csv_set(args.csv, args.height)
    xs = [float(v) for v in cal_set.pixel_depths]
    ys = list(cal_set.actual_depths)
    sweep = sweep_degrees(xs, ys, *args.range)
    lines = ["degree    sse         rmse      r2        adj_r2"]
    for e in sweep.entries:
        s = e.stats
        lines.append(
            f"{e.degree:<6d}  {s.sse:<10.4f}  {s.rmse:<8.4f}  {s.r_squared:.6f}  {s.adj_r_squared:.6f}"
        )
    for sk in sweep.skipped:
        lines.append(f"skipped degree {sk.degree}: {sk.reason}")
    lines.append(f"selected degree: {sweep.best.degree}")
    csv_lines = ["degree,n,p,sse,rmse,r_squared,adj_r_squared"] + [
        f"{e.degree},{e.stats.n},{e.stats.p},{e.stats.sse!r},{e.stats.rmse!r},"
        f"{e.stats.r_squared!r},{e.stats.adj_r_squared!r}"
        for e in sweep.entries
    ]
    artifact = _write_artifact(args.csv_out, csv_lines)
    return CommandOutcome(0, "\n".join(lines), artifact)


def run_predict(args) -> CommandOutcome:
    profile = load_profile(Path(args.profile).read_text(encoding="utf-8"))
    lines, csv_lines = [], ["pixel_depth,depth_cm,uncertainty_cm,extrapolated"]
    for x in args.pixel_depths:
        est = predict_depth(profile, x)
        flag = "yes" if est.extrapolated else "no"
        lines.append(
            f"pixel_depth={x:g} depth_cm={est.depth:.4f} "
            f"uncertainty_cm={est.uncertainty:.4f} extrapolated={flag}"
        )
        csv_lines.append(f"{x!r},{est.depth!r},{est.uncertainty!r},{flag}")
    artifact = _write_artifact(args.csv_out, csv_lines)
    return CommandOutcome(0, "\n".join(lines), artifact)


def run_simulate(args) -> CommandOutcome:
    cam = GroundPlaneCamera(focal_px=args.f, height=args.h, image_rows=args.rows)
    cal_set = generate_synthetic_set(
        cam, args.dist, noise_sigma=args.noise, seed=args.seed
    )
    csv_text = serialize_calibration_csv(cal_set)
    report = f"# x0_cm: {x0_of_camera(cam)!r}\n" + csv_text.rstrip("\n")
    artifact = None
    if args.csv_out is not None:
        Path(args.csv_out).write_text(csv_text, encoding="utf-8")
        artifact = args.csv_out
    return CommandOutcome(0, report, artifact)


def _read_samples_csv(path: str) -> list[tuple[float, float]]:
    lines = list(_data_lines(Path(path).read_text(encoding="utf-8")))
    if not lines:
        raise CsvFormatError("empty samples file: missing header row")
    num, raw = lines[0]
    header = tuple(f.strip() for f in raw.split(","))
    if header != ("t_s", "pixel_depth"):
        raise CsvFormatError(
            f"expected header 't_s,pixel_depth', got {raw.strip()!r}", line=num
        )
    samples = []
    for num, raw in lines[1:]:
        fields = [f.strip() for f in raw.split(",")]
        if len(fields) != 2:
            raise CsvFormatError(f"expected 2 fields, got {len(fields)}", line=num)
        try:
            samples.append((float(fields[0]), float(fields[1])))
        except ValueError as exc:
            raise CsvFormatError(f"malformed number ({exc})", line=num) from None
    return samples


def run_velocity(args) -> CommandOutcome:
    profile = load_profile(Path(args.profile).read_text(encoding="utf-8"))
    samples = _read_samples_csv(args.samples)
    estimates = estimate_velocity(profile, samples)
    lines = [
        f"t={e.t:g} depth_cm={e.depth:.4f} velocity_cm_s={e.velocity:.4f}"
        for e in estimates
    ]
    csv_lines = ["t_s,depth_cm,velocity_cm_s"] + [
        f"{e.t!r},{e.depth!r},{e.velocity!r}" for e in estimates
    ]
    artifact = _write_artifact(args.csv_out, csv_lines)
    return CommandOutcome(0, "\n".join(lines), artifact)


def run_blur(args) -> CommandOutcome:
    cam = DefocusCamera(
        aperture=args.wd, lens_param=1.0, offset=args.c, focus_distance=args.U
    )
    if args.s is not None:
        b = blur_width(cam, args.s)
        report = f"b = {b:g}"
        csv_lines = ["s,b", f"{args.s!r},{b!r}"]
    else:
        if args.side is None:
            raise ValueError("--b requires --side near|far")
        s = depth_from_blur(cam, args.b, args.side)
        report = f"s = {s:g} ({args.side} branch)"
        csv_lines = ["b,side,s", f"{args.b!r},{args.side},{s!r}"]
    artifact = _write_artifact(args.csv_out, csv_lines)
    return CommandOutcome(0, report, artifact)


_HANDLERS = {
    "calibrate": run_calibrate,
    "sweep": run_sweep,
    "predict": run_predict,
    "simulate": run_simulate,
    "velocity": run_velocity,
    "blur": run_blur,
}


def run(argv=None) -> int:
    """Parse arguments, execute, print the report; returns the exit code."""
    args = build_parser().parse_args(argv)
    try:
        outcome = _HANDLERS[args.command](args)
    except (DepthcalError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet and outcome.report:
        print(outcome.report)
    return outcome.exit_code


def main() -> None:
    sys.exit(run())
