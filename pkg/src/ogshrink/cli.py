"""Command-line surface of the toolkit.

Subcommands: denoise-1d, denoise-wav, calibrate, sure-scan,
benchmark-ex1, threshold. Delimited outputs (CSV/JSON) embed the full
configuration and seed; report paths also render a PNG figure next to
the output file unless --no-plot is given.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .audio import read_wav, write_wav
from .benchmark import benchmark_example1, mean_method_snr, reports_to_json
from .calibration import (
    CalibrationEntry,
    CalibrationTable,
    build_table,
    estimate_alpha,
    solve_lambda_for_alpha,
)
from .ogs import OgsConfig, ogs_denoise
from .penalties import PENALTY_KINDS, PenaltySpec
from .shrinkage import ThresholdProblem, scalar_threshold
from .signals import estimate_sigma_mad
from .spectral import SpectrogramPlan, denoise_speech, stft, stft_noise_std
from .sure import config_for_lambda, sure_scan

__all__ = ["build_parser", "main"]


def _parse_group(text):
    """Group shape flag: '5' for 1D length, '8x2' for a 2D box."""
    s = str(text).lower().strip()
    if "x" in s:
        a, _, b = s.partition("x")
        k1, k2 = int(a), int(b)
        if k1 < 1 or k2 < 1:
            raise argparse.ArgumentTypeError(f"bad group shape {text!r}")
        return (k1, k2)
    k = int(s)
    if k < 1:
        raise argparse.ArgumentTypeError(f"bad group length {text!r}")
    return k


def _parse_mode(text):
    s = str(text)
    if s == "max-snr":
        return ("max-snr-grid", None)
    if s.startswith("alpha:"):
        try:
            val = float(s[len("alpha:"):])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad mode {text!r}") from None
        return ("alpha-target", val)
    raise argparse.ArgumentTypeError(
        f"mode must be 'max-snr' or 'alpha:<float>', got {text!r}")


def _parse_float_list(text):
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty float list")
    return vals


def _png_path(out_path):
    return str(Path(out_path).with_suffix(".png"))


def _load_csv_signal(path):
    y = np.loadtxt(path, delimiter=",", dtype=float, ndmin=1)
    return y.ravel()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ogshrink",
        description="Group-sparse denoising: overlapping group shrinkage, "
                    "noise calibration, risk scans, and a spectrogram "
                    "speech pipeline.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise-1d", help="denoise a CSV signal")
    p.add_argument("--in", dest="in_path", required=True, metavar="CSV")
    p.add_argument("--out", required=True, metavar="CSV")
    p.add_argument("--penalty", required=True, choices=PENALTY_KINDS)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--lambda", dest="lam", type=float,
                   help="absolute regularization weight")
    g.add_argument("--alpha", type=float,
                   help="noise attenuation target; lambda is calibrated "
                        "for unit noise and scaled by sigma")
    p.add_argument("--k", type=int, required=True, help="group length")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--iters", type=int, default=25)
    p.add_argument("--sigma", type=float, default=None,
                   help="noise std; estimated by MAD when omitted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--calib-samples", type=int, default=400_000)
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("denoise-wav", help="denoise a WAV file through the STFT")
    p.add_argument("--in", dest="in_path", required=True, metavar="WAV")
    p.add_argument("--out", required=True, metavar="WAV")
    p.add_argument("--penalty", default="atan", choices=PENALTY_KINDS)
    p.add_argument("--k1", type=int, required=True, help="group size along frequency")
    p.add_argument("--k2", type=int, required=True, help="group size along time")
    p.add_argument("--alpha", type=float, default=3e-4)
    p.add_argument("--sigma", type=float, default=None,
                   help="time-domain noise std in [-1,1) units; estimated "
                        "from the high frequency band when omitted")
    p.add_argument("--ewp", action="store_true",
                   help="empirical Wiener post-processing with the shrunk "
                        "spectrogram as pilot")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--iters", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--calib-samples", type=int, default=400_000)
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("calibrate", help="tabulate noise attenuation vs lambda")
    p.add_argument("--penalty", required=True, choices=PENALTY_KINDS)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--k", type=_parse_group, required=True,
                   help="group: '5' (1D) or '8x2' (2D)")
    p.add_argument("--iters", type=int, default=25)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--lambdas", type=_parse_float_list,
                   help="comma-separated lambda grid to measure")
    g.add_argument("--target-alpha", type=float,
                   help="solve for the lambda hitting this attenuation")
    p.add_argument("--out", required=True, metavar="CSV")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=int, default=400_000)
    p.add_argument("--complex", dest="complex_data", action="store_true",
                   help="calibrate for complex-valued data")
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("sure-scan", help="risk estimate over a lambda grid")
    p.add_argument("--in", dest="in_path", required=True, metavar="CSV|WAV")
    p.add_argument("--sigma", type=float, required=True,
                   help="noise std in the input domain (time domain for WAV)")
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--out", required=True, metavar="CSV")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k", type=_parse_group, default=None,
                   help="group shape; defaults to 5 for CSV, 8x2 for WAV")
    p.add_argument("--penalty", default="atan", choices=PENALTY_KINDS)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--iters", type=int, default=25)
    p.add_argument("--probes", type=int, default=1)
    p.add_argument("--ref", dest="ref_path", default=None, metavar="CSV",
                   help="clean reference; adds a true_mse column (CSV in only)")
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("benchmark-ex1",
                       help="seed-averaged SNR benchmark on synthetic bursts")
    p.add_argument("--seeds", type=int, required=True,
                   help="number of seeds (0..n-1)")
    p.add_argument("--out", required=True, metavar="JSON")
    p.add_argument("--mode", type=_parse_mode, default=("max-snr-grid", None),
                   help="'max-snr' (default) or 'alpha:<target>'")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--snr-in", type=float, default=10.0)
    p.add_argument("--iters", type=int, default=25)
    p.add_argument("--calib-samples", type=int, default=400_000)
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("threshold", help="print the scalar threshold value")
    p.add_argument("--penalty", required=True, choices=PENALTY_KINDS)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--y", type=float, required=True)

    return ap


def _cmd_denoise_1d(args):
    y = _load_csv_signal(args.in_path)
    sigma = args.sigma
    if args.alpha is not None:
        if sigma is None:
            sigma = estimate_sigma_mad(y)
        lam_unit = solve_lambda_for_alpha(
            args.alpha, args.k, args.penalty, beta=args.beta,
            iterations=args.iters, n_samples=args.calib_samples,
            seed=args.seed)
        lam = lam_unit * sigma
    else:
        lam = args.lam
    cfg = OgsConfig.from_beta(lam, args.k, args.penalty, args.beta,
                              iterations=args.iters)
    x = ogs_denoise(y, cfg).estimate
    header = (
        f"ogshrink denoise-1d\n"
        f"penalty={args.penalty} lambda={lam!r} k={args.k} beta={args.beta!r} "
        f"iters={args.iters} alpha={args.alpha!r} sigma={sigma!r} "
        f"seed={args.seed} n={y.size}"
    )
    np.savetxt(args.out, x, header=header)
    if not args.no_plot:
        from .plots import save_denoise_overlay
        save_denoise_overlay(_png_path(args.out), y, x)
    print(f"denoise-1d: n={y.size} penalty={args.penalty} lambda={lam:.6g} "
          f"nonzero={int(np.count_nonzero(x))} -> {args.out}")
    return 0


def _cmd_denoise_wav(args):
    s, fs = read_wav(args.in_path)
    plan = SpectrogramPlan.for_rate(fs)
    sigma = args.sigma
    if sigma is None:
        sg = stft(s, plan)
        high = sg.data[3 * plan.bins // 4 :, :]
        # MAD over real/imag parts of the top band estimates the per-part
        # coefficient std sigma*||w||/sqrt(2)
        sigma = estimate_sigma_mad(high) * math.sqrt(2.0) / float(
            np.linalg.norm(plan.window))
    lam_unit = solve_lambda_for_alpha(
        args.alpha, (args.k1, args.k2), args.penalty, beta=args.beta,
        iterations=args.iters, n_samples=args.calib_samples, seed=args.seed,
        complex_data=True)
    cfg = OgsConfig.from_beta(lam_unit, (args.k1, args.k2), args.penalty,
                              args.beta, iterations=args.iters)
    out = denoise_speech(s, fs, cfg, sigma, ewp=args.ewp, plan=plan)
    write_wav(args.out, out, fs)
    report = {
        "command": "denoise-wav", "in": str(args.in_path), "out": str(args.out),
        "sample_rate": fs, "n": int(s.size), "penalty": args.penalty,
        "k1": args.k1, "k2": args.k2, "alpha": args.alpha, "beta": args.beta,
        "iters": args.iters, "sigma": sigma, "lambda_unit": lam_unit,
        "lambda_stft": lam_unit * stft_noise_std(plan, sigma),
        "ewp": bool(args.ewp), "seed": args.seed,
        "calib_samples": args.calib_samples,
    }
    side = str(Path(args.out).with_suffix(".json"))
    with open(side, "w") as fh:
        json.dump(report, fh, indent=2)
    if not args.no_plot:
        from .plots import save_spectrogram_pair
        before = stft(s, plan)
        after = stft(out, plan)
        save_spectrogram_pair(_png_path(args.out), before.data, after.data,
                              sample_rate=fs, hop=plan.hop)
    print(f"denoise-wav: fs={fs} sigma={sigma:.6g} lambda_unit={lam_unit:.6g} "
          f"ewp={args.ewp} -> {args.out}")
    return 0


def _cmd_calibrate(args):
    shape = args.k if isinstance(args.k, tuple) else (1, args.k)
    if args.lambdas is not None:
        table = build_table(args.lambdas, shape, args.penalty, args.beta,
                            args.iters, n_samples=args.samples,
                            seed=args.seed, complex_data=args.complex_data)
    else:
        lam = solve_lambda_for_alpha(
            args.target_alpha, shape, args.penalty, beta=args.beta,
            iterations=args.iters, n_samples=args.samples, seed=args.seed,
            complex_data=args.complex_data)
        alpha = estimate_alpha(lam, shape, args.penalty, args.beta,
                               args.iters, n_samples=args.samples,
                               seed=args.seed, complex_data=args.complex_data)
        table = CalibrationTable([CalibrationEntry(
            kind=args.penalty, beta=args.beta, iterations=args.iters,
            k1=shape[0], k2=shape[1], lam=lam, alpha=alpha,
            n_samples=args.samples, seed=args.seed)])
        print(f"calibrate: lambda={lam!r} for alpha={args.target_alpha:g}")
    table.save(args.out)
    if not args.no_plot and len(table.entries) >= 2:
        from .plots import save_alpha_curve
        save_alpha_curve(_png_path(args.out),
                         [e.lam for e in table.entries],
                         [e.alpha for e in table.entries])
    print(f"calibrate: {len(table.entries)} row(s) -> {args.out}")
    return 0


def _cmd_sure_scan(args):
    in_path = str(args.in_path)
    is_wav = in_path.lower().endswith(".wav")
    if is_wav:
        s, fs = read_wav(in_path)
        plan = SpectrogramPlan.for_rate(fs)
        y = stft(s, plan).data
        sigma = stft_noise_std(plan, args.sigma)
        group = args.k if args.k is not None else (8, 2)
        if not isinstance(group, tuple):
            group = (1, group)
    else:
        y = _load_csv_signal(in_path)
        sigma = args.sigma
        group = args.k if args.k is not None else 5
        if isinstance(group, tuple):
            raise ValueError("CSV input takes a 1D group length for --k")
    if args.points < 2:
        raise ValueError("--points must be at least 2")
    if not 0.0 < args.lambda_min < args.lambda_max:
        raise ValueError("need 0 < --lambda-min < --lambda-max")
    grid = np.geomspace(args.lambda_min, args.lambda_max, args.points)
    template = OgsConfig.from_beta(float(grid[0]), group, args.penalty,
                                   args.beta, iterations=args.iters)
    estimates, best = sure_scan(y, sigma, grid, template, seed=args.seed,
                                n_probes=args.probes)
    m = 2 * y.size if np.iscomplexobj(y) else y.size
    columns = "lambda,sure_mse,divergence"
    rows = [[e.lam, e.estimated_mse / m, e.divergence] for e in estimates]
    if args.ref_path is not None:
        if is_wav:
            raise ValueError("--ref is only supported for CSV input")
        ref = _load_csv_signal(args.ref_path)
        if ref.shape != y.shape:
            raise ValueError("reference length differs from input")
        columns += ",true_mse"
        for row in rows:
            cfg = config_for_lambda(template, row[0])
            err = ogs_denoise(y, cfg).estimate - ref
            row.append(float(np.sum(err * err)) / m)
    header = (
        f"ogshrink sure-scan\n"
        f"in={in_path} domain={'stft' if is_wav else 'signal'} "
        f"sigma={sigma!r} penalty={args.penalty} k={group} beta={args.beta!r} "
        f"iters={args.iters} probes={args.probes} seed={args.seed} m={m}\n"
        f"best_lambda={best!r}\n"
        f"{columns}"
    )
    rows = np.array(rows)
    np.savetxt(args.out, rows, delimiter=",", header=header)
    if not args.no_plot:
        from .plots import save_sure_curve
        save_sure_curve(_png_path(args.out), rows[:, 0], rows[:, 1], best)
    print(f"sure-scan: {args.points} points in [{args.lambda_min:g}, "
          f"{args.lambda_max:g}], best lambda {best:.6g} -> {args.out}")
    return 0


def _cmd_benchmark_ex1(args):
    lambda_mode, alpha_target = args.mode
    reports = benchmark_example1(
        range(args.seeds), n=args.n, snr_in_db=args.snr_in, k=args.k,
        lambda_mode=lambda_mode, alpha_target=alpha_target,
        iterations=args.iters, calib_samples=args.calib_samples)
    with open(args.out, "w") as fh:
        fh.write(reports_to_json(reports))
    means = mean_method_snr(reports)
    if not args.no_plot:
        from .plots import save_benchmark_bars
        save_benchmark_bars(_png_path(args.out), means)
    line = "  ".join(f"{k}={v:.2f}" for k, v in means.items())
    print(f"benchmark-ex1: seeds={args.seeds} mode={lambda_mode} "
          f"mean SNR (dB): {line} -> {args.out}")
    return 0


def _cmd_threshold(args):
    problem = ThresholdProblem(args.lam, PenaltySpec(args.penalty, args.a))
    print(repr(scalar_threshold(problem, args.y)))
    return 0


_HANDLERS = {
    "denoise-1d": _cmd_denoise_1d,
    "denoise-wav": _cmd_denoise_wav,
    "calibrate": _cmd_calibrate,
    "sure-scan": _cmd_sure_scan,
    "benchmark-ex1": _cmd_benchmark_ex1,
    "threshold": _cmd_threshold,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
