"""Command-line frontend: flow, binarize, enhance, pipeline, compare, synth, viz.

Exit status: 0 on success, 1 on usage errors (usage text on stderr), 2 on
runtime/data errors. ``--print-config`` dumps the effective flag values as a
sorted key=value listing and exits without running the subcommand.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .binarize import BinarizeConfig, binarize_image
from .contour import binarize_image_contour, enhance_image_contour
from .enhance import EnhanceConfig, enhance_image
from .flowfield import load_flow_csv, save_flow_csv
from .gradient import compute_flow_field_gradient
from .image import GrayImage, binary_as_gray, invert, load_pgm, save_pgm
from .pipeline import PipelineConfig, compare_methods, run_pipeline, save_comparison_csv, summary_lines
from .projection import FlowConfig, compute_flow_field
from .synth import PATTERNS, SyntheticSpec, generate
from .viz import render_flow_overlay


class _UsageError(Exception):
    def __init__(self, message: str, parser: argparse.ArgumentParser):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message, self)


def _add_flow_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stride", type=int, default=2, help="grid stride in pixels")
    p.add_argument("--tangent-half", type=int, default=8, help="tangent segment half length")
    p.add_argument("--perp-half", type=int, default=8, help="perpendicular segment half length")
    p.add_argument("--coarse-step-denom", type=int, default=8, help="coarse angular step = pi/N")
    p.add_argument("--fine-step-denom", type=int, default=32, help="fine angular step = pi/N")
    p.add_argument("--fine-half-range-denom", type=int, default=16, help="fine search half range = pi/N")
    p.add_argument("--bg-var-threshold", type=float, default=25.0, help="background patch-variance threshold")
    p.add_argument("--no-half-line-rule", action="store_true", help="use full-segment deviations only")
    p.add_argument("--method", choices=["projection", "gradient"], default="projection")
    p.add_argument("--grad-window-half", type=int, default=8, help="structure tensor window half size")
    p.add_argument("--grad-weight-sigma", type=float, default=4.0, help="structure tensor Gaussian weight sigma")
    p.add_argument("--coherence-threshold", type=float, default=0.1, help="tensor coherence validity cutoff")


def _add_binarize_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bin-half", type=int, default=4, help="binarization segment half length")
    p.add_argument("--invert-polarity", action="store_true", help="treat bright lines as ridges")


def _add_enhance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sigma", type=float, default=3.0, help="smoothing Gaussian sigma")
    p.add_argument("--kernel-half", type=int, default=9, help="smoothing kernel half length")


def _add_path_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--path", choices=["linear", "contour"], default="linear", help="sampling path geometry")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ridgeflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_flow = sub.add_parser("flow", help="estimate an orientation flow field", parents=[], add_help=True)
    p_flow.add_argument("input", help="input PGM image")
    p_flow.add_argument("--out", help="output flow CSV path")
    p_flow.add_argument("--direct", action="store_true", help="use the direct sampling path (reference, slower)")
    _add_flow_flags(p_flow)

    p_bin = sub.add_parser("binarize", help="classify pixels into ridge/valley")
    p_bin.add_argument("input")
    p_bin.add_argument("--out", help="output PGM (0 = ridge, 255 = valley)")
    _add_flow_flags(p_bin)
    _add_binarize_flags(p_bin)
    _add_path_flag(p_bin)

    p_enh = sub.add_parser("enhance", help="directionally smooth an image")
    p_enh.add_argument("input")
    p_enh.add_argument("--out", help="output PGM")
    _add_flow_flags(p_enh)
    _add_binarize_flags(p_enh)
    _add_enhance_flags(p_enh)
    _add_path_flag(p_enh)

    p_pipe = sub.add_parser("pipeline", help="iterate flow -> binarize -> enhance")
    p_pipe.add_argument("input")
    p_pipe.add_argument("--out-prefix", help="prefix for flow_K.csv, bin_K.pgm, enh_K.pgm outputs")
    p_pipe.add_argument("--iterations", type=int, default=2)
    _add_flow_flags(p_pipe)
    _add_binarize_flags(p_pipe)
    _add_enhance_flags(p_pipe)
    _add_path_flag(p_pipe)

    p_cmp = sub.add_parser("compare", help="projection vs gradient flow on one image")
    p_cmp.add_argument("input")
    p_cmp.add_argument("--truth", help="ground-truth flow CSV")
    p_cmp.add_argument("--out", help="per-site comparison CSV")
    p_cmp.add_argument("--interior-margin", type=float, default=None, help="skip sites within this many pixels of the border")
    _add_flow_flags(p_cmp)

    p_syn = sub.add_parser("synth", help="generate a synthetic ridge pattern")
    p_syn.add_argument("--out", help="output PGM path")
    p_syn.add_argument("--truth-out", help="ground-truth flow CSV path")
    p_syn.add_argument("--pattern", choices=list(PATTERNS), default="parallel")
    p_syn.add_argument("--width", type=int, default=128)
    p_syn.add_argument("--height", type=int, default=128)
    p_syn.add_argument("--period", type=float, default=8.0)
    p_syn.add_argument("--orientation-deg", type=float, default=0.0, help="ridge direction in degrees")
    p_syn.add_argument("--amplitude", type=float, default=127.0)
    p_syn.add_argument("--offset", type=float, default=127.5)
    p_syn.add_argument("--noise-sigma", type=float, default=0.0)
    p_syn.add_argument("--seed", type=int, default=0)
    p_syn.add_argument("--stride", type=int, default=2, help="truth grid stride")

    p_viz = sub.add_parser("viz", help="render a flow field over its image as SVG")
    p_viz.add_argument("input")
    p_viz.add_argument("--flow", help="flow CSV to draw; computed with the flags below when omitted")
    p_viz.add_argument("--out", help="output SVG path")
    _add_flow_flags(p_viz)

    for p in (p_flow, p_bin, p_enh, p_pipe, p_cmp, p_syn, p_viz):
        p.add_argument("--print-config", action="store_true", help="print effective flag values and exit")
    return parser


def _flow_config(args) -> FlowConfig:
    return FlowConfig(
        tangent_half_length=args.tangent_half,
        perp_half_length=args.perp_half,
        coarse_step=math.pi / args.coarse_step_denom,
        fine_step=math.pi / args.fine_step_denom,
        fine_half_range=math.pi / args.fine_half_range_denom,
        stride=args.stride,
        background_variance_threshold=args.bg_var_threshold,
        use_half_line_rule=not args.no_half_line_rule,
    )


def _compute_flow(image: GrayImage, args, sampling: str = "rotated"):
    cfg = _flow_config(args)
    if args.method == "gradient":
        return compute_flow_field_gradient(
            image,
            cfg,
            window_half=args.grad_window_half,
            weight_sigma=args.grad_weight_sigma,
            coherence_threshold=args.coherence_threshold,
        )
    return compute_flow_field(image, cfg, sampling=sampling)


def _pipeline_config(args) -> PipelineConfig:
    return PipelineConfig(
        iterations=getattr(args, "iterations", 2),
        path_mode=getattr(args, "path", "linear"),
        flow_method=args.method,
        flow=_flow_config(args),
        binarize=BinarizeConfig(line_half_length=getattr(args, "bin_half", 4)),
        enhance=EnhanceConfig(
            gaussian_sigma=getattr(args, "sigma", 3.0),
            kernel_half_length=getattr(args, "kernel_half", 9),
        ),
        gradient_window_half=args.grad_window_half,
        gradient_weight_sigma=args.grad_weight_sigma,
        coherence_threshold=args.coherence_threshold,
    )


def _require_out(args, attr: str, parser_hint: str) -> str:
    value = getattr(args, attr)
    if not value:
        raise ValueError(f"{parser_hint} requires --{attr.replace('_', '-')}")
    return value


def _classify(image: GrayImage, args):
    """Flow plus binary image honoring --path and --invert-polarity."""
    flow = _compute_flow(image, args)
    source = invert(image) if args.invert_polarity else image
    bin_cfg = BinarizeConfig(line_half_length=args.bin_half)
    if args.path == "contour":
        binary = binarize_image_contour(source, flow, bin_cfg)
    else:
        binary = binarize_image(source, flow, bin_cfg)
    return flow, binary


def _cmd_flow(args) -> int:
    image = load_pgm(args.input)
    out = _require_out(args, "out", "flow")
    field = _compute_flow(image, args, sampling="direct" if args.direct else "rotated")
    save_flow_csv(field, out)
    return 0


def _cmd_binarize(args) -> int:
    image = load_pgm(args.input)
    out = _require_out(args, "out", "binarize")
    _, binary = _classify(image, args)
    save_pgm(binary_as_gray(binary), out)
    return 0


def _cmd_enhance(args) -> int:
    image = load_pgm(args.input)
    out = _require_out(args, "out", "enhance")
    flow, binary = _classify(image, args)
    enh_cfg = EnhanceConfig(gaussian_sigma=args.sigma, kernel_half_length=args.kernel_half)
    if args.path == "contour":
        enhanced = enhance_image_contour(image, binary, flow, enh_cfg)
    else:
        enhanced = enhance_image(image, binary, flow, enh_cfg)
    save_pgm(enhanced, out)
    return 0


def _cmd_pipeline(args) -> int:
    image = load_pgm(args.input)
    prefix = _require_out(args, "out_prefix", "pipeline")
    cfg = _pipeline_config(args)
    source = invert(image) if args.invert_polarity else image
    result = run_pipeline(source, cfg)
    parent = os.path.dirname(prefix)
    if parent:
        os.makedirs(parent, exist_ok=True)
    for k, rec in enumerate(result.records, start=1):
        save_flow_csv(rec.flow, f"{prefix}flow_{k}.csv")
        save_pgm(binary_as_gray(rec.binary), f"{prefix}bin_{k}.pgm")
        enhanced = invert(rec.enhanced) if args.invert_polarity else rec.enhanced
        save_pgm(enhanced, f"{prefix}enh_{k}.pgm")
    return 0


def _cmd_compare(args) -> int:
    image = load_pgm(args.input)
    truth = load_flow_csv(args.truth) if args.truth else None
    report = compare_methods(image, truth, _pipeline_config(args), interior_margin=args.interior_margin)
    if args.out:
        save_comparison_csv(report, args.out)
    for line in summary_lines(report):
        print(line)
    return 0


def _cmd_synth(args) -> int:
    out = _require_out(args, "out", "synth")
    spec = SyntheticSpec(
        width=args.width,
        height=args.height,
        pattern=args.pattern,
        orientation=math.radians(args.orientation_deg) % math.pi,
        period=args.period,
        amplitude=args.amplitude,
        offset=args.offset,
        noise_sigma=args.noise_sigma,
        rng_seed=args.seed,
    )
    image, truth = generate(spec, stride=args.stride)
    save_pgm(image, out)
    if args.truth_out:
        save_flow_csv(truth, args.truth_out)
    return 0


def _cmd_viz(args) -> int:
    image = load_pgm(args.input)
    out = _require_out(args, "out", "viz")
    flow = load_flow_csv(args.flow) if args.flow else _compute_flow(image, args)
    render_flow_overlay(image, flow, out)
    return 0


_COMMANDS = {
    "flow": _cmd_flow,
    "binarize": _cmd_binarize,
    "enhance": _cmd_enhance,
    "pipeline": _cmd_pipeline,
    "compare": _cmd_compare,
    "synth": _cmd_synth,
    "viz": _cmd_viz,
}


def _print_config(args) -> None:
    skip = {"command", "print_config", "func"}
    for key in sorted(vars(args)):
        if key in skip:
            continue
        value = getattr(args, key)
        if value is None:
            value = ""
        print(f"{key}={value}")


def run_cli(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        err.parser.print_usage(sys.stderr)
        print(f"{err.parser.prog}: error: {err}", file=sys.stderr)
        return 1
    except SystemExit as exit_:  # --help
        return int(exit_.code or 0)
    if args.print_config:
        _print_config(args)
        return 0
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as err:
        print(f"ridgeflow {args.command}: error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
