"""Command-line entry points: devicesim, session, studystats, bridge."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import MODE_NAMES, HapticMode, HapticModeConfig
from .session import PitchMapConfig, export_csv, import_csv, record, score
from .simulator import profile_from_json, run_profile
from .studystats import StudyDataError, load_study_csv, summarize


def main_devicesim(argv: list[str] | None = None) -> int:
    """Run a scripted gesture against the simulated knob; write the session CSV."""
    parser = argparse.ArgumentParser(
        prog="devicesim", description=main_devicesim.__doc__
    )
    parser.add_argument(
        "--mode",
        default="smooth",
        choices=[m.lower() for m in MODE_NAMES],
        help="haptic mode to render during the gesture",
    )
    parser.add_argument(
        "--profile", required=True, type=Path, help="gesture profile JSON file"
    )
    parser.add_argument(
        "--out", required=True, type=Path, help="output CSV path (t_ms,cents)"
    )
    args = parser.parse_args(argv)

    profile = profile_from_json(json.loads(args.profile.read_text()))
    config = HapticModeConfig(mode=HapticMode(args.mode.upper()))
    samples = run_profile(profile, config=config)
    contour = record(PitchMapConfig(), samples)
    args.out.write_bytes(export_csv(contour))
    print(f"wrote {len(contour.samples)} samples to {args.out}")
    return 0


def main_session(argv: list[str] | None = None) -> int:
    """Score a performed pitch contour against a reference contour."""
    parser = argparse.ArgumentParser(prog="session", description=main_session.__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    score_p = sub.add_parser("score", help="compare two contour CSV files")
    score_p.add_argument("--performed", required=True, type=Path)
    score_p.add_argument("--reference", required=True, type=Path)
    score_p.add_argument("--json", action="store_true", help="emit JSON")
    args = parser.parse_args(argv)

    performed = import_csv(args.performed.read_bytes())
    reference = import_csv(args.reference.read_bytes())
    result = score(performed, reference)
    if args.json:
        print(
            json.dumps(
                {
                    "rmse_cents": result.rmse_cents,
                    "correlation": result.correlation,
                    "peak_count_delta": result.peak_count_delta,
                }
            )
        )
    else:
        print(f"rmse: {result.rmse_cents:.4f} cents")
        print(f"correlation: {result.correlation:.4f}")
        print(f"peak count delta: {result.peak_count_delta:+d}")
    return 0


def main_studystats(argv: list[str] | None = None) -> int:
    """Produce the full statistics report for a study ratings CSV."""
    parser = argparse.ArgumentParser(
        prog="studystats", description=main_studystats.__doc__
    )
    sub = parser.add_subparsers(dest="command", required=True)
    report_p = sub.add_parser("report", help="ANOVA, CIs and preferences per category")
    report_p.add_argument("csv", type=Path, help="ratings CSV")
    report_p.add_argument("--json", action="store_true", help="emit JSON")
    args = parser.parse_args(argv)

    try:
        table = load_study_csv(args.csv.read_bytes())
        report = summarize(table)
    except StudyDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        for cat, cs in report.categories.items():
            a = cs.anova
            print(
                f"{cat}: F({a.df1}, {a.df2}) = {a.F:.4f}, p = {a.p:.4f}, "
                f"eta^2 = {a.eta_squared:.4f}"
            )
            for mode, (mean, lo, hi) in cs.mode_cis.items():
                print(f"  {mode}: mean {mean:.2f} (CI: {lo:.2f} to {hi:.2f})")
        print("preferred:", dict(report.preferred_counts))
        if report.tied_participants:
            print("ties (broken toward Smooth):", ", ".join(report.tied_participants))
    return 0


def main_bridge(argv: list[str] | None = None) -> int:
    """Serve the bridge HTTP/WebSocket API over a device."""
    parser = argparse.ArgumentParser(prog="bridge", description=main_bridge.__doc__)
    parser.add_argument("--device", default="sim", help="sim or serial:<path>")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--downsample", type=int, default=10)
    parser.add_argument("--record-dir", type=Path, default=Path("recordings"))
    args = parser.parse_args(argv)

    import uvicorn

    from .bridge import BridgeConfig, BridgeService, RealTimeDriver, create_app

    service = BridgeService(
        BridgeConfig(
            host=args.host,
            port=args.port,
            device=args.device,
            telemetry_downsample=args.downsample,
            record_dir=args.record_dir,
        )
    )
    service.connect(args.device)
    driver = RealTimeDriver(service)
    driver.start()
    try:
        uvicorn.run(create_app(service), host=args.host, port=args.port)
    finally:
        driver.stop()
    return 0
