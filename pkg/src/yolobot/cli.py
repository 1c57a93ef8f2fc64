"""Command-line entry points: train, eval, simulate, replay, serve.

Exit codes follow the CI contract: 0 success, 1 threshold/verification
failure, 2 input error.  Every command except ``serve`` is deterministic
given its flags and seed.  The ``YOLO_CONFIG`` environment variable may
point to a profile/behavior config file applied to the preset table.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import classifier, shapes, trajectory
from .behaviors import PROFILE_PRESETS, SocialProfile, load_profiles_file
from .classifier import (
    DEFAULT_EVAL_SEED_MOUSE,
    DEFAULT_EVAL_SEED_ROBOT,
    DEFAULT_TRAIN_SEED,
    KnnConfig,
)
from .errors import MalformedTrace, MissingClass, UnknownProfile, YolobotError
from .planner import ArcSchedule
from .shapes import NOISE_PRESETS, ShapeClass
from .sim import (
    SimConfig,
    example_script,
    load_trace,
    parse_script,
    replay,
    run_session,
    save_trace,
)

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_INPUT = 2


def _parse_noise(spec: str) -> tuple[float, float]:
    """Noise flag: a preset name, 'sigma' or 'sigma,drop'."""
    if spec in NOISE_PRESETS:
        return NOISE_PRESETS[spec]
    parts = spec.split(",")
    try:
        sigma = float(parts[0])
        drop = float(parts[1]) if len(parts) > 1 else 0.0
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"noise must be one of {sorted(NOISE_PRESETS)} or 'sigma[,drop]', got {spec!r}"
        ) from None
    return sigma, drop


def _profiles() -> dict[str, SocialProfile]:
    path = os.environ.get("YOLO_CONFIG")
    if path:
        return load_profiles_file(path)
    return dict(PROFILE_PRESETS)


def _parse_schedule(spec: str) -> ArcSchedule:
    try:
        rising, climax, falling = (float(v) for v in spec.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"schedule must be 'rising,climax,falling' seconds, got {spec!r}"
        ) from None
    return ArcSchedule(rising, climax, falling)


def _load_manifest_corpus(path: str) -> list[tuple[trajectory.Trajectory, ShapeClass]]:
    """Corpus manifest: one `label path` pair per line, paths relative to
    the manifest."""
    corpus = []
    base = os.path.dirname(os.path.abspath(path))
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                label, rel = line.split(None, 1)
                shape = ShapeClass.from_label(label)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            corpus.append((trajectory.load(os.path.join(base, rel)), shape))
    return corpus


def cmd_train(args: argparse.Namespace) -> int:
    if args.corpus:
        corpus = _load_manifest_corpus(args.corpus)
    else:
        sigma, drop = args.noise
        corpus = shapes.make_corpus(args.generate, sigma, drop, args.seed)
    model = classifier.fit(corpus, KnnConfig(k=args.k))
    classifier.save_model(model, args.out)
    counts: dict[str, int] = {}
    for _, label in corpus:
        counts[label.label] = counts.get(label.label, 0) + 1
    print(f"trained k={args.k} model on {len(corpus)} examples -> {args.out}")
    for shape in shapes.SHAPE_CLASSES:
        print(f"  {shape.label}: {counts.get(shape.label, 0)}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    if args.model:
        model = classifier.load_model(args.model)
    else:
        model = classifier.default_model()
    sigma, drop = args.noise
    seed = args.seed
    if seed is None:
        seed = (DEFAULT_EVAL_SEED_ROBOT if (sigma, drop) == NOISE_PRESETS["robot"]
                else DEFAULT_EVAL_SEED_MOUSE)
    test = shapes.make_corpus(args.count, sigma, drop, seed)
    report = classifier.evaluate(model, test)
    print(report.format())
    if args.min_accuracy is not None and report.accuracy < args.min_accuracy:
        print(f"FAIL: accuracy {report.accuracy:.4f} < required {args.min_accuracy}")
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    profiles = _profiles()
    try:
        profile = profiles[args.profile.lower()]
    except KeyError:
        raise UnknownProfile(
            f"unknown profile {args.profile!r} (known: {', '.join(sorted(profiles))})"
        ) from None
    sched = args.schedule
    if args.interactive:
        from .bridge import BridgeSettings, serve

        settings = BridgeSettings(
            cfg=SimConfig(seed=args.seed), profile=profile, schedule=sched,
            profiles=profiles,
        )
        print(f"interactive session on ws://{args.host}:{args.port}/ws "
              f"(trace -> {args.out} on exit)")
        try:
            serve(settings, host=args.host, port=args.port, trace_out=args.out)
        except OSError as exc:
            print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
            return EXIT_INPUT
        return EXIT_OK
    if args.script:
        with open(args.script, "r", encoding="ascii") as fh:
            script = parse_script(fh.read())
    elif args.example_script:
        script = example_script(sched)
    else:
        script = []
    trace = run_session(SimConfig(seed=args.seed), profile, sched, script)
    save_trace(trace, args.out)
    events = trace.events()
    print(f"simulated {len(trace.records)} ticks -> {args.out} "
          f"({len(events)} events)")
    for ev in events:
        print("  " + ev.format())
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    parsed = load_trace(args.trace)
    report = replay(parsed)
    print(report.format())
    return EXIT_OK if report.ok else EXIT_THRESHOLD


def cmd_serve(args: argparse.Namespace) -> int:
    from .bridge import BridgeSettings, serve

    profiles = _profiles()
    try:
        profile = profiles[args.profile.lower()]
    except KeyError:
        raise UnknownProfile(f"unknown profile {args.profile!r}") from None
    settings = BridgeSettings(
        cfg=SimConfig(seed=args.seed), profile=profile, schedule=args.schedule,
        profiles=profiles,
    )
    try:
        serve(settings, host=args.host, port=args.port)
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="yolobot",
        description="Behavior engine for the YOLO robot: shape recognition, "
                    "social behaviors, storytelling-arc planning, simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit and save a KNN shape model")
    p.add_argument("--generate", type=int, default=50, metavar="N",
                   help="generate N examples per class (default 50)")
    p.add_argument("--noise", type=_parse_noise, default=NOISE_PRESETS["train"],
                   help="noise preset or 'sigma[,drop]' (default train)")
    p.add_argument("--seed", type=int, default=DEFAULT_TRAIN_SEED)
    p.add_argument("--corpus", help="manifest of `label path` trajectory files")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on generated data")
    p.add_argument("--model", help="model file (default: generated model)")
    p.add_argument("--noise", type=_parse_noise, default=NOISE_PRESETS["mouse"])
    p.add_argument("--count", type=int, default=100, metavar="N",
                   help="test examples per class (default 100)")
    p.add_argument("--seed", type=int, default=None,
                   help="test-set seed (default: per-condition held-out seed)")
    p.add_argument("--min-accuracy", type=float, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="run a scripted or interactive session")
    p.add_argument("--profile", default="harmonious")
    p.add_argument("--schedule", type=_parse_schedule,
                   default=ArcSchedule(), metavar="R,C,F")
    p.add_argument("--script", help="script file of timed inputs")
    p.add_argument("--example-script", action="store_true",
                   help="use the built-in illustrative play script")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="trace.txt", help="trace file to write")
    p.add_argument("--interactive", action="store_true",
                   help="serve the live UI bridge instead of a script")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="verify a recorded trace")
    p.add_argument("trace")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the UI bridge server")
    p.add_argument("--profile", default="harmonious")
    p.add_argument("--schedule", type=_parse_schedule,
                   default=ArcSchedule(), metavar="R,C,F")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingClass as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MalformedTrace as exc:
        print(f"error: malformed trace: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (YolobotError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
