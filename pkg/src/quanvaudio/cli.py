"""Command-line interface.

Subcommands: featurize, corrupt, train, evaluate, report, sweep.
``sweep`` runs the full clean-train/corrupted-test pipeline from a YAML
config; the other subcommands expose the individual stages.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import corrupt as corruptmod
from . import harness
from .audio import load_wav, log_mel, write_wav
from .corrupt import CorruptionKind, CorruptionSpec
from .qsim import build_circuit
from .quanv import FeatureMap, quanv_forward


def _iter_wavs(in_dir: Path, manifest: Path | None):
    if manifest is not None:
        with open(manifest, newline="") as fh:
            for rec in csv.DictReader(fh):
                p = Path(rec["path"])
                yield p if p.is_absolute() else in_dir / p
    else:
        yield from sorted(in_dir.rglob("*.wav"))


def cmd_featurize(args) -> int:
    in_dir, out_dir = Path(args.in_dir), Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    circuit = None
    if args.template:
        circuit = build_circuit(args.template, 4, args.depth, args.circuit_seed)
    for wav_path in _iter_wavs(in_dir, args.manifest):
        rel = wav_path.relative_to(in_dir) if wav_path.is_relative_to(in_dir) else wav_path.name
        gram = log_mel(load_wav(wav_path))
        if circuit is None:
            target = (out_dir / rel).with_suffix(".gram")
            target.parent.mkdir(parents=True, exist_ok=True)
            gram.save(target)
        else:
            target = (out_dir / rel).with_suffix(".fmap")
            target.parent.mkdir(parents=True, exist_ok=True)
            quanv_forward(gram.values, circuit).save(target)
    return 0


def cmd_corrupt(args) -> int:
    in_dir, out_dir = Path(args.in_dir), Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    kind = CorruptionKind(args.kind)
    sidecar_rows = []
    for wav_path in sorted(in_dir.rglob("*.wav")):
        rel = wav_path.relative_to(in_dir)
        seed = harness.derive_seed(
            args.seed, f"corrupt/{kind.value}/{args.severity}/{rel}"
        )
        spec = CorruptionSpec(kind, args.severity, seed)
        w = load_wav(wav_path)
        out_path = out_dir / rel
        out_path.parent.mkdir(parents=True, exist_ok=True)
        write_wav(out_path, corruptmod.apply(spec, w))
        sidecar_rows.append(
            [str(rel), kind.value, spec.severity_value,
             corruptmod.drawn_parameter(spec, w)]
        )
    with open(out_dir / "corruption_log.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["file", "kind", "severity_value", "drawn_parameter"])
        writer.writerows(sidecar_rows)
    return 0


def cmd_train(args) -> int:
    cfg = harness.ExperimentConfig.from_yaml(args.config)
    models = [args.model] if args.model else None
    result = harness.run_experiment(
        cfg, evaluate_corrupted=False, models_filter=models
    )
    return 1 if result.failures else 0


def cmd_evaluate(args) -> int:
    cfg = harness.ExperimentConfig.from_yaml(args.config)
    models = [args.model] if args.model else None
    result = harness.run_experiment(
        cfg, reuse_checkpoints=True, models_filter=models
    )
    return 1 if result.failures else 0


def cmd_report(args) -> int:
    grids = harness.grids_from_accuracy_csv(args.accuracy)
    if not grids:
        print("no complete accuracy grids found", file=sys.stderr)
        return 1
    model_ids = sorted({model for _, model in grids})
    n_seeds = max(seed for seed, _ in grids) + 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    problems = harness.write_reports(out_dir, grids, model_ids, n_seeds)
    return 1 if problems else 0


def cmd_sweep(args) -> int:
    cfg = harness.ExperimentConfig.from_yaml(args.config)
    result = harness.run_experiment(cfg)
    if result.failures:
        print(f"{len(result.failures)} cells failed; see failures.csv", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quanvaudio")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", help="log-Mel (and optionally quanvolution) features")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--manifest", type=Path, default=None)
    p.add_argument("--template", choices=["BEQC", "SEQC", "RQC"], default=None)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--circuit-seed", type=int, default=1234)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("corrupt", help="write corrupted copies of a WAV tree")
    p.add_argument("--kind", required=True, choices=[k.value for k in CorruptionKind])
    p.add_argument("--severity", type=int, required=True, choices=range(0, 7))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", dest="out_dir", required=True)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("train", help="train models on the clean splits")
    p.add_argument("--config", required=True)
    p.add_argument("--model", default=None, help="restrict to one model id")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate saved checkpoints on all cells")
    p.add_argument("--config", required=True)
    p.add_argument("--model", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="CE/RCE/mCE/RmCE from an accuracy CSV")
    p.add_argument("--accuracy", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="full multi-seed robustness pipeline")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
