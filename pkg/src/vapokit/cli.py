"""Command-line entry point: score / reward / detect / build / simulate / report."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import bench, grpo, ocr_behavior
from .data import Hypothesis, Sample, pair_by_id, read_hypotheses, read_samples
from .errors import ToolkitError
from .metrics import ALL_METRICS, aggregate_reports, sample_report
from .rewards import RewardWeights, total_reward
from .tables import render_table


def _write_json(path: str, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def _map_pairs(pairs, fn, jobs: int):
    """Apply fn over (sample, hyp) pairs, id-sorted output regardless of jobs."""
    if jobs <= 1:
        return [fn(s, h) for s, h in pairs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda p: fn(*p), pairs))


def cmd_score(args) -> int:
    samples = read_samples(args.dataset)
    hyps = read_hypotheses(args.hyp)
    metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    unknown = set(metrics) - set(ALL_METRICS)
    if unknown:
        raise ToolkitError("unknown-metric", f"unknown metrics: {sorted(unknown)}")
    lang = None if args.lang == "auto" else args.lang
    pairs = pair_by_id(samples, hyps, allow_partial=args.allow_partial)

    def score_one(sample: Sample, hyp: Hypothesis):
        report = sample_report(sample, hyp.text, lang=lang, metrics=metrics)
        return sample.id, report

    scored = _map_pairs(pairs, score_one, args.jobs)
    rows = [{"id": sid, **rep.as_dict()} for sid, rep in scored]
    aggregate = aggregate_reports([rep for _, rep in scored])
    _write_json(args.out, {"rows": rows, "aggregate": aggregate.as_dict()})
    return 0


def cmd_reward(args) -> int:
    samples = read_samples(args.dataset)
    rollouts = read_hypotheses(args.rollouts)
    weights = RewardWeights.from_file(args.weights) if args.weights else RewardWeights()
    pairs = pair_by_id(samples, rollouts, allow_partial=args.allow_partial)

    def reward_one(sample: Sample, hyp: Hypothesis):
        return {"id": sample.id, **total_reward(sample, hyp.text, weights).as_dict()}

    rows = _map_pairs(pairs, reward_one, args.jobs)
    payload = {
        "weights": {
            "lambda_format": weights.lambda_format,
            "lambda_ocr": weights.lambda_ocr,
            "lambda_asr": weights.lambda_asr,
            "lambda_va": weights.lambda_va,
        },
        "rows": rows,
        "mean_total": sum(r["total"] for r in rows) / len(rows),
    }
    _write_json(args.out, payload)
    return 0


def cmd_detect(args) -> int:
    samples = read_samples(args.dataset)
    hyps = read_hypotheses(args.hyp)
    pairs = pair_by_id(samples, hyps, allow_partial=args.allow_partial)
    paired_samples = [s for s, _ in pairs]
    paired_hyps = [h for _, h in pairs]
    rows = ocr_behavior.detect_all(paired_samples, paired_hyps)
    summary = ocr_behavior.summary_row(paired_samples, paired_hyps)
    _write_json(args.out, {"rows": rows, "summary": summary})
    return 0


def cmd_build(args) -> int:
    seeds = bench.read_seed_records(args.seeds)
    generator = bench.RemoteGenerator() if args.generator == "remote" else bench.TemplateGenerator()
    manifest = bench.build_dataset(seeds, args.outdir, generator)
    print(
        json.dumps(
            {"samples": manifest.samples, "entities": manifest.entities, "hours": manifest.hours}
        )
    )
    return 0


def cmd_simulate(args) -> int:
    config = grpo.SimConfig.from_file(args.config)
    if args.seed is not None:
        config.seed = args.seed
    trace = grpo.train(config)
    out = Path(args.out)
    trace.write_jsonl(out)
    trace.write_csv(out.with_suffix(".csv"))
    print(json.dumps({"steps": len(trace.steps), "p_optimal": trace.final.p_optimal}))
    return 0


def cmd_report(args) -> int:
    try:
        payload = json.loads(Path(args.infile).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ToolkitError("no-rows", f"cannot load {args.infile}: {e}") from e
    rows = payload if isinstance(payload, list) else payload.get("rows")
    if not rows:
        raise ToolkitError("no-rows", f"{args.infile} has no rows to report")
    sys.stdout.write(render_table(rows, fmt=args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vapokit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="ASR metrics for hypotheses against a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--metrics", default=",".join(ALL_METRICS))
    p.add_argument("--lang", choices=["en", "zh", "auto"], default="auto")
    p.add_argument("--out", required=True)
    p.add_argument("--allow-partial", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("reward", help="reward breakdowns for rollouts against a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--rollouts", required=True)
    p.add_argument("--weights", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--allow-partial", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_reward)

    p = sub.add_parser("detect", help="flag outputs that leak slide-only vocabulary")
    p.add_argument("--dataset", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--allow-partial", action="store_true")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("build", help="build a synthetic slide dataset from seed records")
    p.add_argument("--seeds", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--generator", choices=["template", "remote"], default="template")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="run the toy policy-optimization loop")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="render a metrics file as a table")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=["md", "tsv"], default="md")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
        print(json.dumps({"error": "bad-config", "detail": "--jobs must be >= 1"}), file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ToolkitError as e:
        print(json.dumps({"error": e.code, "detail": str(e)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
