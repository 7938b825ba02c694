"""Command-line interface: ingest, synth, run, eval, report.

Exit codes: 0 success, 2 bad input data or configuration, 3 file I/O
problems, 4 when a run trains nothing because every pathway failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .backends.svm import SMO_BACKEND
from .errors import DataError, TrainingError
from .fusion import (
    FUSED_COLUMN,
    FusionMode,
    PathwaySpec,
    TrainOptions,
    TrainedPipeline,
    apply_pipeline,
    enumerate_pathways,
    pipeline_to_doc,
    train_pipeline,
)
from .metrics import ADCFConfig, EvalReport, LabeledScores, evaluate_scores, histogram_export
from .reports import (
    PathwayResult,
    histogram_csv,
    render_per_attack_csv,
    render_per_attack_text,
    render_summary_csv,
    render_summary_text,
)
from .score_io import (
    KeyFormat,
    Partition,
    attach_scores,
    parse_trial_key,
    read_canonical,
    write_canonical,
)
from .synth import (
    default_sasv_scenario,
    load_synth_config,
    synth_config_to_doc,
    synthesize_partitions,
)

_DEFAULT_PATHWAY_TOKENS = ("default", "default17")


@dataclass(frozen=True)
class RunConfig:
    """Parsed run configuration with paths already resolved."""

    train_path: Path | None
    dev_path: Path | None
    eval_path: Path | None
    pathways: tuple
    seed: int
    out_dir: Path
    options: TrainOptions
    adcf: ADCFConfig
    bins: int
    raw_doc: dict


def _resolve(base_dir, value):
    if value is None:
        return None
    path = Path(value)
    return path if path.is_absolute() else base_dir / path


def parse_run_config(doc, base_dir):
    """Validate a run-config document; relative paths hang off base_dir."""
    if not isinstance(doc, dict):
        raise DataError("run config must be a JSON object")
    pathways = doc.get("pathways", "default")
    if isinstance(pathways, str):
        if pathways not in _DEFAULT_PATHWAY_TOKENS:
            raise DataError(
                f"unknown pathway set {pathways!r}; expected one of "
                f"{list(_DEFAULT_PATHWAY_TOKENS)} or an explicit list"
            )
        specs = tuple(enumerate_pathways())
    else:
        specs = tuple(PathwaySpec.from_json_dict(d) for d in pathways)
    if not specs:
        raise DataError("run config selects no pathways")
    dev = doc.get("dev")
    evl = doc.get("eval")
    if dev is None and evl is None:
        raise DataError("run config needs a dev table, an eval table, or both")
    adcf_doc = doc.get("adcf", {})
    priors = adcf_doc.get("priors", (0.9, 0.05, 0.05))
    costs = adcf_doc.get("costs", (1.0, 10.0, 20.0))
    adcf = ADCFConfig(
        prior_target=float(priors[0]),
        prior_nontarget=float(priors[1]),
        prior_spoof=float(priors[2]),
        cost_miss=float(costs[0]),
        cost_fa_nontarget=float(costs[1]),
        cost_fa_spoof=float(costs[2]),
    )
    return RunConfig(
        train_path=_resolve(base_dir, doc.get("train")),
        dev_path=_resolve(base_dir, dev),
        eval_path=_resolve(base_dir, evl),
        pathways=specs,
        seed=int(doc.get("seed", 0)),
        out_dir=_resolve(base_dir, doc.get("out_dir", "out")),
        options=TrainOptions.from_json_dict(doc.get("options", {})),
        adcf=adcf,
        bins=int(doc.get("bins", 40)),
        raw_doc=doc,
    )


def load_run_config(path):
    path = Path(path)
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    return parse_run_config(doc, path.parent)


def execute_run(config):
    """Train and evaluate every pathway; returns (results, fused score tables).

    A pathway that fails with bad data is recorded as a failed row; if all
    of them fail the run itself is an error.
    """
    train_table = (
        read_canonical(config.train_path, Partition.TRAIN)
        if config.train_path is not None
        else None
    )
    dev_table = (
        read_canonical(config.dev_path, Partition.DEV)
        if config.dev_path is not None
        else None
    )
    eval_table = (
        read_canonical(config.eval_path, Partition.EVAL)
        if config.eval_path is not None
        else None
    )
    results = []
    fused = {}
    for spec in config.pathways:
        try:
            if spec.mode is FusionMode.SCORE_SUM:
                pipeline = TrainedPipeline(spec, None, None, None)
            elif train_table is None:
                raise DataError(
                    f"pathway {spec.name} needs training data but the config "
                    "names no train table"
                )
            else:
                pipeline = train_pipeline(
                    train_table, spec, seed=config.seed, options=config.options
                )
            entry = {}
            reports = {}
            for part_name, table in (("dev", dev_table), ("eval", eval_table)):
                if table is None:
                    reports[part_name] = None
                    continue
                scored = apply_pipeline(pipeline, table)
                labeled = LabeledScores.from_table(scored, FUSED_COLUMN)
                reports[part_name] = evaluate_scores(labeled, config.adcf)
                entry[part_name] = scored
            results.append(
                PathwayResult(
                    spec=spec,
                    dev_report=reports["dev"],
                    eval_report=reports["eval"],
                )
            )
            fused[spec.name] = (entry.get("dev"), entry.get("eval"), pipeline)
        except ValueError as exc:
            results.append(PathwayResult(spec=spec, error=str(exc)))
    if all(r.error is not None for r in results):
        first = results[0].error
        raise TrainingError(
            f"all {len(results)} pathways failed; first error: {first}"
        )
    raw_tables = {"dev": dev_table, "eval": eval_table}
    return results, fused, raw_tables


def _unique_slugs(results):
    seen = {}
    out = []
    for result in results:
        slug = result.spec.slug
        if slug in seen:
            seen[slug] += 1
            slug = f"{slug}~{seen[slug]}"
        else:
            seen[slug] = 1
        out.append(slug)
    return out


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_run_outputs(config, results, fused, raw_tables):
    """Write per-pathway reports, summaries, histograms, and run metadata."""
    out_dir = Path(config.out_dir)
    reports_dir = out_dir / "reports"
    hist_dir = out_dir / "hist"
    reports_dir.mkdir(parents=True, exist_ok=True)
    hist_dir.mkdir(parents=True, exist_ok=True)

    slugs = _unique_slugs(results)
    index = []
    for result, slug in zip(results, slugs):
        doc = {
            "name": result.spec.name,
            "spec": result.spec.to_json_dict(),
            "dev": result.dev_report.to_json_dict() if result.dev_report else None,
            "eval": result.eval_report.to_json_dict() if result.eval_report else None,
            "error": result.error,
        }
        if result.error is None:
            doc["pipeline"] = pipeline_to_doc(fused[result.spec.name][2])
        _write_json(reports_dir / f"{slug}.json", doc)
        index.append({"name": result.spec.name, "slug": slug, "failed": result.error is not None})
        if result.error is None:
            dev_scored, eval_scored, _ = fused[result.spec.name]
            for part_name, scored in (("dev", dev_scored), ("eval", eval_scored)):
                if scored is None:
                    continue
                labeled = LabeledScores.from_table(scored, FUSED_COLUMN)
                export = histogram_export(labeled, config.bins)
                _write_text(
                    hist_dir / f"{slug}__{part_name}.csv", histogram_csv(export)
                )
    for part_name, table in raw_tables.items():
        if table is None:
            continue
        for column in table.columns:
            labeled = LabeledScores.from_table(table, column)
            export = histogram_export(labeled, config.bins)
            _write_text(
                hist_dir / f"raw__{column}__{part_name}.csv", histogram_csv(export)
            )
    _write_json(reports_dir / "index.json", {"pathways": index})
    summary_text = render_summary_text(results)
    _write_text(out_dir / "summary.txt", summary_text)
    _write_text(out_dir / "summary.csv", render_summary_csv(results))
    if raw_tables.get("eval") is not None:
        _write_text(
            out_dir / "per_attack_eval.txt", render_per_attack_text(results)
        )
        _write_text(
            out_dir / "per_attack_eval.csv", render_per_attack_csv(results)
        )
    meta = {
        "tool": "sasv-fuse",
        "version": __version__,
        "smo_backend": SMO_BACKEND,
        "seed": config.seed,
        "pathways": [r.spec.name for r in results],
        "failed": [r.spec.name for r in results if r.error is not None],
        "config": config.raw_doc,
    }
    _write_json(out_dir / "run_meta.json", meta)
    return summary_text


def _parse_score_flag(value):
    name, sep, path = value.partition("=")
    if not sep or not name or not path:
        raise DataError(
            f"bad --score value {value!r}; expected NAME=PATH (e.g. E=asv.txt)"
        )
    return name, path


def cmd_ingest(args):
    table = parse_trial_key(args.key, KeyFormat(args.format))
    for raw in args.score or ():
        name, path = _parse_score_flag(raw)
        table = attach_scores(table, name, path)
    table = table.with_partition(Partition(args.partition))
    write_canonical(table, args.out)
    print(
        f"wrote {len(table)} trials with columns [{', '.join(table.columns)}] "
        f"to {args.out}"
    )
    return 0


def cmd_synth(args):
    if args.default_scenario == (args.config is not None):
        raise DataError("pass exactly one of --default-scenario or --config")
    if args.default_scenario:
        config = default_sasv_scenario(seed=7 if args.seed is None else args.seed)
    else:
        config = load_synth_config(args.config)
        if args.seed is not None:
            from dataclasses import replace

            config = replace(config, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tables = synthesize_partitions(config)
    _write_json(out_dir / "scenario.json", synth_config_to_doc(config))
    for partition, table in tables.items():
        write_canonical(table, out_dir / f"{partition.value}.tsv")
        print(f"{partition.value}: {len(table)} trials")
    return 0


def cmd_run(args):
    config = load_run_config(args.config)
    if args.out is not None:
        config = RunConfig(
            train_path=config.train_path,
            dev_path=config.dev_path,
            eval_path=config.eval_path,
            pathways=config.pathways,
            seed=config.seed,
            out_dir=Path(args.out),
            options=config.options,
            adcf=config.adcf,
            bins=config.bins,
            raw_doc=config.raw_doc,
        )
    results, fused, raw_tables = execute_run(config)
    summary_text = write_run_outputs(config, results, fused, raw_tables)
    print(summary_text, end="")
    failed = [r for r in results if r.error is not None]
    if failed:
        print(f"({len(failed)} of {len(results)} pathways failed)", file=sys.stderr)
    return 0


def _parse_triple(value, what):
    parts = value.split(",")
    if len(parts) != 3:
        raise DataError(f"{what} must be three comma-separated numbers, got {value!r}")
    return tuple(float(p) for p in parts)


def cmd_eval(args):
    table = read_canonical(args.table)
    priors = _parse_triple(args.adcf_priors, "--adcf-priors")
    costs = _parse_triple(args.adcf_costs, "--adcf-costs")
    adcf = ADCFConfig(
        prior_target=priors[0],
        prior_nontarget=priors[1],
        prior_spoof=priors[2],
        cost_miss=costs[0],
        cost_fa_nontarget=costs[1],
        cost_fa_spoof=costs[2],
    )
    labeled = LabeledScores.from_table(table, args.column)
    report = evaluate_scores(labeled, adcf)
    doc = report.to_json_dict()
    text = json.dumps(doc, indent=2, sort_keys=True)
    print(text)
    if args.out:
        _write_text(args.out, text + "\n")
    return 0


def cmd_report(args):
    run_dir = Path(args.run_dir)
    index_path = run_dir / "reports" / "index.json"
    with open(index_path, "r", encoding="utf-8") as handle:
        index = json.load(handle)
    results = []
    for entry in index["pathways"]:
        with open(run_dir / "reports" / f"{entry['slug']}.json", encoding="utf-8") as handle:
            doc = json.load(handle)
        results.append(
            PathwayResult(
                spec=PathwaySpec.from_json_dict(doc["spec"]),
                dev_report=EvalReport.from_json_dict(doc["dev"]) if doc.get("dev") else None,
                eval_report=EvalReport.from_json_dict(doc["eval"]) if doc.get("eval") else None,
                error=doc.get("error"),
            )
        )
    if not results:
        raise DataError(f"no pathway reports under {run_dir}")
    summary_text = render_summary_text(results)
    print(summary_text, end="")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_text(out_dir / "summary.txt", summary_text)
        _write_text(out_dir / "summary.csv", render_summary_csv(results))
        if any(r.eval_report is not None for r in results):
            _write_text(out_dir / "per_attack_eval.txt", render_per_attack_text(results))
            _write_text(out_dir / "per_attack_eval.csv", render_per_attack_csv(results))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sasv-fuse",
        description=(
            "Score-level fusion for spoofing-aware speaker verification: "
            "join system scores onto trial keys, train fusion pathways, and "
            "report EER / detection-cost metrics."
        ),
    )
    parser.add_argument("--version", action="version", version=f"sasv-fuse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser(
        "ingest", help="join score files onto a trial key and write a score table"
    )
    p_ingest.add_argument("--key", required=True, help="trial key file")
    p_ingest.add_argument(
        "--format",
        choices=[f.value for f in KeyFormat],
        default=KeyFormat.SASV_PROTOCOL.value,
        help="key file format (default: sasv protocol lines)",
    )
    p_ingest.add_argument(
        "--score",
        action="append",
        metavar="NAME=PATH",
        help="score file to attach as column NAME (repeatable)",
    )
    p_ingest.add_argument(
        "--partition",
        choices=[p.value for p in Partition],
        default=Partition.OTHER.value,
        help="partition tag recorded on the table",
    )
    p_ingest.add_argument("--out", required=True, help="output table path (TSV)")
    p_ingest.set_defaults(func=cmd_ingest)

    p_synth = sub.add_parser(
        "synth", help="generate synthetic train/dev/eval score tables"
    )
    p_synth.add_argument(
        "--default-scenario",
        action="store_true",
        help="use the built-in three-column scenario",
    )
    p_synth.add_argument("--config", help="synthesis config JSON")
    p_synth.add_argument("--seed", type=int, default=None, help="override the base seed")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.set_defaults(func=cmd_synth)

    p_run = sub.add_parser(
        "run", help="train and evaluate the configured fusion pathways"
    )
    p_run.add_argument("--config", required=True, help="run config JSON")
    p_run.add_argument("--out", help="override the configured output directory")
    p_run.set_defaults(func=cmd_run)

    p_eval = sub.add_parser("eval", help="compute metrics for one score column")
    p_eval.add_argument("--table", required=True, help="score table (canonical TSV)")
    p_eval.add_argument(
        "--column", default=FUSED_COLUMN, help="score column to evaluate"
    )
    p_eval.add_argument(
        "--adcf-priors",
        default="0.9,0.05,0.05",
        help="target,nontarget,spoof priors",
    )
    p_eval.add_argument(
        "--adcf-costs",
        default="1,10,20",
        help="miss,nontarget-fa,spoof-fa costs",
    )
    p_eval.add_argument("--out", help="also write the report JSON here")
    p_eval.set_defaults(func=cmd_eval)

    p_report = sub.add_parser(
        "report", help="re-render summary tables from a finished run directory"
    )
    p_report.add_argument("--run-dir", required=True, help="directory cmd run wrote")
    p_report.add_argument("--out", help="write summary files here as well")
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TrainingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
