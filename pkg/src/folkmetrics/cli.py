"""Command-line front end: folkmetrics <subcommand>.

Subcommands read a delimited annotation file (or '-' for stdin), run one
analysis, and write CSV/JSON outputs. `report` runs the whole pipeline
into a bundle directory. Domain errors exit with status 1, usage errors
with status 2.
"""

from __future__ import annotations

import functools
import sys

import click

from . import consensus as consensus_mod
from . import expertise as expertise_mod
from . import motivation as motivation_mod
from . import report as report_mod
from . import similarity as similarity_mod
from . import spear as spear_mod
from . import taxonomy as taxonomy_mod
from .corpus import (
    SyntheticConfig,
    TimeGranularity,
    build_index,
    generate_synthetic,
    parse_annotations,
    write_annotations,
)
from .errors import FolkmetricsError
from .partition import pareto_curve, partition_summary, split_supertaggers
from .stats import BinSpec
from .report import (
    PARTITION_SUMMARY_HEADER,
    ReportConfig,
    partition_json,
    partition_summary_rows,
    summary_json,
    write_binned_csv,
    write_consensus_csv,
    write_json,
    write_labeled_binned_csv,
    write_pareto_csv,
    write_similarity_csv,
    write_usage_csv,
)


def _fail_on_domain_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (FolkmetricsError, OSError) as exc:
            raise click.ClickException(str(exc))

    return wrapper


def _parse_bins(_ctx, _param, value) -> BinSpec:
    """Accept 'base=2,step=0.1,max=14' (any subset of the keys)."""
    if value is None:
        return BinSpec()
    fields = {}
    try:
        for chunk in value.split(","):
            key, _, raw = chunk.partition("=")
            fields[key.strip()] = float(raw)
    except ValueError:
        raise click.BadParameter(f"cannot parse bin spec {value!r}")
    known = {"base": "base", "step": "exponent_step", "max": "max_exponent"}
    unknown = set(fields) - set(known)
    if unknown:
        raise click.BadParameter(f"unknown bin spec keys: {sorted(unknown)}")
    try:
        return BinSpec(**{known[k]: v for k, v in fields.items()})
    except FolkmetricsError as exc:
        raise click.BadParameter(str(exc))


def input_options(fn):
    fn = click.argument("source", type=str)(fn)
    fn = click.option("--delimiter", default="\t", help="field delimiter (default: tab)")(fn)
    fn = click.option(
        "--granularity",
        type=click.Choice([g.value for g in TimeGranularity]),
        default=TimeGranularity.SECONDS.value,
        show_default=True,
        help="timestamp resolution",
    )(fn)
    fn = click.option("--header/--no-header", default=False, help="first line is a header")(fn)
    fn = click.option(
        "--dedupe",
        type=click.Choice(["on", "off"]),
        default="off",
        show_default=True,
        help="collapse duplicate (user,item,tag) triples to the earliest",
    )(fn)
    return fn


def bins_option(fn):
    return click.option(
        "--bins",
        callback=_parse_bins,
        default=None,
        help="log bin spec, e.g. base=2,step=0.1,max=14",
    )(fn)


def _load_index(source, delimiter, granularity, header, dedupe):
    gran = TimeGranularity(granularity)
    stream = sys.stdin if source == "-" else source
    parsed = parse_annotations(stream, delimiter=delimiter, granularity=gran, header=header)
    return build_index(parsed.annotations, dedupe=(dedupe == "on"), granularity=gran), parsed


def _out_stream(path):
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


def _emit_json(payload, out):
    stream = _out_stream(out)
    try:
        import json

        json.dump(payload, stream, indent=2, sort_keys=True)
        stream.write("\n")
    finally:
        if stream is not sys.stdout:
            stream.close()


@click.group()
@click.version_option()
@click.option("--threads", type=int, default=1, show_default=True,
              help="worker threads (reserved; analyses are deterministic regardless)")
@click.pass_context
def main(ctx, threads):
    """Supertagger analytics for collaborative-tagging data."""
    if threads < 1:
        raise click.BadParameter("--threads must be >= 1")
    ctx.obj = {"threads": threads}


@main.command()
@input_options
@click.option("--out", default="-", help="normalized TSV output path (default: stdout)")
@click.option("--summary-out", default=None, help="write the dataset summary JSON here")
@_fail_on_domain_errors
def ingest(source, delimiter, granularity, header, dedupe, out, summary_out):
    """Parse, validate, optionally dedupe, and re-emit a dataset."""
    index, parsed = _load_index(source, delimiter, granularity, header, dedupe)
    stream = _out_stream(out)
    try:
        write_annotations(index.annotations, stream)
    finally:
        if stream is not sys.stdout:
            stream.close()
    payload = summary_json(index)
    payload["malformed_lines"] = parsed.malformed
    if summary_out:
        write_json(summary_out, payload)
    else:
        click.echo(f"{payload['annotations']} annotations "
                   f"({parsed.malformed} malformed lines skipped)", err=True)


@main.command()
@click.option("--users", type=int, default=1000, show_default=True)
@click.option("--items", type=int, default=500, show_default=True)
@click.option("--tags", type=int, default=200, show_default=True)
@click.option("--activity-exponent", type=float, default=2.0, show_default=True)
@click.option("--item-exponent", type=float, default=1.0, show_default=True)
@click.option("--tag-exponent", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, envvar="FOLKMETRICS_SEED", show_default=True,
              help="RNG seed (FOLKMETRICS_SEED overrides the default)")
@click.option("--out", default="-", help="output path (default: stdout)")
@_fail_on_domain_errors
def synth(users, items, tags, activity_exponent, item_exponent, tag_exponent, seed, out):
    """Generate a power-law synthetic corpus in the ingestion format."""
    config = SyntheticConfig(
        n_users=users,
        activity_exponent=activity_exponent,
        n_items=items,
        n_tags=tags,
        item_popularity_exponent=item_exponent,
        tag_popularity_exponent=tag_exponent,
        seed=seed,
    )
    annotations = generate_synthetic(config)
    stream = _out_stream(out)
    try:
        write_annotations(annotations, stream)
    finally:
        if stream is not sys.stdout:
            stream.close()


@main.command()
@input_options
@click.option("--fraction", type=float, default=0.5, show_default=True,
              help="target supertagger share of annotations")
@click.option("--out", default="-", help="partition JSON (default: stdout)")
@click.option("--tables", default=None, help="write the per-group summary CSV here")
@click.option("--pareto", default=None, help="write the Pareto curve CSV here")
@click.option("--resolution", type=int, default=1000, show_default=True,
              help="Pareto curve sample points")
@click.option("--full-pareto", is_flag=True, help="export the curve at full resolution")
@click.option("--omit-users", is_flag=True, help="leave user lists out of the JSON")
@click.option("--users-out", default=None,
              help="externalize user lists to <prefix>supertaggers.txt / <prefix>others.txt")
@_fail_on_domain_errors
def partition(source, delimiter, granularity, header, dedupe, fraction, out, tables,
              pareto, resolution, full_pareto, omit_users, users_out):
    """Split users into supertaggers / others and summarize both groups."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    part = split_supertaggers(index, fraction)
    if users_out is not None:
        for name, users in (("supertaggers", part.supertaggers), ("others", part.others)):
            with open(f"{users_out}{name}.txt", "w", encoding="utf-8", newline="") as fh:
                fh.writelines(f"{user}\n" for user in sorted(users))
        omit_users = True
    _emit_json(partition_json(part, include_users=not omit_users), out)
    if tables:
        report_mod._write_csv(
            tables, PARTITION_SUMMARY_HEADER, partition_summary_rows(partition_summary(index, part))
        )
    if pareto:
        write_pareto_csv(pareto, pareto_curve(index, None if full_pareto else resolution))


@main.command()
@input_options
@click.option("--dimension", type=click.Choice(["tag", "item"]), default="tag", show_default=True)
@click.option("--fraction", type=float, default=0.5, show_default=True)
@click.option("--max-n", type=int, default=100_000, show_default=True)
@click.option("--out", default="-", help="curve CSV (default: stdout)")
@_fail_on_domain_errors
def similarity(source, delimiter, granularity, header, dedupe, dimension, fraction, max_n, out):
    """Top-N Spearman/cosine similarity curve between the two groups."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    part = split_supertaggers(index, fraction)
    curve = similarity_mod.similarity_curve(
        index, part, dimension, similarity_mod.default_n_grid(max_n)
    )
    write_similarity_csv(out if out != "-" else sys.stdout, curve)
    if curve.core_size is not None:
        click.echo(f"core size: {curve.core_size}", err=True)


@main.command("usage-dist")
@input_options
@click.option("--dimension", type=click.Choice(["tag", "item"]), default="tag", show_default=True)
@click.option("--cumulative", is_flag=True, help="emit the at-least-N cumulative form")
@click.option("--fraction", type=float, default=0.5, show_default=True)
@click.option("--out", default="-", help="CSV output (default: stdout)")
@_fail_on_domain_errors
def usage_dist(source, delimiter, granularity, header, dedupe, dimension, cumulative,
               fraction, out):
    """Per-group usage distribution over key popularity."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    part = split_supertaggers(index, fraction)
    series = {}
    for group, users in (("S", part.supertaggers), ("not_S", part.others)):
        dist = similarity_mod.freq_dist(index, users, dimension)
        if dist.counts:
            series[group] = similarity_mod.usage_distribution(dist, cumulative=cumulative)
    write_usage_csv(out if out != "-" else sys.stdout, series)


def _read_popularity(path, delimiter="\t"):
    popularity = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            parts = line.split(delimiter)
            if len(parts) != 2:
                raise FolkmetricsError(f"bad popularity line: {line!r}")
            popularity[parts[0].strip()] = float(parts[1])
    return popularity


@main.command("exo-diff")
@input_options
@click.option("--popularity", required=True, help="two-column <item>\\t<count> sidecar file")
@click.option("--fraction", type=float, default=0.5, show_default=True)
@bins_option
@click.option("--out", default="-", help="CSV output (default: stdout)")
@_fail_on_domain_errors
def exo_diff(source, delimiter, granularity, header, dedupe, popularity, fraction, bins, out):
    """S-minus-others annotation difference binned by exogenous popularity."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    part = split_supertaggers(index, fraction)
    series = similarity_mod.exogenous_popularity_diff(
        index, part, _read_popularity(popularity, delimiter), bins
    )
    write_binned_csv(out if out != "-" else sys.stdout, series, value_name="mean_diff")


@main.command()
@input_options
@click.option("--fraction", type=float, default=0.5, show_default=True)
@bins_option
@click.option("--out", default="-", help="CSV output (default: stdout)")
@_fail_on_domain_errors
def consensus(source, delimiter, granularity, header, dedupe, fraction, bins, out):
    """Top-tag match rate and per-item cosine, binned by annotation count."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    part = split_supertaggers(index, fraction)
    series = consensus_mod.consensus_by_bin(index, part, bins)
    write_consensus_csv(out if out != "-" else sys.stdout, series)


@main.command()
@input_options
@click.option("--per-user", default=None, help="write per-user scores CSV here")
@click.option("--binned", default="-", help="binned series CSV (default: stdout)")
@click.option("--orphan-divisor", type=int, default=100, show_default=True)
@bins_option
@_fail_on_domain_errors
def motivation(source, delimiter, granularity, header, dedupe, per_user, binned,
               orphan_divisor, bins):
    """Categorizer/describer metrics: TPP, TRR, orphan ratio."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    if per_user:
        rows = []
        for user in sorted(index.by_user):
            scores = motivation_mod.user_motivation(index, user, orphan_divisor)
            rows.append((user, index.user_annotation_count[user], scores.tpp,
                         scores.trr, scores.orphan_ratio))
        report_mod._write_csv(
            per_user, ["user", "annotations", "tpp", "trr", "orphan_ratio"], rows
        )
    series = motivation_mod.motivation_by_bin(index, bins, orphan_divisor)
    write_labeled_binned_csv(
        binned if binned != "-" else sys.stdout,
        "metric",
        {"tpp": series.tpp, "trr": series.trr, "orphan_ratio": series.orphan_ratio},
    )


@main.command()
@input_options
@click.option("--top-k", type=int, default=spear_mod.DEFAULT_TOP_K, show_default=True)
@click.option("--min-users", type=int, default=spear_mod.DEFAULT_MIN_USERS, show_default=True)
@click.option("--exponent", type=float, default=spear_mod.DEFAULT_EXPONENT, show_default=True)
@click.option("--tolerance", type=float, default=spear_mod.DEFAULT_TOLERANCE, show_default=True)
@click.option("--max-iter", type=int, default=spear_mod.DEFAULT_MAX_ITER, show_default=True)
@bins_option
@click.option("--out", default="-", help="binned series CSV (default: stdout)")
@click.option("--per-user", default=None, help="write per-user mean z-scores CSV here")
@_fail_on_domain_errors
def spear(source, delimiter, granularity, header, dedupe, top_k, min_users, exponent,
          tolerance, max_iter, bins, out, per_user):
    """Standardized SPEAR expertise, binned by user annotation count."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    tags = spear_mod.eligible_tags(index, top_k=top_k, min_users=min_users)
    if not tags:
        raise FolkmetricsError("no eligible tags for expertise analysis")
    results = [
        spear_mod.spear_scores(spear_mod.credit_matrix(index, tag, exponent), tolerance, max_iter)
        for tag in sorted(tags)
    ]
    mean_z = spear_mod.standardize_and_average(results)
    if per_user:
        report_mod._write_csv(
            per_user,
            ["user", "annotations", "mean_z"],
            [(u, index.user_annotation_count[u], z) for u, z in sorted(mean_z.items())],
        )
    from .stats import binned_mean

    pairs = [(float(index.user_annotation_count[u]), z) for u, z in sorted(mean_z.items())]
    write_binned_csv(out if out != "-" else sys.stdout, binned_mean(pairs, bins))


@main.group()
def expertise():
    """Consensus-based and term-depth expertise analyses."""


@expertise.command("consensus")
@input_options
@click.option("--per-user", default=None, help="write per-user scores CSV here")
@click.option("--binned", default="-", help="binned series CSV (default: stdout)")
@click.option("--raw-counts", is_flag=True,
              help="use raw annotation counts instead of distinct users for F")
@bins_option
@_fail_on_domain_errors
def expertise_consensus(source, delimiter, granularity, header, dedupe, per_user, binned,
                        raw_counts, bins):
    """Item-consensus expertise scores."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    if per_user:
        rows = []
        for user in sorted(index.by_user):
            score = expertise_mod.user_consensus_expertise(index, user)
            if score is not None:
                rows.append((user, index.user_annotation_count[user], score))
        report_mod._write_csv(per_user, ["user", "annotations", "expertise"], rows)
    series = expertise_mod.consensus_expertise_by_bin(index, bins, raw_counts=raw_counts)
    write_binned_csv(binned if binned != "-" else sys.stdout, series)


@expertise.command("depth")
@input_options
@click.option("--mode", type=click.Choice(["annotation", "vocabulary"]),
              default="vocabulary", show_default=True)
@click.option("--threshold", type=float, default=taxonomy_mod.DEFAULT_THRESHOLD, show_default=True)
@click.option("--min-support", type=int, default=taxonomy_mod.DEFAULT_MIN_SUPPORT, show_default=True)
@click.option("--top-k", type=int, default=spear_mod.DEFAULT_TOP_K, show_default=True)
@click.option("--min-users", type=int, default=spear_mod.DEFAULT_MIN_USERS, show_default=True)
@click.option("--binned", default="-", help="binned series CSV (default: stdout)")
@click.option("--per-user", default=None, help="write per-user scores CSV here")
@bins_option
@_fail_on_domain_errors
def expertise_depth(source, delimiter, granularity, header, dedupe, mode, threshold,
                    min_support, top_k, min_users, binned, per_user, bins):
    """Term-depth expertise over the induced taxonomy."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    tags = spear_mod.eligible_tags(index, top_k=top_k, min_users=min_users)
    if not tags:
        raise FolkmetricsError("no eligible tags for taxonomy induction")
    table = taxonomy_mod.conditional_table(index, tags, min_support)
    forest = taxonomy_mod.induce_forest(table, threshold)
    if per_user:
        rows = []
        for user in sorted(index.by_user):
            score = taxonomy_mod.user_depth_expertise(index, forest, user, mode)
            if score is not None:
                rows.append((user, index.user_annotation_count[user], score))
        report_mod._write_csv(per_user, ["user", "annotations", "depth_expertise"], rows)
    series = taxonomy_mod.depth_by_bin(index, forest, bins, mode)
    write_binned_csv(binned if binned != "-" else sys.stdout, series)


@main.command()
@input_options
@click.option("--threshold", type=float, default=taxonomy_mod.DEFAULT_THRESHOLD, show_default=True)
@click.option("--min-support", type=int, default=taxonomy_mod.DEFAULT_MIN_SUPPORT, show_default=True)
@click.option("--top-k", type=int, default=spear_mod.DEFAULT_TOP_K, show_default=True)
@click.option("--min-users", type=int, default=spear_mod.DEFAULT_MIN_USERS, show_default=True)
@click.option("--out", default="-", help="forest JSON (default: stdout)")
@_fail_on_domain_errors
def taxonomy(source, delimiter, granularity, header, dedupe, threshold, min_support,
             top_k, min_users, out):
    """Induce the tag taxonomy forest and emit it with depth scores."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    tags = spear_mod.eligible_tags(index, top_k=top_k, min_users=min_users)
    if not tags:
        raise FolkmetricsError("no eligible tags for taxonomy induction")
    table = taxonomy_mod.conditional_table(index, tags, min_support)
    forest = taxonomy_mod.induce_forest(table, threshold)
    coverage = taxonomy_mod.annotation_coverage(index, forest)
    _emit_json(report_mod.forest_json(forest, coverage), out)


@main.command()
@input_options
@click.option("--out-dir", required=True, help="bundle output directory")
@click.option("--fraction", type=float, default=0.5, show_default=True)
@bins_option
@click.option("--max-n", type=int, default=100_000, show_default=True)
@click.option("--pareto-resolution", type=int, default=1000, show_default=True)
@click.option("--top-k", type=int, default=spear_mod.DEFAULT_TOP_K, show_default=True)
@click.option("--min-users", type=int, default=spear_mod.DEFAULT_MIN_USERS, show_default=True)
@click.option("--exponent", type=float, default=spear_mod.DEFAULT_EXPONENT, show_default=True)
@click.option("--threshold", type=float, default=taxonomy_mod.DEFAULT_THRESHOLD, show_default=True)
@click.option("--min-support", type=int, default=taxonomy_mod.DEFAULT_MIN_SUPPORT, show_default=True)
@click.option("--orphan-divisor", type=int, default=100, show_default=True)
@click.option("--popularity", default=None, help="optional exogenous popularity sidecar")
@_fail_on_domain_errors
def report(source, delimiter, granularity, header, dedupe, out_dir, fraction, bins, max_n,
           pareto_resolution, top_k, min_users, exponent, threshold, min_support,
           orphan_divisor, popularity):
    """Run the full pipeline and write every figure/table data series."""
    index, _ = _load_index(source, delimiter, granularity, header, dedupe)
    config = ReportConfig(
        fraction=fraction,
        bins=bins,
        max_n=max_n,
        pareto_resolution=pareto_resolution,
        top_k=top_k,
        min_users=min_users,
        exponent=exponent,
        taxonomy_threshold=threshold,
        min_support=min_support,
        orphan_divisor=orphan_divisor,
    )
    pop = _read_popularity(popularity, delimiter) if popularity else None
    written = report_mod.write_report(index, out_dir, config, popularity=pop)
    click.echo(f"wrote {len(written)} files to {out_dir}", err=True)


if __name__ == "__main__":
    main()
