"""Command-line pipeline: generate, preprocess, train, encode, search,
evaluate, diagnose.

Every randomized command requires an explicit --seed; nothing draws from
ambient entropy.  Exit codes: 0 success, 1 usage error, 2 data/model error.
"""

import sys

import click
import numpy as np

from . import model_io, search as search_mod
from .data import LabeledDataset, load_dataset_csv, save_dataset_csv
from .hashing import pairwise_abs_cosine, random_arrangement
from .mcmc import TrainConfig, train
from .objective import OBJECTIVE_KINDS, ObjectiveConfig
from .pairs import SAMPLING_PRESETS, sampling_config_from_preset
from .preprocess import StandardizePCA, identity_preprocess
from .search import CodeTable
from .synth import gaussian_clusters, gaussian_sign_dataset

_seed_option = click.option("--seed", type=int, required=True, help="Master random seed.")
_threads_option = click.option(
    "--threads", type=int, default=None,
    help="Worker thread cap (default: hardware concurrency). Never changes results.",
)


@click.group()
def cli():
    """Learned and random hyperplane hashing for Hamming-space search."""


@cli.group()
def generate():
    """Write synthetic labeled datasets in the dataset CSV format."""


@generate.command("gaussian-sign")
@click.option("--n", type=int, default=300, show_default=True, help="Number of records.")
@_seed_option
@click.option("--out", required=True, help="Output dataset CSV.")
def generate_gaussian_sign(n, seed, out):
    """3-D standard-normal points labeled by the sign of the x component."""
    save_dataset_csv(out, gaussian_sign_dataset(n, seed))
    click.echo(f"wrote {out} ({n} records, 3 dims, labels pos/neg)")


@generate.command("clusters")
@click.option("--clusters", type=int, default=10, show_default=True)
@click.option("--dim", type=int, default=8, show_default=True)
@click.option("--per-cluster", type=int, default=30, show_default=True)
@click.option("--spread", type=float, default=0.25, show_default=True)
@click.option("--center-scale", type=float, default=2.0, show_default=True,
              help="Centers are drawn from N(0, center_scale^2 I).")
@_seed_option
@click.option("--out", required=True, help="Output dataset CSV.")
def generate_clusters(clusters, dim, per_cluster, spread, center_scale, seed, out):
    """Isotropic Gaussian blobs with one label per cluster."""
    rng = np.random.default_rng(seed)
    centers = center_scale * rng.standard_normal((clusters, dim))
    labels = [f"c{i}" for i in range(clusters)]
    dataset = gaussian_clusters(centers, spread, per_cluster, labels, seed)
    save_dataset_csv(out, dataset)
    click.echo(f"wrote {out} ({len(dataset)} records, {dim} dims, {clusters} labels)")


@cli.command()
@click.option("--data", "data_path", required=True, help="Input dataset CSV.")
@click.option("--threshold", type=float, default=0.8, show_default=True,
              help="Cumulative variance fraction retained by PCA.")
@click.option("--out", required=True, help="Output CSV of transformed records.")
def preprocess(data_path, threshold, out):
    """Standardize and PCA-project a dataset, writing the reduced CSV."""
    dataset = load_dataset_csv(data_path)
    model = StandardizePCA(contribution_threshold=threshold).fit(dataset.vectors)
    reduced = LabeledDataset(model.transform(dataset.vectors), dataset.labels)
    save_dataset_csv(out, reduced)
    click.echo(f"kept {model.n_components_} of {dataset.dim} components")
    click.echo(f"wrote {out}")


@cli.command("train")
@click.option("--data", "data_path", required=True, help="Training dataset CSV.")
@click.option("--out", required=True, help="Output model file (JSON).")
@click.option("--bits", type=int, default=1024, show_default=True)
@click.option("--batches", type=int, default=10, show_default=True)
@click.option("--steps", type=int, default=100, show_default=True,
              help="Random-walk steps per batch.")
@click.option("--pairs", type=int, default=2000, show_default=True,
              help="Pairs per batch, split evenly between positives and negatives.")
@click.option("--objective", type=click.Choice(OBJECTIVE_KINDS), default="count",
              show_default=True)
@click.option("--temperature", type=float, default=1.0, show_default=True)
@click.option("--sampling", type=click.Choice(SAMPLING_PRESETS), default="randomhit-nearmiss",
              show_default=True)
@click.option("--stddev", type=float, default=0.01, show_default=True,
              help="Proposal standard deviation.")
@_seed_option
@click.option("--pca-threshold", type=float, default=0.8, show_default=True,
              help="Cumulative variance fraction for noise reduction.")
@click.option("--no-preprocess", is_flag=True,
              help="Train in the raw input space (identity preprocessing).")
@click.option("--per-hyperplane-pairs", is_flag=True,
              help="Sample an independent pair set per hyperplane instead of one per batch.")
@click.option("--track-best", is_flag=True,
              help="Also write the best-scoring visited arrangement to OUT.best.")
@click.option("--report-prefix", default=None,
              help="Write PREFIX_acceptance.csv and PREFIX_logu.csv diagnostics.")
@_threads_option
def train_cmd(data_path, out, bits, batches, steps, pairs, objective, temperature,
              sampling, stddev, seed, pca_threshold, no_preprocess,
              per_hyperplane_pairs, track_best, report_prefix, threads):
    """Learn a hyperplane arrangement and write the model file."""
    if pairs <= 0 or pairs % 2:
        raise click.BadParameter("must be a positive even number (equal positives and negatives)",
                                 param_hint="--pairs")
    dataset = load_dataset_csv(data_path)
    if no_preprocess:
        pre = identity_preprocess(dataset.dim)
    else:
        pre = StandardizePCA(contribution_threshold=pca_threshold).fit(dataset.vectors)
    train_data = LabeledDataset(pre.transform(dataset.vectors), dataset.labels)

    config = TrainConfig(
        n_bits=bits,
        n_batches=batches,
        steps_per_batch=steps,
        proposal_stddev=stddev,
        objective=ObjectiveConfig(kind=objective, temperature=temperature),
        sampling=sampling_config_from_preset(sampling, pairs),
        seed=seed,
        shared_pairs=not per_hyperplane_pairs,
        track_best=track_best,
        track_trajectory=report_prefix is not None,
    )
    normals, report = train(train_data, config, n_threads=threads)

    echo = {
        "bits": bits, "batches": batches, "steps": steps, "pairs": pairs,
        "objective": objective, "temperature": temperature, "sampling": sampling,
        "stddev": stddev, "seed": seed,
        "shared_pairs": not per_hyperplane_pairs, "track_best": track_best,
        "pca_threshold": None if no_preprocess else pca_threshold,
    }
    model_io.save_model(out, pre, normals, echo)

    for b in range(batches):
        click.echo(f"batch {b + 1}/{batches}: mean acceptance {report.acceptance_rates[b].mean():.3f}")
    flu = report.final_log_u
    click.echo(f"final log U: mean {flu.mean():.3f}, min {flu.min():.3f}, max {flu.max():.3f}")
    if track_best:
        model_io.save_model(out + ".best", pre, report.best_normals, echo)
        click.echo(f"best-visit log U: mean {report.best_log_u.mean():.3f}; wrote {out}.best")
    if report_prefix is not None:
        with open(f"{report_prefix}_acceptance.csv", "w", encoding="utf-8") as fh:
            fh.write(report.acceptance_csv())
        with open(f"{report_prefix}_logu.csv", "w", encoding="utf-8") as fh:
            fh.write(report.trace_csv())
        click.echo(f"wrote {report_prefix}_acceptance.csv and {report_prefix}_logu.csv")
    click.echo(f"wrote {out} ({dataset.dim} -> {pre.n_components_} dims, {bits} bits)")


@cli.command()
@click.option("--model", "model_path", required=True)
@click.option("--data", "data_path", required=True, help="Dataset CSV to encode.")
@click.option("--out", required=True, help="Output code-table file (binary).")
def encode(model_path, data_path, out):
    """Hash a dataset with a trained model into a packed code table."""
    pre, normals, _ = model_io.load_model(model_path)
    dataset = load_dataset_csv(data_path)
    table = CodeTable.from_vectors(normals, pre.transform(dataset.vectors))
    model_io.save_code_table(out, table)
    click.echo(f"wrote {out} ({len(table)} codes, {table.n_bits} bits each)")


@cli.command("search")
@click.option("--model", "model_path", required=True)
@click.option("--searched", "searched_path", required=True, help="Searched dataset CSV.")
@click.option("--queries", "queries_path", required=True, help="Query dataset CSV.")
@click.option("--k", type=int, default=10, show_default=True)
@click.option("--out", default="-", help="Output CSV (default: stdout).")
def search_cmd(model_path, searched_path, queries_path, k, out):
    """Top-k Hamming search of every query against the searched set."""
    pre, normals, _ = model_io.load_model(model_path)
    searched = load_dataset_csv(searched_path)
    queries = load_dataset_csv(queries_path)
    table = CodeTable.from_vectors(normals, pre.transform(searched.vectors))
    query_codes = CodeTable.from_vectors(normals, pre.transform(queries.vectors))

    lines = ["query,rank,index,hamming_distance"]
    for qi, code in enumerate(query_codes.codes):
        dists = search_mod.hamming_to_all(table.codes, code)
        top = search_mod.top_k_by_hamming(table, code, k)
        lines.extend(f"{qi},{r},{idx},{dists[idx]}" for r, idx in enumerate(top))
    text = "\n".join(lines) + "\n"
    if out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        click.echo(f"wrote {out}")


@cli.command()
@click.option("--model", "model_path", required=True)
@click.option("--searched", "searched_path", required=True, help="Searched dataset CSV.")
@click.option("--queries", "queries_path", required=True, help="Query dataset CSV.")
@_seed_option
@click.option("--out", required=True, help="Output recall-precision CSV.")
@click.option("--scaled-out", default=None,
              help="Also write metrics scaled against the L2 baseline.")
@click.option("--grid", default=None,
              help="Comma-separated acquisition rates (default 0.01..0.09,0.1..1.0).")
@_threads_option
def evaluate(model_path, searched_path, queries_path, seed, out, scaled_out, grid, threads):
    """Recall-precision curves for the model, an untrained arrangement of the
    same size (method id "lsh"), and exact L2 search (method id "l2")."""
    pre, normals, _ = model_io.load_model(model_path)
    searched = load_dataset_csv(searched_path)
    queries = load_dataset_csv(queries_path)
    rates = [float(s) for s in grid.split(",")] if grid else search_mod.default_acquisition_grid()

    Xs = pre.transform(searched.vectors)
    Xq = pre.transform(queries.vectors)
    searched_reduced = LabeledDataset(Xs, searched.labels)
    baseline_normals = random_arrangement(pre.n_components_, normals.shape[0], seed)

    curves = {}
    for method, arrangement in (("mlsh", normals), ("lsh", baseline_normals)):
        table = CodeTable.from_vectors(arrangement, Xs)
        codes = CodeTable.from_vectors(arrangement, Xq)
        rankings = search_mod.hamming_rankings(table, codes.codes, threads)
        curves[method] = search_mod.recall_precision_curve(
            rankings, queries.labels, searched_reduced, rates)
    l2_ranks = search_mod.l2_rankings(Xs, Xq, threads)
    curves["l2"] = search_mod.recall_precision_curve(
        l2_ranks, queries.labels, searched_reduced, rates)

    with open(out, "w", encoding="utf-8") as fh:
        fh.write(search_mod.curves_csv(curves))
    excluded = curves["l2"].n_excluded
    click.echo(f"evaluated {curves['l2'].n_queries} queries "
               f"({excluded} excluded: no searched record shares a label)")
    if scaled_out:
        scaled = {
            "mlsh": search_mod.scaled_metrics(curves["mlsh"].points, curves["l2"].points),
            "lsh": search_mod.scaled_metrics(curves["lsh"].points, curves["l2"].points),
        }
        with open(scaled_out, "w", encoding="utf-8") as fh:
            fh.write(search_mod.scaled_csv(scaled))
        click.echo(f"wrote {scaled_out}")
    click.echo(f"wrote {out}")


@cli.command()
@click.option("--model", "model_path", required=True)
@click.option("--cosine-out", required=True,
              help="Output CSV: |cosine| matrix between normals, zero diagonal.")
@click.option("--hist-out", required=True,
              help="Output CSV: per-component histograms of the normals.")
@click.option("--bins", type=int, default=40, show_default=True)
def diagnose(model_path, cosine_out, hist_out, bins):
    """Arrangement diagnostics: normal-vector agreement and component spread."""
    _, normals, _ = model_io.load_model(model_path)
    matrix = pairwise_abs_cosine(normals)
    np.savetxt(cosine_out, matrix, delimiter=",", fmt="%.17g")

    edges = np.linspace(-1.0, 1.0, bins + 1)
    lines = ["component,bin_left,bin_right,count"]
    for d in range(normals.shape[1]):
        counts, _ = np.histogram(normals[:, d], bins=edges)
        lines.extend(
            f"{d},{float(edges[j])!r},{float(edges[j + 1])!r},{counts[j]}" for j in range(bins)
        )
    with open(hist_out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    off_diagonal = matrix[~np.eye(len(matrix), dtype=bool)]
    click.echo(f"mean off-diagonal |cos|: {off_diagonal.mean():.4f}")
    click.echo(f"wrote {cosine_out} and {hist_out}")


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as e:
        click.echo(f"error: {e.format_message()}", err=True)
        return 1
    except click.Abort:
        return 1
    except click.ClickException as e:
        e.show()
        return 2
    except (ValueError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
