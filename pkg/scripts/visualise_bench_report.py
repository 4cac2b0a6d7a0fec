"""
A script to summarise the CSV reports written by `conical-lp bench --csv`,
comparing the enumerative and evolutive solvers per instance kind.
"""

import sys

import numpy as np
import polars as pl


def load_and_process_bench_report(csv_path: str) -> pl.DataFrame:
    """
    Loads a benchmark report and adds the instance kind and speed-up columns.

    Args:
        csv_path: Path to the CSV file.

    Returns:
        The report without errored rows.
    """
    df = pl.read_csv(csv_path)
    return df.filter(pl.col("error").is_null()).with_columns(
        pl.col("name").str.split("-").list.first().alias("kind"),
        (pl.col("wall_ms_enum") / pl.col("wall_ms_evo")).alias("speed_up"),
    )


def summarise_by_kind(report: pl.DataFrame) -> pl.DataFrame:
    """
    Aggregates ray counts, savings and timings per instance kind.

    Args:
        report: The processed report.

    Returns:
        One row per kind, sorted by kind.
    """
    return (
        report.group_by("kind")
        .agg(
            pl.len().alias("instances"),
            pl.col("agree").sum().alias("agree"),
            pl.col("rays_enum").mean().alias("mean_rays_enum"),
            pl.col("rays_evo").mean().alias("mean_rays_evo"),
            pl.col("rays_walked_evo").mean().alias("mean_rays_walked_evo"),
            pl.col("ray_savings").mean().alias("mean_ray_savings"),
            pl.col("wall_ms_enum").mean().alias("mean_wall_ms_enum"),
            pl.col("wall_ms_evo").mean().alias("mean_wall_ms_evo"),
        )
        .sort("kind")
    )


def visualise_bench_report(csv_path: str) -> None:
    """
    Prints the per-kind summary and the overall evolutive speed-up.

    Args:
        csv_path: Path to the CSV file.
    """
    report = load_and_process_bench_report(csv_path)
    if report.is_empty():
        print(f"No successful instances in {csv_path}")
        return
    print(summarise_by_kind(report))

    # Feasibility rows carry no timings, so their ratio is NaN.
    speed_ups = report["speed_up"].drop_nans().drop_nulls().to_numpy()
    if len(speed_ups) == 0:
        return
    print(
        f"Evolutive speed-up: mean = {np.mean(speed_ups):.3f}x, "
        f"std dev = {np.std(speed_ups):.3f}x over {len(speed_ups)} instances"
    )


if __name__ == "__main__":
    BENCH_REPORTS = sys.argv[1:] or ["resources/bench_report.csv"]
    for report_csv in BENCH_REPORTS:
        visualise_bench_report(report_csv)
