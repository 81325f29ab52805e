import duckdb
import pandas as pd

# included=False marks runs screened out before statistics; TIMEOUT runs only count in `timeouts`
RUN_COLUMNS = ["point", "sample", "forced", "status", "nodes", "backtracks",
               "flips", "elapsed", "included"]

COST_COLUMNS = {"MAC": "backtracks", "TABU": "flips"}


def connect():
    con = duckdb.connect()
    # single-threaded, so float sums are bit-identical between runs
    con.execute("SET threads TO 1")
    return con


def runs_frame(rows):
    return sort_runs(pd.DataFrame(rows, columns=RUN_COLUMNS))


def sort_runs(frame):
    return frame.sort_values(["point", "forced", "sample"], kind="stable").reset_index(drop=True)


def aggregate_points(con, runs, solver):
    """
    One row per point: sat fraction, cost statistics and counts.

    ``cost`` is backtracks for MAC and flips for TABU; nodes are always
    summarized alongside.
    """
    cost = COST_COLUMNS[solver]
    con.register("runs", runs)
    result = con.execute(f"""
        SELECT
            point,
            COUNT(*) FILTER (WHERE included) AS samples,
            COUNT(*) FILTER (WHERE NOT included) AS filtered,
            COALESCE(
                SUM(CASE WHEN status = 'SAT' THEN 1 ELSE 0 END) FILTER (WHERE included) * 1.0
                / NULLIF(COUNT(*) FILTER (WHERE included), 0),
                0.0
            ) AS sat_fraction,
            AVG({cost}) FILTER (WHERE included AND status <> 'TIMEOUT') AS mean_cost,
            MEDIAN({cost}) FILTER (WHERE included AND status <> 'TIMEOUT') AS median_cost,
            AVG(nodes) FILTER (WHERE included AND status <> 'TIMEOUT') AS mean_nodes,
            COUNT(*) FILTER (WHERE included AND status = 'TIMEOUT') AS timeouts
        FROM runs
        GROUP BY point
        ORDER BY point
    """).fetchdf()
    con.unregister("runs")
    return result


def aggregate_paired(con, runs, solver):
    """Forced and unforced statistics side by side, one row per point."""
    cost = COST_COLUMNS[solver]
    con.register("runs", runs)
    result = con.execute(f"""
        WITH per_batch AS (
            SELECT
                point,
                forced,
                SUM(CASE WHEN status = 'SAT' THEN 1 ELSE 0 END) * 1.0 / COUNT(*) AS sat_fraction,
                AVG({cost}) FILTER (WHERE status <> 'TIMEOUT') AS mean_cost,
                MEDIAN({cost}) FILTER (WHERE status <> 'TIMEOUT') AS median_cost,
                COUNT(*) FILTER (WHERE status = 'TIMEOUT') AS timeouts
            FROM runs
            WHERE included
            GROUP BY point, forced
        )
        SELECT
            point,
            MAX(CASE WHEN forced THEN mean_cost END) AS forced_mean_cost,
            MAX(CASE WHEN NOT forced THEN mean_cost END) AS unforced_mean_cost,
            MAX(CASE WHEN forced THEN median_cost END) AS forced_median_cost,
            MAX(CASE WHEN NOT forced THEN median_cost END) AS unforced_median_cost,
            MAX(CASE WHEN forced THEN sat_fraction END) AS forced_sat_fraction,
            MAX(CASE WHEN NOT forced THEN sat_fraction END) AS unforced_sat_fraction,
            MAX(CASE WHEN forced THEN timeouts END) AS forced_timeouts,
            MAX(CASE WHEN NOT forced THEN timeouts END) AS unforced_timeouts
        FROM per_batch
        GROUP BY point
        ORDER BY point
    """).fetchdf()
    con.unregister("runs")
    return result


def save_runs_audit(con, runs, output_path):
    """Export raw runs to Parquet for later inspection."""
    con.register("runs", runs)
    con.execute(f"""
        COPY (SELECT * FROM runs ORDER BY point, forced, sample)
        TO '{str(output_path).replace(chr(92), '/')}' (FORMAT PARQUET)
    """)
    con.unregister("runs")
    return str(output_path)
