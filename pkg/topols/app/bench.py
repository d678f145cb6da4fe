"""Benchmark harness: searched compiler against the baseline over circuit families."""
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Sequence

from pydantic import BaseModel

from .circuit import BENCHMARK_FAMILIES, generate_benchmark
from .config import CompileConfig, square_grid
from .embed import compile_baseline, compile_full
from .pipe import space_time_volume

logger = logging.getLogger(__name__)

COLUMNS = ("family", "size", "compiler", "volume", "time_ms", "layers", "reduction_pct")


class BenchJob(BaseModel):
    family: str
    size: int
    seed: int = 0
    config: CompileConfig
    # size the grid to each circuit instead of using config.grid
    auto_grid: bool = False


def thread_count() -> int:
    value = os.environ.get("TOPOLS_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        logger.warning(f"Ignoring invalid TOPOLS_THREADS={value!r}")
        return 1


def run_job(job: BenchJob) -> List[Dict[str, Any]]:
    circuit = generate_benchmark(job.family, job.size, seed=job.seed)
    config = job.config
    if job.auto_grid:
        config = config.model_copy(update={"grid": square_grid(circuit.num_qubits)})

    started = time.monotonic()
    baseline = compile_baseline(circuit, config)
    baseline_ms = int((time.monotonic() - started) * 1000)
    baseline_volume = space_time_volume(baseline)

    result = compile_full(circuit, config)
    reduction = 100.0 * (1.0 - result.volume / baseline_volume) if baseline_volume else 0.0
    logger.info(f"{job.family}-{job.size}: volume {result.volume} vs baseline {baseline_volume}")
    return [
        {
            "family": job.family,
            "size": job.size,
            "compiler": "topols",
            "volume": result.volume,
            "time_ms": result.compile_time_ms,
            "layers": result.schedule.layer_count,
            "reduction_pct": round(reduction, 2),
        },
        {
            "family": job.family,
            "size": job.size,
            "compiler": "baseline",
            "volume": baseline_volume,
            "time_ms": baseline_ms,
            "layers": len(circuit),
            "reduction_pct": 0.0,
        },
    ]


def run_benchmarks(
    families: Sequence[str],
    sizes: Sequence[int],
    config: CompileConfig,
    seed: int = 0,
    threads: int = 1,
    auto_grid: bool = False,
) -> List[Dict[str, Any]]:
    """Compile every (family, size) pair both ways; rows come back in job order."""
    unknown = [f for f in families if f not in BENCHMARK_FAMILIES]
    if unknown:
        raise ValueError(
            f"Unknown benchmark famil{'ies' if len(unknown) > 1 else 'y'} {', '.join(unknown)}; "
            f"expected some of {', '.join(BENCHMARK_FAMILIES)}"
        )
    jobs = [
        BenchJob(family=f, size=n, seed=seed, config=config, auto_grid=auto_grid)
        for f in families
        for n in sizes
    ]
    logger.info(f"Running {len(jobs)} benchmark job(s) on {threads} worker(s)")
    if threads <= 1:
        batches = [run_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(run_job, jobs))
    return [row for batch in batches for row in batch]


def format_table(rows: List[Dict[str, Any]]) -> str:
    """Aligned plain-text table of benchmark rows."""
    cells = [list(COLUMNS)] + [[str(row[c]) for c in COLUMNS] for row in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(COLUMNS))]
    lines = ["  ".join(value.ljust(width) for value, width in zip(line, widths)).rstrip() for line in cells]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)
