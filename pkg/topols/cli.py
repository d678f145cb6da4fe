#!/usr/bin/env python3
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from .app.bench import format_table, run_benchmarks, thread_count
from .app.circuit import BENCHMARK_FAMILIES, Circuit, generate_benchmark, parse_qasm
from .app.config import OPT_LEVELS, CompileConfig, PartitionConfig, parse_grid, square_grid
from .app.embed import compile_full
from .app.errors import CapacityError, CompileError, QasmError, TensorSizeError
from .app.exporters import JsonDiagramExporter, ObjMeshExporter, load_diagram
from .app.logging_config import configure_logging
from .app.verify import check_tensor_size, injection_self_check, semantic_residual

logger = logging.getLogger("topols.cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2

DEFAULT_GRID = (4, 4)


def _csv(kind):
    def parse(value: str):
        return [kind(item.strip()) for item in value.split(",") if item.strip()]
    parse.__name__ = f"{kind.__name__} list"
    return parse


def load_circuit(args) -> Circuit:
    """Read the circuit named on the command line, or generate a benchmark."""
    if args.benchmark:
        family, _, size = args.benchmark.partition(":")
        if not size.isdigit():
            raise ValueError(f"Invalid benchmark '{args.benchmark}'; expected FAMILY:N, e.g. ghz:16")
        return generate_benchmark(family, int(size), seed=args.seed)
    if not args.circuit:
        raise ValueError("No circuit given; pass a QASM file or --benchmark FAMILY:N")
    text = Path(args.circuit).read_text()
    return parse_qasm(text)


def build_config(args, num_qubits: Optional[int] = None) -> CompileConfig:
    """Search config from the flags; without --grid the grid is the smallest square for the circuit."""
    overrides = {
        "iterations": args.iterations,
        "timeout_ms": args.timeout_ms,
        "rng_seed": args.seed,
        "spacing": args.spacing,
        "seeds_per_layer": args.seeds_per_layer,
    }
    if args.partition is not None:
        overrides["partition"] = args.partition
    grid = args.grid
    if grid is None:
        grid = square_grid(num_qubits) if num_qubits else DEFAULT_GRID
    return CompileConfig.for_level(args.opt, grid=grid, **overrides)


def write_json(path: str, data) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def run_compile(args) -> int:
    """Compile one circuit and write the diagram, mesh and report."""
    try:
        circuit = load_circuit(args)
    except OSError as exc:
        logger.error(f"Cannot read circuit: {exc}")
        return EXIT_BAD_INPUT
    if args.verify:
        check_tensor_size(circuit)
    config = build_config(args, circuit.num_qubits)
    result = compile_full(circuit, config)
    report = result.report(config)

    if args.verify:
        report.residual = semantic_residual(circuit, result.pipe)
        report.verified = report.residual <= args.tol

    try:
        if args.out:
            JsonDiagramExporter().export(result.pipe, args.out)
        else:
            print(json.dumps(result.pipe.to_dict(), indent=2))
        if args.mesh:
            ObjMeshExporter().export(result.pipe, args.mesh)
        if args.dump_zx:
            write_json(args.dump_zx, {
                "diagram": result.schedule.diagram.to_dict(),
                "layers": {str(v): layer for v, layer in sorted(result.schedule.layer_of.items())},
                "blocks": result.schedule.blocks,
            })
        if args.stats:
            write_json(args.stats, json.loads(report.model_dump_json()))
    except OSError as exc:
        logger.error(f"Cannot write output: {exc}")
        return EXIT_FAILED

    summary = report.model_dump(exclude={"layer_stats", "config"})
    print(json.dumps(summary, indent=2), file=sys.stderr if not args.out else sys.stdout)
    if report.verified is False:
        logger.error(f"Compiled diagram does not match the circuit (residual {report.residual:.3e})")
        return EXIT_FAILED
    return EXIT_OK


def run_bench(args) -> int:
    """Run the benchmark table."""
    config = build_config(args)
    threads = args.threads or thread_count()
    rows = run_benchmarks(
        args.families, args.sizes, config, seed=args.seed, threads=threads, auto_grid=args.grid is None
    )
    print(format_table(rows))
    if args.out:
        try:
            write_json(args.out, rows)
        except OSError as exc:
            logger.error(f"Cannot write benchmark table: {exc}")
            return EXIT_FAILED
    return EXIT_OK


def run_verify(args) -> int:
    """Check a stored diagram against its circuit, or self-check the Rz injection."""
    if args.rz_trials:
        worst = injection_self_check(args.rz_trials, seed=args.seed)
        passed = worst <= args.tol
        print(f"{'PASS' if passed else 'FAIL'} rz-injection trials={args.rz_trials} worst_defect={worst:.3e}")
        return EXIT_OK if passed else EXIT_FAILED

    if not args.circuit or not args.pipe:
        raise ValueError("verify needs CIRCUIT and PIPE_JSON, or --rz-trials N")
    try:
        circuit = parse_qasm(Path(args.circuit).read_text())
        pipe = load_diagram(args.pipe)
    except (OSError, json.JSONDecodeError) as exc:
        logger.error(f"Cannot read input: {exc}")
        return EXIT_BAD_INPUT
    residual = semantic_residual(circuit, pipe)
    passed = residual <= args.tol
    print(f"{'PASS' if passed else 'FAIL'} residual={residual:.3e} tol={args.tol:.1e}")
    return EXIT_OK if passed else EXIT_FAILED


def add_search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", type=parse_grid, default=None,
                        help="Patch grid WxH (default: smallest square holding the circuit)")
    parser.add_argument("--opt", choices=OPT_LEVELS, default="full", help="Optimisation level")
    parser.add_argument("--iterations", type=int, default=1000, help="Search iterations per layer")
    parser.add_argument("--timeout-ms", type=int, default=2000, help="Search time limit per layer")
    parser.add_argument("--seeds-per-layer", type=int, default=2, help="Spider orderings tried per layer")
    parser.add_argument("--seed", type=int, default=0, help="Random seed")
    parser.add_argument("--spacing", type=int, default=2, help="Anchor pitch between patches")
    parser.add_argument("--partition", type=PartitionConfig.parse_flag, default=None,
                        help="Partitioning: topo[:T], uniform:K or none (default from --opt)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Lattice surgery compiler")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
                        default=None, help="Logging level")
    parser.add_argument("--log-to-file", action="store_true", help="Also log to a rotating file")
    parser.add_argument("--log-file", help="Path to log file (with --log-to-file)")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # Compile
    compile_parser = subparsers.add_parser("compile", help="Compile a QASM circuit to a pipe diagram")
    compile_parser.add_argument("circuit", nargs="?", help="OpenQASM 2 file")
    compile_parser.add_argument("--benchmark", help="Generate FAMILY:N instead of reading a file")
    add_search_flags(compile_parser)
    compile_parser.add_argument("--out", help="Pipe diagram JSON output (default stdout)")
    compile_parser.add_argument("--mesh", help="Wavefront OBJ output")
    compile_parser.add_argument("--verify", action="store_true", help="Check the result by tensor contraction")
    compile_parser.add_argument("--tol", type=float, default=1e-9, help="Verification tolerance")
    compile_parser.add_argument("--dump-zx", help="Write the sliced ZX diagram as JSON")
    compile_parser.add_argument("--stats", help="Write the compile report as JSON")

    # Bench
    bench_parser = subparsers.add_parser("bench", help="Compare against the baseline on benchmark families")
    bench_parser.add_argument("--families", type=_csv(str), default=["ghz"],
                              help=f"Comma-separated families from {', '.join(BENCHMARK_FAMILIES)}")
    bench_parser.add_argument("--sizes", type=_csv(int), default=[16], help="Comma-separated qubit counts")
    add_search_flags(bench_parser)
    bench_parser.add_argument("--threads", type=int, default=None, help="Worker processes (default TOPOLS_THREADS)")
    bench_parser.add_argument("--out", help="JSON table output")

    # Verify
    verify_parser = subparsers.add_parser("verify", help="Check a diagram or the Rz injection protocol")
    verify_parser.add_argument("circuit", nargs="?", help="OpenQASM 2 file")
    verify_parser.add_argument("pipe", nargs="?", help="Pipe diagram JSON")
    verify_parser.add_argument("--tol", type=float, default=1e-9, help="Tolerance")
    verify_parser.add_argument("--rz-trials", type=int, default=0, help="Random trials of the injection check")
    verify_parser.add_argument("--seed", type=int, default=0, help="Random seed for --rz-trials")
    return parser


COMMANDS = {"compile": run_compile, "bench": run_bench, "verify": run_verify}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_BAD_INPUT

    # Set environment variables based on args
    if args.log_level:
        os.environ["LOG_LEVEL"] = args.log_level
    if args.log_to_file:
        os.environ["LOG_TO_FILE"] = "true"
    if args.log_file:
        os.environ["LOG_FILE_PATH"] = args.log_file
    configure_logging()

    try:
        return COMMANDS[args.command](args)
    except (QasmError, CapacityError, TensorSizeError, ValidationError, ValueError) as exc:
        logger.error(str(exc))
        return EXIT_BAD_INPUT
    except CompileError as exc:
        logger.error(f"Compilation failed: {exc}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
