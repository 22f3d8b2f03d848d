"""Command-line pipeline around the library.

Subcommands cover the full path from raw declarations to comparable
networks::

    socsem synth      -o pairs.csv --seed 7          # or bring your own data
    socsem ingest     raw.csv -o pairs.csv
    socsem similarity pairs.csv -o run
    socsem threshold  run.attributes.gsim -o net.gexf --tau 0.8
    socsem stats      net.gexf
    socsem intersect  a.gexf b.gexf -o both.gexf
    socsem subtract   a.gexf b.gexf -o only-a.gexf
    socsem degrees    net.gexf
    socsem bridges    net.gexf --partition blocks.csv
    socsem export     net.gexf -o net.csv --format edgelist
    socsem matrix-csv run.attributes.gsim -o scores.csv

Every file-producing run also writes ``<output>.manifest.json`` recording
the tool version, the configuration actually used, and SHA-256 digests of
the inputs.  Outputs carry no timestamps: re-running a command on the
same inputs reproduces every byte.

Exit codes: 0 success, 1 usage, 2 malformed or invalid data, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import DataError, NumericError
from .graphio import (
    read_matrix,
    read_network,
    stats,
    write_edgelist,
    write_gexf,
    write_matrix,
    write_matrix_csv,
)
from .ingest import build_incidence, parse_pairs, top_k_attributes, write_pairs
from .netops import align, intersect, subtract
from .semnet import (
    PartitionMap,
    bridge_report,
    degree_report,
    read_partition,
    threshold_network,
    write_partition,
)
from .simcore import center, run_fixed_point
from .synth import planted_blocks

__all__ = ["PipelineConfig", "main", "build_parser"]


@dataclass(frozen=True)
class PipelineConfig:
    """Defaults shared by the pipeline commands, echoed into manifests."""

    top_k: int = 600
    tau: float = 0.8
    tolerance: float = 1e-6
    max_iterations: int = 100
    workers: int = 1
    format: str = "gexf"


DEFAULTS = PipelineConfig()


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the contract here says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {raw}")
    return value


def _positive_float(raw: str) -> float:
    value = float(raw)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {raw}")
    return value


def _unit_open_float(raw: str) -> float:
    value = float(raw)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must be inside (0, 1), got {raw}")
    return value


def _probability(raw: str) -> float:
    value = float(raw)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be inside [0, 1], got {raw}")
    return value


def _delimiter(raw: str) -> str:
    named = {"comma": ",", "tab": "\t"}
    value = named.get(raw, raw)
    if len(value) != 1:
        raise argparse.ArgumentTypeError(
            f"delimiter must be one character (or 'comma'/'tab'), got {raw!r}"
        )
    return value


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return "sha256:" + digest.hexdigest()


def _write_manifest(
    primary_output: str, command: str, config: dict, inputs: list[str], outputs: list[str]
) -> None:
    manifest = {
        "tool": "socsem",
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": {path: _sha256(path) for path in inputs},
        "outputs": outputs,
    }
    with open(primary_output + ".manifest.json", "w", encoding="utf-8") as handle:
        handle.write(json.dumps(manifest, indent=2) + "\n")


def _network_format(path: str, override: str) -> str:
    if override != "auto":
        return override
    return "gexf" if path.endswith(".gexf") else "edgelist"


def _write_network(network, path: str, format: str) -> None:
    if format == "gexf":
        write_gexf(network, path)
    else:
        write_edgelist(network, path)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_ingest(args) -> int:
    with open(args.pairs, "r", encoding="utf-8", newline="") as handle:
        pairs = parse_pairs(
            handle, delimiter=args.delimiter, skip_header=args.skip_header
        )
    pairs = top_k_attributes(pairs, args.top_k)
    incidence, drops = build_incidence(pairs)
    with open(args.output, "w", encoding="utf-8", newline="") as handle:
        write_pairs(incidence.to_pairs(), handle)
    report_path = args.report or args.output + ".drops.txt"
    with open(report_path, "w", encoding="utf-8") as handle:
        handle.write(drops.to_text())
    if drops.entries:
        print(
            f"dropped {len(drops.entries)} constant rows/columns (see {report_path})",
            file=sys.stderr,
        )
    rows, cols = incidence.shape
    print(f"incidence: {rows} actors x {cols} attributes", file=sys.stderr)
    _write_manifest(
        args.output,
        "ingest",
        {
            "top_k": args.top_k,
            "delimiter": args.delimiter,
            "skip_header": args.skip_header,
        },
        [args.pairs],
        [args.output, report_path],
    )
    return 0


def cmd_similarity(args) -> int:
    with open(args.pairs, "r", encoding="utf-8", newline="") as handle:
        pairs = parse_pairs(handle)
    incidence, drops = build_incidence(pairs)
    if drops.entries:
        print(f"dropped {len(drops.entries)} constant rows/columns", file=sys.stderr)
    views = center(incidence)
    result = run_fixed_point(
        views,
        tolerance=args.tolerance,
        max_iterations=args.max_iterations,
        workers=args.workers,
        actor_dtype=np.float32 if args.actor_single_precision else np.float64,
    )
    attribute_path = args.output + ".attributes.gsim"
    actor_path = args.output + ".actors.gsim"
    report_path = args.output + ".convergence.json"
    write_matrix(result.attribute_similarity, attribute_path)
    write_matrix(result.actor_similarity, actor_path)
    with open(report_path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(result.report.to_dict(), indent=2) + "\n")
    print(
        f"fixed point: {result.report.iterations} iterations, "
        f"terminated by {result.report.terminated_by}",
        file=sys.stderr,
    )
    _write_manifest(
        args.output,
        "similarity",
        {
            "tolerance": args.tolerance,
            "max_iterations": args.max_iterations,
            "workers": args.workers,
            "actor_single_precision": args.actor_single_precision,
        },
        [args.pairs],
        [attribute_path, actor_path, report_path],
    )
    return 0


def cmd_threshold(args) -> int:
    matrix = read_matrix(args.matrix)
    network = threshold_network(matrix, args.tau)
    _write_network(network, args.output, args.format)
    print(
        f"network: {network.node_count} nodes, {network.edge_count} edges",
        file=sys.stderr,
    )
    _write_manifest(
        args.output,
        "threshold",
        {"tau": args.tau, "format": args.format},
        [args.matrix],
        [args.output],
    )
    return 0


def _cmd_binary_op(args, operation, name: str) -> int:
    network_a = read_network(args.a, _network_format(args.a, args.input_format))
    network_b = read_network(args.b, _network_format(args.b, args.input_format))
    alignment = align(network_a, network_b)
    print(
        f"alignment: {len(alignment.shared_nodes)} shared nodes, "
        f"{len(alignment.only_a)} only in {args.a}, "
        f"{len(alignment.only_b)} only in {args.b}",
        file=sys.stderr,
    )
    result = operation(network_a, network_b)
    _write_network(result, args.output, args.format)
    print(
        f"{name}: {result.node_count} nodes, {result.edge_count} edges",
        file=sys.stderr,
    )
    _write_manifest(
        args.output,
        name,
        {"format": args.format},
        [args.a, args.b],
        [args.output],
    )
    return 0


def cmd_intersect(args) -> int:
    return _cmd_binary_op(args, intersect, "intersect")


def cmd_subtract(args) -> int:
    return _cmd_binary_op(args, subtract, "subtract")


def cmd_stats(args) -> int:
    network = read_network(args.network, _network_format(args.network, args.input_format))
    _emit(stats(network).to_json(), args.output)
    if args.output is not None:
        _write_manifest(args.output, "stats", {}, [args.network], [args.output])
    return 0


def cmd_degrees(args) -> int:
    network = read_network(args.network, _network_format(args.network, args.input_format))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["node", "degree", "strength"])
    for entry in degree_report(network):
        writer.writerow([entry.label, entry.degree, repr(entry.strength)])
    _emit(buffer.getvalue(), args.output)
    if args.output is not None:
        _write_manifest(args.output, "degrees", {}, [args.network], [args.output])
    return 0


def cmd_bridges(args) -> int:
    network = read_network(args.network, _network_format(args.network, args.input_format))
    with open(args.partition, "r", encoding="utf-8", newline="") as handle:
        partition = read_partition(handle)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["node", "cluster_count", "clusters"])
    for entry in bridge_report(network, partition):
        writer.writerow([entry.label, entry.cluster_count, ";".join(entry.clusters)])
    _emit(buffer.getvalue(), args.output)
    if args.output is not None:
        _write_manifest(
            args.output, "bridges", {}, [args.network, args.partition], [args.output]
        )
    return 0


def cmd_export(args) -> int:
    network = read_network(args.network, _network_format(args.network, args.input_format))
    _write_network(network, args.output, args.format)
    _write_manifest(
        args.output, "export", {"format": args.format}, [args.network], [args.output]
    )
    return 0


def cmd_matrix_csv(args) -> int:
    matrix = read_matrix(args.matrix)
    write_matrix_csv(matrix, args.output)
    _write_manifest(args.output, "matrix-csv", {}, [args.matrix], [args.output])
    return 0


def cmd_synth(args) -> int:
    data = planted_blocks(
        args.actors,
        args.attributes,
        n_blocks=args.blocks,
        within=args.within,
        between=args.between,
        seed=args.seed,
    )
    with open(args.output, "w", encoding="utf-8", newline="") as handle:
        write_pairs(data.pairs, handle)
    outputs = [args.output]
    if args.blocks_out:
        with open(args.blocks_out, "w", encoding="utf-8", newline="") as handle:
            write_partition(PartitionMap(data.attribute_blocks), handle)
        outputs.append(args.blocks_out)
    print(f"synthetic declarations: {len(data.pairs)}", file=sys.stderr)
    _write_manifest(
        args.output,
        "synth",
        {
            "actors": args.actors,
            "attributes": args.attributes,
            "blocks": args.blocks,
            "within": args.within,
            "between": args.between,
            "seed": args.seed,
        },
        [],
        outputs,
    )
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_input_format(parser) -> None:
    parser.add_argument(
        "--input-format",
        choices=["auto", "gexf", "edgelist"],
        default="auto",
        help="network input format (auto: by .gexf extension)",
    )


def _add_output_format(parser) -> None:
    parser.add_argument(
        "--format",
        choices=["gexf", "edgelist"],
        default=DEFAULTS.format,
        help="network output format",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="socsem",
        description="Population-aware similarity and semantic networks "
        "from actor/attribute declarations.",
    )
    parser.add_argument("--version", action="version", version=f"socsem {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = commands.add_parser("ingest", help="normalize declarations into an incidence pair list")
    p.add_argument("pairs", help="raw delimited actor,attribute declarations")
    p.add_argument("-o", "--output", required=True, help="canonical pair list (CSV)")
    p.add_argument("--top-k", type=_positive_int, default=DEFAULTS.top_k,
                   help="keep the k most frequent attributes")
    p.add_argument("--delimiter", type=_delimiter, default=",",
                   help="field separator, a single character or 'comma'/'tab'")
    p.add_argument("--skip-header", action="store_true", help="discard the first line")
    p.add_argument("--report", help="drop-report path (default: <output>.drops.txt)")
    p.set_defaults(func=cmd_ingest)

    p = commands.add_parser("similarity", help="run the joint similarity fixed point")
    p.add_argument("pairs", help="canonical pair list from 'ingest'")
    p.add_argument("-o", "--output", required=True,
                   help="output basename (writes <base>.attributes.gsim, "
                   "<base>.actors.gsim, <base>.convergence.json)")
    p.add_argument("--tolerance", type=_positive_float, default=DEFAULTS.tolerance)
    p.add_argument("--max-iterations", type=_positive_int, default=DEFAULTS.max_iterations)
    p.add_argument("--workers", type=_positive_int, default=DEFAULTS.workers,
                   help="threads for the actor-matrix assembly (any value "
                   "gives bitwise identical results)")
    p.add_argument("--actor-single-precision", action="store_true",
                   help="store the actor matrix as float32 (half the memory)")
    p.set_defaults(func=cmd_similarity)

    p = commands.add_parser("threshold", help="cut a similarity matrix into a network")
    p.add_argument("matrix", help="attribute similarity (.gsim)")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--tau", type=_unit_open_float, default=DEFAULTS.tau,
                   help="inclusive similarity cut, inside (0, 1)")
    _add_output_format(p)
    p.set_defaults(func=cmd_threshold)

    for name, func, blurb in [
        ("intersect", cmd_intersect, "edges present in both networks (min weight)"),
        ("subtract", cmd_subtract, "first network discounted by the second"),
    ]:
        p = commands.add_parser(name, help=blurb)
        p.add_argument("a", help="first network")
        p.add_argument("b", help="second network")
        p.add_argument("-o", "--output", required=True)
        _add_input_format(p)
        _add_output_format(p)
        p.set_defaults(func=func)

    p = commands.add_parser("stats", help="flat JSON summary of a network")
    p.add_argument("network")
    p.add_argument("-o", "--output", help="write to a file instead of stdout")
    _add_input_format(p)
    p.set_defaults(func=cmd_stats)

    p = commands.add_parser("degrees", help="degree ranking as CSV")
    p.add_argument("network")
    p.add_argument("-o", "--output", help="write to a file instead of stdout")
    _add_input_format(p)
    p.set_defaults(func=cmd_degrees)

    p = commands.add_parser("bridges", help="nodes whose neighbors span several clusters")
    p.add_argument("network")
    p.add_argument("--partition", required=True, help="label,cluster CSV")
    p.add_argument("-o", "--output", help="write to a file instead of stdout")
    _add_input_format(p)
    p.set_defaults(func=cmd_bridges)

    p = commands.add_parser("export", help="convert a network between formats")
    p.add_argument("network")
    p.add_argument("-o", "--output", required=True)
    _add_input_format(p)
    _add_output_format(p)
    p.set_defaults(func=cmd_export)

    p = commands.add_parser("matrix-csv", help="similarity matrix as label_a,label_b,score CSV")
    p.add_argument("matrix", help="similarity matrix (.gsim)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_matrix_csv)

    p = commands.add_parser("synth", help="seeded planted-block declaration data")
    p.add_argument("-o", "--output", required=True, help="pair list to write (CSV)")
    p.add_argument("--actors", type=_positive_int, default=14000)
    p.add_argument("--attributes", type=_positive_int, default=600)
    p.add_argument("--blocks", type=_positive_int, default=4)
    p.add_argument("--within", type=_probability, default=0.3,
                   help="declaration probability inside a block")
    p.add_argument("--between", type=_probability, default=0.04,
                   help="declaration probability across blocks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blocks-out", help="also write the planted attribute partition (CSV)")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"socsem: numeric error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"socsem: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"socsem: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
