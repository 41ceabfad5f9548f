"""Command-line front end.

Exit codes: 0 when every evaluated check passes, 2 when some check is
violated, 1 on operational errors (I/O, parsing, preconditions, caps).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from contextlib import nullcontext
from dataclasses import dataclass, field as dc_field
from typing import Iterable

from . import __version__
from .errors import DepthStabError
from .graphs import (
    CONNECTED_CAP,
    TREE_CAP,
    Graph,
    broom,
    enumerate_connected_graphs,
    enumerate_trees,
    parse_graph,
)
from .homology import BOX_CAP, betti_table, depth
from .ideals import GENERATOR_CAP, parse_ideal, power
from .invariants import verify_many, verify_paper, worker_count
from .linalg import Field

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2

log = logging.getLogger("depthstab")


@dataclass
class RunConfig:
    command: str
    field: Field = dc_field(default_factory=Field)
    graph_path: str | None = None
    family: str | None = None
    pairs: list[tuple[int, int]] = dc_field(default_factory=list)
    min_n: int | None = None
    max_n: int | None = None
    up_to_iso: bool = False
    overshoot: int = 0
    max_generators: int = GENERATOR_CAP
    max_box: int = BOX_CAP
    output: str | None = None
    summary: str | None = None
    fmt: str = "json"
    workers: int | None = None

    def __post_init__(self):
        if self.max_generators <= 0 or self.max_box <= 0:
            raise ValueError("caps must be positive")
        if self.overshoot < 0:
            raise ValueError("overshoot must be non-negative")
        cap = {"trees": TREE_CAP, "connected": CONNECTED_CAP}.get(self.family or "")
        if cap is not None and self.max_n is not None and self.max_n > cap:
            raise ValueError(f"--max-n {self.max_n} above the {self.family} cap {cap}")

    def engine_kwargs(self) -> dict:
        return {"gen_cap": self.max_generators, "box_cap": self.max_box, "overshoot": self.overshoot}


def parse_pairs(text: str) -> list[tuple[int, int]]:
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        a, _, b = tok.partition(":")
        out.append((int(a), int(b)))
    return out


def _open_out(path: str | None):
    return open(path, "w") if path else nullcontext(sys.stdout)


def _config(args, command: str) -> RunConfig:
    return RunConfig(
        command=command,
        field=Field.parse(getattr(args, "field", "Q")),
        graph_path=getattr(args, "graph", None),
        family=getattr(args, "family", None),
        pairs=parse_pairs(args.pairs) if getattr(args, "pairs", None) else [],
        min_n=getattr(args, "min_n", None),
        max_n=getattr(args, "max_n", None),
        up_to_iso=getattr(args, "up_to_iso", False),
        overshoot=getattr(args, "overshoot", 0),
        max_generators=getattr(args, "max_generators", GENERATOR_CAP),
        max_box=getattr(args, "max_box", BOX_CAP),
        output=getattr(args, "output", None),
        summary=getattr(args, "summary", None),
        fmt=getattr(args, "format", "json"),
        workers=getattr(args, "workers", None),
    )


def cmd_analyze(cfg: RunConfig) -> int:
    with open(cfg.graph_path) as fh:
        g = parse_graph(fh.read())
    report = verify_paper(g, cfg.field, **cfg.engine_kwargs())
    with _open_out(cfg.output) as out:
        if cfg.fmt == "csv":
            _write_summary(out, [(g, report, None)])
        else:
            json.dump(report.to_dict(), out, indent=2, sort_keys=True)
            out.write("\n")
    return EXIT_VIOLATION if report.violations else EXIT_OK


def family_graphs(cfg: RunConfig) -> Iterable[Graph]:
    if cfg.family == "brooms":
        if not cfg.pairs:
            raise ValueError("--family brooms needs --pairs")
        for a, b in cfg.pairs:
            yield broom(a, b)
        return
    if cfg.max_n is None:
        raise ValueError(f"--family {cfg.family} needs --max-n")
    lo = cfg.max_n if cfg.min_n is None else cfg.min_n
    for n in range(max(lo, 2), cfg.max_n + 1):
        if cfg.family == "trees":
            yield from enumerate_trees(n, up_to_iso=cfg.up_to_iso)
        elif cfg.family == "connected":
            yield from enumerate_connected_graphs(n, up_to_iso=cfg.up_to_iso)
        else:
            raise ValueError(f"unknown family {cfg.family!r}")


SUMMARY_FIELDS = ["graph", "n", "m", "dstab", "spread", "astab", "violations", "status"]


def _write_summary(out, rows) -> None:
    w = csv.writer(out)
    w.writerow(SUMMARY_FIELDS)
    for g, rep, err in rows:
        if rep is None:
            w.writerow([g.encode(), g.n, "", "", "", "", "", err])
        else:
            w.writerow([rep.graph, rep.n, rep.m, rep.dstab, rep.spread,
                        "" if rep.astab is None else rep.astab,
                        " ".join(rep.violations), "violated" if rep.violations else "pass"])


def cmd_verify_family(cfg: RunConfig) -> int:
    workers = cfg.workers if cfg.workers is not None else worker_count()
    rows = []
    violations = skipped = 0
    with _open_out(cfg.output) as out:
        for seq, (g, rep, err) in enumerate(
            verify_many(family_graphs(cfg), cfg.field, workers=workers, **cfg.engine_kwargs())
        ):
            if rep is None:
                record = {"seq": seq, "graph": g.encode(), "status": err}
                skipped += 1
            else:
                record = {"seq": seq, **rep.to_dict()}
                violations += bool(rep.violations)
            out.write(json.dumps(record, sort_keys=True) + "\n")
            out.flush()
            rows.append((g, rep, err))
    if cfg.summary:
        with open(cfg.summary, "w", newline="") as fh:
            _write_summary(fh, rows)
    print(f"processed {len(rows)} graphs: {violations} with violations, {skipped} skipped",
          file=sys.stderr)
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_enumerate(args) -> int:
    if args.trees == args.connected:
        raise ValueError("choose exactly one of --trees / --connected")
    gen = enumerate_trees if args.trees else enumerate_connected_graphs
    with _open_out(args.output) as out:
        for g in gen(args.n, up_to_iso=args.up_to_iso):
            out.write(g.encode() + "\n")
    return EXIT_OK


def cmd_broom(args) -> int:
    g = broom(args.a, args.b)
    with _open_out(args.output) as out:
        out.write(g.encode() + "\n" if args.format == "line" else g.to_edge_list())
    return EXIT_OK


def cmd_ideal(args) -> int:
    """Depth and Betti table of a monomial ideal given in text form."""
    fld = Field.parse(args.field)
    ideal = parse_ideal(args.ideal, n=args.n)
    if args.power > 1:
        ideal = power(ideal, args.power, cap=args.max_generators)
    with _open_out(args.output) as out:
        if args.betti:
            out.write(betti_table(ideal, fld, method=args.method).to_csv())
        else:
            d = depth(ideal, fld, box_cap=args.max_box)
            json.dump({"ideal": str(ideal), "n": ideal.n, "field": str(fld),
                       "pd": d.pd, "depth": d.depth}, out, sort_keys=True)
            out.write("\n")
    return EXIT_OK


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--field", default="Q", help="Q (default) or a prime p for GF(p)")
    p.add_argument("--overshoot", type=int, default=0,
                   help="extra powers past the certified horizon, as a spot check")
    p.add_argument("--max-generators", type=int, default=GENERATOR_CAP)
    p.add_argument("--max-box", type=int, default=BOX_CAP,
                   help="cap on exponent-box cells swept per ideal")
    p.add_argument("--output", "-o")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="depthstab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full report for one graph")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    _add_engine_flags(p)

    p = sub.add_parser("verify", help="verify every check over a graph family")
    p.add_argument("--family", required=True, choices=["trees", "connected", "brooms"])
    p.add_argument("--max-n", type=int)
    p.add_argument("--min-n", type=int, help="smallest n (default: --max-n)")
    p.add_argument("--pairs", help='broom parameters, e.g. "1:2,2:4,3:5"')
    p.add_argument("--up-to-iso", action="store_true")
    p.add_argument("--summary", help="CSV summary path")
    p.add_argument("--workers", type=int, help="worker processes (default DEPTHSTAB_THREADS or CPU count)")
    _add_engine_flags(p)

    p = sub.add_parser("enumerate", help="write a graph family, one graph per line")
    p.add_argument("--trees", action="store_true")
    p.add_argument("--connected", action="store_true")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--up-to-iso", action="store_true")
    p.add_argument("--output", "-o")

    p = sub.add_parser("broom", help="write broom(a, b)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--format", choices=["edgelist", "line"], default="edgelist")
    p.add_argument("--output", "-o")

    p = sub.add_parser("ideal", help="depth or Betti table of a monomial ideal")
    p.add_argument("ideal", help='e.g. "(x1*x2, x2*x3)"')
    p.add_argument("--n", type=int, help="number of variables (default: largest index)")
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--betti", action="store_true", help="print the Betti table as CSV")
    p.add_argument("--method", choices=["lattice", "koszul"], default="koszul")
    _add_engine_flags(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "analyze":
            return cmd_analyze(_config(args, "analyze"))
        if args.command == "verify":
            return cmd_verify_family(_config(args, "verify"))
        if args.command == "enumerate":
            return cmd_enumerate(args)
        if args.command == "broom":
            return cmd_broom(args)
        if args.command == "ideal":
            return cmd_ideal(args)
    except (DepthStabError, OSError, ValueError) as exc:
        print(f"depthstab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
