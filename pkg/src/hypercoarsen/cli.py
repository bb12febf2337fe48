"""Command-line driver: coarsen, partition or evaluate hMETIS hypergraphs.

Exit codes: 0 success, 1 usage, 2 parse/IO, 3 infeasible, 4 internal error.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import io as hio
from .core import (Partition, avg_conductance, check_balance, cluster_conductances,
                   cutsize, hlc_score)
from .embedding import DEFAULT_RHO
from .exceptions import InfeasibleError, ParseError
from .hyperef import DEFAULT_LEVELS, DEFAULT_REDUCTION, coarsen, contract
from .hypersf import DEFAULT_BETA, DEFAULT_MAX_EXPANSIONS, DEFAULT_XI, absorb_singletons
from .oracle import MAX_BIPARTITION_NODES, brute_best_bipartition
from .partitioner import COMMUNITY_MODES, RATINGS, PartitionConfig, partition
from .resistance import DEFAULT_M

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3, 4
MODES = ("coarsen", "partition", "evaluate")
EXPANSIONS = ("star", "clique", "hybrid")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    mode: str
    input: str
    output: str | None = None
    k: int = 2
    epsilon: float = 0.02
    rho: int = DEFAULT_RHO
    m: int = DEFAULT_M
    levels: int = DEFAULT_LEVELS
    reduction: float = DEFAULT_REDUCTION
    delta: float | None = None
    beta: float = DEFAULT_BETA
    xi: float = DEFAULT_XI
    seed: int = 0
    expansion: str = "star"
    rating: str = "resistance"
    community: str = "flow"
    partition: str | None = None
    out_report: str | None = None
    oracle_check: bool = False


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hypercoarsen", description=__doc__.splitlines()[0])
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--in", dest="input", required=True, metavar="PATH", help="hMETIS .hgr file")
    p.add_argument("--out", dest="output", metavar="PATH",
                   help="coarse .hgr (coarsen) or partition file (partition)")
    p.add_argument("--partition", metavar="PATH", help="partition file to evaluate")
    p.add_argument("--out-report", dest="out_report", metavar="PATH",
                   help="write the report here instead of stdout")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=0.02)
    p.add_argument("--rho", type=int, default=DEFAULT_RHO)
    p.add_argument("--m", type=int, default=DEFAULT_M)
    p.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    p.add_argument("--reduction", type=float, default=DEFAULT_REDUCTION)
    p.add_argument("--delta", type=float, default=None, help="fixed contraction threshold")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--xi", type=float, default=DEFAULT_XI)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--expansion", choices=EXPANSIONS, default="star")
    p.add_argument("--rating", choices=RATINGS, default="resistance")
    p.add_argument("--community", choices=COMMUNITY_MODES, default="flow")
    p.add_argument("--oracle-check", dest="oracle_check", action="store_true",
                   help="compare with exhaustive search on tiny inputs")
    return p


def parse_flags(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    if cfg.k < 2:
        raise UsageError("--k must be >= 2")
    if not 0 < cfg.epsilon <= 1.0 / cfg.k:
        raise UsageError(f"--epsilon must lie in (0, 1/k] = (0, {1.0 / cfg.k:g}]")
    if cfg.rho < 1:
        raise UsageError("--rho must be >= 1")
    if not 1 <= cfg.m <= cfg.rho:
        raise UsageError("--m must lie in [1, rho]")
    if cfg.levels < 1:
        raise UsageError("--levels must be >= 1")
    if not 0 <= cfg.reduction < 1:
        raise UsageError("--reduction must lie in [0, 1)")
    if cfg.beta < 0:
        raise UsageError("--beta must be >= 0")
    if not cfg.xi > 0:
        raise UsageError("--xi must be > 0")
    if cfg.mode == "evaluate" and cfg.partition is None:
        raise UsageError("--mode evaluate needs --partition")
    if cfg.mode in ("coarsen", "partition") and cfg.output is None:
        raise UsageError(f"--mode {cfg.mode} needs --out")
    return cfg


def _partition_metrics(h, p: Partition) -> dict:
    bal = check_balance(h, p)
    return {
        "cutsize": cutsize(h, p),
        "feasible": bal.feasible,
        "block_loads": bal.loads.tolist(),
        "balance_lower": bal.lower,
        "balance_upper": bal.upper,
    }


def _run_coarsen(cfg: RunConfig, h) -> dict:
    hier = coarsen(h, cfg.levels, cfg.rho, cfg.m, cfg.reduction, cfg.seed, delta=cfg.delta,
                   expansion=cfg.expansion)
    cm = hier.cluster_map()
    refined = 0
    if cfg.community == "flow":
        cm, refined = absorb_singletons(hier, cfg.beta, cfg.xi, DEFAULT_MAX_EXPANSIONS)
    coarse, _ = contract(h, cm)
    Path(cfg.output).write_bytes(hio.write_hmetis(coarse))
    Path(cfg.output + ".clusters").write_bytes(
        "".join(f"{c}\n" for c in cm.cluster_of.tolist()).encode("ascii"))
    hlc = [hlc_score(h, mem, mem, cfg.beta) for mem in cm.members()]
    hlc = [x for x in hlc if np.isfinite(x)]
    phi = cluster_conductances(h, cm)
    return {
        "levels_built": len(hier.levels),
        "node_counts": hier.node_counts(),
        "num_clusters": cm.num_clusters,
        "coarse_nodes": coarse.num_nodes,
        "coarse_edges": coarse.num_edges,
        "refined_singletons": refined,
        "avg_conductance": avg_conductance(h, cm) if np.isfinite(phi).sum() else None,
        "avg_local_conductance": float(np.mean(hlc)) if hlc else None,
    }


def _run_partition(cfg: RunConfig, h) -> tuple[dict, int]:
    pc = PartitionConfig(rating=cfg.rating, community=cfg.community, seed=cfg.seed, rho=cfg.rho,
                         m=cfg.m, beta=cfg.beta, xi=cfg.xi, expansion=cfg.expansion)
    code = EXIT_OK
    try:
        p = partition(h, cfg.k, cfg.epsilon, pc)
    except InfeasibleError as exc:
        p = getattr(exc, "partition", None)
        if p is None:
            return {"error": str(exc), "feasible": False}, EXIT_INFEASIBLE
        code = EXIT_INFEASIBLE
    Path(cfg.output).write_bytes(hio.write_partition(p))
    out = _partition_metrics(h, p)
    if cfg.oracle_check:
        out["oracle"] = _oracle(cfg, h)
    return out, code


def _oracle(cfg: RunConfig, h) -> dict:
    if cfg.k != 2 or h.num_nodes > MAX_BIPARTITION_NODES:
        return {"skipped": f"needs k=2 and at most {MAX_BIPARTITION_NODES} nodes"}
    try:
        _, best = brute_best_bipartition(h, cfg.epsilon)
    except ValueError as exc:
        return {"skipped": str(exc)}
    return {"optimal_cutsize": best}


def _run_evaluate(cfg: RunConfig, h) -> tuple[dict, int]:
    p = hio.read_partition(Path(cfg.partition).read_bytes(), h.num_nodes, cfg.k, cfg.epsilon)
    out = _partition_metrics(h, p)
    if cfg.oracle_check:
        out["oracle"] = _oracle(cfg, h)
    return out, EXIT_OK if out["feasible"] else EXIT_INFEASIBLE


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        h = hio.read_hmetis(Path(cfg.input).read_bytes())
    except ParseError as exc:
        print(f"hypercoarsen: {cfg.input}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"hypercoarsen: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = {"config": asdict(cfg), "num_nodes": h.num_nodes, "num_edges": h.num_edges}
    code = EXIT_OK
    start = time.perf_counter()
    try:
        if cfg.mode == "coarsen":
            report.update(_run_coarsen(cfg, h))
        elif cfg.mode == "partition":
            res, code = _run_partition(cfg, h)
            report.update(res)
        else:
            res, code = _run_evaluate(cfg, h)
            report.update(res)
    except ParseError as exc:
        print(f"hypercoarsen: {cfg.partition}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"hypercoarsen: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleError as exc:
        report.update({"error": str(exc), "feasible": False})
        code = EXIT_INFEASIBLE
    report["runtime_seconds"] = round(time.perf_counter() - start, 3)
    text = hio.write_report(report)
    if cfg.out_report:
        Path(cfg.out_report).write_bytes(text)
    else:
        stdout.write(text.decode("ascii"))
    if code == EXIT_INFEASIBLE:
        print("hypercoarsen: balance constraint violated", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = parse_flags(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hypercoarsen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return run(cfg)
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the internal-error code
        print(f"hypercoarsen: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
