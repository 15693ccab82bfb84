"""bentbook command line: search, extend, codebook, verify.

Exit codes: 0 ok, 1 I/O, 2 guard or usage, 3 verification failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import codebook as cbk
from . import formats
from .extend import mixed_extend, self_extend, verify_compatible_set
from .quadperm import Perm
from .search import DEFAULT_GUARD, GuardError, build_graph, composition_table, enumerate_is, maximal_cliques

log = logging.getLogger("bentbook")

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3
PAPR_LIMIT = 2 + 1e-9


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class Manifest:
    def __init__(self, command: str, params: dict, inputs: list[str]):
        self.command, self.params, self.inputs = command, params, inputs
        self.outputs: list[Path] = []
        self.started = time.time()

    def add(self, path: Path) -> Path:
        self.outputs.append(Path(path))
        return path

    def write(self, out_dir: Path) -> None:
        payload = {
            "command": self.command,
            "parameters": self.params,
            "inputs": {p: formats.sha256_file(p) for p in self.inputs},
            "outputs": {p.name: formats.sha256_file(p) for p in self.outputs},
            "tool_version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
            "wall_time_s": round(time.time() - self.started, 3),
        }
        formats.write_json(Path(out_dir) / "manifest.json", payload)


def _load_set(path: str) -> tuple[list[Perm], dict]:
    try:
        perms, prov = formats.read_set(Path(path))
    except (OSError, ValueError, TypeError) as exc:
        raise CliError(EXIT_IO, f"cannot read set file {path}: {exc}") from exc
    if not perms:
        raise CliError(EXIT_IO, f"set file {path} holds no permutations")
    if len({p.n for p in perms}) > 1:
        raise CliError(EXIT_IO, f"set file {path} mixes permutation sizes")
    return perms, prov


def _report_set(rep) -> dict:
    return {
        "n": rep.n,
        "L": rep.L,
        "r_min": rep.r_min,
        "all_pairs_ok": rep.all_pairs_ok,
        "ranks": rep.ranks,
        "failures": [[str(a), str(b)] for a, b in rep.failures],
    }


def _require_verified(perms, method: str, label: str):
    rep = verify_compatible_set(perms, method)
    if not rep.all_pairs_ok:
        a, b = rep.first_failure()
        raise CliError(EXIT_VERIFY, f"{label} is not a compatible set: first failing pair ({a}, {b})")
    return rep


def _apply_order(members: list[Perm], order: list[Perm], label: str) -> list[Perm]:
    """Listed permutations first, in the given order; the rest keep lexicographic order."""
    stray = [p for p in order if p not in set(members)]
    if stray:
        raise CliError(EXIT_VERIFY, f"{label}: {stray[0]} is not in IS_n")
    listed = list(dict.fromkeys(order))
    return listed + [p for p in members if p not in set(listed)]


def cmd_search(args) -> int:
    out = Path(args.out)
    man = Manifest("search", {"n": args.n, "min_size": args.min_size, "force": args.force}, [])
    try:
        members = enumerate_is(args.n, guard=args.guard, force=args.force)
    except GuardError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    log.info("IS_%d has %d members", args.n, len(members))
    if args.order:
        members = _apply_order(members, _load_set(args.order)[0], args.order)
    ident = Perm.identity(args.n)
    g = build_graph([ident] + members)
    sets = [[g.vertices[k].to_list() for k in c] for c in maximal_cliques(g, args.min_size)]
    try:
        formats.write_json(man.add(out / "is.json"), {"n": args.n, "is_size": len(members), "members": [p.to_list() for p in members]})
        formats.write_text(man.add(out / "table.txt"), composition_table(members).render())
        formats.write_json(man.add(out / "sets.json"), {"n": args.n, "min_size": args.min_size, "count": len(sets), "sets": sets})
        man.write(out)
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc)) from exc
    print(f"IS_{args.n}: {len(members)} members, {len(sets)} maximal sets of size >= {args.min_size}")
    return EXIT_OK


def cmd_extend(args) -> int:
    if args.self_mode == args.mixed:
        raise CliError(EXIT_USAGE, "choose exactly one of --self or --mixed")
    out = Path(args.out)
    base, _ = _load_set(args.base)
    method = "both" if args.deep else "rank"
    _require_verified(base, method, args.base)
    inputs = [args.base]
    if args.self_mode:
        if args.m is None or args.m < 1:
            raise CliError(EXIT_USAGE, "--self needs --m >= 1")
        man = Manifest("extend", {"mode": "self", "m": args.m, "deep": args.deep}, inputs)
        try:
            result = self_extend(base, args.m, method="both" if args.deep else None)
        except ValueError as exc:
            raise CliError(EXIT_VERIFY, str(exc)) from exc
        except AssertionError as exc:
            raise CliError(EXIT_VERIFY, str(exc)) from exc
        rep = _require_verified(result, method, "extension")
        prov = {"method": "self_extend", "base": [p.to_list() for p in base], "m": args.m}
        try:
            formats.write_set(man.add(out / "extended.json"), result, prov)
            formats.write_json(man.add(out / "report.json"), _report_set(rep))
            man.write(out)
        except OSError as exc:
            raise CliError(EXIT_IO, str(exc)) from exc
        print(f"extended {len(result)} permutations to n={result[0].n}, r_min={rep.r_min}")
        return EXIT_OK
    if not args.partner:
        raise CliError(EXIT_USAGE, "--mixed needs --partner")
    partner, _ = _load_set(args.partner)
    _require_verified(partner, method, args.partner)
    inputs.append(args.partner)
    man = Manifest("extend", {"mode": "mixed", "min_size": args.min_size, "deep": args.deep}, inputs)
    res = mixed_extend(base, partner, args.min_size)
    reports = [_require_verified(s, method, "mixed set") for s in res.sets]
    payload = {
        "n": res.candidates[0].n,
        "candidates": len(res.candidates),
        "identity_compatible": len(res.filtered),
        "count": len(res.sets),
        "sets": [[p.to_list() for p in s] for s in res.sets],
        "provenance": {
            "method": "mixed_extend",
            "base": [p.to_list() for p in base],
            "partner": [p.to_list() for p in partner],
            "min_size": args.min_size,
            "experimental": res.experimental,
        },
    }
    try:
        formats.write_json(man.add(out / "extended.json"), payload)
        formats.write_json(man.add(out / "report.json"), [_report_set(r) for r in reports])
        man.write(out)
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc)) from exc
    print(f"{len(res.candidates)} candidates, {len(res.filtered)} identity-compatible, {len(res.sets)} sets")
    return EXIT_OK


def _papr_scan(columns: np.ndarray, oversample: int):
    """Per-column (grid, upper) arrays."""
    grid, upper = [], []
    for k in range(columns.shape[1]):
        b = cbk.papr_bounds(cbk.SignSequence(columns[:, k]), oversample)
        grid.append(b.grid)
        upper.append(b.upper)
    return np.array(grid), np.array(upper)


def cmd_codebook(args) -> int:
    perms, _ = _load_set(args.set)
    out = Path(args.out)
    _require_verified(perms, "rank", args.set)
    if args.oversample < 4:
        raise CliError(EXIT_USAGE, "--oversample must be at least 4")
    man = Manifest("codebook", {"format": args.format, "oversample": args.oversample}, [args.set])
    materialize = args.format != "metrics-only"
    try:
        cb = cbk.spreading_matrix(perms, materialize=materialize)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    metrics = dict(cb.metrics)
    metrics["papr_max_grid"] = None
    metrics["papr_upper_bound"] = None
    if materialize:
        grid, upper = _papr_scan(cb.columns, args.oversample)
        metrics["papr_max_grid"] = round(float(grid.max()), 12)
        metrics["papr_upper_bound"] = round(float(upper.max()), 12)
    try:
        if args.format == "csv":
            formats.write_codebook_csv(man.add(out / "codebook.csv"), cb.columns, cb.N)
        elif args.format == "bin":
            formats.write_codebook_bin(man.add(out / "codebook.bin"), cb.columns)
        formats.write_json(man.add(out / "metrics.json"), metrics)
        man.write(out)
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc)) from exc
    print(f"N={cb.N} K={cb.K} L={cb.L} coherence={cb.coherence}")
    return EXIT_OK


def _columns_for(path: str) -> tuple[np.ndarray, int, list[Perm] | None]:
    """Materialised columns, block length N and (for set files) the permutations."""
    p = Path(path)
    if p.suffix in (".csv", ".bin"):
        try:
            cols = formats.read_codebook(p)
        except (OSError, ValueError) as exc:
            raise CliError(EXIT_IO, f"cannot read codebook {path}: {exc}") from exc
        return cols, cols.shape[0], None
    perms, _ = _load_set(path)
    try:
        cb = cbk.spreading_matrix(perms)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    return cb.columns, cb.N, perms


def _line(ok: bool, text: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} {text}")
    return ok


def _verify_set(args) -> bool:
    perms, _ = _load_set(args.path)
    rep = verify_compatible_set(perms, "both" if args.deep else "rank")
    ok = _line(rep.all_pairs_ok, f"compatible set n={rep.n} L={rep.L} r_min={rep.r_min}")
    if not ok:
        a, b = rep.first_failure()
        print(f"first failing pair: ({a}, {b})")
    return ok


def _verify_codebook(args) -> bool:
    cols, N, perms = _columns_for(args.path)
    if cols.shape[1] % N or N & (N - 1):
        return _line(False, f"shape {cols.shape} is not N x (L N) with N a power of two")
    L = cols.shape[1] // N
    ok = True
    rng = np.random.default_rng(args.seed)
    for ell in range(L):
        block = cols[:, ell * N : (ell + 1) * N].astype(np.int64)
        if N <= 256:
            gram = block.T @ block
            bad = np.argwhere(gram != N * np.eye(N, dtype=np.int64))
        else:
            pairs = rng.integers(0, N, size=(10_000, 2))
            pairs = pairs[pairs[:, 0] != pairs[:, 1]]
            dots = np.einsum("ij,ij->j", block[:, pairs[:, 0]], block[:, pairs[:, 1]])
            bad = pairs[dots != 0]
        if len(bad):
            i, j = bad[0]
            return _line(False, f"block {ell + 1} columns {i} and {j} are not orthogonal")
    ok &= _line(True, f"within-block orthogonality over {L} blocks")
    if L >= 2 and N <= 256:
        direct = cbk.cross_block_coherence(cols, N)
        if perms:
            rank = cbk.coherence_via_rank(perms).mu
            ok &= _line(direct == rank, f"coherence direct={direct} rank={rank}")
        else:
            _line(True, f"coherence direct={direct}")
    return ok


def _verify_golay(args) -> bool:
    perms, _ = _load_set(args.path)
    for p in perms:
        for c, eps, a, b in cbk.golay_pairs(p):
            if not cbk.is_golay_pair(a, b):
                return _line(False, f"Golay pair for {p}, c={c}, eps'={eps}")
    return _line(True, f"Golay pairs for {len(perms)} permutations, all c, both mate offsets")


def _verify_papr(args) -> bool:
    cols, N, _ = _columns_for(args.path)
    grid, upper = _papr_scan(cols, args.oversample)
    bad = np.flatnonzero(grid > PAPR_LIMIT)
    if bad.size:
        k = int(bad[0])
        return _line(False, f"column {k} (block {k // N + 1}, c={k % N}) grid PAPR {grid[k]:.12f} > 2")
    ok = _line(True, f"max grid PAPR {grid.max():.12f} <= 2 over {cols.shape[1]} columns")
    sound = bool((upper + 1e-9 >= grid).all())
    ok &= _line(sound, f"autocorrelation upper bound {upper.max():.6f} >= grid value")
    return ok


def cmd_verify(args) -> int:
    if args.oversample < 4:
        raise CliError(EXIT_USAGE, "--oversample must be at least 4")
    checks = {"set": _verify_set, "codebook": _verify_codebook, "golay": _verify_golay, "papr": _verify_papr}
    return EXIT_OK if checks[args.kind](args) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bentbook", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", help="enumerate IS_n, its composition table and maximal compatible sets")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--min-size", type=int, default=2)
    s.add_argument("--force", action="store_true", help="ignore the size guard")
    s.add_argument("--order", help="set file fixing the row order of IS_n members")
    s.add_argument("--guard", type=int, default=DEFAULT_GUARD, help=argparse.SUPPRESS)
    s.add_argument("--out", default="out")
    s.set_defaults(func=cmd_search)

    e = sub.add_parser("extend", help="self or mixed right extension of a compatible set")
    e.add_argument("base")
    e.add_argument("--self", dest="self_mode", action="store_true")
    e.add_argument("--mixed", action="store_true")
    e.add_argument("--m", type=int)
    e.add_argument("--partner")
    e.add_argument("--min-size", type=int, default=6)
    e.add_argument("--deep", action="store_true", help="also verify through the Walsh route")
    e.add_argument("--out", default="out")
    e.set_defaults(func=cmd_extend)

    c = sub.add_parser("codebook", help="build the spreading matrix of a set")
    c.add_argument("set")
    c.add_argument("--format", choices=("csv", "bin", "metrics-only"), default="csv")
    c.add_argument("--oversample", type=int, default=16)
    c.add_argument("--out", default="out")
    c.set_defaults(func=cmd_codebook)

    v = sub.add_parser("verify", help="re-check a set or codebook file")
    v.add_argument("path")
    v.add_argument("--kind", choices=("set", "codebook", "golay", "papr"), default="set")
    v.add_argument("--oversample", type=int, default=16)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--deep", action="store_true")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
