"""Right extensions pi rho^R and the conditions under which they stay compatible with the identity."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .boolfn import drop_coordinates, restrict, wht
from .quadperm import Perm, compatible, full_rank, is_compatible, pair_rank, q_pi, whc
from .search import build_graph, maximal_cliques

# extenders that never need the WHC: rho(1) = 1, or all flat restrictions of Q_rho + Q_I4 are affine
COROLLARY1_RHOS = tuple(
    Perm.parse(s) for s in ("[3,4,1,2]", "[2,4,3,1]", "[1,3,4,2]", "[2,1,4,3]", "[4,1,3,2]", "[1,4,2,3]")
)


class Route(enum.Enum):
    CASE_I = "CaseI"
    CASE_II_VIA_F = "CaseII_via_f"
    CASE_II_VIA_G = "CaseII_via_g"
    ODD_CASE_I = "OddCaseI"
    ODD_CASE_II = "OddCaseII"
    FAILED = "Failed"


@dataclass
class ExtensionReport:
    result: Perm
    route: Route
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.route is not Route.FAILED


def extend_right(p: Perm, r: Perm) -> Perm:
    """[p(1), ..., p(n), r(1) + n, ..., r(m) + n]."""
    return Perm(p.map + tuple(v + p.n for v in r.map))


def self_power(p: Perm, m: int) -> Perm:
    """p^{R_m}: p extended on the right by itself m - 1 times."""
    if m < 1:
        raise ValueError("m must be at least 1")
    out = p
    for _ in range(m - 1):
        out = extend_right(out, p)
    return out


def _diff(p: Perm):
    return q_pi(p) + q_pi(Perm.identity(p.n))


def theorem1_check(p: Perm, r: Perm, strict: bool = True) -> ExtensionReport:
    """Decide p r^R ~ I_{n+m} for even n, m >= 4 from the junction indices and the WHC.

    With ``strict=False`` a violated hypothesis (odd size, or p / r not
    compatible with the identity) yields a FAILED report instead of raising.
    """
    n, m = p.n, r.n
    result = extend_right(p, r)
    problems = []
    if n % 2 or m % 2 or n < 4 or m < 4:
        problems.append(f"sizes must be even and >= 4, got n={n}, m={m}")
    else:
        if not is_compatible(Perm.identity(n), p):
            problems.append(f"{p} is not compatible with I_{n}")
        if not is_compatible(Perm.identity(m), r):
            problems.append(f"{r} is not compatible with I_{m}")
    if problems:
        if strict:
            raise ValueError("; ".join(problems))
        return ExtensionReport(result, Route.FAILED, {"precondition": problems})
    details: dict = {"junction": (p(n), r(1))}
    if (p(n) - n) * (r(1) - 1) == 0:
        return ExtensionReport(result, Route.CASE_I, details)
    f_ok = whc(_diff(p), p(n), n)
    details["whc_f"] = {"indices": (p(n), n), "holds": f_ok}
    if f_ok:
        return ExtensionReport(result, Route.CASE_II_VIA_F, details)
    g_ok = whc(_diff(r), 1, r(1))
    details["whc_g"] = {"indices": (1, r(1)), "holds": g_ok}
    if g_ok:
        return ExtensionReport(result, Route.CASE_II_VIA_G, details)
    return ExtensionReport(result, Route.FAILED, details)


def theorem2_products(p: Perm, r: Perm) -> np.ndarray:
    """prod_{u,v} W_{g_{u,v}}(b-bar) W_f(a + u e_{p(n)} + v e_n) over all (a, b), shape (2^n, 2^m).

    g_{u,v} is g restricted to y_{r(1)} = u, y_1 = v; the sign factors of the
    restricted transforms cancel in the product over (u, v).
    """
    n, m = p.n, r.n
    wf = wht(_diff(p).truth_table()).values
    gt = _diff(r).truth_table()
    i, j = 1, r(1)
    a = np.arange(1 << n, dtype=np.int64)
    b = np.arange(1 << m, dtype=np.int64)
    bbar = np.array([drop_coordinates(int(x), m, i, j) for x in b], dtype=np.int64)
    if 2 * n + 2 * m - 2 > 62:
        raise ValueError("products overflow int64 beyond n + m = 32")
    out = np.ones((1 << n, 1 << m), dtype=np.int64)
    for u in (0, 1):
        for v in (0, 1):
            # restrict() takes values in index order: x_1 = v, x_{r(1)} = u
            wg = wht(restrict(gt, i, j, v, u)).values[bbar]
            shifted = wf[a ^ (u << (p(n) - 1)) ^ (v << (n - 1))]
            out *= np.multiply.outer(shifted, wg)
    return out


def theorem2_check(p: Perm, r: Perm) -> ExtensionReport:
    """Sufficient test of p r^R ~ I_{n+m} for odd n >= 5 and even m >= 4.

    Condition (ii) uses -2^(2n + 2m - 2), the value the nonzero products
    actually take; the outcome under -2^(2n + 2m - 6) is kept in the details.
    The direct compatibility of the extension is always recorded.
    """
    n, m = p.n, r.n
    if n % 2 == 0 or n < 4 or m % 2 or m < 4:
        raise ValueError(f"need odd n >= 4 and even m >= 4, got n={n}, m={m}")
    if not is_compatible(Perm.identity(n), p):
        raise ValueError(f"{p} is not compatible with I_{n}")
    if not is_compatible(Perm.identity(m), r):
        raise ValueError(f"{r} is not compatible with I_{m}")
    result = extend_right(p, r)
    direct = is_compatible(Perm.identity(n + m), result)
    details: dict = {"junction": (p(n), r(1)), "direct_compatible": direct}
    if r(1) == 1:
        return ExtensionReport(result, Route.ODD_CASE_I, details)
    # when p(n) = n the two offsets coincide; the product is still well defined
    values = set(np.unique(theorem2_products(p, r)).tolist())
    target = -(1 << (2 * n + 2 * m - 2))
    alt = -(1 << (2 * n + 2 * m - 6))
    holds = values <= {0, target}
    details["product_values"] = sorted(int(v) for v in values)
    details["condition_ii"] = holds
    details["condition_ii_alt_constant"] = values <= {0, alt}
    return ExtensionReport(result, Route.ODD_CASE_II if holds else Route.FAILED, details)


def check_extension(p: Perm, r: Perm) -> ExtensionReport:
    """Dispatch on the parity of p's size."""
    return theorem1_check(p, r) if p.n % 2 == 0 else theorem2_check(p, r)


def corollary1_extend(p: Perm) -> list[ExtensionReport]:
    """Extend p on the right by each of the six IS_4 members that never need the WHC."""
    if not is_compatible(Perm.identity(p.n), p):
        raise ValueError(f"{p} is not compatible with I_{p.n}")
    reports = []
    for r in COROLLARY1_RHOS:
        if p.n >= 4:
            reports.append(check_extension(p, r))
            continue
        ext = extend_right(p, r)
        ok = is_compatible(Perm.identity(ext.n), ext)
        reports.append(ExtensionReport(ext, Route.CASE_I if ok else Route.FAILED, {"direct_compatible": ok}))
    return reports


@dataclass
class SetReport:
    n: int
    L: int
    r_min: int | None
    all_pairs_ok: bool
    ranks: list[list[int]]
    failures: list[tuple[Perm, Perm]]

    def first_failure(self) -> tuple[Perm, Perm] | None:
        return self.failures[0] if self.failures else None


def verify_compatible_set(s: Sequence[Perm], method: str = "rank") -> SetReport:
    """Check every unordered pair; ``method="both"`` also runs the Walsh route."""
    perms = list(s)
    if not perms:
        return SetReport(0, 0, None, False, [], [])
    n = perms[0].n
    if any(p.n != n for p in perms):
        raise ValueError("all members must share n")
    size = len(perms)
    ranks = [[0] * size for _ in range(size)]
    failures = []
    for a, b in itertools.combinations(range(size), 2):
        if method == "rank":
            rk = pair_rank(perms[a], perms[b])
            ok = rk == full_rank(n)
        else:
            verdict = compatible(perms[a], perms[b], method)
            rk, ok = verdict.rank, verdict.compatible
        ranks[a][b] = ranks[b][a] = rk
        if not ok:
            failures.append((perms[a], perms[b]))
    r_min = min((ranks[a][b] for a, b in itertools.combinations(range(size), 2)), default=None)
    return SetReport(n, size, r_min, size >= 1 and not failures, ranks, failures)


def is_compatible_set(s: Iterable[Perm]) -> bool:
    perms = list(s)
    return all(is_compatible(a, b) for a, b in itertools.combinations(perms, 2))


def _reverse_normal(s: Iterable[Perm]) -> frozenset[Perm]:
    return frozenset(min(p, p.reverse()) for p in s)


def self_extend(base: Sequence[Perm], m: int, method: str | None = None) -> list[Perm]:
    """{rho^{R_m} : rho in base} for a size-4 compatible set containing I_4.

    Each output pair is re-verified: rank and Walsh routes for m <= 3,
    rank only for m >= 4 unless ``method`` says otherwise.
    """
    base = list(base)
    if not base or any(p.n != 4 for p in base):
        raise ValueError("base must be a non-empty set of size-4 permutations")
    if Perm.identity(4) not in base:
        raise ValueError("base must contain I_4")
    if not is_compatible_set(base):
        raise ValueError("base is not a compatible set")
    out = [self_power(p, m) for p in base]
    method = method or ("both" if m <= 3 else "rank")
    rep = verify_compatible_set(out, method)
    if not rep.all_pairs_ok:
        a, b = rep.first_failure()
        raise AssertionError(f"extension lost compatibility at {a} vs {b}")
    return out


def is_canonical_base(base: Iterable[Perm], canonical_sets: Iterable[Iterable[Perm]]) -> bool:
    """Whether base equals one of the given sets once each member is identified with its reverse."""
    key = _reverse_normal(base)
    return any(key == _reverse_normal(s) for s in canonical_sets)


@dataclass
class MixedResult:
    candidates: list[Perm]
    filtered: list[Perm]
    sets: list[list[Perm]]
    experimental: bool


def mixed_candidates(a: Sequence[Perm], b: Sequence[Perm]) -> list[Perm]:
    return list(dict.fromkeys(extend_right(p, r) for p in a for r in b))


def mixed_extend(a: Sequence[Perm], b: Sequence[Perm], min_size: int = 6, require_sets: bool = True) -> MixedResult:
    """Maximal compatible sets of size >= min_size among {p r^R : p in a, r in b}.

    Candidates other than the identity are kept only if compatible with it.
    With ``require_sets=False`` the inputs may be arbitrary permutation
    lists; the result is then flagged experimental.
    """
    a, b = list(a), list(b)
    if not a or not b:
        raise ValueError("both inputs must be non-empty")
    if len({p.n for p in a}) > 1 or len({p.n for p in b}) > 1:
        raise ValueError("each input must share one size")
    a_is_set, b_is_set = is_compatible_set(a), is_compatible_set(b)
    if require_sets and not (a_is_set and b_is_set):
        raise ValueError("inputs must be compatible sets")
    cands = mixed_candidates(a, b)
    ident = Perm.identity(cands[0].n)
    filtered = [c for c in cands if c == ident or is_compatible(ident, c)]
    g = build_graph(filtered)
    cliques = maximal_cliques(g, min_size)
    sets = [[g.vertices[k] for k in clique] for clique in cliques]
    # documented cases: two compatible sets in dimensions 4m, or any two sets in dimension 4
    documented = (a_is_set and b_is_set and a[0].n % 4 == 0 and b[0].n % 4 == 0) or a[0].n == b[0].n == 4
    return MixedResult(cands, filtered, sets, not documented)
