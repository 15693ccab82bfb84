"""GDJ spreading sequences, Golay pairs, PAPR and the coherence of the spreading matrix."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .boolfn import bits_to_int
from .quadperm import Perm, pair_rank, q_pi

MATERIALIZE_GUARD = 12
DIRECT_COHERENCE_GUARD = 8


@dataclass(frozen=True, eq=False)
class SignSequence:
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.int8)
        size = v.shape[0] if v.ndim == 1 else -1
        if size < 1 or size & (size - 1):
            raise ValueError("length must be a power of two")
        if not np.isin(v, (-1, 1)).all():
            raise ValueError("entries must be +1 or -1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    def __len__(self) -> int:
        return self.N

    def __neg__(self) -> SignSequence:
        return SignSequence(-self.values)

    def __eq__(self, other):
        if not isinstance(other, SignSequence):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash(self.values.tobytes())


def _linear_index(c, n: int) -> int:
    if isinstance(c, (int, np.integer)):
        if not 0 <= c < 1 << n:
            raise ValueError(f"c={c} out of range for n={n}")
        return int(c)
    c = tuple(c)
    if len(c) != n:
        raise ValueError(f"c has length {len(c)}, expected {n}")
    return bits_to_int(c)


def _path_signs(p: Perm) -> np.ndarray:
    return q_pi(p).truth_table().signs().astype(np.int8)


def _linear_signs(c: int, n: int) -> np.ndarray:
    x = np.arange(1 << n, dtype=np.int64) & c
    parity = np.zeros_like(x)
    for k in range(n):
        parity ^= (x >> k) & 1
    return (1 - 2 * parity).astype(np.int8)


def gdj_sequence(p: Perm, c, n: int | None = None, eps: int = 0) -> SignSequence:
    """Entry j is (-1)^(Q_p(x) + c.x + eps) at x = phi(j); ``c`` is an int index or a bit vector."""
    n = p.n if n is None else n
    if n != p.n:
        raise ValueError(f"permutation has size {p.n}, n={n}")
    c = _linear_index(c, n)
    seq = _path_signs(p) * _linear_signs(c, n)
    return SignSequence(-seq if eps & 1 else seq)


def golay_mate(p: Perm, c, eps_prime: int = 0) -> SignSequence:
    """The Davis-Jedwab mate: Q_p + c.x + x_{p(1)} + eps'."""
    c = _linear_index(c, p.n)
    return gdj_sequence(p, c ^ (1 << (p(1) - 1)), eps=eps_prime)


def autocorrelations(a: SignSequence) -> np.ndarray:
    """C_a(tau) for tau = 0..N-1 as exact int64."""
    v = a.values.astype(np.int64)
    return np.correlate(v, v, mode="full")[a.N - 1 :]


def aperiodic_autocorr(a: SignSequence, tau: int) -> int:
    N = a.N
    if abs(tau) >= N:
        raise ValueError(f"|tau| must be below {N}")
    v = a.values.astype(np.int64)
    t = abs(tau)
    return int(np.dot(v[: N - t], v[t:]))


def is_golay_pair(a: SignSequence, b: SignSequence) -> bool:
    if a.N != b.N:
        raise ValueError("length mismatch")
    total = autocorrelations(a) + autocorrelations(b)
    return bool((total[1:] == 0).all())


@dataclass(frozen=True)
class PaprBounds:
    grid: float
    upper: float


def _grid_power(a: SignSequence, oversample: int) -> np.ndarray:
    if oversample < 4:
        raise ValueError("oversample must be at least 4")
    M = oversample * a.N
    spectrum = np.fft.ifft(a.values.astype(np.float64), n=M) * M
    return np.abs(spectrum) ** 2


def papr(a: SignSequence, oversample: int = 16) -> float:
    """Max of |sum a_i e^(2 pi i i t)|^2 / N on the grid t = k / (oversample N).

    A lower bound on the continuous-time PAPR.
    """
    return float(_grid_power(a, oversample).max() / a.N)


def papr_bounds(a: SignSequence, oversample: int = 16) -> PaprBounds:
    """Grid value together with the upper bound (N + sum_{tau != 0} |C_a(tau)|) / N."""
    acf = autocorrelations(a)
    upper = (a.N + 2 * int(np.abs(acf[1:]).sum())) / a.N
    return PaprBounds(papr(a, oversample), upper)


def sylvester(n: int) -> np.ndarray:
    """H[x, c] = (-1)^(c.x) as int8."""
    h = np.ones((1, 1), dtype=np.int8)
    base = np.array([[1, 1], [1, -1]], dtype=np.int8)
    for _ in range(n):
        h = np.kron(base, h)
    return h


@dataclass(frozen=True)
class RankCoherence:
    mu: Fraction
    r_min: int


def _check_perms(perms: Sequence[Perm], minimum: int) -> int:
    if len(perms) < minimum:
        raise ValueError(f"need at least {minimum} permutations")
    sizes = {p.n for p in perms}
    if len(sizes) != 1:
        raise ValueError("permutations must share n")
    if len(set(perms)) != len(perms):
        raise ValueError("permutations must be distinct")
    return sizes.pop()


def r_min(perms: Sequence[Perm]) -> int:
    _check_perms(perms, 2)
    return min(pair_rank(a, b) for a, b in itertools.combinations(perms, 2))


def coherence_via_rank(perms: Sequence[Perm]) -> RankCoherence:
    """mu = 2^(-r_min / 2) where r_min is the least symplectic rank over pairs."""
    r = r_min(perms)
    return RankCoherence(Fraction(1, 1 << (r // 2)), r)


def w_phi(perms: Sequence[Perm]) -> int:
    """Largest |W| over the pairwise difference forms: 2^(n - r_min / 2)."""
    n = _check_perms(perms, 2)
    return 1 << (n - r_min(perms) // 2)


def welch_bound(N: int, K: int) -> float:
    if not (K > N >= 1):
        raise ValueError("need K > N >= 1")
    return math.sqrt((K - N) / ((K - 1) * N))


def quadratic_coherence_bound(n: int) -> Fraction:
    """Lowest coherence reachable by quadratic forms: 2^(-n/2) for even n, 2^(-(n-1)/2) for odd n."""
    return Fraction(1, 1 << (n // 2))


@dataclass
class Codebook:
    n: int
    perms: tuple[Perm, ...]
    columns: np.ndarray | None  # N x (L N) int8, unscaled
    r_min: int | None
    coherence: Fraction
    metrics: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def L(self) -> int:
        return len(self.perms)

    @property
    def K(self) -> int:
        return self.L * self.N

    def block(self, ell: int) -> np.ndarray:
        if self.columns is None:
            raise ValueError("codebook was not materialised")
        return self.columns[:, ell * self.N : (ell + 1) * self.N]

    def column(self, ell: int, c: int) -> SignSequence:
        return SignSequence(self.block(ell)[:, c])


def _assert_block_orthogonal(block: np.ndarray, n: int, rng_seed: int = 0, samples: int = 10_000) -> None:
    N = 1 << n
    if n <= DIRECT_COHERENCE_GUARD:
        b = block.astype(np.float64)
        gram = b.T @ b
        if not np.array_equal(gram, N * np.eye(N)):
            raise AssertionError("block columns are not pairwise orthogonal")
        return
    rng = np.random.default_rng(rng_seed)
    pairs = rng.integers(0, N, size=(samples, 2))
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    dots = np.einsum("ij,ij->j", block[:, pairs[:, 0]].astype(np.int64), block[:, pairs[:, 1]].astype(np.int64))
    if np.any(dots != 0):
        raise AssertionError("block columns are not pairwise orthogonal")


def spreading_matrix(perms: Sequence[Perm], materialize: bool = True, guard: int = MATERIALIZE_GUARD) -> Codebook:
    """Assemble [Phi_1, ..., Phi_L]; block l holds gdj_sequence(pi_l, c) for c = 0..N-1.

    With ``materialize=False`` only the rank-derived metrics are computed.
    A single block reports coherence 0.
    """
    perms = tuple(perms)
    n = _check_perms(perms, 1)
    if len(perms) >= 2:
        rc = coherence_via_rank(perms)
        r, mu = rc.r_min, rc.mu
    else:
        r, mu = None, Fraction(0)
    columns = None
    if materialize:
        if n > guard:
            raise ValueError(f"n={n} exceeds materialisation guard {guard}; use metrics-only")
        h = sylvester(n)
        blocks = []
        for p in perms:
            block = _path_signs(p)[:, None] * h
            _assert_block_orthogonal(block, n)
            blocks.append(block)
        columns = np.concatenate(blocks, axis=1)
    N = 1 << n
    metrics = {"n": n, "L": len(perms), "N": N, "K": len(perms) * N, "r_min": r, "coherence": str(mu)}
    return Codebook(n, perms, columns, r, mu, metrics)


def cross_block_coherence(columns: np.ndarray, N: int) -> Fraction:
    """max |<a, b>| / N over column pairs from different length-N blocks."""
    L = columns.shape[1] // N
    if L < 2:
        raise ValueError("coherence needs at least two blocks")
    blocks = [columns[:, ell * N : (ell + 1) * N].astype(np.float64) for ell in range(L)]
    best = 0
    for a, b in itertools.combinations(range(L), 2):
        # |entries| <= N, far below 2^53, so float64 products are exact
        best = max(best, int(np.abs(blocks[a].T @ blocks[b]).max()))
    return Fraction(best, N)


def coherence_direct(cb: Codebook, guard: int = DIRECT_COHERENCE_GUARD) -> Fraction:
    """Coherence from explicit inner products of every cross-block column pair."""
    if cb.L < 2:
        raise ValueError("coherence needs at least two blocks")
    if cb.n > guard:
        raise ValueError(f"n={cb.n} exceeds direct-coherence guard {guard}")
    if cb.columns is None:
        raise ValueError("codebook was not materialised")
    return cross_block_coherence(cb.columns, cb.N)


def codebook_papr(cb: Codebook, oversample: int = 16) -> tuple[float, float]:
    """(max grid PAPR, max autocorrelation upper bound) over all columns."""
    if cb.columns is None:
        raise ValueError("codebook was not materialised")
    cols = cb.columns.astype(np.float64)
    M = oversample * cb.N
    if oversample < 4:
        raise ValueError("oversample must be at least 4")
    power = np.abs(np.fft.ifft(cols, n=M, axis=0) * M) ** 2
    grid = float(power.max() / cb.N)
    upper = max(papr_bounds(SignSequence(cb.columns[:, k]), oversample).upper for k in range(cb.K))
    return grid, upper


def golay_pairs(p: Perm):
    """Yield (c, eps', a, mate) for every c and both mate offsets."""
    for c in range(1 << p.n):
        a = gdj_sequence(p, c)
        for eps_prime in (0, 1):
            yield c, eps_prime, a, golay_mate(p, c, eps_prime)


__all__ = [
    "SignSequence",
    "PaprBounds",
    "RankCoherence",
    "Codebook",
    "gdj_sequence",
    "golay_mate",
    "golay_pairs",
    "aperiodic_autocorr",
    "autocorrelations",
    "is_golay_pair",
    "papr",
    "papr_bounds",
    "sylvester",
    "spreading_matrix",
    "coherence_direct",
    "cross_block_coherence",
    "coherence_via_rank",
    "codebook_papr",
    "w_phi",
    "r_min",
    "welch_bound",
    "quadratic_coherence_bound",
]
