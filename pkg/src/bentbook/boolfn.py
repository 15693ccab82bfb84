"""Boolean functions on F_2^n: truth tables, Walsh-Hadamard spectra, quadratic forms.

Index convention: the integer j stands for the vector (x_1, ..., x_n) with
j = x_1 + 2 x_2 + ... + 2^(n-1) x_n, so x_1 is the least significant bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_VARS = 24


class Classification(enum.Enum):
    BENT = "bent"
    NEAR_BENT = "near-bent"
    OTHER = "other"


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_VARS:
        raise ValueError(f"variable count must be in [1, {MAX_VARS}], got {n}")


def variable_bits(n: int) -> np.ndarray:
    """Return an (n, 2^n) uint8 array whose row k holds x_{k+1} for every index."""
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[None, :] >> np.arange(n, dtype=np.int64)[:, None]) & 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class TruthTable:
    n: int
    bits: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8) & 1
        if bits.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} entries, got shape {bits.shape}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zero(cls, n: int) -> TruthTable:
        return cls(n, np.zeros(1 << n, dtype=np.uint8))

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.n, self.bits.tobytes()))

    def __add__(self, other: TruthTable) -> TruthTable:
        if self.n != other.n:
            raise ValueError("variable count mismatch")
        return TruthTable(self.n, self.bits ^ other.bits)

    def __call__(self, x: int | Sequence[int]) -> int:
        if not isinstance(x, (int, np.integer)):
            x = bits_to_int(x)
        return int(self.bits[x])

    def signs(self) -> np.ndarray:
        """The +/-1 coding (-1)^f(x) as int64."""
        return 1 - 2 * self.bits.astype(np.int64)

    def packed(self) -> bytes:
        return np.packbits(self.bits, bitorder="little").tobytes()


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.int64)
        if values.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} entries, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if not isinstance(other, WalshSpectrum):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.values, other.values))

    def __getitem__(self, c: int) -> int:
        return int(self.values[c])

    def value_set(self) -> set[int]:
        return {int(v) for v in np.unique(self.values)}

    def parseval_ok(self) -> bool:
        return int(np.dot(self.values, self.values)) == 1 << (2 * self.n)

    def dump(self) -> str:
        """Whitespace-separated debug dump, one value per line, index ascending."""
        return "".join(f"{int(v)}\n" for v in self.values)


def bits_to_int(bits: Iterable[int]) -> int:
    out = 0
    for k, b in enumerate(bits):
        if b & 1:
            out |= 1 << k
    return out


def int_to_bits(value: int, n: int) -> tuple[int, ...]:
    return tuple((value >> k) & 1 for k in range(n))


def _butterfly(vec: np.ndarray, n: int) -> np.ndarray:
    """Unnormalised in-place Sylvester-Hadamard butterfly on a length-2^n int64 vector."""
    h = 1
    size = 1 << n
    while h < size:
        view = vec.reshape(-1, 2, h)
        top = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = top - view[:, 1, :]
        h <<= 1
    return vec


def wht(f: TruthTable) -> WalshSpectrum:
    """W_f(c) = sum_x (-1)^(f(x) + c.x), by the fast butterfly."""
    return WalshSpectrum(f.n, _butterfly(f.signs(), f.n))


def inverse_wht(s: WalshSpectrum) -> np.ndarray:
    """Apply the butterfly again; for a spectrum of f this returns 2^n (-1)^f(x)."""
    return _butterfly(s.values.copy(), s.n)


def wht_direct(f: TruthTable) -> WalshSpectrum:
    """Quadratic-time reference transform; only meant for small n in tests."""
    size = 1 << f.n
    idx = np.arange(size, dtype=np.int64)
    # parity of popcount(c & x) for the full grid
    masks = idx[:, None] & idx[None, :]
    parity = np.zeros_like(masks)
    for k in range(f.n):
        parity ^= (masks >> k) & 1
    signs = f.signs()[None, :] * (1 - 2 * parity)
    return WalshSpectrum(f.n, signs.sum(axis=1))


def classify_spectrum(s: WalshSpectrum) -> Classification:
    n = s.n
    values = s.value_set()
    if n % 2 == 0:
        half = 1 << (n // 2)
        if values <= {half, -half}:
            return Classification.BENT
    else:
        mag = 1 << ((n + 1) // 2)
        if values == {0, mag, -mag}:
            return Classification.NEAR_BENT
    return Classification.OTHER


@dataclass(frozen=True)
class BitMatrix:
    """Dense F_2 matrix; row r is an int whose bit k holds entry (r, k)."""

    rows: int
    cols: int
    storage: tuple[int, ...]

    def __post_init__(self):
        if len(self.storage) != self.rows:
            raise ValueError("row count mismatch")
        limit = 1 << self.cols
        if any(not 0 <= r < limit for r in self.storage):
            raise ValueError("row wider than column count")

    @classmethod
    def from_array(cls, array) -> BitMatrix:
        a = np.asarray(array, dtype=np.uint8) & 1
        rows, cols = a.shape
        return cls(rows, cols, tuple(bits_to_int(row) for row in a))

    def to_array(self) -> np.ndarray:
        return np.array(
            [int_to_bits(r, self.cols) for r in self.storage], dtype=np.uint8
        ).reshape(self.rows, self.cols)

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return (self.storage[r] >> c) & 1

    def __add__(self, other: BitMatrix) -> BitMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.storage, other.storage)))

    def is_symplectic(self) -> bool:
        """Symmetric with zero diagonal."""
        if self.rows != self.cols:
            return False
        return all(
            self[i, i] == 0 and all(self[i, j] == self[j, i] for j in range(i))
            for i in range(self.rows)
        )


def rank_rows(rows: Iterable[int]) -> int:
    """F_2 rank of int-bitset rows, by elimination on the leading bit."""
    pivots: dict[int, int] = {}
    for row in rows:
        while row:
            top = row.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = row
                break
            row ^= p
    return len(pivots)


def rank_f2(m: BitMatrix) -> int:
    return rank_rows(m.storage)


def _canonical_pair(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"x_{i}x_{i} is not a quadratic monomial")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class QuadForm:
    """Quadratic-plus-affine function sum x_i x_j + sum c_k x_k + constant (1-indexed)."""

    n: int
    pairs: frozenset[tuple[int, int]] = frozenset()
    linear: tuple[int, ...] = field(default=())
    constant: int = 0

    def __post_init__(self):
        _check_n(self.n)
        pairs = frozenset(_canonical_pair(i, j) for i, j in self.pairs)
        for i, j in pairs:
            if not (1 <= i and j <= self.n):
                raise ValueError(f"pair ({i},{j}) out of range for n={self.n}")
        linear = tuple(int(b) & 1 for b in self.linear) if self.linear else (0,) * self.n
        if len(linear) != self.n:
            raise ValueError("linear part must have length n")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "constant", int(self.constant) & 1)

    @classmethod
    def from_monomials(cls, n: int, pairs: Iterable[tuple[int, int]], linear: Iterable[int] = (), constant: int = 0) -> QuadForm:
        """Build from a monomial list where repeated monomials cancel (F_2 addition)."""
        acc: set[tuple[int, int]] = set()
        for i, j in pairs:
            acc ^= {_canonical_pair(i, j)}
        lin = [0] * n
        for k in linear:
            lin[k - 1] ^= 1
        return cls(n, frozenset(acc), tuple(lin), constant)

    def __add__(self, other: QuadForm) -> QuadForm:
        if self.n != other.n:
            raise ValueError("variable count mismatch")
        return QuadForm(
            self.n,
            self.pairs ^ other.pairs,
            tuple(a ^ b for a, b in zip(self.linear, other.linear)),
            self.constant ^ other.constant,
        )

    @property
    def is_affine(self) -> bool:
        return not self.pairs

    def evaluate(self, x: int | Sequence[int]) -> int:
        """Direct ANF evaluation at a single point."""
        if isinstance(x, (int, np.integer)):
            x = int_to_bits(int(x), self.n)
        v = self.constant
        for i, j in self.pairs:
            v ^= x[i - 1] & x[j - 1]
        for k, c in enumerate(self.linear):
            v ^= c & x[k]
        return v

    def truth_table(self) -> TruthTable:
        xs = variable_bits(self.n)
        acc = np.full(1 << self.n, self.constant, dtype=np.uint8)
        for i, j in self.pairs:
            acc ^= xs[i - 1] & xs[j - 1]
        for k, c in enumerate(self.linear):
            if c:
                acc ^= xs[k]
        return TruthTable(self.n, acc)

    def symplectic_rows(self) -> tuple[int, ...]:
        rows = [0] * self.n
        for i, j in self.pairs:
            rows[i - 1] |= 1 << (j - 1)
            rows[j - 1] |= 1 << (i - 1)
        return tuple(rows)

    def restrict(self, i: int, j: int, u: int, v: int) -> QuadForm:
        """Symbolic restriction x_i = u, x_j = v; survivors renumbered in ascending order."""
        _check_flat(self.n, i, j)
        fixed = {i: u & 1, j: v & 1}
        keep = [k for k in range(1, self.n + 1) if k not in fixed]
        new_index = {k: t + 1 for t, k in enumerate(keep)}
        pairs: list[tuple[int, int]] = []
        linear: list[int] = []
        const = self.constant
        for a, b in self.pairs:
            if a in fixed and b in fixed:
                const ^= fixed[a] & fixed[b]
            elif a in fixed:
                if fixed[a]:
                    linear.append(new_index[b])
            elif b in fixed:
                if fixed[b]:
                    linear.append(new_index[a])
            else:
                pairs.append((new_index[a], new_index[b]))
        for k, c in enumerate(self.linear, start=1):
            if not c:
                continue
            if k in fixed:
                const ^= fixed[k]
            else:
                linear.append(new_index[k])
        return QuadForm.from_monomials(self.n - 2, pairs, linear, const)

    def __str__(self) -> str:
        terms = [f"x{i}x{j}" for i, j in sorted(self.pairs)]
        terms += [f"x{k}" for k, c in enumerate(self.linear, start=1) if c]
        if self.constant:
            terms.append("1")
        return " + ".join(terms) if terms else "0"


def symplectic_matrix(q: QuadForm) -> BitMatrix:
    return BitMatrix(q.n, q.n, q.symplectic_rows())


@dataclass(frozen=True)
class SpectrumSummary:
    rank: int
    magnitude: int
    support_count: int


def spectrum_from_rank(q: QuadForm) -> SpectrumSummary:
    """Predict |W_q| and its support size from the symplectic rank r: 2^(n - r/2) on 2^r points."""
    r = rank_rows(q.symplectic_rows())
    return SpectrumSummary(rank=r, magnitude=1 << (q.n - r // 2), support_count=1 << r)


def _check_flat(n: int, i: int, j: int) -> None:
    if n < 3:
        raise ValueError("restriction to a flat needs n >= 3")
    if i == j:
        raise ValueError("flat indices must differ")
    if not (1 <= i < j <= n):
        raise ValueError(f"need 1 <= i < j <= n, got ({i}, {j}) with n={n}")


def restrict(f: TruthTable, i: int, j: int, u: int, v: int) -> TruthTable:
    """f restricted to x_i = u, x_j = v, as a function of the other n - 2 variables."""
    _check_flat(f.n, i, j)
    idx = np.arange(1 << f.n, dtype=np.int64)
    mask = (((idx >> (i - 1)) & 1) == (u & 1)) & (((idx >> (j - 1)) & 1) == (v & 1))
    # selecting in ascending index order keeps the survivors' relative bit order
    return TruthTable(f.n - 2, f.bits[mask])


def drop_coordinates(c: int, n: int, i: int, j: int) -> int:
    """c-bar: remove coordinates i and j (1-indexed) from the index c."""
    out = 0
    t = 0
    for k in range(1, n + 1):
        if k in (i, j):
            continue
        out |= ((c >> (k - 1)) & 1) << t
        t += 1
    return out
