"""Slow, independent reference computations.

Nothing here goes through bentbook's transforms or rank code: forms are
evaluated straight from their monomials, spectra by double sums and ranks by
dense row reduction on numpy arrays.
"""

import itertools

import numpy as np


def bits(j, n):
    return [(j >> k) & 1 for k in range(n)]


def path_value(perm, x):
    """Q_perm at the bit list x (perm is a 1-indexed sequence)."""
    return sum(x[a - 1] & x[b - 1] for a, b in zip(perm, perm[1:])) & 1


def form_table(n, monomials, linear=()):
    out = []
    for j in range(1 << n):
        x = bits(j, n)
        v = sum(x[a - 1] & x[b - 1] for a, b in monomials) + sum(x[k - 1] for k in linear)
        out.append(v & 1)
    return out


def difference_table(p, q):
    n = len(p)
    return [path_value(p, bits(j, n)) ^ path_value(q, bits(j, n)) for j in range(1 << n)]


def walsh(table):
    size = len(table)
    return [
        sum((-1) ** (table[x] ^ (bin(c & x).count("1") & 1)) for x in range(size))
        for c in range(size)
    ]


def walsh_np(table):
    """Same double sum, vectorised, for n up to about 12."""
    t = np.asarray(table, dtype=np.int64)
    size = t.size
    idx = np.arange(size)
    out = np.empty(size, dtype=np.int64)
    par = np.zeros(size, dtype=np.int64)
    for c in range(size):
        m = idx & c
        par[:] = 0
        while m.any():
            par ^= m & 1
            m = m >> 1
        out[c] = int(((-1) ** (t ^ par)).sum())
    return out


def is_bent_table(table):
    n = len(table).bit_length() - 1
    return n % 2 == 0 and {abs(w) for w in walsh_np(table)} == {1 << (n // 2)}


def is_near_bent_table(table):
    n = len(table).bit_length() - 1
    return n % 2 == 1 and set(walsh_np(table).tolist()) == {0, 1 << ((n + 1) // 2), -(1 << ((n + 1) // 2))}


def compatible_direct(p, q):
    t = difference_table(p, q)
    return is_bent_table(t) if len(p) % 2 == 0 else is_near_bent_table(t)


def gf2_rank(matrix):
    a = np.array(matrix, dtype=np.uint8) % 2
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        piv = r + hits[0]
        a[[r, piv]] = a[[piv, r]]
        for k in range(rows):
            if k != r and a[k, c]:
                a[k] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def symplectic_dense(n, monomials):
    m = np.zeros((n, n), dtype=np.uint8)
    for a, b in monomials:
        m[a - 1, b - 1] ^= 1
        m[b - 1, a - 1] ^= 1
    return m


def path_monomials(perm):
    return list(zip(perm, perm[1:]))


def compose(p, q):
    return tuple(p[v - 1] for v in q)


def inverse(p):
    out = [0] * len(p)
    for k, v in enumerate(p, start=1):
        out[v - 1] = k
    return tuple(out)


def gdj(perm, c, eps=0):
    n = len(perm)
    return [
        (-1) ** (path_value(perm, bits(j, n)) ^ (sum(a & b for a, b in zip(bits(c, n), bits(j, n))) & 1) ^ eps)
        for j in range(1 << n)
    ]


def acf(seq, tau):
    return sum(seq[i] * seq[i + tau] for i in range(len(seq) - tau))


def papr_dense(seq, points):
    """max_t |sum a_i e^(2 pi i i t)|^2 / N on an evenly spaced grid of the given size."""
    a = np.asarray(seq, dtype=np.float64)
    t = np.arange(points) / points
    phase = np.exp(2j * np.pi * np.outer(t, np.arange(a.size)))
    return float(np.max(np.abs(phase @ a) ** 2) / a.size)


def all_perms(n):
    return list(itertools.permutations(range(1, n + 1)))
