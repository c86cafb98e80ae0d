"""Exact dense linear algebra over prime fields and over the integers.

Conventions used throughout the package: vectors are rows, a matrix A acts
on the right (x -> x @ A), the kernel of A is the row space {x : x @ A = 0},
and composing maps multiplies their matrices left to right.  Prime-field
matrices are numpy integer arrays with entries reduced mod p; integer
matrices are kept exact (arbitrary-precision Python ints whenever numpy's
fixed width could overflow).

GF(2) elimination switches to a bit-packed representation above a size
threshold; this is a speed detail only and never changes results.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "abelian_invariants_of_cokernel",
    "fp_matmul",
    "int_kernel_basis",
    "int_rank",
    "kernel_basis",
    "rank",
    "row_reduce",
    "smith_normal_form",
    "snf_diagonal",
    "solve",
]

# Entry count above which GF(2) elimination is bit packed.  Tests shrink
# this to force the packed path onto small inputs.
_PACK_MIN_ENTRIES = 1 << 16

_INT64_GUARD = 1 << 40  # switch integer elimination to Python ints beyond this


def _as_fp(a, p: int) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    return arr % p


def fp_matmul(a, b, p: int) -> np.ndarray:
    """Product of mod-p matrices (row-vector convention: acts left to right)."""
    a = _as_fp(a, p)
    b = _as_fp(b, p)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    return (a @ b) % p


# ---------------------------------------------------------------------------
# GF(2) bit packing


def _pack_gf2(a: np.ndarray) -> np.ndarray:
    """Pack 0/1 rows into uint64 words, 64 columns per word, little bit order."""
    m, n = a.shape
    if n == 0:
        return np.zeros((m, 0), dtype=np.uint64)
    packed = np.packbits(a.astype(np.uint8, copy=False), axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    return np.ascontiguousarray(packed).view(np.uint64)


def _unpack_gf2(words: np.ndarray, n: int) -> np.ndarray:
    m = words.shape[0]
    if n == 0:
        return np.zeros((m, 0), dtype=np.int64)
    as_bytes = np.ascontiguousarray(words).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, count=n, bitorder="little")
    return bits.astype(np.int64)


def _row_reduce_gf2(words: np.ndarray, limit: int, reduce_above: bool):
    m = words.shape[0]
    pivots = []
    r = 0
    for c in range(limit):
        if r >= m:
            break
        word, bit = divmod(c, 64)
        col = (words[r:, word] >> np.uint64(bit)) & np.uint64(1)
        hits = np.nonzero(col)[0]
        if hits.size == 0:
            continue
        pr = r + int(hits[0])
        if pr != r:
            words[[r, pr]] = words[[pr, r]]
        if reduce_above:
            colfull = (words[:, word] >> np.uint64(bit)) & np.uint64(1)
            mask = colfull.astype(bool)
            mask[r] = False
        else:
            below = (words[r + 1 :, word] >> np.uint64(bit)) & np.uint64(1)
            mask = np.zeros(m, dtype=bool)
            mask[r + 1 :] = below.astype(bool)
        if mask.any():
            words[mask] ^= words[r]
        pivots.append(c)
        r += 1
    return words, pivots


def _row_reduce_dense(arr: np.ndarray, p: int, limit: int, reduce_above: bool):
    m = arr.shape[0]
    pivots = []
    r = 0
    for c in range(limit):
        if r >= m:
            break
        hits = np.nonzero(arr[r:, c])[0]
        if hits.size == 0:
            continue
        pr = r + int(hits[0])
        if pr != r:
            arr[[r, pr]] = arr[[pr, r]]
        inv = pow(int(arr[r, c]), p - 2, p)
        if inv != 1:
            arr[r] = (arr[r] * inv) % p
        if reduce_above:
            mask = arr[:, c] != 0
            mask[r] = False
        else:
            mask = np.zeros(m, dtype=bool)
            mask[r + 1 :] = arr[r + 1 :, c] != 0
        if mask.any():
            arr[mask] = (arr[mask] - np.outer(arr[mask, c], arr[r])) % p
        pivots.append(c)
        r += 1
    return arr, pivots


def row_reduce(a, p: int, pivot_limit: int | None = None, reduce_above: bool = True):
    """Gaussian elimination mod p; returns (R, pivot_columns).

    Pivot search is restricted to the first `pivot_limit` columns; trailing
    columns ride along, which is how augmented systems are solved.  With
    `reduce_above` the result is in reduced row echelon form, otherwise
    entries below pivots are cleared but rows above are left alone.  Rows
    with no pivot end up at the bottom, zero in the first `pivot_limit`
    columns.  Fully deterministic: first usable row wins each pivot.
    """
    src = np.asarray(a)
    if src.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {src.shape}")
    n = src.shape[1]
    limit = n if pivot_limit is None else pivot_limit
    if p == 2 and src.size >= _PACK_MIN_ENTRIES:
        # pack straight from the source dtype; a wide copy of a huge matrix
        # can dwarf the packed working set
        words = _pack_gf2((src % 2).astype(np.uint8, copy=False))
        words, pivots = _row_reduce_gf2(words, limit, reduce_above)
        return _unpack_gf2(words, n), pivots
    return _row_reduce_dense(_as_fp(src, p).copy(), p, limit, reduce_above)


def rank(a, p: int) -> int:
    """Rank of a matrix over F_p."""
    src = np.asarray(a)
    if p == 2 and src.ndim == 2 and src.size >= _PACK_MIN_ENTRIES:
        words = _pack_gf2((src % 2).astype(np.uint8, copy=False))
        return len(_row_reduce_gf2(words, src.shape[1], False)[1])
    return len(row_reduce(a, p, reduce_above=False)[1])


def kernel_basis(a, p: int) -> np.ndarray:
    """Rows spanning {x : x @ a = 0}, in reduced row echelon form."""
    arr = _as_fp(a, p)
    m, n = arr.shape
    aug = np.hstack([arr, np.eye(m, dtype=np.int64)])
    reduced, pivots = row_reduce(aug, p, pivot_limit=n, reduce_above=False)
    kernel = reduced[len(pivots) :, n:]
    if kernel.shape[0] == 0:
        return np.zeros((0, m), dtype=np.int64)
    canonical, _ = row_reduce(kernel, p, reduce_above=True)
    return canonical


def solve(a, b, p: int):
    """Solve x @ a = b for x; b may be one row or a stack of rows.

    Returns the particular solution with free coordinates zero (one row per
    row of b).  Raises ValueError when the system is inconsistent.
    """
    arr = _as_fp(a, p)
    rhs = np.asarray(b, dtype=np.int64) % p
    single = rhs.ndim == 1
    if single:
        rhs = rhs[None, :]
    m, n = arr.shape
    if rhs.shape[1] != n:
        raise ValueError(f"rhs width {rhs.shape[1]} does not match matrix cols {n}")
    k = rhs.shape[0]
    aug = np.hstack([arr.T, rhs.T])  # (n, m + k)
    reduced, pivots = row_reduce(aug, p, pivot_limit=m, reduce_above=True)
    if np.any(reduced[len(pivots) :, m:]):
        raise ValueError("inconsistent linear system")
    x = np.zeros((k, m), dtype=np.int64)
    for row_idx, pc in enumerate(pivots):
        x[:, pc] = reduced[row_idx, m:]
    return x[0] if single else x


# ---------------------------------------------------------------------------
# Integer lattices


def _to_int_rows(a) -> list[list[int]]:
    if isinstance(a, np.ndarray):
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
        return [[int(v) for v in row] for row in a]
    return [[int(v) for v in row] for row in a]


def _snf_core(rows: list[list[int]]) -> list[int]:
    """Smith diagonal of a small integer matrix, no transforms, exact."""
    M = [row[:] for row in rows]
    m = len(M)
    n = len(M[0]) if m else 0
    diag = []
    k = 0
    while k < m and k < n:
        best = None
        for i in range(k, m):
            for j in range(k, n):
                v = M[i][j]
                if v and (best is None or abs(v) < abs(best[0])):
                    best = (v, i, j)
        if best is None:
            break
        _, bi, bj = best
        M[k], M[bi] = M[bi], M[k]
        for row in M:
            row[k], row[bj] = row[bj], row[k]
        while True:
            # clear column k below the pivot
            dirty = False
            for i in range(k + 1, m):
                if M[i][k]:
                    q = M[i][k] // M[k][k]
                    if q:
                        M[i] = [x - q * y for x, y in zip(M[i], M[k])]
                    if M[i][k]:
                        M[k], M[i] = M[i], M[k]
                        dirty = True
            if dirty:
                continue
            # clear row k right of the pivot
            for j in range(k + 1, n):
                if M[k][j]:
                    q = M[k][j] // M[k][k]
                    if q:
                        for row in M:
                            row[j] -= q * row[k]
                    if M[k][j]:
                        for row in M:
                            row[k], row[j] = row[j], row[k]
                        dirty = True
            if not dirty and all(M[i][k] == 0 for i in range(k + 1, m)):
                break
        pivot = M[k][k]
        # enforce the divisibility chain before moving on
        culprit = None
        for i in range(k + 1, m):
            for j in range(k + 1, n):
                if M[i][j] % pivot:
                    culprit = i
                    break
            if culprit is not None:
                break
        if culprit is not None:
            M[k] = [x + y for x, y in zip(M[k], M[culprit])]
            continue
        diag.append(abs(pivot))
        k += 1
    diag += [0] * (min(m, n) - len(diag))
    return diag


def snf_diagonal(a) -> list[int]:
    """Smith normal form diagonal (no transforms), divisibility chain order.

    Unit pivots are eliminated in a vectorized numpy phase first; the
    leftover core, if any, goes through exact Python-int reduction.  Falls
    back to the exact path entirely if entries threaten to overflow int64.
    """
    rows = _to_int_rows(a)
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m == 0 or n == 0:
        return []
    if max((max(map(abs, r), default=0) for r in rows), default=0) >= _INT64_GUARD:
        return _snf_core(rows)
    M = np.array(rows, dtype=np.int64)
    ones = 0
    while M.size:
        units = np.argwhere(np.abs(M) == 1)
        if units.size == 0:
            break
        i, j = (int(v) for v in units[0])
        s = int(M[i, j])
        col = M[:, j].copy()
        col[i] = 0
        if np.any(col):
            M = M - np.outer(col * s, M[i])
        M = np.delete(np.delete(M, i, axis=0), j, axis=1)
        ones += 1
        if M.size and int(np.abs(M).max()) >= _INT64_GUARD:
            core = _snf_core([[int(v) for v in row] for row in M])
            return [1] * ones + core
    core = _snf_core([[int(v) for v in row] for row in M]) if M.size else []
    diag = [1] * ones + core
    return diag


def smith_normal_form(a):
    """Full Smith normal form; returns (diagonal, U, V) with U @ a @ V diagonal.

    U and V are unimodular, the diagonal is nonnegative and forms a
    divisibility chain.  Exact at any size, intended for moderate matrices;
    use snf_diagonal when the transforms are not needed.
    """
    A = _to_int_rows(a)
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(i, j, q):  # row_i -= q * row_j
        A[i] = [x - q * y for x, y in zip(A[i], A[j])]
        U[i] = [x - q * y for x, y in zip(U[i], U[j])]

    def col_op(j, i, q):  # col_j -= q * col_i
        for row in A:
            row[j] -= q * row[i]
        for row in V:
            row[j] -= q * row[i]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    k = 0
    while k < m and k < n:
        best = None
        for i in range(k, m):
            for j in range(k, n):
                v = A[i][j]
                if v and (best is None or abs(v) < abs(best[0])):
                    best = (v, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != k:
            swap_rows(k, bi)
        if bj != k:
            swap_cols(k, bj)
        while True:
            dirty = False
            for i in range(k + 1, m):
                if A[i][k]:
                    q = A[i][k] // A[k][k]
                    if q:
                        row_op(i, k, q)
                    if A[i][k]:
                        swap_rows(k, i)
                        dirty = True
            if dirty:
                continue
            for j in range(k + 1, n):
                if A[k][j]:
                    q = A[k][j] // A[k][k]
                    if q:
                        col_op(j, k, q)
                    if A[k][j]:
                        swap_cols(k, j)
                        dirty = True
            if not dirty and all(A[i][k] == 0 for i in range(k + 1, m)):
                break
        pivot = A[k][k]
        culprit = None
        for i in range(k + 1, m):
            if any(A[i][j] % pivot for j in range(k + 1, n)):
                culprit = i
                break
        if culprit is not None:
            A[k] = [x + y for x, y in zip(A[k], A[culprit])]
            U[k] = [x + y for x, y in zip(U[k], U[culprit])]
            continue
        if pivot < 0:
            A[k] = [-x for x in A[k]]
            U[k] = [-x for x in U[k]]
        k += 1
    diag = [A[i][i] for i in range(min(m, n))]
    return diag, U, V


def _int_kernel_slow(A: list[list[int]], m: int, n: int) -> list[list[int]]:
    """Exact Python-int [A | I] reduction; used when int64 would overflow."""
    M = [A[i] + [int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        while True:
            best = None
            for i in range(r, m):
                v = M[i][c]
                if v and (best is None or abs(v) < abs(best[0])):
                    best = (v, i)
            if best is None:
                break
            _, bi = best
            if bi != r:
                M[r], M[bi] = M[bi], M[r]
            done = True
            for i in range(r + 1, m):
                if M[i][c]:
                    q = M[i][c] // M[r][c]
                    M[i] = [x - q * y for x, y in zip(M[i], M[r])]
                    if M[i][c]:
                        done = False
            if done:
                r += 1
                break
    return [row[n:] for row in M[r:]]


def int_kernel_basis(a) -> np.ndarray:
    """Basis of the integer kernel lattice {x : x @ a = 0}, rows of length m.

    Row-reduces [a | I] with unimodular row operations; rows whose a-part
    vanishes give the kernel.  The result spans a saturated sublattice, so
    any integer kernel vector is an integer combination of these rows.
    """
    A = _to_int_rows(a)
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64)
    M = np.hstack([np.array(A, dtype=np.int64).reshape(m, n),
                   np.eye(m, dtype=np.int64)])
    r = 0
    for c in range(n):
        while r < m:
            col = M[r:, c]
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                break
            bi = r + int(nz[np.argmin(np.abs(col[nz]))])
            if bi != r:
                M[[r, bi]] = M[[bi, r]]
            quotients = M[r + 1 :, c] // M[r, c]
            hit = np.nonzero(quotients)[0]
            if hit.size:
                M[r + 1 + hit] -= quotients[hit, None] * M[r]
            if not np.any(M[r + 1 :, c]):
                r += 1
                break
        if int(np.abs(M).max(initial=0)) >= _INT64_GUARD:
            rows = _int_kernel_slow(A, m, n)
            wide = any(abs(v) >= 1 << 62 for row in rows for v in row)
            return np.array(rows, dtype=object if wide else np.int64).reshape(-1, m)
    return M[r:, n:]


def int_rank(a) -> int:
    """Rank of an integer matrix (over the rationals)."""
    A = _to_int_rows(a)
    m = len(A)
    if m == 0:
        return 0
    return m - len(int_kernel_basis(A))


def abelian_invariants_of_cokernel(rows, ambient_rank: int) -> list[int]:
    """Invariant factors of Z^ambient_rank / (row lattice of `rows`).

    Returns the nontrivial invariant factors (> 1, ascending divisibility)
    followed by one 0 per free rank.
    """
    rows = _to_int_rows(rows)
    if ambient_rank < 0:
        raise ValueError("ambient rank must be nonnegative")
    if rows and any(len(r) != ambient_rank for r in rows):
        raise ValueError("relation rows must have ambient_rank columns")
    diag = snf_diagonal(rows) if rows else []
    nonzero = [d for d in diag if d != 0]
    free = ambient_rank - len(nonzero)
    return [d for d in nonzero if d > 1] + [0] * free
