"""Exact dense linear algebra and polynomial arithmetic over the prime field F_p.

Matrices are numpy int64 arrays whose entries are residues in [0, p); every
function reduces its output back into that range.  Polynomials are Python lists
of residues ordered lowest degree first with no trailing zeros (the zero
polynomial is the empty list), matching ``FpPoly`` conventions used throughout
the package.

Row reduction uses deterministic pivoting (first nonzero entry scanning columns
left to right, rows top to bottom), so all derived objects (RREF, kernel bases,
factorizations) are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FieldSpec",
    "ensure_prime",
    "is_prime",
    "as_fp_matrix",
    "identity",
    "rref_and_rank",
    "rank",
    "kernel_basis",
    "solve",
    "inverse",
    "column_space_basis",
    "poly_trim",
    "poly_add",
    "poly_sub",
    "poly_scale",
    "poly_mul",
    "poly_divmod",
    "poly_mod",
    "poly_gcd",
    "poly_lcm",
    "poly_monic",
    "poly_eval",
    "poly_deg",
    "poly_pow_mod",
    "factor_poly",
    "min_poly",
]


def is_prime(p: int) -> bool:
    """Trial-division primality check (inputs here are tiny)."""
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def ensure_prime(p: int) -> int:
    """Return ``p`` if prime, else raise ValueError."""
    if not is_prime(p):
        raise ValueError(f"modulus must be prime, got {p}")
    return p


@dataclass(frozen=True)
class FieldSpec:
    """A validated prime field F_p."""

    p: int

    def __post_init__(self) -> None:
        ensure_prime(self.p)


def as_fp_matrix(a, p: int) -> np.ndarray:
    """Coerce ``a`` to an int64 matrix with entries reduced into [0, p)."""
    m = np.asarray(a, dtype=np.int64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {m.ndim}")
    return np.mod(m, p)


def identity(n: int, p: int) -> np.ndarray:
    del p  # entries 0/1 are already reduced for every p >= 2
    return np.eye(n, dtype=np.int64)


def _inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, -1, p)


def rref_and_rank(a, p: int) -> tuple[np.ndarray, int]:
    """Reduced row echelon form and rank of ``a`` over F_p.

    Pivoting is deterministic: for each column (left to right) the first row at
    or below the current row with a nonzero entry is chosen.

    Returns:
        (rref_matrix, rank)
    """
    ensure_prime(p)
    m = as_fp_matrix(a, p).copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pivot_row = r + int(nz[0])
        if pivot_row != r:
            m[[r, pivot_row]] = m[[pivot_row, r]]
        m[r] = (m[r] * _inv_mod(m[r, c], p)) % p
        col = m[:, c].copy()
        col[r] = 0
        elim = np.nonzero(col)[0]
        if elim.size:
            m[elim] = (m[elim] - np.outer(col[elim], m[r])) % p
        r += 1
        if r == rows:
            break
    return m, r


def rank(a, p: int) -> int:
    return rref_and_rank(a, p)[1]


def _pivot_columns(rref: np.ndarray) -> list[int]:
    pivots = []
    rows, cols = rref.shape
    r = 0
    for c in range(cols):
        if r < rows and rref[r, c] == 1 and np.all(rref[:r, c] == 0) and np.all(rref[r + 1:, c] == 0):
            # column c is a standard basis vector with 1 in row r -> pivot
            pivots.append(c)
            r += 1
    return pivots


def kernel_basis(a, p: int) -> np.ndarray:
    """Basis of the right null space of ``a``: columns span {v : a v = 0}.

    The returned matrix has shape (cols, cols - rank); its column count equals
    the nullity.  Basis vectors are the standard back-substitution vectors of
    the RREF (one per free column, in increasing column order), so the result
    is deterministic.
    """
    m = as_fp_matrix(a, p)
    rref, rk = rref_and_rank(m, p)
    rows, cols = rref.shape
    pivots = _pivot_columns(rref)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for r, pc in enumerate(pivots):
            basis[pc, k] = (-rref[r, fc]) % p
    return basis


def solve(a, b, p: int) -> np.ndarray | None:
    """One solution x of a x = b over F_p, or None if inconsistent.

    ``b`` may be a vector or a matrix of stacked right-hand-side columns.
    """
    A = as_fp_matrix(a, p)
    B = np.mod(np.asarray(b, dtype=np.int64), p)
    vec = B.ndim == 1
    if vec:
        B = B.reshape(-1, 1)
    if B.shape[0] != A.shape[0]:
        raise ValueError("shape mismatch between matrix and right-hand side")
    aug = np.hstack([A, B])
    rref, _ = rref_and_rank(aug, p)
    n = A.shape[1]
    x = np.zeros((n, B.shape[1]), dtype=np.int64)
    for row in rref:
        lead = -1
        for c in range(n):
            if row[c] != 0:
                lead = c
                break
        if lead < 0:
            if np.any(row[n:] != 0):
                return None
            continue
        x[lead] = row[n:]
    if np.any((A @ x) % p != B):
        return None
    return x[:, 0] if vec else x


def inverse(a, p: int) -> np.ndarray:
    """Inverse of a square matrix over F_p; raises ValueError if singular."""
    A = as_fp_matrix(a, p)
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    aug = np.hstack([A, identity(n, p)])
    rref, rk = rref_and_rank(aug, p)
    if rk < n or not np.array_equal(rref[:, :n], identity(n, p)):
        raise ValueError("matrix is singular over F_p")
    return rref[:, n:]


def column_space_basis(a, p: int) -> np.ndarray:
    """Deterministic basis of the column space: the pivot columns of ``a``."""
    A = as_fp_matrix(a, p)
    rref, _ = rref_and_rank(A, p)
    pivots = _pivot_columns(rref)
    return A[:, pivots].copy()


# ---------------------------------------------------------------------------
# Polynomials over F_p (coefficient lists, lowest degree first)
# ---------------------------------------------------------------------------


def poly_trim(f: list[int]) -> list[int]:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_deg(f: list[int]) -> int:
    """Degree; -1 for the zero polynomial."""
    return len(poly_trim(f)) - 1


def poly_add(f: list[int], g: list[int], p: int) -> list[int]:
    n = max(len(f), len(g))
    return poly_trim([((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p for i in range(n)])


def poly_sub(f: list[int], g: list[int], p: int) -> list[int]:
    n = max(len(f), len(g))
    return poly_trim([((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)])


def poly_scale(f: list[int], c: int, p: int) -> list[int]:
    c %= p
    return poly_trim([(c * a) % p for a in f])


def poly_mul(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = poly_trim(f), poly_trim(g)
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return poly_trim(out)


def poly_divmod(f: list[int], g: list[int], p: int) -> tuple[list[int], list[int]]:
    f, g = poly_trim(f), poly_trim(g)
    if not g:
        raise ValueError("polynomial division by zero")
    q = [0] * max(0, len(f) - len(g) + 1)
    r = list(f)
    inv_lead = _inv_mod(g[-1], p)
    while len(r) >= len(g) and poly_trim(r):
        r = poly_trim(r)
        if len(r) < len(g):
            break
        shift = len(r) - len(g)
        c = (r[-1] * inv_lead) % p
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = (r[shift + i] - c * b) % p
    return poly_trim(q), poly_trim(r)


def poly_mod(f: list[int], g: list[int], p: int) -> list[int]:
    return poly_divmod(f, g, p)[1]


def poly_monic(f: list[int], p: int) -> list[int]:
    f = poly_trim(f)
    if not f:
        return f
    return poly_scale(f, _inv_mod(f[-1], p), p)


def poly_gcd(f: list[int], g: list[int], p: int) -> list[int]:
    a, b = poly_trim(f), poly_trim(g)
    while b:
        a, b = b, poly_mod(a, b, p)
    return poly_monic(a, p)


def poly_lcm(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = poly_trim(f), poly_trim(g)
    if not f or not g:
        return []
    d = poly_gcd(f, g, p)
    q, _ = poly_divmod(poly_mul(f, g, p), d, p)
    return poly_monic(q, p)


def poly_eval(f: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(poly_trim(f)):
        acc = (acc * x + c) % p
    return acc


def poly_pow_mod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    """base**e reduced modulo the polynomial ``mod``."""
    result = [1]
    b = poly_mod(base, mod, p)
    while e > 0:
        if e & 1:
            result = poly_mod(poly_mul(result, b, p), mod, p)
        b = poly_mod(poly_mul(b, b, p), mod, p)
        e >>= 1
    return result


def _frobenius_kernel(f: list[int], p: int) -> list[list[int]]:
    """Basis of the Berlekamp subalgebra {v : v^p = v mod f} as polynomials."""
    n = poly_deg(f)
    # Q[:, j] = coefficients of x^(p*j) mod f
    Q = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        col = poly_pow_mod([0] * j + [1], p, f, p)
        for i, c in enumerate(col):
            Q[i, j] = c
    K = kernel_basis((Q - identity(n, p)) % p, p)
    return [poly_trim(list(K[:, j])) for j in range(K.shape[1])]


def _factor_squarefree(f: list[int], p: int) -> list[list[int]]:
    """Berlekamp factorization of a monic squarefree polynomial into irreducibles.

    Splitting uses gcd(f, v - c) over all c in F_p for Berlekamp-subalgebra
    elements v, which is deterministic and cheap for the small primes in scope.
    """
    f = poly_monic(f, p)
    if poly_deg(f) <= 1:
        return [f]
    basis = _frobenius_kernel(f, p)
    r = len(basis)  # number of irreducible factors
    factors = [f]
    if r == 1:
        return factors
    for v in basis:
        if poly_deg(v) < 1:
            continue  # constants never split
        next_factors: list[list[int]] = []
        for g in factors:
            if poly_deg(g) <= 1:
                next_factors.append(g)
                continue
            pieces: list[list[int]] = []
            rem = g
            for c in range(p):
                d = poly_gcd(rem, poly_sub(v, [c], p), p)
                if 0 < poly_deg(d) < poly_deg(rem):
                    pieces.append(d)
                    rem = poly_divmod(rem, d, p)[0]
                if poly_deg(rem) == 0:
                    break
            if poly_deg(rem) > 0:
                pieces.append(rem)
            next_factors.extend(pieces)
        factors = next_factors
        if len(factors) == r:
            break
    return [poly_monic(g, p) for g in factors]


def _poly_derivative(f: list[int], p: int) -> list[int]:
    return poly_trim([(i * f[i]) % p for i in range(1, len(f))])


def _poly_pth_root(f: list[int], p: int) -> list[int]:
    """p-th root of a polynomial in x^p (coefficientwise over F_p)."""
    return poly_trim([f[i] for i in range(0, len(f), p)])


def factor_poly(f: list[int], p: int) -> list[tuple[list[int], int]]:
    """Factor a polynomial over F_p into monic irreducibles with multiplicity.

    Returns a list of (irreducible, multiplicity) pairs sorted by degree and
    then lexicographically on coefficient lists, so output order is canonical.
    The algorithm (squarefree decomposition + small-field Berlekamp splitting)
    is fully deterministic.

    Raises:
        ValueError: for the zero polynomial.
    """
    ensure_prime(p)
    f = poly_trim([c % p for c in f])
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    if poly_deg(f) == 0:
        return []
    f = poly_monic(f, p)
    mult: dict[tuple[int, ...], int] = {}

    def add_factor(g: list[int], e: int) -> None:
        key = tuple(g)
        mult[key] = mult.get(key, 0) + e

    def recurse(g: list[int], e: int) -> None:
        g = poly_monic(g, p)
        if poly_deg(g) <= 0:
            return
        d = _poly_derivative(g, p)
        if not d:
            # zero derivative means g is a p-th power: g(x) = h(x^p) = h1(x)^p
            recurse(_poly_pth_root(g, p), e * p)
            return
        sqfree_part = poly_divmod(g, poly_gcd(g, d, p), p)[0]
        rest = g
        for irr in _factor_squarefree(sqfree_part, p):
            count = 0
            while True:
                q, r = poly_divmod(rest, irr, p)
                if r:
                    break
                rest = q
                count += 1
            if count:
                add_factor(irr, e * count)
        # rest collects the irreducibles whose multiplicity is divisible by p
        recurse(rest, e)

    recurse(f, 1)
    out = [(list(k), e) for k, e in mult.items()]
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return out


def min_poly(a, p: int) -> list[int]:
    """Monic minimal polynomial of a square matrix over F_p.

    Computed as the lcm of the minimal annihilators of the Krylov sequences of
    the standard basis vectors; vectors already inside the span of processed
    Krylov chains are skipped.  Dependence within a chain is detected by
    incremental echelon reduction carrying coordinate bookkeeping, so each
    chain step costs one pass over the stored echelon rows.

    Raises:
        ValueError: if the matrix is not square.
    """
    A = as_fp_matrix(a, p)
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise ValueError("min_poly requires a square matrix")
    if n == 0:
        return [1]
    result = [1]
    # Echelon rows (lead index -> unit-lead vector) spanning processed chains.
    accumulated: dict[int, np.ndarray] = {}

    def reduce_vec(v: np.ndarray, ech: dict[int, np.ndarray]) -> np.ndarray:
        v = v % p
        for lead in sorted(ech):
            if v[lead]:
                v = (v - v[lead] * ech[lead]) % p
        return v

    for start in range(n):
        v0 = np.zeros(n, dtype=np.int64)
        v0[start] = 1
        if not np.any(reduce_vec(v0, accumulated)):
            continue
        # chain echelon: lead -> (vector, coords) with coords over chain powers
        chain: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        w = v0
        k = 0
        while True:
            r = w % p
            c = np.zeros(n + 1, dtype=np.int64)
            c[k] = 1
            for lead in sorted(chain):
                if r[lead]:
                    row, rowc = chain[lead]
                    f = r[lead]
                    r = (r - f * row) % p
                    c = (c - f * rowc) % p
            if not np.any(r):
                break
            lead = int(np.argmax(r != 0))
            inv = _inv_mod(r[lead], p)
            chain[lead] = ((r * inv) % p, (c * inv) % p)
            k += 1
            w = (A @ w) % p
        # c encodes sum_i c_i A^i v0 = 0 with c_k = 1: a monic annihilator.
        ann = poly_trim([int(c[i]) for i in range(k + 1)])
        result = poly_lcm(result, ann, p)
        for lead, (row, _) in chain.items():
            rrow = reduce_vec(row, accumulated)
            if np.any(rrow):
                l2 = int(np.argmax(rrow != 0))
                accumulated[l2] = (rrow * _inv_mod(rrow[l2], p)) % p
        if poly_deg(result) == n:
            break
    return result
