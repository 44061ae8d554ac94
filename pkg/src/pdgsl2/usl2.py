"""Graded modules over the restricted enveloping algebra of sl(2) in odd
characteristic p.

A ``GradedUModule`` stores the actions E, F, H of the lowering, raising, and
Cartan operators on a bigraded F_p vector space (q-degree and an auxiliary
t-degree).  Conventions:

- [H,E] = 2E, [H,F] = -2F, [E,F] = H; E^p = F^p = 0, H^p = H.
- E lowers q-degree by 2, F raises it by 2, both preserve t-degree.
- The catalog constructors put the generator of Delta(lam) / Nabla(lam) in
  q-degree -lam, so H equals minus the q-degree on them exactly; a general
  module (e.g. a q-shifted one) only satisfies that mod p, and validation
  checks it only under ``strict_weights=True``.

The catalog covers simples L, baby Vermas Delta, dual baby Vermas Nabla,
projective-injective covers P, and the Steinberg module St = L(p-1) =
Delta(p-1) = Nabla(p-1).  ``decompose`` splits a module into indecomposables
by factoring minimal polynomials of degree-0 endomorphisms and labels
summands against the catalog via explicit isomorphisms.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from . import fpcore as fp
from .fpcore import ensure_prime

__all__ = [
    "GradedUModule",
    "UValidationReport",
    "validate",
    "make_simple",
    "make_verma",
    "make_dual_verma",
    "make_projective",
    "make_steinberg",
    "dual",
    "cartan_twist",
    "shift",
    "direct_sum",
    "tensor",
    "submodule_generated",
    "quotient",
    "hom_basis",
    "module_character",
    "Summand",
    "decompose",
    "iso_test",
    "filtration",
    "is_projective_injective",
    "acyclicity_check",
    "steinberg_multiplicity",
    "GradedDimension",
    "gdim",
    "UnimodalityReport",
    "unimodality_check",
    "ModuleLabel",
    "module_to_json",
    "module_from_json",
]


def _ensure_odd_prime(p: int) -> None:
    ensure_prime(p)
    if p < 3:
        raise ValueError("the enveloping-algebra layer requires p >= 3")


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------


@dataclass
class GradedUModule:
    """Bigraded module over the restricted enveloping algebra of sl(2)."""

    p: int
    qdeg: list[int]
    tdeg: list[int]
    E: np.ndarray
    F: np.ndarray
    H: np.ndarray

    def __post_init__(self) -> None:
        _ensure_odd_prime(self.p)
        self.qdeg = [int(q) for q in self.qdeg]
        self.tdeg = [int(t) for t in self.tdeg]
        n = len(self.qdeg)
        if len(self.tdeg) != n:
            raise ValueError("qdeg and tdeg lengths differ")
        self.E = fp.as_fp_matrix(self.E, self.p)
        self.F = fp.as_fp_matrix(self.F, self.p)
        self.H = fp.as_fp_matrix(self.H, self.p)
        for name, m in (("E", self.E), ("F", self.F), ("H", self.H)):
            if m.shape != (n, n):
                raise ValueError(f"{name} must be {n}x{n}")

    @property
    def dim(self) -> int:
        return len(self.qdeg)


def module_character(m: GradedUModule) -> dict[tuple[int, int], int]:
    """{(tdeg, qdeg): multiplicity} of the underlying bigraded space."""
    out: dict[tuple[int, int], int] = {}
    for t, q in zip(m.tdeg, m.qdeg):
        out[(t, q)] = out.get((t, q), 0) + 1
    return dict(sorted(out.items()))


@dataclass
class UValidationReport:
    ok: bool
    failures: list[str] = field(default_factory=list)


def _check_degree(m: np.ndarray, qdeg, tdeg, dq: int, label: str) -> list[str]:
    fails = []
    for (r, c), v in np.ndenumerate(m):
        if v and (qdeg[r] != qdeg[c] + dq or tdeg[r] != tdeg[c]):
            fails.append(
                f"{label}[{r},{c}]={v} sends (t,q)=({tdeg[c]},{qdeg[c]}) to "
                f"({tdeg[r]},{qdeg[r]}), expected q-shift {dq:+d}"
            )
    return fails


def validate(m: GradedUModule, strict_weights: bool = False) -> UValidationReport:
    """Check the sl(2) relations, restrictedness, and grading behavior.

    ``strict_weights=True`` additionally demands H = diag(-qdeg mod p), which
    holds for the unshifted catalog modules but not for general q-shifts.
    """
    p, n = m.p, m.dim
    fails: list[str] = []

    def br(a, b):
        return (a @ b - b @ a) % p

    if not np.array_equal(br(m.H, m.E), (2 * m.E) % p):
        fails.append("[H,E] != 2E")
    if not np.array_equal(br(m.H, m.F), (-2 * m.F) % p):
        fails.append("[H,F] != -2F")
    if not np.array_equal(br(m.E, m.F), m.H):
        fails.append("[E,F] != H")
    if (np.linalg.matrix_power(m.E, p) % p).any():
        fails.append("E^p != 0")
    if (np.linalg.matrix_power(m.F, p) % p).any():
        fails.append("F^p != 0")
    if not np.array_equal(np.linalg.matrix_power(m.H, p) % p, m.H):
        fails.append("H^p != H")
    fails += _check_degree(m.E, m.qdeg, m.tdeg, -2, "E")
    fails += _check_degree(m.F, m.qdeg, m.tdeg, +2, "F")
    fails += _check_degree(m.H, m.qdeg, m.tdeg, 0, "H")
    if strict_weights:
        want = np.diag([(-q) % p for q in m.qdeg]).astype(np.int64) if n else m.H
        if not np.array_equal(m.H, want):
            fails.append("H is not minus the q-degree")
    return UValidationReport(ok=not fails, failures=fails)


# ---------------------------------------------------------------------------
# Catalog constructors
# ---------------------------------------------------------------------------


def _euclid(lam: int, p: int) -> tuple[int, int]:
    """lam = lam0 + p*lam1 with lam0 in [0, p)."""
    lam0 = lam % p
    return lam0, (lam - lam0) // p


def make_verma(p: int, lam: int) -> GradedUModule:
    """Baby Verma module Delta(lam) on u_0..u_{p-1}:
    E u_i = (lam-i+1) u_{i-1}, F u_i = (i+1) u_{i+1}, H u_i = (lam-2i) u_i,
    qdeg(u_i) = -lam + 2i."""
    _ensure_odd_prime(p)
    E = np.zeros((p, p), dtype=np.int64)
    F = np.zeros((p, p), dtype=np.int64)
    H = np.zeros((p, p), dtype=np.int64)
    for i in range(p):
        H[i, i] = (lam - 2 * i) % p
        if i > 0:
            E[i - 1, i] = (lam - i + 1) % p
        if i < p - 1:
            F[i + 1, i] = (i + 1) % p
    return GradedUModule(
        p=p, qdeg=[-lam + 2 * i for i in range(p)], tdeg=[0] * p, E=E, F=F, H=H
    )


def make_dual_verma(p: int, lam: int) -> GradedUModule:
    """Dual baby Verma module Nabla(lam) on v_0..v_{p-1}:
    E v_i = -i v_{i-1}, F v_i = (i-lam) v_{i+1}, H v_i = (lam-2i) v_i,
    qdeg(v_i) = -lam + 2i."""
    _ensure_odd_prime(p)
    E = np.zeros((p, p), dtype=np.int64)
    F = np.zeros((p, p), dtype=np.int64)
    H = np.zeros((p, p), dtype=np.int64)
    for i in range(p):
        H[i, i] = (lam - 2 * i) % p
        if i > 0:
            E[i - 1, i] = (-i) % p
        if i < p - 1:
            F[i + 1, i] = (i - lam) % p
    return GradedUModule(
        p=p, qdeg=[-lam + 2 * i for i in range(p)], tdeg=[0] * p, E=E, F=F, H=H
    )


def make_simple(p: int, lam: int) -> GradedUModule:
    """Simple module L(lam): for lam0 in [0, p-1] the (lam0+1)-dimensional
    quotient of Delta(lam0) by span(u_{lam0+1}, ..., u_{p-1}); in general
    L(lam) = q^{-p*lam1} L(lam0) by Euclidean division lam = lam0 + p*lam1."""
    _ensure_odd_prime(p)
    lam0, lam1 = _euclid(lam, p)
    delta = make_verma(p, lam0)
    if lam0 < p - 1:
        killed = np.zeros((p, p - 1 - lam0), dtype=np.int64)
        for k, i in enumerate(range(lam0 + 1, p)):
            killed[i, k] = 1
        base = quotient(delta, killed)
    else:
        base = delta
    return shift(base, qk=-p * lam1) if lam1 else base


def make_steinberg(p: int) -> GradedUModule:
    """The Steinberg module St = L(p-1)."""
    return make_simple(p, p - 1)


_P_CACHE: dict[tuple[int, int], GradedUModule] = {}


def make_projective(p: int, lam: int) -> GradedUModule:
    """Indecomposable projective-injective cover P(lam).

    For lam = lam0 + p*lam1: when lam0 = p-1 this degenerates to the shifted
    Steinberg simple q^{-p*lam1} St (dimension p); otherwise it is the
    2p-dimensional direct summand of L(p-1-lam0) (x) L(p-1) containing the
    unique highest-q-degree vector, shifted by q^{-p*lam1}.
    """
    _ensure_odd_prime(p)
    lam0, lam1 = _euclid(lam, p)
    if lam0 == p - 1:
        base = make_steinberg(p)
    else:
        key = (p, lam0)
        if key not in _P_CACHE:
            big = tensor(make_simple(p, p - 1 - lam0), make_steinberg(p))
            top = max(big.qdeg)
            chosen = None
            for s in _decompose_raw(big, seed=0):
                if max(s.module.qdeg) == top:
                    chosen = s.module
                    break
            assert chosen is not None, "tensor product lost its top vector"
            _P_CACHE[key] = chosen
        base = _P_CACHE[key]
    return shift(base, qk=-p * lam1) if lam1 else base


# ---------------------------------------------------------------------------
# Functors and constructions
# ---------------------------------------------------------------------------


def dual(m: GradedUModule) -> GradedUModule:
    """Grading-reversing dual: (x f)(v) = -f(x v); degrees negated."""
    return GradedUModule(
        p=m.p,
        qdeg=[-q for q in m.qdeg],
        tdeg=[-t for t in m.tdeg],
        E=(-m.E.T) % m.p,
        F=(-m.F.T) % m.p,
        H=(-m.H.T) % m.p,
    )


def cartan_twist(m: GradedUModule) -> GradedUModule:
    """Degree-reversing twist by the involution E <-> F, H -> -H."""
    return GradedUModule(
        p=m.p,
        qdeg=[-q for q in m.qdeg],
        tdeg=[-t for t in m.tdeg],
        E=m.F.copy(),
        F=m.E.copy(),
        H=(-m.H) % m.p,
    )


def shift(m: GradedUModule, qk: int = 0, tj: int = 0) -> GradedUModule:
    """Add qk to every q-degree and tj to every t-degree; actions unchanged."""
    return GradedUModule(
        p=m.p,
        qdeg=[q + qk for q in m.qdeg],
        tdeg=[t + tj for t in m.tdeg],
        E=m.E.copy(),
        F=m.F.copy(),
        H=m.H.copy(),
    )


def direct_sum(mods: list[GradedUModule]) -> GradedUModule:
    if not mods:
        raise ValueError("empty direct sum needs an explicit prime; pass one module")
    p = mods[0].p
    if any(m.p != p for m in mods):
        raise ValueError("direct sum across different primes")
    n = sum(m.dim for m in mods)
    E = np.zeros((n, n), dtype=np.int64)
    F = np.zeros((n, n), dtype=np.int64)
    H = np.zeros((n, n), dtype=np.int64)
    qdeg: list[int] = []
    tdeg: list[int] = []
    at = 0
    for m in mods:
        sl = slice(at, at + m.dim)
        E[sl, sl], F[sl, sl], H[sl, sl] = m.E, m.F, m.H
        qdeg += m.qdeg
        tdeg += m.tdeg
        at += m.dim
    return GradedUModule(p=p, qdeg=qdeg, tdeg=tdeg, E=E, F=F, H=H)


def tensor(m1: GradedUModule, m2: GradedUModule) -> GradedUModule:
    """Tensor product along x -> x(x)1 + 1(x)x; degrees add."""
    if m1.p != m2.p:
        raise ValueError("tensor across different primes")
    p = m1.p
    i1 = np.eye(m1.dim, dtype=np.int64)
    i2 = np.eye(m2.dim, dtype=np.int64)

    def act(a1, a2):
        return (np.kron(a1, i2) + np.kron(i1, a2)) % p

    return GradedUModule(
        p=p,
        qdeg=[q1 + q2 for q1 in m1.qdeg for q2 in m2.qdeg],
        tdeg=[t1 + t2 for t1 in m1.tdeg for t2 in m2.tdeg],
        E=act(m1.E, m2.E),
        F=act(m1.F, m2.F),
        H=act(m1.H, m2.H),
    )


def _grade_blocks(qdeg, tdeg) -> dict[tuple[int, int], list[int]]:
    blocks: dict[tuple[int, int], list[int]] = {}
    for i, (t, q) in enumerate(zip(tdeg, qdeg)):
        blocks.setdefault((t, q), []).append(i)
    return dict(sorted(blocks.items()))


def _homogeneous_column_basis(
    cols: np.ndarray, qdeg, tdeg, p
) -> tuple[np.ndarray, list[int], list[int]]:
    """Homogeneous basis of a graded subspace given by spanning columns.

    The subspace must be graded (spanned by its homogeneous pieces); each
    graded block contributes its projected column space.
    """
    n = len(qdeg)
    keep: list[np.ndarray] = []
    qs: list[int] = []
    ts: list[int] = []
    total = fp.rank(cols, p)
    for (t, q), ix in _grade_blocks(qdeg, tdeg).items():
        block = cols[ix, :]
        basis = fp.column_space_basis(block, p)
        for k in range(basis.shape[1]):
            v = np.zeros(n, dtype=np.int64)
            v[ix] = basis[:, k]
            keep.append(v)
            qs.append(q)
            ts.append(t)
    if len(keep) != total:
        raise ValueError("subspace is not graded")
    mat = np.stack(keep, axis=1) if keep else np.zeros((n, 0), dtype=np.int64)
    return mat, qs, ts


def _coords(basis: np.ndarray, vectors: np.ndarray, p: int) -> np.ndarray:
    cols = []
    for k in range(vectors.shape[1]):
        sol = fp.solve(basis, vectors[:, k], p)
        if sol is None:
            raise ValueError("vector escapes the subspace")
        cols.append(sol)
    if not cols:
        return np.zeros((basis.shape[1], 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def _submodule_with_embedding(
    m: GradedUModule, vectors
) -> tuple[GradedUModule, np.ndarray]:
    """Graded submodule generated by the homogeneous components of the given
    vectors, with its embedding matrix (columns = basis in ambient coords)."""
    p, n = m.p, m.dim
    vecs = np.asarray(vectors, dtype=np.int64) % p
    if vecs.ndim == 1:
        vecs = vecs.reshape(-1, 1)
    pieces: list[np.ndarray] = []
    for k in range(vecs.shape[1]):
        v = vecs[:, k]
        for (_, ix) in _grade_blocks(m.qdeg, m.tdeg).items():
            comp = np.zeros(n, dtype=np.int64)
            comp[ix] = v[ix]
            if comp.any():
                pieces.append(comp)
    if not pieces:
        empty = np.zeros((n, 0), dtype=np.int64)
        sub = GradedUModule(p=p, qdeg=[], tdeg=[], E=empty.T @ empty,
                            F=empty.T @ empty, H=empty.T @ empty)
        return sub, empty
    span = np.stack(pieces, axis=1)
    while True:
        grown = np.hstack(
            [span, (m.E @ span) % p, (m.F @ span) % p, (m.H @ span) % p]
        )
        if fp.rank(grown, p) == fp.rank(span, p):
            break
        span = fp.column_space_basis(grown, p)
    basis, qs, ts = _homogeneous_column_basis(
        fp.column_space_basis(span, p), m.qdeg, m.tdeg, p
    )
    sub = GradedUModule(
        p=p,
        qdeg=qs,
        tdeg=ts,
        E=_coords(basis, (m.E @ basis) % p, p),
        F=_coords(basis, (m.F @ basis) % p, p),
        H=_coords(basis, (m.H @ basis) % p, p),
    )
    return sub, basis


def submodule_generated(m: GradedUModule, vectors) -> GradedUModule:
    """The graded submodule generated by the given (columns of) vectors."""
    return _submodule_with_embedding(m, vectors)[0]


def quotient(m: GradedUModule, sub_basis) -> GradedUModule:
    """Quotient by an action-stable graded subspace (columns of sub_basis)."""
    p, n = m.p, m.dim
    sub = np.asarray(sub_basis, dtype=np.int64) % p
    if sub.ndim == 1:
        sub = sub.reshape(-1, 1)
    for name, a in (("E", m.E), ("F", m.F), ("H", m.H)):
        for k in range(sub.shape[1]):
            if fp.solve(sub, (a @ sub[:, k]) % p, p) is None:
                raise ValueError(f"subspace is not stable under {name}")
    sub_h, _, _ = _homogeneous_column_basis(sub, m.qdeg, m.tdeg, p)
    # complete to a homogeneous basis with standard vectors, per graded block
    comp_cols: list[np.ndarray] = []
    comp_q: list[int] = []
    comp_t: list[int] = []
    acc = sub_h
    for (t, q), ix in _grade_blocks(m.qdeg, m.tdeg).items():
        for i in ix:
            v = np.zeros(n, dtype=np.int64)
            v[i] = 1
            trial = np.hstack([acc, v.reshape(-1, 1)])
            if fp.rank(trial, p) > acc.shape[1]:
                acc = trial
                comp_cols.append(v)
                comp_q.append(q)
                comp_t.append(t)
    full = np.hstack([sub_h, np.stack(comp_cols, axis=1)]) if comp_cols else sub_h
    k = sub_h.shape[1]
    inv = fp.inverse(full, p)

    def induced(a):
        if not comp_cols:
            return np.zeros((0, 0), dtype=np.int64)
        image = (a @ full[:, k:]) % p
        return (inv @ image)[k:, :] % p

    return GradedUModule(
        p=p, qdeg=comp_q, tdeg=comp_t, E=induced(m.E), F=induced(m.F), H=induced(m.H)
    )


# ---------------------------------------------------------------------------
# Hom spaces
# ---------------------------------------------------------------------------


def hom_basis(
    m1: GradedUModule, m2: GradedUModule, degree: tuple[int, int] = (0, 0)
) -> list[np.ndarray]:
    """Basis of intertwiners m1 -> m2 of bidegree (qk, tj).

    A morphism T satisfies T E1 = E2 T (same for F, H) and raises (qdeg,
    tdeg) by exactly (qk, tj).  The constraints are solved exactly on the
    degree-allowed entries.
    """
    if m1.p != m2.p:
        raise ValueError("hom across different primes")
    p = m1.p
    qk, tj = degree
    positions = [
        (r, c)
        for c in range(m1.dim)
        for r in range(m2.dim)
        if m2.qdeg[r] == m1.qdeg[c] + qk and m2.tdeg[r] == m1.tdeg[c] + tj
    ]
    if not positions:
        return []
    pos_index = {rc: k for k, rc in enumerate(positions)}
    nunk = len(positions)
    rows: list[np.ndarray] = []
    for a1, a2 in ((m1.E, m2.E), (m1.F, m2.F), (m1.H, m2.H)):
        # sparse assembly: walk the nonzero action entries reachable from each
        # unknown T[r, c]; equation (i, j) collects (A2 T - T A1)[i, j]
        nz2_by_col: dict[int, list[tuple[int, int]]] = {}
        for (i, r), v in np.ndenumerate(a2):
            if v:
                nz2_by_col.setdefault(r, []).append((i, int(v)))
        nz1_by_row: dict[int, list[tuple[int, int]]] = {}
        for (c, j), v in np.ndenumerate(a1):
            if v:
                nz1_by_row.setdefault(c, []).append((j, int(v)))
        eqs: dict[tuple[int, int], dict[int, int]] = {}
        for (r, c), k in pos_index.items():
            for i, v in nz2_by_col.get(r, ()):  # (A2 T)[i, c] += v * T[r, c]
                cell = eqs.setdefault((i, c), {})
                cell[k] = (cell.get(k, 0) + v) % p
            for j, v in nz1_by_row.get(c, ()):  # (T A1)[r, j] += v * T[r, c]
                cell = eqs.setdefault((r, j), {})
                cell[k] = (cell.get(k, 0) - v) % p
        for cell in eqs.values():
            if any(cell.values()):
                row = np.zeros(nunk, dtype=np.int64)
                for k, v in cell.items():
                    row[k] = v
                rows.append(row)
    if rows:
        system = np.stack(rows, axis=0)
        null = fp.kernel_basis(system, p)
    else:
        null = np.eye(nunk, dtype=np.int64)
    out = []
    for k in range(null.shape[1]):
        T = np.zeros((m2.dim, m1.dim), dtype=np.int64)
        for (r, c), idx in pos_index.items():
            T[r, c] = null[idx, k]
        out.append(T)
    return out


def _is_intertwiner(T, m1, m2, degree=(0, 0)) -> bool:
    p = m1.p
    qk, tj = degree
    for (r, c), v in np.ndenumerate(T):
        if v and (m2.qdeg[r] != m1.qdeg[c] + qk or m2.tdeg[r] != m1.tdeg[c] + tj):
            return False
    return (
        not ((T @ m1.E - m2.E @ T) % p).any()
        and not ((T @ m1.F - m2.F @ T) % p).any()
        and not ((T @ m1.H - m2.H @ T) % p).any()
    )


def _find_iso(
    m1: GradedUModule, m2: GradedUModule, seed: int = 0, tries: int = 64
) -> np.ndarray | None:
    """Invertible degree-(0,0) intertwiner m1 -> m2, or None if not found."""
    if m1.dim != m2.dim:
        return None
    if module_character(m1) != module_character(m2):
        return None
    if m1.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    basis = hom_basis(m1, m2, (0, 0))
    if not basis:
        return None
    n = m1.dim
    p = m1.p

    def good(T):
        return fp.rank(T, p) == n

    for T in basis:
        if good(T):
            return T
    acc = np.zeros((n, n), dtype=np.int64)
    for T in basis:
        acc = (acc + T) % p
        if good(acc):
            return acc
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        coeffs = rng.integers(0, p, size=len(basis))
        T = np.zeros((n, n), dtype=np.int64)
        for c, B in zip(coeffs, basis):
            if c:
                T = (T + int(c) * B) % p
        if good(T):
            return T
    return None


# ---------------------------------------------------------------------------
# Decomposition into indecomposables
# ---------------------------------------------------------------------------


@dataclass
class Summand:
    module: GradedUModule
    embedding: np.ndarray
    label: "ModuleLabel | None" = None
    certified_indecomposable: bool = False


def _restrict_to_kernel(
    m: GradedUModule, op: np.ndarray
) -> tuple[GradedUModule, np.ndarray]:
    """Submodule ker(op) for op a degree-0 endomorphism commuting with the
    actions; returns (module, embedding)."""
    p = m.p
    ker = fp.kernel_basis(op, p)
    basis, qs, ts = _homogeneous_column_basis(ker, m.qdeg, m.tdeg, p)
    sub = GradedUModule(
        p=p,
        qdeg=qs,
        tdeg=ts,
        E=_coords(basis, (m.E @ basis) % p, p),
        F=_coords(basis, (m.F @ basis) % p, p),
        H=_coords(basis, (m.H @ basis) % p, p),
    )
    return sub, basis


def _locality_certificate(end_basis: list[np.ndarray], p: int, dim: int) -> bool:
    """True if the degree-0 endomorphism ring is local, certified by showing
    span{b_i - lam_i id} is a codimension-1 nil ideal.

    Each basis element must be a scalar plus nilpotent (minimal polynomial a
    power of x - lam); their span N must miss the identity, have codimension
    one, and be closed under products.  Then N is a nil ideal with quotient k.
    """
    if dim == 0:
        return True
    ident = np.eye(dim, dtype=np.int64)
    nils = []
    for b in end_basis:
        mp = fp.min_poly(b, p)
        factors = fp.factor_poly(mp, p)
        if len(factors) != 1 or fp.poly_deg(factors[0][0]) != 1:
            return False
        lin = factors[0][0]  # x + c, root -c
        lam = (-lin[0]) % p
        nils.append((b - lam * ident) % p)
    flat = np.stack([n.reshape(-1) for n in nils], axis=1)
    nil_rank = fp.rank(flat, p)
    if nil_rank != len(end_basis) - 1:
        return False
    if fp.solve(flat, ident.reshape(-1), p) is not None:
        return False
    for a in nils:
        for b in nils:
            prod = (a @ b) % p
            if fp.solve(flat, prod.reshape(-1), p) is None:
                return False
    return True


def _split_once(
    m: GradedUModule, endo: np.ndarray
) -> list[tuple[GradedUModule, np.ndarray]] | None:
    """Split m along the primary decomposition of one endomorphism, or None."""
    p = m.p
    mp = fp.min_poly(endo, p)
    factors = fp.factor_poly(mp, p)
    if len(factors) < 2:
        return None
    pieces = []
    for g, e in factors:
        ge = g
        for _ in range(e - 1):
            ge = fp.poly_mul(ge, g, p)
        # evaluate ge at endo
        acc = np.zeros((m.dim, m.dim), dtype=np.int64)
        power = np.eye(m.dim, dtype=np.int64)
        for coeff in ge:
            if coeff:
                acc = (acc + coeff * power) % p
            power = (power @ endo) % p
        pieces.append(_restrict_to_kernel(m, acc))
    assert sum(piece.dim for piece, _ in pieces) == m.dim
    return pieces


def _decompose_raw(
    m: GradedUModule, seed: int = 0, retries: int = 32
) -> list[Summand]:
    """Split into indecomposables; summands carry embeddings into m."""
    p = m.p
    if m.dim == 0:
        return []
    end_basis = hom_basis(m, m, (0, 0))
    ident = np.eye(m.dim, dtype=np.int64)
    candidates: list[np.ndarray] = [
        b for b in end_basis if not np.array_equal(b % p, ident)
    ]
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        coeffs = rng.integers(0, p, size=len(end_basis))
        T = np.zeros((m.dim, m.dim), dtype=np.int64)
        for c, B in zip(coeffs, end_basis):
            if c:
                T = (T + int(c) * B) % p
        candidates.append(T)
    for endo in candidates:
        pieces = _split_once(m, endo)
        if pieces is None:
            continue
        out: list[Summand] = []
        for piece, emb in pieces:
            for s in _decompose_raw(piece, seed=seed, retries=retries):
                out.append(
                    Summand(
                        module=s.module,
                        embedding=(emb @ s.embedding) % p,
                        certified_indecomposable=s.certified_indecomposable,
                    )
                )
        return out
    certified = _locality_certificate(end_basis, p, m.dim)
    return [Summand(module=m, embedding=ident, certified_indecomposable=certified)]


# ---------------------------------------------------------------------------
# Labels and the catalog matcher
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModuleLabel:
    """Canonical name q^qshift t^tshift kind(lam) with lam Euclidean-reduced."""

    kind: str  # 'L', 'Delta', 'Nabla', 'P', 'St'
    lam: int
    qshift: int = 0
    tshift: int = 0

    def render(self) -> str:
        parts = []
        if self.qshift:
            parts.append(f"q^{self.qshift}")
        if self.tshift:
            parts.append(f"t^{self.tshift}")
        parts.append("St" if self.kind == "St" else f"{self.kind}({self.lam})")
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "ModuleLabel":
        s = text.strip()
        qshift = tshift = 0
        mq = re.match(r"q\^(-?\d+)\s+", s)
        if mq:
            qshift = int(mq.group(1))
            s = s[mq.end():]
        mt = re.match(r"t\^(-?\d+)\s+", s)
        if mt:
            tshift = int(mt.group(1))
            s = s[mt.end():]
        if s == "St":
            return cls(kind="St", lam=-1, qshift=qshift, tshift=tshift)
        mk = re.fullmatch(r"(L|Delta|Nabla|P)\((-?\d+)\)", s)
        if not mk:
            raise ValueError(f"unparsable module label: {text!r}")
        return cls(kind=mk.group(1), lam=int(mk.group(2)), qshift=qshift, tshift=tshift)


def _build_from_label(p: int, label: ModuleLabel) -> GradedUModule:
    if label.kind == "L":
        base = make_simple(p, label.lam)
    elif label.kind == "Delta":
        base = make_verma(p, label.lam)
    elif label.kind == "Nabla":
        base = make_dual_verma(p, label.lam)
    elif label.kind == "P":
        base = make_projective(p, label.lam)
    elif label.kind == "St":
        base = make_steinberg(p)
    else:
        raise ValueError(f"unknown label kind {label.kind}")
    return shift(base, qk=label.qshift, tj=label.tshift)


def _label_summand(s: GradedUModule, seed: int = 0) -> ModuleLabel | None:
    p = s.p
    d = s.dim
    if d == 0 or len(set(s.tdeg)) != 1:
        return None
    t0 = s.tdeg[0]
    min_q = min(s.qdeg)
    candidates: list[ModuleLabel] = []
    if d == p:
        candidates.append(
            ModuleLabel(kind="St", lam=p - 1, qshift=min_q + (p - 1), tshift=t0)
        )
        for lam in range(p - 1):
            candidates.append(
                ModuleLabel(kind="Delta", lam=lam, qshift=min_q + lam, tshift=t0)
            )
            candidates.append(
                ModuleLabel(kind="Nabla", lam=lam, qshift=min_q + lam, tshift=t0)
            )
    elif d < p:
        candidates.append(
            ModuleLabel(kind="L", lam=d - 1, qshift=min_q + (d - 1), tshift=t0)
        )
    elif d == 2 * p:
        for lam in range(p - 1):
            candidates.append(
                ModuleLabel(
                    kind="P", lam=lam, qshift=min_q - (lam + 2 - 2 * p), tshift=t0
                )
            )
    for label in candidates:
        cand = _build_from_label(p, label)
        if module_character(cand) != module_character(s):
            continue
        if _find_iso(cand, s, seed=seed) is not None:
            return label
    return None


def decompose(m: GradedUModule, seed: int = 0) -> list[Summand]:
    """Split into indecomposables and label them against the catalog.

    Summands are sorted deterministically by (t-shift, dimension, character);
    unlabeled summands are legal (the catalog is not exhaustive).
    """
    summands = _decompose_raw(m, seed=seed)
    for s in summands:
        s.label = _label_summand(s.module, seed=seed)

    def key(s: Summand):
        return (
            min(s.module.tdeg) if s.module.dim else 0,
            s.module.dim,
            tuple(sorted(module_character(s.module).items())),
        )

    return sorted(summands, key=key)


def iso_test(m1: GradedUModule, m2: GradedUModule, seed: int = 0) -> np.ndarray | None:
    """Explicit graded isomorphism m1 -> m2, or None.

    Both modules are decomposed; summands are matched pairwise by explicit
    isomorphism search and the global map is reassembled and re-verified.
    """
    if m1.p != m2.p:
        return None
    if module_character(m1) != module_character(m2):
        return None
    p = m1.p
    if m1.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    direct = _find_iso(m1, m2, seed=seed)
    if direct is not None:
        return direct
    dec1 = decompose(m1, seed=seed)
    dec2 = decompose(m2, seed=seed)
    if len(dec1) != len(dec2):
        return None
    used = [False] * len(dec2)
    pairs: list[tuple[Summand, Summand, np.ndarray]] = []
    for s1 in dec1:
        found = False
        for j, s2 in enumerate(dec2):
            if used[j]:
                continue
            if module_character(s1.module) != module_character(s2.module):
                continue
            isom = _find_iso(s1.module, s2.module, seed=seed)
            if isom is not None:
                used[j] = True
                pairs.append((s1, s2, isom))
                found = True
                break
        if not found:
            return None
    u1 = np.hstack([s1.embedding for s1, _, _ in pairs])
    u2 = np.hstack([s2.embedding for _, s2, _ in pairs])
    blocks = np.zeros((m2.dim, m1.dim), dtype=np.int64)
    at_r = at_c = 0
    for s1, s2, isom in pairs:
        blocks[at_r : at_r + s2.module.dim, at_c : at_c + s1.module.dim] = isom
        at_r += s2.module.dim
        at_c += s1.module.dim
    T = (u2 @ blocks @ fp.inverse(u1, p)) % p
    if fp.rank(T, p) != m1.dim or not _is_intertwiner(T, m1, m2):
        return None
    return T


# ---------------------------------------------------------------------------
# Filtrations, projectivity, acyclicity
# ---------------------------------------------------------------------------


def _delta_filtration(m: GradedUModule) -> list[ModuleLabel] | None:
    """Greedy filtration by baby Vermas; labels carry (lam, qshift, tshift)."""
    p = m.p
    if m.dim == 0:
        return []
    if m.dim % p:
        return None
    current = m
    steps: list[ModuleLabel] = []
    while current.dim:
        fpow = np.linalg.matrix_power(current.F, p - 1) % p
        chosen = None
        for (t, q), ix in _grade_blocks(current.qdeg, current.tdeg).items():
            sub_e = current.E[:, ix]
            ker = fp.kernel_basis(sub_e, p)
            for k in range(ker.shape[1]):
                v = np.zeros(current.dim, dtype=np.int64)
                v[ix] = ker[:, k]
                if ((fpow @ v) % p).any():
                    chosen = (t, q, v)
                    break
            if chosen:
                break
        if chosen is None:
            return None
        t, q, v = chosen
        hv = (current.H @ v) % p
        pivots = np.nonzero(v)[0]
        lam_mod = int(hv[pivots[0]]) * pow(int(v[pivots[0]]), -1, p) % p
        if not np.array_equal(hv, (lam_mod * v) % p):
            return None
        chain = [v]
        for _ in range(p - 1):
            chain.append((current.F @ chain[-1]) % p)
        span = np.stack(chain, axis=1)
        if fp.rank(span, p) != p:
            return None
        # stability under E and H
        for a in (current.E, current.H):
            for k in range(p):
                if fp.solve(span, (a @ span[:, k]) % p, p) is None:
                    return None
        lam0 = lam_mod % p
        steps.append(
            ModuleLabel(kind="Delta", lam=lam0, qshift=q + lam0, tshift=t)
        )
        current = quotient(current, span)
    return steps


def filtration(m: GradedUModule, style: str) -> list[ModuleLabel] | None:
    """Filtration with baby Verma (style 'Delta') or dual baby Verma
    (style 'Nabla') subquotients; None if the greedy search gets stuck.

    The Nabla case filters the Cartan twist of the dual (which carries a
    Delta filtration with the same labels, in reverse order).
    """
    if style == "Delta":
        return _delta_filtration(m)
    if style == "Nabla":
        steps = _delta_filtration(cartan_twist(dual(m)))
        if steps is None:
            return None
        return [
            ModuleLabel(kind="Nabla", lam=s.lam, qshift=s.qshift, tshift=s.tshift)
            for s in reversed(steps)
        ]
    raise ValueError("style must be 'Delta' or 'Nabla'")


def is_projective_injective(m: GradedUModule) -> bool:
    """True iff m has a Nabla filtration and is free over k[F]/(F^p)."""
    p = m.p
    if m.dim % p:
        return False
    fpow = np.linalg.matrix_power(m.F, p - 1) % p
    if fp.rank(fpow, p) != m.dim // p:
        return False
    return filtration(m, "Nabla") is not None


def acyclicity_check(m: GradedUModule) -> bool:
    """Freeness over k[E]/(E^p): rank(E^{p-1}) = dim/p."""
    p = m.p
    if m.dim % p:
        return False
    epow = np.linalg.matrix_power(m.E, p - 1) % p
    return fp.rank(epow, p) == m.dim // p


def steinberg_multiplicity(m: GradedUModule, tdeg: int = 0) -> dict[int, int]:
    """{q-shift k: number of q^k t^tdeg St direct summands}.

    The count at shift k is the rank of the composition pairing
    Hom(St', m) x Hom(m, St') -> End(St') = k with St' = q^k t^tdeg St.
    """
    p = m.p
    st = make_steinberg(p)
    seen: set[int] = set()
    out: dict[int, int] = {}
    for t, q in zip(m.tdeg, m.qdeg):
        if t != tdeg:
            continue
        k = q + (p - 1)  # align the top weight of St with this vector
        if k in seen:
            continue
        seen.add(k)
        stk = shift(st, qk=k, tj=tdeg)
        ins = hom_basis(stk, m, (0, 0))
        outs = hom_basis(m, stk, (0, 0))
        if not ins or not outs:
            continue
        pairing = np.zeros((len(outs), len(ins)), dtype=np.int64)
        for a, g in enumerate(outs):
            for b, f in enumerate(ins):
                pairing[a, b] = ((g @ f) % p)[0, 0]
        r = fp.rank(pairing, p)
        if r:
            out[k] = r
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# Graded dimensions and unimodality
# ---------------------------------------------------------------------------


@dataclass
class GradedDimension:
    """Bigraded dimension: coefficient of t^j q^i at key (j, i), with the
    reduction folding q-exponents into [0, 2p)."""

    p: int
    coeffs: dict[tuple[int, int], int]

    @property
    def reduced(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for (j, i), c in self.coeffs.items():
            key = (j, i % (2 * self.p))
            out[key] = out.get(key, 0) + c
        return dict(sorted(out.items()))

    def render(self) -> str:
        return _render_poly(self.coeffs)

    def render_reduced(self) -> str:
        return _render_poly(self.reduced)


def _render_poly(coeffs: dict[tuple[int, int], int]) -> str:
    if not coeffs:
        return "0"
    terms = []
    for (j, i), c in sorted(coeffs.items()):
        if not c:
            continue
        factors = []
        if c != 1:
            factors.append(str(c))
        if j:
            factors.append(f"t^{j}")
        if i:
            factors.append(f"q^{i}")
        terms.append("*".join(factors) if factors else "1")
    return " + ".join(terms) if terms else "0"


def gdim(m: GradedUModule) -> GradedDimension:
    coeffs: dict[tuple[int, int], int] = {}
    for t, q in zip(m.tdeg, m.qdeg):
        coeffs[(t, q)] = coeffs.get((t, q), 0) + 1
    return GradedDimension(p=m.p, coeffs=dict(sorted(coeffs.items())))


@dataclass
class UnimodalityReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    table: dict[int, tuple[list[int], list[int]]] = field(default_factory=dict)


def unimodality_check(m: GradedUModule) -> UnimodalityReport:
    """Per t-degree: all even-residue coefficients of the folded graded
    dimension agree, and all odd-residue coefficients agree."""
    p = m.p
    reduced = gdim(m).reduced
    tvals = sorted({j for (j, _) in reduced})
    fails: list[str] = []
    table: dict[int, tuple[list[int], list[int]]] = {}
    for j in tvals:
        evens = [reduced.get((j, r), 0) for r in range(0, 2 * p, 2)]
        odds = [reduced.get((j, r), 0) for r in range(1, 2 * p, 2)]
        table[j] = (evens, odds)
        if len(set(evens)) > 1:
            fails.append(f"t-degree {j}: even residues {evens} are not all equal")
        if len(set(odds)) > 1:
            fails.append(f"t-degree {j}: odd residues {odds} are not all equal")
    return UnimodalityReport(ok=not fails, failures=fails, table=table)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def module_to_json(m: GradedUModule) -> str:
    obj = {
        "p": m.p,
        "qdeg": m.qdeg,
        "tdeg": m.tdeg,
        "E": m.E.tolist(),
        "F": m.F.tolist(),
        "H": m.H.tolist(),
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def module_from_json(text: str) -> GradedUModule:
    obj = json.loads(text)
    n = len(obj["qdeg"])

    def mat(rows):
        if not rows:
            return np.zeros((n, n), dtype=np.int64)
        return np.asarray(rows, dtype=np.int64)

    return GradedUModule(
        p=obj["p"],
        qdeg=obj["qdeg"],
        tdeg=obj["tdeg"],
        E=mat(obj["E"]),
        F=mat(obj["F"]),
        H=mat(obj["H"]),
    )
