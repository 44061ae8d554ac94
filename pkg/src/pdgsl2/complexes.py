"""Graded chain complexes with marked-point module structures, and their
reduction through the column-module idempotent.

A ``UChainComplex`` is a bounded complex of graded F_p vector spaces with a
degree-(+1) differential ``d_T`` that preserves q-degree.  Each ``BasePoint``
equips every term with a PdgModule structure (an x of q-degree +2 and a d of
q-degree -2 with d x - x d = -1, x^p = d^p = 0) commuting with ``d_T``.

``morita_reduce`` cuts the complex down to the image of the column-module
projector of a chosen base point, dividing every graded dimension pattern by
that of the rank-p column module; ``base_point_independence`` produces an
explicit degree-0 isomorphism of the complexes reduced at two different base
points that share the same d.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import fpcore as fp
from . import smash
from . import truncpoly as tp
from .fpcore import ensure_prime
from .smash import PdgModule

__all__ = [
    "BasePoint",
    "UChainComplex",
    "term_module",
    "ComplexValidationReport",
    "validate_complex",
    "graded_dims",
    "homology_graded_dims",
    "complex_to_json",
    "complex_from_json",
    "ReductionData",
    "morita_reduce",
    "reduce_chain_map",
    "ReducedTensorReport",
    "verify_unreduced_eq_reduced_tensor",
    "BasePointIndependenceReport",
    "base_point_independence",
    "trunc_complex",
    "unknot_complex",
    "unlink2_complex",
    "random_free_two_term_complex",
]


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------


@dataclass
class BasePoint:
    """Per-term (x, d) action matrices of one marked-point module structure."""

    x: list[np.ndarray]
    d: list[np.ndarray]


@dataclass
class UChainComplex:
    """Bounded complex of graded F_p spaces with optional marked-point data.

    ``ts`` lists consecutive t-degrees; ``qdegs[i]`` grades the basis of the
    i-th term; ``diffs[i]`` maps term i to term i+1.
    """

    p: int
    ts: list[int]
    qdegs: list[list[int]]
    diffs: list[np.ndarray]
    basepoints: list[BasePoint] = field(default_factory=list)

    def __post_init__(self) -> None:
        ensure_prime(self.p)
        self.ts = [int(t) for t in self.ts]
        self.qdegs = [[int(q) for q in qs] for qs in self.qdegs]
        self.diffs = [fp.as_fp_matrix(d, self.p) for d in self.diffs]
        for bp in self.basepoints:
            bp.x = [fp.as_fp_matrix(m, self.p) for m in bp.x]
            bp.d = [fp.as_fp_matrix(m, self.p) for m in bp.d]

    @property
    def num_terms(self) -> int:
        return len(self.ts)

    def term_dim(self, i: int) -> int:
        return len(self.qdegs[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, UChainComplex):
            return NotImplemented
        return (
            self.p == other.p
            and self.ts == other.ts
            and self.qdegs == other.qdegs
            and len(self.diffs) == len(other.diffs)
            and all(np.array_equal(a, b) for a, b in zip(self.diffs, other.diffs))
            and len(self.basepoints) == len(other.basepoints)
            and all(
                all(np.array_equal(a, b) for a, b in zip(u.x, v.x))
                and all(np.array_equal(a, b) for a, b in zip(u.d, v.d))
                for u, v in zip(self.basepoints, other.basepoints)
            )
        )


def term_module(c: UChainComplex, i: int, base_point: int) -> PdgModule:
    """The i-th term of the complex as a PdgModule at the given base point."""
    bp = c.basepoints[base_point]
    return PdgModule(p=c.p, qdeg=c.qdegs[i], x_action=bp.x[i], d_action=bp.d[i])


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class ComplexValidationReport:
    ok: bool
    failures: list[str] = field(default_factory=list)


def validate_complex(c: UChainComplex) -> ComplexValidationReport:
    """Check shapes, d_T^2 = 0, q-degree preservation, and base-point axioms."""
    fails: list[str] = []
    p = c.p
    if c.ts and c.ts != list(range(c.ts[0], c.ts[0] + len(c.ts))):
        fails.append("t-degrees are not consecutive")
    if len(c.diffs) != max(len(c.ts) - 1, 0):
        fails.append(
            f"expected {max(len(c.ts) - 1, 0)} differentials, got {len(c.diffs)}"
        )
        return ComplexValidationReport(ok=False, failures=fails)
    for i, d in enumerate(c.diffs):
        if d.shape != (c.term_dim(i + 1), c.term_dim(i)):
            fails.append(f"differential {i} has shape {d.shape}")
            return ComplexValidationReport(ok=False, failures=fails)
        for (r, col), v in np.ndenumerate(d):
            if v and c.qdegs[i + 1][r] != c.qdegs[i][col]:
                fails.append(
                    f"differential {i} entry ({r},{col}) changes q-degree"
                )
    for i in range(len(c.diffs) - 1):
        if ((c.diffs[i + 1] @ c.diffs[i]) % p).any():
            fails.append(f"d_T^2 != 0 between terms {i} and {i + 2}")
    for b, bp in enumerate(c.basepoints):
        if len(bp.x) != c.num_terms or len(bp.d) != c.num_terms:
            fails.append(f"base point {b} does not cover every term")
            continue
        for i in range(c.num_terms):
            rep = smash.validate_pdg_module(term_module(c, i, b))
            if not rep.ok:
                fails.append(
                    f"base point {b}, term {i}: " + "; ".join(rep.failures)
                )
        for i, d in enumerate(c.diffs):
            if ((d @ bp.x[i] - bp.x[i + 1] @ d) % p).any():
                fails.append(f"base point {b}: x does not commute with d_T at {i}")
            if ((d @ bp.d[i] - bp.d[i + 1] @ d) % p).any():
                fails.append(f"base point {b}: d does not commute with d_T at {i}")
    return ComplexValidationReport(ok=not fails, failures=fails)


# ---------------------------------------------------------------------------
# Graded dimensions and homology
# ---------------------------------------------------------------------------


def graded_dims(c: UChainComplex) -> dict[int, dict[int, int]]:
    """{t: {q: dim}} of the underlying graded spaces."""
    return {
        t: dict(sorted(Counter(qs).items()))
        for t, qs in zip(c.ts, c.qdegs)
    }


def _graded_rank(d: np.ndarray, src_q: list[int], dst_q: list[int], q: int, p: int) -> int:
    cols = [j for j, qq in enumerate(src_q) if qq == q]
    rows = [i for i, qq in enumerate(dst_q) if qq == q]
    if not cols or not rows:
        return 0
    return fp.rank(d[np.ix_(rows, cols)], p)


def homology_graded_dims(c: UChainComplex) -> dict[int, dict[int, int]]:
    """{t: {q: dim H}} computed blockwise per q-degree; zero entries omitted."""
    out: dict[int, dict[int, int]] = {}
    for i, t in enumerate(c.ts):
        per_q: dict[int, int] = {}
        for q in sorted(set(c.qdegs[i])):
            n_q = c.qdegs[i].count(q)
            rk_out = (
                _graded_rank(c.diffs[i], c.qdegs[i], c.qdegs[i + 1], q, c.p)
                if i < len(c.diffs)
                else 0
            )
            rk_in = (
                _graded_rank(c.diffs[i - 1], c.qdegs[i - 1], c.qdegs[i], q, c.p)
                if i > 0
                else 0
            )
            h = n_q - rk_out - rk_in
            if h:
                per_q[q] = h
        out[t] = per_q
    return out


# ---------------------------------------------------------------------------
# JSON serialization (canonical, byte-stable)
# ---------------------------------------------------------------------------


def complex_to_json(c: UChainComplex) -> str:
    obj = {
        "p": c.p,
        "terms": [
            {"t": t, "qdeg": qs} for t, qs in zip(c.ts, c.qdegs)
        ],
        "differentials": [d.tolist() for d in c.diffs],
        "basepoints": [
            {"x": [m.tolist() for m in bp.x], "d": [m.tolist() for m in bp.d]}
            for bp in c.basepoints
        ],
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def complex_from_json(text: str) -> UChainComplex:
    obj = json.loads(text)
    p = obj["p"]
    ts = [term["t"] for term in obj["terms"]]
    qdegs = [term["qdeg"] for term in obj["terms"]]
    dims = [len(qs) for qs in qdegs]

    def as_matrix(rows, shape):
        if not rows:
            return np.zeros(shape, dtype=np.int64)
        return np.asarray(rows, dtype=np.int64)

    diffs = [
        as_matrix(rows, (dims[i + 1], dims[i]))
        for i, rows in enumerate(obj["differentials"])
    ]
    bps = [
        BasePoint(
            x=[as_matrix(m, (dims[i], dims[i])) for i, m in enumerate(bp["x"])],
            d=[as_matrix(m, (dims[i], dims[i])) for i, m in enumerate(bp["d"])],
        )
        for bp in obj.get("basepoints", [])
    ]
    return UChainComplex(p=p, ts=ts, qdegs=qdegs, diffs=diffs, basepoints=bps)


# ---------------------------------------------------------------------------
# Reduction at a base point
# ---------------------------------------------------------------------------


@dataclass
class ReductionData:
    """Homogeneous bases (as column matrices, one per term) of the projector
    images used to present the reduced complex."""

    base_point: int
    bases: list[np.ndarray]


def _coords_in_basis(basis: np.ndarray, vectors: np.ndarray, p: int) -> np.ndarray:
    """Solve basis @ Z = vectors column by column; raises if inconsistent."""
    cols = []
    for k in range(vectors.shape[1]):
        sol = fp.solve(basis, vectors[:, k], p)
        if sol is None:
            raise ValueError("vector does not lie in the span of the basis")
        cols.append(sol)
    if not cols:
        return np.zeros((basis.shape[1], 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def morita_reduce(
    c: UChainComplex, base_point: int = 0
) -> tuple[UChainComplex, ReductionData]:
    """The complex cut down to the column-projector image of one base point.

    Every term is replaced by im(P) where P is the evaluated preimage of the
    matrix unit E_11 (equal to ker of that base point's d), with the induced
    differential in the extracted homogeneous basis.
    """
    bases: list[np.ndarray] = []
    qdegs: list[list[int]] = []
    for i in range(c.num_terms):
        m = term_module(c, i, base_point)
        rep = smash.validate_pdg_module(m)
        if not rep.ok:
            raise ValueError(
                f"term {i} is not a valid module at base point {base_point}: "
                + "; ".join(rep.failures)
            )
        P = smash.column_projector_matrix(m)
        basis, degs = smash.homogeneous_image_basis(P, c.qdegs[i], c.p)
        if basis.shape[1] != c.term_dim(i) // c.p:
            raise ValueError(
                f"term {i}: projector image rank {basis.shape[1]} != dim/p"
            )
        bases.append(basis)
        qdegs.append(degs)
    diffs = []
    for i, d in enumerate(c.diffs):
        image = (d @ bases[i]) % c.p
        diffs.append(_coords_in_basis(bases[i + 1], image, c.p))
    reduced = UChainComplex(p=c.p, ts=list(c.ts), qdegs=qdegs, diffs=diffs)
    return reduced, ReductionData(base_point=base_point, bases=bases)


def reduce_chain_map(
    maps: list[np.ndarray],
    src: ReductionData,
    dst: ReductionData,
    p: int,
) -> list[np.ndarray]:
    """Restrict a per-term chain map to the reduced presentations.

    The map must send the source projector image into the destination one
    (automatic for maps commuting with the base-point actions).
    """
    out = []
    for f, bs, bd in zip(maps, src.bases, dst.bases):
        out.append(_coords_in_basis(bd, (fp.as_fp_matrix(f, p) @ bs) % p, p))
    return out


# ---------------------------------------------------------------------------
# Comparison checks
# ---------------------------------------------------------------------------


@dataclass
class ReducedTensorReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    unreduced_dims: dict[int, dict[int, int]] = field(default_factory=dict)
    reduced_dims: dict[int, dict[int, int]] = field(default_factory=dict)
    unreduced_homology: dict[int, dict[int, int]] = field(default_factory=dict)
    reduced_homology: dict[int, dict[int, int]] = field(default_factory=dict)


def _tensor_with_column_dims(
    dims: dict[int, dict[int, int]], p: int
) -> dict[int, dict[int, int]]:
    """Multiply a {t: {q: dim}} table by the graded dimension of the column
    module (one basis vector in each q-degree 0, 2, ..., 2(p-1))."""
    out: dict[int, dict[int, int]] = {}
    for t, per_q in dims.items():
        acc: Counter = Counter()
        for q, dim in per_q.items():
            for j in range(p):
                acc[q + 2 * j] += dim
        out[t] = dict(sorted(acc.items()))
    return out


def verify_unreduced_eq_reduced_tensor(
    c: UChainComplex, base_point: int = 0
) -> ReducedTensorReport:
    """Check gdim(C) = gdim(C-reduced) * gdim(column module), termwise and in
    homology."""
    reduced, _ = morita_reduce(c, base_point)
    fails: list[str] = []
    u_dims = graded_dims(c)
    r_dims = graded_dims(reduced)
    if u_dims != _tensor_with_column_dims(r_dims, c.p):
        fails.append("termwise graded dimensions do not match the product")
    u_h = homology_graded_dims(c)
    r_h = homology_graded_dims(reduced)
    if u_h != _tensor_with_column_dims(r_h, c.p):
        fails.append("homology graded dimensions do not match the product")
    return ReducedTensorReport(
        ok=not fails,
        failures=fails,
        unreduced_dims=u_dims,
        reduced_dims=r_dims,
        unreduced_homology=u_h,
        reduced_homology=r_h,
    )


@dataclass
class BasePointIndependenceReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    isos: list[np.ndarray] = field(default_factory=list)
    reduced_first: UChainComplex | None = None
    reduced_second: UChainComplex | None = None


def base_point_independence(
    c: UChainComplex, first: int = 0, second: int = 1
) -> BasePointIndependenceReport:
    """Reduce at two base points sharing one d and produce an explicit
    degree-0 isomorphism of chain complexes between the results.

    Preconditions checked: both base points are valid module structures whose
    d actions agree termwise and whose x actions commute termwise.  Both
    projector images then coincide with ker(d) termwise; the isomorphism is
    the change of basis between the two extracted presentations.
    """
    p = c.p
    fails: list[str] = []
    bp1, bp2 = c.basepoints[first], c.basepoints[second]
    for i in range(c.num_terms):
        if not np.array_equal(bp1.d[i], bp2.d[i]):
            fails.append(f"term {i}: the two base points have different d actions")
        if ((bp1.x[i] @ bp2.x[i] - bp2.x[i] @ bp1.x[i]) % p).any():
            fails.append(f"term {i}: the two x actions do not commute")
    if fails:
        return BasePointIndependenceReport(ok=False, failures=fails)
    red1, data1 = morita_reduce(c, first)
    red2, data2 = morita_reduce(c, second)
    isos: list[np.ndarray] = []
    for i in range(c.num_terms):
        b1, b2 = data1.bases[i], data2.bases[i]
        joint = np.hstack([b1, b2])
        if fp.rank(joint, p) != b1.shape[1]:
            fails.append(f"term {i}: projector images differ as subspaces")
            continue
        M = _coords_in_basis(b2, b1, p)
        try:
            fp.inverse(M, p)
        except ValueError:
            fails.append(f"term {i}: change of basis is singular")
            continue
        for (r, col), v in np.ndenumerate(M):
            if v and red2.qdegs[i][r] != red1.qdegs[i][col]:
                fails.append(f"term {i}: change of basis is not degree 0")
                break
        isos.append(M)
    if not fails:
        for i in range(len(c.diffs)):
            lhs = (red2.diffs[i] @ isos[i]) % p
            rhs = (isos[i + 1] @ red1.diffs[i]) % p
            if not np.array_equal(lhs, rhs):
                fails.append(f"isomorphism is not a chain map at term {i}")
    return BasePointIndependenceReport(
        ok=not fails,
        failures=fails,
        isos=isos,
        reduced_first=red1,
        reduced_second=red2,
    )


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def trunc_complex(p: int, n: int) -> UChainComplex:
    """One-term complex on k[x_1..x_n]/(x_i^p) with one base point per
    variable, all sharing the total lowering operator as d."""
    alg = tp.TruncAlgebra(p, n)
    qdeg = [2 * sum(e) for e in alg.basis_exponents()]
    d = tp.witt_matrix("d_minus", p, n)
    bps = []
    for i in range(n):
        x = tp.multiplication_matrix(alg.gen(i))
        bps.append(BasePoint(x=[x], d=[d]))
    return UChainComplex(p=p, ts=[0], qdegs=[qdeg], diffs=[], basepoints=bps)


def unknot_complex(p: int) -> UChainComplex:
    """The one-term complex of the unreduced invariant of one circle."""
    return trunc_complex(p, 1)


def unlink2_complex(p: int) -> UChainComplex:
    """The one-term complex of two split circles, with both base points."""
    return trunc_complex(p, 2)


def random_free_two_term_complex(
    p: int,
    rng: np.random.Generator | int,
    max_rank: int = 2,
) -> UChainComplex:
    """A random two-term complex of free k[x_1,x_2]/(x_i^p)-modules with an
    equivariant differential.

    The differential's entries multiply by homogeneous polynomials in
    y = x_1 - x_2 (the kernel of the shared d), which is exactly the
    commutant condition with both base point structures.
    """
    if isinstance(rng, int):
        rng = np.random.default_rng(rng)
    alg = tp.TruncAlgebra(p, 2)
    dim = alg.dim
    mono_q = [2 * sum(e) for e in alg.basis_exponents()]
    r0 = int(rng.integers(1, max_rank + 1))
    r1 = int(rng.integers(1, max_rank + 1))
    shifts0 = sorted(int(rng.integers(0, 3)) * 2 for _ in range(r0))
    shifts1 = sorted(
        shifts0[int(rng.integers(0, r0))] - 2 * int(rng.integers(0, p))
        for _ in range(r1)
    )
    y = alg.gen(0) - alg.gen(1)
    ypow = [alg.one()]
    for _ in range(p - 1):
        ypow.append(ypow[-1] * y)
    d01 = np.zeros((r1 * dim, r0 * dim), dtype=np.int64)
    for r in range(r1):
        for ccol in range(r0):
            k2 = shifts0[ccol] - shifts1[r]
            if k2 < 0 or k2 % 2 or k2 // 2 >= p:
                continue
            coeff = int(rng.integers(0, p))
            if not coeff:
                continue
            block = tp.multiplication_matrix(coeff * ypow[k2 // 2])
            d01[r * dim : (r + 1) * dim, ccol * dim : (ccol + 1) * dim] = block
    def blockdiag(mat: np.ndarray, r: int) -> np.ndarray:
        out = np.zeros((r * dim, r * dim), dtype=np.int64)
        for b in range(r):
            out[b * dim : (b + 1) * dim, b * dim : (b + 1) * dim] = mat
        return out

    dmat = tp.witt_matrix("d_minus", p, 2)
    x1 = tp.multiplication_matrix(alg.gen(0))
    x2 = tp.multiplication_matrix(alg.gen(1))
    qdegs = [
        [s + q for s in shifts0 for q in mono_q],
        [s + q for s in shifts1 for q in mono_q],
    ]
    bps = [
        BasePoint(x=[blockdiag(x1, r0), blockdiag(x1, r1)],
                  d=[blockdiag(dmat, r0), blockdiag(dmat, r1)]),
        BasePoint(x=[blockdiag(x2, r0), blockdiag(x2, r1)],
                  d=[blockdiag(dmat, r0), blockdiag(dmat, r1)]),
    ]
    return UChainComplex(
        p=p, ts=[0, 1], qdegs=qdegs, diffs=[d01], basepoints=bps
    )
