"""The smash product B = k[x]/(x^p) # k[d]/(d^p) and its module theory.

``d`` is the lowering operator d_minus = -d/dx, so the defining relation is
d*a = a*d + d_minus(a); on generators, d*x - x*d = -1.  B is isomorphic to the
p x p matrix algebra via its action on the column module V = B-orbit of a
vector v_0 killed by d, with basis (v_0, x v_0, ..., x^{p-1} v_0) and
qdeg(x^i v_0) = 2i.

A ``PdgModule`` is a finite dimensional graded module over B: commuting data
(x_action, d_action) with x^p = 0, d^p = 0, d x - x d = -identity, x of
q-degree +2 and d of q-degree -2.  Every valid PdgModule splits as a direct
sum of grading shifts of V; ``decompose_pdg_module`` constructs the splitting
explicitly through the preimage of the matrix unit E_11 under the matrix
algebra isomorphism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fpcore as fp
from .fpcore import ensure_prime

__all__ = [
    "SmashElement",
    "smash_basis_product",
    "phi_generator_matrices",
    "phi_matrix",
    "phi_linearization",
    "phi_preimage",
    "column_projector_element",
    "PdgModule",
    "column_module",
    "PdgValidationReport",
    "validate_pdg_module",
    "PdgDecomposition",
    "column_projector_matrix",
    "homogeneous_image_basis",
    "decompose_pdg_module",
    "slash_homology_dims",
    "is_acyclic_pdg",
    "FreenessReport",
    "free_over_trunc",
    "synthesize_dot_action",
]


# ---------------------------------------------------------------------------
# The smash product algebra
# ---------------------------------------------------------------------------


def _falling(c: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= c - i
    return out


def smash_basis_product(a: int, b: int, c: int, d: int, p: int) -> dict[tuple[int, int], int]:
    """Normal-ordered product (x^a d^b)(x^c d^d) as {(i, j): coeff}.

    Uses d^b x^c = sum_k C(b,k) d_minus^k(x^c) d^{b-k} with
    d_minus^k(x^c) = (-1)^k c(c-1)...(c-k+1) x^{c-k}; terms whose x-exponent
    or d-exponent reaches p are truncated away.
    """
    out: dict[tuple[int, int], int] = {}
    for k in range(0, min(b, c) + 1):
        coeff = (math.comb(b, k) * _falling(c, k) * (-1) ** k) % p
        i, j = a + c - k, b + d - k
        if coeff and i < p and j < p:
            out[(i, j)] = (out.get((i, j), 0) + coeff) % p
    return {k2: v for k2, v in out.items() if v}


class SmashElement:
    """An element of B with coefficient array coeffs[i, j] on the basis x^i d^j."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs):
        ensure_prime(p)
        c = np.mod(np.asarray(coeffs, dtype=np.int64), p)
        if c.shape != (p, p):
            raise ValueError(f"coefficient array must be {p}x{p}")
        self.p = p
        self.coeffs = c

    @classmethod
    def zero(cls, p: int) -> "SmashElement":
        return cls(p, np.zeros((p, p), dtype=np.int64))

    @classmethod
    def monomial(cls, p: int, i: int, j: int, coeff: int = 1) -> "SmashElement":
        c = np.zeros((p, p), dtype=np.int64)
        c[i, j] = coeff
        return cls(p, c)

    @classmethod
    def x(cls, p: int) -> "SmashElement":
        return cls.monomial(p, 1, 0)

    @classmethod
    def d(cls, p: int) -> "SmashElement":
        return cls.monomial(p, 0, 1)

    @classmethod
    def one(cls, p: int) -> "SmashElement":
        return cls.monomial(p, 0, 0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SmashElement)
            and self.p == other.p
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs.tobytes()))

    def __add__(self, other: "SmashElement") -> "SmashElement":
        self._check(other)
        return SmashElement(self.p, self.coeffs + other.coeffs)

    def __sub__(self, other: "SmashElement") -> "SmashElement":
        self._check(other)
        return SmashElement(self.p, self.coeffs - other.coeffs)

    def __rmul__(self, scalar: int) -> "SmashElement":
        return SmashElement(self.p, scalar * self.coeffs)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.__rmul__(other)
        self._check(other)
        p = self.p
        acc = np.zeros((p, p), dtype=np.int64)
        for (a, b), c1 in np.ndenumerate(self.coeffs):
            if not c1:
                continue
            for (cc, dd), c2 in np.ndenumerate(other.coeffs):
                if not c2:
                    continue
                for (i, j), v in smash_basis_product(a, b, cc, dd, p).items():
                    acc[i, j] += c1 * c2 * v
        return SmashElement(p, acc)

    def _check(self, other: "SmashElement") -> None:
        if self.p != other.p:
            raise ValueError("elements belong to smash products at different primes")

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def principal_degree(self) -> int | None:
        """deg(x^i d^j) = 2(i - j) if homogeneous, else None."""
        degs = {2 * (i - j) for (i, j), c in np.ndenumerate(self.coeffs) if c}
        return degs.pop() if len(degs) == 1 else None

    def __repr__(self) -> str:
        terms = [
            f"{c}*x^{i}*d^{j}" for (i, j), c in np.ndenumerate(self.coeffs) if c
        ]
        return f"SmashElement(p={self.p}, {' + '.join(terms) or '0'})"


# ---------------------------------------------------------------------------
# The matrix algebra isomorphism
# ---------------------------------------------------------------------------


def phi_generator_matrices(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Action matrices (X, D) of x and d on V in the ascending basis.

    Basis (v_0, x v_0, ..., x^{p-1} v_0), column-vector convention:
    X has ones on the subdiagonal; D is superdiagonal with D[i-1, i] = -i.
    """
    ensure_prime(p)
    X = np.zeros((p, p), dtype=np.int64)
    D = np.zeros((p, p), dtype=np.int64)
    for i in range(p - 1):
        X[i + 1, i] = 1
        D[i, i + 1] = (-(i + 1)) % p
    return X, D


def phi_matrix(elem: SmashElement, descending: bool = False) -> np.ndarray:
    """Matrix of ``elem`` acting on the column module V.

    With ``descending=True`` the basis is reversed to degree-descending order
    (x^{p-1} v_0, ..., v_0), the normalization in which the matrix-unit
    grading reads deg(E_ij) = 2(j - i).
    """
    p = elem.p
    X, D = phi_generator_matrices(p)
    xp = [np.eye(p, dtype=np.int64)]
    dp = [np.eye(p, dtype=np.int64)]
    for _ in range(p - 1):
        xp.append((xp[-1] @ X) % p)
        dp.append((dp[-1] @ D) % p)
    acc = np.zeros((p, p), dtype=np.int64)
    for (i, j), c in np.ndenumerate(elem.coeffs):
        if c:
            acc = (acc + c * (xp[i] @ dp[j])) % p
    if descending:
        acc = acc[::-1, ::-1]
    return acc


def phi_linearization(p: int) -> np.ndarray:
    """p^2 x p^2 matrix whose column (i*p + j) is phi(x^i d^j) flattened row-major."""
    cols = []
    for i in range(p):
        for j in range(p):
            cols.append(phi_matrix(SmashElement.monomial(p, i, j)).reshape(-1))
    return np.stack(cols, axis=1)


def phi_preimage(matrix, p: int) -> SmashElement | None:
    """The unique smash element mapping to ``matrix`` under phi, or None."""
    L = phi_linearization(p)
    target = fp.as_fp_matrix(matrix, p).reshape(-1)
    sol = fp.solve(L, target, p)
    if sol is None:
        return None
    return SmashElement(p, sol.reshape(p, p))


def column_projector_element(p: int) -> SmashElement:
    """The idempotent with phi image E_11 (projection onto the v_0 slot).

    It is supported on the diagonal basis elements x^j d^j only.
    """
    e11 = np.zeros((p, p), dtype=np.int64)
    e11[0, 0] = 1
    elem = phi_preimage(e11, p)
    assert elem is not None, "phi is bijective; E_11 must have a preimage"
    return elem


# ---------------------------------------------------------------------------
# PdgModules
# ---------------------------------------------------------------------------


@dataclass
class PdgModule:
    """A graded module over B: spaces with commuting-relation (x, d) actions.

    qdeg[i] is the q-degree of the i-th basis vector; x_action raises q-degree
    by 2, d_action lowers it by 2.
    """

    p: int
    qdeg: list[int]
    x_action: np.ndarray
    d_action: np.ndarray

    def __post_init__(self) -> None:
        ensure_prime(self.p)
        n = len(self.qdeg)
        self.qdeg = [int(q) for q in self.qdeg]
        self.x_action = fp.as_fp_matrix(self.x_action, self.p)
        self.d_action = fp.as_fp_matrix(self.d_action, self.p)
        for name, m in (("x_action", self.x_action), ("d_action", self.d_action)):
            if m.shape != (n, n):
                raise ValueError(f"{name} must be {n}x{n} to match the grading list")

    @property
    def dim(self) -> int:
        return len(self.qdeg)


def column_module(p: int) -> PdgModule:
    """The canonical column module V with qdeg(x^i v_0) = 2i."""
    X, D = phi_generator_matrices(p)
    return PdgModule(p=p, qdeg=[2 * i for i in range(p)], x_action=X, d_action=D)


def _degree_homogeneous(m: np.ndarray, qdeg: list[int], shift: int, p: int) -> list[str]:
    """Entries of ``m`` violating homogeneity of degree ``shift`` (as messages)."""
    bad = []
    for (r, c), v in np.ndenumerate(np.mod(m, p)):
        if v and qdeg[r] != qdeg[c] + shift:
            bad.append(
                f"entry ({r},{c})={v} maps qdeg {qdeg[c]} to {qdeg[r]}, expected shift {shift:+d}"
            )
    return bad


@dataclass
class PdgValidationReport:
    ok: bool
    failures: list[str] = field(default_factory=list)


def validate_pdg_module(m: PdgModule) -> PdgValidationReport:
    """Check the defining relations and grading of a PdgModule."""
    p = m.p
    fails: list[str] = []
    xp = np.linalg.matrix_power(m.x_action, p) % p
    dp = np.linalg.matrix_power(m.d_action, p) % p
    if xp.any():
        fails.append("x_action^p != 0")
    if dp.any():
        fails.append("d_action^p != 0")
    comm = (m.d_action @ m.x_action - m.x_action @ m.d_action) % p
    if not np.array_equal(comm, (-np.eye(m.dim, dtype=np.int64)) % p):
        fails.append("d x - x d != -identity")
    fails += _degree_homogeneous(m.x_action, m.qdeg, +2, p)
    fails += _degree_homogeneous(m.d_action, m.qdeg, -2, p)
    return PdgValidationReport(ok=not fails, failures=fails)


@dataclass
class PdgDecomposition:
    """Splitting of a PdgModule into grading shifts of the column module.

    ``shifts`` lists the q-degrees of the extracted generators (sorted);
    ``basis`` is the invertible change of basis whose column blocks are
    (u, x u, ..., x^{p-1} u) for each generator u, so conjugating the actions
    by it yields block-diagonal copies of the column module.
    """

    p: int
    shifts: list[int]
    basis: np.ndarray
    generators: np.ndarray  # columns: the extracted v_0-slot vectors


def column_projector_matrix(m: PdgModule) -> np.ndarray:
    """The idempotent projecting onto the generator slots, in module coordinates.

    Evaluates the preimage of E_11 through the module's (x, d) actions; for a
    valid PdgModule its image is exactly ker(d_action).
    """
    p, n = m.p, m.dim
    proj = column_projector_element(p)
    dpows = [np.eye(n, dtype=np.int64)]
    for _ in range(p - 1):
        dpows.append((dpows[-1] @ m.d_action) % p)
    xpows = [np.eye(n, dtype=np.int64)]
    for _ in range(p - 1):
        xpows.append((xpows[-1] @ m.x_action) % p)
    P = np.zeros((n, n), dtype=np.int64)
    for (i, j), c in np.ndenumerate(proj.coeffs):
        if c:
            P = (P + c * (xpows[i] @ dpows[j])) % p
    return P


def homogeneous_image_basis(
    mat: np.ndarray, qdeg: list[int], p: int
) -> tuple[np.ndarray, list[int]]:
    """Homogeneous basis of the column space of a degree-0 operator.

    Returns (basis matrix with basis vectors as columns, their q-degrees);
    extraction runs per graded component in ascending q-degree with
    deterministic pivoting.
    """
    n = len(qdeg)
    gens: list[np.ndarray] = []
    degs: list[int] = []
    for q in sorted(set(qdeg)):
        ix = [i for i, qq in enumerate(qdeg) if qq == q]
        block = mat[np.ix_(ix, ix)]
        cols = fp.column_space_basis(block, p)
        for k in range(cols.shape[1]):
            v = np.zeros(n, dtype=np.int64)
            v[ix] = cols[:, k]
            gens.append(v)
            degs.append(q)
    basis = (
        np.stack(gens, axis=1) if gens else np.zeros((n, 0), dtype=np.int64)
    )
    return basis, degs


def decompose_pdg_module(m: PdgModule) -> PdgDecomposition:
    """Split a validated PdgModule as a direct sum of shifted column modules.

    Raises:
        ValueError: with a certificate message if the module invariants fail
            or the splitting does not verify.
    """
    report = validate_pdg_module(m)
    if not report.ok:
        raise ValueError("not a valid PdgModule: " + "; ".join(report.failures))
    p, n = m.p, m.dim
    if n % p:
        raise ValueError(f"dimension {n} is not divisible by p={p}")
    P = column_projector_matrix(m)
    xpows = [np.eye(n, dtype=np.int64)]
    for _ in range(p - 1):
        xpows.append((xpows[-1] @ m.x_action) % p)
    gen_mat, shifts = homogeneous_image_basis(P, m.qdeg, p)
    gens = [gen_mat[:, k] for k in range(gen_mat.shape[1])]
    if len(gens) != n // p:
        raise ValueError(
            f"projector image has rank {len(gens)}, expected dim/p = {n // p}"
        )
    blocks = []
    for v in gens:
        blocks.extend([(xpows[j] @ v) % p for j in range(p)])
    T = np.stack(blocks, axis=1)
    try:
        Tinv = fp.inverse(T, p)
    except ValueError as exc:
        raise ValueError(f"extracted chains do not form a basis: {exc}") from exc
    # certificate: conjugation puts both actions into block column-module form
    Xstd, Dstd = phi_generator_matrices(p)
    big_x = np.zeros((n, n), dtype=np.int64)
    big_d = np.zeros((n, n), dtype=np.int64)
    for b in range(n // p):
        sl = slice(b * p, (b + 1) * p)
        big_x[sl, sl] = Xstd
        big_d[sl, sl] = Dstd
    if not np.array_equal((Tinv @ m.x_action @ T) % p, big_x):
        raise ValueError("change of basis failed to normalize the x action")
    if not np.array_equal((Tinv @ m.d_action @ T) % p, big_d):
        raise ValueError("change of basis failed to normalize the d action")
    order = np.argsort(np.array(shifts), kind="stable")
    gens_arr = np.stack(gens, axis=1)[:, order]
    shifts_sorted = [shifts[i] for i in order]
    # reorder basis blocks to match sorted shifts
    blocks2 = []
    for b in order:
        blocks2.extend(range(b * p, (b + 1) * p))
    return PdgDecomposition(
        p=p, shifts=shifts_sorted, basis=T[:, blocks2], generators=gens_arr
    )


def slash_homology_dims(m: PdgModule) -> list[int]:
    """Dimensions of ker(d^k)/im(d^{p-k}) for k = 1..p-1.

    All of them vanish exactly when the module is free over k[d]/(d^p).
    """
    p, n = m.p, m.dim
    dims = []
    pows = [np.eye(n, dtype=np.int64)]
    for _ in range(p):
        pows.append((pows[-1] @ m.d_action) % p)
    for k in range(1, p):
        ker_dim = n - fp.rank(pows[k], p)
        im_dim = fp.rank(pows[p - k], p)
        dims.append(ker_dim - im_dim)
    return dims


def is_acyclic_pdg(m: PdgModule) -> bool:
    """Freeness over k[d]/(d^p), by the rank criterion rank(d^{p-1}) = dim/p."""
    p, n = m.p, m.dim
    if n % p:
        return False
    dpow = np.linalg.matrix_power(m.d_action, p - 1) % p
    return fp.rank(dpow, p) == n // p


# ---------------------------------------------------------------------------
# Freeness over truncated polynomial rings
# ---------------------------------------------------------------------------


@dataclass
class FreenessReport:
    ok: bool
    free: bool | None
    failures: list[str] = field(default_factory=list)
    rank_product_power: int | None = None
    expected_rank: int | None = None


def free_over_trunc(x_actions: list[np.ndarray], p: int, dim: int | None = None) -> FreenessReport:
    """Is the module free over k[x_1..x_m]/(x_i^p)?

    Criterion: rank((x_1 ... x_m)^{p-1}) == dim / p^m.  Preconditions (each
    x_i^p = 0 and the actions commute pairwise) are verified first; violations
    are reported with ``free=None``.
    """
    ensure_prime(p)
    fails: list[str] = []
    mats = [fp.as_fp_matrix(x, p) for x in x_actions]
    if not mats:
        raise ValueError("need at least one truncated variable action")
    n = mats[0].shape[0]
    if dim is not None and dim != n:
        raise ValueError("dim does not match action size")
    for i, x in enumerate(mats):
        if x.shape != (n, n):
            fails.append(f"x_{i + 1} has shape {x.shape}, expected {(n, n)}")
            return FreenessReport(ok=False, free=None, failures=fails)
        if (np.linalg.matrix_power(x, p) % p).any():
            fails.append(f"x_{i + 1}^p != 0")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if ((mats[i] @ mats[j] - mats[j] @ mats[i]) % p).any():
                fails.append(f"x_{i + 1} and x_{j + 1} do not commute")
    if fails:
        return FreenessReport(ok=False, free=None, failures=fails)
    m = len(mats)
    if n % (p ** m):
        return FreenessReport(
            ok=True, free=False,
            failures=[f"dimension {n} not divisible by p^{m}"],
            rank_product_power=None, expected_rank=None,
        )
    prod = np.eye(n, dtype=np.int64)
    for x in mats:
        prod = (prod @ x) % p
    top = np.linalg.matrix_power(prod, p - 1) % p
    rk = fp.rank(top, p)
    expected = n // (p ** m)
    return FreenessReport(
        ok=True, free=(rk == expected), failures=[],
        rank_product_power=rk, expected_rank=expected,
    )


def synthesize_dot_action(d_action: np.ndarray, qdeg: list[int], p: int) -> np.ndarray:
    """Build an x-action making (x, d) a valid PdgModule pair, given d free.

    Requires the d-action to be free over k[d]/(d^p) (rank(d^{p-1}) = dim/p).
    Homogeneous free generators g_i are extracted deterministically and x is
    defined by x(d^j g_i) = j d^{j-1} g_i, which satisfies d x - x d = -1,
    x^p = 0, and raises q-degree by 2.

    Raises:
        ValueError: if the d-action is not free.
    """
    ensure_prime(p)
    D = fp.as_fp_matrix(d_action, p)
    n = D.shape[0]
    if n % p or fp.rank(np.linalg.matrix_power(D, p - 1) % p, p) != n // p:
        raise ValueError("d action is not free over k[d]/(d^p)")
    # homogeneous generators: per q-degree, vectors spanning a complement of im(d)
    im_basis = fp.column_space_basis(D, p)
    gens: list[np.ndarray] = []
    accumulated = im_basis
    for q in sorted(set(qdeg), reverse=True):
        for i in [i for i, qq in enumerate(qdeg) if qq == q]:
            v = np.zeros(n, dtype=np.int64)
            v[i] = 1
            trial = np.hstack([accumulated, v.reshape(-1, 1)])
            if fp.rank(trial, p) > fp.rank(accumulated, p):
                gens.append(v)
                accumulated = trial
    if len(gens) != n // p:
        raise ValueError("failed to extract homogeneous free generators")
    cols = []
    for g in gens:
        chain = [g]
        for _ in range(p - 1):
            chain.append((D @ chain[-1]) % p)
        cols.extend(chain)
    T = np.stack(cols, axis=1)
    Tinv = fp.inverse(T, p)
    xs = np.zeros((n, n), dtype=np.int64)
    for b in range(n // p):
        for j in range(1, p):
            # x sends d^j g_b to j d^{j-1} g_b
            xs[b * p + j - 1, b * p + j] = j
    return (T @ xs @ Tinv) % p
