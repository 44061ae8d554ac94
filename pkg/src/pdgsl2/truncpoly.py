"""Truncated polynomial Frobenius algebras k[x_1..x_n]/(x_i^p) over F_p.

The one-variable algebra A = k[x]/(x^p) carries deg(x) = 2, the Frobenius
structure with comultiplication D(1) = sum_i x^i (x) x^{p-1-i} and counit
picking the x^{p-1} coefficient, and an action of the three special
differential operators

    d_minus = -d/dx          (degree -2, the lowering operator)
    d_zero  = -2 x d/dx      (degree  0, the weight operator)
    d_plus  = x^2 d/dx       (degree +2, the raising operator)

extended to tensor powers by the Leibniz rule.  ``apply_witt`` optionally
twists ``d_plus`` by +t_i x_i and ``d_zero`` by -t_i per variable, which is how
marked circles in the homology constructions carry their parameters.

Elements are sparse dicts mapping exponent tuples to residues; all arithmetic
truncates exponents at p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .fpcore import ensure_prime

__all__ = [
    "TruncAlgebra",
    "TruncPoly",
    "WITT_OPS",
    "apply_witt",
    "witt_matrix",
    "multiplication_matrix",
    "comultiply",
    "counit",
    "comultiplication_of_one",
    "FrobeniusCompatReport",
    "check_frobenius_compat",
]

WITT_OPS = ("d_minus", "d_zero", "d_plus")


@dataclass(frozen=True)
class TruncAlgebra:
    """The algebra k[x_1..x_n]/(x_1^p, ..., x_n^p) over F_p with deg(x_i) = 2."""

    p: int
    n: int

    def __post_init__(self) -> None:
        ensure_prime(self.p)
        if self.n < 1:
            raise ValueError(f"need at least one variable, got n={self.n}")

    @property
    def dim(self) -> int:
        return self.p ** self.n

    def zero(self) -> "TruncPoly":
        return TruncPoly(self, {})

    def one(self) -> "TruncPoly":
        return TruncPoly(self, {(0,) * self.n: 1})

    def gen(self, i: int = 0) -> "TruncPoly":
        """The generator x_{i+1} (0-indexed argument)."""
        if not 0 <= i < self.n:
            raise ValueError(f"variable index {i} out of range for n={self.n}")
        e = [0] * self.n
        e[i] = 1
        return TruncPoly(self, {tuple(e): 1})

    def monomial(self, exponents, coeff: int = 1) -> "TruncPoly":
        return TruncPoly(self, {tuple(int(e) for e in exponents): int(coeff)})

    def basis_exponents(self) -> list[tuple[int, ...]]:
        """All monomial exponent tuples in lexicographic order."""
        out: list[tuple[int, ...]] = []

        def rec(prefix: tuple[int, ...]) -> None:
            if len(prefix) == self.n:
                out.append(prefix)
                return
            for e in range(self.p):
                rec(prefix + (e,))

        rec(())
        return out

    def basis_index(self) -> dict[tuple[int, ...], int]:
        return {e: i for i, e in enumerate(self.basis_exponents())}

    def from_vector(self, v) -> "TruncPoly":
        exps = self.basis_exponents()
        return TruncPoly(self, {exps[i]: int(c) for i, c in enumerate(v) if int(c) % self.p})

    def element_from_terms(self, terms: dict[tuple[int, ...], int]) -> "TruncPoly":
        return TruncPoly(self, terms)


class TruncPoly:
    """A sparse element of a :class:`TruncAlgebra`.

    Terms with exponent >= p in any variable are dropped (truncation) and
    coefficients are reduced into [0, p); zero terms are removed.  Instances
    are value objects: equality and hashing use the normalized term dict.
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: TruncAlgebra, terms: dict[tuple[int, ...], int]):
        p, n = algebra.p, algebra.n
        norm: dict[tuple[int, ...], int] = {}
        for exps, c in terms.items():
            if len(exps) != n:
                raise ValueError(f"exponent tuple {exps} has wrong arity for n={n}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if any(e >= p for e in exps):
                continue  # truncated away
            c = int(c) % p
            if c:
                norm[tuple(int(e) for e in exps)] = (norm.get(tuple(exps), 0) + c) % p
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "terms", {e: c for e, c in norm.items() if c})

    # -- value semantics ----------------------------------------------------
    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TruncPoly)
            and self.algebra == other.algebra
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.algebra, tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        return f"TruncPoly(p={self.algebra.p}, n={self.algebra.n}, {self.render()!r})"

    # -- arithmetic ---------------------------------------------------------
    def _check_same(self, other: "TruncPoly") -> None:
        if self.algebra != other.algebra:
            raise ValueError("elements belong to different truncated algebras")

    def __add__(self, other: "TruncPoly") -> "TruncPoly":
        self._check_same(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return TruncPoly(self.algebra, t)

    def __sub__(self, other: "TruncPoly") -> "TruncPoly":
        self._check_same(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) - c
        return TruncPoly(self.algebra, t)

    def __neg__(self) -> "TruncPoly":
        return TruncPoly(self.algebra, {e: -c for e, c in self.terms.items()})

    def __rmul__(self, scalar: int) -> "TruncPoly":
        if not isinstance(scalar, int):
            return NotImplemented
        return TruncPoly(self.algebra, {e: scalar * c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.__rmul__(other)
        self._check_same(other)
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return TruncPoly(self.algebra, out)

    def is_zero(self) -> bool:
        return not self.terms

    # -- grading ------------------------------------------------------------
    def qdeg(self) -> int | None:
        """The q-degree (2x total exponent) if homogeneous, else None; zero -> None."""
        degs = {2 * sum(e) for e in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    # -- vector form --------------------------------------------------------
    def to_vector(self) -> np.ndarray:
        idx = self.algebra.basis_index()
        v = np.zeros(self.algebra.dim, dtype=np.int64)
        for e, c in self.terms.items():
            v[idx[e]] = c
        return v

    # -- canonical text form ------------------------------------------------
    def render(self) -> str:
        """Canonical text form, e.g. ``2*x1^2*x2 + 1`` (single variable: ``x``)."""
        if not self.terms:
            return "0"
        n = self.algebra.n
        pieces = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            factors = []
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                name = "x" if n == 1 else f"x{i + 1}"
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors:
                pieces.append(str(c))
            elif c == 1:
                pieces.append("*".join(factors))
            else:
                pieces.append(f"{c}*" + "*".join(factors))
        return " + ".join(pieces)

    @classmethod
    def parse(cls, algebra: TruncAlgebra, text: str) -> "TruncPoly":
        """Parse the canonical text form produced by :meth:`render`.

        Raises:
            ValueError: on malformed input, unknown variables, or exponents
                outside [0, p).
        """
        text = text.strip()
        if not text:
            raise ValueError("empty polynomial text")
        if text == "0":
            return algebra.zero()
        terms: dict[tuple[int, ...], int] = {}
        var_re = re.compile(r"^x(\d*)(?:\^(\d+))?$")
        for raw_term in text.split("+"):
            raw_term = raw_term.strip()
            if not raw_term:
                raise ValueError("empty term in polynomial text")
            coeff = 1
            exps = [0] * algebra.n
            for factor in raw_term.split("*"):
                factor = factor.strip()
                if not factor:
                    raise ValueError("empty factor in polynomial text")
                if factor.isdigit():
                    coeff *= int(factor)
                    continue
                m = var_re.match(factor)
                if not m:
                    raise ValueError(f"cannot parse factor {factor!r}")
                var_txt, exp_txt = m.group(1), m.group(2)
                i = 0 if var_txt == "" else int(var_txt) - 1
                if var_txt == "" and algebra.n != 1:
                    raise ValueError("bare variable 'x' only allowed when n=1")
                if not 0 <= i < algebra.n:
                    raise ValueError(f"variable index out of range in {factor!r}")
                e = 1 if exp_txt is None else int(exp_txt)
                if e >= algebra.p:
                    raise ValueError(
                        f"exponent {e} is not reduced (must be < p={algebra.p})"
                    )
                exps[i] += e
            key = tuple(exps)
            terms[key] = terms.get(key, 0) + coeff
        return cls(algebra, terms)


# ---------------------------------------------------------------------------
# Differential operators
# ---------------------------------------------------------------------------


def _normalize_twist(twist, n: int) -> list[int]:
    if twist is None:
        return [0] * n
    t = [int(x) for x in twist]
    if len(t) != n:
        raise ValueError(f"twist needs one parameter per variable ({n}), got {len(t)}")
    return t


def apply_witt(op: str, f: TruncPoly, twist=None) -> TruncPoly:
    """Apply d_minus, d_zero, or d_plus (Leibniz-extended) to ``f``.

    ``twist`` gives one integer parameter t_i per variable, replacing
    d_plus by d_plus + t_i x_i and d_zero by d_zero - t_i on that variable;
    d_minus is never twisted.
    """
    alg = f.algebra
    t = _normalize_twist(twist, alg.n)
    out: dict[tuple[int, ...], int] = {}

    def add(e: tuple[int, ...], c: int) -> None:
        out[e] = out.get(e, 0) + c

    if op == "d_minus":
        for exps, c in f.terms.items():
            for i, e in enumerate(exps):
                if e > 0:
                    add(exps[:i] + (e - 1,) + exps[i + 1:], -c * e)
    elif op == "d_zero":
        for exps, c in f.terms.items():
            add(exps, c * (-2 * sum(exps) - sum(t)))
    elif op == "d_plus":
        for exps, c in f.terms.items():
            for i, e in enumerate(exps):
                coeff = c * (e + t[i])
                if coeff:
                    add(exps[:i] + (e + 1,) + exps[i + 1:], coeff)
    else:
        raise ValueError(f"unknown operator {op!r}; expected one of {WITT_OPS}")
    return TruncPoly(alg, out)


def witt_matrix(op: str, p: int, n: int = 1, twist=None) -> np.ndarray:
    """Matrix of the operator on the lexicographic monomial basis of A^{(x)n}."""
    alg = TruncAlgebra(p, n)
    exps = alg.basis_exponents()
    idx = alg.basis_index()
    m = np.zeros((len(exps), len(exps)), dtype=np.int64)
    for j, e in enumerate(exps):
        img = apply_witt(op, alg.monomial(e), twist)
        for e2, c in img.terms.items():
            m[idx[e2], j] = c
    return m


def multiplication_matrix(f: TruncPoly) -> np.ndarray:
    """Matrix of multiplication by ``f`` on the lexicographic monomial basis."""
    alg = f.algebra
    exps = alg.basis_exponents()
    idx = alg.basis_index()
    m = np.zeros((len(exps), len(exps)), dtype=np.int64)
    for j, e in enumerate(exps):
        img = f * alg.monomial(e)
        for e2, c in img.terms.items():
            m[idx[e2], j] = c
    return m


# ---------------------------------------------------------------------------
# Frobenius structure
# ---------------------------------------------------------------------------


def comultiplication_of_one(p: int) -> TruncPoly:
    """D(1) = sum_{i=0}^{p-1} x1^i * x2^{p-1-i} inside k[x1,x2]/(x1^p, x2^p)."""
    alg2 = TruncAlgebra(p, 2)
    return TruncPoly(alg2, {(i, p - 1 - i): 1 for i in range(p)})


def comultiply(f: TruncPoly) -> TruncPoly:
    """Frobenius comultiplication A -> A (x) A, computed as (f in x1) * D(1).

    Input must live in the one-variable algebra; output lives in the
    two-variable algebra with x1 = f's variable acting on the left factor.
    """
    if f.algebra.n != 1:
        raise ValueError("comultiply is defined on the one-variable algebra")
    p = f.algebra.p
    alg2 = TruncAlgebra(p, 2)
    f_left = TruncPoly(alg2, {(e[0], 0): c for e, c in f.terms.items()})
    return f_left * comultiplication_of_one(p)


def counit(f: TruncPoly) -> int:
    """Frobenius counit: the coefficient of x^{p-1} (one-variable algebra)."""
    if f.algebra.n != 1:
        raise ValueError("counit is defined on the one-variable algebra")
    return f.terms.get((f.algebra.p - 1,), 0)


@dataclass
class FrobeniusCompatReport:
    """Outcome of the comultiplication/counit compatibility check with d_minus."""

    p: int
    ok: bool
    failures: list[str] = field(default_factory=list)
    checked: int = 0


def check_frobenius_compat(p: int) -> FrobeniusCompatReport:
    """Check that D and the counit commute with the lowering operator.

    For every basis monomial x^i of A = k[x]/(x^p) this verifies

        D(d_minus(x^i)) = d_minus^{(2)}(D(x^i))   (Leibniz action on A (x) A)
        counit(d_minus(x^i)) = 0

    which is the statement that (A, d_minus) is a Frobenius algebra in the
    differential-graded sense.
    """
    ensure_prime(p)
    alg = TruncAlgebra(p, 1)
    failures: list[str] = []
    checked = 0
    for i in range(p):
        xi = alg.monomial((i,))
        lhs = comultiply(apply_witt("d_minus", xi))
        rhs = apply_witt("d_minus", comultiply(xi))
        checked += 1
        if lhs != rhs:
            failures.append(
                f"comultiplication does not intertwine d_minus on x^{i}: "
                f"{lhs.render()} != {rhs.render()}"
            )
        if counit(apply_witt("d_minus", xi)) != 0:
            failures.append(f"counit(d_minus(x^{i})) != 0")
    return FrobeniusCompatReport(p=p, ok=not failures, failures=failures, checked=checked)
