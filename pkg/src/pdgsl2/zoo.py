"""Catalog of explicitly constructed graded sl(2) state modules.

Each builder returns a :class:`ZooEntry` bundling a :class:`GradedUModule`
with its construction parameters, a rendered description of the expected
decomposition, and (where meaningful) per-component dot actions and sl(2)
triples for split-detection checks.

Entries:

* ``unknot(p)`` -- the chain module on ``p`` dotted cups, isomorphic to the
  Steinberg module Nabla(p-1).
* ``colored_circle_2(p)`` -- the module on two-row Schur function labels
  ``s_{m,n}`` (p-2 >= m >= n >= 0) with straightening relations; decomposes
  into big projective covers.
* ``theta_expected(p)`` -- L(1) tensored with the color-2 circle module, a
  projective-injective module of dimension p(p-1).
* ``hopf(p, twist)`` / ``torus_2n(p, n, twist)`` -- direct sums of shifted
  dual Verma modules, with the even-size quotient term built from a verified
  embedding of Nabla(2-2n) into a tensor of two dual Vermas.
* ``unlink(p, m)`` -- the m-fold tensor power of the unknot module together
  with commuting dot actions and per-component sl(2) triples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import fpcore as fp
from .smash import FreenessReport, free_over_trunc, synthesize_dot_action
from .truncpoly import witt_matrix
from .usl2 import (
    GradedUModule,
    ModuleLabel,
    acyclicity_check,
    filtration,
    make_dual_verma,
    make_simple,
    module_to_json,
    quotient,
    shift,
    tensor,
    unimodality_check,
    validate,
    direct_sum,
)

__all__ = [
    "TwistParams",
    "ZooEntry",
    "EmbeddingError",
    "unknot",
    "colored_circle_2",
    "theta_expected",
    "theta_nonprojective_witness",
    "hopf",
    "torus_2n",
    "unlink",
    "hopf_with_duplicated_base_point",
    "straighten_schur",
    "expected_colored_circle_labels",
    "labels_match_mod_2p",
    "split_detection_check",
    "SplitDetectionReport",
    "standard_battery",
    "BatteryReport",
    "list_entries",
    "build_entry",
    "entry_to_json",
]


# ---------------------------------------------------------------------------
# twist parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistParams:
    """Pair of integer twist parameters whose sum must be 1 mod p."""

    t1: int
    t2: int

    @classmethod
    def from_t1(cls, t1: int) -> "TwistParams":
        return cls(int(t1), 1 - int(t1))

    def check(self, p: int) -> None:
        if (self.t1 + self.t2 - 1) % p:
            raise ValueError(
                f"twist parameters must sum to 1 mod {p}, got {self.t1} + {self.t2}"
            )


def _normalize_twist(twist, p: int) -> TwistParams:
    if twist is None:
        tw = TwistParams.from_t1(1)
    elif isinstance(twist, TwistParams):
        tw = twist
    else:
        tw = TwistParams.from_t1(int(twist))
    tw.check(p)
    return tw


# ---------------------------------------------------------------------------
# entries
# ---------------------------------------------------------------------------


@dataclass
class ZooEntry:
    """A named module with parameters, expected decomposition, and extras."""

    name: str
    parameters: dict
    module: GradedUModule
    expected: str
    dots: list[np.ndarray] | None = None
    triples: list[tuple[np.ndarray, np.ndarray, np.ndarray]] | None = None
    data: dict = field(default_factory=dict)


class EmbeddingError(RuntimeError):
    """A claimed submodule embedding failed its verification."""


# ---------------------------------------------------------------------------
# unknot
# ---------------------------------------------------------------------------


def unknot(p: int) -> ZooEntry:
    """The p-dimensional chain module of dotted cups: Nabla(p-1) = Steinberg.

    Basis vector v_i carries q-degree 2i - (p-1); the dot action sends
    v_i to v_{i+1}.
    """
    module = make_dual_verma(p, p - 1)
    X = np.zeros((p, p), dtype=np.int64)
    for i in range(p - 1):
        X[i + 1, i] = 1
    return ZooEntry(
        name="unknot",
        parameters={"p": p},
        module=module,
        expected=f"Nabla({p - 1}) (the Steinberg module)",
        dots=[X],
        triples=[(module.E, module.H, module.F)],
    )


# ---------------------------------------------------------------------------
# circle colored by 2
# ---------------------------------------------------------------------------


def straighten_schur(p: int, m: int, n: int) -> list[tuple[int, tuple[int, int]]]:
    """Express s_{m,n} in the basis p-2 >= m >= n >= 0.

    Rules: s_{m,n} = 0 when m = n-1, m > p-2, or n < 0;
    s_{m,n} = -s_{n-1,m+1} when m < n-1.
    """
    if m == n - 1 or m > p - 2 or n < 0:
        return []
    if m < n - 1:
        return [(-c, pr) for c, pr in straighten_schur(p, n - 1, m + 1)]
    return [(1, (m, n))]


def colored_circle_2(p: int) -> ZooEntry:
    """Module on two-row Schur labels s_{m,n}, p-2 >= m >= n >= 0.

    Actions: F s_{m,n} = (m+2)s_{m+1,n} + (n+1)s_{m,n+1},
    E s_{m,n} = -(m+1)s_{m-1,n} - n s_{m,n-1},
    H s_{m,n} = -2(2+m+n) s_{m,n}, straightened into the basis;
    qdeg(s_{m,n}) = 2(m+n) - 2(p-2).
    """
    pairs = [(m, n) for m in range(p - 1) for n in range(m + 1)]
    idx = {pr: i for i, pr in enumerate(pairs)}
    dim = len(pairs)
    E = np.zeros((dim, dim), dtype=np.int64)
    F = np.zeros((dim, dim), dtype=np.int64)
    H = np.zeros((dim, dim), dtype=np.int64)

    def add(mat: np.ndarray, col: int, coeff: int, m: int, n: int) -> None:
        for c, pr in straighten_schur(p, m, n):
            mat[idx[pr], col] = (mat[idx[pr], col] + coeff * c) % p

    for col, (m, n) in enumerate(pairs):
        add(F, col, m + 2, m + 1, n)
        add(F, col, n + 1, m, n + 1)
        add(E, col, -(m + 1), m - 1, n)
        add(E, col, -n, m, n - 1)
        H[col, col] = (-2 * (2 + m + n)) % p

    qdeg = [2 * (m + n) - 2 * (p - 2) for m, n in pairs]
    module = GradedUModule(p=p, qdeg=qdeg, tdeg=[0] * dim, E=E, F=F, H=H)
    expected = " + ".join(l.render() for l in expected_colored_circle_labels(p))
    return ZooEntry(
        name="colored-circle-2",
        parameters={"p": p},
        module=module,
        expected=expected,
        data={"pairs": pairs},
    )


def expected_colored_circle_labels(p: int) -> list[ModuleLabel]:
    """Direct sum of P(4k+2-2p) for 0 <= k <= (p-3)//4, Euclidean-reduced.

    Parameters lam = lam0 + p*lam1 with lam0 = p-1 become shifted Steinberg
    labels (the projective cover degenerates to the Steinberg module there).
    """
    out: list[ModuleLabel] = []
    for k in range((p - 3) // 4 + 1):
        lam = 4 * k + 2 - 2 * p
        lam0 = lam % p
        lam1 = (lam - lam0) // p
        if lam0 == p - 1:
            out.append(ModuleLabel(kind="St", lam=-1, qshift=-p * lam1))
        else:
            out.append(ModuleLabel(kind="P", lam=lam0, qshift=-p * lam1))
    return out


def labels_match_mod_2p(
    found: list[ModuleLabel], expected: list[ModuleLabel], p: int
) -> bool:
    """Multiset equality of labels with q-shifts compared modulo 2p.

    The diagonal operator pins q-degrees mod p and parity pins them mod 2,
    so absolute q-normalizations are only comparable modulo 2p.
    """

    def key(lbl: ModuleLabel) -> tuple:
        return (lbl.kind, -1 if lbl.kind == "St" else lbl.lam,
                lbl.tshift, lbl.qshift % (2 * p))

    return sorted(map(key, found)) == sorted(map(key, expected))


# ---------------------------------------------------------------------------
# theta web
# ---------------------------------------------------------------------------


def theta_expected(p: int) -> ZooEntry:
    """L(1) tensor the color-2 circle module (twist t1=1, t2=0).

    Projective-injective of dimension p(p-1).
    """
    circle = colored_circle_2(p)
    module = tensor(make_simple(p, 1), circle.module)
    return ZooEntry(
        name="theta",
        parameters={"p": p, "t1": 1, "t2": 0},
        module=module,
        expected=f"L(1) (x) ({circle.expected}); projective-injective, dim {p * (p - 1)}",
    )


def theta_nonprojective_witness(p: int = 3) -> GradedUModule:
    """A module whose highest weight vector is killed by the raising operator.

    Nabla(0): both E and F annihilate v_0, so no vector of the top block
    generates a Verma submodule and the Delta-filtration search fails;
    consequently the module is not projective-injective.  This is the
    obstruction pattern exhibited by the theta module at twist t1 = t2 = 2
    when p = 3.
    """
    return make_dual_verma(p, 0)


# ---------------------------------------------------------------------------
# Hopf and (2, n) torus links
# ---------------------------------------------------------------------------


def _sum_embedding(p: int) -> np.ndarray:
    """Matrix of v_k -> sum over i+j = p-1+k of v_i (x) v_j."""
    phi = np.zeros((p * p, p), dtype=np.int64)
    for k in range(p):
        for i in range(p):
            j = p - 1 + k - i
            if 0 <= j < p:
                phi[i * p + j, k] = 1
    return phi


def _verified_quotient(
    big: GradedUModule, src: GradedUModule, phi: np.ndarray
) -> tuple[GradedUModule, int]:
    """Quotient of ``big`` by the verified image of ``src`` under ``phi``.

    Checks that phi intertwines E, F, H, is injective, and is homogeneous of
    a uniform q-degree shift; returns (quotient, qshift).  Raises
    :class:`EmbeddingError` with the offending operator otherwise.
    """
    p = big.p
    for name, a_src, a_big in (
        ("E", src.E, big.E),
        ("F", src.F, big.F),
        ("H", src.H, big.H),
    ):
        resid = (a_big @ phi - phi @ a_src) % p
        if resid.any():
            raise EmbeddingError(
                f"embedding does not intertwine {name}: residual {resid.tolist()}"
            )
    if fp.rank(phi, p) != phi.shape[1]:
        raise EmbeddingError("embedding is not injective")
    shifts = set()
    for k in range(phi.shape[1]):
        for r in np.nonzero(phi[:, k])[0]:
            shifts.add(big.qdeg[r] - src.qdeg[k])
    if len(shifts) != 1:
        raise EmbeddingError(f"embedding is not homogeneous: q-shifts {sorted(shifts)}")
    return quotient(big, phi), shifts.pop()


def hopf(p: int, twist=None) -> ZooEntry:
    """q^-2 Nabla(0) + t^-2 (Nabla(2t1-3) (x) Nabla(2t2-3)) / Nabla(-2).

    The quotient removes the image of v_k -> sum_{i+j=p-1+k} v_i (x) v_j,
    which is verified to be an injective module map before quotienting.
    """
    tw = _normalize_twist(twist, p)
    lam1, lam2 = 2 * tw.t1 - 3, 2 * tw.t2 - 3
    big = tensor(make_dual_verma(p, lam1), make_dual_verma(p, lam2))
    src = make_dual_verma(p, -2)
    phi = _sum_embedding(p)
    quot, qshift = _verified_quotient(big, src, phi)
    module = direct_sum(
        [shift(make_dual_verma(p, 0), qk=-2), shift(quot, tj=-2)]
    )
    return ZooEntry(
        name="hopf",
        parameters={"p": p, "t1": tw.t1, "t2": tw.t2},
        module=module,
        expected=(
            f"q^-2 Nabla(0) + t^-2 (Nabla({lam1}) (x) Nabla({lam2})) / Nabla(-2)"
        ),
        data={"embedding": phi, "embedding_qshift": qshift,
              "tensor_factors": (lam1, lam2)},
    )


def torus_2n(p: int, n: int, twist=None) -> ZooEntry:
    """Homology model for the (2, n) torus link as a sum of shifted Nablas.

    q^-n Nabla(0)
      + sum over j = 1..(n-1)//2 of
          t^-2j   q^(-n+4j-1) Nabla(2 t1 - 2j + p - 1)
        + t^-2j-1 q^(-n+4j+1) Nabla(2 - 2j)
      + (n even) t^-n (Nabla(2 t1 - n - 1) (x) Nabla(2 t2 - n - 1)) / Nabla(2 - 2n)

    The even-n tensor factor parameters carry an integer lift lowered by p
    from 2 t_i - n + p - 1 so that q-degree parities agree across summands
    and n = 2 reproduces ``hopf`` on the nose; the quotient reuses the same
    verified index-sum embedding.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    tw = _normalize_twist(twist, p)
    parts = [shift(make_dual_verma(p, 0), qk=-n)]
    pieces = [f"q^{-n} Nabla(0)"]
    data: dict = {}
    for j in range(1, (n - 1) // 2 + 1):
        lam_a = 2 * tw.t1 - 2 * j + p - 1
        parts.append(shift(make_dual_verma(p, lam_a), qk=-n + 4 * j - 1, tj=-2 * j))
        pieces.append(f"t^{-2 * j} q^{-n + 4 * j - 1} Nabla({lam_a})")
        parts.append(shift(make_dual_verma(p, 2 - 2 * j), qk=-n + 4 * j + 1, tj=-2 * j - 1))
        pieces.append(f"t^{-2 * j - 1} q^{-n + 4 * j + 1} Nabla({2 - 2 * j})")
    if n % 2 == 0:
        lam1, lam2 = 2 * tw.t1 - n - 1, 2 * tw.t2 - n - 1
        big = tensor(make_dual_verma(p, lam1), make_dual_verma(p, lam2))
        src = make_dual_verma(p, 2 - 2 * n)
        phi = _sum_embedding(p)
        quot, qshift = _verified_quotient(big, src, phi)
        parts.append(shift(quot, tj=-n))
        pieces.append(
            f"t^{-n} (Nabla({lam1}) (x) Nabla({lam2})) / Nabla({2 - 2 * n})"
        )
        data = {"embedding": phi, "embedding_qshift": qshift,
                "tensor_factors": (lam1, lam2)}
    return ZooEntry(
        name="torus-2n",
        parameters={"p": p, "n": n, "t1": tw.t1, "t2": tw.t2},
        module=direct_sum(parts),
        expected=" + ".join(pieces),
        data=data,
    )


# ---------------------------------------------------------------------------
# unlinks and split detection
# ---------------------------------------------------------------------------


def _kron_at(mat: np.ndarray, i: int, m: int, p: int) -> np.ndarray:
    """Place a one-variable operator on tensor factor i of m factors."""
    left = np.eye(p ** i, dtype=np.int64)
    right = np.eye(p ** (m - 1 - i), dtype=np.int64)
    return np.kron(np.kron(left, mat), right) % p


def unlink(p: int, m: int) -> ZooEntry:
    """Nabla(p-1)^(x m) with per-component dot actions and sl(2) triples.

    On the monomial basis of k[x_1..x_m]/(x_i^p), component i acts by
    E_i = -d/dx_i, H_i = -2 x_i d/dx_i - 1, F_i = x_i^2 d/dx_i + x_i,
    and the dot x_i is multiplication by x_i.
    """
    if m < 1:
        raise ValueError("need at least one component")
    module = make_dual_verma(p, p - 1)
    for _ in range(m - 1):
        module = tensor(module, make_dual_verma(p, p - 1))
    X1 = np.zeros((p, p), dtype=np.int64)
    for e in range(p - 1):
        X1[e + 1, e] = 1
    E1 = witt_matrix("d_minus", p, 1)
    H1 = witt_matrix("d_zero", p, 1, twist=[1])
    F1 = witt_matrix("d_plus", p, 1, twist=[1])
    dots = [_kron_at(X1, i, m, p) for i in range(m)]
    triples = [
        (_kron_at(E1, i, m, p), _kron_at(H1, i, m, p), _kron_at(F1, i, m, p))
        for i in range(m)
    ]
    return ZooEntry(
        name="unlink",
        parameters={"p": p, "n": m},
        module=module,
        expected=f"Nabla({p - 1})^(x {m}) with one dot action per component",
        dots=dots,
        triples=triples,
    )


def hopf_with_duplicated_base_point(p: int, twist=None) -> ZooEntry:
    """Negative control: the Hopf module with one dot action used twice.

    A single dot action is synthesized from the lowering operator and
    duplicated, together with the global sl(2) triple, as if the link had
    two independent components.  Split detection must reject this.
    """
    entry = hopf(p, twist)
    m = entry.module
    x = synthesize_dot_action(m.E, list(m.qdeg), p)
    entry.name = "hopf-duplicated-base-point"
    entry.dots = [x, x]
    entry.triples = [(m.E, m.H, m.F), (m.E, m.H, m.F)]
    return entry


@dataclass
class SplitDetectionReport:
    relations_ok: bool
    relation_failures: list[str]
    commutation_ok: bool
    commutation_failures: list[str]
    freeness: FreenessReport | None
    ok: bool


def split_detection_check(entry: ZooEntry) -> SplitDetectionReport:
    """Certify a candidate multi-component structure on a module.

    Checks, for each component triple (E_i, H_i, F_i) and dot x_j:
    [E_i, x_j] = -delta_ij, [H_i, x_j] = -2 delta_ij x_j,
    [F_i, x_j] = delta_ij x_j^2; then pairwise commutation of distinct
    triples; then freeness over the dot actions.  The candidate structure
    is consistent iff all three hold.
    """
    if entry.dots is None or entry.triples is None:
        raise ValueError("entry carries no dot actions / component triples")
    p = entry.module.p
    rel_fails: list[str] = []
    for i, (E, H, F) in enumerate(entry.triples):
        for j, X in enumerate(entry.dots):
            d = 1 if i == j else 0
            ident = np.eye(X.shape[0], dtype=np.int64)
            checks = (
                ("[E_%d, x_%d] = %s" % (i + 1, j + 1, "-1" if d else "0"),
                 (E @ X - X @ E + d * ident) % p),
                ("[H_%d, x_%d] = %s" % (i + 1, j + 1, "-2 x" if d else "0"),
                 (H @ X - X @ H + 2 * d * X) % p),
                ("[F_%d, x_%d] = %s" % (i + 1, j + 1, "x^2" if d else "0"),
                 (F @ X - X @ F - d * (X @ X)) % p),
            )
            for desc, resid in checks:
                if resid.any():
                    rel_fails.append(f"failed {desc}")
    comm_fails: list[str] = []
    for i in range(len(entry.triples)):
        for j in range(i + 1, len(entry.triples)):
            for a_name, a in zip("EHF", entry.triples[i]):
                for b_name, b in zip("EHF", entry.triples[j]):
                    if ((a @ b - b @ a) % p).any():
                        comm_fails.append(
                            f"{a_name}_{i + 1} does not commute with {b_name}_{j + 1}"
                        )
    freeness = free_over_trunc(entry.dots, p, dim=entry.module.dim)
    relations_ok = not rel_fails
    commutation_ok = not comm_fails
    ok = relations_ok and commutation_ok and freeness.free is True
    return SplitDetectionReport(
        relations_ok=relations_ok,
        relation_failures=rel_fails,
        commutation_ok=commutation_ok,
        commutation_failures=comm_fails,
        freeness=freeness,
        ok=ok,
    )


# ---------------------------------------------------------------------------
# battery, registry, export
# ---------------------------------------------------------------------------


@dataclass
class BatteryReport:
    valid: bool
    unimodal: bool
    acyclic: bool
    nabla_filtration: bool
    ok: bool


def standard_battery(entry: ZooEntry) -> BatteryReport:
    """Validation, per-t unimodality, acyclicity, and Nabla filtration."""
    m = entry.module
    valid = validate(m).ok
    unimodal = unimodality_check(m).ok
    acyclic = acyclicity_check(m)
    nabla = filtration(m, "Nabla") is not None
    return BatteryReport(
        valid=valid,
        unimodal=unimodal,
        acyclic=acyclic,
        nabla_filtration=nabla,
        ok=valid and unimodal and acyclic and nabla,
    )


_BUILDERS = {
    "unknot": ("", lambda p, n, t1: unknot(p)),
    "colored-circle-2": ("", lambda p, n, t1: colored_circle_2(p)),
    "theta": ("", lambda p, n, t1: theta_expected(p)),
    "hopf": ("t", lambda p, n, t1: hopf(p, t1)),
    "torus-2n": ("nt", lambda p, n, t1: torus_2n(p, n, t1)),
    "unlink": ("n", lambda p, n, t1: unlink(p, n)),
}


def list_entries() -> list[str]:
    return sorted(_BUILDERS)


def build_entry(name: str, p: int, n: int | None = None, t1: int | None = None) -> ZooEntry:
    """Build a registry entry by name; n and t1 are used where applicable."""
    if name not in _BUILDERS:
        raise ValueError(f"unknown zoo entry {name!r}; known: {list_entries()}")
    needs, builder = _BUILDERS[name]
    if "n" in needs and n is None:
        raise ValueError(f"entry {name!r} requires the n parameter")
    return builder(p, n, t1)


def entry_to_json(entry: ZooEntry) -> str:
    """Canonical JSON export: name, parameters, expected, module schema."""
    doc = {
        "name": entry.name,
        "parameters": {k: int(v) for k, v in entry.parameters.items()},
        "expected": entry.expected,
        "module": json.loads(module_to_json(entry.module)),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))
