"""Exact mod-p tools for truncated-polynomial p-DG algebras and graded restricted sl(2).

Subpackage map:

- :mod:`pdgsl2.fpcore` — dense exact linear algebra and univariate polynomial
  factorization over F_p.
- :mod:`pdgsl2.truncpoly` — the truncated polynomial Frobenius algebra
  k[x]/(x^p) with deg(x) = 2, its tensor powers, comultiplication/counit, and
  the lowering/weight/raising differential operators.
- :mod:`pdgsl2.smash` — the smash product of the truncated algebra with its
  lowering operator, the matrix-algebra isomorphism, module decomposition,
  slash homology, and freeness tests.
- :mod:`pdgsl2.complexes` — graded chain complexes with base-point structure,
  Morita reduction, base-point independence, and JSON serialization.
- :mod:`pdgsl2.usl2` — graded modules over the restricted enveloping algebra
  of sl(2): catalog constructors, duality, tensor products, decomposition,
  filtrations, projectivity and unimodality checks, graded dimensions.
- :mod:`pdgsl2.zoo` — worked link-homology modules (unknot, colored circle,
  theta, Hopf, two-strand torus links, unlinks) and their expected structure.
- :mod:`pdgsl2.cases` / :mod:`pdgsl2.cli` — the verification case registry and
  the command line interface.
"""

__version__ = "0.1.0"
