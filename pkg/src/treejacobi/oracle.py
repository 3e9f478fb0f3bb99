"""Brute-force validators: dense finite sections of the operators, their
eigensolves, and raw series term lists for auditing classifier verdicts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .coefficients import CoefficientSequence
from .errors import ConvergenceFailure, PatchTooLarge
from .orthopoly import poly_pairs
from .treecore import Address, LambdaPatch, subtree_vertices

MAX_DENSE_ROWS = 4096


@dataclass
class DenseTruncation:
    """Dense symmetric finite section of one of the operators.

    kind is ("gamma_patch", depth), ("radial_block", offset, size), or
    ("lambda_patch", apex_level).  Rows of boundary-layer vertices simply
    omit couplings that leave the section (Dirichlet-style); cross-checks
    restrict to interior vertices where no convention leaks in."""

    kind: Tuple
    matrix: np.ndarray
    addresses: List[Address]
    index: Dict[Address, int]

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def interior(self) -> List[Address]:
        """Vertices whose full neighborhood lies inside the section."""
        if self.kind[0] == "gamma_patch":
            depth = self.kind[1]
            return [x for x in self.addresses if len(x) < depth]
        if self.kind[0] == "lambda_patch":
            # the apex couples upward to the virtual successor, outside
            apex_level = self.kind[1]
            return [x for x in self.addresses if x != ()]
        k, n = self.kind[1], self.kind[2]
        return [(j,) for j in range(n - 1)]

    def export_text(self, fileobj) -> None:
        n = self.size
        fileobj.write(f"{n}\n")
        for row in self.matrix:
            fileobj.write(" ".join(repr(float(v)) for v in row) + "\n")


def _check_rows(count: int) -> None:
    if count > MAX_DENSE_ROWS:
        raise PatchTooLarge(
            f"dense section would have {count} rows, over the cap of {MAX_DENSE_ROWS}")


def build_gamma_patch(coeffs: CoefficientSequence, d: int,
                      depth: int) -> DenseTruncation:
    """Finite section of the rooted-tree operator on all vertices to the
    given depth.  Built symmetrically from parent-child pairs."""
    addresses = sorted(subtree_vertices((), depth, d))
    _check_rows(len(addresses))
    index = {x: i for i, x in enumerate(addresses)}
    M = np.zeros((len(addresses), len(addresses)))
    for x, i in index.items():
        n = len(x)
        M[i, i] = coeffs.beta(n)
        if n < depth:
            lam = coeffs.lam(n)
            for c in range(1, d + 1):
                j = index[x + (c,)]
                M[i, j] = lam
                M[j, i] = lam
    return DenseTruncation(("gamma_patch", depth), M, addresses, index)


def build_radial_block(coeffs: CoefficientSequence, d: int, offset: int,
                       size: int) -> DenseTruncation:
    """The size-by-size tridiagonal block starting at beta_offset, with
    off-diagonal sqrt(d) * lam."""
    _check_rows(size)
    scale = math.sqrt(d)
    M = np.zeros((size, size))
    for j in range(size):
        M[j, j] = coeffs.beta(offset + j)
        if j + 1 < size:
            v = scale * coeffs.lam(offset + j)
            M[j, j + 1] = v
            M[j + 1, j] = v
    addresses = [(j,) for j in range(size)]
    index = {x: i for i, x in enumerate(addresses)}
    return DenseTruncation(("radial_block", offset, size), M, addresses, index)


def build_lambda_patch_matrix(coeffs: CoefficientSequence, d: int,
                              apex_level: int) -> DenseTruncation:
    """Finite section of the one-ended operator on a level-`apex_level`
    patch; the apex's coupling to its virtual successor is omitted."""
    patch = LambdaPatch(apex_level, d)
    addresses = sorted(patch.vertices())
    _check_rows(len(addresses))
    index = {x: i for i, x in enumerate(addresses)}
    M = np.zeros((len(addresses), len(addresses)))
    for w, i in index.items():
        lvl = patch.level(w)
        M[i, i] = coeffs.beta(lvl)
        if lvl > 0:
            lam = coeffs.lam(lvl - 1)
            for c in range(1, d + 1):
                j = index[w + (c,)]
                M[i, j] = lam
                M[j, i] = lam
    return DenseTruncation(("lambda_patch", apex_level), M, addresses, index)


def dense_eigensolve(T: DenseTruncation) -> Tuple[np.ndarray, np.ndarray]:
    """Full spectrum of the section, ascending, with eigenvectors in
    columns."""
    try:
        vals, vecs = np.linalg.eigh(T.matrix)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"dense eigensolve failed: {exc}") from exc
    return vals, vecs


def series_oracle(coeffs: CoefficientSequence, d: int, z,
                  n_max: int) -> Tuple[List[float], List[float]]:
    """Raw term lists |p_n(z)|^2 and |q_n(z)|^2 for the sqrt(d)-scaled
    recurrence, for independent inspection of classifier verdicts."""
    p_terms: List[float] = []
    q_terms: List[float] = []
    for n, p, q in poly_pairs(coeffs, math.sqrt(d), complex(z)):
        if n >= n_max:
            break
        p_terms.append(abs(p) ** 2)
        q_terms.append(abs(q) ** 2)
    return p_terms, q_terms
