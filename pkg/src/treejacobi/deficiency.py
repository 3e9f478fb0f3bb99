"""Deficiency-space basis functions on the rooted tree, their norms, the
projections onto the branch spaces, and the selfadjointness classifier."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .coefficients import CoefficientSequence
from .errors import (DivergedSeries, PatchTooLarge, RealSpectralParameter)
from .exactnum import (ExactComplex, abs2, as_complex, conj, exact_sqrt,
                       half_power, is_exact, is_zero)
from .orthopoly import AlphaTable, PolyCache, SeriesResult, sum_series
from .treecore import (DEFAULT_ENTRY_BUDGET, GAMMA, Address, SparseFunction,
                       format_address, subtree_vertices)


class DeficiencyContext:
    """Shared evaluation state: coefficients, degree, spectral parameter, and
    a lazily extended table of recurrence values at scale sqrt(d)."""

    def __init__(self, coeffs: CoefficientSequence, d: int, z,
                 require_nonreal: bool = True):
        self.coeffs = coeffs
        self.d = d
        self.z = z
        self.exact = is_exact(z)
        if require_nonreal:
            zc = as_complex(z)
            if zc.imag == 0:
                raise RealSpectralParameter(
                    f"deficiency-space values need a non-real z, got {z}")
        self.scale = exact_sqrt(d) if self.exact else math.sqrt(d)
        self.cache = PolyCache(coeffs, self.scale, z)

    def p(self, n: int):
        self.cache.ensure(n)
        return self.cache.p[n]

    def q(self, n: int):
        self.cache.ensure(n)
        return self.cache.q[n]

    def _root_power(self, k: int):
        """d^(k/2) in the active arithmetic."""
        if self.exact:
            return half_power(self.d, k)
        return self.d ** (k / 2)

    def f_zero(self, n: int):
        """Value on level n of the radial basis function (anchor at the root
        level of the whole tree): p_n(z) / d^(n/2)."""
        return self.p(n) / self._root_power(n)

    def f_anchored(self, k: int, n: int):
        """Value on level n inside one child subtree of an anchor at level k:
        lam_k (p_k q_n - q_k p_n) / d^((n-k-1)/2), for n >= k + 1.

        The value at n = k + 1 is 1 for every k (discrete Wronskian)."""
        if n < k + 1:
            raise ValueError(f"anchored values start at level {k + 1}, got {n}")
        if self.exact:
            lam = ExactComplex.from_rational(self.coeffs.lam_exact(k))
        else:
            lam = self.coeffs.lam(k)
        return lam * (self.p(k) * self.q(n) - self.q(k) * self.p(n)) \
            / self._root_power(n - k - 1)


def f_value(kind: str, k: int, n: int, ctx: DeficiencyContext):
    """Scalar value of a basis function on level n of its support.

    kind "zero": the radial function, value p_n/d^(n/2) (k ignored).
    kind "anchored": anchor at level k, value defined for n >= k + 1."""
    if kind == "zero":
        return ctx.f_zero(n)
    if kind == "anchored":
        return ctx.f_anchored(k, n)
    raise ValueError(f"unknown kind {kind!r}")


def _check_zero_sum(coefficients: Sequence, exact: bool) -> None:
    if exact:
        total = None
        for a in coefficients:
            total = a if total is None else total + a
        if total is not None and not is_zero(total):
            raise ValueError(f"coefficients must sum to zero, got {total!r}")
    else:
        total = sum(as_complex(a) for a in coefficients)
        scale = max((abs(as_complex(a)) for a in coefficients), default=0.0)
        if abs(total) > 1e-14 * max(1.0, scale):
            raise ValueError(f"coefficients must sum to zero, got {total}")


@dataclass
class DeficiencyElement:
    """An element of the deficiency space attached to one anchor.

    anchor None: a scalar multiple of the radial basis function
    (coefficients = (a,)).  anchor x: sum a_i f over the d child subtrees of
    x, with the a_i summing to zero."""

    anchor: Optional[Address]
    coefficients: Tuple
    z: object

    def __post_init__(self):
        self.coefficients = tuple(self.coefficients)
        if self.anchor is None:
            if len(self.coefficients) != 1:
                raise ValueError("the radial element takes a single scalar")
        else:
            exact = all(is_exact(a) for a in self.coefficients)
            _check_zero_sum(self.coefficients, exact)

    def value_at(self, y: Address, ctx: DeficiencyContext):
        if self.anchor is None:
            return self.coefficients[0] * ctx.f_zero(len(y))
        k = len(self.anchor)
        if len(y) <= k or y[:k] != self.anchor:
            return 0
        a = self.coefficients[y[k] - 1]
        if is_zero(a):
            return 0
        return a * ctx.f_anchored(k, len(y))

    def materialize(self, ctx: DeficiencyContext, depth: int,
                    budget: int = DEFAULT_ENTRY_BUDGET) -> SparseFunction:
        """Sparse function with all values down to tree level `depth`.

        Refuses (PatchTooLarge) rather than silently truncating support."""
        d = ctx.d
        entries: Dict[Address, object] = {}
        if self.anchor is None:
            count = (d ** (depth + 1) - 1) // (d - 1)
            if count > budget:
                raise PatchTooLarge(
                    f"materializing to depth {depth} needs {count} entries, "
                    f"over the budget of {budget}")
            a = self.coefficients[0]
            for n in range(depth + 1):
                v = a * ctx.f_zero(n)
                if is_zero(v):
                    continue
                for x in _level_iter(n, d):
                    entries[x] = v
            return SparseFunction(entries, GAMMA)
        k = len(self.anchor)
        if depth < k + 1:
            raise ValueError(
                f"depth {depth} does not reach the anchor's children at level {k + 1}")
        per_branch = (d ** (depth - k) - 1) // (d - 1)
        if d * per_branch > budget:
            raise PatchTooLarge(
                f"materializing to depth {depth} needs {d * per_branch} entries, "
                f"over the budget of {budget}")
        values = {n: ctx.f_anchored(k, n) for n in range(k + 1, depth + 1)}
        for i in range(1, d + 1):
            a = self.coefficients[i - 1]
            if is_zero(a):
                continue
            child = self.anchor + (i,)
            for x in subtree_vertices(child, depth - k - 1, d, budget):
                v = a * values[len(x)]
                if not is_zero(v):
                    entries[x] = v
        return SparseFunction(entries, GAMMA)

    def norm(self, alpha: AlphaTable) -> float:
        """alpha_{k+1} * sqrt(sum |a_i|^2) for an anchor at level k, and
        |a| * alpha_0 for the radial element."""
        if self.anchor is None:
            return abs(as_complex(self.coefficients[0])) * alpha.alpha(0)
        s = sum(abs(as_complex(a)) ** 2 for a in self.coefficients)
        return alpha.alpha(len(self.anchor) + 1) * math.sqrt(s)

    def to_json_obj(self) -> dict:
        return {
            "anchor": None if self.anchor is None else format_address(self.anchor),
            "coefficients": [[as_complex(a).real, as_complex(a).imag]
                             for a in self.coefficients],
            "z": [as_complex(self.z).real, as_complex(self.z).imag],
        }


@dataclass(frozen=True)
class BasisFunction:
    """A single deficiency basis function, identified by its root vertex.

    root (): the radial function f_e, value p_n/d^(n/2) on level n.
    root x_i with |x_i| = k + 1: supported on the subtree below x_i,
    value lam_k (p_k q_n - q_k p_n)/d^((n-k-1)/2) on level n >= k + 1,
    normalized to 1 at x_i itself."""

    root: Address

    def value_at(self, y: Address, ctx: DeficiencyContext):
        if not self.root:
            return ctx.f_zero(len(y))
        k = len(self.root) - 1
        if len(y) < len(self.root) or y[:len(self.root)] != self.root:
            return 0
        return ctx.f_anchored(k, len(y))

    def norm_index(self) -> int:
        """Index k such that the function's norm is alpha_k."""
        return len(self.root)


def _level_iter(n: int, d: int):
    from .treecore import level_vertices
    return level_vertices(n, d)


# ---------------------------------------------------------------------------
# residual of the eigenvalue equation
# ---------------------------------------------------------------------------

def _residual_at(values, x: Address, z, coeffs, d: int):
    """z f(x) - lam_{n-1} f(parent) - beta_n f(x) - lam_n sum f(children)."""
    n = len(x)
    r = (z - coeffs.beta(n)) * values(x)
    if n > 0:
        r = r - coeffs.lam(n - 1) * values(x[:-1])
    child_sum = None
    for i in range(1, d + 1):
        v = values(x + (i,))
        child_sum = v if child_sum is None else child_sum + v
    r = r - coeffs.lam(n) * child_sum
    return r


def deficiency_residual(f: SparseFunction, z, coeffs: CoefficientSequence,
                        d: int, depth: int) -> float:
    """Max eigenvalue-equation residual over all levels below `depth`.

    The level-`depth` equation is excluded: it needs values one level
    further down.  Vertices where f and all its neighbors vanish contribute
    nothing, so only the support and its one-ring are visited."""
    check: set = set()
    for x in f.entries:
        if len(x) < depth:
            check.add(x)
        if x and len(x) - 1 < depth:
            check.add(x[:-1])
        for i in range(1, d + 1):
            if len(x) + 1 < depth:
                check.add(x + (i,))
    zc = as_complex(z)
    values = lambda y: as_complex(f.entries.get(y, 0))
    worst = 0.0
    for x in check:
        worst = max(worst, abs(_residual_at(values, x, zc, coeffs, d)))
    return worst


def element_residual(elements: Sequence[DeficiencyElement],
                     ctx: DeficiencyContext, depth: int) -> float:
    """Eigenvalue-equation residual of a sum of elements, to any depth.

    Each element is radial on each branch subtree, so the sum's value at a
    vertex depends only on the vertex's position relative to the anchors.
    The residual is therefore evaluated on a representative set — every
    anchor path vertex, its children, and one descending chain per child —
    which covers one vertex from every equivalence class."""
    d = ctx.d
    reps: set = set()
    paths: set = {()}
    for elem in elements:
        if elem.anchor is not None:
            for j in range(len(elem.anchor) + 1):
                paths.add(elem.anchor[:j])
    for pfx in paths:
        reps.add(pfx)
        for i in range(1, d + 1):
            x = pfx + (i,)
            while len(x) <= depth:
                reps.add(x)
                x = x + (1,)

    def values(y: Address):
        total = None
        for elem in elements:
            v = elem.value_at(y, ctx)
            total = v if total is None else total + v
        return as_complex(0 if total is None else total)

    zc = as_complex(ctx.z)
    worst = 0.0
    for x in reps:
        if len(x) < depth:
            worst = max(worst, abs(_residual_at(values, x, zc, ctx.coeffs, d)))
    return worst


def element_max_abs(elements: Sequence[DeficiencyElement],
                    ctx: DeficiencyContext, depth: int) -> float:
    """Max |value| of a sum of elements over levels 0..depth, computed on
    the same representative set as element_residual."""
    d = ctx.d
    reps: set = {()}
    for elem in elements:
        if elem.anchor is not None:
            for j in range(len(elem.anchor) + 1):
                reps.add(elem.anchor[:j])
    frontier = list(reps)
    for pfx in frontier:
        for i in range(1, d + 1):
            x = pfx + (i,)
            while len(x) <= depth:
                reps.add(x)
                x = x + (1,)
    worst = 0.0
    for x in reps:
        total = 0.0
        for elem in elements:
            total += as_complex(elem.value_at(x, ctx))
        worst = max(worst, abs(total))
    return worst


# ---------------------------------------------------------------------------
# classifier
# ---------------------------------------------------------------------------

@dataclass
class ClassificationReport:
    verdict: str  # "essentially_selfadjoint" | "not_essentially_selfadjoint" | "inconclusive"
    series_p_status: str
    series_q_status: str
    terms_used: Tuple[int, int]
    z: complex
    scale: float
    diagnostics: str = ""

    def to_json_obj(self) -> dict:
        return {
            "verdict": self.verdict,
            "series_p_status": self.series_p_status,
            "series_q_status": self.series_q_status,
            "terms_used": list(self.terms_used),
            "z": [self.z.real, self.z.imag],
            "scale": self.scale,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)


def classify(coeffs: CoefficientSequence, d: int, z=1j, tol: float = 1e-12,
             n_max: int = 100_000, scale: Optional[float] = None) -> ClassificationReport:
    """Essential-selfadjointness test for the scaled tridiagonal matrix.

    Sums |p_n(z)|^2 and |q_n(z)|^2 with off-diagonal scale * lam_n
    (default scale sqrt(d), the radial restriction of the tree operator).
    Both series square-summable means nontrivial deficiency spaces; at
    least one divergent means essentially selfadjoint.  Real z (notably
    z = 0, in exact arithmetic) runs the classical determinacy test."""
    if scale is None:
        scale = math.sqrt(d)
    cache = PolyCache(coeffs, scale, z)

    def terms(which: str):
        n = 0
        while True:
            cache.ensure(n)
            v = cache.p[n] if which == "p" else cache.q[n]
            yield float(abs(as_complex(v))) ** 2
            n += 1

    from .errors import RecurrenceOverflow

    def run(which: str) -> SeriesResult:
        try:
            return sum_series(terms(which), tol=tol, n_max=n_max)
        except RecurrenceOverflow:
            return SeriesResult("diverged", math.inf, len(cache.p),
                                note="recurrence overflow: terms left the float range")

    res_p = run("p")
    res_q = run("q")
    if res_p.status == "converged" and res_q.status == "converged":
        verdict = "not_essentially_selfadjoint"
        diag = "both series converged: nontrivial deficiency spaces"
    elif res_p.status == "diverged" or res_q.status == "diverged":
        verdict = "essentially_selfadjoint"
        diag = "at least one series diverged: deficiency spaces are trivial"
    else:
        verdict = "inconclusive"
        diag = (f"no verdict within n_max={n_max}: "
                f"p-series {res_p.status} ({res_p.note}), "
                f"q-series {res_q.status} ({res_q.note})")
    if res_p.note or res_q.note:
        diag += f" | p: {res_p.note or 'ok'} | q: {res_q.note or 'ok'}"
    return ClassificationReport(verdict, res_p.status, res_q.status,
                                (res_p.terms_used, res_q.terms_used),
                                as_complex(z), float(scale), diag)


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------

def project_onto_Ax(y: Address, anchor: Optional[Address], ctx: DeficiencyContext,
                    alpha: AlphaTable) -> DeficiencyElement:
    """The projection of the point mass at y onto the branch space at the
    given anchor (anchor None: the one-dimensional radial space)."""
    if anchor is None:
        a0 = alpha.alpha(0)
        coeff = conj(ctx.f_zero(len(y))) / (a0 * a0)
        return DeficiencyElement(None, (coeff,), ctx.z)
    k = len(anchor)
    if len(y) <= k or y[:k] != anchor:
        raise ValueError(
            f"{format_address(y)} is not strictly below the anchor "
            f"{format_address(anchor)}")
    ak = alpha.alpha(k + 1)
    fy = conj(ctx.f_anchored(k, len(y)))
    i = y[k]
    d = ctx.d
    base = fy / (ak * ak)
    coeffs = []
    for j in range(1, d + 1):
        if j == i:
            coeffs.append(base * (1 - 1 / d))
        else:
            coeffs.append(-base / d)
    return DeficiencyElement(anchor, tuple(coeffs), ctx.z)


def project_full(y: Address, ctx: DeficiencyContext,
                 alpha: AlphaTable) -> List[DeficiencyElement]:
    """Projection of the point mass at y onto the full deficiency space:
    one element per path vertex strictly above y, plus the radial one."""
    out = [project_onto_Ax(y, None, ctx, alpha)]
    for j in range(len(y)):
        out.append(project_onto_Ax(y, y[:j], ctx, alpha))
    return out
