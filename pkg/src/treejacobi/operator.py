"""The Jacobi operator on both trees, radial averaging projections, radial
tridiagonal matrices, moments, and the branch-space membership test."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .coefficients import CoefficientSequence, ShiftedCoefficients, TreeConfig
from .errors import NotInSubtree, PatchTooLarge
from .exactnum import ExactComplex, as_complex, exact_sqrt, is_exact, is_zero
from .treecore import (APEX_SUCCESSOR, DEFAULT_ENTRY_BUDGET, GAMMA, Address,
                       LambdaPatch, SparseFunction, TreeKind, children,
                       format_address, parent)


def _lam_for(coeffs, n: int, exact: bool):
    if n < 0:
        return ExactComplex.from_rational(0) if exact else 0.0
    if exact:
        return ExactComplex.from_rational(coeffs.lam_exact(n))
    return coeffs.lam(n)


def _beta_for(coeffs, n: int, exact: bool):
    if exact:
        return ExactComplex.from_rational(coeffs.beta_exact(n))
    return coeffs.beta(n)


@dataclass(frozen=True)
class JacobiOperator:
    """J on the rooted tree (kind "gamma") or on a one-ended patch
    (kind "lambda", with the patch supplying levels).

    Rooted tree:   J d_x = lam_{n-1} d_parent + beta_n d_x + lam_n sum d_child
    One-ended:     J d_x = lam_{n-1} sum d_below + beta_n d_x + lam_n d_above
    with n the tree level of x and lam_{-1} = 0.
    """

    coeffs: CoefficientSequence
    tree: TreeConfig
    kind: str = "gamma"
    patch: Optional[LambdaPatch] = None

    def __post_init__(self):
        if self.kind not in ("gamma", "lambda"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind == "lambda" and self.patch is None:
            raise ValueError("a lambda operator needs a patch")

    @property
    def d(self) -> int:
        return self.tree.d

    def expected_kind(self) -> TreeKind:
        return GAMMA if self.kind == "gamma" else self.patch.kind()

    def apply(self, f: SparseFunction, exact: Optional[bool] = None) -> SparseFunction:
        if f.kind != self.expected_kind():
            raise NotInSubtree(
                f"function on {f.kind} cannot be fed to a {self.kind} operator")
        if exact is None:
            exact = any(is_exact(v) for v in f.entries.values())
        out: Dict[Address, object] = {}

        def acc(x: Address, v) -> None:
            out[x] = out.get(x, 0) + v

        if self.kind == "gamma":
            for x, v in f.entries.items():
                n = len(x)
                if n > 0:
                    acc(x[:-1], _lam_for(self.coeffs, n - 1, exact) * v)
                acc(x, _beta_for(self.coeffs, n, exact) * v)
                lam = _lam_for(self.coeffs, n, exact)
                for c in children(x, self.d):
                    acc(c, lam * v)
        else:
            patch = self.patch
            for x, v in f.entries.items():
                if x == APEX_SUCCESSOR:
                    raise PatchTooLarge(
                        "support reached the virtual successor; enlarge the patch")
                n = patch.level(x)
                if n > 0:
                    lam_dn = _lam_for(self.coeffs, n - 1, exact)
                    for i in range(1, self.d + 1):
                        acc(x + (i,), lam_dn * v)
                acc(x, _beta_for(self.coeffs, n, exact) * v)
                up = APEX_SUCCESSOR if not x else x[:-1]
                acc(up, _lam_for(self.coeffs, n, exact) * v)
        return SparseFunction(out, f.kind)


@dataclass(frozen=True)
class RadialMatrix:
    """The tridiagonal matrix acting on the radial subspace: diagonal
    beta_{k+j}, off-diagonal sqrt(d) * lam_{k+j}, starting at offset k."""

    coeffs: CoefficientSequence
    d: int
    offset: int = 0

    def shifted(self) -> ShiftedCoefficients:
        return ShiftedCoefficients(self.coeffs, self.offset)

    def diag(self, j: int) -> float:
        return self.coeffs.beta(self.offset + j)

    def offdiag(self, j: int) -> float:
        return math.sqrt(self.d) * self.coeffs.lam(self.offset + j)

    def offdiag_exact(self, j: int) -> ExactComplex:
        return exact_sqrt(self.d) * ExactComplex.from_rational(
            self.coeffs.lam_exact(self.offset + j))


def radial_matrix(J: JacobiOperator, k: int = 0) -> RadialMatrix:
    if k < 0:
        raise ValueError("offset must be nonnegative")
    return RadialMatrix(J.coeffs, J.d, k)


def moments(J: JacobiOperator, N: int, route: str = "matrix",
            budget: int = DEFAULT_ENTRY_BUDGET) -> List[Fraction]:
    """m_n = <J^n delta_root, delta_root> for n = 0..N, exact rationals.

    The matrix route iterates the radial tridiagonal matrix (polynomial
    cost); the tree route applies J on the tree directly (exponential in N,
    kept for cross-checks)."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if J.kind != "gamma":
        raise ValueError("moments are defined for the rooted-tree operator")
    if route == "matrix":
        sq = exact_sqrt(J.d)
        lam = [ExactComplex.from_rational(J.coeffs.lam_exact(n)) * sq for n in range(N)]
        beta = [ExactComplex.from_rational(J.coeffs.beta_exact(n)) for n in range(N + 1)]
        v = [ExactComplex.from_rational(1 if j == 0 else 0) for j in range(N + 1)]
        out = [Fraction(1)]
        for _ in range(N):
            w = []
            for j in range(N + 1):
                t = beta[j] * v[j]
                if j > 0:
                    t = t + lam[j - 1] * v[j - 1]
                if j < N:
                    t = t + lam[j] * v[j + 1]
                w.append(t)
            v = w
            m = v[0]
            if not (m.is_real and m.br == 0 and m.bi == 0):
                raise ArithmeticError(f"moment came out irrational: {m!r}")
            out.append(m.ar)
        return out
    if route == "tree":
        if J.d ** N > budget:
            raise PatchTooLarge(
                f"tree-route moment m_{N} touches {J.d ** N} vertices, "
                f"over the budget of {budget}")
        f = SparseFunction.delta((), value=ExactComplex.from_rational(1))
        out = [Fraction(1)]
        for _ in range(N):
            f = J.apply(f, exact=True)
            m = f.entries.get((), ExactComplex.from_rational(0))
            out.append(m.ar)
        return out
    raise ValueError(f"unknown moment route {route!r}")


def _group_by_level(f: SparseFunction, base: Address = ()) -> Dict[int, object]:
    sums: Dict[int, object] = {}
    for x, v in f.entries.items():
        k = len(x)
        sums[k] = sums.get(k, 0) + v
    return sums


def radial_average_E(f: SparseFunction, d: int,
                     budget: int = DEFAULT_ENTRY_BUDGET) -> SparseFunction:
    """Ef: value at each level-k vertex is the average of f over level k."""
    if f.kind != GAMMA:
        raise NotInSubtree("radial averaging is defined on the rooted tree")
    from .treecore import level_vertices
    sums = _group_by_level(f)
    out: Dict[Address, object] = {}
    for k, s in sums.items():
        if d ** k > budget:
            raise PatchTooLarge(
                f"averaging over level {k} needs {d ** k} entries, "
                f"over the budget of {budget}")
        avg = s * Fraction(1, d ** k) if is_exact(s) else s / (d ** k)
        if is_zero(avg):
            continue
        for x in level_vertices(k, d, budget):
            out[x] = avg
    return SparseFunction(out, GAMMA)


def subtree_average_Ex(f: SparseFunction, x: Address, d: int,
                       budget: int = DEFAULT_ENTRY_BUDGET) -> SparseFunction:
    """Per-level averaging within the subtree below x; values outside that
    subtree are left unchanged."""
    if f.kind != GAMMA:
        raise NotInSubtree("subtree averaging is defined on the rooted tree")
    from .treecore import subtree_vertices
    k = len(x)
    inside_sums: Dict[int, object] = {}
    out: Dict[Address, object] = {}
    max_rel = 0
    for y, v in f.entries.items():
        if y[:k] == x:
            rel = len(y) - k
            inside_sums[rel] = inside_sums.get(rel, 0) + v
            max_rel = max(max_rel, rel)
        else:
            out[y] = v
    for rel, s in inside_sums.items():
        count = d ** rel
        if count > budget:
            raise PatchTooLarge(
                f"averaging over {count} subtree vertices exceeds the budget")
        avg = s * Fraction(1, count) if is_exact(s) else s / count
        if is_zero(avg):
            continue
        def assign(prefix: Address, remaining: int) -> None:
            if remaining == 0:
                out[prefix] = avg
                return
            for i in range(1, d + 1):
                assign(prefix + (i,), remaining - 1)
        assign(x, rel)
    return SparseFunction(out, GAMMA)


@dataclass(frozen=True)
class MembershipReport:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


RADIALITY_RTOL = 1e-10


def _values_equal(a, b, scale: float) -> bool:
    if is_exact(a) and is_exact(b):
        return (a - b).is_zero
    return abs(as_complex(a) - as_complex(b)) <= RADIALITY_RTOL * max(scale, 1e-300)


def hx_membership(f: SparseFunction, x: Optional[Address], d: int) -> MembershipReport:
    """Whether f belongs to the branch space anchored at x.

    Anchored at x: support inside the subtree below x but not touching x,
    the child values sum to zero, f is radial on each child subtree, and the
    per-level profiles of different child subtrees are proportional with
    ratios f(x_i) : f(x_j).  Anchor None selects the radial subspace of the
    whole tree."""
    if f.kind != GAMMA:
        return MembershipReport(False, "not a rooted-tree function")
    if x is None:
        by_level: Dict[int, List] = {}
        for y, v in f.entries.items():
            by_level.setdefault(len(y), []).append(v)
        for lvl, vals in by_level.items():
            if len(vals) < d ** lvl:
                vals = vals + [0] * (d ** lvl - len(vals))
            scale = max(abs(as_complex(v)) for v in vals)
            ref = vals[0]
            for v in vals[1:]:
                if not _values_equal(v, ref, scale):
                    return MembershipReport(False, f"not radial at level {lvl}")
        return MembershipReport(True)

    k = len(x)
    # per-branch, per-relative-level values
    branch_levels: List[Dict[int, List]] = [dict() for _ in range(d)]
    for y, v in f.entries.items():
        if y[:k] != x or len(y) == k:
            return MembershipReport(
                False, f"support touches {format_address(y)} outside the "
                       f"punctured subtree below {format_address(x)}")
        branch = y[k] - 1
        rel = len(y) - k - 1
        branch_levels[branch].setdefault(rel, []).append(v)

    # radiality within each branch
    profiles: List[Dict[int, object]] = []
    for b in range(d):
        prof: Dict[int, object] = {}
        for rel, vals in branch_levels[b].items():
            if len(vals) < d ** rel:
                vals = vals + [0] * (d ** rel - len(vals))
            scale = max(abs(as_complex(v)) for v in vals)
            ref = vals[0]
            for v in vals[1:]:
                if not _values_equal(v, ref, scale):
                    return MembershipReport(
                        False, f"branch {b + 1} not radial at relative level {rel}")
            prof[rel] = ref
        profiles.append(prof)

    # zero child sum
    child_vals = [profiles[b].get(0, 0) for b in range(d)]
    total = sum(as_complex(v) for v in child_vals)
    scale = max((abs(as_complex(v)) for v in child_vals), default=0.0)
    if all(is_exact(v) or v == 0 for v in child_vals):
        exact_total = None
        for v in child_vals:
            exact_total = v if exact_total is None else exact_total + v
        if not is_zero(exact_total):
            return MembershipReport(False, "child values do not sum to zero")
    elif abs(total) > RADIALITY_RTOL * max(scale, 1e-300):
        return MembershipReport(False, "child values do not sum to zero")

    # cross-branch proportionality with ratios given by the child values
    ref_b = next((b for b in range(d) if not is_zero(child_vals[b])
                  and abs(as_complex(child_vals[b])) == max(
                      abs(as_complex(c)) for c in child_vals)), None)
    if ref_b is None:
        ref_b = next((b for b in range(d) if not is_zero(child_vals[b])), None)
    if ref_b is None:
        if any(prof for prof in profiles):
            return MembershipReport(
                False, "all child values vanish but deeper levels do not")
        return MembershipReport(True)
    c_ref = child_vals[ref_b]
    levels = sorted(set().union(*[prof.keys() for prof in profiles]))
    for rel in levels:
        v_ref = profiles[ref_b].get(rel, 0)
        for b in range(d):
            if b == ref_b:
                continue
            v_b = profiles[b].get(rel, 0)
            lhs = v_b * c_ref
            rhs = child_vals[b] * v_ref
            scale = max(abs(as_complex(lhs)), abs(as_complex(rhs)))
            if not _values_equal(lhs, rhs, scale):
                return MembershipReport(
                    False, f"branch {b + 1} profile not proportional at "
                           f"relative level {rel}")
    return MembershipReport(True)
