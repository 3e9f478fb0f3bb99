"""Three-term recurrences: first/second-kind values p_n(z), q_n(z), their
roots, and the norm series alpha_k(z)."""
from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .coefficients import CoefficientSequence, ShiftedCoefficients
from .errors import ConvergenceFailure, RealSpectralParameter, RecurrenceOverflow
from .exactnum import ExactComplex, abs2, as_complex, conj, exact_sqrt, is_exact

Coefficients = Union[CoefficientSequence, ShiftedCoefficients]

RATIO_CEILING = 0.99
CONVERGENCE_WINDOW = 8
STALL_WINDOW = 64


def _wants_exact(scale, z) -> bool:
    return is_exact(scale) or is_exact(z)


def poly_pairs(coeffs: Coefficients, scale, z) -> Iterator[tuple]:
    """Yield (n, p_n(z), q_n(z)) indefinitely.

    Off-diagonal entries are scale*lambda_n; initial data p_0 = 1,
    p_1 = (z - beta_0)/(scale*lambda_0), q_0 = 0, q_1 = 1/lambda_0.
    Runs in exact arithmetic when scale or z is an ExactComplex.
    """
    exact = _wants_exact(scale, z)
    if exact:
        if not is_exact(scale):
            scale = ExactComplex.from_rational(scale)
        if not is_exact(z):
            z = ExactComplex.from_rational(z)
        one, zero = ExactComplex.from_rational(1), ExactComplex.from_rational(0)
        lam = coeffs.lam_exact
        beta = coeffs.beta_exact
    else:
        scale = complex(scale)
        z = complex(z)
        one, zero = 1.0 + 0.0j, 0.0j
        lam = coeffs.lam
        beta = coeffs.beta

    p_prev, p_cur = zero, one
    q_prev, q_cur = zero, zero
    n = 0
    while True:
        yield n, p_cur, q_cur
        if n == 0:
            p_next = (z - beta(0)) / (scale * lam(0))
            q_next = one / lam(0)
        else:
            p_next = ((z - beta(n)) * p_cur - scale * lam(n - 1) * p_prev) / (scale * lam(n))
            q_next = ((z - beta(n)) * q_cur - scale * lam(n - 1) * q_prev) / (scale * lam(n))
        if not exact:
            if not (math.isfinite(p_next.real) and math.isfinite(p_next.imag)
                    and math.isfinite(q_next.real) and math.isfinite(q_next.imag)):
                raise RecurrenceOverflow(
                    f"recurrence value left the float range at index {n + 1}; "
                    "switch to exact mode or rescale")
        p_prev, p_cur = p_cur, p_next
        q_prev, q_cur = q_cur, q_next
        n += 1


@dataclass
class PolyTable:
    """Values p_0..p_N and q_0..q_N at a fixed spectral parameter."""

    coeffs: Coefficients
    scale: object
    z: object
    N: int
    p: list
    q: list
    exact_mode: bool

    def to_csv(self, fileobj) -> None:
        writer = csv.writer(fileobj, lineterminator="\n")
        writer.writerow(["n", "Re p", "Im p", "Re q", "Im q"])
        for n in range(self.N + 1):
            pv, qv = as_complex(self.p[n]), as_complex(self.q[n])
            writer.writerow([n, repr(pv.real), repr(pv.imag), repr(qv.real), repr(qv.imag)])


def compute_polys(coeffs: Coefficients, scale, z, N: int) -> PolyTable:
    """Tabulate p_n(z), q_n(z) up to index N.

    Exact mode is selected by passing ExactComplex values for scale or z
    (see exact_sqrt / exact_complex).
    """
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    p, q = [], []
    for n, pv, qv in poly_pairs(coeffs, scale, z):
        p.append(pv)
        q.append(qv)
        if n == N:
            break
    return PolyTable(coeffs, scale, z, N, p, q, _wants_exact(scale, z))


def wronskian_residual(table: PolyTable) -> list:
    """|p_n q_{n+1} - p_{n+1} q_n - 1/lambda_n| for each n < N.

    Exact tables give exact zeros."""
    out = []
    for n in range(table.N):
        if table.exact_mode:
            lam_inv = ExactComplex.from_rational(1) / ExactComplex.from_rational(
                table.coeffs.lam_exact(n))
            diff = table.p[n] * table.q[n + 1] - table.p[n + 1] * table.q[n] - lam_inv
            out.append(abs(diff))
        else:
            diff = table.p[n] * table.q[n + 1] - table.p[n + 1] * table.q[n] \
                - 1.0 / table.coeffs.lam(n)
            out.append(abs(diff))
    return out


def wronskian_scale(table: PolyTable) -> list:
    """Magnitude scale max(1, |p_n q_{n+1}| + |p_{n+1} q_n|, 1/lambda_n) per n,
    for relative residual checks."""
    out = []
    for n in range(table.N):
        out.append(max(1.0,
                       abs(as_complex(table.p[n])) * abs(as_complex(table.q[n + 1]))
                       + abs(as_complex(table.p[n + 1])) * abs(as_complex(table.q[n])),
                       1.0 / table.coeffs.lam(n)))
    return out


def _eval_poly_and_derivative(coeffs: Coefficients, scale: float, n: int, t: float):
    """p_n(t) and p_n'(t) via the differentiated recurrence."""
    p_prev, p_cur = 0.0, 1.0
    d_prev, d_cur = 0.0, 0.0
    for k in range(n):
        a = scale * coeffs.lam(k)
        b = scale * coeffs.lam(k - 1) if k > 0 else 0.0
        p_next = ((t - coeffs.beta(k)) * p_cur - b * p_prev) / a
        d_next = (p_cur + (t - coeffs.beta(k)) * d_cur - b * d_prev) / a
        p_prev, p_cur = p_cur, p_next
        d_prev, d_cur = d_cur, d_next
    return p_cur, d_cur


def poly_roots(coeffs: Coefficients, scale: float, n: int, polish: bool = True) -> np.ndarray:
    """The n real simple roots of p_n, ascending.

    Computed as eigenvalues of the leading n-by-n tridiagonal block with
    diagonal beta_k and off-diagonal scale*lambda_k, then polished by a
    few Newton steps on the recurrence evaluation.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    diag = np.array([coeffs.beta(k) for k in range(n)])
    off = np.array([scale * coeffs.lam(k) for k in range(n - 1)])
    try:
        roots = eigh_tridiagonal(diag, off, eigvals_only=True)
    except Exception as exc:  # pragma: no cover - scipy failure path
        raise ConvergenceFailure(f"tridiagonal eigensolve failed: {exc}") from exc
    roots = np.sort(roots)
    if polish:
        polished = []
        for t in roots:
            best = t
            pv, _ = _eval_poly_and_derivative(coeffs, scale, n, t)
            best_val = abs(pv)
            for _ in range(4):
                pv, dv = _eval_poly_and_derivative(coeffs, scale, n, t)
                if dv == 0:
                    break
                t = t - pv / dv
                pv2, _ = _eval_poly_and_derivative(coeffs, scale, n, t)
                if abs(pv2) < best_val:
                    best, best_val = t, abs(pv2)
            polished.append(best)
        roots = np.sort(np.array(polished))
    return roots


# ---------------------------------------------------------------------------
# series summation with a three-valued verdict
# ---------------------------------------------------------------------------

@dataclass
class SeriesResult:
    status: str  # "converged" | "diverged" | "inconclusive"
    partial_sum: float
    terms_used: int
    tail_estimate: float = 0.0
    ratio: Optional[float] = None
    note: str = ""


def sum_series(terms: Iterable[float], tol: float = 1e-12, n_max: int = 100_000,
               window: int = CONVERGENCE_WINDOW,
               stall_window: int = STALL_WINDOW) -> SeriesResult:
    """Sum nonnegative terms until a convergence or divergence verdict.

    Converged: the last `window` terms are all below tol * partial_sum and
    the median term ratio r over that window is below RATIO_CEILING; the
    geometric tail t_last * r / (1 - r) is reported.

    Diverged: the partial sum exceeds 1/tol, a term leaves the float range,
    or the terms stop decreasing (the median of the last `stall_window`
    terms is no smaller than the median of the preceding block).

    Otherwise inconclusive after n_max terms.
    """
    s = 0.0
    recent: list[float] = []  # last 2 * stall_window terms
    tail: list[float] = []    # last window + 1 terms
    count = 0
    for t in terms:
        if count >= n_max:
            break
        if not math.isfinite(t):
            return SeriesResult("diverged", s, count, note="term overflowed the float range")
        s += t
        count += 1
        tail.append(t)
        if len(tail) > window + 1:
            tail.pop(0)
        recent.append(t)
        if len(recent) > 2 * stall_window:
            recent.pop(0)

        if s > 1.0 / tol:
            return SeriesResult("diverged", s, count, note="partial sum exceeded 1/tol")

        if len(tail) == window + 1 and s > 0 and all(v < tol * s for v in tail[1:]):
            ratios = [tail[j + 1] / tail[j] for j in range(window) if tail[j] > 0]
            r = statistics.median(ratios) if ratios else 0.0
            if r < RATIO_CEILING:
                tail_est = tail[-1] * r / (1.0 - r) if 0 < r < 1 else 0.0
                return SeriesResult("converged", s, count, tail_est, r)

        if count % stall_window == 0 and len(recent) == 2 * stall_window:
            older = statistics.median(recent[:stall_window])
            newer = statistics.median(recent[stall_window:])
            if newer >= older and newer > 0:
                return SeriesResult(
                    "diverged", s, count,
                    note=f"terms stopped decreasing over {stall_window} consecutive terms")
    return SeriesResult("inconclusive", s, count,
                        note=f"no verdict after {count} terms")


class PolyCache:
    """Lazily extended p/q tables shared by the series computations."""

    def __init__(self, coeffs: Coefficients, scale, z):
        self._gen = poly_pairs(coeffs, scale, z)
        self.p: list = []
        self.q: list = []

    def ensure(self, n: int) -> None:
        while len(self.p) <= n:
            _, pv, qv = next(self._gen)
            self.p.append(pv)
            self.q.append(qv)


def alpha_sq_terms(coeffs: Coefficients, k: int, cache: PolyCache) -> Iterator:
    """Terms of the alpha_k(z)^2 series, in the arithmetic of the cache.

    k = 0: |p_n|^2 for n >= 0.
    k >= 1: lambda_{k-1}^2 |p_{k-1} q_n - q_{k-1} p_n|^2 for n >= k.
    """
    if k == 0:
        n = 0
        while True:
            cache.ensure(n)
            yield abs2(cache.p[n])
            n += 1
    else:
        cache.ensure(k)
        exact = is_exact(cache.p[0])
        if exact:
            lam2 = ExactComplex.from_rational(coeffs.lam_exact(k - 1) ** 2)
        else:
            lam2 = coeffs.lam(k - 1) ** 2
        pk, qk = cache.p[k - 1], cache.q[k - 1]
        n = k
        while True:
            cache.ensure(n)
            yield lam2 * abs2(pk * cache.q[n] - qk * cache.p[n])
            n += 1


@dataclass
class AlphaTable:
    """Norm coefficients alpha_0..alpha_K at a fixed non-real z."""

    z: complex
    d: int
    k_max: int
    alphas: list
    alpha_sqs: list
    statuses: list
    terms_used: list
    tail_estimates: list
    status: str
    tol: float
    n_max: int

    def alpha(self, k: int) -> float:
        from .errors import DivergedSeries, InconclusiveSeries
        if self.statuses[k] == "diverged":
            raise DivergedSeries(f"alpha_{k} series diverged at z = {self.z}")
        if self.statuses[k] != "converged":
            raise InconclusiveSeries(f"alpha_{k} series inconclusive at z = {self.z}")
        return self.alphas[k]


def alpha_series(coeffs: Coefficients, d: int, z: complex, k_max: int,
                 tol: float = 1e-12, n_max: int = 100_000) -> AlphaTable:
    """alpha_k(z) for k = 0..k_max, with per-k series verdicts.

    Requires non-real z; uses the sqrt(d)-scaled recurrence."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    zc = complex(z)
    if zc.imag == 0:
        raise RealSpectralParameter(f"alpha series needs a non-real z, got {z}")
    cache = PolyCache(coeffs, math.sqrt(d), zc)
    alphas, alpha_sqs, statuses, used, tails = [], [], [], [], []
    for k in range(k_max + 1):
        try:
            res = sum_series(alpha_sq_terms(coeffs, k, cache), tol=tol, n_max=n_max)
        except RecurrenceOverflow:
            res = SeriesResult("diverged", math.inf, len(cache.p),
                               note="recurrence overflow while summing")
        total = res.partial_sum + res.tail_estimate
        alphas.append(math.sqrt(total) if res.status == "converged" else math.nan)
        alpha_sqs.append(total)
        statuses.append(res.status)
        used.append(res.terms_used)
        tails.append(res.tail_estimate)
    if all(s == "converged" for s in statuses):
        overall = "converged"
    elif any(s == "diverged" for s in statuses):
        overall = "diverged"
    else:
        overall = "inconclusive"
    return AlphaTable(zc, d, k_max, alphas, alpha_sqs, statuses, used, tails,
                      overall, tol, n_max)


def alpha_sq_partial(coeffs: Coefficients, d: int, z, k: int, n_terms: int):
    """Partial sum of the alpha_k^2 series with exactly n_terms terms.

    Exact when z is an ExactComplex (the scale is then the exact sqrt(d))."""
    scale = exact_sqrt(d) if is_exact(z) else math.sqrt(d)
    cache = PolyCache(coeffs, scale, z)
    total = None
    for i, term in enumerate(alpha_sq_terms(coeffs, k, cache)):
        if i >= n_terms:
            break
        total = term if total is None else total + term
    if total is None:
        return ExactComplex.from_rational(0) if is_exact(z) else 0.0
    return total
