"""Chaining per-order roots into sequences and measuring their convergence."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .exact import as_rational
from .hankel import HankelSpec, hankel_roots
from .highprec import DEFAULT_DIGITS, log10_abs
from .hill import hill_roots
from .potentials import PotentialSpec
from .series import SeriesParams, generate_series

HILL = "hill"
HANKEL = "hankel"
NO_ROOT = None  # sentinel in WidthScan.errors


@dataclass(frozen=True)
class RootSequence:
    method: str
    indices: tuple[int, ...]
    values: tuple
    label: int

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must align")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class ConvergenceReport:
    limit_estimate: object
    stable_digits: int
    self_diffs: tuple[float, ...]
    rate_slope: float
    reference_error: tuple[float, ...] | None = None
    converged_exactly: bool = False


@dataclass(frozen=True)
class WidthScan:
    method: str
    a_grid: tuple[Fraction, ...]
    errors: tuple  # log10 error per a; NO_ROOT where nothing was found
    M: int
    best_a: Fraction | None


def _log_gap(x, y) -> float:
    return log10_abs(as_rational(x) - as_rational(y))


def match_sequences(per_index_roots: Mapping[int, Sequence], window=None, method: str = HANKEL) -> list[RootSequence]:
    """Greedy nearest-neighbour chaining of roots across consecutive orders.

    Candidate links (new root, sequence ending at the previous order) are
    taken in order of increasing distance, ties toward the smaller value,
    and only within ``window``.  Unlinked roots open new sequences.
    The default window is ten times the median gap between neighbouring
    roots at the first order that has at least two.
    """
    indices = sorted(per_index_roots)
    if len(indices) < 2:
        raise ValueError("need roots at two or more orders to match")
    roots = {k: sorted(as_rational(v) for v in per_index_roots[k]) for k in indices}
    if window is None:
        window = _default_window(roots, indices)
    else:
        window = as_rational(window)

    chains: list[list[tuple[int, Fraction]]] = []
    previous = None
    for k in indices:
        open_chains = [c for c in chains if previous is not None and c[-1][0] == previous]
        pairs = sorted(
            ((abs(r - c[-1][1]), r, i, j) for i, r in enumerate(roots[k]) for j, c in enumerate(open_chains)),
            key=lambda t: (t[0], t[1], t[3]),
        )
        used_roots, used_chains = set(), set()
        for dist, r, i, j in pairs:
            if window is not None and dist > window:
                break
            if i in used_roots or j in used_chains:
                continue
            open_chains[j].append((k, r))
            used_roots.add(i)
            used_chains.add(j)
        for i, r in enumerate(roots[k]):
            if i not in used_roots:
                chains.append([(k, r)])
        previous = k
    chains.sort(key=lambda c: (c[0][0], c[0][1]))
    return [
        RootSequence(method, tuple(k for k, _ in c), tuple(v for _, v in c), label)
        for label, c in enumerate(chains)
    ]


def _default_window(roots: Mapping[int, list], indices: Sequence[int]) -> Fraction | None:
    for k in indices:
        rs = roots[k]
        if len(rs) >= 2:
            gaps = [b - a for a, b in zip(rs, rs[1:])]
            return 10 * statistics.median(gaps)
    return None  # no scale available: link without a distance cap


def _slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    pts = [(x, y) for x, y in zip(xs, ys) if math.isfinite(y)]
    if len(pts) < 2:
        return 0.0
    return statistics.linear_regression([p[0] for p in pts], [p[1] for p in pts]).slope


def convergence_report(seq: RootSequence, reference=None, digits: int = DEFAULT_DIGITS) -> ConvergenceReport:
    """Self-differences log10|E[k+1] - E[k]|, their least-squares slope per
    unit index, and optionally log10|E[k] - reference|."""
    if len(seq) < 3:
        raise ValueError("convergence report needs a sequence of length >= 3")
    diffs = tuple(_log_gap(b, a) for a, b in zip(seq.values, seq.values[1:]))
    slope = _slope(seq.indices[1:], diffs)
    exact = all(d == -math.inf for d in diffs)
    final = diffs[-1]
    stable = digits if final == -math.inf else max(0, math.floor(-final))
    ref_err = None
    if reference is not None:
        ref = as_rational(reference)
        ref_err = tuple(_log_gap(v, ref) for v in seq.values)
    return ConvergenceReport(
        limit_estimate=seq.values[-1],
        stable_digits=stable,
        self_diffs=diffs,
        rate_slope=slope,
        reference_error=ref_err,
        converged_exactly=exact,
    )


def best_sequence(seqs: Sequence[RootSequence]) -> RootSequence | None:
    """The sequence of length >= 3 with the smallest final self-difference."""
    candidates = [s for s in seqs if len(s) >= 3]
    if not candidates:
        return None
    return min(candidates, key=lambda s: (_log_gap(s.values[-1], s.values[-2]), s.label))


def tracking_target(per_index_roots: Mapping[int, Sequence]) -> Fraction | None:
    """Root at the highest order closest to any root of the two orders before.

    Determinants of neighbouring order share the root that approximates the
    eigenvalue, while their spurious companions move about; this picks it
    without knowledge of the answer.
    """
    indices = [k for k in sorted(per_index_roots) if per_index_roots[k]]
    if not indices:
        return None
    last = [as_rational(v) for v in per_index_roots[indices[-1]]]
    pool = [as_rational(v) for k in indices[-3:-1] for v in per_index_roots[k]]
    if not pool:
        return last[len(last) // 2]
    return min(last, key=lambda r: (min(abs(r - q) for q in pool), r))


def select_nearest(per_index_roots: Mapping[int, Sequence], target) -> dict[int, Fraction | None]:
    """For each order, the root closest to ``target`` (None if no roots)."""
    target = as_rational(target)
    out = {}
    for k in sorted(per_index_roots):
        rs = [as_rational(v) for v in per_index_roots[k]]
        out[k] = min(rs, key=lambda r: (abs(r - target), r)) if rs else None
    return out


def scan_width_parameter(
    method: str,
    potential: PotentialSpec,
    M: int,
    a_grid: Sequence,
    reference,
    lo,
    hi,
    tol=Fraction(1, 10**30),
    s: int = 0,
    precision: int = DEFAULT_DIGITS,
) -> WidthScan:
    """log10 error of the root nearest ``reference`` at order M for each a.

    For the Hankel method the order is D = (M + 1) // 2, the determinant
    using the same 2D - 1 coefficients as c_M.
    """
    if not a_grid:
        raise ValueError("a_grid must be nonempty")
    if reference is None:
        raise ValueError("width scan needs a reference value")
    ref = as_rational(reference)
    a_grid = tuple(as_rational(a) for a in a_grid)
    errors = []
    for a in a_grid:
        if method == HILL:
            table = generate_series(potential.extended(M), SeriesParams(a=a, s=s, J=M))
            hit = hill_roots(table, M, lo, hi, tol).nearest(ref)
        elif method == HANKEL:
            spec = HankelSpec((M + 1) // 2)
            table = generate_series(potential.extended(spec.required_J), SeriesParams(a=a, s=s, J=spec.required_J))
            hit = hankel_roots(table, spec, lo, hi, tol=tol, precision=precision, focus=ref).nearest(ref)
        else:
            raise ValueError(f"unknown method {method!r}")
        errors.append(NO_ROOT if hit is None else log10_abs(hit.value - ref))
    finite = [(e, a) for e, a in zip(errors, a_grid) if e is not NO_ROOT]
    best = min(finite, key=lambda t: (t[0], t[1]))[1] if finite else None
    return WidthScan(method=method, a_grid=a_grid, errors=tuple(errors), M=M, best_a=best)
