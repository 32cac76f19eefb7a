"""Coordinate functions on barcodes: elementary 2-symmetric max-plus
polynomials, their length-truncated rational variants, and the aggregate
digit-image features.

Every coordinate here is evaluated on the canonical form of its input
(zero-length bars dropped, bars sorted), so values are invariant under
interval permutation and under appending (x, 0) bars, bit for bit.

sigma for an orbit (k, l, p) is the max, over injective assignments of
k + l + p "rows" to distinct intervals, of the sum of row contributions:
a (1,0) row contributes x_i, a (0,1) row d_i, a (1,1) row x_i + d_i.
The rational coordinate E_{m,orbit} is sigma evaluated after replacing
each left endpoint x_i by min(x_i, m*d_i); unlike plain sigma, these are
Lipschitz against bottleneck and Wasserstein distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .barcode import Barcode, Interval


class CoordinateError(ValueError):
    pass


class SpecsFormatError(ValueError):
    """Unparseable coordinate-specs text."""


@dataclass(frozen=True)
class OrbitSpec:
    """Row multiplicities of the exponent matrix: k rows (1,0), l rows (0,1),
    p rows (1,1).  (0,0) rows contribute nothing and are not represented."""

    k: int
    l: int
    p: int

    def __post_init__(self):
        for name in ("k", "l", "p"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise CoordinateError(f"orbit count {name}={v!r} must be a nonnegative integer")
        if self.k + self.l + self.p < 1:
            raise CoordinateError("orbit needs at least one row")

    @property
    def rows(self) -> int:
        return self.k + self.l + self.p


@dataclass(frozen=True)
class Sigma:
    orbit: OrbitSpec


@dataclass(frozen=True)
class RationalE:
    m: int
    orbit: OrbitSpec

    def __post_init__(self):
        _check_m(self.m)


@dataclass(frozen=True)
class SumLengths:
    pass


@dataclass(frozen=True)
class SumMinXmd:
    m: int

    def __post_init__(self):
        _check_m(self.m)


@dataclass(frozen=True)
class SumMaxGap:
    m: int

    def __post_init__(self):
        _check_m(self.m)


CoordinateSpec = Union[Sigma, RationalE, SumLengths, SumMinXmd, SumMaxGap]


def _check_m(m) -> None:
    if not isinstance(m, int) or m < 1:
        raise CoordinateError(f"m={m!r} must be a positive integer")


def _canonical_bars(b: Barcode | Iterable) -> list[tuple[float, float]]:
    ivs = b.intervals if isinstance(b, Barcode) else tuple(b)
    bars = []
    for iv in ivs:
        x, d = (iv.x, iv.d) if isinstance(iv, Interval) else iv
        if d != 0.0:
            bars.append((x, d))
    bars.sort()
    return bars


# ---------------------------------------------------------------------------
# sigma and E


def sigma_eval(orbit: OrbitSpec, b: Barcode) -> float:
    """Max over injective row-to-interval assignments of the contribution sum.

    Fewer intervals than rows is legal: the barcode is padded with (0, 0)
    bars, which contribute 0 to any row.
    """
    bars = _canonical_bars(b)
    return _sigma_on_bars(orbit, bars)


def _sigma_on_bars(orbit: OrbitSpec, bars: Sequence[tuple[float, float]]) -> float:
    rows = orbit.rows
    n = max(len(bars), rows)
    w = np.zeros((rows, n))
    for i, (x, d) in enumerate(bars):
        w[: orbit.k, i] = x
        w[orbit.k : orbit.k + orbit.l, i] = d
        w[orbit.k + orbit.l :, i] = x + d
    row_ind, col_ind = linear_sum_assignment(w, maximize=True)
    return float(w[row_ind, col_ind].sum())


def e_eval(m: int, orbit: OrbitSpec, b: Barcode) -> float:
    """sigma after truncating each left endpoint to min(x_i, m*d_i)."""
    _check_m(m)
    bars = [(min(x, m * d), d) for x, d in _canonical_bars(b)]
    bars.sort()
    return _sigma_on_bars(orbit, bars)


# ---------------------------------------------------------------------------
# aggregate features (the digit-experiment block)


def _top_length_sums(bars: Sequence[tuple[float, float]], count: int = 4) -> list[float]:
    lengths = sorted((d for _, d in bars), reverse=True)
    sums = []
    acc = 0.0
    for i in range(count):
        if i < len(lengths):
            acc += lengths[i]
        sums.append(acc)
    return sums


def _sum_lengths(bars: Sequence[tuple[float, float]]) -> float:
    return sum(d for _, d in bars)


def _sum_min_xmd(bars: Sequence[tuple[float, float]], m: int) -> float:
    return sum(min(m * d, x) for x, d in bars)


def _sum_max_gap(bars: Sequence[tuple[float, float]], m: int) -> float:
    if not bars:
        return 0.0
    g = [min(m * d, x) + d for x, d in bars]
    top = max(g)
    return sum(top - gi for gi in g)


def mnist_features(b: Barcode, m: int = 28) -> tuple[float, ...]:
    """The seven per-barcode features used in the digit experiment.

    F1..F4: total length of the 1..4 longest bars (zero-padded).
    F5: sum of all lengths.
    F6: sum of min(m*d_i, x_i).
    F7: sum of (max_j g_j) - g_i where g_i = min(m*d_i, x_i) + d_i.
    Empty barcode: all zeros.
    """
    _check_m(m)
    bars = _canonical_bars(b)
    if not bars:
        return (0.0,) * 7
    f1, f2, f3, f4 = _top_length_sums(bars, 4)
    return (
        f1,
        f2,
        f3,
        f4,
        _sum_lengths(bars),
        _sum_min_xmd(bars, m),
        _sum_max_gap(bars, m),
    )


def evaluate_coordinate(spec: CoordinateSpec, b: Barcode) -> float:
    if isinstance(spec, Sigma):
        return sigma_eval(spec.orbit, b)
    if isinstance(spec, RationalE):
        return e_eval(spec.m, spec.orbit, b)
    bars = _canonical_bars(b)
    if isinstance(spec, SumLengths):
        return float(_sum_lengths(bars))
    if isinstance(spec, SumMinXmd):
        return float(_sum_min_xmd(bars, spec.m))
    if isinstance(spec, SumMaxGap):
        return float(_sum_max_gap(bars, spec.m))
    raise CoordinateError(f"unknown coordinate spec {spec!r}")


def featurize(b: Barcode, specs: Sequence[CoordinateSpec]) -> list[float]:
    return [evaluate_coordinate(s, b) for s in specs]


# ---------------------------------------------------------------------------
# specs files: one coordinate per line
#   sigma k l p | e m k l p | sumlen | summinx m | summaxgap m


def parse_specs_text(text: str) -> list[CoordinateSpec]:
    specs: list[CoordinateSpec] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            specs.append(_parse_spec_fields(fields))
        except (CoordinateError, ValueError) as exc:
            raise SpecsFormatError(f"line {lineno}: {exc}") from None
    return specs


def _parse_spec_fields(fields: list[str]) -> CoordinateSpec:
    head, args = fields[0], fields[1:]
    if head == "sigma":
        if len(args) != 3:
            raise ValueError("sigma takes 3 arguments: k l p")
        return Sigma(OrbitSpec(int(args[0]), int(args[1]), int(args[2])))
    if head == "e":
        if len(args) != 4:
            raise ValueError("e takes 4 arguments: m k l p")
        return RationalE(int(args[0]), OrbitSpec(int(args[1]), int(args[2]), int(args[3])))
    if head == "sumlen":
        if args:
            raise ValueError("sumlen takes no arguments")
        return SumLengths()
    if head == "summinx":
        if len(args) != 1:
            raise ValueError("summinx takes 1 argument: m")
        return SumMinXmd(int(args[0]))
    if head == "summaxgap":
        if len(args) != 1:
            raise ValueError("summaxgap takes 1 argument: m")
        return SumMaxGap(int(args[0]))
    raise ValueError(f"unknown coordinate {head!r}")


def parse_specs_file(path) -> list[CoordinateSpec]:
    with open(path, "r", encoding="ascii") as fh:
        return parse_specs_text(fh.read())


def spec_to_text(spec: CoordinateSpec) -> str:
    if isinstance(spec, Sigma):
        o = spec.orbit
        return f"sigma {o.k} {o.l} {o.p}"
    if isinstance(spec, RationalE):
        o = spec.orbit
        return f"e {spec.m} {o.k} {o.l} {o.p}"
    if isinstance(spec, SumLengths):
        return "sumlen"
    if isinstance(spec, SumMinXmd):
        return f"summinx {spec.m}"
    if isinstance(spec, SumMaxGap):
        return f"summaxgap {spec.m}"
    raise CoordinateError(f"unknown coordinate spec {spec!r}")


# ---------------------------------------------------------------------------
# separation search


def orbits_up_to(max_rows: int) -> list[OrbitSpec]:
    """All orbits with 1 <= k+l+p <= max_rows, in a fixed deterministic order."""
    out = []
    for total in range(1, max_rows + 1):
        for k in range(total + 1):
            for l in range(total - k + 1):
                out.append(OrbitSpec(k, l, total - k - l))
    return out


def separation_bound(a: Barcode, b: Barcode) -> int:
    """Smallest m guaranteed to saturate min(x, m*d) on both barcodes:
    ceil(max x/d over nonzero bars) + 1, at least 1."""
    bound = 1
    for bc in (a, b):
        for x, d in _canonical_bars(bc):
            bound = max(bound, math.ceil(x / d) + 1)
    return bound


def find_separating(
    a: Barcode, b: Barcode, max_rows: int = 3
) -> tuple[int, OrbitSpec] | None:
    """Search for (m, orbit) with e_eval(m, orbit, a) != e_eval(m, orbit, b).

    Scans m = 1 .. separation_bound and all orbits with at most max_rows
    rows; returns the first witness, or None (in particular for
    equivalent barcodes, which no coordinate can separate).
    """
    orbits = orbits_up_to(max_rows)
    for m in range(1, separation_bound(a, b) + 1):
        for orbit in orbits:
            if e_eval(m, orbit, a) != e_eval(m, orbit, b):
                return m, orbit
    return None


# ---------------------------------------------------------------------------
# feature matrices


@dataclass(frozen=True)
class FeatureColumn:
    spec: CoordinateSpec
    source: str  # which barcode of the pipeline this column reads, e.g. "TopDown/h0"


@dataclass(frozen=True)
class FeatureMatrix:
    columns: tuple[FeatureColumn, ...]
    values: np.ndarray  # shape (rows, len(columns)), float64, row-major

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != len(self.columns):
            raise CoordinateError(
                f"feature matrix shape {v.shape} does not match {len(self.columns)} columns"
            )
        object.__setattr__(self, "values", v)

    @property
    def rows(self) -> int:
        return int(self.values.shape[0])
