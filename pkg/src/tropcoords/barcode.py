"""Barcode data model: multisets of intervals encoded as (left endpoint, length).

A barcode is stored canonically: zero-length intervals removed, remaining
intervals sorted lexicographically by (x, d).  Two raw interval lists
represent the same point of barcode space iff their canonical forms are
equal as multisets, which the sorted tuple representation makes a plain
equality check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence


class BarcodeError(ValueError):
    """Invalid interval data (negative endpoint or length, non-finite value)."""


class BarcodeFormatError(ValueError):
    """Unparseable barcode file."""


@dataclass(frozen=True, order=True)
class Interval:
    """One bar: x = left endpoint (birth), d = length (persistence)."""

    x: float
    d: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "d", float(self.d))
        if not (self.x >= 0.0 and self.d >= 0.0):
            raise BarcodeError(f"interval ({self.x}, {self.d}) must have x >= 0 and d >= 0")
        if self.x == float("inf") or self.d == float("inf"):
            raise BarcodeError("intervals must be finite")


@dataclass(frozen=True)
class Barcode:
    """Barcode: tuple of intervals, kept sorted by (x, d) on construction."""

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        ivs = tuple(self.intervals)
        if any(not isinstance(iv, Interval) for iv in ivs):
            raise BarcodeError("Barcode holds Interval values; use canonicalize for raw pairs")
        object.__setattr__(self, "intervals", tuple(sorted(ivs)))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def lengths(self) -> list[float]:
        return [iv.d for iv in self.intervals]


def canonicalize(raw: Iterable[Interval | tuple[float, float]]) -> Barcode:
    """Drop zero-length intervals (exactly d == 0) and sort by (x, d)."""
    ivs = [iv if isinstance(iv, Interval) else Interval(*iv) for iv in raw]
    kept = sorted(iv for iv in ivs if iv.d != 0.0)
    return Barcode(tuple(kept))


def equivalent(a: Barcode, b: Barcode) -> bool:
    """Equality in barcode space: canonical multisets coincide."""
    return canonicalize(a.intervals) == canonicalize(b.intervals)


def pad(b: Barcode, n: int) -> list[Interval]:
    """Intervals of b extended with (0, 0) entries up to total length n."""
    if n < len(b):
        raise BarcodeError(f"cannot pad barcode of size {len(b)} down to {n}")
    return list(b.intervals) + [Interval(0.0, 0.0)] * (n - len(b))


def from_birth_death(pairs: Iterable[tuple[float, float]]) -> Barcode:
    """Convert (birth, death) pairs to the (x, d) convention and canonicalize."""
    ivs = []
    for birth, death in pairs:
        if birth < 0.0:
            raise BarcodeError(f"birth {birth} < 0")
        if death < birth:
            raise BarcodeError(f"death {death} < birth {birth}")
        ivs.append(Interval(birth, death - birth))
    return canonicalize(ivs)


# ---------------------------------------------------------------------------
# serialization: text is one `x,d` pair per line; JSON input `[[x, d], ...]`
# is also accepted.

def dumps(b: Barcode) -> str:
    return "".join(f"{iv.x:.12g},{iv.d:.12g}\n" for iv in b.intervals)


def loads(text: str) -> Barcode:
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            pairs = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise BarcodeFormatError(f"bad JSON barcode: {exc}") from exc
        if not isinstance(pairs, list) or not all(
            isinstance(p, list) and len(p) == 2 for p in pairs
        ):
            raise BarcodeFormatError("JSON barcode must be an array of [x, d] pairs")
        raw = pairs
    else:
        raw = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if len(fields) != 2:
                raise BarcodeFormatError(f"line {lineno}: expected `x,d`, got {line!r}")
            try:
                raw.append((float(fields[0]), float(fields[1])))
            except ValueError as exc:
                raise BarcodeFormatError(f"line {lineno}: {exc}") from exc
    try:
        return canonicalize(raw)
    except BarcodeError as exc:
        raise BarcodeFormatError(str(exc)) from exc


def read_file(path) -> Barcode:
    with open(path, "r", encoding="ascii") as fh:
        return loads(fh.read())


def write_file(path, b: Barcode) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps(b))
