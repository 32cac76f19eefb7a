"""Sweep filtrations of binary images and persistent homology over Z/2.

A binary image becomes a 2-complex on its foreground pixels: one vertex
per foreground pixel, one edge per 8-adjacent pair, and triangles on
mutually adjacent triples (which always sit inside some 2x2 block).  A
sweep direction assigns each vertex its row or column index (possibly
reversed); a simplex enters the filtration at the max of its vertices'
values (lower star).

When all four pixels of a 2x2 block are foreground, its four triples are
pairwise dependent over Z/2 (they bound a combinatorial sphere): keeping
all four would create a spurious 2-cycle in every filled block.  We add
the three triangles that come earliest in the filtration order and omit
the last; the h0/h1 barcodes are unchanged (in column reduction the last
dependent column is exactly the one that reduces to zero) and the final
complex satisfies V - E + F = b0 - b1 with no 2-cycles.

Essential classes never die inside the image, so they are assigned
death = sweep extent (row count for vertical sweeps, column count for
horizontal ones) -- one past the largest possible vertex value.  All
indices are 0-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from .barcode import Barcode, from_birth_death


class ImageError(ValueError):
    pass


class ComplexError(ValueError):
    """Filtered complex violating its invariants (bad faces or values)."""


class PgmFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GrayImage:
    rows: int
    cols: int
    pixels: bytes  # row-major intensities 0..255

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ImageError(f"image dimensions {self.rows}x{self.cols} must be positive")
        if len(self.pixels) != self.rows * self.cols:
            raise ImageError(
                f"expected {self.rows * self.cols} pixels, got {len(self.pixels)}"
            )

    def at(self, r: int, c: int) -> int:
        return self.pixels[r * self.cols + c]


@dataclass(frozen=True)
class BinaryImage:
    rows: int
    cols: int
    bits: bytes  # row-major, values 0 or 1

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ImageError(f"image dimensions {self.rows}x{self.cols} must be positive")
        if len(self.bits) != self.rows * self.cols:
            raise ImageError(f"expected {self.rows * self.cols} bits, got {len(self.bits)}")
        if any(v not in (0, 1) for v in self.bits):
            raise ImageError("binary image bits must be 0 or 1")

    def at(self, r: int, c: int) -> int:
        return self.bits[r * self.cols + c]


class SweepDirection(Enum):
    TopDown = "top"
    BottomUp = "bottom"
    LeftRight = "left"
    RightLeft = "right"


def threshold(img: GrayImage, t: int = 100) -> BinaryImage:
    """Foreground = intensity strictly greater than t."""
    bits = bytes(1 if v > t else 0 for v in img.pixels)
    return BinaryImage(img.rows, img.cols, bits)


def sweep_value(dir: SweepDirection, rows: int, cols: int, r: int, c: int) -> int:
    if dir is SweepDirection.TopDown:
        return r
    if dir is SweepDirection.BottomUp:
        return rows - 1 - r
    if dir is SweepDirection.LeftRight:
        return c
    if dir is SweepDirection.RightLeft:
        return cols - 1 - c
    raise ValueError(f"unknown sweep direction {dir!r}")


def sweep_extent(dir: SweepDirection, rows: int, cols: int) -> int:
    """Death value for essential classes: one past the max vertex value."""
    if dir in (SweepDirection.TopDown, SweepDirection.BottomUp):
        return rows
    return cols


@dataclass(frozen=True)
class Simplex:
    dim: int
    verts: tuple[int, ...]  # sorted pixel indices
    value: float

    def sort_key(self):
        return (self.value, self.dim, self.verts)


@dataclass(frozen=True)
class FilteredComplex:
    simplices: tuple[Simplex, ...]  # sorted by (value, dim, verts)
    extent: float  # essential-death value

    def validate(self) -> None:
        vertex_value = {}
        seen = set()
        for idx, s in enumerate(self.simplices):
            if s.dim not in (0, 1, 2) or len(s.verts) != s.dim + 1:
                raise ComplexError(f"simplex {s} has inconsistent dimension")
            if tuple(sorted(s.verts)) != s.verts or len(set(s.verts)) != len(s.verts):
                raise ComplexError(f"simplex {s} vertices must be sorted and distinct")
            if s.value < 0:
                raise ComplexError(f"simplex {s} has negative value")
            key = (s.dim, s.verts)
            if key in seen:
                raise ComplexError(f"duplicate simplex {s}")
            seen.add(key)
            if idx > 0 and s.sort_key() < self.simplices[idx - 1].sort_key():
                raise ComplexError("simplices out of filtration order")
            if s.dim == 0:
                vertex_value[s.verts[0]] = s.value
            else:
                for v in s.verts:
                    if v not in vertex_value:
                        raise ComplexError(f"simplex {s} references missing vertex {v}")
                if s.value != max(vertex_value[v] for v in s.verts):
                    raise ComplexError(f"simplex {s} value is not the max of its vertices")
                for facet in combinations(s.verts, s.dim):
                    if (s.dim - 1, facet) not in seen:
                        raise ComplexError(f"face {facet} of {s} missing or out of order")


_NEIGHBOR_OFFSETS = ((0, 1), (1, -1), (1, 0), (1, 1))  # index-increasing half of 8-adjacency


def sweep_filtration(img: BinaryImage, dir: SweepDirection) -> FilteredComplex:
    rows, cols = img.rows, img.cols
    fg = [(r, c) for r in range(rows) for c in range(cols) if img.at(r, c)]

    def val(r, c):
        return float(sweep_value(dir, rows, cols, r, c))

    def vid(r, c):
        return r * cols + c

    simplices = []
    for r, c in fg:
        simplices.append(Simplex(0, (vid(r, c),), val(r, c)))
    for r, c in fg:
        for dr, dc in _NEIGHBOR_OFFSETS:
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < rows and 0 <= c2 < cols and img.at(r2, c2):
                simplices.append(
                    Simplex(1, (vid(r, c), vid(r2, c2)), max(val(r, c), val(r2, c2)))
                )
    for r in range(rows - 1):
        for c in range(cols - 1):
            block = [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)]
            present = [rc for rc in block if img.at(*rc)]
            if len(present) < 3:
                continue
            triangles = []
            for skip in range(len(present)) if len(present) == 4 else (None,):
                triple = present if skip is None else [
                    rc for t, rc in enumerate(present) if t != skip
                ]
                verts = tuple(sorted(vid(*rc) for rc in triple))
                value = max(val(*rc) for rc in triple)
                triangles.append(Simplex(2, verts, value))
            if len(triangles) == 4:
                # full block: drop the last triangle in filtration order; it is
                # the dependent column and its removal keeps h0/h1 unchanged
                triangles.sort(key=Simplex.sort_key)
                triangles = triangles[:3]
            simplices.extend(triangles)
    simplices.sort(key=Simplex.sort_key)
    return FilteredComplex(tuple(simplices), float(sweep_extent(dir, rows, cols)))


def persistent_homology(k: FilteredComplex) -> tuple[Barcode, Barcode]:
    """Boundary-matrix column reduction over Z/2; returns (h0, h1).

    Finite pairs use (birth value, death value); essential classes die at
    the complex's extent.  Zero-persistence pairs vanish in canonicalization.
    """
    k.validate()
    simplices = k.simplices
    index = {(s.dim, s.verts): i for i, s in enumerate(simplices)}

    # columns as integer bitmasks over row indices
    boundary = []
    for s in simplices:
        col = 0
        if s.dim > 0:
            for facet in combinations(s.verts, s.dim):
                col |= 1 << index[(s.dim - 1, facet)]
        boundary.append(col)

    reduced = [0] * len(simplices)
    pivot_owner: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    for j, col in enumerate(boundary):
        while col:
            low = col.bit_length() - 1
            owner = pivot_owner.get(low)
            if owner is None:
                break
            col ^= reduced[owner]
        reduced[j] = col
        if col:
            low = col.bit_length() - 1
            pivot_owner[low] = j
            pairs.append((low, j))

    killed = {birth for birth, _ in pairs}
    essential = [
        i for i, col in enumerate(reduced) if col == 0 and i not in killed
    ]

    h0_pairs = []
    h1_pairs = []
    for birth, death in pairs:
        b, d = simplices[birth], simplices[death]
        if b.dim == 0:
            h0_pairs.append((b.value, d.value))
        elif b.dim == 1:
            h1_pairs.append((b.value, d.value))
    for i in essential:
        s = simplices[i]
        if s.dim == 0:
            h0_pairs.append((s.value, k.extent))
        elif s.dim == 1:
            h1_pairs.append((s.value, k.extent))
    return from_birth_death(h0_pairs), from_birth_death(h1_pairs)


def sweep_barcodes(img: BinaryImage, dir: SweepDirection) -> tuple[Barcode, Barcode]:
    return persistent_homology(sweep_filtration(img, dir))


def connected_component_count(img: BinaryImage) -> int:
    """8-connected foreground components by flood fill."""
    rows, cols = img.rows, img.cols
    seen = bytearray(rows * cols)
    count = 0
    for start in range(rows * cols):
        if not img.bits[start] or seen[start]:
            continue
        count += 1
        stack = [start]
        seen[start] = 1
        while stack:
            p = stack.pop()
            r, c = divmod(p, cols)
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    if dr == 0 and dc == 0:
                        continue
                    r2, c2 = r + dr, c + dc
                    if 0 <= r2 < rows and 0 <= c2 < cols:
                        q = r2 * cols + c2
                        if img.bits[q] and not seen[q]:
                            seen[q] = 1
                            stack.append(q)
    return count


# ---------------------------------------------------------------------------
# PGM input (8-bit binary, magic P5)


def read_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise PgmFormatError("not a binary PGM file (magic P5 missing)")
    # header: magic, width, height, maxval, separated by whitespace/comments
    pos = 2
    fields = []
    while len(fields) < 3:
        m = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\d+)").match(data, pos)
        if m is None:
            raise PgmFormatError("truncated PGM header")
        fields.append(int(m.group(1)))
        pos = m.end()
    width, height, maxval = fields
    if maxval > 255 or maxval <= 0:
        raise PgmFormatError(f"only 8-bit PGM supported, maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    payload = data[pos : pos + width * height]
    if len(payload) != width * height:
        raise PgmFormatError(
            f"expected {width * height} pixel bytes, got {len(payload)}"
        )
    return GrayImage(rows=height, cols=width, pixels=payload)


def write_pgm(path, img: GrayImage) -> None:
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (img.cols, img.rows))
        fh.write(img.pixels)
