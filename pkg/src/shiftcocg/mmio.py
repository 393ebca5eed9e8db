"""Matrix Market coordinate-format reader/writer for symmetric matrices.

Supports real, integer and complex fields with the ``general`` or
``symmetric`` qualifiers.  A symmetric-qualified file stores one triangle,
which is expanded to full storage; a general-qualified file must contain a
numerically symmetric matrix or it is rejected.  Diagnostics carry the
offending line number.
"""

from __future__ import annotations

import numpy as np

from .linalg import SparseSymmetricMatrix

__all__ = [
    "DuplicateEntryError",
    "IndexOutOfBoundsError",
    "MalformedHeaderError",
    "MatrixMarketError",
    "SymmetryViolationError",
    "read_matrix_market",
    "write_matrix_market",
]


class MatrixMarketError(ValueError):
    """Base class for Matrix Market parse failures (carries a line number)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class MalformedHeaderError(MatrixMarketError):
    pass


class IndexOutOfBoundsError(MatrixMarketError):
    pass


class DuplicateEntryError(MatrixMarketError):
    pass


class SymmetryViolationError(MatrixMarketError):
    pass


_SUPPORTED_FIELDS = ("real", "integer", "complex")
_SUPPORTED_SYMMETRIES = ("general", "symmetric")


def read_matrix_market(path) -> SparseSymmetricMatrix:
    """Parse a Matrix Market coordinate file into full symmetric CSR storage."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if not lines:
        raise MalformedHeaderError("empty file", 1)
    header = lines[0].strip().split()
    if len(header) != 5 or header[0] != "%%MatrixMarket":
        raise MalformedHeaderError(f"bad banner {lines[0].strip()!r}", 1)
    _, obj, fmt, fieldname, symmetry = (tok.lower() for tok in header)
    if obj != "matrix" or fmt != "coordinate":
        raise MalformedHeaderError(f"unsupported object/format {obj!r}/{fmt!r}", 1)
    if fieldname not in _SUPPORTED_FIELDS:
        raise MalformedHeaderError(f"unsupported field {fieldname!r}", 1)
    if symmetry not in _SUPPORTED_SYMMETRIES:
        raise MalformedHeaderError(f"unsupported symmetry qualifier {symmetry!r}", 1)

    lineno = 1
    size_line = None
    for lineno, raw in enumerate(lines[1:], start=2):
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        size_line = text
        break
    if size_line is None:
        raise MalformedHeaderError("missing size line")
    parts = size_line.split()
    if len(parts) != 3:
        raise MalformedHeaderError(f"bad size line {size_line!r}", lineno)
    try:
        nrows, ncols, nnz = (int(p) for p in parts)
    except ValueError as exc:
        raise MalformedHeaderError(f"bad size line {size_line!r}", lineno) from exc
    if nrows != ncols:
        raise MalformedHeaderError(f"matrix is {nrows}x{ncols}, not square", lineno)

    want_values = 2 if fieldname == "complex" else 1
    entries: dict[tuple[int, int], complex] = {}
    entry_line: dict[tuple[int, int], int] = {}
    count = 0
    for entry_no, raw in enumerate(lines[lineno:], start=lineno + 1):
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        parts = text.split()
        if len(parts) != 2 + want_values:
            raise MatrixMarketError(f"expected {2 + want_values} tokens, got {len(parts)}", entry_no)
        try:
            i = int(parts[0]) - 1
            j = int(parts[1]) - 1
            if fieldname == "complex":
                value = complex(float(parts[2]), float(parts[3]))
            else:
                value = complex(float(parts[2]), 0.0)
        except ValueError as exc:
            raise MatrixMarketError(f"unparseable entry {text!r}", entry_no) from exc
        if not (0 <= i < nrows and 0 <= j < ncols):
            raise IndexOutOfBoundsError(f"entry ({i + 1}, {j + 1}) outside {nrows}x{ncols}", entry_no)
        key = (i, j)
        mirrored = (j, i)
        if key in entries or (symmetry == "symmetric" and mirrored in entries and i != j):
            first = entry_line.get(key, entry_line.get(mirrored))
            raise DuplicateEntryError(
                f"duplicate entry ({i + 1}, {j + 1}) (first seen at line {first})", entry_no
            )
        entries[key] = value
        entry_line[key] = entry_no
        count += 1
    if count != nnz:
        raise MatrixMarketError(f"size line promised {nnz} entries, file has {count}")

    if symmetry == "symmetric":
        full = dict(entries)
        for (i, j), value in entries.items():
            if i != j:
                full[(j, i)] = value
        entries = full
    else:
        for (i, j), value in entries.items():
            partner = entries.get((j, i))
            if partner is None or partner != value:
                raise SymmetryViolationError(
                    f"entry ({i + 1}, {j + 1}) has no matching transpose value", entry_line[(i, j)]
                )

    if entries:
        rows, cols = (np.array(k) for k in zip(*entries.keys()))
        vals = np.array(list(entries.values()), dtype=np.complex128)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0, dtype=np.complex128)
    return SparseSymmetricMatrix.from_coo(nrows, rows, cols, vals)


def write_matrix_market(matrix: SparseSymmetricMatrix, path, comment: str | None = None) -> None:
    """Write the lower triangle in coordinate format with a symmetric qualifier.

    The field is ``real`` when every stored value has zero imaginary part,
    ``complex`` otherwise; values carry full double precision.
    """
    dense_rows = np.repeat(np.arange(matrix.dim), np.diff(matrix.indptr))
    cols = matrix.indices
    keep = dense_rows >= cols
    rows, cols, vals = dense_rows[keep], cols[keep], matrix.data[keep]
    is_complex = bool(np.any(vals.imag != 0.0))
    field = "complex" if is_complex else "real"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {field} symmetric\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{matrix.dim} {matrix.dim} {rows.size}\n")
        if is_complex:
            for i, j, v in zip(rows, cols, vals):
                fh.write(f"{i + 1} {j + 1} {v.real:.17g} {v.imag:.17g}\n")
        else:
            for i, j, v in zip(rows, cols, vals):
                fh.write(f"{i + 1} {j + 1} {v.real:.17g}\n")
