"""Serialization: config-stamped CSV/JSON artifacts, grid text, operator blobs.

Every CSV artifact starts with ``#``-prefixed comment lines echoing the
full canonical config plus its SHA-256, then RFC-4180 rows; floats are
written with ``repr`` (shortest round-trip form) so identical runs give
byte-identical files.  JSON artifacts carry the same echo under
``config``/``config_sha256`` keys.  Operators serialize to a raw binary
layout: two little-endian uint64 dims, then the row-major matrix as
interleaved little-endian float64 (re, im) pairs.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .config import canonical_text, config_hash
from .groups import AffineGrid

__all__ = [
    "format_value",
    "write_csv",
    "write_json",
    "write_grid_text",
    "read_grid_text",
    "write_operator",
    "read_operator",
    "cohen_map_rows",
    "localization_rows",
]


def format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _header_lines(cfg):
    lines = [f"# {line}" for line in canonical_text(cfg).strip().splitlines()]
    lines.append(f"# config-sha256 = {config_hash(cfg)}")
    return lines


def write_csv(path, cfg, fieldnames, rows):
    """Write rows (dicts) with a commented config header."""
    with open(path, "w", newline="") as fh:
        for line in _header_lines(cfg):
            fh.write(line + "\r\n")
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: format_value(row[k]) for k in fieldnames})


def write_json(path, cfg, payload):
    doc = {"config": dict(sorted(cfg.items())), "config_sha256": config_hash(cfg)}
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# grids: columnar text, one node per row


def write_grid_text(path, grid, cfg=None):
    with open(path, "w") as fh:
        if cfg:
            for line in _header_lines(cfg):
                fh.write(line + "\n")
        if isinstance(grid, AffineGrid):
            fh.write("# columns: x a weight_r\n")
            coords = grid.node_coords()
            w = grid.weight
            for x, a in coords:
                fh.write(f"{x!r} {a!r} {w!r}\n")
        else:
            fh.write("# columns: j k weight_r\n")
            for j, k in grid.node_coords():
                fh.write(f"{int(j)} {int(k)} 1.0\n")


def read_grid_text(path):
    """Read back node coordinates and weights written by write_grid_text."""
    coords, weights = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b, w = line.split()
            coords.append((float(a), float(b)))
            weights.append(float(w))
    return np.array(coords), np.array(weights)


# ---------------------------------------------------------------------------
# operators: dims header + row-major little-endian complex pairs


def write_operator(path, op):
    mat = np.ascontiguousarray(op.matrix, dtype=np.complex128)
    with open(path, "wb") as fh:
        np.array(mat.shape, dtype="<u8").tofile(fh)
        interleaved = np.empty(mat.size * 2, dtype="<f8")
        interleaved[0::2] = mat.real.ravel()
        interleaved[1::2] = mat.imag.ravel()
        interleaved.tofile(fh)


def read_operator(path, basis):
    from .operators import OperatorRep

    with open(path, "rb") as fh:
        dims = np.fromfile(fh, dtype="<u8", count=2)
        rows, cols = int(dims[0]), int(dims[1])
        data = np.fromfile(fh, dtype="<f8", count=rows * cols * 2)
    mat = (data[0::2] + 1j * data[1::2]).reshape(rows, cols)
    return OperatorRep(basis, mat)


# ---------------------------------------------------------------------------
# row builders for the standard artifacts


def cohen_map_rows(cmap):
    """CSV rows (coordinates, re, im) for a sampled Cohen-class map."""
    grid = cmap.grid
    coords = grid.node_coords()
    vals = cmap.values
    if isinstance(grid, AffineGrid):
        names = ("x", "a", "re", "im")
    else:
        names = ("j", "k", "re", "im")
    rows = [
        {
            names[0]: coords[i, 0],
            names[1]: coords[i, 1],
            "re": float(vals[i].real),
            "im": float(vals[i].imag),
        }
        for i in range(len(vals))
    ]
    return list(names), rows


LOCALIZATION_FIELDS = [
    "R",
    "mu_r",
    "mu_r_quad",
    "trace",
    "count_above",
    "nonzero_count",
    "ratio",
    "lemma_bound",
    "deviation",
]


def localization_rows(reports):
    return [
        {
            "R": rep.R,
            "mu_r": rep.mu_r,
            "mu_r_quad": rep.mu_r_quad,
            "trace": rep.trace,
            "count_above": rep.count_above,
            "nonzero_count": rep.nonzero_count,
            "ratio": rep.ratio,
            "lemma_bound": rep.lemma_bound,
            "deviation": rep.deviation,
        }
        for rep in reports
    ]
