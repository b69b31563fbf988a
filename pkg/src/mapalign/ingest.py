"""Loading, validation, and 2D projection of representation sets.

A representation set is an n x d matrix of item embeddings plus the item ids,
optional categorical labels, free-text metadata, and per-item numeric
attributes. Sets are validated eagerly and immutable once built.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateProjectionError,
    DimensionMismatchError,
    DuplicateItemError,
    IngestError,
    InsufficientOverlapError,
    NonFiniteValueError,
)


@dataclass(frozen=True)
class RepresentationSet:
    """Validated, immutable bundle of items and their embedding matrix."""

    name: str
    items: tuple[str, ...]
    matrix: np.ndarray
    labels: dict[str, str] | None = None
    meta: dict[str, str] | None = None
    numeric_attrs: dict[str, dict[str, float]] | None = None
    row_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        matrix = np.ascontiguousarray(np.asarray(self.matrix, dtype=np.float64))
        if matrix.ndim != 2:
            raise DimensionMismatchError(f"matrix must be 2-dimensional, got shape {matrix.shape}")
        n, d = matrix.shape
        if n < 2:
            raise IngestError(f"need at least 2 items, got {n}")
        if d < 1:
            raise IngestError("need at least 1 embedding dimension")
        if len(self.items) != n:
            raise DimensionMismatchError(
                f"{len(self.items)} item ids for {n} matrix rows", detail={"n_items": len(self.items), "n_rows": n}
            )
        bad = np.argwhere(~np.isfinite(matrix))
        if bad.size:
            row, col = (int(v) for v in bad[0])
            raise NonFiniteValueError(
                f"non-finite matrix entry at row {row}, col {col} (item {self.items[row]!r})",
                detail={"row": row, "col": col},
            )
        index: dict[str, int] = {}
        for i, item in enumerate(self.items):
            if item in index:
                raise DuplicateItemError(f"duplicate item id {item!r}")
            index[item] = i
        for mapping, what in ((self.labels, "labels"), (self.meta, "meta")):
            if mapping:
                unknown = set(mapping) - set(index)
                if unknown:
                    raise IngestError(f"{what} reference unknown items: {sorted(unknown)[:5]}")
        if self.numeric_attrs:
            for attr, per_item in self.numeric_attrs.items():
                for item, value in per_item.items():
                    if item not in index:
                        raise IngestError(f"attr {attr!r} references unknown item {item!r}")
                    if not np.isfinite(value):
                        raise NonFiniteValueError(f"attr {attr!r} has non-finite value for item {item!r}")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "row_index", index)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]

    def rows(self, items: Sequence[str]) -> np.ndarray:
        return self.matrix[[self.row_index[i] for i in items]]

    def subset(self, items: Sequence[str]) -> "RepresentationSet":
        """New set restricted to `items`, rows reordered to match."""
        keep = set(items)
        return RepresentationSet(
            name=self.name,
            items=tuple(items),
            matrix=self.rows(items),
            labels={k: v for k, v in (self.labels or {}).items() if k in keep} or None,
            meta={k: v for k, v in (self.meta or {}).items() if k in keep} or None,
            numeric_attrs={
                attr: {k: v for k, v in per_item.items() if k in keep}
                for attr, per_item in (self.numeric_attrs or {}).items()
            }
            or None,
        )


@dataclass(frozen=True)
class SessionInput:
    """The two sets under comparison plus their shared item universe."""

    set_a: RepresentationSet
    set_b: RepresentationSet
    shared_items: tuple[str, ...]


def _read_id_csv(path: Path, value_column: str) -> dict[str, str]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "id" not in reader.fieldnames:
            raise IngestError(f"{path}: expected a CSV with an 'id' column")
        if value_column not in reader.fieldnames:
            raise IngestError(f"{path}: expected a column named {value_column!r}")
        return {row["id"]: row[value_column] for row in reader}


def _read_attrs_csv(path: Path) -> dict[str, dict[str, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or reader.fieldnames[0] != "id":
            raise IngestError(f"{path}: attrs CSV must start with an 'id' column")
        attrs: dict[str, dict[str, float]] = {name: {} for name in reader.fieldnames[1:]}
        for row in reader:
            for name in attrs:
                try:
                    attrs[name][row["id"]] = float(row[name])
                except ValueError as exc:
                    raise IngestError(f"{path}: bad numeric value for attr {name!r}: {row[name]!r}") from exc
    return attrs


def load_representation_set(manifest_path: str | Path) -> RepresentationSet:
    """Load a set from a JSON manifest (binary f32 payload) or a single CSV.

    Manifest format: {"name", "n", "d", "dtype": "f32", "matrix": <relpath>,
    "items": <relpath>, "labels"?, "meta"?, "attrs"?}.  The CSV variant is a
    header row `id,<col>,...` followed by one row per item.
    """
    path = Path(manifest_path)
    if not path.exists():
        raise IngestError(f"manifest not found: {path}")
    if path.suffix.lower() == ".csv":
        return _load_csv(path)

    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    for key in ("name", "n", "d", "dtype", "matrix", "items"):
        if key not in manifest:
            raise IngestError(f"manifest missing required key {key!r}")
    if manifest["dtype"] != "f32":
        raise IngestError(f"unsupported dtype {manifest['dtype']!r}; only 'f32' is supported")
    n, d = int(manifest["n"]), int(manifest["d"])
    base = path.parent

    items_path = base / manifest["items"]
    if not items_path.exists():
        raise IngestError(f"items file not found: {items_path}")
    items = tuple(line for line in items_path.read_text(encoding="utf-8").splitlines() if line)
    if len(items) != n:
        raise DimensionMismatchError(f"manifest declares n={n} but items file has {len(items)} ids")

    matrix_path = base / manifest["matrix"]
    if not matrix_path.exists():
        raise IngestError(f"matrix file not found: {matrix_path}")
    payload = matrix_path.read_bytes()
    expected = n * d * 4
    if len(payload) != expected:
        raise DimensionMismatchError(
            f"matrix payload is {len(payload)} bytes, expected {expected} for n={n}, d={d}",
            detail={"actual": len(payload), "expected": expected},
        )
    matrix = np.frombuffer(payload, dtype="<f4").reshape(n, d).astype(np.float64)

    labels = meta = None
    attrs = None
    if manifest.get("labels"):
        labels = _read_id_csv(base / manifest["labels"], "label")
    if manifest.get("meta"):
        meta = _read_id_csv(base / manifest["meta"], "text")
    if manifest.get("attrs"):
        attrs = _read_attrs_csv(base / manifest["attrs"])
    return RepresentationSet(
        name=str(manifest["name"]), items=items, matrix=matrix, labels=labels, meta=meta, numeric_attrs=attrs
    )


def _load_csv(path: Path) -> RepresentationSet:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "id":
            raise IngestError(f"{path}: CSV must start with an 'id' column")
        items: list[str] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DimensionMismatchError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
            items.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: bad numeric value") from exc
    return RepresentationSet(name=path.stem, items=tuple(items), matrix=np.array(rows, dtype=np.float64))


def save_representation_set(rset: RepresentationSet, directory: str | Path, stem: str | None = None) -> Path:
    """Write a set as manifest + payload files; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or rset.name
    matrix_name = f"{stem}.f32"
    items_name = f"{stem}.items.txt"
    (directory / matrix_name).write_bytes(rset.matrix.astype("<f4").tobytes())
    (directory / items_name).write_text("".join(f"{i}\n" for i in rset.items), encoding="utf-8")
    manifest = {
        "name": rset.name,
        "n": rset.n,
        "d": rset.d,
        "dtype": "f32",
        "matrix": matrix_name,
        "items": items_name,
    }
    if rset.labels:
        name = f"{stem}.labels.csv"
        _write_id_csv(directory / name, "label", rset.labels)
        manifest["labels"] = name
    if rset.meta:
        name = f"{stem}.meta.csv"
        _write_id_csv(directory / name, "text", rset.meta)
        manifest["meta"] = name
    if rset.numeric_attrs:
        name = f"{stem}.attrs.csv"
        attr_names = sorted(rset.numeric_attrs)
        with open(directory / name, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id"] + attr_names)
            for item in rset.items:
                writer.writerow([item] + [repr(rset.numeric_attrs[a][item]) for a in attr_names])
        manifest["attrs"] = name
    manifest_path = directory / f"{stem}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest_path


def _write_id_csv(path: Path, column: str, mapping: Mapping[str, str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", column])
        for item, value in mapping.items():
            writer.writerow([item, value])


def intersect_items(a: RepresentationSet, b: RepresentationSet) -> SessionInput:
    """Pair two sets on their common items, ordered by `a`'s item order."""
    in_b = set(b.items)
    shared = tuple(item for item in a.items if item in in_b)
    if len(shared) < 2:
        raise InsufficientOverlapError(
            f"sets {a.name!r} and {b.name!r} share only {len(shared)} items; need at least 2"
        )
    return SessionInput(set_a=a, set_b=b, shared_items=shared)


def project_2d(rset: RepresentationSet) -> dict[str, tuple[float, float]]:
    """Centered PCA scores on the top two principal axes.

    Signs are fixed by forcing the largest-magnitude loading of each axis
    positive, so the output is fully deterministic.
    """
    if bool(np.all(rset.matrix == rset.matrix[0])):
        raise DegenerateProjectionError("all rows identical; projection undefined")
    centered = rset.matrix - rset.matrix.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    k = min(2, vt.shape[0])
    scores = np.zeros((rset.n, 2))
    scores[:, :k] = u[:, :k] * s[:k]
    for axis in range(k):
        loading = vt[axis]
        if loading[int(np.argmax(np.abs(loading)))] < 0:
            scores[:, axis] = -scores[:, axis]
    return {item: (float(scores[i, 0]), float(scores[i, 1])) for i, item in enumerate(rset.items)}
