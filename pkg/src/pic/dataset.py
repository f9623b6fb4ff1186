"""Multi-view data model, file ingestion, and the incomplete-data masking protocol.

A dataset is a list of per-view feature matrices (one column per instance)
plus an n-by-m boolean observation mask: ``mask[i, v]`` is True when
instance i was sampled in view v.  Every instance must be observed in at
least one view.  Masking a complete dataset turns a chosen fraction of
instances into "partial examples" that keep at least one view and lose at
least one.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import DataError

_MAX_SEED = 2**64


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class MultiViewDataset:
    """Immutable container for m feature views over n shared instances.

    views   : tuple of m float matrices, each d_v x n (features x instances)
    mask    : n x m boolean observation matrix
    labels  : optional length-n integer ground-truth cluster ids (0-based)
    name    : dataset identifier used in run records
    """

    views: tuple
    mask: np.ndarray
    labels: np.ndarray | None = None
    name: str = "unnamed"

    def __post_init__(self):
        views = tuple(_frozen(np.asarray(v, dtype=float)) for v in self.views)
        if len(views) < 2:
            raise DataError(f"need at least 2 views, got {len(views)}")
        for v, X in enumerate(views):
            if X.ndim != 2:
                raise DataError(f"view {v} is not a matrix")
            if not np.isfinite(X).all():
                raise DataError(f"view {v} contains non-finite values")
        n = views[0].shape[1]
        for v, X in enumerate(views):
            if X.shape[1] != n:
                raise DataError(
                    f"instance count mismatch: view {v} has {X.shape[1]} "
                    f"columns, expected {n}"
                )
        mask = _frozen(np.asarray(self.mask, dtype=bool))
        if mask.shape != (n, len(views)):
            raise DataError(
                f"mask shape {mask.shape} does not match (n, m) = ({n}, {len(views)})"
            )
        rows_without_view = np.flatnonzero(~mask.any(axis=1))
        if rows_without_view.size:
            raise DataError(
                f"instance has no observed view (first offender: {rows_without_view[0]})"
            )
        labels = self.labels
        if labels is not None:
            labels = np.asarray(labels)
            if labels.shape != (n,):
                raise DataError(f"labels length {labels.shape} != n = {n}")
            labels = _frozen(relabel(labels))
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.mask.shape[0]

    @property
    def m(self) -> int:
        return self.mask.shape[1]

    @property
    def observed_counts(self) -> np.ndarray:
        """Number of observed instances per view (column sums of the mask)."""
        return self.mask.sum(axis=0)

    @property
    def is_complete(self) -> bool:
        return bool(self.mask.all())


@dataclass(frozen=True)
class MaskingSpec:
    """Masking parameters: fraction of instances to make partial, and a seed."""

    per: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.per <= 1.0:
            raise DataError(f"per must be in [0, 1], got {self.per}")
        if not 0 <= int(self.seed) < _MAX_SEED:
            raise DataError("seed must fit in an unsigned 64-bit integer")


def relabel(labels) -> np.ndarray:
    """Map arbitrary label ids to 0-based contiguous integers (sorted-id order)."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise DataError("empty label vector")
    _, inverse = np.unique(labels, return_inverse=True)
    return inverse.astype(np.int64)


def apply_per_mask(ds: MultiViewDataset, spec: MaskingSpec) -> MultiViewDataset:
    """Turn a complete dataset into an incomplete one.

    Exactly round(per * n) instances (round half to even) are chosen
    uniformly without replacement.  Each chosen instance gets a view
    pattern drawn uniformly from all binary vectors of length m excluding
    all-zeros (the instance would vanish) and all-ones (it would not be
    partial).  Deterministic given ``spec.seed``.
    """
    if not ds.is_complete:
        raise DataError("apply_per_mask requires a complete dataset")
    n, m = ds.n, ds.m
    n_partial = int(round(spec.per * n))
    rng = np.random.default_rng(spec.seed)
    chosen = rng.choice(n, size=n_partial, replace=False)
    # codes are uniform over {1, ..., 2^m - 2}: never all-zeros, never all-ones
    codes = rng.integers(1, 2**m - 1, size=n_partial)
    mask = np.array(ds.mask, copy=True)
    for i, code in zip(chosen, codes):
        mask[i, :] = [(code >> v) & 1 for v in range(m)]
    return MultiViewDataset(views=ds.views, mask=mask, labels=ds.labels, name=ds.name)


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit sub-seed from a base seed and arbitrary hashable parts.

    Uses SHA-256 of the canonical repr so trial seeds are reproducible
    across platforms and Python versions.
    """
    key = "|".join(repr(p) for p in parts).encode()
    digest = hashlib.sha256(key).digest()
    return (int(base_seed) ^ int.from_bytes(digest[:8], "little")) % _MAX_SEED


# ---------------------------------------------------------------------------
# file I/O
# ---------------------------------------------------------------------------

def _read_matrix(path: Path) -> np.ndarray:
    with open(path) as fh:
        first = fh.readline()
    delimiter = "," if "," in first else None
    try:
        mat = np.loadtxt(path, delimiter=delimiter, ndmin=2, dtype=float)
    except ValueError as exc:
        raise DataError(f"non-numeric value in {path}: {exc}") from exc
    return mat


def load_dataset(manifest_path) -> MultiViewDataset:
    """Read a dataset from a manifest file.

    The manifest is YAML with keys ``views`` (list of at least two matrix
    files, rows = features, columns = instances), and optional ``mask``,
    ``labels`` and ``name``.  Paths are resolved relative to the manifest.
    A missing mask means every instance is observed in every view.
    """
    manifest_path = Path(manifest_path)
    try:
        with open(manifest_path) as fh:
            manifest = yaml.safe_load(fh)
    except OSError as exc:
        raise DataError(f"cannot read manifest {manifest_path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise DataError(f"malformed manifest {manifest_path}: {exc}") from exc
    if not isinstance(manifest, dict) or "views" not in manifest:
        raise DataError(f"manifest {manifest_path} lacks a 'views' list")
    base = manifest_path.parent
    view_files = manifest["views"]
    if not isinstance(view_files, list) or len(view_files) < 2:
        raise DataError("manifest must list at least 2 view files")
    views = [_read_matrix(base / f) for f in view_files]
    n = views[0].shape[1]
    m = len(views)

    if manifest.get("mask"):
        raw = _read_matrix(base / manifest["mask"])
        if raw.shape != (n, m):
            raise DataError(
                f"mask shape {raw.shape} does not match (n, m) = ({n}, {m})"
            )
        bad = ~np.isin(raw, (0.0, 1.0))
        if bad.any():
            raise DataError("mask entries must be 0 or 1")
        mask = raw.astype(bool)
    else:
        mask = np.ones((n, m), dtype=bool)

    labels = None
    if manifest.get("labels"):
        labels = _read_matrix(base / manifest["labels"]).ravel()
        if labels.size != n:
            raise DataError(f"labels length {labels.size} != n = {n}")

    return MultiViewDataset(
        views=tuple(views),
        mask=mask,
        labels=labels,
        name=str(manifest.get("name", manifest_path.stem)),
    )


def save_dataset(ds: MultiViewDataset, out_dir) -> Path:
    """Write view files, mask, optional labels, and a manifest; return the manifest path.

    Feature columns of unobserved (instance, view) pairs are written as
    zeros so that masked values can never leak into downstream runs.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"name": ds.name, "views": []}
    for v, X in enumerate(ds.views):
        fname = f"view_{v}.txt"
        masked = np.array(X, copy=True)
        masked[:, ~ds.mask[:, v]] = 0.0
        np.savetxt(out_dir / fname, masked, fmt="%.17g")
        manifest["views"].append(fname)
    np.savetxt(out_dir / "mask.txt", ds.mask.astype(int), fmt="%d")
    manifest["mask"] = "mask.txt"
    if ds.labels is not None:
        np.savetxt(out_dir / "labels.txt", ds.labels, fmt="%d")
        manifest["labels"] = "labels.txt"
    manifest_path = out_dir / "manifest.yaml"
    with open(manifest_path, "w") as fh:
        yaml.safe_dump(manifest, fh, sort_keys=False)
    return manifest_path
