"""Cross-view completion of undefined similarity entries.

An entry that is undefined in one view is filled with the mean of that
entry over the views where it is defined; similarity values live in
[0, 1], so the fill is on the same scale as the data it replaces.  Pairs
defined in no view at all fall back to 0 (no evidence of similarity) and
are flagged, since the at-least-one-view guarantee covers instances, not
pairs.  Each completed matrix is then symmetrized, its diagonal zeroed,
and its entries clamped to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import DataError
from .similarity import MaskedSimilarity


class Provenance(IntEnum):
    """How each completed entry was produced."""

    NATIVE = 0          # defined in the view itself
    AVERAGED = 1        # mean over the views defining the entry
    ZERO_FALLBACK = 2   # defined nowhere; filled with 0


@dataclass(frozen=True)
class CompleteSimilarity:
    """Symmetric, zero-diagonal, [0, 1]-valued similarity plus entry provenance."""

    values: np.ndarray
    provenance: np.ndarray
    view_id: int = 0

    def __post_init__(self):
        A = self.values
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DataError("similarity matrix must be square")
        if np.abs(A - A.T).max() > 1e-12:
            raise DataError("similarity matrix must be symmetric within 1e-12")
        if np.abs(np.diagonal(A)).max() > 0.0:
            raise DataError("similarity diagonal must be exactly zero")
        if A.min() < 0.0 or A.max() > 1.0:
            raise DataError("similarity entries must lie in [0, 1]")


def postprocess(
    values: np.ndarray, provenance: np.ndarray | None = None, view_id: int = 0
) -> CompleteSimilarity:
    """Symmetrize, zero the diagonal, clamp to [0, 1]."""
    A = np.asarray(values, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DataError(f"expected a square matrix, got shape {A.shape}")
    A = (A + A.T) / 2.0
    np.fill_diagonal(A, 0.0)
    A = np.clip(A, 0.0, 1.0)
    if provenance is None:
        provenance = np.zeros(A.shape, dtype=np.uint8)
    else:
        provenance = np.asarray(provenance, dtype=np.uint8)
        # symmetrization mixes (i, j) and (j, i); keep the more synthetic tag
        provenance = np.maximum(provenance, provenance.T)
        np.fill_diagonal(provenance, Provenance.NATIVE)
    return CompleteSimilarity(values=A, provenance=provenance, view_id=view_id)


def complete_all(sims: list[MaskedSimilarity]) -> list[CompleteSimilarity]:
    """Fill every undefined entry of every view, then post-process each view.

    The fill for entry (i, j) of view v is the mean of that entry over all
    views where it is defined, accumulated in fixed view order so results
    do not depend on scheduling.  Defined entries are kept untouched
    before symmetrization.
    """
    if not sims:
        raise DataError("complete_all needs at least one similarity matrix")
    n = sims[0].values.shape[0]
    for s in sims:
        if s.values.shape != (n, n):
            raise DataError("similarity matrices must share the same shape")
    vals = np.stack([np.where(s.defined, s.values, 0.0) for s in sims])
    defined = np.stack([s.defined for s in sims])
    counts = defined.sum(axis=0)
    totals = vals.sum(axis=0)
    means = np.divide(totals, counts, out=np.zeros_like(totals), where=counts > 0)

    out = []
    for v, s in enumerate(sims):
        filled = np.where(defined[v], vals[v], means)
        prov = np.where(
            defined[v],
            np.uint8(Provenance.NATIVE),
            np.where(counts > 0, np.uint8(Provenance.AVERAGED), np.uint8(Provenance.ZERO_FALLBACK)),
        )
        out.append(postprocess(filled, prov, view_id=s.view_id))
    return out


def provenance_table(completed: list[CompleteSimilarity]) -> str:
    """Debug dump: per-view counts of native / averaged / zero-fallback entries."""
    lines = ["view      native    averaged    zero_fallback"]
    for cs in completed:
        counts = [(cs.provenance == p).sum() for p in Provenance]
        lines.append(
            f"{cs.view_id:<8d}{counts[0]:>8d}{counts[1]:>12d}{counts[2]:>17d}"
        )
    return "\n".join(lines)
