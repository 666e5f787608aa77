"""Finite ordered point configurations."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class PointSetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PointSet:
    """Ordered list of distinct points in ``R^n``, with optional labels."""

    points: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1 and pts.size == 0:
            pts = pts.reshape(0, 0)
        if pts.ndim != 2:
            raise PointSetError(f"points must form a 2-d array, got shape {pts.shape}")
        if pts.shape[0] and pts.shape[1] == 0:
            raise PointSetError("points need at least one coordinate")
        if not np.all(np.isfinite(pts)):
            raise PointSetError("points have non-finite coordinates")
        for i in range(1, pts.shape[0]):
            gaps = np.abs(pts[:i] - pts[i]).max(axis=1)
            j = int(np.argmin(gaps))
            if gaps[j] <= 1e-12:
                raise PointSetError(f"points {j} and {i} coincide")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != pts.shape[0]:
                raise PointSetError(f"{len(labels)} labels for {pts.shape[0]} points")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.points.shape[0]

    def __getitem__(self, i):
        return self.points[i]

    def __iter__(self):
        return iter(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def scaled(self, factor: float) -> "PointSet":
        return PointSet(self.points * factor, self.labels)

    def pair_differences(self):
        """``(i, j, x_j - x_i)`` for ``i < j``."""
        i, j = np.triu_indices(len(self), 1)
        return i, j, self.points[j] - self.points[i]

    def to_dict(self) -> dict:
        d = {"points": self.points.tolist()}
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d) -> "PointSet":
        if isinstance(d, list):
            return cls(np.asarray(d, dtype=float))
        try:
            return cls(np.asarray(d["points"], dtype=float), d.get("labels"))
        except (KeyError, TypeError):
            raise PointSetError("point set object needs a 'points' field") from None

    @classmethod
    def from_json(cls, text: str) -> "PointSet":
        return cls.from_dict(json.loads(text))


def standard_basis(n: int) -> PointSet:
    return PointSet(np.eye(n), tuple(f"e{i + 1}" for i in range(n)))


def cube_vertices(n: int) -> PointSet:
    """The ``2^n`` points of ``{-1, 1}^n`` in lexicographic order."""
    grid = np.array(np.meshgrid(*[[-1.0, 1.0]] * n, indexing="ij")).reshape(n, -1).T
    return PointSet(grid)
