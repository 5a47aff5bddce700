from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``x0 < x0 + dx < ... < x0 + cells*dx``."""

    x0: float
    dx: float
    cells: int

    def __post_init__(self):
        if not (self.dx > 0 and np.isfinite(self.dx)):
            raise ValueError(f"grid spacing must be positive, got {self.dx}")
        if int(self.cells) < 1:
            raise ValueError(f"grid needs at least one cell, got {self.cells}")
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "cells", int(self.cells))

    @classmethod
    def spanning(cls, a: float, b: float, cells: int) -> "Grid":
        if not b > a:
            raise ValueError(f"empty interval [{a}, {b}]")
        return cls(a, (b - a) / cells, cells)

    @classmethod
    def with_spacing(cls, a: float, b: float, max_dx: float) -> "Grid":
        """Smallest uniform grid on ``[a, b]`` with spacing at most ``max_dx``."""
        cells = max(1, int(np.ceil((b - a) / max_dx - 1e-9)))
        return cls.spanning(a, b, cells)

    @property
    def x1(self) -> float:
        return self.x0 + self.cells * self.dx

    @property
    def nodes(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.cells + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.x0 + self.dx * (np.arange(self.cells) + 0.5)

    def same_as(self, other: "Grid", rtol: float = 1e-12) -> bool:
        scale = max(1.0, abs(self.x0), abs(self.x1))
        return (
            self.cells == other.cells
            and abs(self.x0 - other.x0) <= rtol * scale
            and abs(self.dx - other.dx) <= rtol * self.dx
        )

    def to_json(self) -> dict:
        return {"x0": self.x0, "dx": self.dx, "cells": self.cells}

    @classmethod
    def from_json(cls, obj: dict) -> "Grid":
        return cls(float(obj["x0"]), float(obj["dx"]), int(obj["cells"]))
