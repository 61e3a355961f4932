"""Sampled matrix trajectories on an s-grid."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Trajectory:
    """Samples of a matrix function h(s), with optional residual columns.

    ``s`` has shape (m,), ``h`` has shape (m, n, n) and each residual curve
    has shape (m,). Residual entries are nonnegative max-norms.
    """

    s: np.ndarray
    h: np.ndarray
    residuals: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        h = np.asarray(self.h, dtype=float)
        if h.ndim != 3 or h.shape[0] != s.shape[0]:
            raise ValidationError("trajectory h must have one matrix per grid point")
        for name, col in self.residuals.items():
            col = np.asarray(col, dtype=float)
            if col.shape != s.shape:
                raise ValidationError(f"residual column {name!r} has wrong length")
            if col.size and col.min() < 0.0:
                raise ValidationError(f"residual column {name!r} has negative entries")
            self.residuals[name] = col
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "h", h)

    def max_residual(self) -> float:
        """Largest entry over all residual columns, 0.0 when there are none."""
        peaks = [float(col.max()) for col in self.residuals.values() if col.size]
        return max(peaks) if peaks else 0.0


def uniform_grid(s_max, steps) -> np.ndarray:
    """``steps`` equally spaced values from 0 to s_max inclusive."""
    steps = int(steps)
    if steps < 2:
        raise ValidationError("grid needs at least 2 points")
    return np.linspace(0.0, float(s_max), steps)
