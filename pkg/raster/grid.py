import math
import numbers
from dataclasses import dataclass

import numpy as np

from regionkit.conf import region_setting

from .exceptions import GridTooLarge, InvalidGrid


@dataclass(frozen=True)
class Grid:
    """
    An axis-aligned window split into ``nx`` by ``ny`` cells.

    Bitmaps sample cell centres; contours sample the ``(nx + 1) x (ny + 1)``
    cell corners. Row 0 is the bottom row (``y_min``).
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        bounds = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(isinstance(v, numbers.Real) and math.isfinite(v) for v in bounds):
            raise InvalidGrid(f"Grid bounds must be finite, got {bounds}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise InvalidGrid(f"Grid needs x_min < x_max and y_min < y_max, got {bounds}")
        for size in (self.nx, self.ny):
            if isinstance(size, bool) or not isinstance(size, numbers.Integral) or size < 1:
                raise InvalidGrid(f"Grid resolution must be a positive integer, got {size!r}")

    @classmethod
    def from_window(cls, window, nx, ny=None):
        x_min, x_max, y_min, y_max = window
        return cls(x_min, x_max, y_min, y_max, nx, nx if ny is None else ny)

    @property
    def window(self):
        return (self.x_min, self.x_max, self.y_min, self.y_max)

    @property
    def cells(self):
        return self.nx * self.ny

    @property
    def cell_width(self):
        return (self.x_max - self.x_min) / self.nx

    @property
    def cell_height(self):
        return (self.y_max - self.y_min) / self.ny

    def check_size(self, cells=None):
        """Raise GridTooLarge past the MAX_GRID_CELLS setting."""
        cells = self.cells if cells is None else cells
        limit = region_setting('MAX_GRID_CELLS')
        if cells > limit:
            raise GridTooLarge(cells, limit)

    def x_centers(self):
        return self.x_min + (np.arange(self.nx) + 0.5) * self.cell_width

    def y_centers(self):
        return self.y_min + (np.arange(self.ny) + 0.5) * self.cell_height

    def x_corners(self):
        return np.linspace(self.x_min, self.x_max, self.nx + 1)

    def y_corners(self):
        return np.linspace(self.y_min, self.y_max, self.ny + 1)

    def quadrant_masks(self):
        """Cell masks keyed by quadrant name, split at the middle row and column."""
        lower = (np.arange(self.ny) < self.ny / 2)[:, None]
        left = (np.arange(self.nx) < self.nx / 2)[None, :]
        return {
            'lower_left': lower & left,
            'lower_right': lower & ~left,
            'upper_left': ~lower & left,
            'upper_right': ~lower & ~left,
        }


@dataclass(frozen=True, eq=False)
class Bitmap:
    """
    Membership per cell, ``bits[row, column]`` with row 0 at ``y_min``.

    Boundary cells count as inside; undefined cells count as outside and are
    flagged in ``undefined``.
    """

    grid: Grid
    bits: np.ndarray
    undefined: np.ndarray

    def __post_init__(self):
        shape = (self.grid.ny, self.grid.nx)
        if self.bits.shape != shape or self.undefined.shape != shape:
            raise InvalidGrid(
                f"Bitmap arrays {self.bits.shape} and {self.undefined.shape} do not match grid {shape}"
            )

    @property
    def inside_cells(self):
        return int(np.count_nonzero(self.bits))

    @property
    def undefined_cells(self):
        return int(np.count_nonzero(self.undefined))

    @property
    def inside_fraction(self):
        return self.inside_cells / self.grid.cells

    def complement(self):
        return Bitmap(self.grid, ~self.bits, self.undefined)
