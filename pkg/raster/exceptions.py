class RasterError(Exception):
    """Base class for rasterisation and export errors."""


class InvalidGrid(RasterError, ValueError):
    """Grid bounds or resolution are out of range."""


class GridTooLarge(InvalidGrid):
    def __init__(self, cells, limit):
        self.cells = cells
        self.limit = limit
        super().__init__(f"Grid has {cells} cells, more than the limit of {limit}")


class GridMismatch(RasterError, ValueError):
    """Two bitmaps were sampled on different grids."""


class ExportError(RasterError):
    """Writing an output file failed."""

    def __init__(self, path, error):
        self.path = path
        super().__init__(f"Cannot write {path}: {error}")
