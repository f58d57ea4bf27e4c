"""Uniform periodic grids on the unit box and the raster dump format.

Fields are plain numpy arrays. A scalar field has shape ``(ny, nx)`` (row-major,
y is the slow axis); a vector field has shape ``(dim, ny, nx)``. In 1D ``ny == 1``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MIN_CELLS = 4

RASTER_MAGIC = b"TIGR"
RASTER_VERSION = 1
# magic, version, dim, nx, ny, 4 pad bytes (C alignment of the f64), time: 32 bytes
_HEADER = struct.Struct("<4sIIII4xd")


@dataclass(frozen=True)
class Grid:
    dim: int
    nx: int
    ny: int = 1

    @property
    def dx(self) -> float:
        return 1.0 / self.nx

    @property
    def dy(self) -> float:
        return 1.0 / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy if self.dim == 2 else self.dx

    @property
    def min_spacing(self) -> float:
        return min(self.dx, self.dy) if self.dim == 2 else self.dx

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinates ``(x, y)`` broadcast to ``shape``."""
        x = (np.arange(self.nx) + 0.5) * self.dx
        y = (np.arange(self.ny) + 0.5) * self.dy if self.dim == 2 else np.zeros(1)
        return np.broadcast_to(x, self.shape), np.broadcast_to(y[:, None], self.shape)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def vector_zeros(self) -> np.ndarray:
        return np.zeros((self.dim,) + self.shape)


def make_grid(dim: int, nx: int, ny: int = 1) -> Grid:
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    if nx < MIN_CELLS:
        raise ValueError(f"nx={nx} is below the minimum stencil width {MIN_CELLS}")
    if dim == 1 and ny != 1:
        raise ValueError("1D grids must have ny=1")
    if dim == 2 and ny < MIN_CELLS:
        raise ValueError(f"ny={ny} is below the minimum stencil width {MIN_CELLS}")
    return Grid(dim, int(nx), int(ny))


def sample(field: np.ndarray, i: int, j: int = 0) -> float:
    """Value at cell ``(i, j)`` with periodic wrap for any signed indices."""
    ny, nx = field.shape
    return float(field[j % ny, i % nx])


def write_raster(path: str | Path, grid: Grid, field: np.ndarray, t: float) -> None:
    values = np.ascontiguousarray(field, dtype="<f8")
    if values.shape != grid.shape:
        raise ValueError(f"field shape {values.shape} does not match grid {grid.shape}")
    header = _HEADER.pack(RASTER_MAGIC, RASTER_VERSION, grid.dim, grid.nx, grid.ny, float(t))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(values.tobytes())


def read_raster(path: str | Path) -> tuple[Grid, float, np.ndarray]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated raster header")
    magic, version, dim, nx, ny, t = _HEADER.unpack_from(data)
    if magic != RASTER_MAGIC or version != RASTER_VERSION:
        raise ValueError(f"{path}: not a version-{RASTER_VERSION} raster")
    grid = Grid(dim, nx, ny)
    values = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if values.size != nx * ny:
        raise ValueError(f"{path}: expected {nx * ny} values, found {values.size}")
    return grid, t, values.reshape(grid.shape).astype(np.float64)
