"""Uniform periodic lattices and sampled functions with growth envelopes."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Origin-centered periodic lattice: points -L/2 + m h, period L = N h."""

    dimension: int
    points_per_axis: int
    spacing: float

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ValueError("grid dimension must be 1, 2 or 3")
        n = self.points_per_axis
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError("points_per_axis must be a power of two >= 8")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")

    @property
    def period(self) -> float:
        return self.points_per_axis * self.spacing

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dimension

    def axis(self) -> np.ndarray:
        n, h = self.points_per_axis, self.spacing
        return (np.arange(n) - n // 2) * h

    def points(self) -> np.ndarray:
        """All lattice points, shape (N^d, d), row-major."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.dimension), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def radius(self) -> np.ndarray:
        """Euclidean norm |x| on the lattice, shaped like values arrays."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.dimension), indexing="ij")
        return np.sqrt(sum(m**2 for m in mesh))

    def freq_axis(self) -> np.ndarray:
        """Frequencies 2 pi k / L in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points_per_axis, d=self.spacing)

    def freq_points(self) -> np.ndarray:
        """All lattice frequencies in FFT order, shape (N^d, d)."""
        fx = self.freq_axis()
        mesh = np.meshgrid(*([fx] * self.dimension), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def index_of(self, x) -> tuple[int, ...]:
        """Lattice index of a point; raises if x is off-lattice."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = x / self.spacing + self.points_per_axis // 2
        rounded = np.rint(idx)
        if np.max(np.abs(idx - rounded)) > 1e-9:
            raise ValueError(f"point {x} is not on the lattice")
        if np.any(rounded < 0) or np.any(rounded >= self.points_per_axis):
            raise ValueError(f"point {x} is outside the window")
        return tuple(int(i) for i in rounded)


def evaluate_on(fn: Callable, pts: np.ndarray, dimension: int) -> np.ndarray:
    """Call fn with the package's point convention (scalars in d=1)."""
    if dimension == 1:
        return np.asarray(fn(pts[..., 0] if pts.ndim > 1 else pts))
    return np.asarray(fn(pts))


@dataclass
class GridFunction:
    """Complex samples on a grid together with a certified growth envelope.

    The envelope (bound, gamma) asserts |u(x)| <= bound * (1 + |x|^gamma) on
    the window; it is verified by a direct scan at construction.
    """

    grid: Grid
    values: np.ndarray
    bound: float
    gamma: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).reshape(self.grid.shape)
        if not np.all(np.isfinite(self.values.view(float))):
            raise ValueError("grid function values must be finite")
        if self.gamma < 0 or self.bound < 0:
            raise ValueError("growth envelope must be nonnegative")
        env = self.bound * (1.0 + self.grid.radius() ** self.gamma)
        if np.any(np.abs(self.values) > env * (1.0 + 1e-9) + 1e-12):
            raise ValueError("values exceed the declared growth envelope")

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable, gamma: float = 0.0,
                      bound: float | None = None) -> "GridFunction":
        vals = evaluate_on(fn, grid.points(), grid.dimension).reshape(grid.shape)
        return cls.from_values(grid, vals, gamma=gamma, bound=bound)

    @classmethod
    def from_values(cls, grid: Grid, values, gamma: float = 0.0,
                    bound: float | None = None) -> "GridFunction":
        values = np.asarray(values, dtype=complex).reshape(grid.shape)
        if bound is None:
            weight = 1.0 + grid.radius() ** gamma
            bound = float(np.max(np.abs(values) / weight)) if values.size else 0.0
        return cls(grid=grid, values=values, bound=bound, gamma=gamma)

    def is_real(self, tol: float = 1e-12) -> bool:
        scale = float(np.max(np.abs(self.values))) or 1.0
        return float(np.max(np.abs(self.values.imag))) <= tol * scale

    # -- serialization ------------------------------------------------------

    def to_csv(self, path) -> None:
        pts = self.grid.points()
        vals = self.values.ravel()
        cols = [pts[:, i] for i in range(self.grid.dimension)]
        data = np.column_stack(cols + [vals.real, vals.imag])
        header = ",".join([f"x{i + 1}" for i in range(self.grid.dimension)] + ["re", "im"])
        np.savetxt(path, data, delimiter=",", header=header, comments="")

    def to_binary(self, path) -> None:
        """Header (int64 d, int64 N, float64 h) then row-major re/im float64 pairs."""
        with open(path, "wb") as fh:
            fh.write(struct.pack("<qqd", self.grid.dimension,
                                 self.grid.points_per_axis, self.grid.spacing))
            inter = np.empty(self.values.size * 2, dtype="<f8")
            inter[0::2] = self.values.real.ravel()
            inter[1::2] = self.values.imag.ravel()
            fh.write(inter.tobytes())

    @classmethod
    def from_binary(cls, path, gamma: float = 0.0) -> "GridFunction":
        with open(path, "rb") as fh:
            d, n, h = struct.unpack("<qqd", fh.read(24))
            raw = np.frombuffer(fh.read(), dtype="<f8")
        vals = raw[0::2] + 1j * raw[1::2]
        grid = Grid(dimension=int(d), points_per_axis=int(n), spacing=float(h))
        return cls.from_values(grid, vals.reshape(grid.shape), gamma=gamma)
