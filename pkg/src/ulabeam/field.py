"""Scalar field superposition, excitation builders, and hard-shadow occlusion.

The field at p from the active, non-occluded elements is

    E(p) = sum_n gamma_n / r_n * exp(-j k r_n) * exp(j phi_n),

with r_n the element-to-point distance. This is a scalar model: element
pattern and polarization factors are dropped, so values are relative
amplitudes with no absolute calibration.

Occlusion is binary (hard shadow): an element contributes to a point only if
the straight segment between them does not intersect the obstacle. A segment
touching the obstacle boundary counts as blocked; a field point on the
obstacle boundary counts as interior. Interior points evaluate to a
non-finite sentinel (NaN) on grids and raise for single-point queries.

File formats
------------
``write_field_csv`` emits ``x,y,re,im,abs`` rows, sweeping x fastest with y
ascending; floats use shortest round-trip representation, NaN spelled
``nan``. ``write_field_pgm`` emits a binary (P5) 8-bit PGM, one pixel per
grid node, rows top-down in y (first row is y_max), columns left-right in x,
with linear amplitude mapping onto 0..255 over [0, max finite amplitude];
non-finite values map to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .array_geometry import CircleObstacle, Point2, RectObstacle, UlaConfig

__all__ = [
    "Excitation",
    "FieldGrid",
    "OcclusionModel",
    "gaussian_excitation",
    "focusing_excitation",
    "field_at",
    "field_grid",
    "line_cut",
    "normalize_power",
    "write_field_csv",
    "write_field_pgm",
]

# Grid/point batches are processed in chunks of roughly this many
# point-element pairs to bound temporary-array memory.
_CHUNK_PAIRS = 4_000_000


@dataclass(frozen=True)
class Excitation:
    """Per-element excitation: magnitudes gamma_n >= 0, phases [rad], active mask.

    Inactive elements are forced to gamma_n = 0 and phase 0. Arrays are
    copied and made read-only.
    """

    magnitudes: np.ndarray
    phases: np.ndarray
    active: np.ndarray

    def __post_init__(self) -> None:
        mag = np.array(self.magnitudes, dtype=float)
        ph = np.array(self.phases, dtype=float)
        act = np.array(self.active, dtype=bool)
        if not (mag.shape == ph.shape == act.shape) or mag.ndim != 1:
            raise ValueError("magnitudes, phases, active must be equal-length 1-D arrays")
        if np.any(mag[act] < 0) or not np.all(np.isfinite(mag[act])):
            raise ValueError("active magnitudes must be finite and non-negative")
        if not np.all(np.isfinite(ph[act])):
            raise ValueError("active phases must be finite")
        mag[~act] = 0.0
        ph[~act] = 0.0
        for a in (mag, ph, act):
            a.flags.writeable = False
        object.__setattr__(self, "magnitudes", mag)
        object.__setattr__(self, "phases", ph)
        object.__setattr__(self, "active", act)

    @property
    def n_elements(self) -> int:
        return self.magnitudes.shape[0]


@dataclass(frozen=True)
class FieldGrid:
    """Complex field sampled on a regular grid.

    values[ix, iy] is the field at (x_coords()[ix], y_coords()[iy]).
    """

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    nx: int
    ny: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ValueError("nx and ny must be >= 2")
        if not self.y_range[0] > 0:
            raise ValueError("grid must lie strictly in front of the array (y_min > 0)")
        if self.x_range[1] <= self.x_range[0] or self.y_range[1] <= self.y_range[0]:
            raise ValueError("ranges must be increasing")
        if self.values.shape != (self.nx, self.ny):
            raise ValueError("values must have shape (nx, ny)")

    def x_coords(self) -> np.ndarray:
        return np.linspace(self.x_range[0], self.x_range[1], self.nx)

    def y_coords(self) -> np.ndarray:
        return np.linspace(self.y_range[0], self.y_range[1], self.ny)


@dataclass(frozen=True)
class OcclusionModel:
    """Occlusion configuration; obstacle None means free space."""

    obstacle: RectObstacle | CircleObstacle | None = None
    mode: str = "hard_shadow"

    def __post_init__(self) -> None:
        if self.mode != "hard_shadow":
            raise ValueError("only hard_shadow occlusion is supported")


def gaussian_excitation(cfg: UlaConfig, theta_a: float) -> Excitation:
    """Linear-phase steering excitation, phi_n = -k sin(theta_a) x_n."""
    if not abs(theta_a) < math.pi / 2:
        raise ValueError("|theta_a| must be < pi/2")
    xs = cfg.element_xs()
    # + 0.0 turns -0.0 into 0.0 so broadside phases serialize as plain zeros
    phases = -cfg.wavenumber() * math.sin(theta_a) * xs + 0.0
    return Excitation(np.ones_like(xs), phases, np.ones_like(xs, dtype=bool))


def focusing_excitation(cfg: UlaConfig, focus: Point2) -> Excitation:
    """Phase-conjugation excitation, phi_n = k * |focus - element_n|."""
    if not focus.y > 0:
        raise ValueError("focus must lie in front of the array")
    xs = cfg.element_xs()
    r = np.hypot(focus.x - xs, focus.y)
    phases = cfg.wavenumber() * r
    return Excitation(np.ones_like(xs), phases, np.ones_like(xs, dtype=bool))


def _interior_mask(obstacle, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """True where a point lies inside (or on the boundary of) the obstacle."""
    if obstacle is None:
        return np.zeros_like(px, dtype=bool)
    if isinstance(obstacle, RectObstacle):
        return (
            (px >= obstacle.x_r2)
            & (px <= obstacle.x_r1)
            & (py >= obstacle.y_n)
            & (py <= obstacle.y_f)
        )
    if isinstance(obstacle, CircleObstacle):
        dx = px - obstacle.center.x
        dy = py - obstacle.center.y
        return dx * dx + dy * dy <= obstacle.radius**2
    raise TypeError(f"unsupported obstacle type {type(obstacle).__name__}")


def _visible_mask(obstacle, ex: np.ndarray, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """Visibility of each element (ex, 0) from each point (px, py).

    ex has shape (N,), px/py shape (M,); the result has shape (M, N).
    """
    if obstacle is None:
        return np.ones((px.shape[0], ex.shape[0]), dtype=bool)
    exr = ex[np.newaxis, :]
    pxr = px[:, np.newaxis]
    pyr = py[:, np.newaxis]
    if isinstance(obstacle, RectObstacle):
        # The sight segment rises monotonically from y=0 to y=py. Its x-extent
        # across the band [y_n, min(y_f, py)] is an interval; the segment is
        # blocked iff that interval overlaps the obstacle's x-extent.
        reaches = pyr > obstacle.y_n
        with np.errstate(divide="ignore", invalid="ignore"):
            frac_lo = obstacle.y_n / pyr
            frac_hi = np.minimum(obstacle.y_f, pyr) / pyr
        x_lo = exr + (pxr - exr) * frac_lo
        x_hi = exr + (pxr - exr) * frac_hi
        lo = np.minimum(x_lo, x_hi)
        hi = np.maximum(x_lo, x_hi)
        blocked = reaches & (hi >= obstacle.x_r2) & (lo <= obstacle.x_r1)
        return ~blocked
    if isinstance(obstacle, CircleObstacle):
        cx, cy, r = obstacle.center.x, obstacle.center.y, obstacle.radius
        dx = pxr - exr
        dy = pyr
        wx = cx - exr
        wy = np.broadcast_to(np.float64(cy), dy.shape)
        denom = dx * dx + dy * dy
        t = np.clip((wx * dx + wy * dy) / denom, 0.0, 1.0)
        qx = exr + t * dx - cx
        qy = t * dy - cy
        blocked = qx * qx + qy * qy <= r * r
        return ~blocked
    raise TypeError(f"unsupported obstacle type {type(obstacle).__name__}")


def _field_many(
    cfg: UlaConfig, exc: Excitation, px: np.ndarray, py: np.ndarray, occ: OcclusionModel | None
) -> np.ndarray:
    """Field at many points; interior points yield NaN sentinels."""
    if exc.n_elements != cfg.n_elements:
        raise ValueError("excitation length does not match array size")
    if np.any(py <= 0):
        raise ValueError("field points must lie strictly in front of the array (y > 0)")
    obstacle = occ.obstacle if occ is not None else None
    xs = cfg.element_xs()
    k = cfg.wavenumber()
    coef = exc.magnitudes * np.exp(1j * exc.phases)
    coef = np.where(exc.active, coef, 0.0)

    out = np.empty(px.shape[0], dtype=complex)
    chunk = max(1, _CHUNK_PAIRS // max(1, cfg.n_elements))
    for start in range(0, px.shape[0], chunk):
        sl = slice(start, min(start + chunk, px.shape[0]))
        cpx, cpy = px[sl], py[sl]
        dx = cpx[:, np.newaxis] - xs[np.newaxis, :]
        r = np.sqrt(dx * dx + cpy[:, np.newaxis] ** 2)
        vis = _visible_mask(obstacle, xs, cpx, cpy)
        contrib = (coef[np.newaxis, :] * vis) * np.exp(-1j * k * r) / r
        out[sl] = contrib.sum(axis=1)
    interior = _interior_mask(obstacle, px, py)
    out[interior] = complex(np.nan, np.nan)
    return out


def field_at(cfg: UlaConfig, exc: Excitation, p: Point2, occ: OcclusionModel | None = None) -> complex:
    """Complex field at a single point; raises if p lies inside the obstacle."""
    obstacle = occ.obstacle if occ is not None else None
    if _interior_mask(obstacle, np.array([p.x]), np.array([p.y]))[0]:
        raise ValueError("field point lies inside the obstacle")
    return complex(_field_many(cfg, exc, np.array([p.x]), np.array([p.y]), occ)[0])


def field_grid(
    cfg: UlaConfig,
    exc: Excitation,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    nx: int,
    ny: int,
    occ: OcclusionModel | None = None,
) -> FieldGrid:
    """Field on a regular nx-by-ny grid; obstacle-interior nodes become NaN."""
    x = np.linspace(x_range[0], x_range[1], nx)
    y = np.linspace(y_range[0], y_range[1], ny)
    gx, gy = np.meshgrid(x, y, indexing="ij")
    values = _field_many(cfg, exc, gx.ravel(), gy.ravel(), occ).reshape(nx, ny)
    return FieldGrid((float(x_range[0]), float(x_range[1])), (float(y_range[0]), float(y_range[1])), nx, ny, values)


def line_cut(
    cfg: UlaConfig,
    exc: Excitation,
    theta_a: float,
    d_max_plot: float,
    samples: int,
    occ: OcclusionModel | None = None,
) -> list[tuple[float, float]]:
    """|E| along the ray at angle theta_a from the y-axis, d in (0, d_max_plot].

    Returns (distance, amplitude) pairs at `samples` uniform distances.
    Interior samples carry NaN amplitude.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if not d_max_plot > 0:
        raise ValueError("d_max_plot must be positive")
    d = d_max_plot * np.arange(1, samples + 1) / samples
    px = d * math.sin(theta_a)
    py = d * math.cos(theta_a)
    vals = _field_many(cfg, exc, px, py, occ)
    return [(float(di), float(abs(v))) for di, v in zip(d, vals)]


def normalize_power(exc: Excitation, budget: float) -> Excitation:
    """Scale magnitudes so that sum(gamma_n^2) equals budget."""
    if not budget > 0:
        raise ValueError("budget must be positive")
    total = float(np.sum(exc.magnitudes**2))
    if total == 0.0:
        raise ValueError("cannot normalize an excitation with no active power")
    factor = math.sqrt(budget / total)
    return Excitation(exc.magnitudes * factor, exc.phases, exc.active)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_field_csv(grid: FieldGrid, path: str) -> None:
    """Write the grid as CSV (see module docstring for the layout)."""
    xs = grid.x_coords()
    ys = grid.y_coords()
    lines = ["x,y,re,im,abs"]
    for iy in range(grid.ny):
        for ix in range(grid.nx):
            v = grid.values[ix, iy]
            lines.append(
                f"{_fmt(xs[ix])},{_fmt(ys[iy])},{_fmt(v.real)},{_fmt(v.imag)},{_fmt(abs(v))}"
            )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_field_pgm(grid: FieldGrid, path: str) -> None:
    """Write the amplitude map as a binary 8-bit PGM (see module docstring)."""
    amp = np.abs(grid.values)
    finite = np.isfinite(amp)
    vmax = float(amp[finite].max()) if finite.any() else 0.0
    if vmax > 0:
        scaled = np.where(finite, amp / vmax * 255.0, 0.0)
    else:
        scaled = np.zeros_like(amp)
    pixels = np.rint(scaled).astype(np.uint8)
    # Image rows run top-down in y; pixels[ix, iy] -> row (ny-1-iy), col ix.
    img = pixels.T[::-1, :]
    header = f"P5\n{grid.nx} {grid.ny}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.tobytes())
