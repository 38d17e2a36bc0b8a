"""Probability measures as point clouds or grid densities, and metrics between them.

Two concrete representations are used throughout the toolkit: weighted point
clouds (``EmpiricalMeasure``) and cell-centered densities on a regular box
grid (``GridMeasure``).  Metrics: exact one-dimensional W_p via the quantile
coupling, sliced Wasserstein for higher dimension, and a dictionary-based
lower bound for the dual bounded-Lipschitz metric.
"""

from __future__ import annotations

import dataclasses
import json
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DegenerateInputError, UsageError

Array = np.ndarray

_WEIGHT_TOL = 1e-12
_MASS_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted point cloud on R^d; weights must sum to one."""

    points: Array
    weights: Optional[Array] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise UsageError("points must be a nonempty (m, d) array")
        if not np.all(np.isfinite(pts)):
            raise UsageError("points must be finite")
        w = self.weights
        if w is None:
            w = np.full(pts.shape[0], 1.0 / pts.shape[0])
        else:
            w = np.asarray(w, dtype=float)
            if w.shape != (pts.shape[0],):
                raise UsageError("weights must match the number of points")
            if np.any(w < 0):
                raise UsageError("weights must be nonnegative")
            if abs(w.sum() - 1.0) > _WEIGHT_TOL:
                raise UsageError(f"weights sum to {w.sum()!r}, expected 1 within {_WEIGHT_TOL}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def mean(self) -> Array:
        return self.weights @ self.points

    def variance(self) -> Array:
        m = self.mean()
        return self.weights @ (self.points - m) ** 2


@dataclasses.dataclass(frozen=True)
class GridMeasure:
    """Cell-centered probability density on a regular box grid.

    ``box`` is a (d, 2) array of per-dimension intervals, ``density`` has one
    value per cell (shape = resolution) and integrates to one with midpoint
    quadrature.
    """

    box: Array
    density: Array

    def __post_init__(self):
        box = np.asarray(self.box, dtype=float)
        if box.ndim == 1:
            box = box[None, :]
        if box.ndim != 2 or box.shape[1] != 2 or np.any(box[:, 1] <= box[:, 0]):
            raise UsageError("box must be a (d, 2) array of nonempty intervals")
        dens = np.asarray(self.density, dtype=float)
        if dens.ndim != box.shape[0]:
            raise UsageError(f"density has {dens.ndim} axes, box has {box.shape[0]} dimensions")
        if np.any(dens < -1e-12):
            raise UsageError(f"density has negative values (min {dens.min():.3e})")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "density", dens)
        mass = self.mass()
        if abs(mass - 1.0) > _MASS_TOL:
            raise UsageError(f"grid mass is {mass!r}, expected 1 within {_MASS_TOL}")

    @property
    def dim(self) -> int:
        return self.box.shape[0]

    @property
    def resolution(self) -> tuple[int, ...]:
        return self.density.shape

    @property
    def cell_widths(self) -> Array:
        return (self.box[:, 1] - self.box[:, 0]) / np.asarray(self.resolution)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_widths))

    def axis_centers(self, axis: int) -> Array:
        lo, hi = self.box[axis]
        n = self.resolution[axis]
        w = (hi - lo) / n
        return lo + (np.arange(n) + 0.5) * w

    def mass(self) -> float:
        return float(self.density.sum() * self.cell_volume)

    def boundary_mass(self) -> float:
        """Probability mass in cells touching the box boundary."""
        interior = self.density
        for axis in range(self.dim):
            interior = np.take(interior, range(1, self.resolution[axis] - 1), axis=axis)
        return float(self.mass() - interior.sum() * self.cell_volume)

    def as_empirical(self) -> EmpiricalMeasure:
        mesh = np.meshgrid(*[self.axis_centers(a) for a in range(self.dim)], indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        w = self.density.ravel() * self.cell_volume
        w = np.clip(w, 0.0, None)
        return EmpiricalMeasure(points=pts, weights=w / w.sum())

    def marginal(self, axis: int) -> "GridMeasure":
        """Integrate out all axes except ``axis``."""
        other = tuple(a for a in range(self.dim) if a != axis)
        vol_other = float(np.prod([self.cell_widths[a] for a in other])) if other else 1.0
        dens = self.density.sum(axis=other) * vol_other
        return GridMeasure(box=self.box[axis : axis + 1], density=dens)

    def mean(self) -> Array:
        emp = self.as_empirical()
        return emp.mean()

    def variance(self) -> Array:
        emp = self.as_empirical()
        return emp.variance()

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "box": self.box.tolist(),
            "resolution": list(self.resolution),
            "density": self.density.ravel().tolist(),
        }

    @staticmethod
    def from_json_dict(d: dict) -> "GridMeasure":
        res = tuple(d["resolution"])
        return GridMeasure(box=np.asarray(d["box"]), density=np.asarray(d["density"]).reshape(res))


Measure = Union[EmpiricalMeasure, GridMeasure]


def grid_from_function(fn, box, resolution) -> GridMeasure:
    """Evaluate a nonnegative function at cell centers and normalize to mass one."""
    box = np.atleast_2d(np.asarray(box, dtype=float))
    res = (resolution,) * box.shape[0] if np.isscalar(resolution) else tuple(resolution)
    centers = []
    for a in range(box.shape[0]):
        lo, hi = box[a]
        w = (hi - lo) / res[a]
        centers.append(lo + (np.arange(res[a]) + 0.5) * w)
    mesh = np.meshgrid(*centers, indexing="ij")
    vals = np.asarray(fn(*mesh), dtype=float)
    if np.any(vals < 0):
        raise UsageError("density function must be nonnegative")
    vol = float(np.prod([(hi - lo) / r for (lo, hi), r in zip(box, res)]))
    total = vals.sum() * vol
    if total <= 0:
        raise DegenerateInputError("density function vanishes on the whole grid")
    return GridMeasure(box=box, density=vals / total)


def gaussian_grid(box, resolution, mean=0.0, std=1.0) -> GridMeasure:
    """Grid lift of an isotropic Gaussian, renormalized on the box."""
    box = np.atleast_2d(np.asarray(box, dtype=float))
    d = box.shape[0]
    mean = np.broadcast_to(np.asarray(mean, dtype=float), (d,))
    std = np.broadcast_to(np.asarray(std, dtype=float), (d,))
    if np.any(std <= 0):
        raise UsageError("std must be positive")

    def fn(*mesh):
        q = sum(((m - mu) / s) ** 2 for m, mu, s in zip(mesh, mean, std))
        return np.exp(-0.5 * q)

    return grid_from_function(fn, box, resolution)


def uniform_grid(box, resolution) -> GridMeasure:
    return grid_from_function(lambda *mesh: np.ones_like(mesh[0]), box, resolution)


def point_mass_grid(box, resolution, point) -> GridMeasure:
    """All mass in the cell containing ``point``."""
    box = np.atleast_2d(np.asarray(box, dtype=float))
    res = (resolution,) * box.shape[0] if np.isscalar(resolution) else tuple(resolution)
    point = np.broadcast_to(np.asarray(point, dtype=float), (box.shape[0],))
    idx = []
    for a in range(box.shape[0]):
        lo, hi = box[a]
        w = (hi - lo) / res[a]
        i = int(np.clip((point[a] - lo) // w, 0, res[a] - 1))
        idx.append(i)
    dens = np.zeros(res)
    vol = float(np.prod([(hi - lo) / r for (lo, hi), r in zip(box, res)]))
    dens[tuple(idx)] = 1.0 / vol
    return GridMeasure(box=box, density=dens)


@dataclasses.dataclass
class MeasurePath:
    """Time-indexed sequence of grid measures on a uniform time grid.

    Entries are either joint measures (one ``GridMeasure`` per time) or
    marginal pairs ``(mu_x, mu_y)``; the product path is exposed through
    :meth:`joint` in the latter case.
    """

    times: Array
    entries: list

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) != len(self.entries) or len(t) == 0:
            raise UsageError("times and entries must be nonempty and of equal length")
        if len(t) > 1:
            dt = np.diff(t)
            if np.any(dt <= 0) or np.max(np.abs(dt - dt[0])) > 1e-9 * max(1.0, abs(dt[0])):
                raise UsageError("times must be strictly increasing with uniform spacing")
        self.times = t

    @property
    def kind(self) -> str:
        return "pair" if isinstance(self.entries[0], tuple) else "joint"

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def dt(self) -> float:
        if len(self.times) < 2:
            raise UsageError("path has a single time point")
        return float(self.times[1] - self.times[0])

    def pair(self, k: int) -> tuple[GridMeasure, GridMeasure]:
        e = self.entries[k]
        if isinstance(e, tuple):
            return e
        return e.marginal(0), e.marginal(1)

    def joint(self, k: int) -> GridMeasure:
        e = self.entries[k]
        if isinstance(e, tuple):
            mx, my = e
            dens = np.outer(mx.density, my.density)
            box = np.vstack([mx.box, my.box])
            return GridMeasure(box=box, density=dens)
        return e

    def to_json_dict(self) -> dict:
        ser = []
        for e in self.entries:
            if isinstance(e, tuple):
                ser.append({"mu_x": e[0].to_json_dict(), "mu_y": e[1].to_json_dict()})
            else:
                ser.append({"joint": e.to_json_dict()})
        return {"schema_version": 1, "times": self.times.tolist(), "entries": ser}

    @staticmethod
    def from_json_dict(d: dict) -> "MeasurePath":
        entries = []
        for e in d["entries"]:
            if "joint" in e:
                entries.append(GridMeasure.from_json_dict(e["joint"]))
            else:
                entries.append(
                    (GridMeasure.from_json_dict(e["mu_x"]), GridMeasure.from_json_dict(e["mu_y"]))
                )
        return MeasurePath(times=np.asarray(d["times"]), entries=entries)


def _as_cloud_1d(m: Measure) -> tuple[Array, Array]:
    if isinstance(m, GridMeasure):
        m = m.as_empirical()
    if m.dim != 1:
        raise UsageError("measure is not one-dimensional; use sliced_wp for d > 1")
    return m.points[:, 0], m.weights


def _wp_discrete_1d(x: Array, wx: Array, y: Array, wy: Array, p: int) -> float:
    """Exact W_p between weighted discrete 1-D measures via the quantile coupling."""
    ix = np.argsort(x, kind="stable")
    iy = np.argsort(y, kind="stable")
    xs, ws = x[ix], wx[ix]
    ys, vs = y[iy], wy[iy]
    cx = np.cumsum(ws)
    cy = np.cumsum(vs)
    cx[-1] = cy[-1] = 1.0
    qs = np.union1d(cx, cy)
    qs = qs[(qs > 0) & (qs <= 1.0)]
    gaps = np.diff(np.concatenate([[0.0], qs]))
    mids = np.concatenate([[0.0], qs])[:-1] + gaps / 2
    xi = np.searchsorted(cx, mids, side="left")
    yi = np.searchsorted(cy, mids, side="left")
    d = np.abs(xs[xi] - ys[yi])
    if p == 1:
        return float(np.sum(gaps * d))
    return float(np.sum(gaps * d**p) ** (1.0 / p))


def w1_1d(mu: Measure, nu: Measure) -> float:
    """Exact 1-Wasserstein distance between one-dimensional measures."""
    x, wx = _as_cloud_1d(mu)
    y, wy = _as_cloud_1d(nu)
    return _wp_discrete_1d(x, wx, y, wy, p=1)


def _as_cloud(m: Measure) -> tuple[Array, Array]:
    if isinstance(m, GridMeasure):
        m = m.as_empirical()
    return m.points, m.weights


def sliced_wp(mu: Measure, nu: Measure, p: int = 1, n_proj: int = 64, seed: int = 0) -> float:
    """Sliced W_p: average of exact 1-D W_p over seeded random directions.

    Reduces to the exact quantile-coupling W_p when the ambient dimension is
    one.  Deterministic for a fixed seed.
    """
    if p not in (1, 2):
        raise UsageError("p must be 1 or 2")
    if n_proj < 1:
        raise UsageError("n_proj must be at least 1")
    xp, wx = _as_cloud(mu)
    yp, wy = _as_cloud(nu)
    if xp.shape[1] != yp.shape[1]:
        raise UsageError("measures have different ambient dimensions")
    if xp.shape[1] == 1:
        return _wp_discrete_1d(xp[:, 0], wx, yp[:, 0], wy, p)
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((n_proj, xp.shape[1]))
    norms = np.linalg.norm(dirs, axis=1)
    norms[norms == 0] = 1.0
    dirs /= norms[:, None]
    vals = [
        _wp_discrete_1d(xp @ d, wx, yp @ d, wy, p)
        for d in dirs
    ]
    return float(np.mean(vals))


def _bl_dictionary(pooled: Array, dim: int, dictionary_size: int, seed: int):
    """Functions with bounded-Lipschitz norm <= 1: ramps, tanh bumps, cosines.

    Coordinate ramps centered at the pooled midrange are always included;
    with saturation split s they realize the two-Dirac optimum 2d/(d+2).
    """
    lo = pooled.min(axis=0)
    hi = pooled.max(axis=0)
    mid = (lo + hi) / 2
    diam = max(float(np.linalg.norm(hi - lo)), 1e-12)
    fns = []
    for axis in range(dim):
        e = np.zeros(dim)
        e[axis] = 1.0
        for s in (0.25, 0.5, 0.75):
            fns.append(_make_ramp(e, mid.copy(), s))
    rng = np.random.default_rng(seed)
    kinds = ("ramp", "tanh", "cos")
    target = max(dictionary_size, len(fns))
    while len(fns) < target:
        kind = kinds[len(fns) % 3]
        d = rng.standard_normal(dim)
        d /= max(np.linalg.norm(d), 1e-12)
        c = rng.uniform(lo, hi)
        s = rng.uniform(0.2, 0.8)
        if kind == "ramp":
            fns.append(_make_ramp(d, c, s))
        elif kind == "tanh":
            fns.append(_make_tanh(d, c, s))
        else:
            freq = rng.uniform(0.5, 6.0) / diam * 2 * np.pi
            phase = rng.uniform(0, 2 * np.pi)
            fns.append(_make_cos(d * freq, phase))
    return fns


def _make_ramp(direction, center, s):
    # sup-norm s, Lipschitz constant 1 - s
    def f(pts):
        t = (pts - center) @ direction
        return np.clip((1.0 - s) * t, -s, s)

    return f


def _make_tanh(direction, center, s):
    def f(pts):
        t = (pts - center) @ direction
        return s * np.tanh(((1.0 - s) / s) * t)

    return f


def _make_cos(omega, phase):
    amp = 1.0 / (1.0 + np.linalg.norm(omega))

    def f(pts):
        return amp * np.cos(pts @ omega + phase)

    return f


def dbl_lower_bound(mu: Measure, nu: Measure, dictionary_size: int = 64, seed: int = 0) -> float:
    """Lower bound of the dual bounded-Lipschitz distance d_BL.

    Maximizes |int f dmu - int f dnu| over a fixed dictionary of functions
    with BL-norm at most one.  Always a lower bound of the true supremum;
    in one dimension it is also bounded by min(2, W_1).
    """
    xp, wx = _as_cloud(mu)
    yp, wy = _as_cloud(nu)
    if xp.shape[1] != yp.shape[1]:
        raise UsageError("measures have different ambient dimensions")
    pooled = np.vstack([xp, yp])
    best = 0.0
    for f in _bl_dictionary(pooled, xp.shape[1], dictionary_size, seed):
        gap = abs(float(wx @ f(xp) - wy @ f(yp)))
        best = max(best, gap)
    return best


def silverman_bandwidth(points: Array, weights: Array) -> float:
    """Rule-of-thumb bandwidth sigma_hat * m^(-1/(d+4))."""
    m, d = points.shape
    mean = weights @ points
    var = weights @ (points - mean) ** 2
    sigma = float(np.sqrt(var.mean()))
    if sigma <= 0:
        raise DegenerateInputError("sample is degenerate; pass an explicit bandwidth")
    return sigma * m ** (-1.0 / (d + 4))


def kde_lift(
    emp: EmpiricalMeasure,
    box,
    resolution,
    bandwidth: Optional[float] = None,
) -> tuple[GridMeasure, float]:
    """Gaussian kernel density of a point cloud on a box grid.

    Kernel mass falling outside the box is clipped and the density is
    renormalized to one; the clipped fraction is returned alongside the
    measure.  With ``bandwidth=None`` the Silverman-style rule is used.

    Returns (grid_measure, clipped_mass_fraction).
    """
    box = np.atleast_2d(np.asarray(box, dtype=float))
    d = box.shape[0]
    if emp.dim != d:
        raise UsageError(f"cloud dimension {emp.dim} does not match box dimension {d}")
    if d > 2:
        raise UsageError("kde_lift supports d <= 2")
    res = (resolution,) * d if np.isscalar(resolution) else tuple(resolution)
    if bandwidth is None:
        bandwidth = silverman_bandwidth(emp.points, emp.weights)
    if bandwidth <= 0:
        raise UsageError("bandwidth must be positive")

    kernels = []
    for a in range(d):
        lo, hi = box[a]
        w = (hi - lo) / res[a]
        centers = lo + (np.arange(res[a]) + 0.5) * w
        z = (centers[None, :] - emp.points[:, a : a + 1]) / bandwidth
        kernels.append(np.exp(-0.5 * z**2) / (bandwidth * np.sqrt(2 * np.pi)))
    if d == 1:
        dens = (emp.weights[:, None] * kernels[0]).sum(axis=0)
    else:
        dens = (emp.weights[:, None] * kernels[0]).T @ kernels[1]
    vol = float(np.prod([(hi - lo) / r for (lo, hi), r in zip(box, res)]))
    inside = float(dens.sum() * vol)
    if inside <= 1e-12:
        raise DegenerateInputError("all kernel mass falls outside the box")
    clipped = min(max(1.0 - inside, 0.0), 1.0)
    return GridMeasure(box=box, density=dens / inside), clipped


def save_grid_measure(gm: GridMeasure, path) -> None:
    with open(path, "w") as fh:
        json.dump(gm.to_json_dict(), fh)


def load_grid_measure(path) -> GridMeasure:
    with open(path) as fh:
        return GridMeasure.from_json_dict(json.load(fh))
