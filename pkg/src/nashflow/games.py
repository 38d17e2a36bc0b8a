"""Two-player zero-sum games: losses, gradients and regularity estimates.

A game is a payoff function l(x, y) for the x-player (the y-player receives
-l) together with its analytic gradients and an evaluation box.  All callables
are vectorized: they accept arrays whose trailing axis is the coordinate
dimension and broadcast over leading axes.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, UsageError

Array = np.ndarray

# Signature of the optional closed-form interaction drift:
# (X, Y) -> (Bx, By) with X: (n, d_x), Y: (n, d_y).
FastDrift = Callable[[Array, Array], tuple[Array, Array]]


@dataclasses.dataclass(frozen=True)
class Game:
    """A continuous two-player zero-sum game on a box.

    ``loss``, ``grad_x`` and ``grad_y`` take arrays shaped ``(..., d_x)`` and
    ``(..., d_y)`` and broadcast over leading axes.  ``box_radius`` is the
    per-coordinate half-width of the evaluation/search box; dynamics live on
    the whole space, the box only bounds searches and PDE grids.

    ``fast_drift``, when present, computes the pairwise-interaction drift
    through moment statistics of the opponent cloud in O(n) instead of the
    generic O(n^2) average.  It must agree with the generic path (tested).
    """

    name: str
    d_x: int
    d_y: int
    loss: Callable[[Array, Array], Array]
    grad_x: Callable[[Array, Array], Array]
    grad_y: Callable[[Array, Array], Array]
    box_radius: float = 4.0
    fast_drift: Optional[FastDrift] = None

    def __post_init__(self):
        if self.d_x < 1 or self.d_y < 1:
            raise UsageError("game dimensions must be positive")
        if self.box_radius <= 0:
            raise UsageError("box_radius must be positive")

    def with_box(self, box_radius: float) -> "Game":
        return dataclasses.replace(self, box_radius=box_radius)

    def _check_point(self, x, y) -> tuple[Array, Array]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if x.shape[-1] != self.d_x:
            raise DimensionError(
                f"x has trailing dimension {x.shape[-1]}, game '{self.name}' expects {self.d_x}"
            )
        if y.shape[-1] != self.d_y:
            raise DimensionError(
                f"y has trailing dimension {y.shape[-1]}, game '{self.name}' expects {self.d_y}"
            )
        return x, y

    def loss_eval(self, x, y):
        """Payoff of the x-player at (x, y); the y-player receives the negation."""
        x, y = self._check_point(x, y)
        out = self.loss(x, y)
        return float(out) if np.ndim(out) == 0 else out

    def grad_loss(self, x, y) -> tuple[Array, Array]:
        """(grad_x l, grad_y l) at (x, y), broadcasting over leading axes."""
        x, y = self._check_point(x, y)
        return self.grad_x(x, y), self.grad_y(x, y)


@dataclasses.dataclass(frozen=True)
class RegularityConstants:
    """Box-restricted estimates of the loss regularity.

    C bounds sup-norm of the full gradient, L its Lipschitz constant, and
    c_tilde = sup|l| + C bounds the bounded-Lipschitz norm of the partially
    integrated payoffs x -> int l d(mu_y) and y -> int l d(mu_x).
    """

    C: float
    L: float
    c_tilde: float

    def __post_init__(self):
        if self.C < 0 or self.L < 0:
            raise UsageError("constants must be nonnegative")
        if self.c_tilde < self.C:
            raise UsageError("c_tilde must dominate C")


@dataclasses.dataclass(frozen=True)
class GradientCheckReport:
    max_rel_error: float
    worst_x: Array
    worst_y: Array
    n_points: int
    eps: float


def bilinear(d: int = 1, box_radius: float = 4.0) -> Game:
    """l(x, y) = x . y (saddle at the origin)."""

    def loss(x, y):
        return np.sum(x * y, axis=-1)

    def fast_drift(X, Y):
        bx = -np.broadcast_to(Y.mean(axis=0), X.shape).copy()
        by = np.broadcast_to(X.mean(axis=0), Y.shape).copy()
        return bx, by

    return Game(
        name="bilinear",
        d_x=d,
        d_y=d,
        loss=loss,
        grad_x=lambda x, y: np.broadcast_to(y, np.broadcast_shapes(x.shape, y.shape)).copy(),
        grad_y=lambda x, y: np.broadcast_to(x, np.broadcast_shapes(x.shape, y.shape)).copy(),
        box_radius=box_radius,
        fast_drift=fast_drift,
    )


def quadratic_bilinear(a: float = 0.5, d: int = 1, box_radius: float = 4.0) -> Game:
    """l(x, y) = x . y + a(|x|^2 - |y|^2).

    For a > 0 the entropic-regularized dynamics at inverse temperature beta
    has the product-Gaussian fixed point N(0, 1/(2 a beta)) per coordinate,
    which makes this the main closed-form oracle of the test suite.
    """
    if a <= 0:
        raise UsageError("a must be positive")

    def loss(x, y):
        return np.sum(x * y, axis=-1) + a * (np.sum(x * x, axis=-1) - np.sum(y * y, axis=-1))

    def grad_x(x, y):
        return np.broadcast_to(y, np.broadcast_shapes(x.shape, y.shape)) + 2.0 * a * x

    def grad_y(x, y):
        return np.broadcast_to(x, np.broadcast_shapes(x.shape, y.shape)) - 2.0 * a * y

    def fast_drift(X, Y):
        bx = -(Y.mean(axis=0) + 2.0 * a * X)
        by = X.mean(axis=0) - 2.0 * a * Y
        return bx, by

    return Game(
        name="quadratic_bilinear",
        d_x=d,
        d_y=d,
        loss=loss,
        grad_x=grad_x,
        grad_y=grad_y,
        box_radius=box_radius,
        fast_drift=fast_drift,
    )


def sine_cosine(box_radius: float = float(np.pi)) -> Game:
    """l(x, y) = sin(x) cos(y): bounded loss with globally bounded, Lipschitz gradient."""

    def loss(x, y):
        return np.sin(x[..., 0]) * np.cos(y[..., 0])

    def grad_x(x, y):
        return (np.cos(x[..., 0]) * np.cos(y[..., 0]))[..., None]

    def grad_y(x, y):
        return (-np.sin(x[..., 0]) * np.sin(y[..., 0]))[..., None]

    def fast_drift(X, Y):
        bx = -np.cos(X) * np.cos(Y).mean()
        by = -np.sin(Y) * np.sin(X).mean()
        return bx, by

    return Game(
        name="sine_cosine",
        d_x=1,
        d_y=1,
        loss=loss,
        grad_x=grad_x,
        grad_y=grad_y,
        box_radius=box_radius,
        fast_drift=fast_drift,
    )


def constant(c: float = 0.0, d: int = 1, box_radius: float = 4.0) -> Game:
    """l == c: degenerate game, useful as a pure-diffusion oracle."""

    def loss(x, y):
        return np.broadcast_to(c, np.broadcast_shapes(x.shape[:-1], y.shape[:-1])).copy()

    def grad_x(x, y):
        return np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + (x.shape[-1],))

    def grad_y(x, y):
        return np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + (y.shape[-1],))

    def fast_drift(X, Y):
        return np.zeros_like(X), np.zeros_like(Y)

    return Game(
        name="constant",
        d_x=d,
        d_y=d,
        loss=loss,
        grad_x=grad_x,
        grad_y=grad_y,
        box_radius=box_radius,
        fast_drift=fast_drift,
    )


BUILTIN_GAMES: dict[str, Callable[..., Game]] = {
    "bilinear": bilinear,
    "quadratic_bilinear": quadratic_bilinear,
    "sine_cosine": sine_cosine,
    "constant": constant,
}


def make_game(name: str, params: Optional[dict] = None, box_radius: Optional[float] = None) -> Game:
    """Instantiate a built-in game by name with a parameter map."""
    if name not in BUILTIN_GAMES:
        raise UsageError(f"unknown game '{name}'; available: {sorted(BUILTIN_GAMES)}")
    kwargs = dict(params or {})
    if box_radius is not None:
        kwargs["box_radius"] = float(box_radius)
    return BUILTIN_GAMES[name](**kwargs)


def check_gradients(game: Game, n_points: int = 100, eps: float = 1e-5, seed: int = 0) -> GradientCheckReport:
    """Compare analytic gradients with central finite differences on box samples.

    The relative error at a point is ||g_analytic - g_fd|| / max(1, ||g_fd||),
    so points with vanishing gradient are judged on the absolute scale.
    Deterministic for a fixed seed.
    """
    if eps <= 0:
        raise UsageError("eps must be positive")
    if n_points < 1:
        raise UsageError("n_points must be at least 1")
    rng = np.random.default_rng(seed)
    R = game.box_radius
    xs = rng.uniform(-R, R, size=(n_points, game.d_x))
    ys = rng.uniform(-R, R, size=(n_points, game.d_y))

    gx, gy = game.grad_loss(xs, ys)
    fd_x = np.empty_like(gx)
    fd_y = np.empty_like(gy)
    for k in range(game.d_x):
        e = np.zeros(game.d_x)
        e[k] = eps
        fd_x[:, k] = (game.loss(xs + e, ys) - game.loss(xs - e, ys)) / (2 * eps)
    for k in range(game.d_y):
        e = np.zeros(game.d_y)
        e[k] = eps
        fd_y[:, k] = (game.loss(xs, ys + e) - game.loss(xs, ys - e)) / (2 * eps)

    diff = np.concatenate([gx - fd_x, gy - fd_y], axis=1)
    fd = np.concatenate([fd_x, fd_y], axis=1)
    scale = np.maximum(1.0, np.linalg.norm(fd, axis=1))
    rel = np.linalg.norm(diff, axis=1) / scale
    worst = int(np.argmax(rel))
    return GradientCheckReport(
        max_rel_error=float(rel[worst]),
        worst_x=xs[worst].copy(),
        worst_y=ys[worst].copy(),
        n_points=n_points,
        eps=eps,
    )


def regularity_constants(game: Game, grid_per_dim: int = 33) -> RegularityConstants:
    """Grid estimates of C = sup||grad l||, L = Lip(grad l) and c_tilde over the box.

    L is estimated from difference quotients between axis-adjacent grid
    points; all three values are box-restricted lower estimates of the true
    suprema and are monotone in box_radius for polynomial losses.
    """
    if grid_per_dim < 2:
        raise UsageError("grid_per_dim must be at least 2")
    R = game.box_radius
    d = game.d_x + game.d_y
    axes = [np.linspace(-R, R, grid_per_dim)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    xs, ys = pts[:, : game.d_x], pts[:, game.d_x :]

    lvals = game.loss(xs, ys)
    gx, gy = game.grad_loss(xs, ys)
    grad = np.concatenate([gx, gy], axis=1)
    gnorm = np.linalg.norm(grad, axis=1)
    C = float(gnorm.max())
    c_tilde = float(np.abs(lvals).max()) + C

    shape = (grid_per_dim,) * d
    grad_grid = grad.reshape(shape + (d,))
    step = 2 * R / (grid_per_dim - 1)
    L = 0.0
    for axis in range(d):
        quot = np.linalg.norm(np.diff(grad_grid, axis=axis), axis=-1) / step
        if quot.size:
            L = max(L, float(quot.max()))
    return RegularityConstants(C=C, L=L, c_tilde=c_tilde)
