"""Coupled descent-ascent Langevin particle system with a deterministic integrator.

The x-cloud descends and the y-cloud ascends the opponent-averaged loss, each
with additive noise of amplitude sqrt(2/beta).  Noise is drawn from
counter-based per-particle Philox streams keyed by (seed, particle key, step),
so trajectories are bit-identical for any worker count and permuting particles
together with their keys permutes the trajectory.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from .errors import ConfigError, NumericalBlowupError, UsageError
from .games import Game
from .measures import EmpiricalMeasure

Array = np.ndarray

_NOISE_BLOCK = 256  # steps of noise buffered per particle stream


@dataclasses.dataclass(frozen=True)
class InitSpec:
    """Initial distribution of one particle cloud: point mass, uniform box or Gaussian."""

    kind: str
    point: Optional[Array] = None
    mean: float = 0.0
    std: float = 1.0
    radius: Optional[float] = None

    @staticmethod
    def point_mass(value) -> "InitSpec":
        return InitSpec(kind="point", point=np.atleast_1d(np.asarray(value, dtype=float)))

    @staticmethod
    def uniform(radius: Optional[float] = None) -> "InitSpec":
        return InitSpec(kind="uniform", radius=radius)

    @staticmethod
    def gaussian(mean: float = 0.0, std: float = 1.0) -> "InitSpec":
        if std <= 0:
            raise UsageError("std must be positive")
        return InitSpec(kind="gaussian", mean=float(mean), std=float(std))

    def sample(self, rng: np.random.Generator, dim: int, box_radius: float) -> Array:
        if self.kind == "point":
            p = np.broadcast_to(self.point, (dim,)).astype(float)
            return p.copy()
        if self.kind == "uniform":
            r = box_radius if self.radius is None else self.radius
            return rng.uniform(-r, r, size=dim)
        if self.kind == "gaussian":
            return self.mean + self.std * rng.standard_normal(dim)
        raise ConfigError(f"unknown init kind '{self.kind}'")

    def to_json_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "point":
            d["point"] = self.point.tolist()
        elif self.kind == "uniform" and self.radius is not None:
            d["radius"] = self.radius
        elif self.kind == "gaussian":
            d["mean"], d["std"] = self.mean, self.std
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "InitSpec":
        kind = d.get("kind")
        if kind == "point":
            return InitSpec.point_mass(d["point"])
        if kind == "uniform":
            return InitSpec.uniform(d.get("radius"))
        if kind == "gaussian":
            return InitSpec.gaussian(d.get("mean", 0.0), d.get("std", 1.0))
        raise ConfigError(f"unknown init kind '{kind}'")


@dataclasses.dataclass(frozen=True)
class SimConfig:
    """Particle-system run parameters.

    ``beta`` may be ``inf`` for the zero-noise (deterministic gradient flow)
    surrogate.  The recording grid is 0, h*record_stride, 2*h*record_stride, ...
    """

    n: int
    T: float
    h: float = 1e-2
    beta: float = 10.0
    init_x: InitSpec = dataclasses.field(default_factory=lambda: InitSpec.gaussian(0.0, 1.0))
    init_y: InitSpec = dataclasses.field(default_factory=lambda: InitSpec.gaussian(0.0, 1.0))
    record_stride: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.h <= 0:
            raise ConfigError("h must be positive")
        if self.T < self.h:
            raise ConfigError("T must be at least h")
        if not (self.beta > 0):
            raise ConfigError("beta must be positive (inf allowed)")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be at least 1")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.T / self.h - 1e-9))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "T": self.T,
            "h": self.h,
            "beta": self.beta if math.isfinite(self.beta) else "inf",
            "init_x": self.init_x.to_json_dict(),
            "init_y": self.init_y.to_json_dict(),
            "record_stride": self.record_stride,
            "seed": self.seed,
        }


@dataclasses.dataclass(frozen=True)
class ParticleState:
    """Positions of the two clouds at one time point."""

    t: float
    X: Array
    Y: Array

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        if X.shape[0] != Y.shape[0] or X.shape[0] < 1:
            raise UsageError("X and Y must hold the same positive number of particles")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclasses.dataclass
class TrajectoryRecording:
    """Recorded states of a particle run plus the generating configuration."""

    times: Array
    states: list
    config: SimConfig

    def __len__(self) -> int:
        return len(self.states)

    def summary(self) -> dict:
        """Per-time means and variances of both clouds."""
        mx = np.array([s.X.mean(axis=0) for s in self.states])
        my = np.array([s.Y.mean(axis=0) for s in self.states])
        vx = np.array([s.X.var(axis=0) for s in self.states])
        vy = np.array([s.Y.var(axis=0) for s in self.states])
        return {"times": self.times, "mean_x": mx, "mean_y": my, "var_x": vx, "var_y": vy}

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "config": self.config.to_json_dict(),
            "times": self.times.tolist(),
            "states": [
                {"t": s.t, "X": s.X.tolist(), "Y": s.Y.tolist()} for s in self.states
            ],
        }


def _chunks(n: int, workers: int):
    size = max(1, math.ceil(n / max(1, workers)))
    return [range(i, min(i + size, n)) for i in range(0, n, size)]


def drift(
    game: Game,
    state: ParticleState,
    workers: int = 1,
    use_fast: bool = True,
) -> tuple[Array, Array]:
    """Interaction drift of both clouds.

    Bx[i] = -(1/n) sum_j grad_x l(X_i, Y_j), By[i] = +(1/n) sum_j grad_y l(X_j, Y_i).
    Uses the game's closed-form moment reduction when available, otherwise the
    generic O(n^2) pairwise average (chunked over particles; results do not
    depend on the chunking).
    """
    X, Y = state.X, state.Y
    if use_fast and game.fast_drift is not None:
        bx, by = game.fast_drift(X, Y)
        return np.asarray(bx, dtype=float), np.asarray(by, dtype=float)

    n = X.shape[0]
    Bx = np.empty_like(X)
    By = np.empty_like(Y)

    def work(rows):
        gx = game.grad_x(X[rows, None, :], Y[None, :, :])
        Bx[rows] = -gx.mean(axis=1)
        gy = game.grad_y(X[None, :, :], Y[rows, None, :])
        By[rows] = gy.mean(axis=1)

    blocks = _chunks(n, workers)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, blocks))
    else:
        for rows in blocks:
            work(rows)
    return Bx, By


def em_step(
    state: ParticleState,
    game: Game,
    h: float,
    beta: float,
    noise: Array,
    workers: int = 1,
    use_fast: bool = True,
) -> ParticleState:
    """One explicit Euler-Maruyama step with drift frozen at the pre-step state.

    ``noise`` holds n standard-normal rows of width d_x + d_y; pass zeros (or
    beta=inf) for the deterministic surrogate.
    """
    if h <= 0:
        raise UsageError("h must be positive")
    if not (beta > 0):
        raise UsageError("beta must be positive (inf allowed)")
    Bx, By = drift(game, state, workers=workers, use_fast=use_fast)
    amp = 0.0 if math.isinf(beta) else math.sqrt(2.0 * h / beta)
    d_x = state.X.shape[1]
    X = state.X + h * Bx + amp * noise[:, :d_x]
    Y = state.Y + h * By + amp * noise[:, d_x:]
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        bad = np.flatnonzero(~(np.isfinite(X).all(axis=1) & np.isfinite(Y).all(axis=1)))
        raise NumericalBlowupError(
            f"non-finite particle positions at t={state.t + h:.6g} "
            f"(first offending particle index {int(bad[0])})"
        )
    return ParticleState(t=state.t + h, X=X, Y=Y)


class _NoiseStreams:
    """Per-particle Philox streams, consumed in step order and buffered in blocks."""

    def __init__(self, seed: int, keys: Array, dim: int, zero: bool):
        self.dim = dim
        self.zero = zero
        self.n = len(keys)
        if not zero:
            self.gens = [
                np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(1, int(k)))))
                for k in keys
            ]
        self.buffer = None
        self.offset = 0

    def next_block(self, n_steps: int) -> None:
        if self.zero:
            return
        self.buffer = np.empty((n_steps, self.n, self.dim))
        for i, g in enumerate(self.gens):
            self.buffer[:, i, :] = g.standard_normal((n_steps, self.dim))
        self.offset = 0

    def step_noise(self) -> Array:
        if self.zero:
            return np.zeros((self.n, self.dim))
        out = self.buffer[self.offset]
        self.offset += 1
        return out


def simulate(
    config: SimConfig,
    game: Game,
    workers: int = 1,
    particle_keys: Optional[Array] = None,
    use_fast: bool = True,
) -> TrajectoryRecording:
    """Run the coupled particle system and record every ``record_stride`` steps.

    Initial positions are drawn i.i.d. from the init specs through per-particle
    streams keyed by (seed, particle key), so the output is bit-identical for
    a fixed (config, game) regardless of ``workers``.
    """
    n = config.n
    keys = np.arange(n) if particle_keys is None else np.asarray(particle_keys)
    if keys.shape != (n,):
        raise UsageError("particle_keys must have one entry per particle")

    X0 = np.empty((n, game.d_x))
    Y0 = np.empty((n, game.d_y))
    for i, k in enumerate(keys):
        g = np.random.Generator(np.random.Philox(np.random.SeedSequence(config.seed, spawn_key=(0, int(k)))))
        X0[i] = config.init_x.sample(g, game.d_x, game.box_radius)
        Y0[i] = config.init_y.sample(g, game.d_y, game.box_radius)

    state = ParticleState(t=0.0, X=X0, Y=Y0)
    times = [0.0]
    states = [state]
    n_steps = config.n_steps
    streams = _NoiseStreams(
        config.seed, keys, game.d_x + game.d_y, zero=math.isinf(config.beta)
    )
    done = 0
    while done < n_steps:
        block = min(_NOISE_BLOCK, n_steps - done)
        streams.next_block(block)
        for _ in range(block):
            state = em_step(
                state, game, config.h, config.beta, streams.step_noise(),
                workers=workers, use_fast=use_fast,
            )
            done += 1
            if done % config.record_stride == 0:
                times.append(done * config.h)
                states.append(state)
    return TrajectoryRecording(times=np.asarray(times), states=states, config=config)


def empirical_marginals(state: ParticleState) -> tuple[EmpiricalMeasure, EmpiricalMeasure]:
    """Uniform-weight empirical measures of the two clouds."""
    return EmpiricalMeasure(points=state.X.copy()), EmpiricalMeasure(points=state.Y.copy())


def empirical_joint(state: ParticleState) -> EmpiricalMeasure:
    """Empirical measure of the paired cloud (X_i, Y_i); marginals project back exactly."""
    return EmpiricalMeasure(points=np.hstack([state.X, state.Y]))
