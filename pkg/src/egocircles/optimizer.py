"""Randomized perturbation search over overlapping circles.

Every iteration perturbs the membership of all alters at once, tightens each
circle's threshold to its least similar member, drops circles whose threshold
falls under ``tau_l`` and keeps the result only if the log-likelihood strictly
improves.  Random numbers come from numpy's PCG64 bit generator.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .model import CircleState, EgoModel, log_likelihood
from .profiles import SIM_CAP

RNG_ALGORITHM = "numpy.random.PCG64"


@dataclass
class OptimizerConfig:
    tau_l: float = 0.2
    tau_init: float = SIM_CAP
    patience: int | None = None
    """Consecutive rejections before stopping; None means |V|."""
    max_iterations: int | None = None
    """Hard cap on iterations; None means 200 * |V|."""
    seed: int = 0
    keep_trace: bool = True

    def __post_init__(self):
        if self.tau_l <= 0:
            raise ValueError("tau_l must be positive")
        if self.patience is not None and self.patience < 1:
            raise ValueError("patience must be >= 1")

    def resolved(self, n: int) -> tuple[int, int]:
        patience = self.patience if self.patience is not None else max(n, 1)
        cap = self.max_iterations if self.max_iterations is not None else 200 * max(n, 1)
        return patience, cap


@dataclass
class DetectionResult:
    circles: list[tuple[tuple[str, ...], float]]
    loglik: float
    iterations: int
    accepted: int
    trace: list[float] = field(default_factory=list)
    state: CircleState | None = field(default=None, repr=False)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def ego_seed(seed: int, ego_id: str) -> int:
    digest = hashlib.blake2b(ego_id.encode("utf-8"), digest_size=8).digest()
    return (seed ^ int.from_bytes(digest, "little")) & 0xFFFFFFFFFFFFFFFF


def init_state(model: EgoModel, config: OptimizerConfig) -> CircleState:
    if model.n < 1:
        raise ValueError("ego network has no alters")
    m = np.eye(model.n, dtype=np.uint8)
    state = CircleState(m, np.full(model.n, float(config.tau_init)))
    state.loglik = log_likelihood(model, state)
    return state


def membership_deltas(n_in: int, n_out: int, rng: np.random.Generator) -> tuple[int, int]:
    """How many circles to add an alter to and remove it from.

    ``n_in``/``n_out`` count the circles that do / do not contain the alter.
    The add count is ceil((k1 + n_in) / n_in) for k1 drawn from [1, n_out) and
    the remove count ceil((k2 + n_in) / n_in) for k2 from [1, n_in); empty
    draw ranges give zero, except n_out == 1 where k1 = 1.
    """
    base = max(n_in, 1)
    add = 0
    if n_out >= 1:
        hi = max(n_out - 1, 1)
        valid = [k for k in range(1, hi + 1) if -(-(k + base) // base) <= n_out]
        if valid:
            k1 = valid[int(rng.integers(len(valid)))]
            add = -(-(k1 + base) // base)
        else:
            add = n_out
    remove = 0
    if n_in >= 2:
        valid = [k for k in range(1, n_in) if -(-(k + n_in) // n_in) <= n_in]
        if valid:
            k2 = valid[int(rng.integers(len(valid)))]
            remove = -(-(k2 + n_in) // n_in)
    return add, remove


def perturb(state: CircleState, rng: np.random.Generator) -> np.ndarray:
    """Randomly move every alter into and out of circles; returns the new membership.

    Circles left without members are removed.
    """
    m = state.membership.copy()
    k, n = m.shape
    if k == 0:
        return m
    for y in range(n):
        col = state.membership[:, y]
        s1 = np.flatnonzero(col)
        s2 = np.flatnonzero(col == 0)
        add, remove = membership_deltas(len(s1), len(s2), rng)
        if add:
            m[rng.choice(s2, size=add, replace=False), y] = 1
        if remove:
            m[rng.choice(s1, size=remove, replace=False), y] = 0
    return m[m.any(axis=1)]


def update_thresholds(model: EgoModel, membership: np.ndarray) -> CircleState:
    taus = np.asarray(kernels.circle_thresholds(model.dist, np.ascontiguousarray(membership)))
    return CircleState(membership, taus)


def prune(state: CircleState, tau_l: float) -> CircleState:
    keep = state.taus >= tau_l
    return CircleState(np.ascontiguousarray(state.membership[keep]), state.taus[keep])


def step(model: EgoModel, state: CircleState, rng: np.random.Generator,
         config: OptimizerConfig) -> tuple[CircleState, bool]:
    cand = prune(update_thresholds(model, perturb(state, rng)), config.tau_l)
    cand.loglik = log_likelihood(model, cand)
    if cand.loglik > state.loglik:
        return cand, True
    return state, False


StepHook = Callable[[int, CircleState, CircleState, bool], None]


def detect(model: EgoModel, config: OptimizerConfig | None = None,
           on_step: StepHook | None = None) -> DetectionResult:
    """Run the search to convergence on one ego network.

    ``on_step(iteration, before, after, accepted)`` is called after every step.
    """
    config = config or OptimizerConfig()
    rng = make_rng(config.seed)
    state = init_state(model, config)
    patience, cap = config.resolved(model.n)
    trace = [state.loglik] if config.keep_trace else []
    iterations = accepted = rejections = 0
    if model.n >= 2:
        while iterations < cap and rejections < patience:
            new, ok = step(model, state, rng, config)
            iterations += 1
            if on_step is not None:
                on_step(iterations, state, new, ok)
            if ok:
                accepted += 1
                rejections = 0
                if config.keep_trace:
                    trace.append(new.loglik)
            else:
                rejections += 1
            state = new
    alters = model.ego_net.alters
    circles = [(tuple(alters[i] for i in sorted(members)), float(t))
               for members, t in zip(state.member_sets(), state.taus)]
    if math.isnan(state.loglik):
        raise ArithmeticError("log-likelihood is NaN")
    return DetectionResult(circles, state.loglik, iterations, accepted, trace, state)
