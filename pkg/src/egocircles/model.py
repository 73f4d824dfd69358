"""Circle-membership edge model: closeness terms, edge probability, log-likelihood."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ego import EgoNetwork
from .profiles import EPS, SIM_CAP, distance_matrix, similarity_from_distance

P_MAX = 1.0 - 2.0 ** -53
P_MIN = np.finfo(float).tiny


@dataclass(frozen=True)
class Circle:
    members: frozenset
    tau: float

    def __post_init__(self):
        if not self.members:
            raise ValueError("a circle needs at least one member")


class EgoModel:
    """Fixed per-ego data: adjacency plus the pairwise distance and similarity caches."""

    def __init__(self, ego_net: EgoNetwork, profiles: np.ndarray):
        profiles = np.asarray(profiles, dtype=float)
        if len(profiles) != ego_net.n:
            raise ValueError(f"{len(profiles)} profiles for {ego_net.n} alters")
        self.ego_net = ego_net
        self.n = ego_net.n
        self.adj = np.ascontiguousarray(ego_net.adjacency(), dtype=np.uint8)
        self.dist = np.ascontiguousarray(distance_matrix(profiles))
        self.sims = np.ascontiguousarray(similarity_from_distance(self.dist))

    @classmethod
    def from_matrices(cls, adj, dist) -> "EgoModel":
        """Model over a bare distance matrix (alters named "0".."n-1")."""
        self = cls.__new__(cls)
        adj = np.asarray(adj, dtype=np.uint8)
        n = adj.shape[0]
        alters = tuple(str(i) for i in range(n))
        edges = [(alters[i], alters[j]) for i in range(n) for j in range(i + 1, n) if adj[i, j]]
        self.ego_net = EgoNetwork.from_edges("ego", alters, edges)
        self.n = n
        self.adj = np.ascontiguousarray(adj)
        self.dist = np.ascontiguousarray(np.asarray(dist, dtype=float))
        self.sims = np.ascontiguousarray(similarity_from_distance(self.dist))
        return self


@dataclass
class CircleState:
    """Circles as a (K, n) uint8 membership matrix with one threshold per row."""
    membership: np.ndarray
    taus: np.ndarray
    loglik: float = field(default=float("nan"))

    @property
    def k(self) -> int:
        return len(self.taus)

    @property
    def lam(self) -> float:
        return float(self.taus.max()) if len(self.taus) else 0.0

    def member_sets(self) -> list[frozenset]:
        return [frozenset(np.flatnonzero(row).tolist()) for row in self.membership]

    def circles(self) -> list[Circle]:
        return [Circle(m, float(t)) for m, t in zip(self.member_sets(), self.taus)]

    def copy(self) -> "CircleState":
        return CircleState(self.membership.copy(), self.taus.copy(), self.loglik)

    def same_as(self, other: "CircleState") -> bool:
        return (np.array_equal(self.membership, other.membership)
                and np.array_equal(self.taus, other.taus)
                and (self.loglik == other.loglik
                     or (math.isnan(self.loglik) and math.isnan(other.loglik))))


def membership_matrix(member_sets, n: int) -> np.ndarray:
    m = np.zeros((len(member_sets), n), dtype=np.uint8)
    for row, members in enumerate(member_sets):
        m[row, list(members)] = 1
    return m


def make_state(model: EgoModel, member_sets, taus=None) -> CircleState:
    """State for given circles; thresholds default to the tightest feasible values."""
    m = membership_matrix(member_sets, model.n)
    if taus is None:
        taus = kernels.circle_thresholds(model.dist, m)
    state = CircleState(m, np.asarray(taus, dtype=float))
    state.loglik = log_likelihood(model, state)
    return state


def sim_to_circle(members, y: int, dist: np.ndarray) -> float:
    """Reciprocal of the mean distance from ``y`` to the other members of a circle."""
    if not members:
        raise ValueError("empty circle")
    others = sorted(z for z in members if z != y)
    if not others:
        return SIM_CAP
    total = 0.0
    for z in sorted(set(members) | {y}):
        total += float(dist[y, z])
    mean_d = total / len(others)
    return min(1.0 / max(mean_d, EPS), SIM_CAP)


def beta_components(x: int, y: int, model: EgoModel, state: CircleState) -> tuple[float, float]:
    s = model.sims[x, y]
    lam = state.lam
    b1 = b2 = 0.0
    for row, tau in zip(state.membership, state.taus):
        denom = s - tau + lam
        if denom <= 0:
            raise ArithmeticError(f"non-positive closeness denominator {denom}")
        if row[x] and row[y]:
            b1 += 1.0 / denom
        else:
            b2 += 1.0 / denom
    return b1, b2


def phi_from_betas(b1: float, b2: float) -> float:
    return b1 * b1 - b2 * b2


def phi(x: int, y: int, model: EgoModel, state: CircleState) -> float:
    return phi_from_betas(*beta_components(x, y, model, state))


def edge_probability(phi_value):
    """logistic(phi), kept strictly inside (0, 1)."""
    phi_value = np.asarray(phi_value, dtype=float)
    p = np.where(phi_value >= 0,
                 1.0 / (1.0 + np.exp(-np.abs(phi_value))),
                 np.exp(-np.abs(phi_value)) / (1.0 + np.exp(-np.abs(phi_value))))
    p = np.clip(p, P_MIN, P_MAX)
    return float(p) if p.ndim == 0 else p


def non_edge_probability(phi_value):
    return 1.0 - edge_probability(phi_value)


def softplus(x):
    out = kernels.softplus(x)
    return float(out) if np.ndim(out) == 0 else out


def log_likelihood(model: EgoModel, state: CircleState) -> float:
    return float(kernels.log_likelihood(model.sims, model.adj, state.membership, state.taus))


def phi_matrix(model: EgoModel, state: CircleState) -> np.ndarray:
    b1, b2 = kernels.pair_betas(model.sims, state.membership, state.taus)
    return np.asarray(b1) ** 2 - np.asarray(b2) ** 2
