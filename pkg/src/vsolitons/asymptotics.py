"""Asymptotic norming constants and pairwise-collision consistency checks.

With velocities ordered (u strictly increasing), the multi-soliton field
splits as |t| grows into one-soliton profiles whose norming vectors are
dressed versions of the originals.  Intermediate spectator sets interpolate
between the in and out configurations and obey exact pairwise relations,
which `collision_consistency_residual` measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dressing import _blaschke, _dagger_apply, build_reduced_chain, one_soliton_field
from .errors import ValidationError
from .soldata import NormingVector, SolitonData, validate


def check_velocity_ordered(data: SolitonData) -> None:
    """Require u_1 < u_2 < ... (distinct velocities, canonical ordering)."""
    us = [pt.u for pt, _ in data.points]
    if any(b <= a for a, b in zip(us, us[1:])):
        raise ValidationError(f"u values must be strictly increasing, got {us}")


@dataclass(frozen=True, eq=False)
class CollisionContext:
    """Velocity-ordered data with a fixed spectator set.

    Bundles the standing assumptions of the pairwise-collision relations so a
    batch of checks can share one validated state.
    """

    data: SolitonData
    spectators: tuple

    def __post_init__(self):
        check_velocity_ordered(self.data)
        sp = tuple(int(i) for i in self.spectators)
        if len(set(sp)) != len(sp) or not set(sp) <= set(range(self.data.N)):
            raise ValidationError(f"spectators {sp} must be distinct data indices")
        object.__setattr__(self, "spectators", sp)

    def gamma(self, j: int) -> np.ndarray:
        return intermediate_gamma(j, self.spectators, self.data)

    def residual(self, j: int, l: int) -> float:
        return collision_consistency_residual(j, l, self.spectators, self.data)


def _spectator_tuple(j: int, spectators, N: int) -> tuple:
    sp = tuple(int(i) for i in spectators)
    if len(set(sp)) != len(sp) or not set(sp) <= set(range(N)):
        raise ValidationError(f"spectators {sp} must be distinct indices in 0..{N-1}")
    if j in sp:
        raise ValidationError(f"index {j} cannot be its own spectator")
    return sp


def intermediate_gamma(j: int, spectators, data: SolitonData) -> np.ndarray:
    """Intermediate-time norming vector for soliton j with the given spectators.

    gamma = prod_{p not in {j} u spectators} f_p(k_j*) * d^dag_spectators(k_j) beta_j.
    The product runs over the complement set; the chain is built on the
    spectator indices (any order gives the same degree factor).
    """
    validate(data)
    j = int(j)
    sp = _spectator_tuple(j, spectators, data.N)
    point, nv = data.points[j]
    chain = build_reduced_chain(data, sp)
    w = _dagger_apply(chain.factors, point.k, nv.beta)
    pref = 1.0 + 0.0j
    excluded = set(sp) | {j}
    kj_conj = point.k.conjugate()
    for p in range(data.N):
        if p not in excluded:
            pref *= _blaschke(data.points[p][0].k, kj_conj)
    return pref * w


def beta_in(j: int, data: SolitonData) -> NormingVector:
    """Norming vector of soliton j in the t -> -infty profile."""
    check_velocity_ordered(data)
    return NormingVector(intermediate_gamma(j, range(j + 1, data.N), data))


def beta_out(j: int, data: SolitonData) -> NormingVector:
    """Norming vector of soliton j in the t -> +infty profile."""
    check_velocity_ordered(data)
    return NormingVector(intermediate_gamma(j, range(0, j), data))


def _unit(vec: np.ndarray) -> np.ndarray:
    return vec / np.linalg.norm(vec)


def xi_factor(j: int, l: int, spectators, data: SolitonData) -> float:
    """Positive norm ratio |gamma_{j,rho}| / |gamma_{j, l rho}| in closed form.

    Xi^2 = |f_l(k_j*)|^2 (1 + v_j v_l / |k_l - k_j|^2 * |p|^2) with
    p = p_{l,rho}^dag p_{j, l rho}; symmetric under j <-> l.
    """
    kj = data.points[j][0].k
    kl = data.points[l][0].k
    p_l_rho = _unit(intermediate_gamma(l, spectators, data))
    p_j_lrho = _unit(intermediate_gamma(j, tuple(spectators) + (l,), data))
    flj = _blaschke(kl, kj.conjugate())
    coeff = (data.points[j][0].v * data.points[l][0].v) / abs(kl - kj) ** 2
    overlap = abs(np.vdot(p_l_rho, p_j_lrho)) ** 2
    return abs(flj) * math.sqrt(1.0 + coeff * overlap)


def collision_consistency_residual(j: int, l: int, spectators, data: SolitonData) -> float:
    """Residual of the exact pairwise-collision relations for j overtaking l.

    Requires u_j < u_l and j, l outside the spectator set.  Returns the max
    infinity-norm residual of the two vector relations, with the norm ratio
    taken as the positive root of its closed form.
    """
    j, l = int(j), int(l)
    sp = _spectator_tuple(j, spectators, data.N)
    if l in sp or l == j:
        raise ValidationError("l must be distinct from j and the spectators")
    if not data.points[j][0].u < data.points[l][0].u:
        raise ValidationError("relations assume u_j < u_l")
    kj = data.points[j][0].k
    kl = data.points[l][0].k

    p_l_rho = _unit(intermediate_gamma(l, sp, data))
    p_j_lrho = _unit(intermediate_gamma(j, sp + (l,), data))
    p_l_jrho = _unit(intermediate_gamma(l, sp + (j,), data))
    p_j_rho = _unit(intermediate_gamma(j, sp, data))

    fjl = _blaschke(kj, kl.conjugate())  # f_j(k_l*)
    flj = _blaschke(kl, kj.conjugate())  # f_l(k_j*)
    xi = xi_factor(j, l, sp, data)

    cj = fjl.conjugate()
    rhs_l = (cj / xi) * (p_l_rho + (cj - 1.0) * np.vdot(p_j_lrho, p_l_rho) * p_j_lrho)
    res_l = float(np.max(np.abs(p_l_jrho - rhs_l)))

    rhs_j = (flj / xi) * (p_j_lrho + (flj - 1.0) * np.vdot(p_l_rho, p_j_lrho) * p_l_rho)
    res_j = float(np.max(np.abs(p_j_rho - rhs_j)))
    return max(res_l, res_j)


def asymptotic_profile(data: SolitonData, x, t, direction: str):
    """Sum of one-soliton profiles with the in/out norming vectors.

    Approximates the exact field up to O(e^{-v w |t|}) terms; direction is
    "in" or "out".
    """
    if direction not in ("in", "out"):
        raise ValidationError('direction must be "in" or "out"')
    check_velocity_ordered(data)
    pick = beta_in if direction == "in" else beta_out
    xs = np.asarray(x, dtype=np.float64)
    ts = np.asarray(t, dtype=np.float64)
    shape = np.broadcast(xs, ts).shape
    total = np.zeros(shape + (data.n,), dtype=np.complex128)
    for j in range(data.N):
        total = total + one_soliton_field(data.points[j][0], pick(j, data), xs, ts)
    return total


def min_relative_velocity(data: SolitonData) -> float:
    """min_{l != j} |w_l - w_j|; scales the asymptotic error exponent."""
    ws = [pt.velocity for pt, _ in data.points]
    gaps = [abs(a - b) for i, a in enumerate(ws) for b in ws[i + 1 :]]
    return min(gaps) if gaps else math.inf
