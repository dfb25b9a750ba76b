"""Continuous limits of discrete connections and order-of-accuracy tools.

Tangent vectors are stored in trivialized coordinates: a shape velocity in
the chart plus a left-trivialized fiber velocity eta (the group curve is
g exp(t eta)).  Derivatives are taken along the straight chart line with a
one-parameter subgroup in the fiber; a 4th-order central stencil plus one
Richardson extrapolation level keeps the finite differencing well inside
the stated tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import lie_group as lg
from .bundle import Bundle, BundlePoint, PairElement, ShapePoint
from .connection import DiscreteConnection, eval_form, horizontal_component, vertical_component
from .errors import BasepointMismatchError, DegenerateFitError
from .lie_group import AlgebraElement, GroupElement

DEFAULT_H_LIST = (1.0e-2, 5.0e-3, 2.5e-3)
# Below this error magnitude a log-log fit measures rounding noise, not order.
ERROR_FLOOR = 1.0e-13


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A trivialized tangent vector (shape velocity, left-trivialized fiber velocity)."""

    base: BundlePoint
    shape_velocity: np.ndarray
    fiber_velocity: AlgebraElement

    def __post_init__(self):
        v = np.asarray(self.shape_velocity, dtype=float).reshape(self.base.shape.coords.shape)
        object.__setattr__(self, "shape_velocity", v)

    def coordinates(self) -> np.ndarray:
        return np.concatenate([self.shape_velocity, self.fiber_velocity.vector])


def tangent(base: BundlePoint, shape_velocity, fiber_velocity) -> TangentVector:
    group = base.fiber.group
    if isinstance(fiber_velocity, AlgebraElement):
        eta = fiber_velocity
    else:
        eta = AlgebraElement(group, fiber_velocity)
    return TangentVector(base, np.asarray(shape_velocity, dtype=float), eta)


def vertical_tangent(q: BundlePoint, xi: AlgebraElement) -> TangentVector:
    """The infinitesimal generator xi_Q(q): zero shape velocity, eta = Ad_{g^-1} xi."""
    eta = lg.adjoint(lg.inverse(q.fiber), xi)
    return TangentVector(q, np.zeros_like(q.shape.coords), eta)


def chart_curve(v: TangentVector, t: float) -> BundlePoint:
    """The curve (x + t xdot, g exp(t eta)) through v.base with velocity v."""
    x = ShapePoint(v.base.shape.coords + t * v.shape_velocity)
    step = lg.exp(AlgebraElement(v.fiber_velocity.group, t * v.fiber_velocity.vector))
    return BundlePoint(x, lg.compose(v.base.fiber, step))


def chart_pair_log(p: PairElement) -> TangentVector:
    """Inverse of chart_curve at t=1: chart difference plus fiber log.

    This is the Riemannian log of the product of the flat chart metric with
    a bi-invariant (or left-invariant) group metric; it satisfies
    chart_curve(vertical lift of xi) = exp(xi) . q, the compatibility needed
    by the exact discretization.
    """
    dx = p.second.shape.coords - p.first.shape.coords
    rel = lg.compose(lg.inverse(p.first.fiber), p.second.fiber)
    return TangentVector(p.first, dx, lg.log(rel))


@dataclass(frozen=True)
class ContinuousConnection:
    """A principal connection given by its one-form on trivialized tangents."""

    bundle: Bundle
    one_form: Callable[[TangentVector], AlgebraElement]


def shape_form_connection(bundle: Bundle, coefficient: Callable[[np.ndarray], np.ndarray]) -> ContinuousConnection:
    """The connection with local form Ad_g(eta + a(x) xdot).

    ``coefficient(x)`` returns the (algebra dim x shape dim) matrix a(x).
    Verticality and equivariance hold for any smooth coefficient field.
    """

    def one_form(v: TangentVector) -> AlgebraElement:
        a = np.asarray(coefficient(v.base.shape.coords), dtype=float)
        vec = v.fiber_velocity.vector + a @ v.shape_velocity
        return lg.adjoint(v.base.fiber, AlgebraElement(bundle.group, vec))

    return ContinuousConnection(bundle, one_form)


def _validate_h_list(h_list: Sequence[float]) -> list[float]:
    hs = [float(h) for h in h_list]
    if not hs or any(h <= 0 for h in hs) or any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("h_list must be positive and strictly decreasing")
    return hs


def _stencil(sample: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    # 4th-order central difference for the first derivative at 0.
    return (-sample(2 * h) + 8 * sample(h) - 8 * sample(-h) + sample(-2 * h)) / (12 * h)


def derivative_at_zero(sample: Callable[[float], np.ndarray],
                       h_list: Sequence[float] = DEFAULT_H_LIST) -> np.ndarray:
    """4th-order stencil estimates over h_list plus one Richardson level."""
    hs = _validate_h_list(h_list)
    estimates = [_stencil(sample, h) for h in hs]
    if len(estimates) == 1:
        return estimates[0]
    r = hs[-2] / hs[-1]
    return (r**4 * estimates[-1] - estimates[-2]) / (r**4 - 1.0)


def induced_continuous(c: DiscreteConnection, v: TangentVector,
                       h_list: Sequence[float] = DEFAULT_H_LIST) -> AlgebraElement:
    """The derivative of t -> log form(q, q(t)) at t = 0 along the chart curve.

    Recovers the continuous connection underlying a consistent discrete one;
    on a vertical tangent xi_Q(q) the result is xi exactly up to stencil
    error, thanks to the splitting property.
    """
    group = c.bundle.group
    q0 = v.base

    def sample(t: float) -> np.ndarray:
        return lg.log(eval_form(c, PairElement(q0, chart_curve(v, t)))).vector

    return AlgebraElement(group, derivative_at_zero(sample, h_list))


def exact_discrete(a: ContinuousConnection,
                   metric_log: Callable[[PairElement], TangentVector],
                   p: PairElement) -> GroupElement:
    """exp of the one-form evaluated on the metric log of the pair."""
    return lg.exp(a.one_form(metric_log(p)))


def cayley_discrete(a: ContinuousConnection,
                    metric_log: Callable[[PairElement], TangentVector],
                    p: PairElement) -> GroupElement:
    """Cayley transform of the one-form value: a second-order approximant."""
    return lg.cayley(a.one_form(metric_log(p)))


def _local_rep_from_value(bundle: Bundle, a: ContinuousConnection,
                          metric_log, to_group) -> Callable[[ShapePoint, ShapePoint], GroupElement]:
    e = lg.identity(bundle.group)

    def rep(x0: ShapePoint, x1: ShapePoint) -> GroupElement:
        p = PairElement(BundlePoint(x0, e), BundlePoint(x1, e))
        return to_group(a.one_form(metric_log(p)))

    return rep


def exponentiated_connection(a: ContinuousConnection,
                             metric_log: Callable[[PairElement], TangentVector] = chart_pair_log,
                             validity_radius: float = 0.5) -> DiscreteConnection:
    """The discrete connection exp(one_form(metric_log)), stored via its local rep."""
    rep = _local_rep_from_value(a.bundle, a, metric_log, lg.exp)
    return DiscreteConnection(a.bundle, rep, validity_radius)


def cayley_connection(a: ContinuousConnection,
                      metric_log: Callable[[PairElement], TangentVector] = chart_pair_log,
                      validity_radius: float = 0.5) -> DiscreteConnection:
    """Second-order Cayley counterpart of exponentiated_connection."""
    rep = _local_rep_from_value(a.bundle, a, metric_log, lg.cayley)
    return DiscreteConnection(a.bundle, rep, validity_radius)


def endpoint_connection(a: ContinuousConnection,
                        metric_log: Callable[[PairElement], TangentVector] = chart_pair_log,
                        validity_radius: float = 0.5) -> DiscreteConnection:
    """First-order variant: the one-form is evaluated at the far endpoint.

    A literal forward-difference exponential I + hat(...) leaves the group,
    so the one-sided first-order scheme shifts the evaluation point instead.
    """

    def rep(x0: ShapePoint, x1: ShapePoint) -> GroupElement:
        e = lg.identity(a.bundle.group)
        v = metric_log(PairElement(BundlePoint(x1, e), BundlePoint(x0, e)))
        flipped = TangentVector(v.base, -v.shape_velocity,
                                AlgebraElement(v.fiber_velocity.group, -v.fiber_velocity.vector))
        return lg.exp(a.one_form(flipped))

    return DiscreteConnection(a.bundle, rep, validity_radius)


def unit_directions(bundle: Bundle, q: BundlePoint, count: int = 32,
                    seed: int = 7) -> list[TangentVector]:
    """Deterministic unit tangent directions at q (seeded PCG sphere sample)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    dim = bundle.shape_dim + bundle.group.dim
    out = []
    for _ in range(count):
        raw = rng.standard_normal(dim)
        raw /= np.linalg.norm(raw)
        out.append(tangent(q, raw[: bundle.shape_dim], raw[bundle.shape_dim:]))
    return out


@dataclass(frozen=True)
class OrderEstimate:
    """Result of an order-of-accuracy sweep.

    ``order`` is the fitted slope of log max-error against log h minus one
    (the analytic order k); ``exact_match`` marks sweeps whose errors all sat
    below the floating-point floor, where ``order`` is reported as inf.
    """

    order: float
    slope: float
    step_sizes: tuple[float, ...]
    max_errors: tuple[float, ...]
    errors: tuple[tuple[float, ...], ...]
    exact_match: bool = False


def estimate_order(candidate: DiscreteConnection, exact: DiscreteConnection,
                   q: BundlePoint, directions: Sequence[TangentVector],
                   h_list: Sequence[float]) -> OrderEstimate:
    """Fit the analytic order of a candidate connection against a reference.

    For each step size h and unit direction v the error is the
    conjugation-invariant norm of exact(q, q_h) candidate(q, q_h)^-1 with
    q_h = chart_curve(v, h).  The fitted slope of log max-error versus
    log h minus one is the reported order.
    """
    hs = _validate_h_list(h_list)
    if hs[0] / hs[-1] < 10.0:
        raise ValueError("h_list must span at least one decade")
    for v in directions:
        n = np.linalg.norm(v.coordinates())
        if abs(n - 1.0) > 1.0e-8:
            raise ValueError(f"directions must be unit vectors (norm {n:.6f})")
    rows = []
    for h in hs:
        row = []
        for v in directions:
            p = PairElement(q, chart_curve(v, h))
            err = lg.compose(eval_form(exact, p), lg.inverse(eval_form(candidate, p)))
            row.append(lg.conj_invariant_norm(err))
        rows.append(tuple(row))
    max_errors = tuple(max(row) for row in rows)
    if all(e < ERROR_FLOOR for e in max_errors):
        return OrderEstimate(math.inf, math.inf, tuple(hs), max_errors, tuple(rows), True)
    if any(e < ERROR_FLOOR for e in max_errors):
        raise DegenerateFitError(
            "part of the sweep sits at the floating-point floor; shrink the h range"
        )
    slope, _ = np.polyfit(np.log(hs), np.log(max_errors), 1)
    return OrderEstimate(float(slope) - 1.0, float(slope), tuple(hs), max_errors, tuple(rows))


def _require_based_at(v: TangentVector, q: BundlePoint) -> None:
    from .bundle import points_match

    if not points_match(v.base, q):
        raise BasepointMismatchError("curve velocity must be based at p.second")


def _fiber_derivative_at(curve: Callable[[float], GroupElement],
                         h_list: Sequence[float]) -> AlgebraElement:
    g0inv = lg.inverse(curve(0.0))
    group = g0inv.group

    def sample(t: float) -> np.ndarray:
        return lg.log(lg.compose(g0inv, curve(t))).vector

    return AlgebraElement(group, derivative_at_zero(sample, h_list))


def vertical_variation(c: DiscreteConnection, p: PairElement, curve_velocity: TangentVector,
                       h_list: Sequence[float] = DEFAULT_H_LIST) -> TangentVector:
    """Derivative of eps -> ver(q0, q1^eps).second along the chart curve at q1.

    The vertical endpoint moves only in the fiber over pi(q0); the result is
    its left-trivialized velocity at ver(p).second.
    """
    _require_based_at(curve_velocity, p.second)

    def curve(t: float) -> GroupElement:
        moved = vertical_component(c, PairElement(p.first, chart_curve(curve_velocity, t)))
        return moved.second.fiber

    base = vertical_component(c, p).second
    eta = _fiber_derivative_at(curve, h_list)
    return TangentVector(base, np.zeros_like(p.first.shape.coords), eta)


def horizontal_variation(c: DiscreteConnection, p: PairElement, curve_velocity: TangentVector,
                         h_list: Sequence[float] = DEFAULT_H_LIST) -> TangentVector:
    """Derivative of eps -> hor(q0, q1^eps).second along the chart curve at q1.

    The horizontal endpoint follows the shape curve of the variation; its
    fiber velocity comes from the local representation alone.
    """
    _require_based_at(curve_velocity, p.second)

    def curve(t: float) -> GroupElement:
        moved = horizontal_component(c, PairElement(p.first, chart_curve(curve_velocity, t)))
        return moved.second.fiber

    base = horizontal_component(c, p).second
    eta = _fiber_derivative_at(curve, h_list)
    return TangentVector(base, np.array(curve_velocity.shape_velocity), eta)
