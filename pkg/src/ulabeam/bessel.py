"""Bessel-beam phase synthesis and closed-form limit analyses for a ULA.

The beam is parameterized by a steering angle theta_a (from the y-axis,
positive toward +x) and an axicon-like cone angle alpha. The synthesis
phases make each element's phase equal to k times its distance to the
piecewise-linear wavefront curve, so the element rays (perpendicular to the
wavefront) converge on the steering axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .array_geometry import CircleObstacle, Point2, RectObstacle, UlaConfig
from .field import Excitation

__all__ = [
    "BesselDesign",
    "BesselLimits",
    "SelfHealReport",
    "wavefront",
    "bessel_phases",
    "direct_ray",
    "propagation_limits",
    "min_elements",
    "max_spacing",
    "min_spacing_for_target",
    "self_heal_rect",
    "self_heal_circle",
]


@dataclass(frozen=True)
class BesselDesign:
    """Steering angle theta_a and cone angle alpha, both in radians."""

    theta_a: float
    alpha: float

    def __post_init__(self) -> None:
        if not abs(self.theta_a) < math.pi / 2:
            raise ValueError("|theta_a| must be < pi/2")
        if not 0.0 < self.alpha < math.pi / 2:
            raise ValueError("alpha must be in (0, pi/2)")

    def definable(self) -> bool:
        """Wavefront function exists: alpha + |theta_a| < pi/2."""
        return self.alpha + abs(self.theta_a) < math.pi / 2

    def steerable(self) -> bool:
        """Guaranteed steering: |theta_a| <= alpha < pi/2 - |theta_a|.

        Comparisons are exact, closed on the left and open on the right.
        """
        return abs(self.theta_a) <= self.alpha < math.pi / 2 - abs(self.theta_a)

    def marginal(self) -> bool:
        """True on the degraded boundary alpha == |theta_a| (distance collapses)."""
        return self.alpha == abs(self.theta_a)


@dataclass(frozen=True)
class BesselLimits:
    d_max: float
    d_lim: float
    ref_point_pos: Point2
    ref_point_neg: Point2


@dataclass(frozen=True)
class SelfHealReport:
    """Self-healing onset distances and the elements that set them.

    A side is None when no element clears the obstacle on that side. When
    x_p_star < 0 (resp. x_m_star > 0) every element of that side's beam
    clears the obstacle, so the beam is never blocked; the corresponding
    flag is set.
    """

    d_h_pos: float | None
    d_h_neg: float | None
    x_p_star: float | None
    x_m_star: float | None
    pos_unblocked: bool
    neg_unblocked: bool


def _require_steerable(d: BesselDesign) -> None:
    if abs(d.theta_a) > d.alpha:
        raise ValueError("design not steerable: alpha < |theta|")
    if d.alpha >= math.pi / 2 - abs(d.theta_a):
        raise ValueError("design not steerable: alpha >= pi/2 - |theta|")


def wavefront(x, d: BesselDesign):
    """Wavefront curve height at transverse position x.

    Piecewise linear: tan(alpha - theta_a) * x for x >= 0,
    -tan(alpha + theta_a) * x otherwise. Scalar in, scalar out.
    """
    if not d.definable():
        raise ValueError("wavefront undefined: alpha + |theta_a| >= pi/2")
    xv = np.asarray(x, dtype=float)
    out = np.where(
        xv >= 0,
        math.tan(d.alpha - d.theta_a) * xv,
        -math.tan(d.alpha + d.theta_a) * xv,
    )
    return float(out) if np.isscalar(x) or xv.ndim == 0 else out


def bessel_phases(cfg: UlaConfig, d: BesselDesign) -> Excitation:
    """Unit-magnitude excitation with the Bessel synthesis phases.

    phi_n = k |sin(alpha - theta_a)| x_n for x_n >= 0 and
    -k |sin(alpha + theta_a)| x_n otherwise; phi_n / k equals the distance
    from element n to the wavefront curve.
    """
    _require_steerable(d)
    xs = cfg.element_xs()
    k = cfg.wavenumber()
    phases = np.where(
        xs >= 0,
        k * abs(math.sin(d.alpha - d.theta_a)) * xs,
        -k * abs(math.sin(d.alpha + d.theta_a)) * xs,
    )
    return Excitation(np.ones_like(xs), phases, np.ones_like(xs, dtype=bool))


def direct_ray(y, x_tn: float, d: BesselDesign):
    """x-coordinate at height y of the ray leaving the element at x_tn."""
    _require_steerable(d)
    slope = -math.tan(d.alpha - d.theta_a) if x_tn >= 0 else math.tan(d.alpha + d.theta_a)
    yv = np.asarray(y, dtype=float)
    out = slope * yv + x_tn
    return float(out) if np.isscalar(y) or yv.ndim == 0 else out


def propagation_limits(cfg: UlaConfig, d: BesselDesign) -> BesselLimits:
    """Propagation-distance limits and the aperture-edge reference points.

    d_max = R cos(alpha + |theta_a|) / sin(alpha) is where the shorter-lived
    side of the beam expires; d_lim = R cos(alpha - |theta_a|) / sin(alpha)
    where the other side does. Both reference points lie on the steering
    axis x = y tan(theta_a).
    """
    _require_steerable(d)
    r_half = cfg.half_aperture()
    t_th = math.tan(d.theta_a)
    y_pos = r_half / (t_th + math.tan(d.alpha - d.theta_a))
    ref_pos = Point2(y_pos * t_th, y_pos)
    y_neg = -r_half / (t_th - math.tan(d.alpha + d.theta_a))
    ref_neg = Point2(y_neg * t_th, y_neg)
    sin_a = math.sin(d.alpha)
    d_max = r_half * math.cos(d.alpha + abs(d.theta_a)) / sin_a
    d_lim = r_half * math.cos(d.alpha - abs(d.theta_a)) / sin_a
    return BesselLimits(d_max=d_max, d_lim=d_lim, ref_point_pos=ref_pos, ref_point_neg=ref_neg)


def min_elements(d_target: float, d: BesselDesign, spacing: float) -> int:
    """Minimum element count so the beam's d_max reaches d_target."""
    _require_steerable(d)
    if not (d_target > 0 and spacing > 0):
        raise ValueError("d_target and spacing must be positive")
    value = 2.0 * d_target * math.sin(d.alpha) / (spacing * math.cos(d.alpha + abs(d.theta_a))) + 1.0
    return int(math.ceil(value))


def max_spacing(d: BesselDesign, wavelength: float) -> float:
    """Spatial-sampling upper bound on element spacing for this design."""
    _require_steerable(d)
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    return wavelength / 2.0 / math.sin(d.alpha + abs(d.theta_a))


def min_spacing_for_target(d_target: float, d: BesselDesign, n_elements: int) -> float:
    """Spacing needed for d_max >= d_target at a fixed element count.

    Caller should confirm the result stays below max_spacing.
    """
    _require_steerable(d)
    if n_elements < 2:
        raise ValueError("n_elements must be >= 2")
    return 2.0 * d_target * math.sin(d.alpha) / ((n_elements - 1) * math.cos(d.alpha + abs(d.theta_a)))


def _heal_report(cfg: UlaConfig, d: BesselDesign, thresh_p: float, thresh_m: float) -> SelfHealReport:
    xs = cfg.element_xs()
    sin_a = math.sin(d.alpha)
    pos = xs[xs > thresh_p]
    neg = xs[xs < thresh_m]
    x_p = float(pos.min()) if pos.size else None
    x_m = float(neg.max()) if neg.size else None
    d_p = abs(x_p) * math.cos(d.alpha - d.theta_a) / sin_a if x_p is not None else None
    d_m = abs(x_m) * math.cos(d.alpha + d.theta_a) / sin_a if x_m is not None else None
    return SelfHealReport(
        d_h_pos=d_p,
        d_h_neg=d_m,
        x_p_star=x_p,
        x_m_star=x_m,
        pos_unblocked=x_p is not None and x_p < 0,
        neg_unblocked=x_m is not None and x_m > 0,
    )


def self_heal_rect(cfg: UlaConfig, d: BesselDesign, obs: RectObstacle) -> SelfHealReport:
    """Self-healing onset distances behind a rectangular obstacle.

    An element's positive-side ray clears the obstacle iff
    x > x_r1 + tan(alpha - theta_a) y_f; the negative side iff
    x < x_r2 - tan(alpha + theta_a) y_f. The onset distance on each side is
    the axis distance where the first clearing element's ray lands:
    d_h = |x*| cos(alpha -/+ theta_a) / sin(alpha).
    """
    _require_steerable(d)
    thresh_p = obs.x_r1 + math.tan(d.alpha - d.theta_a) * obs.y_f
    thresh_m = obs.x_r2 - math.tan(d.alpha + d.theta_a) * obs.y_f
    return _heal_report(cfg, d, thresh_p, thresh_m)


def self_heal_circle(cfg: UlaConfig, d: BesselDesign, obs: CircleObstacle) -> SelfHealReport:
    """Self-healing onset distances behind a circular obstacle.

    Uses the tangent points of the element rays on the circle in place of
    the rectangle corners, per side.
    """
    _require_steerable(d)
    xc, yc, r = obs.center.x, obs.center.y, obs.radius
    x_c1 = xc + r * math.cos(d.alpha - d.theta_a)
    y_c1 = yc + r * math.sin(d.alpha - d.theta_a)
    x_c2 = xc - r * math.cos(d.alpha + d.theta_a)
    y_c2 = yc + r * math.sin(d.alpha + d.theta_a)
    thresh_p = x_c1 + math.tan(d.alpha - d.theta_a) * y_c1
    thresh_m = x_c2 - math.tan(d.alpha + d.theta_a) * y_c2
    return _heal_report(cfg, d, thresh_p, thresh_m)
