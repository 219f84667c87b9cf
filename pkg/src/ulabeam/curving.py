"""Curving-beam synthesis around one rectangular obstacle.

A parabolic trajectory x = f_t(y) = beta (y - p)^2 + q is anchored at the
user and launched from the array as the envelope of element rays, each ray
tangent to the parabola. Trajectory parameters are chosen by a small linear
program over (beta, p_tilde, x_adj) where p_tilde = beta * p and x_adj is a
relaxed aperture cut; the LP trades obstacle clearance against the number of
elements kept. The solver enumerates closed-form candidate vertices, filters
them by primal feasibility and a nonnegative-multiplier certificate, and
falls back to full vertex enumeration when no tabulated candidate applies.
The certificate makes an accepted candidate a proven global optimum.

Positive curvature clears the obstacle on its left edge using a prefix of
the array; negative curvature is solved by mirroring the scenario about the
y-axis and mapping the result back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import nnls

from .array_geometry import Point2, RectObstacle, UlaConfig
from .field import Excitation

__all__ = [
    "ParabolicTrajectory",
    "AvoidanceScenario",
    "KktCandidate",
    "CurvingSolution",
    "CurvingResult",
    "AvoidancePlan",
    "trajectory_eval",
    "tangent_y",
    "curving_phases",
    "f_para",
    "kkt_candidates",
    "optimize_positive",
    "optimize_negative",
    "plan_with_fallback",
    "plan_excitation",
]

_FEAS_TOL = 1e-9
_ACTIVE_TOL = 1e-7
_BETA_TOL = 1e-10


@dataclass(frozen=True)
class ParabolicTrajectory:
    """x = beta (y - p)^2 + q in the xy-plane."""

    beta: float
    p: float
    q: float

    def __post_init__(self) -> None:
        for v in (self.beta, self.p, self.q):
            if not math.isfinite(v):
                raise ValueError("trajectory parameters must be finite")


@dataclass(frozen=True)
class AvoidanceScenario:
    """Problem data: user position, obstacle footprint, array, weight.

    The obstacle must lie strictly between the array plane and the user
    (0 < y_n < y_f < user.y); the weight trades clearance against kept
    aperture, larger keeping more elements.
    """

    user: Point2
    obstacle: RectObstacle
    cfg: UlaConfig
    weight_w: float = 1.0

    def __post_init__(self) -> None:
        if not self.user.y > 0:
            raise ValueError("user must lie in front of the array")
        if not self.obstacle.y_f < self.user.y:
            raise ValueError("obstacle must lie strictly between array and user")
        if not self.weight_w > 0:
            raise ValueError("weight_w must be positive")


@dataclass(frozen=True)
class KktCandidate:
    index: int
    beta: float
    p_tilde: float
    x_adj: float
    valid: bool


@dataclass(frozen=True)
class CurvingSolution:
    trajectory: ParabolicTrajectory
    p_tilde: float
    x_adj_star: float
    x_t_star: float
    curvature_sign: int
    objective_value: float
    active_elements: np.ndarray
    kkt_candidate_index: int | None
    relaxed_objective: float


@dataclass(frozen=True)
class CurvingResult:
    """Solver outcome: status is one of solved, unnecessary, infeasible, degenerate.

    relaxed_vertex is the optimal (beta, p_tilde, x_adj) of the continuous
    problem, before the aperture cut is snapped to an element; it is kept
    even when the outcome is unnecessary or degenerate so callers can see
    what classified it.
    """

    status: str
    solution: CurvingSolution | None
    message: str
    most_violated: str | None = None
    relaxed_vertex: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class AvoidancePlan:
    status: str
    primary: CurvingResult
    secondary: CurvingResult | None
    message: str


def trajectory_eval(t: ParabolicTrajectory, y):
    """Trajectory x-coordinate at height y."""
    yv = np.asarray(y, dtype=float)
    out = t.beta * (yv - t.p) ** 2 + t.q
    return float(out) if np.isscalar(y) or yv.ndim == 0 else out


def _tangent_radicand(t: ParabolicTrajectory, xv: np.ndarray) -> np.ndarray:
    """Squared tangent height, with tiny negative float residue clamped.

    An optimal aperture cut often makes the edge element tangent exactly at
    the array plane (height 0), so roundoff can push the radicand a hair
    below zero; genuine violations stay negative.
    """
    rad = (t.beta * t.p**2 + t.q - xv) / t.beta
    atol = 1e-7 * max(1.0, float(np.abs(rad).max(initial=0.0)))
    return np.where((rad < 0) & (rad >= -atol), 0.0, rad)


def tangent_y(t: ParabolicTrajectory, x_t):
    """Height of the tangent point on the trajectory for an element at x_t.

    For beta > 0 this is non-increasing in x_t. Raises when the element has
    no tangent (negative radicand).
    """
    if t.beta == 0:
        raise ValueError("tangent undefined for beta = 0")
    xv = np.asarray(x_t, dtype=float)
    rad = _tangent_radicand(t, xv)
    if np.any(rad < 0):
        raise ValueError("element has no tangent to trajectory")
    out = np.sqrt(rad)
    return float(out) if np.isscalar(x_t) or xv.ndim == 0 else out


def curving_phases(cfg: UlaConfig, t: ParabolicTrajectory, active=None) -> Excitation:
    """Unit-magnitude excitation launching the curving beam along t.

    The phase of the element at x equals k (ell - sigma) up to a constant,
    where ell is the element-to-tangent-point distance and sigma the arc
    length along the parabola to that tangent point; adjacent-element phase
    slope is then -k sin(theta_ray) with theta_ray the tangent angle, which
    co-phases the aperture along each ray. Closed form:

        phi = k { (p + s) sqrt(c1) / 2 - log(sqrt(c1) - c2) / (4 |beta|) }

    with s the tangent height, c1 = 4 beta^2 (p - s)^2 + 1 and
    c2 = 2 |beta| (p - s). Natural logarithm.
    """
    if t.beta == 0:
        raise ValueError("curving phases undefined for beta = 0")
    xs = cfg.element_xs()
    n = xs.shape[0]
    if active is None:
        mask = np.ones(n, dtype=bool)
    else:
        arr = np.asarray(active)
        if arr.dtype == bool:
            if arr.shape != (n,):
                raise ValueError("boolean active mask must have one entry per element")
            mask = arr.copy()
        else:
            mask = np.zeros(n, dtype=bool)
            mask[arr.astype(int)] = True
    k = cfg.wavenumber()
    phases = np.zeros(n)
    xa = xs[mask]
    rad = _tangent_radicand(t, xa)
    bad = np.nonzero(rad < 0)[0]
    if bad.size:
        element = int(np.nonzero(mask)[0][bad[0]])
        raise ValueError(f"element {element} has no tangent to the trajectory")
    s = np.sqrt(rad)
    c1 = 4.0 * t.beta**2 * (t.p - s) ** 2 + 1.0
    c2 = 2.0 * abs(t.beta) * (t.p - s)
    arg = np.sqrt(c1) - c2
    bad = np.nonzero(arg <= 0)[0]
    if bad.size:
        raise ValueError(
            f"phase formula log-domain violation at active element {int(bad[0])}"
        )
    phases[mask] = k * ((t.p + s) * np.sqrt(c1) / 2.0 - np.log(arg) / (4.0 * abs(t.beta)))
    mags = np.where(mask, 1.0, 0.0)
    return Excitation(mags, phases, mask)


def f_para(s: AvoidanceScenario, beta: float, p_tilde: float, x_adj: float) -> float:
    """Clearance/aperture objective; minimized for positive curvature."""
    y_n, y_f, y_u = s.obstacle.y_n, s.obstacle.y_f, s.user.y
    return (
        beta * (y_n**2 + y_f**2 - 2.0 * y_u**2)
        + 2.0 * p_tilde * (2.0 * y_u - y_n - y_f)
        - s.weight_w * x_adj
    )


def _objective_grad(s: AvoidanceScenario) -> np.ndarray:
    y_n, y_f, y_u = s.obstacle.y_n, s.obstacle.y_f, s.user.y
    return np.array(
        [y_n**2 + y_f**2 - 2.0 * y_u**2, 2.0 * (2.0 * y_u - y_n - y_f), -s.weight_w]
    )


def _constraints(s: AvoidanceScenario) -> list[tuple[str, np.ndarray, float]]:
    """Constraints of the positive-curvature LP as (name, grad, const).

    Each constraint reads grad . (beta, p_tilde, x_adj) + const <= 0.
    """
    y_n, y_f, y_u = s.obstacle.y_n, s.obstacle.y_f, s.user.y
    x_u = s.user.x
    x_r2 = s.obstacle.x_r2
    r_half = s.cfg.half_aperture()
    a_n, d_n = y_n**2 - y_u**2, y_n - y_u
    a_f, d_f = y_f**2 - y_u**2, y_f - y_u
    return [
        ("beta non-negativity", np.array([-1.0, 0.0, 0.0]), 0.0),
        ("aperture lower bound", np.array([0.0, 0.0, -1.0]), -r_half),
        ("aperture upper bound", np.array([0.0, 0.0, 1.0]), -r_half),
        ("near-corner clearance", np.array([a_n, -2.0 * d_n, 0.0]), x_u - x_r2),
        ("far-corner clearance", np.array([a_f, -2.0 * d_f, 0.0]), x_u - x_r2),
        ("tangent reaches user", np.array([-2.0 * y_u**2, 2.0 * y_u, -1.0]), x_u),
        ("leftmost tangent spans user", np.array([2.0 * y_u**2, -2.0 * y_u, 0.0]), -x_u - r_half),
        ("tangent exists at aperture cut", np.array([y_u**2, -2.0 * y_u, 1.0]), -x_u),
    ]


def _scales(cons) -> np.ndarray:
    return np.array([max(1.0, np.abs(g).max(), abs(c)) for _, g, c in cons])


def _violations(z: np.ndarray, cons, scales) -> np.ndarray:
    return np.array([(g @ z + c) for _, g, c in cons]) / scales


def kkt_candidates(s: AvoidanceScenario) -> list[KktCandidate]:
    """The nine closed-form candidate vertices of the positive-curvature LP.

    Rows 1..3 carry a computed aperture cut; rows 4..9 pin x_adj = R.
    Candidates with non-finite entries are flagged invalid but returned.
    """
    y_n, y_f, y_u = s.obstacle.y_n, s.obstacle.y_f, s.user.y
    x_u, x_r2 = s.user.x, s.obstacle.x_r2
    r_half = s.cfg.half_aperture()

    def pair_rows(y_e: float) -> list[tuple[float, float, float]]:
        # Rows parameterized by one obstacle corner height y_e (y_f or y_n):
        # edge-tangent family (computed x_adj), full-span family (x_adj = R)
        # sharing the same (beta, p_tilde), and two more x_adj = R rows.
        d_e = y_e - y_u
        b2 = -(r_half * y_e - r_half * y_u + x_u * y_e - x_r2 * y_u) / (y_u * d_e**2)
        p2 = -(
            r_half * y_e**2 - r_half * y_u**2 + x_u * y_e**2 - 2.0 * x_r2 * y_u**2 + x_u * y_u**2
        ) / (2.0 * y_u * d_e**2)
        x2 = -(r_half * y_e**2 - x_r2 * y_u**2 - r_half * y_e * y_u + x_u * y_e * y_u) / d_e**2
        b4 = (r_half * y_e - r_half * y_u - x_u * y_e + x_r2 * y_u) / (y_e * y_u * d_e)
        p4 = (r_half * y_e**2 - r_half * y_u**2 - x_u * y_e**2 + x_r2 * y_u**2) / (
            2.0 * y_e * y_u * d_e
        )
        b8 = (r_half * y_e - r_half * y_u - x_u * y_e + x_r2 * y_u) / (y_u * d_e**2)
        p8 = -(
            r_half * y_u**2 - r_half * y_e**2 + x_u * y_e**2 - 2.0 * x_r2 * y_u**2 + x_u * y_u**2
        ) / (2.0 * y_u * d_e**2)
        return [(b2, p2, x2), (b4, p4, r_half), (b2, p2, r_half), (b8, p8, r_half)]

    d_f, d_n = y_f - y_u, y_n - y_u
    b1 = -(x_r2 - x_u) / (d_f * d_n)
    p1 = -(x_r2 * y_f - x_u * y_f + x_r2 * y_n - x_u * y_n) / (2.0 * d_f * d_n)
    x1 = (x_r2 * y_u**2 + x_u * y_f * y_n - x_r2 * y_f * y_u - x_r2 * y_n * y_u) / (d_f * d_n)

    far_rows = pair_rows(y_f)
    near_rows = pair_rows(y_n)
    ordered = [
        (b1, p1, x1),
        far_rows[0],
        near_rows[0],
        far_rows[1],
        near_rows[1],
        far_rows[2],
        near_rows[2],
        far_rows[3],
        near_rows[3],
    ]
    out = []
    for i, (b, pt, xa) in enumerate(ordered, start=1):
        valid = all(math.isfinite(v) for v in (b, pt, xa))
        out.append(KktCandidate(i, b, pt, xa, valid))
    return out


def _dual_certificate(z: np.ndarray, cons, scales, grad_f: np.ndarray) -> bool:
    """Nonnegative-multiplier stationarity certificate at z (KKT check)."""
    viol = _violations(z, cons, scales)
    active = np.nonzero(np.abs(viol) <= _ACTIVE_TOL)[0]
    if active.size == 0:
        return bool(np.linalg.norm(grad_f) <= 1e-9)
    mat = np.stack([cons[i][1] for i in active], axis=1)
    _, resid = nnls(mat, -grad_f)
    return resid <= 1e-6 * max(1.0, float(np.linalg.norm(grad_f)))


def _enumerate_vertices(cons, scales):
    """All nondegenerate intersections of constraint triples with feasibility data."""
    out = []
    for combo in combinations(range(len(cons)), 3):
        g = np.stack([cons[i][1] for i in combo])
        c = np.array([cons[i][2] for i in combo])
        if abs(np.linalg.det(g)) < 1e-12:
            continue
        z = np.linalg.solve(g, -c)
        viol = _violations(z, cons, scales)
        out.append((z, float(viol.max()), combo))
    return out


def _project_prefix(xs: np.ndarray, x_adj: float, spacing: float) -> float:
    """Largest element position not exceeding x_adj (prefix-keeping cut)."""
    cands = xs[xs <= x_adj + spacing * 1e-9]
    if cands.size == 0:
        return float(xs[0])
    return float(cands.max())


def _resolve_pinned(s: AvoidanceScenario, x_pin: float, z_rel: np.ndarray) -> tuple[float, float]:
    """Re-optimize (beta, p_tilde) with the aperture cut pinned at x_pin.

    Exact 2-variable vertex enumeration. The pinned problem is always
    feasible when the relaxed one is (witness: keep beta, lower the
    leftmost-tangent intercept to min of its relaxed value and x_pin), so
    the witness only backs up degenerate enumeration corner cases.
    """
    cons3 = _constraints(s)
    cons2 = []
    for name, g, c in cons3:
        if name in ("aperture lower bound", "aperture upper bound"):
            continue
        cons2.append((name, g[:2].copy(), c + g[2] * x_pin))
    scales2 = _scales(cons2)
    grad2 = _objective_grad(s)[:2]
    best = None
    for i, j in combinations(range(len(cons2)), 2):
        g = np.stack([cons2[i][1], cons2[j][1]])
        c = np.array([cons2[i][2], cons2[j][2]])
        if abs(np.linalg.det(g)) < 1e-14:
            continue
        z2 = np.linalg.solve(g, -c)
        viol = np.array([(gg @ z2 + cc) for _, gg, cc in cons2]) / scales2
        if viol.max() <= _FEAS_TOL:
            f2 = float(grad2 @ z2)
            if best is None or f2 < best[0] - 1e-12 * max(1.0, abs(f2)):
                best = (f2, z2)
    if best is not None:
        return float(best[1][0]), float(best[1][1])
    y_u, x_u = s.user.y, s.user.x
    beta = float(z_rel[0])
    l_rel = -2.0 * beta * y_u**2 + 2.0 * z_rel[1] * y_u + x_u
    l_w = min(l_rel, x_pin)
    return beta, float((l_w - x_u + 2.0 * beta * y_u**2) / (2.0 * y_u))


def _build_solution(
    s: AvoidanceScenario,
    z_rel: np.ndarray,
    index: int | None,
) -> CurvingResult:
    xs = s.cfg.element_xs()
    x_adj_star = float(z_rel[2])
    x_t_star = _project_prefix(xs, x_adj_star, s.cfg.spacing)
    beta, p_tilde = _resolve_pinned(s, x_t_star, z_rel)
    vertex = (float(z_rel[0]), float(z_rel[1]), float(z_rel[2]))
    if beta <= _BETA_TOL:
        return CurvingResult(
            "unnecessary",
            None,
            "optimal curvature is zero after aperture projection; a straight beam suffices",
            relaxed_vertex=vertex,
        )
    p = p_tilde / beta
    q = s.user.x - beta * (s.user.y - p) ** 2
    active = xs <= x_t_star + s.cfg.spacing * 1e-9
    sol = CurvingSolution(
        trajectory=ParabolicTrajectory(beta, p, q),
        p_tilde=p_tilde,
        x_adj_star=x_adj_star,
        x_t_star=x_t_star,
        curvature_sign=1,
        objective_value=f_para(s, beta, p_tilde, x_t_star),
        active_elements=active,
        kkt_candidate_index=index,
        relaxed_objective=float(_objective_grad(s) @ z_rel),
    )
    return CurvingResult(
        "solved", sol, "positive-curvature trajectory found", relaxed_vertex=vertex
    )


def optimize_positive(s: AvoidanceScenario) -> CurvingResult:
    """Solve the positive-curvature avoidance LP and build the trajectory.

    Candidate vertices are filtered by primal feasibility (normalized slack
    >= -1e-9) and a nonnegative-multiplier certificate; an accepted
    candidate is a certified global optimum. If none applies, all
    constraint-triple vertices are enumerated. The relaxed aperture cut is
    then projected onto the element grid and the two remaining parameters
    re-optimized with the cut pinned.
    """
    cons = _constraints(s)
    scales = _scales(cons)
    grad_f = _objective_grad(s)

    best: tuple[float, np.ndarray, int] | None = None
    for cand in kkt_candidates(s):
        if not cand.valid:
            continue
        z = np.array([cand.beta, cand.p_tilde, cand.x_adj])
        if _violations(z, cons, scales).max() > _FEAS_TOL:
            continue
        if not _dual_certificate(z, cons, scales, grad_f):
            continue
        fz = float(grad_f @ z)
        if best is None or fz < best[0] - 1e-12 * max(1.0, abs(fz)):
            best = (fz, z, cand.index)

    if best is not None:
        fz, z_star, index = best
    else:
        vertices = _enumerate_vertices(cons, scales)
        feas = [(float(grad_f @ z), z) for z, maxv, _ in vertices if maxv <= _FEAS_TOL]
        if not feas:
            if vertices:
                z_near, maxv, _ = min(vertices, key=lambda v: v[1])
                viol = _violations(z_near, cons, scales)
                worst = cons[int(np.argmax(viol))][0]
            else:
                worst = "near-corner clearance"
            return CurvingResult(
                "infeasible",
                None,
                "no trajectory with this curvature sign clears the obstacle",
                most_violated=worst,
            )
        fz, z_star = min(feas, key=lambda t: t[0])
        index = None

    r_half = s.cfg.half_aperture()
    vertex = (float(z_star[0]), float(z_star[1]), float(z_star[2]))
    if z_star[0] <= _BETA_TOL:
        return CurvingResult(
            "unnecessary",
            None,
            "optimal curvature is zero; a straight beam already clears the obstacle",
            relaxed_vertex=vertex,
        )
    if z_star[2] <= -r_half + 1e-9 * max(1.0, r_half):
        return CurvingResult(
            "degenerate",
            None,
            "optimum collapses the aperture to a single edge element; increase weight_w",
            relaxed_vertex=vertex,
        )
    return _build_solution(s, z_star, index)


def _mirror_scenario(s: AvoidanceScenario) -> AvoidanceScenario:
    return AvoidanceScenario(
        user=Point2(-s.user.x, s.user.y),
        obstacle=RectObstacle(
            x_r1=-s.obstacle.x_r2,
            x_r2=-s.obstacle.x_r1,
            y_n=s.obstacle.y_n,
            y_f=s.obstacle.y_f,
        ),
        cfg=s.cfg,
        weight_w=s.weight_w,
    )


_MIRROR_NAMES = {
    "aperture lower bound": "aperture upper bound",
    "aperture upper bound": "aperture lower bound",
}


def _mirror_result(s: AvoidanceScenario, res: CurvingResult) -> CurvingResult:
    vertex = res.relaxed_vertex
    if vertex is not None:
        vertex = (-vertex[0], -vertex[1], -vertex[2])
    if res.solution is None:
        return CurvingResult(
            res.status,
            None,
            res.message.replace("positive-curvature", "negative-curvature"),
            most_violated=_MIRROR_NAMES.get(res.most_violated, res.most_violated)
            if res.most_violated
            else None,
            relaxed_vertex=vertex,
        )
    m = res.solution
    xs = s.cfg.element_xs()
    beta = -m.trajectory.beta
    p = m.trajectory.p
    p_tilde = -m.p_tilde
    x_t_star = -m.x_t_star
    q = s.user.x - beta * (s.user.y - p) ** 2
    active = xs >= x_t_star - s.cfg.spacing * 1e-9
    sol = CurvingSolution(
        trajectory=ParabolicTrajectory(beta, p, q),
        p_tilde=p_tilde,
        x_adj_star=-m.x_adj_star,
        x_t_star=x_t_star,
        curvature_sign=-1,
        objective_value=f_para(s, beta, p_tilde, x_t_star),
        active_elements=active,
        kkt_candidate_index=m.kkt_candidate_index,
        relaxed_objective=-m.relaxed_objective,
    )
    return CurvingResult(
        "solved", sol, "negative-curvature trajectory found", relaxed_vertex=vertex
    )


def optimize_negative(s: AvoidanceScenario) -> CurvingResult:
    """Solve the negative-curvature problem by mirror reduction.

    The scenario is reflected about the y-axis, solved with the positive
    machinery, and mapped back (beta, p_tilde, aperture cut and element set
    all change sign/side; the reported candidate index refers to the
    mirrored problem's table). The aperture cut keeps a suffix of the array.
    """
    return _mirror_result(s, optimize_positive(_mirror_scenario(s)))


def _repin_negative(s: AvoidanceScenario, res: CurvingResult, x_pin: float) -> CurvingResult:
    """Rebuild a solved negative result with its aperture cut moved to x_pin."""
    m = _mirror_scenario(s)
    sol = res.solution
    z_rel = np.array([-sol.trajectory.beta, -sol.p_tilde, -sol.x_adj_star])
    beta_m, p_tilde_m = _resolve_pinned(m, -x_pin, z_rel)
    if beta_m <= _BETA_TOL:
        return CurvingResult("unnecessary", None, "secondary curvature collapsed to zero")
    xs = s.cfg.element_xs()
    beta = -beta_m
    p_tilde = -p_tilde_m
    p = p_tilde / beta
    q = s.user.x - beta * (s.user.y - p) ** 2
    active = xs >= x_pin - s.cfg.spacing * 1e-9
    sol2 = CurvingSolution(
        trajectory=ParabolicTrajectory(beta, p, q),
        p_tilde=p_tilde,
        x_adj_star=sol.x_adj_star,
        x_t_star=x_pin,
        curvature_sign=-1,
        objective_value=f_para(s, beta, p_tilde, x_pin),
        active_elements=active,
        kkt_candidate_index=sol.kkt_candidate_index,
        relaxed_objective=sol.relaxed_objective,
    )
    return CurvingResult("solved", sol2, "negative-curvature trajectory found")


def plan_with_fallback(s: AvoidanceScenario) -> AvoidancePlan:
    """Primary trajectory plus an optional reverse-curvature secondary.

    Positive curvature is attempted first. When the primary keeps only part
    of the array, the remaining elements get a reverse-curvature trajectory
    through the same user, with its aperture cut clamped so the two element
    sets stay disjoint. Both signs failing yields a combined infeasibility.
    """
    pos = optimize_positive(s)
    if pos.status == "unnecessary":
        return AvoidancePlan("unnecessary", pos, None, pos.message)
    if pos.status == "solved":
        xs = s.cfg.element_xs()
        remaining = xs[xs > pos.solution.x_t_star + s.cfg.spacing * 1e-9]
        if remaining.size == 0:
            return AvoidancePlan("solved", pos, None, "primary uses the full array")
        neg = optimize_negative(s)
        if neg.status != "solved":
            return AvoidancePlan(
                "solved", pos, None, "no reverse-curvature secondary for the remaining elements"
            )
        x_t_sec = max(neg.solution.x_t_star, float(remaining.min()))
        if x_t_sec != neg.solution.x_t_star:
            neg = _repin_negative(s, neg, x_t_sec)
            if neg.status != "solved":
                return AvoidancePlan(
                    "solved", pos, None, "reverse-curvature secondary collapsed; primary only"
                )
        return AvoidancePlan("solved", pos, neg, "primary plus reverse-curvature secondary")

    neg = optimize_negative(s)
    if neg.status == "solved" or neg.status == "unnecessary":
        status = neg.status
        return AvoidancePlan(
            status,
            neg,
            None,
            "positive curvature failed; negative curvature used"
            if status == "solved"
            else neg.message,
        )
    return AvoidancePlan(
        "infeasible",
        pos,
        neg,
        f"both curvature signs failed (positive: {pos.status}, negative: {neg.status})",
    )


def plan_excitation(cfg: UlaConfig, plan: AvoidancePlan, power_budget: float) -> Excitation:
    """Combined excitation for a solved plan, split equally across beams.

    Each solved beam is normalized to an equal share of the budget so the
    total power matches a single-beam budget.
    """
    if plan.status != "solved":
        raise ValueError(f"plan is not solved: {plan.status}")
    sols = [plan.primary.solution]
    if plan.secondary is not None and plan.secondary.status == "solved":
        sols.append(plan.secondary.solution)
    n = cfg.n_elements
    mags = np.zeros(n)
    phases = np.zeros(n)
    active = np.zeros(n, dtype=bool)
    share = power_budget / len(sols)
    for sol in sols:
        exc = curving_phases(cfg, sol.trajectory, sol.active_elements)
        mask = sol.active_elements
        scale = math.sqrt(share / int(mask.sum()))
        mags[mask] = scale
        phases[mask] = exc.phases[mask]
        active |= mask
    return Excitation(mags, phases, active)
