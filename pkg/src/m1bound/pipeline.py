"""End-to-end bound computation.

For fixed delta the LP maximizes the spectrum mass at t = 0 over the grid
subject to the constraint rows; delta is excluded once that optimum drops
below delta or the rows become infeasible. The bisection root gives a witness
(LP dual or Farkas ray), which is checked on the continuum; violating
frequencies are added as columns until the witness verifies. The reported
bound always comes from the verified witness.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from . import constraints, geometry, simplex
from ._backend import kernels
from .bessel import X_MAX
from .constraints import GridSpec, TermSet
from .witness import (AngleWeight, GraphWeight, WitnessCertificate, bound_from_witness,
                      quadratic_root, verify_nonneg)

log = logging.getLogger(__name__)

DEFAULT_BRACKET = (0.20, 0.35)
MAX_ROUNDS = 20
NEIGHBOR_OFFSET = 0.01
FARKAS_MARGIN = 1e-7
SHIFT_LIMIT = 1e-4


class LpFailure(RuntimeError):
    pass


class BracketError(ValueError):
    pass


@dataclass
class KappaSpectrum:
    t: np.ndarray
    values: np.ndarray
    delta: float = float("nan")

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.t.shape != self.values.shape:
            raise ValueError("t and kappa differ in length")

    @property
    def kappa0(self):
        i = np.flatnonzero(self.t == 0.0)
        return float(self.values[i[0]]) if i.size else 0.0

    def support(self):
        nz = self.values != 0.0
        return self.t[nz], self.values[nz]

    def check_normalized(self, tol=1e-9):
        if np.any(self.values < 0.0):
            raise ValueError("spectrum has negative entries")
        total = float(np.sum(self.values))
        if abs(total - 1.0) > tol:
            raise ValueError(f"spectrum sums to {total!r}, not 1")


@dataclass
class BoundReport:
    delta_upper: float
    quadratic_b: float
    quadratic_c: float
    lp_value_at_bound: float
    refinement_rounds: int
    verified: bool
    provenance: list
    delta_grid: float = float("nan")
    v0_shift: float = 0.0
    worst_value: float = float("nan")
    tail_threshold: float = float("nan")
    lipschitz_constant: float = float("nan")
    grid_size: int = 0
    violations: list = field(default_factory=list)
    guarantee: str = ""


@dataclass
class Bisection:
    delta_star: float
    solution: simplex.LpSolution
    lower: float
    lower_solution: simplex.LpSolution
    solves: int = 0


def rows_from_config(triangles=(), angles=(), edge_policy="complete"):
    rows = [constraints.row_cs(), constraints.row_c0()]
    rows += [constraints.triangle_row(tr, edge_policy) for tr in triangles]
    rows += [constraints.row_ct(th) for th in angles]
    return rows


class LpModel:
    """Rows sampled on one grid; only the right-hand side depends on delta."""

    def __init__(self, rows, grid):
        self.rows = list(rows)
        self.grid = grid
        t = grid.values()
        if t[0] != 0.0:
            raise ValueError("grid must start at t = 0")
        self.matrix = np.vstack([constraints.sample_row(r, grid) for r in self.rows])
        self.objective = np.zeros(len(t))
        self.objective[0] = 1.0

    def problem(self, delta):
        rhs = [r.rhs(delta) for r in self.rows]
        return simplex.LpProblem(self.matrix, [r.sense for r in self.rows], rhs, self.objective)

    def solve(self, delta):
        sol = simplex.solve(self.problem(delta))
        if sol.status == simplex.OPTIMAL:
            return sol.objective_value, sol
        if sol.status == simplex.INFEASIBLE:
            return -math.inf, sol
        raise LpFailure(f"LP at delta={delta} ended with status {sol.status}")


def lp_value(delta, rows, grid, model=None):
    """Optimal kappa(0) for the given delta; -inf when the rows are infeasible."""
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    if not any(r.kind == "CS" for r in rows):
        raise ValueError("rows must include CS")
    model = model or LpModel(rows, grid)
    return model.solve(delta)


def bisect_delta(rows, grid, bracket=DEFAULT_BRACKET, tol=1e-6, model=None):
    """Smallest excluded delta (LP optimum below delta, or infeasible), to ``tol``."""
    model = model or LpModel(rows, grid)
    lo, hi = bracket
    s_lo, sol_lo = model.solve(lo)
    s_hi, sol_hi = model.solve(hi)
    solves = 2
    if not (s_lo > lo and s_hi < hi):
        raise BracketError(f"bracket ({lo}, {hi}) does not enclose the root: "
                           f"s({lo}) = {s_lo}, s({hi}) = {s_hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        s_mid, sol_mid = model.solve(mid)
        solves += 1
        if s_mid > mid:
            lo, sol_lo = mid, sol_mid
        else:
            hi, sol_hi = mid, sol_mid
    return Bisection(hi, sol_hi, lo, sol_lo, solves)


def _quadratic_parts(y, rows):
    B = sum(yi * r.rhs_const for yi, r in zip(y, rows))
    C = sum(yi * r.rhs_delta_coeff for yi, r in zip(y, rows))
    return B, C


def _combine_with_ray(y_anchor, y_ray, rows):
    """Dual-feasible y = anchor + lam * ray whose bound sits just above the ray's root."""
    Ba, Ca = _quadratic_parts(y_anchor, rows)
    Bf, Cf = _quadratic_parts(y_ray, rows)
    if not Bf < 0.0:
        raise LpFailure("Farkas ray does not decrease the dual objective")
    x_ray = -Cf / Bf
    target = x_ray + FARKAS_MARGIN
    num = target * target - Ba * target - Ca
    lam = max(0.0, num / (Bf * target + Cf))
    return y_anchor + lam * y_ray


def witness_from_dual(solution, rows, anchor=None):
    """Map LP multipliers to witness weights (nonnegative graph and angle weights).

    For an infeasible LP the Farkas ray is combined with ``anchor`` (an optimal
    solution of the same rows on the same grid at a feasible delta).
    """
    if solution.status == simplex.OPTIMAL:
        y = np.asarray(solution.duals, dtype=np.float64)
    elif solution.status == simplex.INFEASIBLE:
        if anchor is None or anchor.status != simplex.OPTIMAL:
            raise ValueError("an infeasible LP needs an optimal anchor solution")
        y = _combine_with_ray(np.asarray(anchor.duals), np.asarray(solution.farkas), rows)
    else:
        raise ValueError(f"no witness from status {solution.status!r}")
    v0 = v1 = 0.0
    graphs, angles = [], []
    for yi, row in zip(y, rows):
        if row.kind == "CS":
            v0 += yi
        elif row.kind == "C0":
            v1 += yi
        elif row.kind == "C1R":
            w = _nonneg(yi, row)
            prov = row.provenance
            spec = geometry.TriangleSpec(**prov["triangle"]) if "triangle" in prov else None
            policy = prov.get("edge_policy", "complete")
            g = prov.get("graph") or geometry.build_triangle(spec, policy)
            graphs.append(GraphWeight(g, prov["alpha"], w, spec, policy))
        elif row.kind == "CT":
            # >= rows carry nonpositive multipliers in a maximization
            angles.append(AngleWeight(row.provenance["theta"], _nonneg(-yi, row)))
    return WitnessCertificate(float(v0), float(v1), tuple(graphs), tuple(angles))


def _nonneg(w, row):
    if w < -1e-9:
        raise ValueError(f"multiplier {w} for {row.kind} row {row.provenance} has the wrong sign")
    return max(float(w), 0.0)


def refine_until_verified(rows, grid=None, bracket=DEFAULT_BRACKET, tol=1e-6,
                          sample_step=1e-3, max_rounds=MAX_ROUNDS):
    """Bisect, extract the witness, verify on the continuum, add violating t; repeat.

    Returns (BoundReport, WitnessCertificate, KappaSpectrum).
    """
    grid = grid or GridSpec()
    lo_bracket = bracket[0]
    cert = result = bis = None
    for rnd in range(1, max_rounds + 1):
        model = LpModel(rows, grid)
        bis = bisect_delta(rows, grid, (lo_bracket, bracket[1]), tol, model)
        cert = witness_from_dual(bis.solution, rows, anchor=bis.lower_solution)
        result = verify_nonneg(cert, sample_step)
        log.info("round %d: grid %d, delta* %.9f, worst W %.3e at t=%.6f, %d violations",
                 rnd, len(grid), bis.delta_star, result.worst_value, result.worst_t,
                 len(result.violations))
        if result.verified or not result.violations:
            break
        new = []
        for t in result.violations:
            new += [t, t - NEIGHBOR_OFFSET, t + NEIGHBOR_OFFSET]
        grid = grid.with_points([t for t in new if t > 0.0])
        lo_bracket = bis.lower

    shift = 0.0
    if not result.verified:
        cert, result, shift = _shift_constant(cert, result, sample_step)

    delta, B, C = bound_from_witness(cert)
    lower_sol = bis.lower_solution
    spectrum = KappaSpectrum(grid.values(), lower_sol.primal, bis.lower)
    report = BoundReport(
        delta_upper=delta,
        quadratic_b=B,
        quadratic_c=C,
        lp_value_at_bound=lower_sol.objective_value,
        refinement_rounds=rnd,
        verified=bool(result.verified),
        provenance=[_provenance(r) for r in rows],
        delta_grid=bis.delta_star,
        v0_shift=shift,
        worst_value=result.worst_value,
        tail_threshold=result.tail_threshold,
        lipschitz_constant=result.lipschitz_constant,
        grid_size=len(grid),
        violations=list(result.violations),
        guarantee=result.guarantee,
    )
    return report, cert, spectrum


def _shift_constant(cert, result, sample_step):
    """Raise v0 to absorb a small deficit in W(0) or min W, then re-verify.

    Adding s to v0 adds s to W everywhere, so the shifted certificate is
    checked from scratch; the bound it yields moves up by O(s).
    """
    deficit = max(1.0 - result.w0, -result.worst_value, 0.0)
    if deficit > SHIFT_LIMIT:
        return cert, result, 0.0
    extra = 1e-9
    for _ in range(6):
        trial = cert.with_v0(cert.v0 + deficit + extra)
        r = verify_nonneg(trial, sample_step)
        log.info("v0 shift %.3e: verified=%s", deficit + extra, r.verified)
        if r.verified:
            return trial, r, deficit + extra
        extra *= 10.0
    return cert, result, 0.0


def _provenance(row):
    return {k: v for k, v in row.provenance.items() if k != "graph"}


def autocorrelation(spectrum, r):
    """Normalized radial autocorrelation sum_i kappa_i J0(t_i r)."""
    t, k = spectrum.support()
    arr = np.asarray(r, dtype=np.float64)
    if np.any(arr < 0.0):
        raise ValueError("r must be nonnegative")
    ts = TermSet(0.0, tuple(zip(t.tolist(), k.tolist())))
    out = ts.evaluate(arr)
    return out


def _ct_table(thetas):
    """Distances (n, 28) and weights (28,) of the CT coefficient for many angles."""
    thetas = np.asarray(thetas, dtype=np.float64)
    c, s = np.cos(thetas), np.sin(thetas)
    h = math.sqrt(3.0) / 2.0
    zero = np.zeros_like(c)
    V = np.stack([
        np.stack([zero, zero], -1),
        np.stack([zero + h, zero + 0.5], -1),
        np.stack([zero + h, zero - 0.5], -1),
        np.stack([zero + 2 * h, zero], -1),
        np.stack([c, s], -1),
        np.stack([h + c, 0.5 + s], -1),
        np.stack([h + c, -0.5 + s], -1),
        np.stack([2 * h + c, s], -1),
    ], axis=1)
    g1 = [0, 1, 2, 3, 4, 5, 6]
    g2 = [1, 2, 3, 5, 6, 7]     # V1 is the origin: constant -1
    pairs = [(i, j) for a, i in enumerate(g1) for j in g1[a + 1:]]
    d_pairs = np.stack([np.hypot(*(V[:, i] - V[:, j]).T) for i, j in pairs], axis=1)
    d_norms = np.stack([np.hypot(*V[:, i].T) for i in g2], axis=1)
    dists = np.concatenate([d_pairs, d_norms], axis=1)
    weights = np.concatenate([np.ones(len(pairs)), -np.ones(len(g2))])
    return dists, weights, -1.0


def ct_values(spectrum, thetas):
    """CT row value under the spectrum for each angle."""
    t, k = spectrum.support()
    dists, weights, const = _ct_table(thetas)
    arg = dists[:, :, None] * t[None, None, :]
    if arg.size and arg.max() > X_MAX:
        raise ValueError("spectrum support too wide for the J0 range")
    vals = kernels.j0(arg.ravel()).reshape(arg.shape)
    return const * k.sum() + np.einsum("nkt,k,t->n", vals, weights, k)


def _triangle_value(spectrum, spec, edge_policy):
    row = constraints.triangle_row(spec, edge_policy)
    t, k = spectrum.support()
    return float(np.dot(row.termset.evaluate(t), k)), row.rhs()


def find_violated_configs(spectrum, theta_range=(0.0, 2.0 * math.pi), triangle_ranges=None,
                          theta_step=1e-3, triangle_points=8, edge_policy="complete",
                          tol=1e-6, delta=None):
    """Local search for CT angles and C1R triangles the spectrum violates.

    delta defaults to the spectrum's own delta, else its mass at t = 0.
    Returns [(config dict, violation)] sorted by decreasing violation.
    """
    import warnings
    from scipy.optimize import minimize

    if delta is None:
        delta = spectrum.delta if math.isfinite(spectrum.delta) else spectrum.kappa0
    found = []
    lo, hi = theta_range
    thetas = np.arange(lo, hi, theta_step)
    if thetas.size and delta > 0.0:
        rhs = 5.0 - 1.0 / delta
        viol = rhs - ct_values(spectrum, thetas)
        for i in np.flatnonzero(viol > tol):
            # keep local maxima of the violation only
            left = viol[i - 1] if i > 0 else -math.inf
            right = viol[i + 1] if i + 1 < viol.size else -math.inf
            if viol[i] >= left and viol[i] >= right:
                found.append(({"kind": "CT", "theta": float(thetas[i])}, float(viol[i])))

    if triangle_ranges:
        def violation(p):
            spec = geometry.TriangleSpec(*map(float, p))
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    if spec.min_separation() < geometry.MIN_SEPARATION:
                        return -math.inf
                    value, alpha = _triangle_value(spectrum, spec, edge_policy)
            except ValueError:
                return -math.inf
            return value - alpha

        axes = [np.linspace(a, b, triangle_points) for a, b in triangle_ranges]
        starts = []
        for p in np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 3):
            v = violation(p)
            if math.isfinite(v):
                starts.append((v, p))
        starts.sort(key=lambda s: -s[0])
        seen = []
        for v0, p0 in starts[:10]:
            res = minimize(lambda p: -violation(p) if math.isfinite(violation(p)) else 1e9,
                           p0, method="Nelder-Mead", options={"xatol": 1e-7, "fatol": 1e-10})
            v = -res.fun
            if v > tol and all(np.linalg.norm(res.x - q) > 1e-4 for q in seen):
                seen.append(res.x)
                x1, x2, y = map(float, res.x)
                found.append(({"kind": "C1R", "triangle": {"x1": x1, "x2": x2, "y": abs(y)},
                               "edge_policy": edge_policy}, float(v)))
    found.sort(key=lambda item: -item[1])
    return found
