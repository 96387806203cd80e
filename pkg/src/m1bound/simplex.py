"""Two-phase revised simplex for LPs with few rows and many columns.

Maximizes ``c @ x`` subject to per-row senses and ``x >= 0``. The basis inverse
is kept explicitly (rows <= 64) with product-form updates and a fresh
inversion every ``REFACTOR_EVERY`` pivots. Dantzig pricing with lowest-index
tie-breaking; Bland's rule takes over after long degenerate stalls or when the
iteration limit is hit once.
"""
from dataclasses import dataclass, field

import numpy as np

MAX_ROWS = 64
PIVOT_TOL = 1e-10
OPT_TOL = 1e-11
FEAS_TOL = 1e-9
REFACTOR_EVERY = 50
DEGENERATE_STALL = 50

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"


@dataclass
class LpProblem:
    A: np.ndarray
    senses: tuple
    rhs: np.ndarray
    objective: np.ndarray

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        self.rhs = np.asarray(self.rhs, dtype=np.float64).ravel()
        self.objective = np.asarray(self.objective, dtype=np.float64).ravel()
        self.senses = tuple(self.senses)
        m, n = self.A.shape
        if len(self.senses) != m or self.rhs.shape[0] != m or self.objective.shape[0] != n:
            raise ValueError(f"inconsistent LP dimensions: A {self.A.shape}, "
                             f"{len(self.senses)} senses, {self.rhs.shape[0]} rhs, "
                             f"{self.objective.shape[0]} costs")
        bad = set(self.senses) - {"<=", "=", ">="}
        if bad:
            raise ValueError(f"unknown senses {bad}")
        if not np.all(np.isfinite(self.rhs)):
            raise ValueError("rhs must be finite")

    @property
    def shape(self):
        return self.A.shape


@dataclass
class LpSolution:
    status: str
    objective_value: float
    primal: np.ndarray
    duals: np.ndarray
    basis: tuple
    iterations: int = 0
    # infeasible only: y with y @ A >= 0 (sense-feasible signs) and y @ b < 0
    farkas: np.ndarray = None

    @property
    def support(self):
        return np.flatnonzero(self.primal > 0.0)


@dataclass
class CertificateReport:
    primal_residual: float
    dual_residual: float
    duality_gap: float
    complementarity: float
    primal_threshold: float
    dual_threshold: float = FEAS_TOL
    slack_threshold: float = 0.0
    messages: list = field(default_factory=list)

    @property
    def ok(self):
        return (self.primal_residual <= self.primal_threshold
                and self.dual_residual <= self.dual_threshold
                and max(self.duality_gap, self.complementarity) <= self.slack_threshold)


class _Tableau:
    """Basis bookkeeping for one standard-form problem M x = b, x >= 0."""

    def __init__(self, M, b, basis):
        self.M = M
        self.b = b
        self.basis = list(basis)
        self.pivots = 0
        self.refactor()

    def refactor(self):
        B = self.M[:, self.basis]
        self.Binv = np.linalg.inv(B)
        self.xB = self.Binv @ self.b

    def duals(self, cost):
        return cost[self.basis] @ self.Binv

    def pivot(self, r, j, u):
        piv = u[r]
        row = self.Binv[r] / piv
        self.Binv -= np.outer(u, row)
        self.Binv[r] = row
        theta = self.xB[r] / piv
        self.xB -= theta * u
        self.xB[r] = theta
        self.basis[r] = j
        self.pivots += 1
        if self.pivots % REFACTOR_EVERY == 0:
            self.refactor()


def _ratio_test(tab, u):
    rows = np.flatnonzero(u > PIVOT_TOL)
    if rows.size == 0:
        return None, 0.0
    ratios = np.maximum(tab.xB[rows], 0.0) / u[rows]
    best = ratios.min()
    ties = rows[ratios <= best + 1e-12 * (1.0 + best)]
    # lowest basic column index among ties (Bland-compatible)
    r = min(ties, key=lambda i: tab.basis[i])
    return r, best


def _run(tab, cost, allowed, limit):
    """Iterate to optimality. Returns (status, iterations)."""
    iters = 0
    bland = False
    restarted = False
    stall = 0
    while True:
        y = tab.duals(cost)
        d = cost - y @ tab.M
        d[~allowed] = -np.inf
        d[tab.basis] = -np.inf
        if bland:
            cand = np.flatnonzero(d > OPT_TOL)
            if cand.size == 0:
                return OPTIMAL, iters
            j = int(cand[0])
        else:
            j = int(np.argmax(d))
            if not d[j] > OPT_TOL:
                return OPTIMAL, iters
        u = tab.Binv @ tab.M[:, j]
        r, theta = _ratio_test(tab, u)
        if r is None:
            return UNBOUNDED, iters
        tab.pivot(r, j, u)
        iters += 1
        stall = stall + 1 if theta <= 1e-12 else 0
        if stall > DEGENERATE_STALL:
            bland = True
        if iters >= limit:
            if restarted:
                return ITERATION_LIMIT, iters
            restarted = True
            bland = True
            iters = 0


def solve(problem, max_iter=None):
    """Maximize ``problem.objective @ x``; never raises on infeasible/unbounded input."""
    A, b, c = problem.A, problem.rhs, problem.objective
    m, n = A.shape
    if m > MAX_ROWS:
        raise ValueError(f"{m} rows exceeds the dense-basis limit {MAX_ROWS}")
    sign = np.where(b < 0.0, -1.0, 1.0)
    flip = {"<=": ">=", ">=": "<=", "=": "="}
    senses = [flip[s] if sg < 0 else s for s, sg in zip(problem.senses, sign)]
    Ahat = A * sign[:, None]
    bhat = b * sign

    slack_cols, basis, art_rows = [], [None] * m, []
    for i, s in enumerate(senses):
        if s == "<=":
            slack_cols.append((i, 1.0))
            basis[i] = n + len(slack_cols) - 1
        elif s == ">=":
            slack_cols.append((i, -1.0))
    ns = len(slack_cols)
    for i in range(m):
        if basis[i] is None:
            basis[i] = n + ns + len(art_rows)
            art_rows.append(i)
    na = len(art_rows)
    N = n + ns + na
    M = np.zeros((m, N))
    M[:, :n] = Ahat
    for k, (i, v) in enumerate(slack_cols):
        M[i, n + k] = v
    for k, i in enumerate(art_rows):
        M[i, n + ns + k] = 1.0
    limit = max_iter or 10 * (m + N)

    tab = _Tableau(M, bhat, basis)
    iters = 0
    is_art = np.zeros(N, dtype=bool)
    is_art[n + ns:] = True
    if na:
        c1 = np.where(is_art, -1.0, 0.0)
        status, it = _run(tab, c1, np.ones(N, dtype=bool), limit)
        iters += it
        if status == ITERATION_LIMIT:
            return _pack(problem, tab, sign, n, ITERATION_LIMIT, c, iters)
        tab.refactor()
        infeas = -float(c1[tab.basis] @ tab.xB)
        if infeas > FEAS_TOL * (1.0 + np.abs(b).max(initial=0.0)):
            y1 = tab.duals(c1)
            sol = _pack(problem, tab, sign, n, INFEASIBLE, c, iters)
            sol.farkas = sign * y1
            return sol
        _drive_out_artificials(tab, is_art)

    c2 = np.zeros(N)
    c2[:n] = c
    status, it = _run(tab, c2, ~is_art, limit)
    iters += it
    tab.refactor()
    return _pack(problem, tab, sign, n, status, c2, iters)


def _drive_out_artificials(tab, is_art):
    for r in range(len(tab.basis)):
        if not is_art[tab.basis[r]]:
            continue
        alpha = tab.Binv[r] @ tab.M
        alpha[is_art] = 0.0
        alpha[tab.basis] = 0.0
        j = int(np.argmax(np.abs(alpha)))
        if abs(alpha[j]) > 1e-9:
            u = tab.Binv @ tab.M[:, j]
            tab.pivot(r, j, u)
    tab.refactor()


def _pack(problem, tab, sign, n, status, cost, iters):
    x = np.zeros(n)
    xb = np.maximum(tab.xB, 0.0)
    for r, j in enumerate(tab.basis):
        if j < n:
            x[j] = xb[r]
    full_cost = np.zeros(tab.M.shape[1])
    full_cost[: len(cost)] = cost[: tab.M.shape[1]]
    y = sign * tab.duals(full_cost)
    obj = float(problem.objective @ x)
    return LpSolution(status, obj, x, y, tuple(int(j) for j in tab.basis), iters)


def check_certificates(problem, solution):
    """Recompute primal, dual and complementary-slackness residuals from scratch."""
    if solution.status != OPTIMAL:
        raise ValueError(f"cannot certify a solution with status {solution.status!r}")
    A, b, c = problem.A, problem.rhs, problem.objective
    x, y = solution.primal, solution.duals
    r = A @ x - b
    primal = max(float(np.max(-x, initial=0.0)), 0.0)
    dual = 0.0
    slack_term = 0.0
    for i, s in enumerate(problem.senses):
        if s == "=":
            primal = max(primal, abs(r[i]))
        elif s == "<=":
            primal = max(primal, r[i])
            dual = max(dual, -y[i])
        else:
            primal = max(primal, -r[i])
            dual = max(dual, y[i])
        if s != "=":
            slack_term = max(slack_term, abs(y[i] * r[i]))
    d = c - y @ A
    dual = max(dual, float(np.max(d, initial=0.0)))
    obj = float(c @ x)
    gap = abs(obj - float(b @ y))
    comp = max(slack_term, float(np.max(np.abs(x * d), initial=0.0)))
    return CertificateReport(
        primal_residual=primal,
        dual_residual=dual,
        duality_gap=gap,
        complementarity=comp,
        primal_threshold=FEAS_TOL * (1.0 + float(np.abs(b).max(initial=0.0))),
        dual_threshold=FEAS_TOL,
        slack_threshold=1e-8 * (1.0 + abs(obj)),
    )
