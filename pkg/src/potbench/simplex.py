"""Dense two-phase simplex with Bland's rule and duality certificates.

Problems are small (tens of variables) but numerous, and downstream callers
need exact verdicts -- ``optimal`` with matching dual values, ``infeasible``
or ``unbounded`` with a certificate ray -- rather than a best-effort float.
A stalled solve raises :class:`SimplexStallError`; it never returns a silently
wrong answer.

Form accepted: maximize ``c @ x`` subject to ``A x (<=|==|>=) b`` and
``x >= 0``.  All coefficients must be finite; callers pre-reduce infinite
kernel entries (an ``+inf`` coefficient in a ``<=`` row forces its variable
to zero) before building a problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LpProblem", "LpSolution", "SimplexStallError", "solve_lp"]

_LE, _EQ, _GE = "<=", "==", ">="


class SimplexStallError(RuntimeError):
    """The pivot loop hit its iteration cap without reaching a verdict."""


@dataclass(frozen=True)
class LpProblem:
    """maximize ``objective @ x`` s.t. ``lhs x (senses) rhs``, ``x >= 0``."""

    objective: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    senses: tuple

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        A = np.atleast_2d(np.asarray(self.lhs, dtype=float))
        b = np.asarray(self.rhs, dtype=float)
        if A.shape != (b.size, c.size):
            raise ValueError(f"shape mismatch: lhs {A.shape}, rhs {b.shape}, objective {c.shape}")
        for arr, name in ((c, "objective"), (A, "lhs"), (b, "rhs")):
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} must be finite (pre-reduce infinities first)")
        if len(self.senses) != b.size:
            raise ValueError("one sense per constraint row required")
        for s in self.senses:
            if s not in (_LE, _EQ, _GE):
                raise ValueError(f"unknown sense {s!r}")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "lhs", A)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "senses", tuple(self.senses))


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float | None
    x: np.ndarray | None
    duals: np.ndarray | None
    ray: np.ndarray | None
    iterations: int


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    # re-zero the pivot column explicitly to stop drift
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run_phase(T, basis, allowed, m, tol, max_iter, start_iter):
    """Pivot until the objective row has no improving column.

    Returns ``(status, iterations)`` with status ``"optimal"`` or
    ``"unbounded"`` (carrying the entering column in ``T._entering``).
    """
    it = start_iter
    while True:
        if it >= max_iter:
            raise SimplexStallError(f"simplex exceeded {max_iter} pivots")
        zrow = T[-1, :-1]
        # Bland: smallest-index improving column among allowed ones
        improving = np.flatnonzero(allowed & (zrow < -tol))
        if improving.size == 0:
            return "optimal", it, None
        col = int(improving[0])
        colvals = T[:m, col]
        rows = np.flatnonzero(colvals > tol)
        if rows.size == 0:
            return "unbounded", it, col
        ratios = T[rows, -1] / colvals[rows]
        best = ratios.min()
        tied = rows[np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))]
        # Bland tie-break: leave on the smallest basis index
        row = int(tied[np.argmin(np.asarray(basis)[tied])])
        _pivot(T, basis, row, col)
        it += 1


def solve_lp(problem: LpProblem, tol: float = 1e-9, max_iter: int = 100_000) -> LpSolution:
    c = problem.objective.copy()
    A = problem.lhs.copy()
    b = problem.rhs.copy()
    senses = list(problem.senses)
    m, n = A.shape

    # normalize to b >= 0
    row_sign = np.ones(m)
    for i in range(m):
        if b[i] < 0:
            A[i] *= -1.0
            b[i] *= -1.0
            row_sign[i] = -1.0
            if senses[i] == _LE:
                senses[i] = _GE
            elif senses[i] == _GE:
                senses[i] = _LE

    # column layout: originals | slack/surplus (one per <=/>= row) | artificials
    slack_cols, art_cols = {}, {}
    ncols = n
    for i, s in enumerate(senses):
        if s in (_LE, _GE):
            slack_cols[i] = ncols
            ncols += 1
    for i, s in enumerate(senses):
        if s in (_GE, _EQ):
            art_cols[i] = ncols
            ncols += 1

    T = np.zeros((m + 1, ncols + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basis = [0] * m
    for i, s in enumerate(senses):
        if s == _LE:
            T[i, slack_cols[i]] = 1.0
            basis[i] = slack_cols[i]
        elif s == _GE:
            T[i, slack_cols[i]] = -1.0
            T[i, art_cols[i]] = 1.0
            basis[i] = art_cols[i]
        else:
            T[i, art_cols[i]] = 1.0
            basis[i] = art_cols[i]

    is_artificial = np.zeros(ncols, dtype=bool)
    for col in art_cols.values():
        is_artificial[col] = True

    iterations = 0
    if art_cols:
        # phase 1: maximize -sum(artificials)
        c1 = np.zeros(ncols)
        c1[is_artificial] = -1.0
        T[-1, :-1] = -c1
        T[-1, -1] = 0.0
        for i in range(m):
            if is_artificial[basis[i]]:
                T[-1] -= T[i] * 1.0  # z_j - c_j needs c_B B^-1 A; artificial cost -1
        status, iterations, _ = _run_phase(T, basis, np.ones(ncols, dtype=bool), m, tol, max_iter, iterations)
        if status != "optimal":  # cannot happen: phase-1 objective is bounded
            raise SimplexStallError("phase 1 reported unbounded")
        if T[-1, -1] < -tol * max(1.0, abs(b).max()):
            # infeasible; Farkas certificate from the phase-1 duals
            duals = _extract_duals(T, basis, c1, slack_cols, art_cols, senses, m, row_sign)
            return LpSolution("infeasible", None, None, None, duals, iterations)
        # drive basic artificials out where a real pivot exists
        for i in range(m):
            if is_artificial[basis[i]]:
                real = np.flatnonzero(~is_artificial[:ncols] & (np.abs(T[i, :-1]) > tol))
                if real.size:
                    _pivot(T, basis, i, int(real[0]))
                    iterations += 1

    # phase 2 objective row: z_j - c_j with artificial columns banned
    c_full = np.zeros(ncols)
    c_full[:n] = c
    cb = c_full[basis]
    T[-1, :-1] = cb @ T[:m, :-1] - c_full
    T[-1, -1] = cb @ T[:m, -1]
    allowed = ~is_artificial
    status, iterations, entering = _run_phase(T, basis, allowed, m, tol, max_iter, iterations)

    if status == "unbounded":
        ray_full = np.zeros(ncols)
        ray_full[entering] = 1.0
        for i in range(m):
            ray_full[basis[i]] = -T[i, entering]
        ray = ray_full[:n].copy()
        ray[np.abs(ray) < tol] = 0.0
        return LpSolution("unbounded", None, None, None, ray, iterations)

    x = np.zeros(ncols)
    for i in range(m):
        x[basis[i]] = T[i, -1]
    primal = x[:n].copy()
    primal[primal < 0] = 0.0
    value = float(c @ primal)
    duals = _extract_duals(T, basis, c_full, slack_cols, art_cols, senses, m, row_sign)
    return LpSolution("optimal", value, primal, duals, None, iterations)


def _extract_duals(T, basis, c_full, slack_cols, art_cols, senses, m, row_sign):
    """Read ``y = c_B B^{-1}`` off the columns that started as ``+e_i``."""
    id_cols = np.zeros(m, dtype=int)
    for i, s in enumerate(senses):
        id_cols[i] = slack_cols[i] if s == _LE else art_cols[i]
    cb = c_full[basis]
    y = cb @ T[:m, id_cols]
    return y * row_sign
