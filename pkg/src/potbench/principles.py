"""Maximum-principle constants and quasimetric structure of a kernel.

The weak constant is the smallest ``h`` such that any potential of a measure
supported on a set ``S`` that stays ``<= 1`` on ``S`` stays ``<= h``
everywhere.  The complete constant allows an additive constant on the
majorant side.  Both reduce to one small linear program per pair ``(S, x)``
with ``x`` outside ``S``; pairs are enumerated exhaustively when
``n * 2**n`` fits the budget and otherwise sampled from a seeded stream that
always includes every singleton support and every complement-of-a-point
support.  Sampled constants are certified lower bounds, not exact values.

Infinite kernel entries never reach the LP solver.  A ``+inf`` coefficient
inside a ``<= 1`` row forces that variable to zero; a ``+inf`` objective
coefficient on a still-feasible variable makes the constant infinite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DomainError, Kernel, Measure
from .simplex import LpProblem, solve_lp

__all__ = [
    "DEFAULT_BUDGET",
    "WmpReport",
    "CompleteMpReport",
    "QuasimetricReport",
    "ModifiedKernel",
    "wmp_constant",
    "complete_mp_constant",
    "quasimetric_constant",
    "modifier",
    "modify_kernel",
]

DEFAULT_BUDGET = 14 * 2**14


@dataclass(frozen=True)
class WmpReport:
    constant: float
    holds: bool
    witness: tuple | None  # (support points, evaluation point, Measure)
    mode: str  # "exact" | "sampled"
    pairs_checked: int


@dataclass(frozen=True)
class CompleteMpReport:
    constant: float
    holds: bool
    witness: tuple | None  # (support points, evaluation point, mu, nu, c)
    mode: str
    pairs_checked: int


def _iter_exact_pairs(n: int):
    for mask in range(1, (1 << n) - 1):
        S = [i for i in range(n) if mask >> i & 1]
        inside = set(S)
        for x in range(n):
            if x not in inside:
                yield S, x


def _iter_sampled_pairs(n: int, budget: int, seed: int):
    """Seeded pair stream: mandatory cheap supports first, then a random
    prefix whose composition does not depend on the budget."""
    for y in range(n):
        for x in range(n):
            if x != y:
                yield [y], x
    for x in range(n):
        yield [y for y in range(n) if y != x], x
    target = min(10 * n * n, budget)
    rng = np.random.default_rng(seed)
    seen = set()
    draws = 0
    while len(seen) < target and draws < 20 * target:
        draws += 1
        bits = rng.integers(0, 2, size=n)
        if bits.all() or not bits.any():
            continue
        S = np.flatnonzero(bits)
        x = int(rng.choice(np.flatnonzero(~bits.astype(bool))))
        key = (bits.tobytes(), x)
        if key in seen:
            continue
        seen.add(key)
        yield list(S), x


def _iter_pairs(n: int, budget: int, seed: int):
    if n * (1 << n) <= budget:
        return "exact", _iter_exact_pairs(n)
    return "sampled", _iter_sampled_pairs(n, budget, seed)


def _wmp_pair_value(G: np.ndarray, S: list, x: int):
    """max G nu (x) over nu >= 0 on S with G nu <= 1 on S.

    Returns ``(value, weights on S columns, columns)``.
    """
    cols = [y for y in S if np.isfinite(G[S, y]).all()]
    if not cols:
        return 0.0, np.zeros(0), cols
    obj = G[x, cols]
    if np.isinf(obj).any():
        w = np.zeros(len(cols))
        w[int(np.argmax(np.isinf(obj)))] = 1.0
        return float("inf"), w, cols
    problem = LpProblem(
        objective=obj,
        lhs=G[np.ix_(S, cols)],
        rhs=np.ones(len(S)),
        senses=("<=",) * len(S),
    )
    sol = solve_lp(problem)
    if sol.status == "unbounded":
        return float("inf"), sol.ray, cols
    if sol.status != "optimal":  # nu = 0 is always feasible
        raise RuntimeError(f"weak-principle LP reported {sol.status}")
    return float(sol.value), sol.x, cols


def wmp_constant(kernel: Kernel, budget: int = DEFAULT_BUDGET, seed: int = 0) -> WmpReport:
    """Smallest ``h`` with: ``G nu <= 1`` on ``supp nu`` implies ``G nu <= h``."""
    G = kernel.entries
    n = kernel.size
    mode, pairs = _iter_pairs(n, budget, seed)
    best = 1.0
    witness = None
    checked = 0
    for S, x in pairs:
        checked += 1
        value, w, cols = _wmp_pair_value(G, S, x)
        if value > best:
            best = value
            weights = np.zeros(n)
            if len(cols):
                weights[cols] = np.clip(w, 0.0, None)
            witness = (
                tuple(kernel.space.points[i] for i in S),
                kernel.space.points[x],
                Measure(kernel.space, weights),
            )
            if np.isinf(best):
                break
    return WmpReport(best, bool(np.isfinite(best)), witness, mode, checked)


def _complete_pair_value(G: np.ndarray, S: list, x: int, n: int):
    """max G mu (x) with supp mu in S, G mu <= G nu + c on S, G nu (x) + c = 1."""
    mu_cols = [y for y in S if np.isfinite(G[S, y]).all()]
    nu_cols = [
        w
        for w in range(n)
        if np.isfinite(G[x, w]) and np.isfinite(G[S, w]).all()
    ]
    obj_mu = G[x, mu_cols] if mu_cols else np.zeros(0)
    if np.isinf(obj_mu).any():
        mu = np.zeros(len(mu_cols))
        mu[int(np.argmax(np.isinf(obj_mu)))] = 1.0
        return float("inf"), mu, mu_cols, np.zeros(len(nu_cols)), nu_cols, 1.0
    k, r = len(mu_cols), len(nu_cols)
    lhs = np.zeros((len(S) + 1, k + r + 1))
    senses = []
    for i, z in enumerate(S):
        lhs[i, :k] = G[z, mu_cols]
        lhs[i, k:k + r] = -G[z, nu_cols]
        lhs[i, k + r] = -1.0
        senses.append("<=")
    lhs[-1, k:k + r] = G[x, nu_cols]
    lhs[-1, k + r] = 1.0
    senses.append("==")
    rhs = np.zeros(len(S) + 1)
    rhs[-1] = 1.0
    objective = np.zeros(k + r + 1)
    objective[:k] = obj_mu
    sol = solve_lp(LpProblem(objective, lhs, rhs, tuple(senses)))
    if sol.status == "unbounded":
        ray = sol.ray
        return float("inf"), ray[:k], mu_cols, ray[k:k + r], nu_cols, float(ray[k + r])
    if sol.status != "optimal":  # mu = nu = 0, c = 1 is always feasible
        raise RuntimeError(f"complete-principle LP reported {sol.status}")
    xopt = sol.x
    return float(sol.value), xopt[:k], mu_cols, xopt[k:k + r], nu_cols, float(xopt[k + r])


def complete_mp_constant(kernel: Kernel, budget: int = DEFAULT_BUDGET,
                         seed: int = 0) -> CompleteMpReport:
    """Smallest ``h`` for the principle with an additive constant.

    For ``mu`` on ``S`` and any ``nu, c >= 0``: if ``G mu <= G nu + c`` on
    ``S`` then ``G mu <= h (G nu + c)`` everywhere.  Columns whose potential
    over ``S`` is infinite are excluded from ``mu`` (its potential must be
    finite where it carries mass) and from ``nu`` (kept conservative so the
    reported constant stays a valid lower bound).
    """
    G = kernel.entries
    n = kernel.size
    mode, pairs = _iter_pairs(n, budget, seed)
    best = 1.0
    witness = None
    checked = 0
    for S, x in pairs:
        checked += 1
        value, mu_w, mu_cols, nu_w, nu_cols, c = _complete_pair_value(G, S, x, n)
        if value > best:
            best = value
            mu = np.zeros(n)
            if mu_cols:
                mu[mu_cols] = np.clip(mu_w, 0.0, None)
            nu = np.zeros(n)
            if nu_cols:
                nu[nu_cols] = np.clip(nu_w, 0.0, None)
            witness = (
                tuple(kernel.space.points[i] for i in S),
                kernel.space.points[x],
                Measure(kernel.space, mu),
                Measure(kernel.space, nu),
                max(c, 0.0),
            )
            if np.isinf(best):
                break
    return CompleteMpReport(best, bool(np.isfinite(best)), witness, mode, checked)


# ---------------------------------------------------------------------------
# quasimetric structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuasimetricReport:
    """Triangle-comparison constant of ``d = 1/G`` and a four-point check.

    ``kappa`` is the least constant with ``d(x,y) <= kappa (d(x,z)+d(z,y))``
    for all triples, floored at 1/2 (attained by degenerate triples).  The
    four-point comparison tests ``d(x,z) d(y,w)`` against
    ``4 kappa^2 (d(x,y) d(z,w) + d(y,z) d(x,w))`` on all quadruples and is
    run only on small spaces.
    """

    kappa: float
    is_quasimetric: bool
    witness: tuple | None
    ptolemy_constant: float | None = None
    ptolemy_bound: float | None = None
    ptolemy_ok: bool | None = None


def _ratio_max(num: np.ndarray, den: np.ndarray):
    """Extended-real max of num/den: inf/inf and 0/0 impose nothing."""
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num / den
    return np.where(np.isnan(r), 0.0, r)


def quasimetric_constant(kernel: Kernel, ptolemy_limit: int = 30) -> QuasimetricReport:
    G = kernel.entries
    n = kernel.size
    if not kernel.is_symmetric:
        return QuasimetricReport(float("inf"), False, None)
    with np.errstate(divide="ignore"):
        d = np.where(G == 0, np.inf, 1.0 / G)
    d = np.where(np.isinf(G), 0.0, d)
    if (d == 0).all():
        # G identically infinite: all points collapse, no quasimetric
        return QuasimetricReport(0.5, False, None)

    best = 0.0
    wit = None
    for x in range(n):
        num = np.broadcast_to(d[x], (n, n))  # indexed (z, y)
        den = d[x][:, None] + d
        r = _ratio_max(num, den)
        m = float(r.max())
        if m > best:
            z, y = np.unravel_index(int(np.argmax(r)), (n, n))
            best = m
            wit = (
                kernel.space.points[x],
                kernel.space.points[int(z)],
                kernel.space.points[int(y)],
            )
            if np.isinf(best):
                break

    kappa = max(0.5, best)
    finite = bool(np.isfinite(kappa))
    report = QuasimetricReport(kappa, finite, wit)
    if not finite or n > ptolemy_limit:
        return report

    # axes (x, z, y, w) throughout
    with np.errstate(invalid="ignore"):
        lhs = d[:, :, None, None] * d[None, None, :, :]  # d[x,z] d[y,w]
        r1 = d[:, None, :, None] * d[None, :, None, :]  # d[x,y] d[z,w]
        r2 = d.T[None, :, :, None] * d[:, None, None, :]  # d[y,z] d[x,w]
    lhs = np.where(np.isnan(lhs), 0.0, lhs)
    r1 = np.where(np.isnan(r1), 0.0, r1)
    r2 = np.where(np.isnan(r2), 0.0, r2)
    q = _ratio_max(lhs, r1 + r2)
    pc = float(q.max())
    bound = 4.0 * kappa * kappa
    return QuasimetricReport(
        kappa,
        finite,
        wit,
        ptolemy_constant=pc,
        ptolemy_bound=bound,
        ptolemy_ok=bool(pc <= bound * (1.0 + 1e-9)),
    )


# ---------------------------------------------------------------------------
# kernel modification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModifiedKernel:
    kernel: Kernel
    retained: np.ndarray  # indices into the original space
    weights: np.ndarray  # the modifier over the original space


def modifier(kernel: Kernel, x0) -> np.ndarray:
    """Pointwise ``min(1, G(., x0))``, the natural bounded modifier."""
    j = kernel.space.index(x0)
    return np.minimum(1.0, kernel.entries[:, j])


def modify_kernel(kernel: Kernel, m) -> ModifiedKernel:
    """Divide the kernel by ``m(x) m(y)``, on the points where ``0 < m < inf``."""
    m = np.asarray(m, dtype=float)
    if m.shape != (kernel.size,):
        raise DomainError("modifier must assign one weight per point")
    if np.isnan(m).any() or (m[np.isfinite(m)] < 0).any():
        raise DomainError("modifier weights must be nonnegative")
    retained = np.flatnonzero((m > 0) & np.isfinite(m))
    if retained.size == 0:
        raise DomainError("modifier vanishes or blows up everywhere")
    sub = kernel.restrict(retained)
    mr = m[retained]
    entries = sub.entries / np.outer(mr, mr)
    out = np.asarray(m, dtype=float).copy()
    out.setflags(write=False)
    return ModifiedKernel(Kernel(sub.space, entries), retained, out)
