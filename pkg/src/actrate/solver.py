"""Global grid search for rate-cost and rate-distortion-cost functions.

The objectives are not jointly convex in the auxiliary distribution, so the
solver does a certifiable enumeration instead of descent:

  * every deterministic action policy a = f(s, v) is enumerated, up to
    relabeling of the V alphabet (an exact symmetry: the probability grid
    below is permutation-invariant, so only the multiset of per-v action
    columns matters);
  * the auxiliary distribution (p(v|s) rows, or a single p(v) row in the
    causal pattern) ranges over a uniform simplex grid with ``grid_steps``
    subdivisions per coordinate;
  * local refinement then shrinks the step by 4x per round around the
    incumbent, re-evaluating candidates through the exact reference path
    in ``model``.

The grid sweep is budget-independent: each (policy, grid point) yields an
(expected cost, objective) pair, and only the Pareto frontier of that cloud
can ever answer a budget query, so the sweep is run once per (spec, mode,
config), reduced to its exact frontier, cached, and shared by all budgets,
by ``trace_curve``, and by the Lagrangian cross-check.

Large alphabets make the enumeration count explode; the sweep refuses with
a SearchSpaceError (carrying the count) instead of running for hours. The
cost constraint is handled two ways, both exposed: direct feasibility
filtering against the frontier (``solve_*``), and ``lagrangian_sweep``,
whose lower envelope cross-checks the direct curve by weak duality.

Heavy sweeps (more than ~2e7 grid points) evaluate tiles in float32 for
memory-bandwidth reasons; small sweeps stay in float64. Reported rates
never come from the tile path: the returned argmin is always re-evaluated
through ``model``, so a point's rate reproduces under re-evaluation to
float64 accuracy. Everything here is pure-functional over read-only
arrays; concurrent calls at worst duplicate a cached sweep.
"""

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import xlogy

from .errors import DomainError, IntegrityError, SearchSpaceError, UsageError
from .kernel import entropy_bits
from .model import (
    ActionPolicy,
    AuxiliaryChoice,
    ProblemSpec,
    assemble_joint,
    causal_lossy_rate,
    causal_rate,
    expected_cost,
    expected_distortion,
    noncausal_rate,
    reduced_cost,
)

__all__ = [
    "SolveConfig",
    "RateCostPoint",
    "RateCurve",
    "solve_noncausal",
    "solve_causal",
    "solve_lossy_causal",
    "evaluate_lossy_bounds",
    "trace_curve",
    "brute_force_oracle",
    "lagrangian_sweep",
    "lower_convex_envelope",
]

_LN2 = float(np.log(2.0))

# Feasibility slack for cost comparisons against the budget (float dust only;
# the budget itself is not relaxed).
_FEAS_EPS = 1e-12

# Tile evaluation switches to float32 above this many grid points.
_F32_THRESHOLD = 20_000_000

# Pareto-frontier screening buckets (acceleration only; results stay exact).
_N_BUCKETS = 4096

DEFAULT_LAGRANGE_SWEEP = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0)


@dataclass(frozen=True)
class SolveConfig:
    """Search resolution and guard settings.

    v_size_max / u_size_max default to |S|+2 and |Y|+2 (sufficient auxiliary
    cardinalities for these objectives) when left as None. ``search_limit``
    bounds the total number of grid evaluations a sweep may request;
    bound searches with inner enumerations are charged a 64x weight for
    their per-point cost. ``lambda_grid`` is the multiplier-grid size for
    the lossy inner problem (the winning candidate is re-solved by exact
    bisection, so it only affects argmin selection).
    """

    grid_steps: int = 32
    refine_rounds: int = 3
    v_size_max: int | None = None
    u_size_max: int | None = None
    tolerance: float = 1e-6
    lagrange_sweep: tuple[float, ...] = DEFAULT_LAGRANGE_SWEEP
    search_limit: int = 4_000_000_000
    lambda_max: float = 50.0
    lambda_grid: int = 96
    ba_tol: float = 1e-9
    ba_max_iter: int = 500

    def __post_init__(self):
        if self.grid_steps < 2:
            raise UsageError("grid_steps must be >= 2")
        if self.refine_rounds < 0:
            raise UsageError("refine_rounds must be >= 0")
        for name in ("v_size_max", "u_size_max"):
            val = getattr(self, name)
            if val is not None and val < 1:
                raise UsageError(f"{name} must be >= 1")

    def resolved_v_max(self, spec: ProblemSpec) -> int:
        return self.v_size_max if self.v_size_max is not None else spec.s_size + 2

    def resolved_u_max(self, spec: ProblemSpec) -> int:
        return self.u_size_max if self.u_size_max is not None else spec.y_size + 2


@dataclass(frozen=True)
class RateCostPoint:
    """One solved point of a rate-cost curve.

    ``rate`` is the reported value (after any envelope post-processing in a
    curve); ``solved_rate`` is the raw search value for that budget. For a
    feasible point the argmin re-evaluates to ``solved_rate`` through the
    reference path. Infeasible budgets give rate = inf and argmin = None.
    """

    budget: float
    rate: float
    cost: float
    feasible: bool = True
    distortion: float | None = None
    argmin: AuxiliaryChoice | None = None
    exact: bool = False
    solved_rate: float | None = None
    metadata: dict = field(default_factory=dict)

    def argmin_summary(self) -> str:
        return "" if self.argmin is None else self.argmin.summary()


@dataclass(frozen=True)
class RateCurve:
    points: tuple[RateCostPoint, ...]
    mode: str
    envelope_applied: bool
    metadata: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Simplex grids and policy enumeration
# ---------------------------------------------------------------------------


def _simplex_grid_size(k: int, steps: int) -> int:
    return math.comb(steps + k - 1, k - 1)


def _simplex_grid(k: int, steps: int) -> np.ndarray:
    """All pmfs on k atoms with denominators ``steps``, shape (N, k)."""
    if k == 1:
        return np.ones((1, 1))
    pts = np.empty((_simplex_grid_size(k, steps), k))
    row = 0
    for cuts in itertools.combinations(range(steps + k - 1), k - 1):
        prev = -1
        for j, c in enumerate(cuts):
            pts[row, j] = c - prev - 1
            prev = c
        pts[row, k - 1] = steps + k - 2 - prev
        row += 1
    return pts / steps


def _action_columns(spec: ProblemSpec) -> list[tuple[int, ...]]:
    """All per-v action columns f(., v): maps from S to A, lexicographic."""
    return list(itertools.product(range(spec.a_size), repeat=spec.s_size))


def _policies(spec: ProblemSpec, v_size: int) -> list[np.ndarray]:
    """Policy tables (s, v), one per multiset of action columns."""
    cols = _action_columns(spec)
    out = []
    for combo in itertools.combinations_with_replacement(range(len(cols)), v_size):
        table = np.array([cols[c] for c in combo]).T  # (s, v)
        out.append(np.ascontiguousarray(table))
    return out


def _policy_count(spec: ProblemSpec, v_size: int) -> int:
    return math.comb(spec.a_size**spec.s_size + v_size - 1, v_size)


# ---------------------------------------------------------------------------
# Exact Pareto frontier of (cost, objective) pairs
# ---------------------------------------------------------------------------


class _Frontier:
    """Exact lower-left staircase of (cost, objective) with argmin payloads.

    Candidates are screened against a bucketized prefix-min table first;
    the screen is conservative (floor-edge buckets), so every point that
    could improve any budget query survives to the exact merge.
    """

    def __init__(self, cost_ceiling: float):
        self.cost = np.empty(0)
        self.obj = np.empty(0)
        self.v_size = np.empty(0, dtype=np.int64)
        self.policy_id = np.empty(0, dtype=np.int64)
        self.combo = np.empty(0, dtype=np.int64)
        self._width = max(cost_ceiling, 1e-300) / _N_BUCKETS
        self._bucket_lb = np.full(_N_BUCKETS + 1, np.inf)

    def screen(self, cost: np.ndarray, obj: np.ndarray) -> np.ndarray:
        idx = np.minimum((cost / self._width).astype(np.int64), _N_BUCKETS)
        return obj < self._bucket_lb[idx]

    def update(self, cost, obj, v_size: int, policy_id: int, combo) -> None:
        cost = np.concatenate([self.cost, np.asarray(cost, dtype=np.float64)])
        obj = np.concatenate([self.obj, np.asarray(obj, dtype=np.float64)])
        vs = np.concatenate(
            [self.v_size, np.full(len(cost) - len(self.v_size), v_size, dtype=np.int64)]
        )
        pid = np.concatenate(
            [self.policy_id,
             np.full(len(cost) - len(self.policy_id), policy_id, dtype=np.int64)]
        )
        cmb = np.concatenate([self.combo, np.asarray(combo, dtype=np.int64)])
        order = np.lexsort((obj, cost))  # stable: earlier entries win ties
        cost, obj = cost[order], obj[order]
        vs, pid, cmb = vs[order], pid[order], cmb[order]
        run = np.minimum.accumulate(obj)
        prev = np.concatenate(([np.inf], run[:-1]))
        keep = obj < prev
        self.cost, self.obj = cost[keep], obj[keep]
        self.v_size, self.policy_id, self.combo = vs[keep], pid[keep], cmb[keep]
        edges = np.arange(_N_BUCKETS + 1) * self._width
        pos = np.searchsorted(self.cost, edges, side="right") - 1
        self._bucket_lb = np.where(pos >= 0, self.obj[np.maximum(pos, 0)], np.inf)

    def query(self, budget: float):
        """Best (obj, cost, v_size, policy_id, combo) with cost <= budget."""
        pos = int(np.searchsorted(self.cost, budget + _FEAS_EPS, side="right")) - 1
        if pos < 0:
            return None
        return (
            float(self.obj[pos]),
            float(self.cost[pos]),
            int(self.v_size[pos]),
            int(self.policy_id[pos]),
            int(self.combo[pos]),
        )

    @property
    def min_cost(self) -> float:
        return float(self.cost[0]) if len(self.cost) else np.inf


# ---------------------------------------------------------------------------
# Vectorized tile evaluation
# ---------------------------------------------------------------------------


def _neg_plogp(arr: np.ndarray) -> np.ndarray:
    """-sum p*ln(p) over the last axis, tolerating zeros, preserving dtype."""
    with np.errstate(divide="ignore", invalid="ignore"):
        term = arr * np.log(arr)
    np.nan_to_num(term, copy=False, nan=0.0)
    return -term.sum(axis=-1)


def _sweep_tiles(spec, policy, grid, causal, dtype, consume):
    """Evaluate objective/cost for every grid combo under one policy.

    ``consume(cost, obj, combo_ids)`` receives flat float64/float32 arrays.
    Combos are mixed-radix over per-state row indices (state 0 most
    significant); the causal pattern has a single shared row, combo = row.
    """
    s_size, z_size = spec.state_joint.shape
    v_size = policy.shape[1]
    y_size = spec.y_size
    n = grid.shape[0]
    t = spec.channel[policy, np.arange(s_size)[:, None], :]  # (s, v, y)
    lam = reduced_cost(spec)  # (s, a)
    p_s = spec.state_marginal
    h_z = entropy_bits(spec.side_info_marginal)
    h_grid = -xlogy(grid, grid).sum(axis=1) / _LN2

    if causal:
        # J[i] column-major over (z, v, y): r_i[v] * sum_s p(s, z) T[s, v, y]
        m = np.einsum("sz,svy->zvy", spec.state_joint, t)
        g_axes = [
            np.ascontiguousarray(
                (grid[:, None, :, None] * m[None, :, :, :]).reshape(n, -1), dtype=dtype
            )
        ]
        cost_axes = [grid @ np.einsum("s,sv->v", p_s, lam[np.arange(s_size)[:, None], policy])]
        h_axes = [h_grid]
    else:
        g_axes, cost_axes, h_axes = [], [], []
        for s in range(s_size):
            contrib = (
                grid[:, None, :, None]
                * (spec.state_joint[s][:, None, None] * t[s][None, :, :])
            )  # (n, z, v, y)
            g_axes.append(np.ascontiguousarray(contrib.reshape(n, -1), dtype=dtype))
            cost_axes.append(grid @ (p_s[s] * lam[s, policy[s]]))
            h_axes.append(p_s[s] * h_grid)

    n_axes = len(g_axes)
    k = g_axes[0].shape[1]
    n_prefix = n ** (n_axes - 1)
    block = max(8, min(4096, (1 << 22) // max(1, n * k)))
    g_last = g_axes[-1]
    inner_ids = np.arange(n, dtype=np.int64)

    for p0 in range(0, n_prefix, block):
        p1 = min(p0 + block, n_prefix)
        pid = np.arange(p0, p1, dtype=np.int64)
        j_pre = np.zeros((len(pid), k), dtype=dtype)
        cost_pre = np.zeros(len(pid))
        h_pre = np.zeros(len(pid))
        rem = pid.copy()
        for s in range(n_axes - 2, -1, -1):
            rows = rem % n
            rem //= n
            j_pre += g_axes[s][rows]
            cost_pre += cost_axes[s][rows]
            h_pre += h_axes[s][rows]
        tile = j_pre[:, None, :] + g_last[None, :, :]
        h_tile = _neg_plogp(tile) / dtype(_LN2)
        obj = h_tile - (h_pre[:, None] + h_axes[-1][None, :]) - h_z
        cost = cost_pre[:, None] + cost_axes[-1][None, :]
        combos = pid[:, None] * n + inner_ids[None, :]
        consume(cost.reshape(-1), obj.reshape(-1), combos.reshape(-1))


def _sweep_plan(spec, causal, config):
    """(v_size, policies, grid, combos_per_policy) rows plus the total count."""
    v_max = config.resolved_v_max(spec)
    rows = []
    total = 0
    n_axes = 1 if causal else spec.s_size
    for v_size in range(1, v_max + 1):
        n = _simplex_grid_size(v_size, config.grid_steps)
        combos = n**n_axes
        count = _policy_count(spec, v_size) * combos
        total += count
        rows.append((v_size, n, combos))
    return rows, total


def _run_sweep(spec, causal, config) -> _Frontier:
    rows, total = _sweep_plan(spec, causal, config)
    if total > config.search_limit:
        raise SearchSpaceError(total, config.search_limit, "grid sweep")
    dtype = np.float32 if total > _F32_THRESHOLD else np.float64
    lam = reduced_cost(spec)
    frontier = _Frontier(cost_ceiling=float(lam.max(initial=0.0)))
    for v_size, _, _ in rows:
        grid = _simplex_grid(v_size, config.grid_steps)
        for policy_id, policy in enumerate(_policies(spec, v_size)):

            def consume(cost, obj, combos, _v=v_size, _p=policy_id):
                keep = frontier.screen(cost, obj)
                if np.any(keep):
                    frontier.update(
                        cost[keep], obj[keep], _v, _p, combos[keep]
                    )

            _sweep_tiles(spec, policy, grid, causal, dtype, consume)
    return frontier


# Process-local sweep cache: the sweep is budget-independent, so repeated
# solves and trace_curve share it. Bounded FIFO.
_SWEEP_CACHE: dict[tuple, _Frontier] = {}
_SWEEP_CACHE_MAX = 16


def _cached_sweep(spec, causal, config) -> _Frontier:
    key = (
        spec.fingerprint(),
        causal,
        config.grid_steps,
        config.resolved_v_max(spec),
        config.search_limit,
    )
    hit = _SWEEP_CACHE.get(key)
    if hit is None:
        hit = _run_sweep(spec, causal, config)
        if len(_SWEEP_CACHE) >= _SWEEP_CACHE_MAX:
            _SWEEP_CACHE.pop(next(iter(_SWEEP_CACHE)))
        _SWEEP_CACHE[key] = hit
    return hit


# ---------------------------------------------------------------------------
# Reference-path evaluation and local refinement
# ---------------------------------------------------------------------------


def _combo_rows(grid: np.ndarray, combo: int, n_axes: int) -> np.ndarray:
    n = grid.shape[0]
    rows = []
    for _ in range(n_axes):
        rows.append(grid[combo % n])
        combo //= n
    return np.array(rows[::-1])  # state 0 most significant


def _make_aux(policy: np.ndarray, rows: np.ndarray, causal: bool) -> AuxiliaryChoice:
    if causal:
        return AuxiliaryChoice(policy=ActionPolicy(policy), v_marginal=rows[0])
    return AuxiliaryChoice(policy=ActionPolicy(policy), v_given_s=rows)


def _eval_reference(spec, policy, rows, causal) -> tuple[float, float]:
    """(objective, expected cost) through the exact model path."""
    aux = _make_aux(policy, rows, causal)
    joint = assemble_joint(spec, aux, causal=causal)
    value = causal_rate(joint) if causal else noncausal_rate(joint)
    return value, expected_cost(joint, spec)


def _row_moves(v_size: int, step: float) -> list[np.ndarray]:
    moves = [np.zeros(v_size)]
    for a in range(v_size):
        for b in range(v_size):
            if a != b:
                m = np.zeros(v_size)
                m[a] += step
                m[b] -= step
                moves.append(m)
    return moves


def _refine(rows, budget, config, evaluate):
    """Shrinking-step local search around the incumbent rows.

    ``evaluate(rows) -> (value, cost)``; moves that leave the simplex or
    exceed the budget are discarded. At most two rows move at a time,
    which keeps the candidate set small while still allowing the cost
    trades between rows that budget-boundary optima need.
    """
    n_rows, v_size = rows.shape
    best_val, best_cost = evaluate(rows)
    if v_size == 1:
        return rows, best_val, best_cost
    for round_no in range(1, config.refine_rounds + 1):
        step = (1.0 / config.grid_steps) / (4.0**round_no)
        moves = _row_moves(v_size, step)[1:]
        for _ in range(50):
            improved = False
            candidates = []
            for r in range(n_rows):
                for mv in moves:
                    candidates.append(((r,), (mv,)))
            for r1 in range(n_rows):
                for r2 in range(r1 + 1, n_rows):
                    for mv1 in moves:
                        for mv2 in moves:
                            candidates.append(((r1, r2), (mv1, mv2)))
            for which, mvs in candidates:
                cand = rows.copy()
                ok = True
                for r, mv in zip(which, mvs):
                    nr = cand[r] + mv
                    if nr.min() < 0.0:
                        ok = False
                        break
                    cand[r] = nr
                if not ok:
                    continue
                val, cost = evaluate(cand)
                if cost <= budget + _FEAS_EPS and val < best_val - 1e-13:
                    rows, best_val, best_cost = cand, val, cost
                    improved = True
            if not improved:
                break
    return rows, best_val, best_cost


def _solve_lossless(spec, budget, causal, config) -> RateCostPoint:
    if budget < 0.0:
        raise DomainError(f"budget must be >= 0, got {budget!r}")
    config = config or SolveConfig()
    frontier = _cached_sweep(spec, causal, config)
    meta = {
        "mode": "causal" if causal else "noncausal",
        "grid_steps": config.grid_steps,
        "refine_rounds": config.refine_rounds,
        "v_size_max": config.resolved_v_max(spec),
    }
    hit = frontier.query(budget)
    if hit is None:
        meta["min_achievable_cost"] = frontier.min_cost
        return RateCostPoint(
            budget=float(budget), rate=np.inf, cost=np.inf, feasible=False,
            metadata=meta,
        )
    _, _, v_size, policy_id, combo = hit
    grid = _simplex_grid(v_size, config.grid_steps)
    policy = _policies(spec, v_size)[policy_id]
    n_axes = 1 if causal else spec.s_size
    rows = _combo_rows(grid, combo, n_axes)

    def evaluate(r):
        return _eval_reference(spec, policy, r, causal)

    rows, value, cost = _refine(rows, budget, config, evaluate)
    aux = _make_aux(policy, rows, causal)
    meta["v_size"] = v_size
    return RateCostPoint(
        budget=float(budget), rate=value, cost=cost, argmin=aux,
        solved_rate=value, metadata=meta,
    )


def solve_noncausal(
    spec: ProblemSpec, budget: float, config: SolveConfig | None = None
) -> RateCostPoint:
    """Minimize I(V;S|Z) + H(Y|V,Z) over policies and p(v|s), cost <= budget."""
    return _solve_lossless(spec, budget, causal=False, config=config)


def solve_causal(
    spec: ProblemSpec, budget: float, config: SolveConfig | None = None
) -> RateCostPoint:
    """Minimize H(Y|V,Z) over policies and state-independent p(v)."""
    return _solve_lossless(spec, budget, causal=True, config=config)


def lagrangian_sweep(
    spec: ProblemSpec,
    mode: str,
    lambdas=None,
    config: SolveConfig | None = None,
) -> list[dict]:
    """min(objective + lam * cost) over the swept cloud, per multiplier.

    For every lam >= 0 the minimizer lies on the Pareto frontier, so this
    reads the cached sweep. By weak duality, max over lam of
    (value - lam * B) lower-bounds the direct solve at budget B; tests use
    that as the cross-check between the two constraint treatments.
    """
    causal = _parse_mode(mode)
    config = config or SolveConfig()
    lambdas = config.lagrange_sweep if lambdas is None else tuple(lambdas)
    if any(l < 0.0 for l in lambdas):
        raise DomainError("multipliers must be >= 0")
    frontier = _cached_sweep(spec, causal, config)
    out = []
    for lam in lambdas:
        scores = frontier.obj + lam * frontier.cost
        k = int(np.argmin(scores))
        out.append(
            {
                "lam": float(lam),
                "value": float(scores[k]),
                "objective": float(frontier.obj[k]),
                "cost": float(frontier.cost[k]),
            }
        )
    return out


def _parse_mode(mode: str) -> bool:
    if mode == "causal":
        return True
    if mode == "noncausal":
        return False
    raise UsageError(f"mode must be 'noncausal' or 'causal', got {mode!r}")


def brute_force_oracle(
    spec: ProblemSpec,
    budget: float,
    mode: str = "noncausal",
    dense_steps: int = 64,
    v_size: int | None = None,
    max_evals: int = 100_000_000,
) -> RateCostPoint:
    """Plain dense-grid minimum: no refinement, no caching, no frontier.

    Enumerates every policy (up to V relabeling, an exact symmetry) and
    every simplex grid point at resolution 1/dense_steps, filters by
    cost <= budget, and returns the smallest objective seen. Guarded by
    ``max_evals``; a larger request raises SearchSpaceError with the count.

    Against a smooth optimum the grid value sits above the true minimum by
    about c/dense_steps, where c bounds how fast the objective moves per
    unit of coordinate quantization; entropy slopes stay below ~2 bits on
    the interior region where these optima live, and the feasibility
    quantization contributes |dR/dB| * step. The acceptance suite pins the
    documented slack 1e-2 at dense_steps = 64 on the binary instance.
    """
    if budget < 0.0:
        raise DomainError(f"budget must be >= 0, got {budget!r}")
    causal = _parse_mode(mode)
    if v_size is None:
        v_size = spec.s_size + 2
    n_axes = 1 if causal else spec.s_size
    n = _simplex_grid_size(v_size, dense_steps)
    total = _policy_count(spec, v_size) * (n**n_axes)
    if total > max_evals:
        raise SearchSpaceError(total, max_evals, "oracle enumeration")
    grid = _simplex_grid(v_size, dense_steps)
    dtype = np.float32 if total > _F32_THRESHOLD else np.float64
    best = {"obj": np.inf, "policy_id": -1, "combo": -1}

    for policy_id, policy in enumerate(_policies(spec, v_size)):

        def consume(cost, obj, combos, _p=policy_id):
            feas = cost <= budget + _FEAS_EPS
            if not np.any(feas):
                return
            sub = np.flatnonzero(feas)
            k = sub[int(np.argmin(obj[sub]))]
            if obj[k] < best["obj"]:
                best.update(obj=float(obj[k]), policy_id=_p, combo=int(combos[k]))

        _sweep_tiles(spec, policy, grid, causal, dtype, consume)

    meta = {"oracle": True, "dense_steps": dense_steps, "v_size": v_size,
            "evaluations": total, "mode": mode}
    if best["policy_id"] < 0:
        return RateCostPoint(budget=float(budget), rate=np.inf, cost=np.inf,
                             feasible=False, metadata=meta)
    policy = _policies(spec, v_size)[best["policy_id"]]
    rows = _combo_rows(grid, best["combo"], n_axes)
    value, cost = _eval_reference(spec, policy, rows, causal)
    return RateCostPoint(
        budget=float(budget), rate=value, cost=cost,
        argmin=_make_aux(policy, rows, causal), solved_rate=value, metadata=meta,
    )


# ---------------------------------------------------------------------------
# Lossy causal solve (exact objective I(Y; Yhat | V, Z))
# ---------------------------------------------------------------------------


def _ba_rd_lagrangian(p_y: np.ndarray, d: np.ndarray, beta: np.ndarray, config):
    """Blahut iteration for min I(Y;Yhat) + beta * E[d], one problem per slope.

    Vectorized over leading axes of ``p_y`` (..., y) and slopes ``beta``
    (nats per distortion unit). Returns (rate_bits, distortion,
    q_cond[..., y, yhat]); rate and distortion are recomputed exactly from
    the final kernel, so they reproduce under re-evaluation.
    """
    lead = p_y.shape[:-1]
    yhat_size = d.shape[1]
    w = np.exp(-beta[..., None, None] * d)  # (..., y, yhat)
    q_out = np.full(lead + (yhat_size,), 1.0 / yhat_size)
    p = p_y[..., None]
    q_cond = np.broadcast_to(q_out[..., None, :], lead + d.shape)
    prev_rate = None
    for _ in range(config.ba_max_iter):
        scores = q_out[..., None, :] * w
        denom = scores.sum(axis=-1, keepdims=True)
        np.clip(denom, 1e-300, None, out=denom)
        q_cond = scores / denom
        q_out = (p * q_cond).sum(axis=-2)
        rate = _mi_of_kernel(p, q_cond, q_out)
        if prev_rate is not None and np.all(np.abs(rate - prev_rate) < config.ba_tol):
            break
        prev_rate = rate
    q_out = (p * q_cond).sum(axis=-2)
    rate = _mi_of_kernel(p, q_cond, q_out)
    dist = (p * q_cond * d).sum(axis=(-1, -2))
    return rate, dist, q_cond


def _mi_of_kernel(p, q_cond, q_out):
    """Exact I(Y;Yhat) in bits for joint p(y) * q(yhat|y), given the marginal."""
    with np.errstate(divide="ignore", invalid="ignore"):
        logterm = np.log(q_cond / q_out[..., None, :])
    np.nan_to_num(logterm, copy=False, nan=0.0, posinf=0.0, neginf=0.0)
    return np.maximum((p * q_cond * logterm).sum(axis=(-1, -2)) / _LN2, 0.0)


def _lossy_cells(spec, policy):
    """Per-(v,z) output laws p(y|v,z) and the (v,z) support mask.

    In the causal pattern V is independent of (S, Z), so these laws do not
    depend on p(v); candidates only reweight them.
    """
    s_size = spec.s_size
    t = spec.channel[policy, np.arange(s_size)[:, None], :]  # (s, v, y)
    p_z = spec.side_info_marginal
    with np.errstate(invalid="ignore"):
        p_s_given_z = np.where(
            p_z[None, :] > 0.0, spec.state_joint / np.where(p_z == 0.0, 1.0, p_z)[None, :], 0.0
        )  # (s, z)
    p_y_vz = np.einsum("sz,svy->vzy", p_s_given_z, t)  # (v, z, y)
    return p_y_vz, p_z


def solve_lossy_causal(
    spec: ProblemSpec,
    budget: float,
    distortion_budget: float,
    config: SolveConfig | None = None,
) -> RateCostPoint:
    """Minimize I(Y; Yhat | V, Z) subject to cost and distortion budgets.

    Outer search as in solve_causal; the inner reconstruction problem
    decomposes per (v, z) cell (the cells' output laws do not depend on
    p(v) in the causal pattern), coupled only through the shared distortion
    budget, so it is solved by Blahut iterations on a common multiplier
    grid, with exact multiplier bisection re-run on the winner. A zero-rate
    anchor (best constant reconstruction per cell) handles the slope-0 end
    exactly. Infeasible (budget, distortion) pairs return a typed
    infeasible point rather than raising.
    """
    if budget < 0.0:
        raise DomainError(f"budget must be >= 0, got {budget!r}")
    if distortion_budget < 0.0:
        raise DomainError(f"distortion budget must be >= 0, got {distortion_budget!r}")
    if spec.distortion is None:
        raise UsageError("spec has no distortion table; lossless solves apply")
    config = config or SolveConfig()
    d_table = spec.distortion
    v_max = config.resolved_v_max(spec)
    p_z = spec.side_info_marginal
    lam_sa = reduced_cost(spec)
    p_s = spec.state_marginal

    total = sum(
        _policy_count(spec, v) * _simplex_grid_size(v, config.grid_steps)
        for v in range(1, v_max + 1)
    )
    if total * config.lambda_grid > config.search_limit:
        raise SearchSpaceError(total * config.lambda_grid, config.search_limit,
                               "lossy sweep")

    betas = np.concatenate(
        [[0.0], np.geomspace(1e-3, config.lambda_max, config.lambda_grid - 1)]
    ) * _LN2  # slopes in nats; index 0 is the exact zero-rate anchor

    best = {
        "rate": np.inf, "policy": None, "rows": None, "cost": np.inf,
        "capped_floor": np.inf,
    }
    any_cost_feasible = False

    for v_size in range(1, v_max + 1):
        grid = _simplex_grid(v_size, config.grid_steps)
        for policy in _policies(spec, v_size):
            p_y_vz, _ = _lossy_cells(spec, policy)  # (v, z, y)
            cells = p_y_vz.reshape(-1, spec.y_size)  # (v*z, y)
            rate_k, dist_k, _ = _ba_rd_lagrangian(
                cells[:, None, :], d_table, np.broadcast_to(betas, (len(cells), len(betas))),
                config,
            )  # (cells, K)
            # exact zero-rate anchor: best constant yhat per cell
            rate_k[:, 0] = 0.0
            dist_k[:, 0] = (cells[:, :, None] * d_table[None, :, :]).sum(1).min(axis=1)
            cost_v = np.einsum("s,sv->v", p_s, lam_sa[np.arange(spec.s_size)[:, None], policy])
            w = (grid[:, :, None] * p_z[None, None, :]).reshape(len(grid), -1)  # (n, cells)
            cand_cost = grid @ cost_v
            feas_cost = cand_cost <= budget + _FEAS_EPS
            if not np.any(feas_cost):
                continue
            any_cost_feasible = True
            dists = w[feas_cost] @ dist_k  # (n_feas, K)
            rates = w[feas_cost] @ rate_k
            ok = dists <= distortion_budget + _FEAS_EPS
            has_k = ok.any(axis=1)
            if np.any(has_k):
                first_k = np.argmax(ok, axis=1)
                sub = np.flatnonzero(has_k)
                cand_rates = rates[sub, first_k[sub]]
                j = int(np.argmin(cand_rates))
                if cand_rates[j] < best["rate"]:
                    rows_idx = np.flatnonzero(feas_cost)[sub[j]]
                    best.update(
                        rate=float(cand_rates[j]), policy=policy,
                        rows=grid[rows_idx][None, :], cost=float(cand_cost[rows_idx]),
                    )
            # candidates that even the capped multiplier cannot resolve
            capped = np.flatnonzero(~has_k)
            if len(capped):
                d_floor = w[feas_cost][capped] @ dist_k[:, -1]
                reachable = d_floor <= distortion_budget + 1e-9
                if np.any(reachable):
                    floor = float(rates[capped[reachable], -1].min())
                    best["capped_floor"] = min(best["capped_floor"], floor)

    meta = {
        "mode": "lossy-causal", "grid_steps": config.grid_steps,
        "refine_rounds": config.refine_rounds, "v_size_max": v_max,
        "lambda_max": config.lambda_max, "lambda_grid": config.lambda_grid,
    }
    if best["policy"] is None:
        meta["reason"] = (
            "no action choice meets the cost budget" if not any_cost_feasible
            else "distortion budget below the achievable floor"
        )
        return RateCostPoint(
            budget=float(budget), rate=np.inf, cost=np.inf, feasible=False,
            distortion=float(distortion_budget), metadata=meta,
        )
    if best["capped_floor"] < best["rate"] - 1e-12:
        raise IntegrityError(
            "a candidate needs a distortion multiplier above lambda_max "
            f"({config.lambda_max}) and could beat the incumbent; raise lambda_max"
        )

    # Refinement ranks candidates on the shared multiplier grid (the cells,
    # and hence the per-cell curves, do not depend on p(v)); only the final
    # winner pays for an exact multiplier bisection.
    win_policy = best["policy"]
    p_y_vz, _ = _lossy_cells(spec, win_policy)
    cells = p_y_vz.reshape(-1, spec.y_size)
    rate_k, dist_k, _ = _ba_rd_lagrangian(
        cells[:, None, :], d_table,
        np.broadcast_to(betas, (len(cells), len(betas))), config,
    )
    rate_k[:, 0] = 0.0
    dist_k[:, 0] = (cells[:, :, None] * d_table[None, :, :]).sum(1).min(axis=1)
    cost_v = np.einsum(
        "s,sv->v", p_s, lam_sa[np.arange(spec.s_size)[:, None], win_policy]
    )

    def evaluate(rows):
        w = (rows[0][:, None] * p_z[None, :]).reshape(-1)
        dists = w @ dist_k
        ok = np.flatnonzero(dists <= distortion_budget + _FEAS_EPS)
        if not len(ok):
            return np.inf, float(rows[0] @ cost_v)
        return float((w @ rate_k)[ok[0]]), float(rows[0] @ cost_v)

    rows, value, cost = _refine(best["rows"], budget, config, evaluate)
    value, cost, recon = _lossy_exact_value(
        spec, best["policy"], rows[0], distortion_budget, config
    )
    aux = AuxiliaryChoice(
        policy=ActionPolicy(best["policy"]), v_marginal=rows[0], recon=recon
    )
    meta["v_size"] = int(best["policy"].shape[1])
    return RateCostPoint(
        budget=float(budget), rate=value, cost=cost, feasible=True,
        distortion=float(distortion_budget), argmin=aux, solved_rate=value,
        metadata=meta,
    )


def _exact_rd_mixture(cells, w, d_table, distortion_budget, config) -> float:
    """Exact common-multiplier bisection for one weighted mixture of
    reconstruction cells; the rate-only core of the winner re-solve."""

    def solve_at(beta: float):
        rate_c, dist_c, _ = _ba_rd_lagrangian(
            cells, d_table, np.full(len(cells), beta), config
        )
        return float(w @ rate_c), float(w @ dist_c)

    d0 = float(w @ (cells[:, :, None] * d_table[None, :, :]).sum(1).min(axis=1))
    if d0 <= distortion_budget + _FEAS_EPS:
        return 0.0
    beta_hi = config.lambda_max * _LN2
    rate_hi, dist_hi = solve_at(beta_hi)
    if dist_hi > distortion_budget + 1e-9:
        raise IntegrityError(
            f"distortion {distortion_budget} unreachable at "
            f"lambda_max={config.lambda_max}"
        )
    lo, hi = 0.0, beta_hi
    rate_best = rate_hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        rate_m, dist_m = solve_at(mid)
        if dist_m <= distortion_budget + _FEAS_EPS:
            hi = mid
            rate_best = rate_m
        else:
            lo = mid
    return rate_best


def _lossy_exact_value(spec, policy, r, distortion_budget, config):
    """Exact-bisection inner solve for one causal candidate.

    Returns (rate, cost, recon kernel (y, v, z, yhat)).
    """
    p_z = spec.side_info_marginal
    p_y_vz, _ = _lossy_cells(spec, policy)
    v_size = policy.shape[1]
    cells = p_y_vz.reshape(-1, spec.y_size)
    w = (r[:, None] * p_z[None, :]).reshape(-1)
    d_table = spec.distortion
    lam_sa = reduced_cost(spec)
    cost = float(
        r @ np.einsum("s,sv->v", spec.state_marginal,
                      lam_sa[np.arange(spec.s_size)[:, None], policy])
    )

    def solve_at(beta: float):
        rate_c, dist_c, q = _ba_rd_lagrangian(
            cells, d_table, np.full(len(cells), beta), config
        )
        return float(w @ rate_c), float(w @ dist_c), q

    # zero-rate anchor
    d0_cells = (cells[:, :, None] * d_table[None, :, :]).sum(1)
    best_const = d0_cells.argmin(axis=1)
    d0 = float(w @ d0_cells[np.arange(len(cells)), best_const])
    if d0 <= distortion_budget + _FEAS_EPS:
        q0 = np.zeros((len(cells), spec.y_size, d_table.shape[1]))
        q0[np.arange(len(cells)), :, best_const] = 1.0
        recon = _cells_to_recon(q0, v_size, spec)
        return 0.0, cost, recon
    beta_hi = config.lambda_max * _LN2
    rate_hi, dist_hi, q_hi = solve_at(beta_hi)
    if dist_hi > distortion_budget + 1e-9:
        raise IntegrityError(
            f"distortion {distortion_budget} unreachable at lambda_max={config.lambda_max}"
        )
    lo, hi = 0.0, beta_hi
    q_best, rate_best = q_hi, rate_hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        rate_m, dist_m, q_m = solve_at(mid)
        if dist_m <= distortion_budget + _FEAS_EPS:
            hi = mid
            q_best, rate_best = q_m, rate_m
        else:
            lo = mid
    recon = _cells_to_recon(q_best, v_size, spec)
    return float(rate_best), cost, recon


def _cells_to_recon(q_cells, v_size, spec):
    """(v*z, y, yhat) cell kernels -> recon array indexed (y, v, z, yhat)."""
    z_size = spec.z_size
    q = q_cells.reshape(v_size, z_size, spec.y_size, -1)
    return np.ascontiguousarray(np.transpose(q, (2, 0, 1, 3)))


# ---------------------------------------------------------------------------
# Lossy upper bounds (non-causal V, decoder-side descriptions)
# ---------------------------------------------------------------------------


def _entropy_nd(arr) -> float:
    return entropy_bits(np.asarray(arr).reshape(-1))


def _noncausal_candidates(spec, config):
    """Yield (policy, rows, base p(z,v,y), I(V;S|Z), cost) for the outer grid."""
    v_max = config.resolved_v_max(spec)
    p_s = spec.state_marginal
    lam = reduced_cost(spec)
    h_z = entropy_bits(spec.side_info_marginal)
    for v_size in range(1, v_max + 1):
        grid = _simplex_grid(v_size, config.grid_steps)
        n = len(grid)
        h_rows = -xlogy(grid, grid).sum(axis=1) / _LN2
        for policy in _policies(spec, v_size):
            t = spec.channel[policy, np.arange(spec.s_size)[:, None], :]
            for combo in range(n**spec.s_size):
                rows = _combo_rows(grid, combo, spec.s_size)
                p_zsvy = (
                    spec.state_joint.T[:, :, None, None]
                    * rows[None, :, :, None]
                    * t[None, :, :, :]
                )  # (z, s, v, y)
                p_zvy = p_zsvy.sum(axis=1)
                p_zv = p_zvy.sum(axis=2)
                # I(V;S|Z) = H(V|Z) - H(V|S): V indep of Z given S
                h_v_z = _entropy_nd(p_zv) - h_z
                h_v_s = float(p_s @ (-xlogy(rows, rows).sum(axis=1) / _LN2))
                i_vs_z = max(0.0, h_v_z - h_v_s)
                cost = float(
                    np.einsum(
                        "sv,s,sv->", rows, p_s,
                        lam[np.arange(spec.s_size)[:, None], policy],
                    )
                )
                yield policy, rows, p_zvy, i_vs_z, cost


def evaluate_lossy_bounds(
    spec: ProblemSpec,
    budget: float,
    distortion_budget: float,
    config: SolveConfig | None = None,
) -> list[dict]:
    """Three achievable upper bounds for the non-causal lossy problem.

    Returns one entry per scheme, each {"label", "value", "feasible",
    "argmin"}; values are upper bounds on the rate-distortion-cost
    function, never claimed tight:

      si-both:      encoder also sees Z; inner reconstruction kernel
                    p(yhat|y,v,z) solved per cell by Blahut iterations.
      si-decoder:   description U drawn from Y alone, reconstruction
                    yhat(z, u); the map is chosen as the per-(z,u)
                    distortion argmin, exact because the rate does not
                    depend on it.
      si-decoder-v: U drawn from (Y, V); requires the decoder to recover V,
                    feasible only when I(V;S) <= I(V;Y).

    Infeasible schemes report value = inf and feasible = False.
    """
    if spec.distortion is None:
        raise UsageError("spec has no distortion table")
    if budget < 0.0 or distortion_budget < 0.0:
        raise DomainError("budget and distortion budget must be >= 0")
    config = config or SolveConfig()
    v_max = config.resolved_v_max(spec)
    u_max = config.resolved_u_max(spec)
    outer = sum(
        _policy_count(spec, v) * _simplex_grid_size(v, config.grid_steps) ** spec.s_size
        for v in range(1, v_max + 1)
    )
    u_inner = sum(
        _simplex_grid_size(u, config.grid_steps) ** spec.y_size
        for u in range(1, u_max + 1)
    )
    uv_inner = sum(
        _simplex_grid_size(u, config.grid_steps) ** (spec.y_size * v_max)
        for u in range(1, u_max + 1)
    )
    required = 64 * outer * (config.lambda_grid + u_inner + uv_inner)
    if required > config.search_limit:
        raise SearchSpaceError(required, config.search_limit, "lossy bound sweep")

    d_table = spec.distortion
    betas = np.concatenate(
        [[0.0], np.geomspace(1e-3, config.lambda_max, config.lambda_grid - 1)]
    ) * _LN2

    best = {
        "si-both": (np.inf, None),
        "si-decoder": (np.inf, None),
        "si-decoder-v": (np.inf, None),
    }
    sib_winner = None  # (cells, weights, I(V;S|Z)) of the si-both incumbent
    u_grids: dict[int, list[np.ndarray]] = {}

    def u_kernels(n_rows: int):
        """All row-stochastic (n_rows, u) kernels on the simplex grid."""
        key = n_rows
        if key not in u_grids:
            kernels = []
            for u_size in range(1, u_max + 1):
                g = _simplex_grid(u_size, config.grid_steps)
                for combo in itertools.product(range(len(g)), repeat=n_rows):
                    kernels.append(np.array([g[i] for i in combo]))
            u_grids[key] = kernels
        return u_grids[key]

    p_z = spec.side_info_marginal

    for policy, rows, p_zvy, i_vs_z, cost in _noncausal_candidates(spec, config):
        if cost > budget + _FEAS_EPS:
            continue
        v_size = policy.shape[1]
        p_vz = p_zvy.sum(axis=2).T  # (v, z)
        with np.errstate(invalid="ignore"):
            p_y_cells = np.where(
                p_vz.reshape(-1)[:, None] > 0.0,
                np.transpose(p_zvy, (1, 0, 2)).reshape(-1, spec.y_size)
                / np.where(p_vz.reshape(-1) == 0.0, 1.0, p_vz.reshape(-1))[:, None],
                0.0,
            )
        w = p_vz.reshape(-1)

        # si-both: per-cell reconstruction with a shared multiplier grid
        rate_k, dist_k, _ = _ba_rd_lagrangian(
            p_y_cells[:, None, :], d_table,
            np.broadcast_to(betas, (len(w), len(betas))), config,
        )
        rate_k[:, 0] = 0.0
        dist_k[:, 0] = (p_y_cells[:, :, None] * d_table[None, :, :]).sum(1).min(axis=1)
        dists = w @ dist_k
        ok = np.flatnonzero(dists <= distortion_budget + _FEAS_EPS)
        if len(ok):
            val = i_vs_z + float((w @ rate_k)[ok[0]])
            if val < best["si-both"][0]:
                best["si-both"] = (val, _make_aux(policy, rows, False))
                sib_winner = (p_y_cells, w, i_vs_z)

        # decoder-side descriptions
        p_vy = p_zvy.sum(axis=0)  # (v, y)
        p_y = p_vy.sum(axis=0)
        for u_k in u_kernels(spec.y_size):
            bound_u = _decoder_bound(
                spec, p_zvy, p_z, u_k[None, :, :].repeat(v_size, axis=0),
                i_vs_z, d_table, distortion_budget,
            )
            if bound_u is not None and bound_u < best["si-decoder"][0]:
                best["si-decoder"] = (bound_u, _make_aux(policy, rows, False))

        # v-aware: u kernel may differ per v; feasibility I(V;S) <= I(V;Y)
        h_v = _entropy_nd(p_vy.sum(axis=1))
        i_vs = max(0.0, h_v - float(
            spec.state_marginal @ (-xlogy(rows, rows).sum(axis=1) / _LN2)
        ))
        i_vy = max(0.0, h_v + _entropy_nd(p_y) - _entropy_nd(p_vy))
        if i_vs <= i_vy + 1e-10:
            for u_k in u_kernels(spec.y_size * v_size):
                kern = u_k.reshape(v_size, spec.y_size, -1)
                bound_uv = _decoder_bound(
                    spec, p_zvy, p_z, kern, i_vs_z, d_table, distortion_budget
                )
                if bound_uv is not None and bound_uv < best["si-decoder-v"][0]:
                    best["si-decoder-v"] = (bound_uv, _make_aux(policy, rows, False))

    # the shared multiplier grid is coarse; re-solve the winning candidate's
    # inner problem by exact bisection, as the lossy solver does
    if sib_winner is not None:
        cells_w, w_w, i_w = sib_winner
        exact = i_w + _exact_rd_mixture(
            cells_w, w_w, d_table, distortion_budget, config
        )
        if exact < best["si-both"][0]:
            best["si-both"] = (exact, best["si-both"][1])

    out = []
    for label in ("si-both", "si-decoder", "si-decoder-v"):
        val, aux = best[label]
        out.append(
            {
                "label": label,
                "value": float(val),
                "feasible": bool(np.isfinite(val)),
                "argmin": aux,
                "u_size_max": u_max,
            }
        )
    return out


def _decoder_bound(spec, p_zvy, p_z, u_kern_vyu, i_vs_z, d_table, distortion_budget):
    """I(V;S|Z) + I(U;Y|V,Z) for one description kernel, or None if infeasible.

    ``u_kern_vyu`` has shape (v, y, u): the per-v description law (rows
    repeat over v for the U-from-Y-alone scheme). Reconstruction is the
    per-(z, u) distortion argmin.
    """
    p_zvyu = p_zvy[:, :, :, None] * u_kern_vyu[None, :, :, :]  # (z, v, y, u)
    h_u_vz = _entropy_nd(p_zvyu.sum(axis=2)) - _entropy_nd(p_zvyu.sum(axis=(2, 3)))
    h_u_yvz = _entropy_nd(p_zvyu) - _entropy_nd(p_zvy)
    i_uy_vz = max(0.0, h_u_vz - h_u_yvz)
    # distortion of the best deterministic map yhat(z, u)
    p_zuy = p_zvyu.sum(axis=1).transpose(0, 2, 1)  # (z, u, y)
    d_zu = np.einsum("zuy,yh->zuh", p_zuy, d_table).min(axis=2).sum()
    if d_zu > distortion_budget + _FEAS_EPS:
        return None
    return i_vs_z + i_uy_vz


# ---------------------------------------------------------------------------
# Curves and envelopes
# ---------------------------------------------------------------------------


def lower_convex_envelope(budgets: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """Greatest convex minorant of the points, evaluated at each budget."""
    budgets = np.asarray(budgets, dtype=np.float64)
    rates = np.asarray(rates, dtype=np.float64)
    if len(budgets) <= 2:
        return rates.copy()
    hull_x = [budgets[0]]
    hull_y = [rates[0]]
    for x, y in zip(budgets[1:], rates[1:]):
        hull_x.append(x)
        hull_y.append(y)
        while len(hull_x) >= 3:
            x0, x1, x2 = hull_x[-3], hull_x[-2], hull_x[-1]
            y0, y1, y2 = hull_y[-3], hull_y[-2], hull_y[-1]
            if (y1 - y0) * (x2 - x1) <= (y2 - y1) * (x1 - x0):
                break
            del hull_x[-2], hull_y[-2]
    return np.interp(budgets, hull_x, hull_y)


def trace_curve(
    spec: ProblemSpec,
    budgets,
    mode: str = "noncausal",
    config: SolveConfig | None = None,
    distortion_budget: float | None = None,
) -> RateCurve:
    """Solve a strictly increasing budget list and convexify the result.

    Feasible-set growth makes the true curve non-increasing and convex;
    solved points are first made non-increasing by carrying a better
    earlier argmin forward (always feasible later), then replaced by their
    lower convex envelope (achievable by time sharing). Points whose
    envelope value differs from their own solve keep it in
    ``solved_rate``. Infeasible budgets yield flagged points excluded from
    the envelope.
    """
    budgets = [float(b) for b in budgets]
    if any(b2 <= b1 for b1, b2 in zip(budgets, budgets[1:])):
        raise UsageError("budgets must be strictly increasing")
    config = config or SolveConfig()
    if mode == "lossy-causal":
        if distortion_budget is None:
            raise UsageError("lossy-causal curves need a distortion budget")
        points = [
            solve_lossy_causal(spec, b, distortion_budget, config) for b in budgets
        ]
    else:
        causal = _parse_mode(mode)
        points = [
            _solve_lossless(spec, b, causal=causal, config=config) for b in budgets
        ]

    # enforce monotone non-increase by carrying better argmins forward
    carried: list[RateCostPoint] = []
    best_so_far: RateCostPoint | None = None
    for pt in points:
        if pt.feasible and (best_so_far is None or pt.rate < best_so_far.rate):
            best_so_far = pt
        if best_so_far is not None and pt.feasible and best_so_far.rate < pt.rate:
            pt = replace(
                pt, rate=best_so_far.rate, cost=best_so_far.cost,
                argmin=best_so_far.argmin, solved_rate=best_so_far.rate,
            )
        carried.append(pt)

    feas_idx = [i for i, pt in enumerate(carried) if pt.feasible]
    if len(feas_idx) >= 2:
        bs = np.array([carried[i].budget for i in feas_idx])
        rs = np.array([carried[i].rate for i in feas_idx])
        env = lower_convex_envelope(bs, rs)
        for j, i in enumerate(feas_idx):
            carried[i] = replace(carried[i], rate=float(env[j]))
    return RateCurve(
        points=tuple(carried),
        mode=mode,
        envelope_applied=True,
        metadata={"grid_steps": config.grid_steps,
                  "refine_rounds": config.refine_rounds,
                  "distortion_budget": distortion_budget},
    )
