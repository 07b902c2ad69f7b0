"""Closed forms for the canonical binary instance.

The instance: a uniform binary state S, a binary flip action A with
per-use cost E[A] <= B, and output Y = S xor A xor N where N ~ Bern(p),
p < 1/2. The decoder may have no side information, or an erased copy of S
(Z = S with prob 1 - pe, an erasure otherwise).

The non-causal rate-cost function has a kink at a budget ``bstar(p)``: below
it the curve is the tangent line through (0, 1), above it the curve is
1 - H2(B) + H2(p). The causal curve time-shares between "do nothing" and
"freeze the channel input", giving the line 2*B*H2(p) + (1 - 2*B) up to
B = 1/2 and the flat H2(p) after.

Both curves are also reachable through an explicit two-parameter family of
strategies (mixing weight theta, conditional flip probability delta);
``parametric_min_noncausal`` / ``parametric_min_causal`` minimize over that
family directly and are used as an independent check of the closed forms
and of the general solver.
"""

import numpy as np

from .errors import DomainError, IntegrityError
from .kernel import binary_entropy, binary_entropy_derivative
from .model import ActionPolicy, AuxiliaryChoice, ProblemSpec

__all__ = [
    "bstar",
    "rate_noncausal_binary",
    "rate_causal_binary",
    "rate_erased_noncausal",
    "rate_erased_causal",
    "parametric_min_noncausal",
    "parametric_min_causal",
    "make_binary_example",
    "binary_structured_aux",
    "binary_timeshare_aux",
]

# bstar bisection: bracket inset, interval tolerance, residual guard.
_BSTAR_INSET = 1e-12
_BSTAR_XTOL = 1e-12
_BSTAR_RESIDUAL = 1e-9


def _check_p(p: float, allow_zero: bool) -> float:
    p = float(p)
    lo_ok = (p >= 0.0) if allow_zero else (p > 0.0)
    if not (lo_ok and p < 0.5):
        rng = "[0, 0.5)" if allow_zero else "(0, 0.5)"
        raise DomainError(f"noise level p must be in {rng}, got {p!r}")
    return p


def bstar(p: float) -> float:
    """Kink budget: the b in (p, 1/2) where (H2(b) - H2(p))/b equals H2'(b).

    Solved by bisection on g(b) = H2(b) - H2(p) - b * H2'(b), which is
    negative near p and positive near 1/2; the returned root satisfies
    |g| < 1e-9.
    """
    p = _check_p(p, allow_zero=False)
    lo = p + _BSTAR_INSET
    hi = 0.5 - _BSTAR_INSET

    def g(b: float) -> float:
        return binary_entropy(b) - binary_entropy(p) - b * binary_entropy_derivative(b)

    glo, ghi = g(lo), g(hi)
    if not (glo < 0.0 < ghi):
        raise IntegrityError(
            f"no sign change on bracket ({lo:g}, {hi:g}): g={glo:g}, {ghi:g}"
        )
    while hi - lo > _BSTAR_XTOL:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    resid = g(root)
    if abs(resid) > _BSTAR_RESIDUAL:
        raise IntegrityError(f"bstar residual {resid:.3e} above {_BSTAR_RESIDUAL:g}")
    return root


def rate_noncausal_binary(budget: float, p: float) -> float:
    """Non-causal rate-cost value R(B) for the binary instance.

    Piecewise: the tangent line 1 - B*(H2(b*) - H2(p))/b* for B < b*, and
    1 - H2(B) + H2(p) for b* <= B <= 1/2. At p = 0 the kink degenerates to
    the origin and the second branch covers everything.
    """
    p = _check_p(p, allow_zero=True)
    b = float(budget)
    if not 0.0 <= b <= 0.5:
        raise DomainError(f"budget must be in [0, 0.5], got {budget!r}")
    if p == 0.0:
        return 1.0 - binary_entropy(b)
    bs = bstar(p)
    if b < bs:
        slope = (binary_entropy(bs) - binary_entropy(p)) / bs
        return 1.0 - b * slope
    return 1.0 - binary_entropy(b) + binary_entropy(p)


def rate_causal_binary(budget: float, p: float) -> float:
    """Causal rate-cost value: 2B*H2(p) + (1 - 2B) up to B = 1/2, then flat."""
    p = _check_p(p, allow_zero=True)
    b = float(budget)
    if b < 0.0:
        raise DomainError(f"budget must be >= 0, got {budget!r}")
    h = binary_entropy(p)
    if b >= 0.5:
        return h
    return 2.0 * b * h + (1.0 - 2.0 * b)


def _check_pe(pe: float) -> float:
    pe = float(pe)
    if not 0.0 <= pe <= 1.0:
        raise DomainError(f"erasure probability must be in [0, 1], got {pe!r}")
    return pe


def rate_erased_noncausal(budget: float, p: float, pe: float) -> float:
    """Erased side information: pe * R_no_side_info(B) + (1 - pe) * H2(p).

    When Z reveals S the state-description term vanishes and the output
    term is the noise entropy; when Z is erased the problem reduces to the
    no-side-information one with the same budget.
    """
    pe = _check_pe(pe)
    return pe * rate_noncausal_binary(budget, p) + (1.0 - pe) * binary_entropy(p)


def rate_erased_causal(budget: float, p: float, pe: float) -> float:
    """Causal version of the erased-side-information mixture."""
    pe = _check_pe(pe)
    return pe * rate_causal_binary(budget, p) + (1.0 - pe) * binary_entropy(p)


# Parametric family: dense grid pitch and golden-section settings.
_DELTA_GRID = 1e-4
_GOLDEN_TOL = 1e-12
_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, lo: float, hi: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > _GOLDEN_TOL:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def parametric_min_noncausal(
    budget: float, p: float, grid: int = 200
) -> tuple[float, float, float]:
    """Minimize the structured-family objective; returns (value, theta, delta).

    The family: with weight theta the encoder describes a flip decision that
    disagrees with the state with probability delta (cost theta * delta),
    with weight 1 - theta it freezes the action; the objective is
    theta * (H2(p) - H2(delta)) + 1 subject to theta * delta <= budget.

    Minimization runs a coarse 2-D grid over (theta, delta) plus the exact
    1-D reduction theta = budget/delta over delta in [budget, 1/2], refined
    by golden section; the best of the two is returned.
    """
    p = _check_p(p, allow_zero=True)
    b = float(budget)
    if not 0.0 <= b <= 0.5:
        raise DomainError(f"budget must be in [0, 0.5], got {budget!r}")
    h_p = binary_entropy(p)
    if b == 0.0:
        return 1.0, 0.0, 0.0

    def objective(theta: float, delta: float) -> float:
        return theta * (h_p - binary_entropy(delta)) + 1.0

    # Coarse feasible 2-D grid.
    thetas = np.linspace(0.0, 1.0, grid + 1)
    deltas = np.linspace(0.0, 0.5, grid + 1)
    h_d = np.array([binary_entropy(d) for d in deltas])
    vals = thetas[:, None] * (h_p - h_d)[None, :] + 1.0
    vals[thetas[:, None] * deltas[None, :] > b] = np.inf
    it, idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
    best = (float(vals[it, idx]), float(thetas[it]), float(deltas[idx]))

    # Exact 1-D reduction on the budget-active boundary.
    def reduced(delta: float) -> float:
        return (b / delta) * (h_p - binary_entropy(delta)) + 1.0

    lo = max(b, _DELTA_GRID)
    if lo < 0.5:
        d_grid = np.arange(lo, 0.5 + _DELTA_GRID, _DELTA_GRID)
        d_grid = d_grid[d_grid <= 0.5]
        r_vals = [reduced(d) for d in d_grid]
        k = int(np.argmin(r_vals))
        d_lo = d_grid[max(0, k - 1)]
        d_hi = d_grid[min(len(d_grid) - 1, k + 1)]
        d_ref, v_ref = _golden_min(reduced, float(d_lo), float(d_hi))
        for d_cand, v_cand in ((d_ref, v_ref), (float(d_grid[k]), float(r_vals[k]))):
            if v_cand < best[0]:
                best = (v_cand, min(1.0, b / d_cand), d_cand)
    # theta = 1, delta = budget sits on both boundaries; include it exactly.
    v_edge = objective(1.0, b)
    if v_edge < best[0]:
        best = (v_edge, 1.0, b)
    return best


def parametric_min_causal(budget: float, p: float) -> tuple[float, float]:
    """Causal structured family: best mixing weight and its value.

    The weight-theta strategy pays theta/2 in expected cost and achieves
    theta * H2(p) + (1 - theta), decreasing in theta, so the optimum is
    theta = min(1, 2B). Returns (value, theta).
    """
    p = _check_p(p, allow_zero=True)
    b = float(budget)
    if b < 0.0:
        raise DomainError(f"budget must be >= 0, got {budget!r}")
    theta = min(1.0, 2.0 * b)
    return theta * binary_entropy(p) + (1.0 - theta), theta


def make_binary_example(
    p: float, pe: float | None = None, with_distortion: bool = False
) -> ProblemSpec:
    """Build the binary instance as a ProblemSpec.

    ``pe`` adds an erased side-information axis Z in {0, 1, erased}; without
    it Z is the trivial singleton. ``with_distortion`` attaches a Hamming
    distortion on a binary reconstruction alphabet.
    """
    p = _check_p(p, allow_zero=True)
    if pe is None:
        state_joint = np.array([[0.5], [0.5]])
    else:
        pe = _check_pe(pe)
        # z axis: 0, 1, erased
        state_joint = np.array(
            [
                [0.5 * (1.0 - pe), 0.0, 0.5 * pe],
                [0.0, 0.5 * (1.0 - pe), 0.5 * pe],
            ]
        )
    channel = np.empty((2, 2, 2))
    for a in range(2):
        for s in range(2):
            clean = a ^ s
            channel[a, s, clean] = 1.0 - p
            channel[a, s, 1 - clean] = p
    cost = np.zeros((2, 2, 2))
    cost[1, :, :] = 1.0
    distortion = None
    if with_distortion:
        distortion = np.array([[0.0, 1.0], [1.0, 0.0]])
    return ProblemSpec(
        state_joint=state_joint, channel=channel, cost=cost, distortion=distortion
    )


def binary_structured_aux(theta: float, delta: float) -> AuxiliaryChoice:
    """Non-causal structured strategy for the binary instance.

    V in {0, 1, 2}: v = 0 copies the state into the action, v = 1 flips it,
    v = 2 freezes the action at 0. P(V in {0,1}) = theta split evenly, and
    the state disagrees with the described bit with probability delta.
    Expected cost is theta * delta.
    """
    theta = float(theta)
    delta = float(delta)
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta must be in [0, 1], got {theta!r}")
    if not 0.0 <= delta <= 0.5:
        raise DomainError(f"delta must be in [0, 0.5], got {delta!r}")
    policy = ActionPolicy(np.array([[0, 1, 0], [1, 0, 0]]))
    v_given_s = np.array(
        [
            [theta * (1.0 - delta), theta * delta, 1.0 - theta],
            [theta * delta, theta * (1.0 - delta), 1.0 - theta],
        ]
    )
    return AuxiliaryChoice(policy=policy, v_given_s=v_given_s)


def binary_timeshare_aux(theta: float) -> AuxiliaryChoice:
    """Causal strategy: with weight theta copy the state, else freeze at 0."""
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta must be in [0, 1], got {theta!r}")
    policy = ActionPolicy(np.array([[0, 0], [1, 0]]))
    return AuxiliaryChoice(policy=policy, v_marginal=np.array([theta, 1.0 - theta]))
