"""Finite-blocklength Monte Carlo checks of the coding arguments.

Three trial protocols, selected by ``SimConfig.mode``:

  binning:   random codebook of v-sequences plus random binning of the
             output sequence. The encoder covers the state sequence with a
             typical codeword and acts; the decoder receives only the bin
             index, scans every output sequence in that bin, and accepts
             the ones jointly typical with its side information and ANY
             codeword. A trial succeeds when the accepted set is exactly
             the true output sequence.
  timeshare: the state-independent variant; one shared v-sequence drawn
             i.i.d. from p(v) replaces the codebook (both ends know it),
             the decoder otherwise behaves as in binning.
  covering:  a constructive description of the output: pick a codeword
             typical with the realized output and send its index together
             with the output's rank inside the canonical (index-ordered)
             enumeration of sequences typical with that codeword. The rank
             channel has 2^ceil(n*(H(Y|V) + epsilon)) slots; overflow is an
             error. Requires trivial side information (|Z| = 1).

Typicality is the robust kind: every symbol tuple's empirical frequency
has to sit within a factor (1 +- epsilon) of its probability, which forces
zero counts on zero-probability tuples. On short blocks this is a harsh
criterion; small probability cells can make the typical set empty unless
epsilon is generous, and the interesting regimes here are exactly the
short blocks, so choose epsilon against the smallest cell of the joint.

Decoders scan the full output-sequence space (|Y|^n entries), so runs are
guarded by ``ceiling``; larger spaces refuse with SearchSpaceError rather
than thrash. Binning uses a splitmix64 hash of the sequence index salted
per trial, so bins are reproducible from the seed alone. Every trial
re-draws state, codebook, binning, and channel noise; trial seeds are
spawned from one SeedSequence, so campaigns are reproducible end to end
and individual trials can be replayed in isolation.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, SearchSpaceError, UsageError
from .kernel import entropy_bits
from .model import AuxiliaryChoice, ProblemSpec, assemble_joint

__all__ = [
    "SimConfig",
    "TrialOutcome",
    "SimulationReport",
    "is_jointly_typical",
    "run_campaign",
]

_MODES = ("binning", "timeshare", "covering")

_U64 = np.uint64
_SPLITMIX_GAMMA = _U64(0x9E3779B97F4A7C15)
_SPLITMIX_M1 = _U64(0xBF58476D1CE4E5B9)
_SPLITMIX_M2 = _U64(0x94D049BB133111EB)


@dataclass(frozen=True)
class SimConfig:
    """Campaign parameters.

    ``rate`` is the bin-index rate in bits per symbol (binning and
    timeshare modes; the bin count is 2^ceil(n * rate)).
    ``codebook_rate_v`` sizes the v codebook the same way (binning and
    covering). ``ceiling`` bounds the |Y|^n sequence space a decoder may
    scan.
    """

    n: int
    trials: int
    seed: int
    mode: str = "binning"
    rate: float | None = None
    codebook_rate_v: float | None = None
    epsilon: float = 0.15
    ceiling: int = 1 << 20

    def __post_init__(self):
        if self.mode not in _MODES:
            raise UsageError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.n < 1:
            raise UsageError("n must be >= 1")
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if self.epsilon <= 0.0:
            raise DomainError("epsilon must be positive")
        if self.mode in ("binning", "timeshare"):
            if self.rate is None or self.rate <= 0.0:
                raise UsageError(f"{self.mode} mode needs a positive rate")
        if self.mode in ("binning", "covering"):
            if self.codebook_rate_v is None or self.codebook_rate_v < 0.0:
                raise UsageError(f"{self.mode} mode needs codebook_rate_v >= 0")


@dataclass(frozen=True)
class TrialOutcome:
    success: bool
    bucket: str | None
    cost: float
    covering_failed: bool = False
    accepted_count: int | None = None
    vhat_mismatch: bool | None = None


@dataclass(frozen=True)
class SimulationReport:
    """Aggregate of one campaign; ``breakdown`` buckets sum to the errors."""

    mode: str
    n: int
    trials: int
    seed: int
    epsilon: float
    rate: float
    error_rate: float
    breakdown: dict
    empirical_cost: float
    empirical_cost_se: float
    n_bins: int | None = None
    codebook_size: int | None = None
    rank_capacity: int | None = None
    covering_failure_rate: float | None = None
    vhat_mismatch_rate: float | None = None
    vhat_mismatch_count: int | None = None
    vhat_mismatch_decoded_ok: int | None = None
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def is_jointly_typical(sequences, joint: np.ndarray, epsilon: float) -> bool:
    """Robust joint typicality of aligned symbol sequences.

    ``sequences`` is one integer array per axis of ``joint``, all the same
    length. True iff every tuple's empirical frequency f satisfies
    |f - p| <= epsilon * p (zero-probability tuples must not occur).
    """
    seqs = [np.asarray(s, dtype=np.int64) for s in sequences]
    if len(seqs) != np.ndim(joint):
        raise UsageError(
            f"got {len(seqs)} sequences for a {np.ndim(joint)}-axis joint"
        )
    n = len(seqs[0])
    if any(len(s) != n for s in seqs):
        raise UsageError("sequences must share one length")
    flat = np.ravel_multi_index(seqs, np.shape(joint))
    counts = np.bincount(flat, minlength=joint.size)
    return bool(
        np.all(np.abs(counts / n - joint.reshape(-1)) <= epsilon * joint.reshape(-1))
    )


def _typical_rows(cells: np.ndarray, n: int, flat_joint: np.ndarray,
                  epsilon: float) -> np.ndarray:
    """Row mask of robust typicality for per-row cell-index sequences.

    ``cells`` is (rows, n) of flattened tuple indices into ``flat_joint``.
    """
    rows, k = cells.shape[0], flat_joint.size
    offsets = np.arange(rows, dtype=np.int64) * k
    counts = np.bincount(
        (cells + offsets[:, None]).reshape(-1), minlength=rows * k
    ).reshape(rows, k)
    return np.all(
        np.abs(counts / n - flat_joint[None, :]) <= epsilon * flat_joint[None, :],
        axis=1,
    )


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = (x + _SPLITMIX_GAMMA).astype(_U64)
    x = ((x ^ (x >> _U64(30))) * _SPLITMIX_M1).astype(_U64)
    x = ((x ^ (x >> _U64(27))) * _SPLITMIX_M2).astype(_U64)
    return x ^ (x >> _U64(31))


def _all_sequences(alphabet: int, n: int) -> np.ndarray:
    """(alphabet^n, n) symbol matrix; row index is the canonical order."""
    idx = np.arange(alphabet**n, dtype=np.int64)
    place = alphabet ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // place[None, :]) % alphabet


def _sample_rows(rng, kernel_rows: np.ndarray, row_idx: np.ndarray) -> np.ndarray:
    """Per-position draw from kernel_rows[row_idx[t]] via inverse CDF."""
    cdf = np.cumsum(kernel_rows, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(len(row_idx))
    return np.argmax(u[:, None] < cdf[row_idx], axis=1).astype(np.int64)


class _Campaign:
    """Shared tables for one (spec, aux, config) campaign."""

    def __init__(self, spec: ProblemSpec, aux: AuxiliaryChoice, config: SimConfig):
        aux.policy.check_against(spec)
        n_seq = spec.y_size**config.n
        if n_seq > config.ceiling:
            raise SearchSpaceError(
                n_seq, config.ceiling, f"output sequence space |Y|^{config.n}"
            )
        if config.mode == "covering" and spec.z_size != 1:
            raise UsageError("covering mode needs trivial side information (|Z| = 1)")
        self.spec = spec
        self.aux = aux
        self.config = config
        joint = assemble_joint(spec, aux, causal=aux.causal)
        ax = joint.axis
        self.p_vzy = joint.marginal((ax("v"), ax("z"), ax("y")))
        self.p_vs = joint.marginal((ax("v"), ax("s")))
        self.p_vy = self.p_vzy.sum(axis=1)
        self.p_v = aux.v_weights(spec)
        self.v_size = len(self.p_v)
        p_y_given_v = self.p_vy / np.where(
            self.p_vy.sum(1) == 0.0, 1.0, self.p_vy.sum(1)
        )[:, None]
        self.h_y_given_v = float(
            sum(
                self.p_vy.sum(1)[v] * entropy_bits(p_y_given_v[v])
                for v in range(self.v_size)
            )
        )
        self.seqs_y = _all_sequences(spec.y_size, config.n)
        self.state_flat = spec.state_joint.reshape(-1)
        if config.mode in ("binning", "timeshare"):
            self.n_bins = 1 << int(np.ceil(config.n * config.rate))
        else:
            self.n_bins = None
        if config.mode in ("binning", "covering"):
            self.codebook_size = 1 << int(np.ceil(config.n * config.codebook_rate_v))
        else:
            self.codebook_size = None
        if config.mode == "covering":
            self.rank_capacity = 1 << int(
                np.ceil(config.n * (self.h_y_given_v + config.epsilon))
            )
        else:
            self.rank_capacity = None

    def draw_state(self, rng):
        idx = rng.choice(
            self.spec.s_size * self.spec.z_size, size=self.config.n, p=self.state_flat
        )
        return idx // self.spec.z_size, idx % self.spec.z_size

    def act_and_transmit(self, rng, s_seq, v_seq):
        a_seq = self.aux.policy.table[s_seq, v_seq]
        rows = self.spec.channel.reshape(-1, self.spec.y_size)
        flat = a_seq * self.spec.s_size + s_seq
        y_seq = _sample_rows(rng, rows, flat)
        cost = float(self.spec.cost[a_seq, s_seq, y_seq].mean())
        return a_seq, y_seq, cost

    def cover_state(self, rng, codebook, s_seq):
        """Uniform pick among codewords typical with the state sequence."""
        cells = codebook * self.spec.s_size + s_seq[None, :]
        mask = _typical_rows(
            cells, self.config.n, self.p_vs.reshape(-1), self.config.epsilon
        )
        hits = np.flatnonzero(mask)
        if not len(hits):
            # no typical codeword: pick a random index and press on anyway
            return int(rng.integers(len(codebook))), True
        return int(rng.choice(hits)), False

    def accepted_in_bin(self, rng, codebook, z_seq, y_seq):
        """Decoder scan for binning/timeshare: returns accepted row indices."""
        salt = (_U64(rng.integers(0, 1 << 32)) << _U64(32)) | _U64(
            rng.integers(0, 1 << 32)
        )
        bins = _splitmix64(np.arange(len(self.seqs_y), dtype=_U64) ^ salt) % _U64(
            self.n_bins
        )
        y_index = int(np.ravel_multi_index(y_seq, (self.spec.y_size,) * self.config.n))
        in_bin = np.flatnonzero(bins == bins[y_index])
        cand = self.seqs_y[in_bin]
        accepted = np.zeros(len(in_bin), dtype=bool)
        zy_base = z_seq[None, :] * self.spec.y_size + cand  # (cand, n) of z*Y + y
        for codeword in codebook:
            cells = codeword[None, :] * (self.spec.z_size * self.spec.y_size) + zy_base
            accepted |= _typical_rows(
                cells, self.config.n, self.p_vzy.reshape(-1), self.config.epsilon
            )
            if accepted.all():
                break
        return in_bin[accepted], y_index


def _run_binning_trial(camp: _Campaign, rng) -> TrialOutcome:
    s_seq, z_seq = camp.draw_state(rng)
    codebook = rng.choice(camp.v_size, size=(camp.codebook_size, camp.config.n),
                          p=camp.p_v)
    pick, failed = camp.cover_state(rng, codebook, s_seq)
    _, y_seq, cost = camp.act_and_transmit(rng, s_seq, codebook[pick])
    accepted, y_index = camp.accepted_in_bin(rng, codebook, z_seq, y_seq)
    success = accepted.tolist() == [y_index]
    if success:
        bucket = None
    elif failed:
        bucket = "encoder-covering-failure"
    elif y_index not in accepted:
        bucket = "decoder-none"
    else:
        bucket = "decoder-ambiguous"
    return TrialOutcome(success, bucket, cost, covering_failed=failed,
                        accepted_count=len(accepted))


def _run_timeshare_trial(camp: _Campaign, rng) -> TrialOutcome:
    s_seq, z_seq = camp.draw_state(rng)
    v_seq = rng.choice(camp.v_size, size=camp.config.n, p=camp.p_v)
    _, y_seq, cost = camp.act_and_transmit(rng, s_seq, v_seq)
    accepted, y_index = camp.accepted_in_bin(rng, v_seq[None, :], z_seq, y_seq)
    success = accepted.tolist() == [y_index]
    if success:
        bucket = None
    elif y_index not in accepted:
        bucket = "decoder-none"
    else:
        bucket = "decoder-ambiguous"
    return TrialOutcome(success, bucket, cost, accepted_count=len(accepted))


def _run_covering_trial(camp: _Campaign, rng) -> TrialOutcome:
    s_seq, _ = camp.draw_state(rng)
    codebook = rng.choice(camp.v_size, size=(camp.codebook_size, camp.config.n),
                          p=camp.p_v)
    pick, failed = camp.cover_state(rng, codebook, s_seq)
    _, y_seq, cost = camp.act_and_transmit(rng, s_seq, codebook[pick])
    # describe y: a codeword typical with it, then y's rank inside that
    # codeword's conditional typical set (canonical sequence order)
    cells = codebook * camp.spec.y_size + y_seq[None, :]
    mask = _typical_rows(cells, camp.config.n, camp.p_vy.reshape(-1),
                         camp.config.epsilon)
    hits = np.flatnonzero(mask)
    if not len(hits):
        bucket = "encoder-covering-failure" if failed else "decoder-none"
        return TrialOutcome(False, bucket, cost, covering_failed=failed,
                            vhat_mismatch=None)
    vhat_idx = int(rng.choice(hits))
    vhat = codebook[vhat_idx]
    mismatch = not np.array_equal(vhat, codebook[pick])
    cond_cells = vhat[None, :] * camp.spec.y_size + camp.seqs_y
    cond_mask = _typical_rows(cond_cells, camp.config.n, camp.p_vy.reshape(-1),
                              camp.config.epsilon)
    members = np.flatnonzero(cond_mask)
    y_index = int(np.ravel_multi_index(y_seq, (camp.spec.y_size,) * camp.config.n))
    rank = int(np.searchsorted(members, y_index))
    if rank >= camp.rank_capacity:
        bucket = "encoder-covering-failure" if failed else "decoder-ambiguous"
        return TrialOutcome(False, bucket, cost, covering_failed=failed,
                            vhat_mismatch=mismatch)
    success = int(members[rank]) == y_index
    bucket = None if success else (
        "encoder-covering-failure" if failed else "decoder-none"
    )
    return TrialOutcome(success, bucket, cost, covering_failed=failed,
                        vhat_mismatch=mismatch)


_TRIAL_RUNNERS = {
    "binning": _run_binning_trial,
    "timeshare": _run_timeshare_trial,
    "covering": _run_covering_trial,
}


def run_campaign(
    spec: ProblemSpec, aux: AuxiliaryChoice, config: SimConfig
) -> SimulationReport:
    """Run ``config.trials`` independent trials and aggregate them."""
    camp = _Campaign(spec, aux, config)
    runner = _TRIAL_RUNNERS[config.mode]
    children = np.random.SeedSequence(config.seed).spawn(config.trials)
    outcomes = [runner(camp, np.random.default_rng(c)) for c in children]

    errors = [o for o in outcomes if not o.success]
    breakdown = {
        "encoder-covering-failure": 0,
        "decoder-none": 0,
        "decoder-ambiguous": 0,
    }
    for o in errors:
        breakdown[o.bucket] += 1
    costs = np.array([o.cost for o in outcomes])
    if config.mode == "covering":
        eff_rate = (
            np.log2(camp.codebook_size) + np.log2(camp.rank_capacity)
        ) / config.n
        flagged = [o for o in outcomes if o.vhat_mismatch is not None]
        mismatched = [o for o in flagged if o.vhat_mismatch]
        mismatch_rate = len(mismatched) / len(flagged) if flagged else 0.0
        mismatch_count = len(mismatched)
        mismatch_ok = sum(1 for o in mismatched if o.success)
    else:
        eff_rate = float(config.rate)
        mismatch_rate = None
        mismatch_count = None
        mismatch_ok = None
    if config.mode in ("binning", "covering"):
        fail_rate = float(np.mean([o.covering_failed for o in outcomes]))
    else:
        fail_rate = None
    return SimulationReport(
        mode=config.mode,
        n=config.n,
        trials=config.trials,
        seed=config.seed,
        epsilon=config.epsilon,
        rate=float(eff_rate),
        error_rate=len(errors) / config.trials,
        breakdown=breakdown,
        empirical_cost=float(costs.mean()),
        empirical_cost_se=float(costs.std(ddof=1) / np.sqrt(config.trials))
        if config.trials > 1
        else 0.0,
        n_bins=camp.n_bins,
        codebook_size=camp.codebook_size,
        rank_capacity=camp.rank_capacity,
        covering_failure_rate=fail_rate,
        vhat_mismatch_rate=mismatch_rate,
        vhat_mismatch_count=mismatch_count,
        vhat_mismatch_decoded_ok=mismatch_ok,
        config=asdict(config),
    )
