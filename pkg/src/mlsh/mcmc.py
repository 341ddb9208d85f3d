"""Metropolis-Hastings training of hyperplane arrangements.

Each of the ``n_bits`` hyperplane normals is a particle performing an
independent random walk on the unit sphere, biased toward positions that
score well under the configured objective.  A proposal perturbs the current
normal with isotropic Gaussian noise and re-projects onto the sphere; it is
accepted with probability min(1, exp(log U(proposal) - log U(current))).
The projected-Gaussian proposal is treated as symmetric: at the working
step sizes the asymmetry correction is second order in the stddev, and no
correction is part of the method.

Walks run in batches.  A fresh pair set is sampled for every batch so no
single draw of pairs can trap the walkers at an artifact of that draw.  The
particles never interact; diversity across bits comes from random starting
positions and from the peaks of the objective being sharp.

Reproducibility: every consumer of randomness owns a private substream
keyed by (master seed, role, batch, hyperplane), so results are bit-equal
for any worker-thread count.  Walkers are stepped in fixed-size blocks and
the arithmetic per block never depends on how blocks are scheduled.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import rng as _rng
from .data import LabeledDataset
from .hashing import encode_all, random_arrangement
from .objective import ObjectiveConfig, build_pair_terms, evaluate_terms
from .pairs import PairSampler, SamplingConfig, sampling_config_from_preset
from .validation import as_float_matrix, as_float_vector

# Walkers stepped together as one block.  Fixed so that results are
# identical no matter how many threads execute the blocks.
_BLOCK = 128


@dataclass(frozen=True)
class TrainConfig:
    n_bits: int = 1024
    n_batches: int = 10
    steps_per_batch: int = 100
    proposal_stddev: float = 0.01
    objective: ObjectiveConfig = field(default_factory=ObjectiveConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    seed: int = 0
    shared_pairs: bool = True      # one pair set per batch, shared by all walkers
    track_best: bool = False       # also record each walker's argmax-log-U visit
    track_trajectory: bool = False # record log U after every step

    def __post_init__(self):
        if self.n_bits < 1:
            raise ValueError("n_bits must be >= 1")
        if self.n_batches < 1:
            raise ValueError("n_batches must be >= 1")
        if self.steps_per_batch < 1:
            raise ValueError("steps_per_batch must be >= 1")
        if not self.proposal_stddev > 0.0:
            raise ValueError("proposal_stddev must be positive")
        _rng.check_seed(self.seed)


@dataclass
class TrainReport:
    """Diagnostics collected during training.

    acceptance_rates[b, h] is the fraction of accepted steps for hyperplane
    h in batch b.  final_log_u is scored against the last batch's pairs.
    When trajectories are tracked, log_u_trace[t, h] is walker h's log U
    after global step t.  Best-visit tracking compares log-U values across
    batches even though each batch rescores against fresh pairs; on a fixed
    pair budget the scale is comparable and the comparison is useful, but it
    is a heuristic.
    """

    acceptance_rates: np.ndarray
    final_log_u: np.ndarray
    log_u_trace: np.ndarray | None = None
    best_normals: np.ndarray | None = None
    best_log_u: np.ndarray | None = None

    def acceptance_csv(self) -> str:
        lines = ["batch,hyperplane,acceptance_rate"]
        n_batches, n_bits = self.acceptance_rates.shape
        for b in range(n_batches):
            for h in range(n_bits):
                lines.append(f"{b},{h},{float(self.acceptance_rates[b, h])!r}")
        return "\n".join(lines) + "\n"

    def trace_csv(self) -> str:
        if self.log_u_trace is None:
            raise ValueError("trajectory was not tracked")
        lines = ["step,mean_log_u,min_log_u,max_log_u"]
        for t, row in enumerate(self.log_u_trace):
            lines.append(f"{t},{float(row.mean())!r},{float(row.min())!r},{float(row.max())!r}")
        return "\n".join(lines) + "\n"


def metropolis_accept(delta_log_u, uniform) -> np.ndarray:
    """Acceptance mask: True with probability min(1, exp(delta_log_u)).

    ``uniform`` must be drawn from [0, 1).  Uphill moves (delta >= 0) are
    always accepted since log(u) < 0.
    """
    with np.errstate(divide="ignore"):
        return np.log(uniform) < delta_log_u


def propose_step(current, stddev: float, rng) -> np.ndarray:
    """Gaussian perturbation of a unit vector, re-projected to the sphere.

    A perturbation landing within 1e-12 of the origin is redrawn (measure
    zero, but normalization must never divide by zero).
    """
    current = as_float_vector(current, "current")
    while True:
        perturbed = current + stddev * rng.standard_normal(current.shape[0])
        norm = np.linalg.norm(perturbed)
        if norm >= 1e-12:
            return perturbed / norm


def mh_step(current, terms, objective: ObjectiveConfig, stddev: float, rng):
    """One Metropolis-Hastings step for a single walker.

    Returns ``(next_normal, accepted)``.  Draws one Gaussian perturbation
    and one uniform from ``rng``, in that order.
    """
    current = as_float_vector(current, "current")
    proposal = propose_step(current, stddev, rng)
    stacked = np.stack([current, proposal])
    _, log_u = evaluate_terms(stacked, terms, objective)
    accepted = bool(metropolis_accept(log_u[1] - log_u[0], rng.random()))
    return (proposal, True) if accepted else (current, False)


def _walk_block(start, normals0, terms, config, batch_index):
    """Advance walkers [start, start+len(normals0)) through one batch.

    Each walker pre-draws its whole batch of randomness from its own
    substream (all perturbations, then all acceptance uniforms), so results
    do not depend on which thread runs the block.
    """
    count, dim = normals0.shape
    steps = config.steps_per_batch
    stddev = config.proposal_stddev
    gens = [
        _rng.substream(config.seed, _rng.WALK_STREAM, batch_index, start + i)
        for i in range(count)
    ]
    gauss = np.stack([g.standard_normal((steps, dim)) for g in gens])
    uniforms = np.stack([g.random(steps) for g in gens])

    current = normals0.copy()
    _, log_u = evaluate_terms(current, terms, config.objective)
    accepted_steps = np.zeros(count, dtype=np.int64)
    trace = np.empty((steps, count)) if config.track_trajectory else None
    best = current.copy() if config.track_best else None
    best_log_u = log_u.copy() if config.track_best else None

    for t in range(steps):
        proposal = current + stddev * gauss[:, t, :]
        norms = np.linalg.norm(proposal, axis=1)
        while True:
            bad = np.flatnonzero(norms < 1e-12)
            if not bad.size:
                break
            for i in bad:
                proposal[i] = current[i] + stddev * gens[i].standard_normal(dim)
            norms[bad] = np.linalg.norm(proposal[bad], axis=1)
        proposal /= norms[:, None]

        _, log_u_prop = evaluate_terms(proposal, terms, config.objective)
        accept = metropolis_accept(log_u_prop - log_u, uniforms[:, t])
        current[accept] = proposal[accept]
        log_u = np.where(accept, log_u_prop, log_u)
        accepted_steps += accept
        if best is not None:
            better = log_u > best_log_u
            best[better] = current[better]
            best_log_u = np.where(better, log_u, best_log_u)
        if trace is not None:
            trace[t] = log_u

    return current, log_u, accepted_steps, trace, best, best_log_u


def train(data: LabeledDataset, config: TrainConfig, n_threads: int | None = None):
    """Learn an arrangement of ``config.n_bits`` hyperplane normals.

    Returns ``(normals, report)`` where ``normals`` is the (n_bits, dim)
    array of final walker positions.  Distances seen by the pair sampler and
    the objective are taken in the dataset's own space, so preprocess first
    if noise reduction is wanted.

    ``n_threads`` caps worker parallelism (default: hardware concurrency).
    Output is bit-identical for any thread count.
    """
    if data.dim < 2:
        raise ValueError("training data must have dimension >= 2")
    if n_threads is None:
        n_threads = os.cpu_count() or 1
    n_threads = max(1, int(n_threads))

    n_bits = config.n_bits
    sampler = PairSampler(data)
    normals = random_arrangement(data.dim, n_bits, config.seed)
    starts = list(range(0, n_bits, _BLOCK))

    acceptance = np.empty((config.n_batches, n_bits))
    final_log_u = np.empty(n_bits)
    traces = [] if config.track_trajectory else None
    best = normals.copy() if config.track_best else None
    best_log_u = np.full(n_bits, -np.inf) if config.track_best else None

    def run_batch(batch_index, tasks):
        # tasks: list of (start, block_normals, terms)
        batch_trace = np.empty((config.steps_per_batch, n_bits)) if config.track_trajectory else None

        def run_one(task):
            start, block, terms = task
            return start, _walk_block(start, block, terms, config, batch_index)

        if n_threads > 1 and len(tasks) > 1:
            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                results = list(pool.map(run_one, tasks))
        else:
            results = [run_one(t) for t in tasks]

        for start, (cur, log_u, acc, trace, blk_best, blk_best_lu) in results:
            stop = start + cur.shape[0]
            normals[start:stop] = cur
            final_log_u[start:stop] = log_u
            acceptance[batch_index, start:stop] = acc / config.steps_per_batch
            if batch_trace is not None:
                batch_trace[:, start:stop] = trace
            if best is not None:
                better = blk_best_lu > best_log_u[start:stop]
                best[start:stop][better] = blk_best[better]
                best_log_u[start:stop][better] = blk_best_lu[better]
        if batch_trace is not None:
            traces.append(batch_trace)

    for b in range(config.n_batches):
        if config.shared_pairs:
            pair_rng = _rng.substream(config.seed, _rng.PAIR_STREAM, b)
            terms = build_pair_terms(data, sampler.sample_pair_set(config.sampling, pair_rng))
            tasks = [(s, normals[s : s + _BLOCK].copy(), terms) for s in starts]
        else:
            tasks = []
            for h in range(n_bits):
                pair_rng = _rng.substream(config.seed, _rng.PAIR_STREAM, b, h)
                terms = build_pair_terms(data, sampler.sample_pair_set(config.sampling, pair_rng))
                tasks.append((h, normals[h : h + 1].copy(), terms))
        run_batch(b, tasks)

    report = TrainReport(
        acceptance_rates=acceptance,
        final_log_u=final_log_u,
        log_u_trace=np.concatenate(traces, axis=0) if traces is not None else None,
        best_normals=best,
        best_log_u=best_log_u,
    )
    return normals, report


class MCMCHyperplaneHasher(BaseEstimator, TransformerMixin):
    """Supervised hyperplane hasher trained by per-bit random walks.

    Fitting learns ``n_bits`` hyperplane normals from labeled data;
    transforming hashes vectors into packed bit codes (one uint64 word per
    64 bits).  Compatible with scikit-learn pipelines: ``y`` is a sequence
    of label sets (or single labels), and the hasher trains in whatever
    space ``X`` is given.

    Parameters
    ----------
    n_bits : int, default 1024
        Code length in bits.
    n_batches, steps_per_batch : int
        Random-walk schedule; pairs are resampled between batches.
    pairs_per_batch : int, default 2000
        Total pairs per batch, split evenly between positives and negatives.
    objective : {"count", "ratio", "cosine", "cosine_ratio"}, default "count"
    temperature : float, default 1.0
        Scale of log U = x / temperature; lower sharpens objective peaks.
    sampling : str, default "randomhit-nearmiss"
        "<positive>-<negative>" strategy pair, e.g. "randomhit-randommiss";
        any combination of {randomhit, nearhit, farhit} x {randommiss,
        nearmiss, boundarymiss}.
    proposal_stddev : float, default 0.01
        Stddev of the Gaussian proposal step.
    shared_pairs : bool, default True
        Share one pair set per batch across all walkers; when False each
        walker samples its own.
    track_best : bool, default False
        Additionally record each walker's best-scoring visited position
        (report_.best_normals); the fitted normals are always the final
        walker positions.
    n_threads : int or None, default None
        Worker threads (None: hardware concurrency).  Has no effect on the
        result.
    random_state : int, default 0
        Master seed.  No entropy-based default: identical data and
        parameters always reproduce the same arrangement.
    """

    def __init__(self, n_bits=1024, n_batches=10, steps_per_batch=100,
                 pairs_per_batch=2000, objective="count", temperature=1.0,
                 sampling="randomhit-nearmiss", proposal_stddev=0.01,
                 shared_pairs=True, track_best=False, n_threads=None,
                 random_state=0):
        self.n_bits = n_bits
        self.n_batches = n_batches
        self.steps_per_batch = steps_per_batch
        self.pairs_per_batch = pairs_per_batch
        self.objective = objective
        self.temperature = temperature
        self.sampling = sampling
        self.proposal_stddev = proposal_stddev
        self.shared_pairs = shared_pairs
        self.track_best = track_best
        self.n_threads = n_threads
        self.random_state = random_state

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            n_bits=self.n_bits,
            n_batches=self.n_batches,
            steps_per_batch=self.steps_per_batch,
            proposal_stddev=self.proposal_stddev,
            objective=ObjectiveConfig(kind=self.objective, temperature=self.temperature),
            sampling=sampling_config_from_preset(self.sampling, self.pairs_per_batch),
            seed=self.random_state,
            shared_pairs=self.shared_pairs,
            track_best=self.track_best,
        )

    def fit(self, X, y):
        dataset = LabeledDataset(as_float_matrix(X), y)
        self.normals_, self.report_ = train(dataset, self._train_config(), self.n_threads)
        self.n_features_in_ = dataset.dim
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "normals_"):
            raise NotFittedError("fit must be called before transform")
        return encode_all(self.normals_, X)
