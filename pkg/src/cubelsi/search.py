"""Extremal search for the empirical constants of the cube inequalities.

The search maximizes ``evaluate(id, f).ratio`` over value tables. Ratios are
non-smooth (Orlicz norms, l_1 / l_inf targets), so only derivative-free moves
are used: a randomized coordinate pattern search followed by simulated
annealing, restarted from structured and Walsh-sparse random starts.

Each restart draws from its own substream ``(seed, restart)`` and owns a fixed
slice of the evaluation budget, so the best ratio found is a deterministic,
nondecreasing function of the budget and does not depend on how many
restarts run concurrently.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import os

import numpy as np

from .cube import CubeFunction, WalshSpectrum, coordinates, inverse_walsh, popcounts
from .errors import ArgumentError
from .gradients import lower_median
from .inequalities import InequalityId, InequalityReport, evaluate
from .norms import EUCLIDEAN
from .rng import make_rng


@dataclass(frozen=True)
class SearchConfig:
    budget: int = 10_000
    seed: int = 0
    restart_budget: int = 1_000
    pattern_fraction: float = 0.4
    initial_step: float = 0.5
    temperature: float = 0.02
    threads: int = None

    def __post_init__(self):
        if self.budget <= 0 or self.restart_budget <= 0:
            raise ArgumentError("search budget must be positive")


def default_threads():
    try:
        return max(1, int(os.environ.get("CUBELSI_THREADS", "1")))
    except ValueError:
        return 1


def structured_starts(n, d):
    """Seed-independent candidate extremizers: subcube indicators, dictators, Walsh characters."""
    xs = coordinates(n)
    starts = []
    for k in range(1, n + 1):
        starts.append(np.all(xs[:, :k] == 1, axis=1).astype(float))
    starts.append(xs[:, 0].copy())
    starts.append(np.prod(xs, axis=1))
    out = []
    for s in starts:
        v = np.zeros((1 << n, d))
        v[:, 0] = s
        out.append(v)
    if d > 1:
        v = np.zeros((1 << n, d))
        for j in range(min(n, d)):
            v[:, j] = xs[:, j]
        out.append(v)
    return out


def random_sparse_start(rng, n, d, max_terms=4):
    """A function with a few random low-degree Walsh coefficients."""
    k = popcounts(n)
    coeffs = np.zeros((1 << n, d))
    terms = int(rng.integers(1, max_terms + 1))
    weights = np.exp(-k.astype(float))
    weights[0] = 0.0
    weights /= weights.sum()
    for S in rng.choice(1 << n, size=terms, p=weights):
        coeffs[S] += rng.normal(size=d)
    vals = inverse_walsh(WalshSpectrum(n, coeffs)).values.copy()
    if rng.random() < 0.3:
        # concentrate the function: keep only its upper part
        vals = np.maximum(vals - np.quantile(vals, 0.7, axis=0), 0.0)
    return vals


def _prepare(ineq, vals, n):
    """Bring a table into the domain of ``ineq`` (only TalagrandAsym has constraints)."""
    if ineq is InequalityId.TalagrandAsym:
        h = np.abs(vals[:, :1])
        m = lower_median(CubeFunction(n, h))
        return np.maximum(h - m, 0.0)
    return vals


@dataclass
class RestartResult:
    restart: int
    ratio: float
    values: np.ndarray
    evaluations: int
    history: list


def _run_restart(ineq, n, d, tn, params, cfg, restart, evals, warm=()):
    rng = make_rng(cfg.seed, "extremize", ineq.value, n, d, restart)
    starts = list(warm) + structured_starts(n, d)
    if restart < len(starts):
        x = starts[restart]
    else:
        x = random_sparse_start(rng, n, d)
    used = 0
    history = []

    def score(v):
        nonlocal used
        used += 1
        v = _prepare(ineq, v, n)
        try:
            r = evaluate(ineq, CubeFunction(n, v), tn, **params).ratio
        except ArgumentError:
            return -math.inf
        return r if math.isfinite(r) else -math.inf

    x = _prepare(ineq, x, n)
    fx = score(x)
    best, best_x = fx, x.copy()
    history.append(best)
    spread = float(np.abs(x).max()) or 1.0
    step = cfg.initial_step * spread
    # schedules depend on restart_budget only, so a truncated restart is a prefix of a full one
    pattern_evals = int(cfg.pattern_fraction * cfg.restart_budget)
    failures = 0
    # randomized coordinate pattern search
    while used < min(pattern_evals, evals):
        idx = (int(rng.integers(x.shape[0])), int(rng.integers(d)))
        cand = x.copy()
        cand[idx] += step if rng.random() < 0.5 else -step
        fc = score(cand)
        if fc > fx:
            x, fx = _prepare(ineq, cand, n), fc
            failures = 0
        else:
            failures += 1
            if failures >= 2 * x.size:
                step *= 0.5
                failures = 0
        if fx > best:
            best, best_x = fx, x.copy()
        history.append(best)
    # simulated annealing in log-ratio with geometric cooling
    remaining = cfg.restart_budget - pattern_evals
    temp0 = cfg.temperature
    k = 0
    while used < evals:
        frac = k / max(remaining, 1)
        temp = temp0 * (1e-3 ** frac)
        scale = step * (1.0 + 4.0 * (1.0 - frac))
        cand = x.copy()
        if rng.random() < 0.5:
            idx = (int(rng.integers(x.shape[0])), int(rng.integers(d)))
            cand[idx] += scale * rng.normal()
        else:
            cand += 0.1 * scale * rng.normal(size=x.shape)
        fc = score(cand)
        k += 1
        if fc > -math.inf and (fc >= fx or (fx > 0 and fc > 0 and
                                            rng.random() < math.exp((math.log(fc) - math.log(fx)) / temp))):
            x, fx = _prepare(ineq, cand, n), fc
        if fx > best:
            best, best_x = fx, x.copy()
        history.append(best)
    return RestartResult(restart, best, best_x, used, history)


@dataclass
class SearchResult:
    report: InequalityReport
    best_restart: int
    evaluations: int
    trace: list


def lift_values(values, n):
    """Extend a table on ``C_m`` to ``C_n`` (``n >= m``) ignoring the new coordinates."""
    values = np.asarray(values)
    m = int(values.shape[0]).bit_length() - 1
    if n < m:
        raise ArgumentError("cannot lift to a smaller cube")
    return values[np.arange(1 << n) & ((1 << m) - 1)]


def extremize(ineq, n, d=1, tn=EUCLIDEAN, cfg=SearchConfig(), warm_starts=(), **params):
    """Maximize the ratio of ``ineq`` over functions ``C_n -> R^d``.

    ``params`` are forwarded to :func:`cubelsi.inequalities.evaluate`.
    ``warm_starts`` are value tables (possibly on a smaller cube, then lifted)
    used as the first restarts. Returns the report of the best witness, the
    restart that found it, and the best-so-far trace indexed by evaluation count.
    """
    ineq = InequalityId.parse(ineq)
    warm = [lift_values(np.asarray(w, dtype=float).reshape(w.shape[0], -1), n) for w in warm_starts]
    slices = []
    left = cfg.budget
    while left > 0:
        slices.append(min(cfg.restart_budget, left))
        left -= slices[-1]
    threads = cfg.threads or default_threads()

    def job(r):
        return _run_restart(ineq, n, d, tn, params, cfg, r, slices[r], warm)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, range(len(slices))))
    else:
        results = [job(r) for r in range(len(slices))]
    # earliest restart wins ties
    winner = max(results, key=lambda res: (res.ratio, -res.restart))
    trace = []
    running = -math.inf
    for res in results:
        for h in res.history:
            running = max(running, h)
            trace.append(running)
    f = CubeFunction(n, winner.values)
    report = evaluate(ineq, f, tn, **params)
    return SearchResult(report, winner.restart, sum(r.evaluations for r in results), trace)


def extremize_sweep(ineq, ns, d=1, tn=EUCLIDEAN, cfg=SearchConfig(), **params):
    """Run :func:`extremize` for increasing ``n``, warm-starting each cube with the previous witness.

    A function of fewer variables is admissible on a larger cube with the same
    ratio, so the warm start makes the reported constants nondecreasing in ``n``
    up to rounding.
    """
    out = {}
    prev = None
    for n in sorted(ns):
        warm = () if prev is None else (prev.report.witness.values,)
        prev = extremize(ineq, n, d, tn, cfg, warm_starts=warm, **params)
        out[n] = prev
    return out
