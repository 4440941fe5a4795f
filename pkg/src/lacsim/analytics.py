"""Closed-form steady-state models for caches fed by Zipf request streams.

The working-set approximation represents an LRU-style cache of x objects by a
characteristic time tau: an object stays cached iff it is requested again
within tau, so rank k is found with probability phi_k = 1 - exp(-lambda_k
tau), and tau is fixed by requiring the expected occupancy to equal x.

On top of that sit the two stochastic-admission disciplines implemented by
the simulator:

  asymmetric  miss insertions are admitted with mean probability mean_p,
              hits always refresh. miss_asym gives the per-rank steady-state
              miss probability; solve_tau finds the matching tau.

  symmetric   the same coin also gates the hit-time refresh. For Zipf
              exponents alpha > 1 the steady-state miss probability has a
              closed form independent of mean_p (miss_sym); the admission
              probability only rescales the time constant (tau_sym).

miss_mixture keeps the exact mixture form over a discrete distribution of
admission probabilities; by convexity it upper-bounds miss_asym evaluated at
the mean (Jensen), which is what makes the mean-field form usable.

All formulas clamp results to [0, 1]; clamping is counted, never silent
(clamp_events / reset_clamp_events).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .workload import PopularityModel

__all__ = [
    "CheSolution",
    "phi",
    "mtf_prob",
    "miss_asym",
    "miss_mixture",
    "solve_tau",
    "miss_sym",
    "tau_sym",
    "eta_sym",
    "eta_asym",
    "vrtt",
    "rvrtt",
    "fig1_grid",
    "write_model_curves",
    "clamp_events",
    "reset_clamp_events",
]

TAU_ABS_TOL = 1e-9
MAX_BISECT_ITER = 200
RESIDUAL_REL_TOL = 1e-6

_clamp_count = 0


def clamp_events() -> int:
    """Number of results clamped into [0, 1] since the last reset."""
    return _clamp_count


def reset_clamp_events():
    global _clamp_count
    _clamp_count = 0


def _clamp01(value):
    global _clamp_count
    if isinstance(value, np.ndarray):
        bad = int(np.count_nonzero((value < 0.0) | (value > 1.0)))
        if bad:
            _clamp_count += bad
            value = np.clip(value, 0.0, 1.0)
        return value
    if value < 0.0:
        _clamp_count += 1
        return 0.0
    if value > 1.0:
        _clamp_count += 1
        return 1.0
    return value


def _gamma_tail(alpha: float) -> float:
    """Gamma(1 - 1/alpha), defined for alpha > 1."""
    if alpha <= 1.0:
        raise ValueError(f"alpha must exceed 1, got {alpha!r}")
    return math.gamma(1.0 - 1.0 / alpha)


def phi(lam, tau):
    """Probability of at least one arrival within tau for rate lam."""
    return _clamp01(1.0 - np.exp(-np.asarray(lam, dtype=np.float64) * tau))


def mtf_prob(pi, p, phi_val):
    """Steady-state probability that an object is refreshed to the front
    within its characteristic window: (1 - (1 - p) * pi) * phi_val."""
    return _clamp01((1.0 - (1.0 - p) * np.asarray(pi, dtype=np.float64)) * phi_val)


def miss_asym(lam, tau: float, mean_p: float):
    """Per-rank steady-state miss probability of the asymmetric discipline.

    exp(-lam tau) / (1 - (1 - exp(-lam tau)) (1 - mean_p)); lam may be an
    array of per-rank request rates.
    """
    e = np.exp(-np.asarray(lam, dtype=np.float64) * tau)
    return _clamp01(e / (1.0 - (1.0 - e) * (1.0 - mean_p)))


def miss_mixture(prob_dist, phi_val: float):
    """Exact miss probability under a discrete admission-probability mixture.

    prob_dist maps admission probability u to its weight P[p = u]; weights
    must sum to one. Convexity in u makes this at least miss_asym at the
    mean of the distribution (Jensen).
    """
    items = sorted(prob_dist.items())
    total = math.fsum(w for _, w in items)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"mixture weights sum to {total!r}, expected 1")
    acc = 0.0
    for u, w in items:
        if not 0.0 <= u <= 1.0:
            raise ValueError(f"admission probability {u!r} outside [0, 1]")
        acc += w * (1.0 - phi_val) / (1.0 - phi_val * (1.0 - u))
    return _clamp01(acc)


@dataclass(frozen=True)
class CheSolution:
    tau: float
    residual: float
    iterations: int


def _weight_vector(popularity) -> np.ndarray:
    if isinstance(popularity, PopularityModel):
        return popularity.weights
    w = np.asarray(popularity, dtype=np.float64)
    if w.ndim != 1 or w.size == 0 or np.any(w <= 0.0):
        raise ValueError("popularity weights must be a non-empty positive vector")
    return w


def solve_tau(x: float, rate_lambda: float, popularity, mean_p: float = 1.0) -> CheSolution:
    """Characteristic time for a cache of x objects under the asymmetric
    discipline: the root of sum_k (1 - miss_asym_k(tau)) = x.

    popularity is a PopularityModel or a raw per-rank weight vector. The
    expected occupancy is strictly increasing in tau from 0 to the catalog
    size, so the root is found by bisection on a verified sign-change
    bracket (absolute tau tolerance 1e-9 s, at most 200 iterations), and the
    residual is checked against 1e-6 * x before returning.
    """
    weights = _weight_vector(popularity)
    n = weights.size
    if not 0.0 < x < n:
        raise ValueError(f"cache size x must lie in (0, catalog={n}), got {x!r}")
    if not 0.0 < mean_p <= 1.0:
        raise ValueError(f"mean_p must lie in (0, 1], got {mean_p!r}")
    if rate_lambda <= 0.0:
        raise ValueError(f"rate_lambda must be positive, got {rate_lambda!r}")
    lam = rate_lambda * weights

    def g(tau):
        return float(np.sum(1.0 - miss_asym(lam, tau, mean_p))) - x

    lo, hi = 0.0, 1.0
    expansions = 0
    while g(hi) <= 0.0:
        lo = hi
        hi *= 2.0
        expansions += 1
        if expansions > 200:
            raise RuntimeError("failed to bracket the characteristic time")
    if not g(lo) < 0.0 < g(hi):
        raise RuntimeError(f"no sign change on bracket [{lo}, {hi}]")

    iterations = 0
    while hi - lo > TAU_ABS_TOL and iterations < MAX_BISECT_ITER:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    tau = 0.5 * (lo + hi)
    residual = abs(g(tau))
    if residual > RESIDUAL_REL_TOL * x:
        raise RuntimeError(f"characteristic-time residual {residual} exceeds tolerance")
    return CheSolution(tau=tau, residual=residual, iterations=iterations)


def miss_sym(k, x: float, alpha: float):
    """Steady-state miss probability of the symmetric discipline at rank k
    for a cache of x objects under Zipf(alpha), alpha > 1.

    Independent of the admission probability: the coin rescales time (see
    tau_sym) but not the stationary ordering.
    """
    g = _gamma_tail(alpha)
    k = np.asarray(k, dtype=np.float64)
    return _clamp01(np.exp(-(x ** alpha) / (k ** alpha) / (g ** alpha)))


def tau_sym(x: float, rate_lambda: float, norm_c: float, mean_p: float, alpha: float) -> float:
    """Characteristic time of the symmetric discipline (continuous-catalog
    approximation): x**alpha / (lambda c mean_p Gamma(1 - 1/alpha)**alpha)."""
    g = _gamma_tail(alpha)
    if not 0.0 < mean_p <= 1.0:
        raise ValueError(f"mean_p must lie in (0, 1], got {mean_p!r}")
    return (x ** alpha) / (rate_lambda * norm_c * mean_p * g ** alpha)


def eta_sym(x: float, alpha: float, eps: float) -> float:
    """Largest rank whose symmetric-discipline miss probability stays below
    eps: x / (Gamma(1 - 1/alpha) (-ln eps)**(1/alpha))."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    g = _gamma_tail(alpha)
    return x / (g * (-math.log(eps)) ** (1.0 / alpha))


def eta_asym(rate_lambda: float, norm_c: float, tau_asym: float, mean_p: float,
             eps: float, alpha: float) -> float:
    """Largest rank whose asymmetric-discipline miss probability stays below
    eps, given the characteristic time solved at the same mean_p:
    (lambda c tau / ln(1 + (1/eps - 1)/mean_p))**(1/alpha)."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    if not 0.0 < mean_p <= 1.0:
        raise ValueError(f"mean_p must lie in (0, 1], got {mean_p!r}")
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    denom = math.log(1.0 + (1.0 / eps - 1.0) / mean_p)
    return (rate_lambda * norm_c * tau_asym / denom) ** (1.0 / alpha)


def vrtt(rtts, miss_probs) -> float:
    """Mean virtual round-trip time over a path of caches.

    rtts[i] is the round-trip time to hop i and miss_probs[i] the miss
    probability there; the weight of hop i is (1 - miss_probs[i]) times the
    product of the upstream misses before it. The terminal hop must be a
    sure hit (miss 0) so the weights form a distribution; anything else
    raises ValueError.
    """
    rtts = list(rtts)
    miss_probs = list(miss_probs)
    if len(rtts) != len(miss_probs) or not rtts:
        raise ValueError("rtts and miss_probs must be equal-length, non-empty")
    weights = []
    carry = 1.0
    for p in miss_probs:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"miss probability {p!r} outside [0, 1]")
        weights.append(carry * (1.0 - p))
        carry *= p
    total = math.fsum(weights)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"hop weights sum to {total!r}; the path must end in a sure hit")
    return math.fsum(r * w for r, w in zip(rtts, weights))


def rvrtt(rtts, miss_probs, start_hop: int) -> float:
    """vrtt restricted to hops at or beyond start_hop (1-based).

    Upstream miss products still include every hop before start_hop, so this
    is the expected contribution of the path tail, not a renormalized mean.
    """
    if not 1 <= start_hop <= len(rtts):
        raise ValueError(f"start_hop must lie in [1, {len(rtts)}], got {start_hop!r}")
    vrtt(rtts, miss_probs)  # validate the full path
    acc = 0.0
    carry = 1.0
    for i, (r, p) in enumerate(zip(rtts, miss_probs), start=1):
        if i >= start_hop:
            acc += r * carry * (1.0 - p)
        carry *= p
    return acc


def fig1_grid(popularity, x: float, rate_lambda: float, mean_p_list,
              max_rank: int = 0) -> list:
    """Per-rank asymmetric miss probabilities over a grid of mean admission
    probabilities. Returns rows (rank, mean_p, pi, tau_x)."""
    weights = _weight_vector(popularity)
    limit = weights.size if max_rank <= 0 else min(max_rank, weights.size)
    rows = []
    for mean_p in mean_p_list:
        sol = solve_tau(x, rate_lambda, weights, mean_p)
        pi = miss_asym(rate_lambda * weights[:limit], sol.tau, mean_p)
        for k in range(limit):
            rows.append((k + 1, mean_p, float(pi[k]), sol.tau))
    return rows


def write_model_curves(path, rows):
    """CSV emission of model curves with columns rank, mean_p, pi, tau_x."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "mean_p", "pi", "tau_x"])
        for rank, mean_p, pi_val, tau in rows:
            writer.writerow([rank, f"{mean_p:.9f}", f"{pi_val:.9f}", f"{tau:.9f}"])
