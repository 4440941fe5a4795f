"""Run metrics: per-rank hit counters, delivery series, link loads, CSV export.

A MetricsReport is a plain result container assembled by the simulator at
the end of a run. All CSV emission lives here so the on-disk schema stays in
one place: four files (miss_prob, delivery, links, summary), each versioned
with a header comment naming the schema and the scenario seed, columns in a
fixed order, floats printed with nine decimals, newline-terminated. A given
config and seed reproduces the files byte for byte.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

__all__ = [
    "DeliveryRecord",
    "LinkStats",
    "RunningStats",
    "running_stats",
    "link_load",
    "MetricsReport",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class DeliveryRecord:
    """One completed user request: from first interest to last data packet."""

    completion_seq: int
    rank: int
    issued_at: float
    completed_at: float

    @property
    def duration(self) -> float:
        return self.completed_at - self.issued_at


class RunningStats:
    """Numerically stable one-pass mean and population stddev (Welford)."""

    __slots__ = ("count", "mean", "_m2")

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def add(self, value: float):
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (value - self.mean)

    @property
    def stddev(self) -> float:
        if self.count == 0:
            return 0.0
        return math.sqrt(self._m2 / self.count)


def running_stats(series):
    """Cumulative (mean, stddev) after each element of a duration series.

    series holds floats or DeliveryRecord instances. The stddev is the
    population form (divisor n), matching RunningStats.
    """
    acc = RunningStats()
    out = []
    for item in series:
        value = item.duration if isinstance(item, DeliveryRecord) else float(item)
        acc.add(value)
        out.append((acc.mean, acc.stddev))
    return out


@dataclass
class LinkStats:
    """Byte and busy-time accounting for the data direction of one link."""

    label: str
    capacity_bps: float
    bytes: int = 0
    busy_seconds: float = 0.0


def link_load(stats: LinkStats, elapsed: float) -> float:
    """Utilization rho = busy_seconds / elapsed."""
    if elapsed <= 0.0:
        raise ValueError(f"elapsed must be positive, got {elapsed!r}")
    return stats.busy_seconds / elapsed


def csv_field(text: str) -> str:
    """Quote a CSV field that embeds a comma (policy labels like "lac:5,5").

    Labels never contain double quotes, so minimal quoting suffices.
    """
    return f'"{text}"' if "," in text else text


@dataclass
class MetricsReport:
    """Everything measured in one simulation run.

    rank_counters / rank_counters_late map node label -> rank -> [requests,
    hits]; the late window starts at stats_warmup_s into the run and serves
    steady-state comparisons. Deliveries are stored column-wise in
    completion order together with their cumulative mean/stddev so
    convergence can be read off at any completion index.
    """

    policy_label: str
    seed: int
    elapsed: float = 0.0
    horizon: int = 0
    stats_warmup_s: float = 0.0

    cache_labels: list = field(default_factory=list)
    rank_counters: dict = field(default_factory=dict)
    rank_counters_late: dict = field(default_factory=dict)
    node_totals: dict = field(default_factory=dict)  # label -> [req, hit, fwd, join]
    user_request_counts: dict = field(default_factory=dict)
    repo_requests: int = 0
    user_requests: int = 0

    delivery_ranks: list = field(default_factory=list)
    delivery_issued: list = field(default_factory=list)
    delivery_completed: list = field(default_factory=list)
    delivery_cum_mean: list = field(default_factory=list)
    delivery_cum_std: list = field(default_factory=list)

    links: list = field(default_factory=list)

    decision_counts: dict = field(default_factory=dict)  # label -> count
    decision_prob_sums: dict = field(default_factory=dict)
    decision_accepts: dict = field(default_factory=dict)

    # -- deliveries ---------------------------------------------------------

    @property
    def deliveries(self) -> int:
        return len(self.delivery_ranks)

    def delivery_records(self):
        for i in range(self.deliveries):
            yield DeliveryRecord(
                completion_seq=i + 1,
                rank=self.delivery_ranks[i],
                issued_at=self.delivery_issued[i],
                completed_at=self.delivery_completed[i],
            )

    def mean_delivery(self) -> float:
        if not self.delivery_cum_mean:
            raise ValueError("no deliveries recorded")
        return self.delivery_cum_mean[-1]

    def stddev_delivery(self) -> float:
        if not self.delivery_cum_std:
            raise ValueError("no deliveries recorded")
        return self.delivery_cum_std[-1]

    def cum_mean_at(self, completion_seq: int) -> float:
        if not 1 <= completion_seq <= self.deliveries:
            raise ValueError(
                f"completion_seq {completion_seq} outside 1..{self.deliveries}")
        return self.delivery_cum_mean[completion_seq - 1]

    def cum_std_at(self, completion_seq: int) -> float:
        if not 1 <= completion_seq <= self.deliveries:
            raise ValueError(
                f"completion_seq {completion_seq} outside 1..{self.deliveries}")
        return self.delivery_cum_std[completion_seq - 1]

    # -- per-rank counters --------------------------------------------------

    def miss_ratio(self, node_label: str, rank: int, late: bool = False) -> float:
        counters = self.rank_counters_late if late else self.rank_counters
        try:
            requests, hits = counters[node_label][rank]
        except KeyError:
            raise ValueError(f"no requests recorded for {node_label!r} rank {rank}")
        if requests == 0:
            raise ValueError(f"zero requests for {node_label!r} rank {rank}")
        return (requests - hits) / requests

    def miss_curve(self, node_label: str, max_rank: int, late: bool = False) -> dict:
        """rank -> miss ratio for ranks 1..max_rank that saw any requests."""
        counters = self.rank_counters_late if late else self.rank_counters
        node = counters.get(node_label, {})
        out = {}
        for rank, (requests, hits) in node.items():
            if rank <= max_rank and requests > 0:
                out[rank] = (requests - hits) / requests
        return out

    def overall_miss(self) -> float:
        """Fraction of user requests no cache answered: interest bursts that
        reached the repository over total user requests. Interests collapsed
        into an already-pending retrieval count toward the fetch that serves
        them, so this matches what the repository link actually carries."""
        if self.user_requests == 0:
            raise ValueError("no user requests recorded")
        return self.repo_requests / self.user_requests

    # -- links and decisions -------------------------------------------------

    def link(self, label: str) -> LinkStats:
        for ls in self.links:
            if ls.label == label:
                return ls
        raise KeyError(f"no link labelled {label!r}")

    def load(self, label: str) -> float:
        return link_load(self.link(label), self.elapsed)

    def mean_decision_prob(self, node_label: str = None) -> float:
        if node_label is not None:
            count = self.decision_counts.get(node_label, 0)
            if count == 0:
                raise ValueError(f"no insertion decisions at {node_label!r}")
            return self.decision_prob_sums[node_label] / count
        total = sum(self.decision_counts.values())
        if total == 0:
            raise ValueError("no insertion decisions recorded")
        return sum(self.decision_prob_sums.values()) / total

    def min_mean_decision_prob(self) -> float:
        """Smallest per-node mean decision probability (calibration knob)."""
        means = [self.decision_prob_sums[n] / c
                 for n, c in self.decision_counts.items() if c > 0]
        if not means:
            raise ValueError("no insertion decisions recorded")
        return min(means)

    # -- CSV export ----------------------------------------------------------

    def _header(self, fh):
        fh.write(f"# schema={SCHEMA_VERSION} seed={self.seed}\n")

    def export_csv(self, outdir: str):
        """Write miss_prob.csv, delivery.csv, links.csv and summary.csv."""
        os.makedirs(outdir, exist_ok=True)

        with open(os.path.join(outdir, "miss_prob.csv"), "w", newline="") as fh:
            self._header(fh)
            fh.write("node_id,rank,requests,misses,miss_ratio\n")
            for label in self.cache_labels:
                node = self.rank_counters.get(label, {})
                for rank in sorted(node):
                    requests, hits = node[rank]
                    if requests == 0:
                        raise ValueError(
                            f"empty counter for {label!r} rank {rank} at export")
                    misses = requests - hits
                    fh.write(f"{label},{rank},{requests},{misses},"
                             f"{misses / requests:.9f}\n")

        with open(os.path.join(outdir, "delivery.csv"), "w", newline="") as fh:
            self._header(fh)
            fh.write("completion_seq,rank,duration,cum_mean,cum_stddev\n")
            for i in range(self.deliveries):
                duration = self.delivery_completed[i] - self.delivery_issued[i]
                fh.write(f"{i + 1},{self.delivery_ranks[i]},{duration:.9f},"
                         f"{self.delivery_cum_mean[i]:.9f},"
                         f"{self.delivery_cum_std[i]:.9f}\n")

        with open(os.path.join(outdir, "links.csv"), "w", newline="") as fh:
            self._header(fh)
            fh.write("link_id,bytes,rho\n")
            for ls in self.links:
                fh.write(f"{ls.label},{ls.bytes},"
                         f"{link_load(ls, self.elapsed):.9f}\n")

        with open(os.path.join(outdir, "summary.csv"), "w", newline="") as fh:
            self._header(fh)
            fh.write("policy,mean_delivery,stddev_delivery,overall_miss,"
                     "mean_decision_prob\n")
            fh.write(f"{csv_field(self.policy_label)},{self.mean_delivery():.9f},"
                     f"{self.stddev_delivery():.9f},{self.overall_miss():.9f},"
                     f"{self.mean_decision_prob():.9f}\n")
