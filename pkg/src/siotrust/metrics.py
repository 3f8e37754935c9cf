"""Detection metrics over adjudicated access decisions, and the ESR curve.

The positive class is the attack: a denied attacker request is a true
positive (an attack correctly detected), a granted one a false negative.
Granted legitimate requests are true negatives (legitimate correctly
identified), denied ones false positives. Undefined rates (an empty
denominator) surface as None, never as zero.
"""

from __future__ import annotations

import csv
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence


class AdjudicatedRequest(Protocol):
    attacker: bool
    granted: bool


@dataclass
class ConfusionCounters:
    """Incremental confusion counts over adjudicated requests.

    acd:       attacker requests denied (attacks correctly detected)
    false_neg: attacker requests granted (attacks that slipped through)
    lci:       legitimate requests granted (legitimate correctly identified)
    false_pos: legitimate requests denied
    """

    acd: int = 0
    false_neg: int = 0
    lci: int = 0
    false_pos: int = 0

    def record(self, attacker: bool, granted: bool) -> None:
        if attacker:
            if granted:
                self.false_neg += 1
            else:
                self.acd += 1
        else:
            if granted:
                self.lci += 1
            else:
                self.false_pos += 1

    @classmethod
    def from_requests(cls, requests: Iterable[AdjudicatedRequest]) -> "ConfusionCounters":
        counters = cls()
        for request in requests:
            counters.record(request.attacker, request.granted)
        return counters

    @property
    def aot(self) -> int:
        """Attacks over time: every adjudicated attacker request."""
        return self.acd + self.false_neg

    @property
    def ar(self) -> int:
        """All adjudicated requests."""
        return self.acd + self.false_neg + self.lci + self.false_pos

    @property
    def true_pos(self) -> int:
        return self.acd

    @property
    def true_neg(self) -> int:
        return self.lci


def detection_rate(c: ConfusionCounters) -> float | None:
    """Percent of attacker requests denied; None when no attacks happened."""
    if c.aot == 0:
        return None
    return 100.0 * c.acd / c.aot


def accuracy(c: ConfusionCounters) -> float | None:
    """Fraction of all requests adjudicated correctly."""
    if c.ar == 0:
        return None
    return (c.acd + c.lci) / c.ar


def false_negative_rate(c: ConfusionCounters) -> float | None:
    """Percent of attacks granted, out of all adjudicated attacks."""
    denominator = c.false_neg + c.true_pos
    if denominator == 0:
        return None
    return 100.0 * c.false_neg / denominator


def false_positive_rate(c: ConfusionCounters) -> float | None:
    """Percent of legitimate requests denied, out of all legitimate requests."""
    denominator = c.false_pos + c.true_neg
    if denominator == 0:
        return None
    return 100.0 * c.false_pos / denominator


@dataclass(frozen=True)
class MetricsReport:
    scenario: str
    context: str
    relation: str
    seed: int
    counters: ConfusionCounters

    @property
    def dr(self) -> float | None:
        return detection_rate(self.counters)

    @property
    def acc(self) -> float | None:
        return accuracy(self.counters)

    @property
    def fn(self) -> float | None:
        return false_negative_rate(self.counters)

    @property
    def fp(self) -> float | None:
        return false_positive_rate(self.counters)


NA = "NA"


def _cell(value: float | None) -> str:
    return NA if value is None else repr(value)


def write_metrics_csv(reports: Iterable[MetricsReport], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["scenario", "context", "relation", "seed", "DR", "ACC", "FN", "FP"])
        for report in reports:
            writer.writerow(
                [
                    report.scenario,
                    report.context,
                    report.relation,
                    report.seed,
                    _cell(report.dr),
                    _cell(report.acc),
                    _cell(report.fn),
                    _cell(report.fp),
                ]
            )


def esr_cdf(values: Sequence[float]) -> list[tuple[float, float]] | None:
    """Empirical CDF of trust values as (value, cumulative fraction) points.

    Tied values all carry the fraction of samples at or below them, so the
    curve is nondecreasing and ends at exactly 1.0. An empty sample set has
    no CDF and yields None rather than a degenerate curve.
    """
    if not values:
        return None
    ordered = sorted(values)
    n = len(ordered)
    return [(v, bisect_right(ordered, v) / n) for v in ordered]


def write_esr_csv(split_values: Mapping[str, Sequence[float]], path: str | Path) -> None:
    """ESR curves per split (internal/external); empty splits emit no rows."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["split", "trust", "cum_fraction"])
        for split in sorted(split_values):
            curve = esr_cdf(split_values[split])
            if curve is None:
                continue
            for value, fraction in curve:
                writer.writerow([split, repr(value), repr(fraction)])
