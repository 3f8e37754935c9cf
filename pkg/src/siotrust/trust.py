"""Subjective-logic opinions and the composite trust evaluation.

An opinion about an identity is the evidence pair (positive, negative)
mapped to belief, disbelief and uncertainty:

    b = r / (r + s + 2),  d = s / (r + s + 2),  u = 2 / (r + s + 2)

with b + d + u = 1 by construction. A context base rate a in [0, 1] fills
the uncertain mass, so the expected value of an opinion is E = b + a * u.
Both direct trust and each received recommendation are expected values; a
fresh (vacuous) opinion therefore evaluates to the base rate itself.

Overall trust blends direct trust D, community similarity S and the
aggregated recommendation R as

    T = alpha * D + beta * S + gamma * R

where gamma comes from the social relation of the evaluation and
alpha = beta = (1 - gamma) / 2, so the three weights sum to one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean
from typing import Iterable, Literal, Sequence

from .social import Device, RelationType, classify_relation

Outcome = Literal["positive", "negative"]


@dataclass
class Opinion:
    """Evidence counters for one evaluator's view of one identity."""

    positive: int = 0
    negative: int = 0
    base_rate: float = 0.5

    def __post_init__(self) -> None:
        if self.positive < 0 or self.negative < 0:
            raise ValueError("evidence counts must be non-negative")
        if not 0.0 <= self.base_rate <= 1.0:
            raise ValueError(f"base rate out of range: {self.base_rate}")

    def components(self) -> tuple[float, float, float]:
        """(belief, disbelief, uncertainty)."""
        mass = self.positive + self.negative + 2
        return self.positive / mass, self.negative / mass, 2 / mass

    def expected_value(self) -> float:
        belief, _, uncertainty = self.components()
        return belief + self.base_rate * uncertainty

    def record(self, outcome: Outcome) -> None:
        if outcome == "positive":
            self.positive += 1
        elif outcome == "negative":
            self.negative += 1
        else:
            raise ValueError(f"unknown outcome: {outcome!r}")

    @property
    def total(self) -> int:
        return self.positive + self.negative


class OpinionStore:
    """Opinions keyed by (evaluator device id, subject identity id).

    The store carries the run's context base rate; opinions are created
    lazily at (0, 0) when evidence first arrives.
    """

    def __init__(self, base_rate: float) -> None:
        if not 0.0 <= base_rate <= 1.0:
            raise ValueError(f"base rate out of range: {base_rate}")
        self.base_rate = base_rate
        self._opinions: dict[tuple[str, str], Opinion] = {}

    def get(self, evaluator: str, subject: str) -> Opinion | None:
        return self._opinions.get((evaluator, subject))

    def opinion(self, evaluator: str, subject: str) -> Opinion:
        key = (evaluator, subject)
        found = self._opinions.get(key)
        if found is None:
            found = Opinion(base_rate=self.base_rate)
            self._opinions[key] = found
        return found

    def record_experience(self, evaluator: str, subject: str, outcome: Outcome) -> Opinion:
        opinion = self.opinion(evaluator, subject)
        opinion.record(outcome)
        return opinion

    def direct_trust(self, evaluator: str, subject: str) -> float:
        """Expected value of the evaluator's own opinion; vacuous -> base rate."""
        opinion = self.get(evaluator, subject)
        if opinion is None:
            return self.base_rate
        return opinion.expected_value()

    def opinions_of(self, evaluator: str) -> dict[str, Opinion]:
        """subject -> opinion for one evaluator, subjects sorted."""
        picked = {
            subject: op
            for (holder, subject), op in self._opinions.items()
            if holder == evaluator
        }
        return dict(sorted(picked.items()))

    def by_evaluator(self) -> dict[str, dict[str, Opinion]]:
        """One pass over the whole store, grouped and sorted.

        The periodic recommendation exchange reads every evaluator's
        opinions at once; per-evaluator opinions_of calls would rescan
        the store once per sender.
        """
        grouped: dict[str, dict[str, Opinion]] = {}
        for (holder, subject), op in sorted(self._opinions.items()):
            grouped.setdefault(holder, {})[subject] = op
        return grouped

    def __len__(self) -> int:
        return len(self._opinions)


def aggregate_expected(values: Sequence[float], base_rate: float) -> float:
    """Mean of recommendation expected values; vacuous falls back to the base rate."""
    if not values:
        return base_rate
    return fmean(values)


def recommendation(
    store: OpinionStore,
    evaluator: Device,
    subject: str,
    relation_filter: RelationType,
    recommenders: Iterable[Device],
) -> float:
    """Aggregate recommendations about a subject from matching recommenders.

    A recommender counts when its relation to the evaluator matches the
    filter and it actually holds an opinion about the subject. The evaluator
    itself never recommends to itself.
    """
    values = []
    for rec in sorted(recommenders, key=lambda d: d.id):
        if rec.id == evaluator.id:
            continue
        if classify_relation(evaluator, rec) is not relation_filter:
            continue
        opinion = store.get(rec.id, subject)
        if opinion is not None:
            values.append(opinion.expected_value())
    return aggregate_expected(values, store.base_rate)


def weights_from_relation(relation: RelationType) -> tuple[float, float, float]:
    """(alpha, beta, gamma) for a relation; the sum is exactly 1.0."""
    gamma = relation.gamma
    alpha = (1.0 - gamma) / 2.0
    return alpha, alpha, gamma


def overall_trust(direct: float, similarity: float, recommended: float, relation: RelationType) -> float:
    """Weighted blend of the three trust components."""
    for name, value in (("direct", direct), ("similarity", similarity), ("recommended", recommended)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} trust component out of range: {value}")
    alpha, beta, gamma = weights_from_relation(relation)
    return alpha * direct + beta * similarity + gamma * recommended


@dataclass(frozen=True)
class TrustAssessment:
    """One evaluation of a subject identity, with its component breakdown."""

    time: float
    evaluator: str
    subject: str
    relation: RelationType
    direct: float
    similarity: float
    recommended: float
    trust: float
    split: str = "external"  # internal | external, for the ESR series


def assess(
    time: float,
    evaluator: str,
    subject: str,
    relation: RelationType,
    direct: float,
    similarity: float,
    recommended: float,
    split: str = "external",
) -> TrustAssessment:
    trust = overall_trust(direct, similarity, recommended, relation)
    return TrustAssessment(
        time=time,
        evaluator=evaluator,
        subject=subject,
        relation=relation,
        direct=direct,
        similarity=similarity,
        recommended=recommended,
        trust=trust,
        split=split,
    )


def write_trust_trace_csv(assessments: Iterable[TrustAssessment], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["time", "evaluator", "subject", "relation", "D", "S", "R", "T"])
        for item in assessments:
            writer.writerow(
                [
                    repr(item.time),
                    item.evaluator,
                    item.subject,
                    item.relation.value,
                    repr(item.direct),
                    repr(item.similarity),
                    repr(item.recommended),
                    repr(item.trust),
                ]
            )
