"""Threshold admission control run by manager nodes.

A request presents an identity to a manager; the manager computes overall
trust from its own opinion (D), the presented profile's similarity to the
manager's community (S) and filtered recommendations (R), then grants
strictly above the trust threshold. A grant must precede admission;
admitting the same identity through a second device is an identity
conflict, which is surfaced to the caller as an observation rather than
acted on directly (trust is the only verdict path).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .community import Community, SimilarityWeights, community_similarity
from .social import Device, DeviceClass, DeviceRegistry, RelationType
from .trust import OpinionStore, TrustAssessment, assess, recommendation


class RoutingError(Exception):
    """Request targeted a device that is not a manager."""


class AdmissionError(Exception):
    """Admission attempted without a prior grant."""


class Verdict(Enum):
    GRANT = "grant"
    DENY = "deny"


class DecisionReason(Enum):
    GRANTED = "granted"
    BELOW_THRESHOLD = "below-threshold"


@dataclass(frozen=True)
class AccessRequest:
    """An identity asking a manager for network membership.

    `presenter` is the physical device behind the request. It is ground
    truth carried for logging and metrics only; the verdict never reads it.
    """

    time: float
    identity: str
    presenter: str
    friends: frozenset[str]
    interests: frozenset[str]
    target_manager: str

    @property
    def id(self) -> str:
        # lets a request act as a SocialProfile for similarity purposes
        return self.identity


@dataclass(frozen=True)
class AccessDecision:
    verdict: Verdict
    trust: float
    reason: DecisionReason
    assessment: TrustAssessment


@dataclass(frozen=True)
class DecisionRecord:
    """One adjudication, as logged to the decision CSV."""

    time: float
    manager: str
    identity: str
    attacker: bool
    verdict: Verdict
    trust: float

    @property
    def granted(self) -> bool:
        return self.verdict is Verdict.GRANT

    @property
    def true_device_kind(self) -> str:
        return "attacker" if self.attacker else "legitimate"


@dataclass(frozen=True)
class Admission:
    """Result of admitting an identity; conflicts list prior presenters."""

    identity: str
    manager: str
    presenter: str
    time: float
    conflicting_presenters: tuple[str, ...] = ()

    @property
    def conflict(self) -> bool:
        return bool(self.conflicting_presenters)


@dataclass
class _Profile:
    id: str
    friends: set[str]
    interests: set[str]


class AccessGate:
    """Admission control over one scenario's manager set.

    The gate owns the grant ledger and the member roster. Community state
    and recommendation aggregation are pluggable so the simulation engine
    can feed its per-epoch caches; the defaults walk the registry and the
    opinion store directly, which matches the standalone semantics.
    """

    def __init__(
        self,
        registry: DeviceRegistry,
        store: OpinionStore,
        relation_filter: RelationType,
        trust_threshold: float = 0.6,
        weights: SimilarityWeights = SimilarityWeights(),
        retry_cooldown: float = 0.0,
        attacker_devices: frozenset[str] = frozenset(),
        community_of: Callable[[str], Community | None] | None = None,
        recommender: Callable[[Device, str], float | None] | None = None,
    ) -> None:
        if not 0.0 <= trust_threshold <= 1.0:
            raise ValueError(f"trust threshold out of range: {trust_threshold}")
        self.registry = registry
        self.store = store
        self.relation_filter = relation_filter
        self.trust_threshold = trust_threshold
        self.weights = weights
        self.retry_cooldown = retry_cooldown
        self.attacker_devices = attacker_devices
        self._community_of = community_of
        self._recommender = recommender
        self._grants: set[tuple[str, str]] = set()
        self._last_denied: dict[tuple[str, str], float] = {}
        # identity -> devices that hold membership under it
        self.members: dict[str, set[str]] = {}
        self.decisions: list[DecisionRecord] = []

    # -- membership queries -------------------------------------------------

    def is_member(self, identity: str) -> bool:
        return identity in self.members

    def member_presenters(self, identity: str) -> set[str]:
        return set(self.members.get(identity, ()))

    def bootstrap_member(self, identity: str, presenter: str) -> None:
        """Seed a member without a grant (manager mesh at scenario start)."""
        self.members.setdefault(identity, set()).add(presenter)

    def retry_allowed(self, identity: str, manager: str, now: float) -> bool:
        """Deny is never permanent; a cooldown may delay the next attempt."""
        denied_at = self._last_denied.get((identity, manager))
        if denied_at is None:
            return True
        return now - denied_at >= self.retry_cooldown

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, request: AccessRequest) -> AccessDecision:
        """Adjudicate one request and log the decision."""
        manager = self.registry.device(request.target_manager)
        if manager.device_class is not DeviceClass.MANAGER:
            raise RoutingError(f"target {manager.id!r} is not a manager")

        direct = self.store.direct_trust(manager.id, request.identity)
        similarity = self._similarity(request, manager)
        recommended = self._recommendation(manager, request.identity)
        split = "internal" if self.is_member(request.identity) else "external"
        assessment = assess(
            time=request.time,
            evaluator=manager.id,
            subject=request.identity,
            relation=self.relation_filter,
            direct=direct,
            similarity=similarity,
            recommended=recommended,
            split=split,
        )
        if assessment.trust > self.trust_threshold:
            verdict, reason = Verdict.GRANT, DecisionReason.GRANTED
            self._grants.add((request.identity, manager.id))
        else:
            verdict, reason = Verdict.DENY, DecisionReason.BELOW_THRESHOLD
            self._last_denied[(request.identity, manager.id)] = request.time
        self.decisions.append(
            DecisionRecord(
                time=request.time,
                manager=manager.id,
                identity=request.identity,
                attacker=request.presenter in self.attacker_devices,
                verdict=verdict,
                trust=assessment.trust,
            )
        )
        return AccessDecision(verdict=verdict, trust=assessment.trust, reason=reason, assessment=assessment)

    def _similarity(self, request: AccessRequest, manager: Device) -> float:
        """S for the presented profile against the manager's community.

        Before the first community epoch a manager has no community yet;
        similarity evidence is then vacuous and falls back to the base rate,
        the same convention vacuous D and R follow.
        """
        community = self._community_of(manager.id) if self._community_of else None
        if community is None:
            return self.store.base_rate
        profile = _Profile(request.identity, set(request.friends), set(request.interests))
        roster = _RosterView(self.registry)
        return community_similarity(profile, community, roster, self.weights)

    def _recommendation(self, manager: Device, subject: str) -> float:
        if self._recommender is not None:
            value = self._recommender(manager, subject)
            return self.store.base_rate if value is None else value
        return recommendation(
            self.store, manager, subject, self.relation_filter, self.registry.devices()
        )

    # -- admission ----------------------------------------------------------

    def admit(self, identity: str, manager: str, presenter: str, time: float) -> Admission:
        """Turn a grant into membership.

        Admission without a logged grant for (identity, manager) is a
        contract violation. Admitting an identity already held by a
        different device reports the conflict for the caller to score.
        """
        if (identity, manager) not in self._grants:
            raise AdmissionError(f"no grant on record for {identity!r} at {manager!r}")
        holders = self.members.setdefault(identity, set())
        conflicts = tuple(sorted(h for h in holders if h != presenter))
        holders.add(presenter)
        return Admission(
            identity=identity,
            manager=manager,
            presenter=presenter,
            time=time,
            conflicting_presenters=conflicts,
        )


class _RosterView:
    """Mapping view of the registry for community_similarity."""

    def __init__(self, registry: DeviceRegistry) -> None:
        self._registry = registry

    def __getitem__(self, device_id: str) -> Device:
        return self._registry.device(device_id)


def write_decision_csv(records: Iterable[DecisionRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["time", "manager", "identity", "true_device_kind", "verdict", "trust"])
        for record in records:
            writer.writerow(
                [
                    repr(record.time),
                    record.manager,
                    record.identity,
                    record.true_device_kind,
                    record.verdict.value,
                    repr(record.trust),
                ]
            )
