import csv
import random

import pytest

from siotrust.adversary import (
    AcquisitionEvent,
    AttackAttempt,
    AttackBehavior,
    AttackerEngine,
    AttackerProfile,
    write_attack_csv,
)
from siotrust.social import (
    ConfigError,
    Device,
    DeviceClass,
    DeviceRegistry,
    IdentitySource,
)


def build_world(manager_count=2, victim_count=3):
    registry = DeviceRegistry()
    managers = []
    for i in range(manager_count):
        dev = Device(id=f"m{i}", device_class=DeviceClass.MANAGER, home="h")
        registry.register(dev)
        managers.append(dev)
    victims = []
    for i in range(victim_count):
        dev = Device(
            id=f"v{i}",
            device_class=DeviceClass.SUBORDINATE,
            home="h",
            friends={f"v{(i + 1) % victim_count}"},
            interests={f"hobby-{i}"},
        )
        registry.register(dev)
        victims.append(dev)
    attacker = Device(id="a0", device_class=DeviceClass.SUBORDINATE)
    registry.register_bare(attacker)
    return registry, managers, victims, attacker


def make_engine(registry, attacker, seed=7, **kw):
    return AttackerEngine(attacker, AttackerProfile(**kw), registry, random.Random(seed))


class TestProfile:
    def test_defaults_hold_together(self):
        profile = AttackerProfile()
        assert profile.behavior is AttackBehavior.CHURN
        assert profile.identity_source is IdentitySource.STOLEN

    @pytest.mark.parametrize(
        "kw",
        [
            {"identity_source": IdentitySource.LEGITIMATE},
            {"pool_size": 0},
            {"attempt_interval": 0.0},
            {"deny_streak_limit": 0},
            {"idle_fraction": 1.0},
            {"idle_fraction": -0.1},
            {"speed_factor": 0.0},
            {"forged_set_size": -1},
        ],
    )
    def test_bad_profiles_rejected(self, kw):
        with pytest.raises(ConfigError):
            AttackerProfile(**kw)


class TestTheft:
    def test_steal_copies_the_presented_profile(self):
        registry, _, victims, attacker = build_world()
        engine = make_engine(registry, attacker)
        stolen = engine.steal_identity(victims[0], now=4.0)
        assert stolen.id == "v0"
        assert stolen.holder == "a0"
        assert stolen.source is IdentitySource.STOLEN
        assert stolen.friends == victims[0].friends
        assert stolen.friends is not victims[0].friends
        assert engine.events == [AcquisitionEvent(4.0, "theft", "v0", "v0")]

    def test_steal_is_idempotent_per_victim(self):
        registry, _, victims, attacker = build_world()
        engine = make_engine(registry, attacker)
        first = engine.steal_identity(victims[0])
        second = engine.steal_identity(victims[0])
        assert first is second
        assert len(engine.pool) == 1
        assert len(engine.events) == 1

    def test_registry_sees_the_duplicate(self):
        registry, _, victims, attacker = build_world()
        engine = make_engine(registry, attacker)
        engine.steal_identity(victims[1])
        assert list(registry.duplicated_identities()) == ["v1"]
        holders = {ident.holder for ident in registry.presentations("v1")}
        assert holders == {"v1", "a0"}


class TestFabrication:
    def test_ids_count_up_per_attacker(self):
        registry, _, _, attacker = build_world()
        engine = make_engine(registry, attacker)
        ids = [engine.fabricate_identity().id for _ in range(3)]
        assert ids == ["fab-a0-0", "fab-a0-1", "fab-a0-2"]

    def test_taken_ids_are_skipped(self):
        registry, _, _, attacker = build_world()
        registry.register(
            Device(id="fab-a0-0", device_class=DeviceClass.SUBORDINATE, home="h")
        )
        engine = make_engine(registry, attacker)
        assert engine.fabricate_identity().id == "fab-a0-1"

    def test_empty_forgery_without_observation(self):
        registry, _, _, attacker = build_world()
        engine = make_engine(registry, attacker, forged_set_size=3)
        minted = engine.fabricate_identity()
        assert minted.friends == set()
        assert minted.interests == set()
        assert minted.source is IdentitySource.FABRICATED

    def test_forged_sets_come_from_observation(self):
        registry, _, victims, attacker = build_world()
        engine = make_engine(registry, attacker, forged_set_size=2)
        engine.observe(victims)
        minted = engine.fabricate_identity()
        assert len(minted.friends) == 2
        assert minted.friends <= engine.observed_devices
        assert len(minted.interests) == 2
        assert minted.interests <= engine.observed_interests

    def test_forgery_is_seed_stable(self):
        draws = []
        for _ in range(2):
            registry, _, victims, attacker = build_world()
            engine = make_engine(registry, attacker, seed=11, forged_set_size=2)
            engine.observe(victims)
            minted = engine.fabricate_identity()
            draws.append((sorted(minted.friends), sorted(minted.interests)))
        assert draws[0] == draws[1]

    def test_zero_size_forges_nothing(self):
        registry, _, victims, attacker = build_world()
        engine = make_engine(registry, attacker, forged_set_size=0)
        engine.observe(victims)
        minted = engine.fabricate_identity()
        assert minted.friends == set() and minted.interests == set()


class TestChurnSchedule:
    def test_first_attempt_steals_nearest_victim(self):
        registry, managers, victims, attacker = build_world()
        engine = make_engine(registry, attacker)
        result = engine.attempt(0.0, managers, victims)
        assert result is not None
        identity, target = result
        assert identity.id == "v0"
        assert target.id == "m0"
        assert engine.presented is identity

    def test_attempt_interval_throttles(self):
        registry, managers, victims, attacker = build_world()
        engine = make_engine(registry, attacker, attempt_interval=10.0)
        assert engine.attempt(0.0, managers, victims) is not None
        assert engine.attempt(5.0, managers, victims) is None
        follow_up = engine.attempt(10.0, managers, victims)
        assert follow_up is not None

    def test_walks_untried_managers_with_one_identity(self):
        registry, managers, victims, attacker = build_world(manager_count=3)
        engine = make_engine(registry, attacker)
        seen = []
        for t in (0.0, 10.0, 20.0):
            identity, target = engine.attempt(t, managers, victims)
            seen.append((identity.id, target.id))
        assert seen == [("v0", "m0"), ("v0", "m1"), ("v0", "m2")]

    def test_rotates_after_every_manager_tried(self):
        registry, managers, victims, attacker = build_world(manager_count=2)
        engine = make_engine(registry, attacker)
        engine.attempt(0.0, managers, victims)
        engine.attempt(10.0, managers, victims)
        identity, target = engine.attempt(20.0, managers, victims)
        # fresh victim, manager slate wiped
        assert identity.id == "v1"
        assert target.id == "m0"

    def test_deny_streak_swaps_the_identity(self):
        registry, managers, victims, attacker = build_world()
        engine = make_engine(registry, attacker, deny_streak_limit=3)
        engine.attempt(0.0, managers, victims)
        assert engine.presented.id == "v0"
        for _ in range(3):
            engine.notify(False, 0.0, victims)
        assert engine.presented.id == "v1"
        # the slate reset lets it revisit the first manager
        identity, target = engine.attempt(10.0, managers, victims)
        assert (identity.id, target.id) == ("v1", "m0")

    def test_grant_clears_the_streak(self):
        registry, managers, victims, attacker = build_world()
        engine = make_engine(registry, attacker, deny_streak_limit=2)
        engine.attempt(0.0, managers, victims)
        engine.notify(False, 0.0, victims)
        engine.notify(True, 0.0, victims)
        engine.notify(False, 0.0, victims)
        assert engine.presented.id == "v0"

    def test_cycles_pool_when_no_victims_left(self):
        registry, managers, victims, attacker = build_world(victim_count=2)
        engine = make_engine(registry, attacker, deny_streak_limit=1)
        engine.attempt(0.0, managers, victims)
        engine.notify(False, 0.0, victims)  # steals v1
        engine.notify(False, 0.0, victims)  # nothing fresh, cycles back
        assert engine.presented.id == "v0"
        assert len(engine.pool) == 2

    def test_nothing_to_present_yields_none(self):
        registry, managers, _, attacker = build_world()
        engine = make_engine(registry, attacker)
        assert engine.attempt(0.0, managers, []) is None


class TestMultiSchedule:
    def test_pool_grows_one_per_call(self):
        registry, managers, victims, attacker = build_world(victim_count=3)
        engine = make_engine(
            registry, attacker, behavior=AttackBehavior.MULTI, pool_size=3
        )
        for step, expected in enumerate([1, 2, 3, 3]):
            engine.attempt(float(step), managers, victims)
            assert len(engine.pool) == expected

    def test_round_robin_over_the_active_slice(self):
        registry, managers, _, attacker = build_world()
        engine = make_engine(
            registry,
            attacker,
            behavior=AttackBehavior.MULTI,
            identity_source=IdentitySource.FABRICATED,
            pool_size=8,
            idle_fraction=2 / 3,
            attempt_interval=10.0,
        )
        for _ in range(8):
            engine.fabricate_identity()
        presented = []
        for t in (0.0, 10.0, 20.0, 30.0):
            identity, target = engine.attempt(t, managers, [])
            presented.append(identity.id)
            assert target.id == "m0"  # always the nearest manager
        # floor(8 * 1/3) = 2 active identities, alternating
        assert presented == ["fab-a0-0", "fab-a0-1", "fab-a0-0", "fab-a0-1"]

    def test_throttle_and_empty_range(self):
        registry, managers, victims, attacker = build_world()
        engine = make_engine(registry, attacker, behavior=AttackBehavior.MULTI)
        assert engine.attempt(0.0, managers, victims) is not None
        assert engine.attempt(4.0, managers, victims) is None
        assert engine.attempt(20.0, [], victims) is None

    def test_notify_is_inert(self):
        registry, managers, victims, attacker = build_world()
        engine = make_engine(
            registry, attacker, behavior=AttackBehavior.MULTI, deny_streak_limit=1
        )
        engine.attempt(0.0, managers, victims)
        before = engine.presented
        engine.notify(False, 0.0, victims)
        assert engine.presented is before


def test_attack_csv(tmp_path):
    attempts = [
        AttackAttempt(10.0, "a0", "v3", IdentitySource.STOLEN, AttackBehavior.CHURN, "m1"),
    ]
    path = tmp_path / "attacks.csv"
    write_attack_csv(attempts, path)
    header, row = list(csv.reader(path.open()))
    assert header == ["time", "attacker_device", "identity", "source", "behavior", "target_manager"]
    assert row == ["10.0", "a0", "v3", "stolen", "churn", "m1"]
