import sqlite3
from datetime import timedelta

import pytest

import run_store
from run_store import RunStatus, RunStore, get_run_store


@pytest.fixture
def store(tmp_path):
    return RunStore(str(tmp_path / "runs.db"))


def test_create_and_complete(store):
    record = store.create_run("phase", {"model": "models/rem.json", "nx": 10}, seed=3)
    assert record.id is not None
    assert record.status is RunStatus.RUNNING

    assert store.complete_run(record.id, ["phases.csv"], manifest_path="phase-1.manifest.json")
    loaded = store.get_run(record.id)
    assert loaded.status is RunStatus.SUCCEEDED
    assert loaded.exit_code == 0
    assert loaded.outputs == ["phases.csv"]
    assert loaded.manifest_path == "phase-1.manifest.json"
    assert loaded.config["nx"] == 10
    assert loaded.updated_at >= loaded.created_at


def test_fail_run_keeps_message(store):
    record = store.create_run("zeta", {}, seed=0)
    store.fail_run(record.id, 2, "z outside D/2")
    loaded = store.get_run(record.id)
    assert loaded.status is RunStatus.FAILED
    assert (loaded.exit_code, loaded.message) == (2, "z outside D/2")
    assert loaded.outputs == []


def test_timestamps_are_utc_aware(store):
    record = store.create_run("crem", {}, seed=1)
    assert record.created_at.utcoffset() == timedelta(0)
    store.fail_run(record.id, 2, "bad profile")
    loaded = store.get_run(record.id)
    assert loaded.created_at.utcoffset() == timedelta(0)
    assert loaded.updated_at.utcoffset() == timedelta(0)
    assert loaded.updated_at >= loaded.created_at


def test_missing_run(store):
    assert store.get_run(999) is None


def test_list_runs_filters_and_orders(store):
    first = store.create_run("phase", {})
    second = store.create_run("moments", {})
    third = store.create_run("phase", {})
    store.complete_run(third.id, [])

    assert [r.id for r in store.list_runs()] == [third.id, second.id, first.id]
    assert [r.id for r in store.list_runs(command="phase")] == [third.id, first.id]
    assert [r.id for r in store.list_runs(status=RunStatus.RUNNING)] == [second.id, first.id]
    assert len(store.list_runs(limit=1)) == 1


def test_statistics(store):
    store.complete_run(store.create_run("phase", {}).id, [])
    store.fail_run(store.create_run("phase", {}).id, 3, "boom")
    store.create_run("crem", {})
    stats = store.get_statistics()
    assert stats["total_runs"] == 3
    assert stats["status_counts"] == {"succeeded": 1, "failed": 1, "running": 1}
    assert stats["command_counts"] == {"phase": 2, "crem": 1}
    assert stats["avg_duration_seconds"] >= 0


def test_old_registry_is_migrated(tmp_path):
    path = str(tmp_path / "old.db")
    with sqlite3.connect(path) as conn:
        conn.execute("""
            CREATE TABLE runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT, command TEXT NOT NULL, status TEXT NOT NULL,
                seed INTEGER, config TEXT NOT NULL, created_at TIMESTAMP NOT NULL,
                updated_at TIMESTAMP NOT NULL, manifest_path TEXT, outputs TEXT
            )
        """)
    store = RunStore(path)
    record = store.create_run("phase", {})
    store.fail_run(record.id, 1, "bad input")
    assert store.get_run(record.id).message == "bad input"


def test_global_store_uses_environment(registry_path):
    store = get_run_store()
    assert store.db_path == registry_path
    assert get_run_store() is store
    assert run_store._run_store is store
