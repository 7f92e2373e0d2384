# tests/test_run_history.py

from concurrent.futures import ThreadPoolExecutor

from memory.run_history import METRICS, RunHistory


def test_store_and_retrieve():
    hist = RunHistory()
    hist.store("relax-hedgehog", step=1, energy=10.0, update=1e-2, max_norm=0.99)
    hist.store("relax-hedgehog", step=2, energy=9.5, update=5e-3, max_norm=0.99)
    trace = hist.get_history("relax-hedgehog")
    assert trace["step"] == [1, 2]
    assert trace["energy"] == [10.0, 9.5]
    assert trace["update"] == [1e-2, 5e-3]
    assert trace["max_norm"] == [0.99, 0.99]


def test_unknown_run_is_empty():
    hist = RunHistory()
    assert hist.get_history("missing") == {}
    assert list(hist.frame("missing").columns) == list(METRICS)


def test_energy_increases_and_frame():
    hist = RunHistory()
    for step, energy in enumerate([5.0, 4.0, 4.5, 3.0], start=1):
        hist.store("run", step, energy, 0.1, 1.0)
    assert hist.energy_increases("run") == [0.5]
    frame = hist.frame("run")
    assert list(frame.columns) == list(METRICS)
    assert len(frame) == 4


def test_max_history_bounds_each_run():
    hist = RunHistory(max_history=3)
    for step in range(10):
        hist.store("run", step, float(-step), 0.0, 1.0)
    assert hist.get_history("run")["step"] == [7, 8, 9]


def test_concurrent_stores_are_all_recorded():
    hist = RunHistory()

    def worker(run_id):
        for step in range(500):
            hist.store(run_id, step, 1.0, 0.0, 1.0)

    with ThreadPoolExecutor(max_workers=4) as executor:
        list(executor.map(worker, ["a", "b", "c", "d"]))
    assert all(len(hist.get_history(run)["step"]) == 500 for run in "abcd")
