import pytest

from photonroute import BenchConfig, build_chain, dfs_all_paths, emit_table, run_bench
from photonroute.bench import ALGORITHMS, COLUMNS, BenchError, BenchReport, parallel_ports, sample_pairs


@pytest.fixture(scope="module")
def report(net5):
    cfg = BenchConfig(algorithms=("dijkstra", "bidirectional", "dfs-shortest", "dfs-multi", "hash-list"),
                      count=12, seed=2)
    return run_bench(cfg, net5)


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(count=0)
    with pytest.raises(ValueError):
        BenchConfig(repetitions=0)
    with pytest.raises(ValueError):
        BenchConfig(algorithms=())
    with pytest.raises(ValueError):
        BenchConfig(algorithms=("quantum",))


def test_from_dict_ignores_unknown_keys():
    cfg = BenchConfig.from_dict({"algorithms": ["dfs-shortest"], "count": 3, "comment": "x"})
    assert cfg.algorithms == ("dfs-shortest",) and cfg.count == 3


def test_sampling_deterministic(net5):
    a = sample_pairs(net5, 20, 7)
    assert a == sample_pairs(net5, 20, 7)
    assert a != sample_pairs(net5, 20, 8)
    clean = sample_pairs(net5, 200, 7, include_parallel=False)
    assert not any(parallel_ports(net5, s, t) for s, t in clean)


def test_rows(report, net5):
    assert [r.mode for r in report.rows] == ["dijkstra", "bidirectional", "dfs-shortest", "dfs-multi", "hash-list"]
    for r in report.rows:
        assert r.total_units == 36
        assert r.complexity == ALGORITHMS[r.mode][1]
        assert r.time_s > 0
    assert report.row("dfs-shortest").paths_found == 12
    assert report.row("dfs-multi").aggregate == "total"


def test_labels(report):
    assert report.row("dfs-shortest").complexity == "O(V+E)"
    assert report.row("bidirectional").complexity == "O(2^(d/2))"


def test_all_paths_count_matches_direct_call(net5):
    cfg = BenchConfig(algorithms=("dfs-all",), count=3, seed=1)
    rep = run_bench(cfg, net5)
    direct = sum(len(dfs_all_paths(net5, s, t)) for s, t in rep.pairs[:3])
    assert rep.row("dfs-all").paths_found == direct


def test_markdown(report):
    text = emit_table(report, "markdown")
    lines = text.splitlines()
    assert lines[0] == "| " + " | ".join(COLUMNS) + " |"
    assert len(lines) == 2 + len(report.rows)


def test_csv(report):
    text = emit_table(report, "csv")
    assert text.splitlines()[0] == ",".join(COLUMNS)


def test_empty_report():
    with pytest.raises(ValueError):
        emit_table(BenchReport([], []))
    with pytest.raises(ValueError):
        emit_table(BenchReport([], []), "html")


def test_nothing_found():
    # a single unit has no cycles at all
    g = build_chain(1)
    cfg = BenchConfig(algorithms=("dfs-cycles",), count=2)
    with pytest.raises(BenchError):
        run_bench(cfg, g)


def test_parallel_matches_serial(net5):
    base = dict(algorithms=("dfs-shortest",), count=6, seed=3)
    a = run_bench(BenchConfig(**base), net5)
    b = run_bench(BenchConfig(parallel=True, workers=2, **base), net5)
    assert a.row("dfs-shortest").paths_found == b.row("dfs-shortest").paths_found
    assert a.row("dfs-shortest").max_units == b.row("dfs-shortest").max_units


def test_amortization_needs_multi():
    with pytest.raises(BenchError):
        run_bench(BenchConfig(algorithms=("dfs-shortest",), count=2, amortization_factor=5))
