import json

import pytest

from ghl.main import main
from ghl.reporting import parse_csv


def _error_line(err: str) -> dict:
    line = next(l for l in err.splitlines() if l.startswith('{"error"'))
    return json.loads(line)


def _compute(cache_dir, *extra, global_opts=()):
    return main(["--cache-dir", str(cache_dir), *global_opts, "compute", "--group", "cyclic:3",
                 "--theory", "ext-homology", "--degrees", "0..2", *extra])


def test_compute_json(cache_dir, capsys):
    assert _compute(cache_dir) == 0
    records = json.loads(capsys.readouterr().out)
    assert [r["invariant_factors"] for r in records] == [[0], [3], []]
    assert [r["degree"] for r in records] == [0, 1, 2]
    assert not any(r["cached"] for r in records)


def test_second_run_is_served_from_cache(cache_dir, capsys):
    _compute(cache_dir)
    first = json.loads(capsys.readouterr().out)
    _compute(cache_dir)
    second = json.loads(capsys.readouterr().out)
    assert all(r["cached"] for r in second)
    strip = lambda rows: [{k: v for k, v in r.items() if k not in ("runtime_ms", "cached")} for r in rows]
    assert strip(first) == strip(second)


def test_no_cache_recomputes(cache_dir, capsys):
    _compute(cache_dir)
    capsys.readouterr()
    _compute(cache_dir, global_opts=("--no-cache",))
    assert not any(r["cached"] for r in json.loads(capsys.readouterr().out))


def test_csv_matches_json(cache_dir, capsys):
    _compute(cache_dir)
    records = json.loads(capsys.readouterr().out)
    _compute(cache_dir, global_opts=("--format", "csv"))
    rows = parse_csv(capsys.readouterr().out)
    assert rows == [{k: r[k] for k in ("theory", "group", "module", "degree", "invariant_factors")} for r in records]


def test_table_output(cache_dir, capsys):
    _compute(cache_dir, global_opts=("--format", "table"))
    out = capsys.readouterr().out
    assert "group_name" in out
    assert "Z3" in out


def test_several_theories_in_one_call(cache_dir, capsys):
    code = main(["--cache-dir", str(cache_dir), "compute", "--group", "cyclic:2",
                 "--theory", "ext-homology,sym-homology", "--degrees", "1"])
    assert code == 0
    records = json.loads(capsys.readouterr().out)
    assert [(r["theory"], r["invariant_factors"]) for r in records] == [("ext-homology", [2]), ("sym-homology", [2])]


def test_degrees_default_to_the_theory_window(cache_dir, capsys):
    code = main(["--cache-dir", str(cache_dir), "compute", "--group", "cyclic:2",
                 "--theory", "ext-homology,classical-cohomology"])
    assert code == 0
    records = json.loads(capsys.readouterr().out)
    assert [(r["theory"], r["degree"], r["invariant_factors"]) for r in records] == [
        ("ext-homology", 0, [0]),
        ("ext-homology", 1, [2]),
        ("classical-cohomology", 0, [0]),
        ("classical-cohomology", 1, []),
        ("classical-cohomology", 2, [2]),
    ]


def test_default_window_stops_at_the_cutoff(cache_dir, capsys):
    code = main(["--cache-dir", str(cache_dir), "--max-degree", "2", "compute", "--group", "cyclic:8",
                 "--theory", "ext-homology"])
    assert code == 0
    assert [r["degree"] for r in json.loads(capsys.readouterr().out)] == [0, 1, 2]


def test_unknown_group_is_a_usage_error(cache_dir, capsys):
    code = main(["--cache-dir", str(cache_dir), "compute", "--group", "cyclic:x",
                 "--theory", "ext-homology", "--degrees", "0"])
    assert code == 2
    assert _error_line(capsys.readouterr().err)["error"] == "UsageError"


def test_route_must_belong_to_the_theory(cache_dir, capsys):
    assert _compute(cache_dir, "--route", "staic") == 2


def test_budget_exceeded(cache_dir, capsys):
    code = main(["--cache-dir", str(cache_dir), "--budget", "10", "compute", "--group", "cyclic:4",
                 "--theory", "classical-homology", "--degrees", "0..3"])
    assert code == 1
    error = _error_line(capsys.readouterr().err)
    assert error["error"] == "BudgetExceededError"


def test_degree_cutoff(cache_dir, capsys):
    code = main(["--cache-dir", str(cache_dir), "--max-degree", "2", "compute", "--group", "cyclic:3",
                 "--theory", "ext-homology", "--degrees", "0..3"])
    assert code == 2
    assert _error_line(capsys.readouterr().err)["error"] == "DegreeRangeError"


def test_orientation(capsys):
    assert main(["orientation", "--group", "cyclic:4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["orientation"] == "non-oriented"
    assert report["even_order_if_non_oriented"] is True
    assert report["relabel_invariant"] is True


def test_orientation_table(capsys):
    assert main(["--format", "table", "orientation", "--group", "cyclic:3"]) == 0
    assert capsys.readouterr().out.startswith("cyclic:3: oriented")


def test_catalog(capsys):
    assert main(["catalog"]) == 0
    rows = {row["spec"]: row for row in json.loads(capsys.readouterr().out)}
    assert rows["q8"]["orientation"] == "oriented"
    assert rows["q8"]["order"] == 8


def test_transfer_cores_res(capsys):
    code = main(["transfer", "--group", "cyclic:4", "--subgroup", "gen:2", "--degree", "2"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["index"] == 2
    assert record["source"] == [4]
    assert record["is_index_multiplication"] is True


def test_transfer_rejects_homology(capsys):
    code = main(["transfer", "--group", "cyclic:4", "--subgroup", "gen:2", "--degree", "1",
                 "--theory", "ext-homology"])
    assert code == 2


def test_conjecture_experiment(capsys):
    assert main(["experiment", "conjecture-cyclic", "--orders", "2..4"]) == 0
    table = json.loads(capsys.readouterr().out)
    rows = table["rows"]
    assert all(row["agrees"] for row in rows)
    z_rows = {row["parameters"]["n"]: row for row in rows if row["parameters"]["module"] == rows[0]["parameters"]["module"]}
    assert z_rows[4]["computed"] == z_rows[4]["predicted"] == [2]
    assert z_rows[3]["computed"] == z_rows[3]["predicted"] == []


def test_cache_stats_and_gc(cache_dir, capsys):
    _compute(cache_dir)
    capsys.readouterr()
    assert main(["--cache-dir", str(cache_dir), "cache", "stats"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["entries"] == 3
    assert stats["stale"] == 0
    assert main(["--cache-dir", str(cache_dir), "cache", "gc"]) == 0
    assert json.loads(capsys.readouterr().out) == {"removed": 0}
    assert main(["--cache-dir", str(cache_dir), "cache", "gc", "--all"]) == 0
    assert json.loads(capsys.readouterr().out) == {"removed": 3}


def test_unknown_subcommand_exits_with_usage():
    with pytest.raises(SystemExit) as info:
        main(["homotopy"])
    assert info.value.code == 2
