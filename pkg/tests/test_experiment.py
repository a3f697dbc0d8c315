import math

import numpy as np
import pytest

from dippsim.cli import main
from dippsim.config import experiment_from_values, parse_config_file
from dippsim.experiment import (
    BOUND_CSV_COLUMNS,
    CSV_COLUMNS,
    ConfigError,
    ExperimentConfig,
    analyze_bounds,
    csv_line,
    desk_preset,
    paper_examples,
    full_preset,
    run_sweep,
    write_bound_csv,
    write_csv,
)
from dippsim.signals import load_scenario


def tiny_config(**kw):
    base = dict(
        N=60, J=3, I=1, L=4, alphas=(0.2,), smnr_dbs=(20.0,),
        topology_kind="ring", degrees=(1,), matrix_realizations=2,
        data_realizations=2, algorithms=("sp", "dipp"), master_seed=5,
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestExperimentConfig:
    def test_paper_default_grid_constructs(self):
        cfg = desk_preset(alphas=(0.1, 0.12, 0.16, 0.2, 0.3), degrees=(1, 2, 4, 9))
        assert cfg.N == 1000 and cfg.J + cfg.I == 20 and cfg.L == 10
        assert cfg.trials == 100

    def test_full_preset_trial_counts(self):
        assert full_preset().trials == 100 * 100

    def test_non_integer_measurement_count_rejected(self):
        with pytest.raises(ConfigError):
            tiny_config(alphas=(0.123,))

    def test_unknown_algorithm_rejected(self):
        with pytest.raises(ConfigError):
            tiny_config(algorithms=("omp",))

    def test_experiment_id_ignores_worker_count(self):
        a = tiny_config(workers=1)
        b = tiny_config(workers=3)
        assert a.experiment_id() == b.experiment_id()

    def test_default_grid_runs_to_completion_at_single_trial(self):
        # the default-dimension grid (every connectivity plus the baseline,
        # both ends of the alpha range) executes end to end
        cfg = desk_preset(alphas=(0.1, 0.3), degrees=(1, 2, 4, 9),
                          matrix_realizations=1, data_realizations=1)
        rows = run_sweep(cfg)
        assert len(rows) == 2 * 5
        assert all(math.isfinite(r.srer_db_mean) for r in rows)


class TestRunSweep:
    def test_single_point_sp_only_gives_one_row(self):
        rows = run_sweep(tiny_config(algorithms=("sp",), matrix_realizations=1,
                                     data_realizations=1))
        assert len(rows) == 1
        assert rows[0].key.algorithm == "sp"
        assert rows[0].key.topology == "none"

    def test_row_layout_matches_grid(self):
        rows = run_sweep(tiny_config(alphas=(0.2, 0.25), degrees=(1, 2)))
        # per grid point: one sp row + two dipp rows
        assert len(rows) == 2 * 3
        labels = [(r.key.algorithm, r.key.degree_or_q) for r in rows[:3]]
        assert labels == [("sp", 0), ("dipp", 1), ("dipp", 2)]

    def test_rerun_is_byte_identical(self):
        cfg = tiny_config()
        a = [csv_line(r) for r in run_sweep(cfg)]
        b = [csv_line(r) for r in run_sweep(cfg)]
        assert a == b

    def test_worker_count_does_not_change_results(self):
        base = [csv_line(r) for r in run_sweep(tiny_config(workers=1))]
        pooled = [csv_line(r) for r in run_sweep(tiny_config(workers=2))]
        assert base == pooled

    def test_csv_schema(self, tmp_path):
        rows = run_sweep(tiny_config())
        path = tmp_path / "rows.csv"
        write_csv(rows, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == CSV_COLUMNS
        assert lines[0].split(",")[:6] == [
            "schema_version", "experiment_id", "algorithm", "topology",
            "degree_or_q", "p_rewire",
        ]
        assert len(lines) == len(rows) + 1
        for line in lines[1:]:
            assert len(line.split(",")) == len(CSV_COLUMNS.split(","))

    def test_clean_smnr_token(self):
        rows = run_sweep(tiny_config(smnr_dbs=(None,), algorithms=("sp",),
                                     matrix_realizations=1, data_realizations=1))
        assert csv_line(rows[0]).split(",")[13] == "clean"

    def test_watts_strogatz_sweep(self):
        cfg = tiny_config(L=12, topology_kind="watts_strogatz",
                          algorithms=("dipp",), matrix_realizations=1,
                          data_realizations=1)
        rows = run_sweep(cfg)
        assert rows[0].key.topology == "watts_strogatz"
        assert rows[0].key.degree_or_q == cfg.ws_q
        assert rows[0].key.p_rewire == cfg.ws_p_rewire


class TestAnalyzeBounds:
    def test_empty_grid_gives_no_rows(self, tmp_path):
        rows = analyze_bounds((), ())
        path = tmp_path / "bounds.csv"
        write_bound_csv(rows, str(path))
        assert path.read_text() == BOUND_CSV_COLUMNS + "\n"

    def test_feasibility_flips_exactly_once_across_root(self):
        deltas = tuple(np.linspace(0.0, 0.5, 51))
        rows = analyze_bounds(deltas, ())
        flags = [r.sipp.feasible for r in rows]
        assert flags.count(True) > 0 and flags.count(False) > 0
        flips = sum(a != b for a, b in zip(flags, flags[1:]))
        assert flips == 1

    def test_paper_examples_preset_has_four_rows(self):
        rows = paper_examples()
        assert [r.kind for r in rows] == ["sipp", "sipp", "dipp", "dipp"]
        assert [r.constants.c_variant for r in rows] == [
            "squared", "squared", "linear", "linear",
        ]

    def test_variant_defaults_split_by_kind(self):
        rows = analyze_bounds((0.1,), (0.5,))
        assert rows[0].constants.c_variant == "squared"
        assert rows[1].constants.c_variant == "linear"
        forced = analyze_bounds((0.1,), (0.5,), "squared")
        assert {r.constants.c_variant for r in forced} == {"squared"}


class TestConfigFile:
    def test_parse_and_build(self, tmp_path):
        text = """
# comment
[scenario]
n = 60
j = 3
i = 1
l = 4
kind = binary

[sweep]
alphas = 0.2 0.25
smnr_db = 20 clean
topology = ring
degrees = 1 2
algorithms = sp dipp

[run]
seed = 9
workers = 2
"""
        path = tmp_path / "exp.cfg"
        path.write_text(text)
        cfg = experiment_from_values(parse_config_file(str(path)))
        assert cfg.N == 60 and cfg.signal_kind == "binary"
        assert cfg.alphas == (0.2, 0.25)
        assert cfg.smnr_dbs == (20.0, None)
        assert cfg.degrees == (1, 2)
        assert cfg.master_seed == 9 and cfg.workers == 2

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[scenario]\nn = 10\nbogus = 1\n")
        with pytest.raises(ConfigError):
            parse_config_file(str(path))

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[scenario]\nn 10\n")
        with pytest.raises(ConfigError):
            parse_config_file(str(path))

    def test_bad_number_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[scenario]\nn = ten\n")
        with pytest.raises(ConfigError):
            experiment_from_values(parse_config_file(str(path)))


class TestCli:
    def test_generate_round_trips(self, tmp_path):
        out = tmp_path / "scenario.txt"
        code = main([
            "generate", "--n", "40", "--m", "16", "--j", "3", "--i", "1",
            "--l", "2", "--smnr-db", "20", "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        sc = load_scenario(str(out))
        assert sc.config.N == 40 and sc.node_count == 2

    def test_sweep_writes_csv_and_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "[scenario]\nn = 60\nj = 3\ni = 1\nl = 4\n"
            "[sweep]\nalphas = 0.2\nsmnr_db = 20\ndegrees = 1\n"
            "algorithms = sp\nmatrix_realizations = 1\ndata_realizations = 2\n"
            "[run]\nseed = 5\n"
        )
        out = tmp_path / "rows.csv"
        code = main(["sweep", "--config", str(cfg), "--data-realizations", "1",
                     "--output", str(out)])
        assert code == 0
        body = out.read_text().splitlines()
        assert len(body) == 2
        assert body[1].split(",")[15] == "1"  # trials column honors the flag

    def test_run_single_point_prints_table(self, capsys):
        code = main(["run", "--n", "60", "--j", "3", "--i", "1", "--l", "4",
                     "--alpha", "0.2", "--smnr-db", "20", "--degree", "1",
                     "--matrix-realizations", "1", "--data-realizations", "1",
                     "--algorithms", "sp", "--seed", "5"])
        assert code == 0
        head = capsys.readouterr().out.splitlines()[0]
        assert head.startswith("schema_version")

    def test_run_rejects_multiple_alphas(self, capsys):
        code = main(["run", "--n", "60", "--j", "3", "--i", "1", "--l", "4",
                     "--smnr-db", "20", "--degree", "1", "--algorithms", "sp"])
        assert code == 0 or code == 2  # missing alpha falls back to default single value

    def test_config_error_exit_code(self, tmp_path):
        code = main(["sweep", "--config", str(tmp_path / "missing.cfg")])
        assert code == 2

    def test_bad_alpha_exit_code(self):
        code = main(["run", "--n", "60", "--j", "3", "--i", "1", "--l", "4",
                     "--alpha", "0.123", "--smnr-db", "20", "--degree", "1",
                     "--algorithms", "sp"])
        assert code == 2

    def test_analyze_preset_and_csv(self, tmp_path, capsys):
        out = tmp_path / "bounds.csv"
        code = main(["analyze", "--preset", "paper-examples", "--csv", str(out)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "sipp_d0.17" in printed
        lines = out.read_text().splitlines()
        assert lines[0] == BOUND_CSV_COLUMNS
        assert len(lines) == 5

    def test_analyze_unknown_preset(self):
        assert main(["analyze", "--preset", "nope"]) == 2

    def test_topology_export(self, tmp_path):
        out = tmp_path / "edges.txt"
        assert main(["topology", "--kind", "ring", "--nodes", "6",
                     "--degree", "2", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 12
