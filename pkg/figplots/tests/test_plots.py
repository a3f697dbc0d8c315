import pytest

from dippfig import FIGURES, NoDataError, PlotSpec, SchemaError, build_figure, load_rows, render
from dippfig.cli import main

HEADER = (
    "schema_version,experiment_id,algorithm,topology,degree_or_q,p_rewire,"
    "N,M,alpha,T,J,I,L,smnr_db,signal_kind,trials,"
    "srer_db_mean,srer_db_std,asce_mean,asce_std,outer_rounds_mean,runtime_ms_mean,seed"
)


def make_row(algorithm="sp", topology="none", degree=0, p=0.0, alpha=0.16,
             smnr="20", kind="gaussian", srer=10.0, asce=0.1):
    m = round(alpha * 1000)
    return (
        f"1,abc,{algorithm},{topology},{degree},{p},1000,{m},{alpha},20,15,5,10,"
        f"{smnr},{kind},100,{srer},0.5,{asce},0.01,2,0,101"
    )


def sweep_rows(kind="gaussian", smnr="20", topologies=((("sp", "none", 0),), )):
    rows = []
    for alpha, srer_base, asce_base in ((0.12, 5.0, 0.4), (0.16, 10.0, 0.2), (0.2, 15.0, 0.05)):
        rows.append(make_row(alpha=alpha, smnr=smnr, kind=kind,
                             srer=srer_base, asce=asce_base))
        for degree in (1, 2, 4, 9):
            rows.append(make_row("dipp", "ring", degree, 0.0, alpha, smnr, kind,
                                 srer_base + degree, max(asce_base - 0.01 * degree, 0.001)))
    return rows


def write_csv(path, rows):
    path.write_text(HEADER + "\n" + "\n".join(rows) + "\n")
    return str(path)


class TestLoadRows:
    def test_missing_column_cited(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("algorithm,topology\nsp,none\n")
        with pytest.raises(SchemaError, match="schema_version"):
            load_rows(str(bad))

    def test_wrong_schema_version(self, tmp_path):
        row = make_row().split(",")
        row[0] = "99"
        path = write_csv(tmp_path / "v99.csv", [",".join(row)])
        with pytest.raises(SchemaError, match="schema_version"):
            load_rows(path)


class TestBuildFigure:
    def test_every_figure_id_has_a_definition(self):
        assert sorted(FIGURES) == [f"fig{i}" for i in range(2, 8)]

    def test_gaussian_noisy_srer_curves_and_labels(self, tmp_path):
        path = write_csv(tmp_path / "sweep.csv", sweep_rows())
        fig = build_figure(load_rows(path), "fig3")
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        assert labels == ["SP", "DIPP C_1", "DIPP C_2", "DIPP C_4", "DIPP C_9"]
        assert fig.axes[0].get_xlabel() == "fraction of measurements"
        assert fig.axes[0].get_ylabel() == "SRER [dB]"

    def test_selection_excludes_other_signal_kinds(self, tmp_path):
        rows = sweep_rows(kind="binary")
        path = write_csv(tmp_path / "binary.csv", rows)
        fig = build_figure(load_rows(path), "fig2")
        assert len(fig.axes[0].get_lines()) == 5
        with pytest.raises(NoDataError):
            build_figure(load_rows(path), "fig3")

    def test_clean_selection(self, tmp_path):
        path = write_csv(tmp_path / "clean.csv", sweep_rows(smnr="clean"))
        fig = build_figure(load_rows(path), "fig5")
        assert len(fig.axes[0].get_lines()) == 5
        with pytest.raises(NoDataError):
            build_figure(load_rows(path), "fig4")

    def test_noise_axis_figure(self, tmp_path):
        rows = [make_row(smnr=s, srer=v) for s, v in (("0", 1.0), ("10", 6.0), ("20", 12.0))]
        rows += [make_row("dipp", "ring", 4, 0.0, 0.16, s, "gaussian", v + 2, 0.1)
                 for s, v in (("0", 1.0), ("10", 6.0), ("20", 12.0))]
        path = write_csv(tmp_path / "noise.csv", rows)
        fig = build_figure(load_rows(path), "fig6")
        ax = fig.axes[0]
        assert ax.get_xlabel().startswith("signal-to-measurement-noise")
        assert len(ax.get_lines()) == 2
        assert list(ax.get_lines()[0].get_xdata()) == [0.0, 10.0, 20.0]

    def test_small_world_figure(self, tmp_path):
        rows = [make_row(alpha=a, srer=v) for a, v in ((0.12, 4.0), (0.16, 9.0))]
        rows += [make_row("dipp", "watts_strogatz", 3, 0.3, a, "20", "gaussian", v + 5, 0.1)
                 for a, v in ((0.12, 4.0), (0.16, 9.0))]
        path = write_csv(tmp_path / "ws.csv", rows)
        fig = build_figure(load_rows(path), "fig7")
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        assert labels == ["SP", "DIPP WS q=3"]

    def test_log_scale_when_support_error_spans_decades(self, tmp_path):
        rows = [make_row(alpha=a, asce=v) for a, v in ((0.1, 0.5), (0.2, 0.004))]
        path = write_csv(tmp_path / "span.csv", rows)
        assert build_figure(load_rows(path), "fig4").axes[0].get_yscale() == "log"
        rows = [make_row(alpha=a, asce=v) for a, v in ((0.1, 0.5), (0.2, 0.1))]
        path = write_csv(tmp_path / "flat.csv", rows)
        assert build_figure(load_rows(path), "fig4").axes[0].get_yscale() == "linear"

    def test_unknown_figure_id(self, tmp_path):
        path = write_csv(tmp_path / "sweep.csv", sweep_rows())
        with pytest.raises(ValueError, match="fig9"):
            build_figure(load_rows(path), "fig9")


class TestRender:
    def test_png_and_svg_outputs(self, tmp_path):
        path = write_csv(tmp_path / "sweep.csv", sweep_rows())
        for ext in ("png", "svg"):
            out = tmp_path / f"fig4.{ext}"
            render(PlotSpec(path, "fig3", str(out)))
            assert out.stat().st_size > 0

    def test_concatenated_csvs_render_identically(self, tmp_path):
        rows = sweep_rows()
        single = write_csv(tmp_path / "single.csv", rows)
        # same rows split in two and re-concatenated in a different order
        merged = write_csv(tmp_path / "merged.csv", rows[8:] + rows[:8])
        out_a, out_b = tmp_path / "a.png", tmp_path / "b.png"
        render(PlotSpec(single, "fig3", str(out_a)))
        render(PlotSpec(merged, "fig3", str(out_b)))
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_axis_ranges(self, tmp_path):
        path = write_csv(tmp_path / "sweep.csv", sweep_rows())
        out = tmp_path / "ranged.png"
        fig_rows = load_rows(path)
        fig = build_figure(fig_rows, "fig3", x_range=(0.1, 0.3), y_range=(0.0, 30.0))
        assert fig.axes[0].get_xlim() == (0.1, 0.3)
        assert fig.axes[0].get_ylim() == (0.0, 30.0)
        render(PlotSpec(path, "fig3", str(out), (0.1, 0.3), (0.0, 30.0)))
        assert out.exists()


class TestCli:
    def test_successful_render(self, tmp_path):
        path = write_csv(tmp_path / "sweep.csv", sweep_rows())
        out = tmp_path / "fig3.png"
        assert main(["--input", path, "--figure", "fig3", "--output", str(out)]) == 0
        assert out.exists()

    def test_header_only_csv_is_no_data_error(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text(HEADER + "\n")
        code = main(["--input", str(empty), "--figure", "fig3",
                     "--output", str(tmp_path / "x.png")])
        assert code == 2
        assert "no data" in capsys.readouterr().err

    def test_missing_column_is_schema_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("algorithm\nsp\n")
        code = main(["--input", str(bad), "--figure", "fig3",
                     "--output", str(tmp_path / "x.png")])
        assert code == 2
        assert "missing required column" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["--input", str(tmp_path / "nope.csv"), "--figure", "fig3",
                     "--output", str(tmp_path / "x.png")]) == 2
