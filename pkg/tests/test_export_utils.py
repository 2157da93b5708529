import io

import pytest
from openpyxl import load_workbook

from errors import FormatError
from export_utils import (
    boundary_frame,
    export_report_excel,
    export_report_pdf,
    plot_adjacency_svg,
    plot_boundary_svg,
    read_support_csv,
    support_frame,
    trajectory_frame,
    write_support_csv,
)
from geometry import boundary_samples
from graph_core import partition_recovery, turan_graph
from mcmc import make_config, run, turan_mode_check


@pytest.fixture
def report():
    return {
        "preset": "fig4",
        "description": "generic direction",
        "n": 30,
        "beta": [80.0, -40.0],
        "steps": 1000,
        "prediction": {"class": "TuranClass(4)"},
        "mode_check": turan_mode_check(30, (80, -40)).to_dict(),
        "chains": [{
            "init": "Turan(4)",
            "terminal": [0.75, 0.375],
            "nearest_j": 3,
            "max_excursion": 0.01,
            "acceptance_rate": 0.001,
            "partition": {"classes": 4, "misfit": 0.0},
        }],
    }


def test_support_csv(tmp_path, support_tables):
    path = tmp_path / "support5.csv"
    write_support_csv(support_tables[5], str(path))
    assert path.read_text().startswith("# n=5\nE,T,e,t,count\n")
    loaded = read_support_csv(str(path))
    assert loaded.n == 5
    assert loaded.counts == support_tables[5].counts


def test_support_csv_without_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("E,T,count\n0,0,1\n")
    with pytest.raises(FormatError):
        read_support_csv(str(path))


def test_frames(support_tables):
    frame = support_frame(support_tables[3])
    assert list(frame["count"]) == [1, 3, 3, 1]
    assert frame["t"].iloc[-1] == pytest.approx(6 / 27)

    rows = boundary_samples(3)
    assert list(boundary_frame(rows).columns) == ["e", "lower", "upper", "vertex"]

    traj = run(make_config(n=5, beta=(0, 0), steps=100, seed=1, thin=10))
    assert len(trajectory_frame(traj)) == 11


def test_svg_output_is_deterministic(tmp_path):
    rows = boundary_samples(21)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    plot_boundary_svg(rows, str(a))
    plot_boundary_svg(rows, str(b))
    assert a.read_bytes() == b.read_bytes()
    assert b"<svg" in a.read_bytes()


def test_adjacency_svg(tmp_path):
    g = turan_graph(9, 3)
    path = tmp_path / "adj.svg"
    plot_adjacency_svg(g, partition_recovery(g), str(path))
    assert path.stat().st_size > 0


def test_pdf_report(report):
    data = export_report_pdf(report).getvalue()
    assert data.startswith(b"%PDF")


def test_excel_report(report):
    workbook = load_workbook(io.BytesIO(export_report_excel(report).getvalue()))
    assert workbook.sheetnames == ["Summary", "Mode Check", "Chains"]
    assert workbook["Chains"]["A2"].value == "Turan(4)"
    assert workbook["Mode Check"].max_row == 31
