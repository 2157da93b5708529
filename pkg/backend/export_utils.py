"""
Export utilities: CSV and JSON data files, SVG plots, PDF and Excel reports
"""
import io
import json
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd
from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from errors import FormatError
from exact_family import SupportTable
from geometry import BoundaryRow, razborov_lower_array, v_k
from graph_core import Graph, PartitionReport
from mcmc import Trajectory

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

plt.rcParams["svg.hashsalt"] = "edge-triangle"
SVG_METADATA = {"Date": None, "Creator": None}


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_json(obj))


def boundary_frame(rows: Iterable[BoundaryRow]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "e": float(row.e),
                "lower": float(row.lower),
                "upper": float(row.upper),
                "vertex": "" if row.connection_k is None else f"v_{row.connection_k}",
            }
            for row in rows
        ],
        columns=["e", "lower", "upper", "vertex"],
    )


def support_frame(table: SupportTable) -> pd.DataFrame:
    n = table.n
    return pd.DataFrame(
        [
            {"E": e, "T": t, "e": 2 * e / n ** 2, "t": 6 * t / n ** 3, "count": count}
            for (e, t), count in sorted(table.counts.items())
        ],
        columns=["E", "T", "e", "t", "count"],
    )


def write_support_csv(table: SupportTable, path: str) -> None:
    """Support table as CSV (E, T, e, t, count) under a '# n=<n>' header line"""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# n={table.n}\n")
        support_frame(table).to_csv(handle, index=False, lineterminator="\n")


def read_support_csv(path: str) -> SupportTable:
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip()
    if not header.startswith("# n="):
        raise FormatError(f"{path}: missing '# n=<n>' header")
    n = int(header[4:])
    frame = pd.read_csv(path, comment="#")
    if not {"E", "T", "count"} <= set(frame.columns):
        raise FormatError(f"{path}: expected columns E, T, count")
    counts = {(int(e), int(t)): int(c) for e, t, c in zip(frame["E"], frame["T"], frame["count"])}
    return SupportTable(n, counts)


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    dens = trajectory.densities()
    return pd.DataFrame({
        "step": trajectory.steps,
        "e": dens[:, 0],
        "t": dens[:, 1],
        "accepted_frac": trajectory.accepted_frac,
    })


def write_csv(frame: pd.DataFrame, path: str) -> None:
    frame.to_csv(path, index=False, lineterminator="\n")


def _save_svg(fig, path: str) -> None:
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)


def plot_boundary_svg(rows: List[BoundaryRow], path: str, k_max: int = 8) -> None:
    """Region R between the Razborov and Kruskal-Katona curves, with v_0..v_k_max"""
    fine = np.linspace(0.0, 1.0, 2001)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.fill_between(fine, razborov_lower_array(fine), fine ** 1.5, color="#e0e7ff")
    ax.plot(fine, fine ** 1.5, color="#1f2937", linewidth=1)
    ax.plot(fine, razborov_lower_array(fine), color="#4f46e5", linewidth=1)
    pts = np.array([v_k(k).as_floats() for k in range(k_max + 1)])
    ax.plot(pts[:, 0], pts[:, 1], color="#9ca3af", linewidth=0.8, linestyle="--")
    ax.scatter(pts[:, 0], pts[:, 1], s=12, color="#dc2626", zorder=3)
    sampled = np.array([(float(r.e), float(r.lower)) for r in rows])
    ax.scatter(sampled[:, 0], sampled[:, 1], s=4, color="#4f46e5")
    ax.set_xlabel("edge density e")
    ax.set_ylabel("triangle density t")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    _save_svg(fig, path)


def plot_cones_svg(cones: List[Dict], path: str) -> None:
    """Each cone drawn as its two generators from the apex"""
    fig, ax = plt.subplots(figsize=(5, 5))
    for cone in cones:
        apex = np.array(cone["apex"])
        for gen in cone["generators"]:
            d = np.array(gen) / np.linalg.norm(gen) * 0.15
            ax.plot([apex[0], apex[0] + d[0]], [apex[1], apex[1] + d[1]], color="#6366f1", linewidth=0.8)
        ax.scatter([apex[0]], [apex[1]], s=10, color="#dc2626", zorder=3)
    ax.set_aspect("equal")
    ax.set_xlabel("e")
    ax.set_ylabel("t")
    _save_svg(fig, path)


def plot_adjacency_svg(g: Graph, partition: Optional[PartitionReport], path: str) -> None:
    """Adjacency matrix with nodes grouped by recovered class"""
    order = [v for cls in partition.classes for v in cls] if partition else list(range(g.n))
    matrix = np.array([[1 if g.has_edge(i, j) else 0 for j in order] for i in order])
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.imshow(matrix, cmap="Greys", interpolation="nearest")
    ax.set_xticks([])
    ax.set_yticks([])
    _save_svg(fig, path)


def _report_rows(report: Dict) -> List[List[str]]:
    prediction = report.get("prediction", {})
    mode = report.get("mode_check", {})
    return [
        ["Preset:", report.get("preset", "N/A")],
        ["Nodes:", str(report.get("n", "N/A"))],
        ["Beta:", ", ".join(f"{b:g}" for b in report.get("beta", []))],
        ["Steps per chain:", str(report.get("steps", "N/A"))],
        ["Predicted class:", prediction.get("class", "N/A")],
        ["Mode check r*:", str(mode.get("r_star", "N/A"))],
        ["Weight ties:", ", ".join(str(r) for r in mode.get("weight_ties", [])) or "none"],
    ]


def _chain_rows(report: Dict) -> List[Dict]:
    return [
        {
            "Init": c["init"],
            "Terminal e": round(c["terminal"][0], 4),
            "Terminal t": round(c["terminal"][1], 4),
            "Nearest v_j": c["nearest_j"],
            "Max excursion": round(c["max_excursion"], 4),
            "Acceptance": round(c["acceptance_rate"], 4),
            "Classes": c["partition"]["classes"],
            "Misfit": round(c["partition"]["misfit"], 4),
        }
        for c in report.get("chains", [])
    ]


def export_report_pdf(report: Dict) -> io.BytesIO:
    """
    Export a figure-harness report to PDF

    Args:
        report: FigureReport.to_dict() output

    Returns:
        BytesIO object containing PDF data
    """
    buffer = io.BytesIO()
    doc = SimpleDocTemplate(buffer, pagesize=letter, topMargin=0.75 * inch, bottomMargin=0.75 * inch)
    elements = []
    styles = getSampleStyleSheet()
    title_style = ParagraphStyle(
        "ReportTitle", parent=styles["Heading1"], fontSize=20,
        textColor=colors.HexColor("#4f46e5"), spaceAfter=24, alignment=TA_CENTER,
    )
    heading_style = ParagraphStyle(
        "ReportHeading", parent=styles["Heading2"], fontSize=14,
        textColor=colors.HexColor("#1f2937"), spaceAfter=12,
    )

    elements.append(Paragraph(f"Edge-triangle simulation: {report.get('preset', '')}", title_style))
    elements.append(Paragraph(report.get("description", ""), styles["Normal"]))
    elements.append(Spacer(1, 0.2 * inch))

    info_table = Table(_report_rows(report), colWidths=[2 * inch, 4 * inch])
    info_table.setStyle(TableStyle([
        ("BACKGROUND", (0, 0), (0, -1), colors.HexColor("#f3f4f6")),
        ("ALIGN", (0, 0), (0, -1), "RIGHT"),
        ("FONTNAME", (0, 0), (0, -1), "Helvetica-Bold"),
        ("FONTSIZE", (0, 0), (-1, -1), 10),
        ("GRID", (0, 0), (-1, -1), 1, colors.grey),
        ("VALIGN", (0, 0), (-1, -1), "MIDDLE"),
    ]))
    elements.append(info_table)
    elements.append(Spacer(1, 0.3 * inch))

    chains = _chain_rows(report)
    if chains:
        elements.append(Paragraph("Chains", heading_style))
        header = list(chains[0].keys())
        data = [header] + [[str(row[h]) for h in header] for row in chains]
        chain_table = Table(data, repeatRows=1)
        chain_table.setStyle(TableStyle([
            ("BACKGROUND", (0, 0), (-1, 0), colors.HexColor("#6366f1")),
            ("TEXTCOLOR", (0, 0), (-1, 0), colors.white),
            ("FONTNAME", (0, 0), (-1, 0), "Helvetica-Bold"),
            ("FONTSIZE", (0, 0), (-1, -1), 8),
            ("GRID", (0, 0), (-1, -1), 0.5, colors.grey),
        ]))
        elements.append(chain_table)

    doc.build(elements)
    buffer.seek(0)
    return buffer


def export_report_excel(report: Dict) -> io.BytesIO:
    """
    Export a figure-harness report to Excel (summary, mode table, chains)

    Returns:
        BytesIO object containing Excel data
    """
    buffer = io.BytesIO()
    with pd.ExcelWriter(buffer, engine="openpyxl") as writer:
        summary_df = pd.DataFrame([[k.rstrip(":"), v] for k, v in _report_rows(report)], columns=["Field", "Value"])
        summary_df.to_excel(writer, sheet_name="Summary", index=False)

        mode_df = pd.DataFrame(report.get("mode_check", {}).get("table", []))
        mode_df.to_excel(writer, sheet_name="Mode Check", index=False)

        pd.DataFrame(_chain_rows(report)).to_excel(writer, sheet_name="Chains", index=False)

        # Auto-adjust column widths
        for sheet_name in writer.sheets:
            worksheet = writer.sheets[sheet_name]
            for column in worksheet.columns:
                column_letter = column[0].column_letter
                max_length = max((len(str(cell.value)) for cell in column if cell.value is not None), default=0)
                worksheet.column_dimensions[column_letter].width = min(max_length + 2, 50)

    buffer.seek(0)
    return buffer
