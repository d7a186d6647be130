"""评估报告：Markdown 表格、CSV 与绘图数据"""
import csv
import logging
import os
from typing import Dict
from typing import Sequence

from prettytable import PrettyTable

try:
    from prettytable import TableStyle

    MARKDOWN = TableStyle.MARKDOWN
except ImportError:
    from prettytable import MARKDOWN

from joint_friction_id import constant
from joint_friction_id.control.closed_loop import ExperimentTrace
from joint_friction_id.evaluation.protocols import ExperimentReport

REPORT_FILE = "report.md"
TRACKING_CSV = "tracking.csv"
RECOVERY_CSV = "recovery.csv"
COMMON_RECOVERY_CSV = "common_recovery.csv"
NUMBER_FORMAT = "%.6g"


def _fmt(value):
    return NUMBER_FORMAT % value


def tracking_rows(reports: Sequence[ExperimentReport]):
    return [[r.model_kind, _fmt(r.tracking_rmse), _fmt(r.tracking_moment), r.kp_label, _fmt(r.kd)] for r in reports]


def recovery_rows(reports: Sequence[ExperimentReport]):
    return [
        [r.model_kind, _fmt(r.recovery_rmse), _fmt(r.disturbance_moment), _fmt(r.recovery_kp), _fmt(r.kd)]
        for r in reports
    ]


def common_recovery_rows(reports: Sequence[ExperimentReport]):
    return [[r.model_kind, _fmt(r.common_recovery_rmse), _fmt(r.common_kp), _fmt(r.kd)] for r in reports]


def render_table(header, rows):
    table = PrettyTable(header)
    table.set_style(MARKDOWN)
    table.align = "l"
    for row in rows:
        table.add_row(row)
    return table.get_string()


def _write_csv(path, header, rows, provenance=None):
    with open(path, "w", encoding="utf-8", newline="") as f:
        if provenance is not None:
            f.write(provenance.to_comment() + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def emit_report(reports: Sequence[ExperimentReport], out_dir, provenance=None, title=""):
    """Writes report.md plus tracking.csv, recovery.csv and common_recovery.csv.

    The moment column of the tracking table is the peak desired joint torque;
    in the recovery table it is the smallest joint-axis moment that moves the
    held joint at the model's own K_p.

    Returns:
        path of report.md
    """
    os.makedirs(out_dir, exist_ok=True)
    tracking = tracking_rows(reports)
    recovery = recovery_rows(reports)
    common = common_recovery_rows(reports)
    lines = []
    if provenance is not None:
        lines.append("<!-- config_hash={} seed={} -->".format(provenance.config_hash, provenance.seed))
    if title:
        lines += ["# {}".format(title), ""]
    lines += [
        "## Minimum K_p for accurate tracking",
        "",
        render_table(constant.REPORT_COLUMNS, tracking),
        "",
        "## Recovery after an external disturbance at each model's K_p",
        "",
        render_table(constant.RECOVERY_COLUMNS, recovery),
        "",
        "## Recovery after an external disturbance at the common K_p",
        "",
        render_table(constant.COMMON_RECOVERY_COLUMNS, common),
        "",
        "## Energy proxy at the common K_p",
        "",
        render_table(
            ["model", "energy", "kp"],
            [[r.model_kind, _fmt(r.energy_proxy), _fmt(r.common_kp)] for r in reports],
        ),
        "",
    ]
    path = os.path.join(out_dir, REPORT_FILE)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines))
    _write_csv(os.path.join(out_dir, TRACKING_CSV), constant.REPORT_COLUMNS, tracking, provenance)
    _write_csv(os.path.join(out_dir, RECOVERY_CSV), constant.RECOVERY_COLUMNS, recovery, provenance)
    _write_csv(os.path.join(out_dir, COMMON_RECOVERY_CSV), constant.COMMON_RECOVERY_COLUMNS, common, provenance)
    logging.info("report written to %s", path)
    return path


def emit_plot_data(traces: Dict[str, ExperimentTrace], out_dir, prefix="tracking", provenance=None):
    """One trace CSV per model: position tracking, friction estimate and desired torque."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for model in sorted(traces):
        path = os.path.join(out_dir, "{}_{}.csv".format(prefix, model.lower()))
        traces[model].to_csv(path, provenance)
        paths[model] = path
    return paths
