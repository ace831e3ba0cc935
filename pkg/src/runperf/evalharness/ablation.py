"""Context-ablation table: task x category count x context mode cells.

Rows follow a fixed layout: tasks (current, next) x C in (2, 3, 4) x modes
(raw, bb, vibe), 18 rows total.  Each cell is "mean ± std" of the protocol
accuracy in percent to one decimal, or "n/a" when the cell's dataset is
missing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..dataio.types import CONTEXT_MODES
from ..perf import CATEGORY_COUNTS, DatasetSlice
from .protocol import TASKS, EvalReport, ProtocolConfig, run_protocol


@dataclass(frozen=True)
class AblationRow:
    task: str
    C: int
    mode: str
    cell: str                 # "83.7 ± 2.8" or "n/a"
    mean: float | None = None  # percent
    std: float | None = None   # percent


def format_cell(mean: float, std: float) -> str:
    return f"{mean:.1f} ± {std:.1f}"


def ablation_table(
    datasets: dict[tuple[str, int, str], DatasetSlice | None],
    config: ProtocolConfig,
    workers: int | None = None,
) -> tuple[list[AblationRow], dict[tuple[str, int, str], EvalReport]]:
    """Evaluate every (task, C, mode) cell present in ``datasets``.

    Returns the 18 rows in fixed order plus the full per-cell reports.
    Cells whose dataset is absent or None come back as "n/a".
    """
    rows: list[AblationRow] = []
    reports: dict[tuple[str, int, str], EvalReport] = {}
    for task in TASKS:
        for C in CATEGORY_COUNTS:
            for mode in CONTEXT_MODES:
                key = (task, C, mode)
                data = datasets.get(key)
                if data is None:
                    rows.append(AblationRow(task, C, mode, "n/a"))
                    continue
                cell_config = replace(config, C=C, task=task, context_mode=mode)
                report = run_protocol(data, cell_config, workers=workers)
                reports[key] = report
                rows.append(
                    AblationRow(
                        task,
                        C,
                        mode,
                        format_cell(report.accuracy_mean, report.accuracy_std),
                        mean=report.accuracy_mean,
                        std=report.accuracy_std,
                    )
                )
    return rows, reports


def ablation_csv(rows: list[AblationRow]) -> str:
    lines = ["task,C,mode,accuracy"]
    lines.extend(f"{r.task},{r.C},{r.mode},{r.cell}" for r in rows)
    return "\n".join(lines) + "\n"
