"""Per-epoch metrics log with CSV and SVG curve export."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ContractViolation, ParseError

CSV_HEADER = "epoch,train_loss,val_loss,train_acc,val_acc"


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    val_loss: float
    train_acc: float
    val_acc: float

    def __post_init__(self):
        if not (0.0 <= self.train_acc <= 1.0 and 0.0 <= self.val_acc <= 1.0):
            raise ContractViolation(
                f"EpochMetrics: accuracy outside [0, 1] at epoch {self.epoch}")


@dataclass
class MetricsLog:
    rows: list[EpochMetrics] = field(default_factory=list)

    def append(self, row: EpochMetrics) -> None:
        if self.rows and row.epoch <= self.rows[-1].epoch:
            raise ContractViolation(
                f"MetricsLog: epoch {row.epoch} not after {self.rows[-1].epoch}")
        self.rows.append(row)

    def best_val_acc(self) -> float:
        return max((r.val_acc for r in self.rows), default=0.0)

    def first_epoch_reaching(self, val_acc: float) -> int | None:
        for row in self.rows:
            if row.val_acc >= val_acc:
                return row.epoch
        return None


def metrics_to_csv(log: MetricsLog) -> str:
    lines = [CSV_HEADER]
    for r in log.rows:
        lines.append(f"{r.epoch},{r.train_loss:.6f},{r.val_loss:.6f},"
                     f"{r.train_acc:.6f},{r.val_acc:.6f}")
    return "\n".join(lines) + "\n"


def parse_metrics_csv(text: str) -> MetricsLog:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ParseError(f"metrics CSV must start with header {CSV_HEADER!r}")
    log = MetricsLog()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(f"line {lineno}: expected 5 comma-separated fields")
        try:
            log.append(EpochMetrics(int(parts[0]), *(float(p) for p in parts[1:])))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return log


def _polyline(points: list[tuple[float, float]], color: str, css: str) -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    return (f'<polyline class="{css}" fill="none" stroke="{color}" '
            f'stroke-width="2" points="{coords}"/>')


def _chart(x0: float, title: str, series: dict[str, list[float]],
           epochs: list[int], height: float, width: float) -> str:
    pad = 40.0
    inner_w = width - 2 * pad
    inner_h = height - 2 * pad
    lo = min(min(vs) for vs in series.values())
    hi = max(max(vs) for vs in series.values())
    if hi == lo:
        hi = lo + 1.0
    e_lo, e_hi = epochs[0], epochs[-1]
    span = max(e_hi - e_lo, 1)

    def sx(e: int) -> float:
        return x0 + pad + (e - e_lo) / span * inner_w

    def sy(v: float) -> float:
        return pad + (1.0 - (v - lo) / (hi - lo)) * inner_h

    colors = {"train": "#1f77b4", "val": "#d62728"}
    parts = [
        f'<text x="{x0 + width / 2:.1f}" y="20" text-anchor="middle" '
        f'font-size="14">{title}</text>',
        f'<line x1="{x0 + pad}" y1="{height - pad}" x2="{x0 + width - pad}" '
        f'y2="{height - pad}" stroke="#333"/>',
        f'<line x1="{x0 + pad}" y1="{pad}" x2="{x0 + pad}" '
        f'y2="{height - pad}" stroke="#333"/>',
        f'<text x="{x0 + pad - 6}" y="{height - pad + 4}" text-anchor="end" '
        f'font-size="10">{lo:.3g}</text>',
        f'<text x="{x0 + pad - 6}" y="{pad + 4}" text-anchor="end" '
        f'font-size="10">{hi:.3g}</text>',
    ]
    for name, values in series.items():
        pts = [(sx(e), sy(v)) for e, v in zip(epochs, values)]
        if len(pts) == 1:
            pts = pts * 2  # single-epoch logs still draw a visible segment
        parts.append(_polyline(pts, colors[name], f"{name}-series"))
        y_leg = pad + (12 if name == "train" else 28)
        parts.append(
            f'<text x="{x0 + width - pad - 64}" y="{y_leg}" font-size="11" '
            f'fill="{colors[name]}">{name}</text>')
    return "\n".join(parts)


def metrics_to_svg(log: MetricsLog) -> str:
    """Loss and accuracy charts, each with train and validation polylines."""
    epochs = [r.epoch for r in log.rows]
    width, height = 460.0, 320.0
    loss = _chart(0, "loss", {"train": [r.train_loss for r in log.rows],
                              "val": [r.val_loss for r in log.rows]},
                  epochs, height, width)
    acc = _chart(width, "accuracy", {"train": [r.train_acc for r in log.rows],
                                     "val": [r.val_acc for r in log.rows]},
                 epochs, height, width)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(2 * width)}" '
            f'height="{int(height)}" viewBox="0 0 {int(2 * width)} {int(height)}">\n'
            f'{loss}\n{acc}\n</svg>\n')


def export_curves(log: MetricsLog, path, format: str = "csv") -> None:
    """Write the log as CSV or as an SVG with loss and accuracy line charts."""
    if not log.rows:
        raise ContractViolation("export_curves: empty metrics log")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if format == "csv":
        path.write_text(metrics_to_csv(log), encoding="utf-8")
    elif format == "svg":
        path.write_text(metrics_to_svg(log), encoding="utf-8")
    else:
        raise ContractViolation(f"export_curves: unknown format {format!r}")
