"""Figure rendering for bench reports (optional matplotlib extra).

Renders the classic survey-style curves next to the delimited output:
accuracy/time vs K, reconstruction error/fidelity vs K, and CCP vs
noise variance.
"""

from __future__ import annotations

from pathlib import Path

from .harness import Report


def matplotlib_available() -> bool:
    try:
        import matplotlib  # noqa: F401
        return True
    except ImportError:
        return False


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _series(report: Report, metric: str, xkey: str):
    """Group rows of one metric into {(method+params+scheme): (xs, ys)}."""
    series: dict[str, tuple[list, list]] = {}
    for row in report.rows:
        if row["metric"] != metric:
            continue
        label = row["method"]
        if row["params"]:
            label += f"({row['params']})"
        label += f" [{row['scheme'].split('|')[0]}]"
        xs, ys = series.setdefault(label, ([], []))
        xs.append(row[xkey])
        ys.append(row["value"])
    return series


def render_report(report: Report, out_dir, stem: str = "report") -> list[str]:
    """Write one PNG per metric family present in the report; returns the
    paths written."""
    plt = _pyplot()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    for metric, logy in (("ACE", True), ("DT", True),
                         ("MSRE", True), ("SSIM", False)):
        series = _series(report, metric, "K")
        if not series:
            continue
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        for label, (xs, ys) in sorted(series.items()):
            order = sorted(range(len(xs)), key=lambda i: xs[i])
            ax.plot([xs[i] for i in order], [ys[i] for i in order],
                    marker="o", ms=3, lw=1.2, label=label)
        ax.set_xlabel("K")
        ax.set_ylabel(metric)
        if logy:
            ax.set_yscale("log")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=7, ncol=2)
        fig.tight_layout()
        path = out / f"{stem}_{metric.lower()}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(str(path))

    ccp_rows = [r for r in report.rows if r["metric"] == "CCP"]
    if ccp_rows:
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        series: dict[str, tuple[list, list]] = {}
        for row in ccp_rows:
            label = row["method"]
            if row["params"]:
                label += f"({row['params']})"
            label += f" K={row['K']}"
            var = 0.0
            for bit in row["scheme"].split("|"):
                if bit.startswith("var="):
                    var = float(bit[4:])
            xs, ys = series.setdefault(label, ([], []))
            xs.append(var)
            ys.append(row["value"])
        for label, (xs, ys) in sorted(series.items()):
            order = sorted(range(len(xs)), key=lambda i: xs[i])
            ax.plot([xs[i] for i in order], [ys[i] for i in order],
                    marker="s", ms=3, lw=1.2, label=label)
        ax.set_xlabel("noise variance")
        ax.set_ylabel("CCP (%)")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=7, ncol=2)
        fig.tight_layout()
        path = out / f"{stem}_ccp.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(str(path))
    return written
