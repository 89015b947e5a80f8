"""Plain-text rendering for CLI output, and the optional lower-bound figure."""

from __future__ import annotations

import math

from .lower_bounds import FoolingReport, f_upper_bound


def table(rows, headers=None) -> str:
    rows = [tuple(str(c) for c in r) for r in rows]
    if headers:
        rows = [tuple(headers)] + rows
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    if headers:
        lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_fooling_report(rep: FoolingReport) -> str:
    return table(rep.rows(), ("field", "value")) + "\n" + rep.explanation()


def render_checks(checks) -> str:
    return "\n".join(c.line() for c in checks)


def lower_bound_figure(rep: FoolingReport, path: str) -> None:
    """Plot log2 of 2ⁿ and of k·f(n) against n, marking the witness."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = list(range(0, rep.n + 4))
    fooling = [float(n) for n in ns]
    bound = [math.log2(rep.k * f_upper_bound(rep.r, rep.s, rep.m, n)) for n in ns]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, fooling, marker="o", label="log2 fooling set size (n)")
    ax.plot(ns, bound, marker="s", label="log2 k*f(n)")
    ax.axvline(rep.n, color="grey", linestyle="--", label=f"witness n={rep.n}")
    ax.set_xlabel("n")
    ax.set_ylabel("log2")
    ax.set_title(f"k={rep.k}, m={rep.m}, r={rep.r}, s={rep.s}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
