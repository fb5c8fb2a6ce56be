"""Figure rendering for campaign reports.

Kept separate so matplotlib is only imported on the report path; the Agg
backend writes files without a display.
"""

from __future__ import annotations

import os


def render_campaign_figures(report, outdir) -> list:
    """Render the slack-summary figure next to the delimited output.

    One horizontal panel per campaign: minimum and median slack per bound
    on a symlog axis (slacks span orders of magnitude), violations marked.
    Returns the written paths.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    stats = [st for st in report.per_bound.values() if st.slack_min is not None]
    if not stats:
        return []
    names = [st.bound_id for st in stats]
    mins = [st.slack_min for st in stats]
    medians = [st.slack_median for st in stats]
    n_viol = [len(st.violations) for st in stats]

    fig, ax = plt.subplots(figsize=(8, 0.32 * len(names) + 1.6))
    ypos = range(len(names))
    ax.scatter(medians, ypos, marker="|", s=120, color="tab:blue", label="median slack")
    colors = ["tab:red" if v else "tab:green" for v in n_viol]
    ax.scatter(mins, ypos, marker="o", s=24, c=colors, label="min slack")
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xscale("symlog", linthresh=1e-10)
    ax.set_xlabel("slack = rhs - lhs")
    ax.set_title(
        f"{report.config.n_instances} instances per bound, "
        f"dims {report.config.dim_range[0]}-{report.config.dim_range[1]}, "
        f"{report.total_violations} violations"
    )
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    path = os.path.join(outdir, "slack_summary.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
