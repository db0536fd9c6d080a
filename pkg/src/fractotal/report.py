"""Figure rendering for the recurrence, its asymptotics, and the ODE.

Each figure is written next to a CSV carrying the same data, so plots can be
regenerated or restyled without rerunning the computations.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .recurrence import (
    f1_closed_form_bound,
    integrate_even_ode,
    limit_profile,
    pq_table,
    verify_limit_convergence,
)


def render_recurrence_profile(outdir: Path, ks=(4, 11, 40, 200)) -> list[Path]:
    fig, ax = plt.subplots(figsize=(6, 4))
    rows = []
    for k in ks:
        t = pq_table(k, exact=False)
        xs = [0.0] if k == 1 else [i / (k - 1) for i in range(k)]
        ps = [float(p) for p in t.p]
        ax.plot(xs, ps, marker=".", markersize=3, linewidth=1, label=f"k={k}")
        rows.extend((k, x, p) for x, p in zip(xs, ps))
    grid = [i / 200 for i in range(201)]
    ax.plot(grid, [limit_profile(x) for x in grid], "k--", linewidth=1.5, label="limit profile")
    ax.set_xlabel("(i-1)/(k-1)")
    ax.set_ylabel("p_k(i)")
    ax.legend(fontsize=8)
    ax.set_title("Level recurrence against its scaling limit")
    fig.tight_layout()
    png = outdir / "recurrence_profile.png"
    fig.savefig(png, dpi=150)
    plt.close(fig)
    csv = outdir / "recurrence_profile.csv"
    csv.write_text("k,x,p\n" + "\n".join(f"{k},{x!r},{p!r}" for k, x, p in rows) + "\n")
    return [png, csv]


def render_convergence(outdir: Path, ks=(10, 30, 100, 300, 1000, 3000, 10000)) -> list[Path]:
    rep = verify_limit_convergence(list(ks), tol=1.0)
    fig, ax = plt.subplots(figsize=(6, 4))
    gaps = [r["gap"] for r in rep["rows"]]
    ax.loglog(list(ks), gaps, "o-")
    ax.loglog(list(ks), [gaps[0] * ks[0] / k for k in ks], "k--", linewidth=1, label="~1/k")
    ax.set_xlabel("k")
    ax.set_ylabel("|p*_k - (3 - sqrt 7)|")
    ax.legend()
    ax.set_title("Convergence of the aggregate edge probability")
    fig.tight_layout()
    png = outdir / "convergence.png"
    fig.savefig(png, dpi=150)
    plt.close(fig)
    csv = outdir / "convergence.csv"
    csv.write_text(
        "k,p_star,gap\n"
        + "\n".join(f"{r['k']},{r['p_star']!r},{r['gap']!r}" for r in rep["rows"])
        + "\n"
    )
    return [png, csv]


def render_ode(outdir: Path, deltas=(4, 6, 8)) -> list[Path]:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    lines = ["delta,x,F,Q"]
    for d in deltas:
        sol = integrate_even_ode(d, 1e-3)
        axes[0].plot(sol.xs, sol.F, label=f"D={d}")
        axes[0].axhline(f1_closed_form_bound(d), linestyle=":", linewidth=0.8)
        axes[1].plot(sol.xs, sol.Q, label=f"D={d}")
        axes[1].axhline(1 / (d + 1), linestyle=":", linewidth=0.8)
        step = max(1, len(sol.xs) // 100)
        lines.extend(
            f"{d},{x!r},{f!r},{q!r}"
            for x, f, q in list(zip(sol.xs, sol.F, sol.Q))[::step]
        )
    axes[0].set_xlabel("x")
    axes[0].set_ylabel("F(x)")
    axes[0].set_title("Profile F with closed-form bounds on F(1)")
    axes[1].set_xlabel("x")
    axes[1].set_ylabel("Q(x)")
    axes[1].set_title("Vertex mass Q with 1/(D+1) thresholds")
    for ax in axes:
        ax.legend(fontsize=8)
    fig.tight_layout()
    png = outdir / "ode_profiles.png"
    fig.savefig(png, dpi=150)
    plt.close(fig)
    csv = outdir / "ode_profiles.csv"
    csv.write_text("\n".join(lines) + "\n")
    return [png, csv]


def render_mean_field(outdir: Path, k: int = 11, trials: int = 200_000) -> list[Path]:
    from .mean_field import mean_field_process
    from .sampler import SamplerParams

    rep = mean_field_process(SamplerParams(k=k), length=10 * k, trials=trials, seed=7)
    levels = list(range(1, k + 1))
    n = rep.level_counts
    fig, ax = plt.subplots(figsize=(6, 4))
    for hat, exact, label, marker in (
        (rep.p_hat, rep.p_exact, "edge", "o"),
        (rep.q_hat, rep.q_exact, "vertex", "s"),
    ):
        err = 3 * (exact * (1 - exact) / n) ** 0.5
        ax.errorbar(levels, hat, yerr=err, fmt=marker, markersize=4,
                    capsize=2, linewidth=1, label=f"{label} (measured, 3 sigma)")
        ax.plot(levels, exact, "k-", linewidth=0.8)
    ax.set_xlabel("level t")
    ax.set_ylabel("inclusion probability")
    ax.set_title(f"Mean-field oracle against the exact table (k={k})")
    ax.legend(fontsize=8)
    fig.tight_layout()
    png = outdir / "mean_field.png"
    fig.savefig(png, dpi=150)
    plt.close(fig)
    csv = outdir / "mean_field.csv"
    rows = ["t,p_hat,p_exact,q_hat,q_exact,count"]
    rows += [
        f"{t},{rep.p_hat[t - 1]!r},{rep.p_exact[t - 1]!r},"
        f"{rep.q_hat[t - 1]!r},{rep.q_exact[t - 1]!r},{int(n[t - 1])}"
        for t in levels
    ]
    csv.write_text("\n".join(rows) + "\n")
    return [png, csv]


def render_all(outdir: Path, ode_deltas=(4, 6, 8)) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    paths += render_recurrence_profile(outdir)
    paths += render_convergence(outdir)
    paths += render_ode(outdir, deltas=ode_deltas)
    paths += render_mean_field(outdir)
    return paths
