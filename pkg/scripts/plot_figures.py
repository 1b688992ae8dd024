"""Plot the CSV tables written by reproduce_figures.py (needs matplotlib).

    python3 scripts/plot_figures.py [DIR]
"""

import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path) as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    return rows


def num(rows, key):
    return [float(r[key]) if r[key] else float("nan") for r in rows]


def profile(ax, rows, title):
    t = num(rows, "t")
    for key, label in (("omega2", r"$\omega^2$"), ("sta_omega2", r"$\bar\Omega^2$"), ("delta_omega2", r"$\delta\Omega^2$")):
        ax.plot(t, num(rows, key), label=label)
    ax.set(xlabel="t", title=title)
    ax.legend()


def bundle(d, fig):
    bog = load(d / f"{fig}_bogoliubov.csv")
    obs = load(d / f"{fig}_observables.csv")
    ph = load(d / f"{fig}_phase_average.csv")
    f, ax = plt.subplots(1, 4, figsize=(17, 3.8))
    ax[0].loglog(num(bog, "tau"), num(bog, "abs_beta1"), label=r"$|\beta_1|$")
    ax[0].loglog(num(bog, "tau"), num(bog, "abs_alpha1"), label=r"$|\alpha_1|$")
    ax[0].set(xlabel=r"$\tau$")
    ax[0].legend()
    by_mu = defaultdict(list)
    for r in obs:
        by_mu[r["mu_abs"]].append(r)
    for mu, rows in sorted(by_mu.items(), key=lambda kv: float(kv[0])):
        ax[1].semilogx(num(rows, "tau"), num(rows, "F_HS"), label=f"|mu|={mu}")
        ax[2].semilogx(num(rows, "tau"), num(rows, "P_mix"), label=f"|mu|={mu}")
    ax[1].set(xlabel=r"$\tau$", ylabel=r"$F_{HS}$")
    ax[2].set(xlabel=r"$\tau$", ylabel=r"$\mathcal{P}$")
    ax[1].legend(fontsize=7)
    ax[3].plot(num(ph, "mu_abs"), num(ph, "R_E_phase_avg"), "o-")
    ax[3].set(xlabel=r"$|\mu|$", ylabel=r"$\langle R_E\rangle_\phi$")
    f.tight_layout()
    return f


if __name__ == "__main__":
    d = Path(sys.argv[1] if len(sys.argv) > 1 else "figures_out")
    for fig in ("fig1", "fig3"):
        f, ax = plt.subplots(figsize=(5, 3.8))
        profile(ax, load(d / f"{fig}.csv"), fig)
        f.savefig(d / f"{fig}.png", dpi=120)
    for fig in ("fig2", "fig4"):
        bundle(d, fig).savefig(d / f"{fig}.png", dpi=120)
    print(f"wrote PNGs to {d}")
