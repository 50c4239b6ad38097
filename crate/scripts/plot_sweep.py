#!/usr/bin/env python3
"""Plot K_tt(1,1) and K_pp(1,1) of a sweep CSV against the humidity gradient.

usage: plot_sweep.py sweep.csv [out.png]
"""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    df = pd.read_csv(sys.argv[1], comment="#")
    df = df[df["status"] == "ok"]
    out = sys.argv[2] if len(sys.argv) > 2 else sys.argv[1].rsplit(".", 1)[0] + ".png"
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
    keys = ["phi0", "alpha_int", "beta_int", "perfect"]
    for (phi0, alpha, beta, perfect), g in df.groupby(keys):
        g = g.sort_values("grad_phi_x")
        label = f"Φ0={phi0:g}, " + ("perfect" if perfect else f"α={alpha:g}, β={beta:g}")
        axes[0].plot(g["grad_phi_x"], g["K_tt_11"], marker="o", label=label)
        axes[1].plot(g["grad_phi_x"], g["K_pp_11"], marker="o", label=label)
    axes[0].set_ylabel("K_θθ(1,1) [W/(m K)]")
    axes[1].set_ylabel("K_φφ(1,1) [kg/(m s)]")
    for ax in axes:
        ax.set_xlabel("∇Φ_x [1/m]")
        ax.grid(alpha=0.3)
    axes[1].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
