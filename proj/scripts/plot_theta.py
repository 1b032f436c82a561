"""Plot v against theta for the two-window model.

    kprophet bounds --k 2 --theta-sweep 1000 --format csv > theta.csv
    python3 scripts/plot_theta.py theta.csv theta.png
"""
import argparse
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv")
    ap.add_argument("out")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    best = df.loc[df["v"].idxmax()]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(df["theta"], df["v"], lw=1.2)
    ax.axhline(6 / math.pi**2, ls=":", c="grey", label=r"$6/\pi^2$")
    ax.plot([best["theta"]], [best["v"]], "o", c="C3", label=f"max at theta = {best['theta']:.3f}")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel(r"$v$")
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
