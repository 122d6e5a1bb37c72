"""Plot CSV files written by the `tdlhf` command-line tool.

Usage:
    tdlhf fx  --rs 2 --out fx_rs2.csv
    tdlhf fx  --rs 5 --out fx_rs5.csv
    python docs/plot_template.py fx fx_rs2.csv fx_rs5.csv -o fx.png

Supported kinds: fx, eps, static-fx, trajectory. Lines starting with '#'
hold the metadata of each file and are shown in the legend.
"""

import argparse

import matplotlib.pyplot as plt
import numpy as np


def read(path):
    meta, header, rows = {}, None, []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append([float(v) for v in line.split(",")])
    return meta, header, np.array(rows)


def label(meta):
    return f"r_s = {meta.get('r_s', '?')}"


def plot_fx(ax, meta, cols, data):
    kf2 = float(meta["k_F_au"]) ** 2
    (line,) = ax.plot(data[:, 0], data[:, 1] * kf2, label=f"Re, {label(meta)}")
    ax.plot(data[:, 0], data[:, 2] * kf2, "--", color=line.get_color(), label=f"Im, {label(meta)}")
    ax.set_xlabel("omega / eps_F")
    ax.set_ylabel("f_x k_F^2")


def plot_eps(ax, meta, cols, data):
    (line,) = ax.plot(data[:, 0], data[:, 2], label=f"Im eps, {label(meta)}")
    ax.plot(data[:, 0], data[:, 4], ":", color=line.get_color(), label=f"Im eps Lindhard, {label(meta)}")
    ax.set_xlabel("omega / eps_F")
    ax.set_ylabel("Im eps")


def plot_static(ax, meta, cols, data):
    (line,) = ax.plot(data[:, 0], data[:, 1], label=f"f_x(q, 0), {label(meta)}")
    ax.plot(data[:, 0], data[:, 2], ":", color=line.get_color(), label="-2 pi / q^2")
    ax.set_xlabel("q / k_F")
    ax.set_ylabel("f_x (a.u.)")
    ax.set_ylim(1.5 * data[:, 1].min(), 0.0)


def plot_trajectory(ax, meta, cols, data):
    ax.plot(data[:, 0], data[:, 1] - data[0, 1], label="d(t) - d(0)")
    ax.set_xlabel("t (a.u.)")
    ax.set_ylabel("dipole (a.u.)")


PLOTTERS = {"fx": plot_fx, "eps": plot_eps, "static-fx": plot_static, "trajectory": plot_trajectory}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("kind", choices=sorted(PLOTTERS))
    parser.add_argument("files", nargs="+")
    parser.add_argument("-o", "--output", default="plot.png")
    args = parser.parse_args()
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.files:
        PLOTTERS[args.kind](ax, *read(path))
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
