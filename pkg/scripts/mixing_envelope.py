"""Exact worst-case TV of the shiftable kernel against the contraction envelope, over beta."""

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from nurs import couple as C
from nurs import exact as E
from nurs.metric import MallowsModel, exact_pmf, table_local_jump


@dataclass(frozen=True)
class Config:
    n: int = 5
    kind: str = "cayley"
    t_max: int = 200


def run(cfg: Config, betas, out):
    d_cross = C.cross_orbit_diameter(cfg.n)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["beta", "delta", "t", "tv", "envelope"])
    for beta in betas:
        model = MallowsModel(cfg.n, beta, cfg.kind)
        delta = C.delta_beta(cfg.n, beta, table_local_jump(model.kind, cfg.n), d_cross)
        curve = E.tv_mixing_curve(E.shiftable_matrix(model), exact_pmf(model).probs, cfg.t_max)
        for t, tv in enumerate(curve, start=1):
            w.writerow([beta, delta, t, float(tv), (cfg.n - 1) * delta**t])
        inside = np.all(curve <= (cfg.n - 1) * delta ** np.arange(1, cfg.t_max + 1))
        print(f"beta={beta}: delta={delta:.5f} within envelope: {bool(inside)}", file=sys.stderr)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, value in vars(Config()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(value), default=value)
    p.add_argument("--betas", nargs="+", type=float, default=[0.0, 0.01, 0.02, 0.03])
    p.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = vars(p.parse_args())
    betas, out = args.pop("betas"), args.pop("out")
    run(Config(**args), betas, out)


if __name__ == "__main__":
    main()
