"""One-step shift-coupling contraction over random edges, swept over beta."""

import argparse
import sys
from dataclasses import dataclass

from nurs import couple as C
from nurs.metric import MallowsModel
from nurs.perm import fisher_yates
from nurs.rng import make_rng


@dataclass(frozen=True)
class Config:
    n: int = 5
    kind: str = "cayley"
    edges: int = 10
    samples: int = 100_000
    seed: int = 5


def run(cfg: Config, betas, out):
    for stream, beta in enumerate(betas):
        rng = make_rng(cfg.seed, stream)
        model = MallowsModel(cfg.n, beta, cfg.kind)
        for _ in range(cfg.edges):
            i, j = sorted(int(v) + 1 for v in rng.choice(cfg.n, size=2, replace=False))
            edge = C.EdgePair(fisher_yates(rng, cfg.n), i, j)
            out.write(C.edge_contraction_experiment(edge, model, cfg.samples, rng).to_json() + "\n")
        out.flush()


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, value in vars(Config()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(value), default=value)
    p.add_argument("--betas", nargs="+", type=float, default=[0.0, 0.01, 0.05, 0.1, 0.5])
    p.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = vars(p.parse_args())
    betas, out = args.pop("betas"), args.pop("out")
    run(Config(**args), betas, out)


if __name__ == "__main__":
    main()
