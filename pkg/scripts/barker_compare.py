"""NURS against Barker on the same target: ACF and ESS of three trace statistics."""

import argparse
import json
import sys
from dataclasses import asdict, dataclass

from nurs import diag as D
from nurs.direction import parse_direction
from nurs.kernel import NursParams, run_chain
from nurs.metric import MallowsModel
from nurs.perm import fisher_yates
from nurs.rng import make_rng

STATS = ("fixed_points", "cycle_len_1", "lis")


@dataclass(frozen=True)
class Config:
    n: int = 200
    kind: str = "cayley"
    beta: float = 1.0
    nurs_direction: str = "local:7"
    barker_direction: str = "transposition"
    eps: float = 0.01
    max_doublings: int = 7
    iters: int = 50_000
    burnin: int = 5_000
    max_lag: int = 500
    seed: int = 11


def run(cfg: Config, out):
    model = MallowsModel(cfg.n, cfg.beta, cfg.kind)
    params = NursParams(cfg.eps, cfg.max_doublings)
    base = make_rng(cfg.seed)
    start = fisher_yates(base, cfg.n)
    for stream, (kernel, direction) in enumerate((("nurs", cfg.nurs_direction),
                                                  ("barker", cfg.barker_direction))):
        res = run_chain(model, parse_direction(direction), params, cfg.iters, make_rng(cfg.seed, stream),
                        burnin=cfg.burnin, start=start, kernel=kernel)
        row = {**asdict(cfg), "kernel": kernel, "direction": direction}
        for name in STATS:
            acf, ess = D.autocorr_ess(res.column(name).astype(float), cfg.max_lag)
            row[name] = {"ess": ess, "acf_1": float(acf[1]), "acf_10": float(acf[10])}
        out.write(json.dumps(row) + "\n")
        out.flush()


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, value in vars(Config()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(value), default=value)
    p.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = vars(p.parse_args())
    out = args.pop("out")
    run(Config(**args), out)


if __name__ == "__main__":
    main()
