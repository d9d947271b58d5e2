"""Fixed-point laws at n = 200 against Poisson(e^beta), for several distances and starts."""

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass

from nurs import diag as D
from nurs.direction import parse_direction
from nurs.kernel import NursParams, run_chain
from nurs.metric import MallowsModel
from nurs.perm import fisher_yates
from nurs.rng import make_rng


@dataclass(frozen=True)
class Config:
    n: int = 200
    direction: str = "local:7"
    eps: float = 0.01
    max_doublings: int = 7
    burnin: int = 2_000
    retained: int = 100_000
    seed: int = 8


def run(cfg: Config, kinds, betas, starts, out):
    for stream, (kind, beta, start) in enumerate((k, b, s) for k in kinds for b in betas for s in starts):
        rng = make_rng(cfg.seed, stream)
        model = MallowsModel(cfg.n, beta, kind)
        x0 = fisher_yates(rng, cfg.n) if start == "uniform" else None
        res = run_chain(model, parse_direction(cfg.direction), NursParams(cfg.eps, cfg.max_doublings),
                        cfg.burnin + cfg.retained, rng, burnin=cfg.burnin, start=x0)
        fp = res.column("fixed_points")
        lam = math.exp(beta)
        hist = D.Histogram.from_values(fp)
        _, ess = D.autocorr_ess(fp.astype(float), 2_000)
        row = {**asdict(cfg), "kind": kind, "beta": beta, "start": start, "lambda": lam,
               "mean": float(fp.mean()), "tv": D.empirical_tv(hist, D.poisson_support(lam, 80)),
               "ess": ess, "histogram": hist.as_dict()}
        out.write(json.dumps(row) + "\n")
        out.flush()


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, value in vars(Config()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(value), default=value)
    p.add_argument("--kinds", nargs="+", default=["cayley", "hamming"])
    p.add_argument("--betas", nargs="+", type=float, default=[0.5, 1.0])
    p.add_argument("--starts", nargs="+", choices=("uniform", "sigma0"), default=["uniform", "sigma0"])
    p.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = vars(p.parse_args())
    extra = {k: args.pop(k) for k in ("kinds", "betas", "starts", "out")}
    run(Config(**args), extra["kinds"], extra["betas"], extra["starts"], extra["out"])


if __name__ == "__main__":
    main()
