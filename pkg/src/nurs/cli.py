"""``nurs`` command line: sample | verify | mix | couple | stats.

Exit codes: 0 success, 1 verification residual above tolerance, 2 bad
configuration, 3 input/output failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .couple import EdgePair, delta_beta, edge_contraction_experiment, _diameter
from .diag import (Histogram, RunTrace, autocorr_ess, empirical_tv, histogram_rows, poisson_support,
                   triangular_support, TRACE_COLUMNS, TRIANGULAR_VARIANTS)
from .direction import LocalCycle, parse_direction
from .exact import (detailed_balance_residual, nurs_matrix, shiftable_matrix, stationarity_residual,
                    tv_mixing_curve, TransitionMatrix)
from .kernel import MAX_DOUBLINGS, NursParams, run_chain
from .metric import DistanceKind, MallowsModel, exact_pmf, table_local_jump
from .perm import Permutation, fisher_yates
from .rng import make_rng

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("nurs")


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    n: int
    distance: str
    beta: float
    direction: str = "uniform"
    eps: float = 0.01
    max_doublings: int = 7
    iters: int = 1
    burnin: int = 0
    seed: int = 0
    out: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if not self.beta >= 0:
            raise ConfigError(f"beta must be non-negative, got {self.beta}")
        if not 0 < self.eps < 1:
            raise ConfigError(f"eps must lie in (0, 1), got {self.eps}")
        if not 1 <= self.max_doublings <= MAX_DOUBLINGS:
            raise ConfigError(f"max-doublings must lie in [1, {MAX_DOUBLINGS}], got {self.max_doublings}")
        if not self.iters > self.burnin >= 0:
            raise ConfigError(f"need iters > burnin >= 0, got iters={self.iters}, burnin={self.burnin}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def model(self) -> MallowsModel:
        try:
            sigma0 = self.options.get("sigma0")
            s0 = Permutation.parse(sigma0) if sigma0 else None
            return MallowsModel(self.n, self.beta, DistanceKind.parse(self.distance), s0)
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def law(self):
        try:
            law = parse_direction(self.direction)
            law.jit_spec(self.n)
        except ValueError as err:
            raise ConfigError(str(err)) from None
        return law

    def params(self) -> NursParams:
        return NursParams(self.eps, self.max_doublings)

    def record(self) -> dict:
        """Config as recorded in outputs; the output path is left out so that
        identical runs written to different files stay byte-identical."""
        rec = asdict(self)
        rec.pop("out")
        return {"config": rec, "version": __version__}

    def header(self) -> str:
        return json.dumps(self.record(), sort_keys=True)


def _add_model_args(p, *, direction=True, doubling=True):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--distance", default="cayley", help=", ".join(k.value for k in DistanceKind))
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--sigma0", default=None, help="reference permutation, e.g. 2,1,3 (default identity)")
    if direction:
        p.add_argument("--direction", default="uniform",
                       help="uniform | block:B | local:L | shiftable | transposition")
    if doubling:
        p.add_argument("--eps", type=float, default=0.01)
        p.add_argument("--max-doublings", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nurs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="run chains and write trace CSVs")
    _add_model_args(p)
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--burnin", type=int, default=0)
    p.add_argument("--start", choices=("sigma0", "uniform"), default="sigma0")
    p.add_argument("--kernel", choices=("nurs", "barker"), default="nurs")
    p.add_argument("--chains", type=int, default=1)

    p = sub.add_parser("verify", help="exact detailed-balance check of the NURS matrix")
    _add_model_args(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--perturb", action="store_true", help="add 1e-3 to one entry (negative control)")

    p = sub.add_parser("mix", help="exact worst-case TV curve with the contraction envelope")
    _add_model_args(p)
    p.add_argument("--kernel", choices=("shiftable", "nurs"), default="shiftable")
    p.add_argument("--t-max", type=int, default=200)

    p = sub.add_parser("couple", help="one-step shift-coupling contraction per edge")
    _add_model_args(p, direction=False, doubling=False)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--sigma", choices=("id", "uniform"), default="id")
    p.add_argument("--edges", type=int, default=0, help="number of random edges (0 = all edges from sigma)")

    p = sub.add_parser("stats", help="histograms, reference laws and ACF/ESS of a trace CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--report", required=True,
                   help="histogram column name, or acf:COLUMN")
    p.add_argument("--ref", default=None, help="poisson:LAMBDA or triangular:M:VARIANT (VARIANT is derived or wide)")
    p.add_argument("--max-lag", type=int, default=100)
    p.add_argument("--out", default=None)
    return parser


def _config(args, **extra) -> RunConfig:
    return RunConfig(
        n=args.n, distance=args.distance, beta=args.beta,
        direction=getattr(args, "direction", "shiftable"),
        eps=getattr(args, "eps", 0.01), max_doublings=getattr(args, "max_doublings", 7),
        iters=extra.pop("iters", 1), burnin=extra.pop("burnin", 0), seed=args.seed, out=args.out,
        options={"sigma0": args.sigma0, **extra},
    )


def _open_out(path):
    return open(path, "w", newline="") if path else _Stdout()


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()
        return False


def _chain_path(out: str, chain: int, chains: int) -> str:
    if chains == 1:
        return out
    p = Path(out)
    return str(p.with_name(f"{p.stem}_{chain}{p.suffix}"))


def cmd_sample(args) -> int:
    if args.chains < 1:
        raise ConfigError("--chains must be positive")
    if args.chains > 1 and not args.out:
        raise ConfigError("--chains > 1 needs --out")
    cfg = _config(args, iters=args.iters, burnin=args.burnin, start=args.start,
                  kernel=args.kernel, chains=args.chains)
    model, law, params = cfg.model(), cfg.law(), cfg.params()
    if args.kernel == "barker" and isinstance(law, LocalCycle) and law.ell > 2:
        raise ConfigError(f"barker proposals must be inverse-symmetric; {law} is not")

    def one(chain: int):
        rng = make_rng(cfg.seed, None if args.chains == 1 else chain)
        start = fisher_yates(rng, cfg.n) if args.start == "uniform" else None
        result = run_chain(model, law, params, cfg.iters, rng, burnin=cfg.burnin, start=start,
                           kernel=args.kernel)
        log.info("chain %d: %d rows, odd-cycle acceptance %d/%d", chain, len(result),
                 result.odd_cycle_accepted, result.odd_cycle_tries)
        path = _chain_path(cfg.out, chain, args.chains) if cfg.out else None
        with _open_out(path) as fh:
            RunTrace.from_chain(result).to_csv(fh, cfg.header())

    if args.chains == 1:
        one(0)
    else:
        with ThreadPoolExecutor() as pool:
            list(pool.map(one, range(args.chains)))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args, tol=args.tol, perturb=args.perturb)
    model, law, params = cfg.model(), cfg.law(), cfg.params()
    try:
        K_ = nurs_matrix(model, law, params)
    except ValueError as err:
        raise ConfigError(str(err)) from None
    if args.perturb:
        rows = K_.rows.copy()
        rows[0, 0] += 1e-3
        K_ = TransitionMatrix(K_.ordering, rows)
    pmf = exact_pmf(model).probs
    report = {
        "detailed_balance_residual": detailed_balance_residual(K_, pmf),
        "stationarity_residual": stationarity_residual(K_, pmf),
        "row_sum_error": K_.row_sum_error(),
        "tol": args.tol,
        **cfg.record(),
    }
    ok = max(report["detailed_balance_residual"], report["stationarity_residual"]) <= args.tol
    report["pass"] = ok
    with _open_out(cfg.out) as fh:
        fh.write(json.dumps(report, sort_keys=True) + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_mix(args) -> int:
    cfg = _config(args, kernel=args.kernel, t_max=args.t_max)
    model = cfg.model()
    try:
        if args.kernel == "shiftable":
            K_ = shiftable_matrix(model)
        else:
            K_ = nurs_matrix(model, cfg.law(), cfg.params())
        curve = tv_mixing_curve(K_, exact_pmf(model).probs, args.t_max)
        jump = table_local_jump(model.kind, model.n)
        delta = delta_beta(model.n, model.beta, jump, _diameter(model.n))
    except ValueError as err:
        raise ConfigError(str(err)) from None
    with _open_out(cfg.out) as fh:
        fh.write(f"# {cfg.header()}\n")
        fh.write(f"# delta={delta!r} local_jump={jump!r} cross_diameter={_diameter(model.n)}\n")
        fh.write("t,tv,envelope,within_envelope\n")
        for t, tv in enumerate(curve, start=1):
            env = (model.n - 1) * delta**t
            fh.write(f"{t},{float(tv)!r},{env!r},{str(bool(tv <= env)).lower()}\n")
    return EXIT_OK


def cmd_couple(args) -> int:
    if args.samples < 1:
        raise ConfigError("--samples must be positive")
    cfg = _config(args, samples=args.samples, sigma=args.sigma, edges=args.edges)
    model = cfg.model()
    if model.n < 2:
        raise ConfigError("coupling needs n >= 2")
    if model.n > 8:
        raise ConfigError(f"n={model.n} exceeds the enumeration limit 8")
    rng = make_rng(cfg.seed)
    if args.edges:
        edges = []
        for _ in range(args.edges):
            sigma = fisher_yates(rng, model.n)
            i, j = sorted(int(v) + 1 for v in rng.choice(model.n, size=2, replace=False))
            edges.append(EdgePair(sigma, i, j))
    else:
        sigma = fisher_yates(rng, model.n) if args.sigma == "uniform" else Permutation(range(1, model.n + 1))
        edges = [EdgePair(sigma, i, j) for i in range(1, model.n + 1) for j in range(i + 1, model.n + 1)]
    with _open_out(cfg.out) as fh:
        for edge in edges:
            report = edge_contraction_experiment(edge, model, args.samples, rng)
            fh.write(report.to_json() + "\n")
    return EXIT_OK


def _parse_ref(spec: str | None, report: str, trace: RunTrace):
    if spec is None:
        return None
    head, _, rest = spec.partition(":")
    try:
        if head == "poisson":
            lam = float(rest)
            if not lam > 0:
                raise ValueError
            k_max = max(int(trace.column(report).max()), int(lam + 20 * math.sqrt(lam) + 20))
            return poisson_support(lam, k_max)
        if head == "triangular":
            m_text, _, variant = rest.partition(":")
            variant = variant or "derived"
            if variant not in TRIANGULAR_VARIANTS:
                raise ValueError
            return triangular_support(int(m_text), variant)
    except ValueError:
        pass
    raise ConfigError(f"bad reference spec {spec!r}")


def cmd_stats(args) -> int:
    report = args.report
    acf_col = report.partition(":")[2] if report.startswith("acf:") else None
    column = acf_col or report
    if column not in TRACE_COLUMNS or column == "stop_reason":
        raise ConfigError(f"bad report spec {report!r}")
    try:
        trace = RunTrace.read_csv(args.input)
    except (OSError, ValueError, KeyError) as err:
        log.error("cannot read %s: %s", args.input, err)
        return EXIT_IO
    series = trace.column(column)
    if acf_col:
        if not 0 <= args.max_lag < len(series):
            raise ConfigError(f"--max-lag must lie in [0, {len(series) - 1}]")
        acf, ess = autocorr_ess(series, args.max_lag)
        with _open_out(args.out) as fh:
            fh.write(f"# {json.dumps({'report': report, 'ess': ess, 'n': len(series), 'version': __version__})}\n")
            fh.write("lag,acf\n")
            for lag, v in enumerate(acf):
                fh.write(f"{lag},{float(v)!r}\n")
        return EXIT_OK
    pmf = _parse_ref(args.ref, column, trace)
    hist = Histogram.from_values(series)
    meta = {"report": report, "ref": args.ref, "total": hist.total, "version": __version__}
    if pmf is not None:
        meta["tv"] = empirical_tv(hist, pmf)
    with _open_out(args.out) as fh:
        fh.write(f"# {json.dumps(meta)}\n")
        fh.write("k,count,empirical_p,reference_p\n")
        for k, count, emp, ref in histogram_rows(hist, pmf):
            fh.write(f"{k},{count},{emp!r},{ref!r}\n")
    return EXIT_OK


COMMANDS = {"sample": cmd_sample, "verify": cmd_verify, "mix": cmd_mix,
            "couple": cmd_couple, "stats": cmd_stats}


def _setup_logging() -> None:
    level = os.environ.get("NURS_LOG", "error")
    if level not in LOG_LEVELS:
        raise ConfigError(f"NURS_LOG must be one of {sorted(LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(level=LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        _setup_logging()
        return COMMANDS[args.command](args)
    except ConfigError as err:
        print(f"nurs: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"nurs: I/O error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
