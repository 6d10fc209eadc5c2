"""Command-line front end.

Subcommands: pmf, sample, moments, cf, converge, verify.  Configuration is a
flat key=value document plus command-line overrides; no positional arguments
beyond the subcommand.  All floating-point output is printed with 17
significant digits so files round-trip losslessly, and fixed seeds reproduce
output files byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import SkellamFieldsError, UnknownSuiteError, ValidationError
from .field_integrals import IntegralOrders, gsrf_log_cf, levy_integral_cf, prf_integral_cf, rl_integral_sample, rl_integral_moments
from .fractional_field import (
    FracOrders,
    FsrfModel,
    fprf_moments,
    fprf_pmf,
    fprf_sample,
    fsrf1_moments,
    fsrf1_pmf,
    fsrf1_sample,
    fsrf2_moments,
    fsrf2_pmf,
    fsrf2_sample,
    fsrf3_moments,
    fsrf3_pmf,
    fsrf3_sample,
)
from .rng import RngStream
from .sampling import BoxRegion, sample_poisson
from .skellam_field import (
    GridPoint,
    GsrfParams,
    PmfTable,
    SkellamParams,
    gsrf_count,
    gsrf_moments,
    srf_pmf_table,
)
from .series import SeriesControl
from .suites import DEFAULT_SEED, run_suite, suite_names
from .verification import McConfig, convergence_study

MODELS = ("PRF", "FPRF", "GSRF", "SRF", "FSRF1", "FSRF2", "FSRF3", "INTEGRAL")

_KNOWN_KEYS = {
    "model", "lambda", "lambda1", "lambda2", "jumps",
    "alpha", "beta", "alpha2", "beta2", "nu1", "nu2",
    "s", "t", "s2", "t2", "u", "n_min", "n_max",
    "replicates", "seed", "workers",
    "rel_tol", "max_terms", "consecutive_small",
    "xi", "k_values", "suite", "step",
}


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    out: dict = {}
    for ln_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {ln_no}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValidationError(f"config line {ln_no}: empty key")
        out[key] = value
    return out


@dataclass
class ExperimentConfig:
    """Validated experiment description shared by all subcommands."""

    model: str
    raw: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValidationError(f"model: must be one of {', '.join(MODELS)}")
        unknown = set(self.raw) - _KNOWN_KEYS
        if unknown:
            raise ValidationError(f"config: unknown keys {sorted(unknown)}")

    # -- typed accessors ----------------------------------------------------
    def _get(self, key, cast, default=None, required=False):
        if key not in self.raw:
            if required:
                raise ValidationError(f"{key}: required for model {self.model}")
            return default
        try:
            return cast(self.raw[key])
        except ValidationError:
            raise
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{key}: {exc}") from exc

    def floatval(self, key, default=None, required=False):
        return self._get(key, float, default, required)

    def intval(self, key, default=None, required=False):
        return self._get(key, lambda v: int(str(v), 0), default, required)

    def strval(self, key, default=None, required=False):
        return self._get(key, str, default, required)

    # -- derived structures -------------------------------------------------
    @property
    def grid_point(self) -> GridPoint:
        return GridPoint(self.floatval("s", required=True),
                         self.floatval("t", required=True))

    @property
    def second_point(self) -> GridPoint | None:
        if "s2" not in self.raw and "t2" not in self.raw:
            return None
        return GridPoint(self.floatval("s2", required=True),
                         self.floatval("t2", required=True))

    @property
    def skellam(self) -> SkellamParams:
        return SkellamParams(self.floatval("lambda1", required=True),
                             self.floatval("lambda2", required=True))

    @property
    def rate(self) -> float:
        lam = self.floatval("lambda", required=True)
        if not lam > 0.0:
            raise ValidationError("lambda: must be > 0")
        return lam

    @property
    def gsrf(self) -> GsrfParams:
        spec = self.strval("jumps", required=True)
        jumps = []
        for item in spec.split(","):
            if ":" not in item:
                raise ValidationError("jumps: expected 'jump:rate' pairs separated by commas")
            j, lam = item.split(":", 1)
            jumps.append((float(j), float(lam)))
        return GsrfParams(tuple(jumps))

    @property
    def orders(self) -> FracOrders:
        return FracOrders(self.floatval("alpha", 1.0), self.floatval("beta", 1.0),
                          self.floatval("alpha2"), self.floatval("beta2"))

    @property
    def integral_orders(self) -> IntegralOrders:
        return IntegralOrders(self.floatval("nu1", 1.0), self.floatval("nu2", 1.0))

    @property
    def window(self) -> tuple:
        n_min = self.intval("n_min", -10)
        n_max = self.intval("n_max", 10)
        if n_min > n_max:
            raise ValidationError("n_min: must be <= n_max")
        return n_min, n_max

    @property
    def mc(self) -> McConfig:
        return McConfig(self.intval("replicates", 1000),
                        self.intval("seed", DEFAULT_SEED),
                        self.intval("workers", 1))

    @property
    def series(self) -> SeriesControl:
        return SeriesControl(self.floatval("rel_tol", 1e-15),
                             self.intval("max_terms", 500),
                             self.intval("consecutive_small", 3))

    @property
    def fsrf_model(self) -> FsrfModel:
        kind = {"FSRF1": "I", "FSRF2": "II", "FSRF3": "III"}[self.model]
        return FsrfModel(kind, self.skellam, self.orders)

    def xi_grid(self) -> list:
        raw = self.strval("xi", "-2,-1.5,-1,-0.5,0,0.5,1,1.5,2")
        return [float(v) for v in raw.split(",")]

    def k_values(self) -> list:
        raw = self.strval("k_values", "16,32,64")
        return [int(v) for v in raw.split(",")]


def load_config(args) -> ExperimentConfig:
    raw: dict = {}
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw.update(parse_config_text(fh.read()))
    for item in args.set or []:
        if "=" not in item:
            raise ValidationError(f"--set: expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        raw[key.strip()] = value.strip()
    if args.seed is not None:
        raw["seed"] = str(args.seed)
    if getattr(args, "workers", None) is not None:
        raw["workers"] = str(args.workers)
    model = raw.pop("model", None)
    if model is None:
        raise ValidationError("model: required (set it in the config or via --set model=...)")
    return ExperimentConfig(str(model).upper(), raw)


def _write_output(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _pmf_table(cfg: ExperimentConfig) -> PmfTable:
    n_min, n_max = cfg.window
    ctrl = cfg.series
    p = cfg.grid_point
    if cfg.model == "SRF":
        return srf_pmf_table(cfg.skellam, p.s, p.t, n_min, n_max, ctrl)
    if cfg.model in ("FSRF1", "FSRF2", "FSRF3"):
        model = cfg.fsrf_model
        pmf = {"FSRF1": fsrf1_pmf, "FSRF2": fsrf2_pmf, "FSRF3": fsrf3_pmf}[cfg.model]
        probs = [pmf(model, p.s, p.t, n, ctrl) for n in range(n_min, n_max + 1)]
    elif cfg.model == "FPRF":
        if n_min < 0:
            raise ValidationError("n_min: must be >= 0 for FPRF")
        o = cfg.orders
        probs = [fprf_pmf(cfg.rate, o.alpha, o.beta, p.s, p.t, n, ctrl)
                 for n in range(n_min, n_max + 1)]
    elif cfg.model == "PRF":
        if n_min < 0:
            raise ValidationError("n_min: must be >= 0 for PRF")
        mu = cfg.rate * p.s * p.t
        probs = [math.exp(-mu + n * math.log(mu) - math.lgamma(n + 1)) if mu > 0
                 else (1.0 if n == 0 else 0.0)
                 for n in range(n_min, n_max + 1)]
    else:
        raise ValidationError(f"model: pmf is not defined for {cfg.model}")
    # fractional series carry up to ~1e-6 of cancellation noise, which can
    # leave tiny negative far-tail entries; anything worse is a real error
    probs = [max(0.0, v) if v > -1e-4 else v for v in probs]
    return PmfTable.from_probs(n_min, probs)


def cmd_pmf(args) -> int:
    cfg = load_config(args)
    table = _pmf_table(cfg)
    _write_output(table.to_json() + "\n" if args.format == "json" else table.to_csv(),
                  args.output)
    return 0


def _draw_samples(cfg: ExperimentConfig) -> np.ndarray:
    mc = cfg.mc
    p = cfg.grid_point
    rng = RngStream(mc.seed)
    n = mc.replicates
    if cfg.model == "SRF":
        region = BoxRegion((0.0, 0.0), (p.s, p.t))
        return gsrf_count(cfg.skellam.to_gsrf(), region, rng, size=n)
    if cfg.model == "GSRF":
        region = BoxRegion((0.0, 0.0), (p.s, p.t))
        return gsrf_count(cfg.gsrf, region, rng, size=n)
    if cfg.model == "PRF":
        return sample_poisson(cfg.rate * p.s * p.t, rng, size=n)
    if cfg.model == "FPRF":
        o = cfg.orders
        return fprf_sample(cfg.rate, o.alpha, o.beta, p.s, p.t, rng, size=n)
    if cfg.model == "FSRF1":
        return fsrf1_sample(cfg.fsrf_model, p.s, p.t, rng, size=n)
    if cfg.model == "FSRF2":
        return fsrf2_sample(cfg.fsrf_model, p.s, p.t, rng, size=n)
    if cfg.model == "FSRF3":
        return fsrf3_sample(cfg.fsrf_model, p.s, p.t, rng, size=n)
    if cfg.model == "INTEGRAL":
        return rl_integral_sample(cfg.rate, cfg.integral_orders, p.s, p.t, rng, size=n)
    raise ValidationError(f"model: sampling is not defined for {cfg.model}")


def cmd_sample(args) -> int:
    cfg = load_config(args)
    draws = _draw_samples(cfg)
    _write_output("".join(_fmt(v) + "\n" for v in draws), args.output)
    return 0


def _moments(cfg: ExperimentConfig) -> dict:
    p = cfg.grid_point
    p2 = cfg.second_point
    if cfg.model in ("SRF", "GSRF"):
        params = cfg.skellam.to_gsrf() if cfg.model == "SRF" else cfg.gsrf
        b1 = BoxRegion((0.0, 0.0), (p.s, p.t))
        b2 = BoxRegion((0.0, 0.0), (p2.s, p2.t)) if p2 else b1
        mean, var, cov = gsrf_moments(params, b1, b2)
        return {"mean": mean, "var": var, "cov": cov}
    if cfg.model == "PRF":
        lam = cfg.rate
        out = {"mean": lam * p.s * p.t, "var": lam * p.s * p.t}
        if p2:
            out["cov"] = lam * min(p.s, p2.s) * min(p.t, p2.t)
        return out
    if cfg.model == "FPRF":
        o = cfg.orders
        mean, var, cov = fprf_moments(cfg.rate, o.alpha, o.beta, p, p2 or p)
        return {"mean": mean, "var": var, "cov": cov}
    if cfg.model == "FSRF1":
        mean, var, cov = fsrf1_moments(cfg.fsrf_model, p, p2 or p)
        return {"mean": mean, "var": var, "cov": cov}
    if cfg.model == "FSRF2":
        mean, var = fsrf2_moments(cfg.fsrf_model, p.s, p.t)
        return {"mean": mean, "var": var}
    if cfg.model == "FSRF3":
        mean, var, cov = fsrf3_moments(cfg.fsrf_model, p, p2 or p)
        return {"mean": mean, "var": var, "cov": cov}
    if cfg.model == "INTEGRAL":
        mean, var = rl_integral_moments(cfg.rate, cfg.integral_orders, p.s, p.t)
        return {"mean": mean, "var": var}
    raise ValidationError(f"model: moments are not defined for {cfg.model}")


def cmd_moments(args) -> int:
    cfg = load_config(args)
    moments = _moments(cfg)
    if args.format == "json":
        text = json.dumps({k: float(v) for k, v in moments.items()}) + "\n"
    else:
        keys = list(moments)
        text = ",".join(keys) + "\n" + ",".join(_fmt(moments[k]) for k in keys) + "\n"
    _write_output(text, args.output)
    return 0


def cmd_cf(args) -> int:
    cfg = load_config(args)
    p = cfg.grid_point
    xis = cfg.xi_grid()
    if cfg.model in ("PRF", "INTEGRAL"):
        values = [prf_integral_cf(cfg.rate, p.s, p.t, xi) for xi in xis]
    elif cfg.model == "GSRF":
        log_phi = gsrf_log_cf(cfg.gsrf)
        values = [levy_integral_cf(log_phi, p.s, p.t, xi) for xi in xis]
    else:
        raise ValidationError(f"model: integral CF is not defined for {cfg.model}")
    if args.format == "json":
        rows = [{"xi": xi, "re": v.real, "im": v.imag} for xi, v in zip(xis, values)]
        text = json.dumps(rows) + "\n"
    else:
        lines = ["xi,re,im"]
        lines += [f"{_fmt(xi)},{_fmt(v.real)},{_fmt(v.imag)}" for xi, v in zip(xis, values)]
        text = "\n".join(lines) + "\n"
    _write_output(text, args.output)
    return 0


def cmd_converge(args) -> int:
    cfg = load_config(args)
    params = cfg.gsrf if cfg.model == "GSRF" else cfg.skellam.to_gsrf()
    p = cfg.grid_point
    reports = convergence_study(params, p.s, p.t, cfg.k_values(), cfg.mc)
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in reports]) + "\n"
    else:
        lines = ["k,tv,threshold,noise_floor,pass"]
        for r in reports:
            lines.append(f"{r.metadata['k']},{_fmt(r.value)},{_fmt(r.threshold)},"
                         f"{_fmt(r.metadata['noise_floor'])},{str(r.passed).lower()}")
        text = "\n".join(lines) + "\n"
    _write_output(text, args.output)
    return 0 if all(r.passed for r in reports) else 1


def cmd_verify(args) -> int:
    names = suite_names() if args.suite == "all" else [args.suite]
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    results = []
    for name in names:
        result = run_suite(name, seed=seed, workers=args.workers or 1)
        results.append(result)
        for rep in result.reports:
            status = "pass" if rep.passed else "FAIL"
            label = rep.metadata.get("criterion", rep.metric.value)
            print(f"[{status}] {result.name}: {label}: "
                  f"{rep.metric.value}={rep.value:.3g} <= {rep.threshold:.3g}")
        print(f"suite {result.name}: {'pass' if result.passed else 'FAIL'} "
              f"({result.elapsed_s:.1f}s)")
    if args.output is not None:
        payload = json.dumps([r.to_dict() for r in results], indent=2) + "\n"
        _write_output(payload, args.output)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skellam-fields",
        description="Skellam and fractional Skellam random fields: tables, samples, "
                    "moments, characteristic functions and verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, workers=True):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
        p.add_argument("--seed", type=lambda v: int(v, 0), help="64-bit RNG seed")
        if workers:
            p.add_argument("--workers", type=int, help="Monte Carlo worker threads")
        p.add_argument("--output", "-o", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    for name, fn in (("pmf", cmd_pmf), ("sample", cmd_sample), ("moments", cmd_moments),
                     ("cf", cmd_cf), ("converge", cmd_converge)):
        p = sub.add_parser(name, help=f"{name} command")
        common(p)
        p.set_defaults(func=fn)

    pv = sub.add_parser("verify", help="run a named verification suite")
    pv.add_argument("--suite", required=True,
                    help="suite name or 'all'; see --list via an unknown name")
    pv.add_argument("--seed", type=lambda v: int(v, 0), help="64-bit RNG seed")
    pv.add_argument("--workers", type=int, help="Monte Carlo worker threads")
    pv.add_argument("--output", "-o", help="write the JSON report here")
    pv.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnknownSuiteError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SkellamFieldsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
