"""Convergence sweeps, integration tests and result serialisation behind the CLI."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .kernel import KernelParams, Weights, squared_worst_case_error
from .nets import (GeneratingMatrices, PointSet, faure_matrices, generate_points,
                   interlace, interlaced_t_bound, read_matrices, sequence_to_net,
                   sobol_matrices)
from .quality import exact_t_value, propagate_t
from .shifts import (apply_shift, best_shift_search, default_depth, rms_wce_mc,
                     sample_shift, theoretical_bound)

SCHEMA_VERSION = 1
MAX_KERNEL_EVALS = 10 ** 10


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class CostGuardError(RuntimeError):
    """The requested run exceeds the kernel-evaluation budget."""


def parse_gamma(text: str | None, s: int) -> Weights:
    """``product:g1,g2,...`` (one value is broadcast) or ``explicit:@file.json``."""
    if text is None:
        return Weights.uniform(s)
    kind, _, rest = text.partition(":")
    if kind == "product":
        vals = [float(x) for x in rest.split(",") if x.strip()]
        if len(vals) == 1:
            vals = vals * s
        if len(vals) != s:
            raise ConfigError(f"product weights need {s} values, got {len(vals)}")
        return Weights(s, product=vals)
    if kind == "explicit":
        if not rest.startswith("@"):
            raise ConfigError("explicit weights are given as explicit:@file.json")
        w = Weights.from_json(rest[1:])
        if w.s != s:
            raise ConfigError(f"weights file is for s={w.s}, config has s={s}")
        return w
    raise ConfigError(f"unknown weights text {text!r}")


@dataclass
class ExperimentConfig:
    b: int = 2
    alpha: int = 2
    beta: int = 4
    s: int = 1
    m_min: int = 4
    m_max: int = 8
    R: int = 16
    seed: int = 0
    generator: str = "sobol"
    interlace: int | None = None
    gamma: str | None = None
    matrix_file: str | None = None
    out: str | None = None
    format: str = "json"
    ctau_literal: bool = False
    fit_from: int | None = None
    dual_budget: int | None = None
    baseline: bool = False

    @property
    def order(self) -> int:
        """Interlacing factor; defaults to beta so the net has order beta."""
        return self.beta if self.interlace is None else self.interlace

    @property
    def m_values(self) -> list[int]:
        return list(range(self.m_min, self.m_max + 1))

    @property
    def fit_start(self) -> int:
        """First m used in rate fits; by default the smallest m is left out."""
        if self.fit_from is not None:
            return self.fit_from
        return self.m_min + 1 if self.m_max - self.m_min >= 3 else self.m_min

    def weights(self) -> Weights:
        return parse_gamma(self.gamma, self.s)

    def validate(self, need_bound: bool = False) -> None:
        if self.generator not in ("faure", "sobol", "file"):
            raise ConfigError(f"unknown generator {self.generator!r}")
        if self.generator == "file" and not self.matrix_file:
            raise ConfigError("generator 'file' needs a matrix file")
        if self.generator == "sobol" and self.b != 2:
            raise ConfigError("Sobol' matrices are base 2")
        if self.s < 1 or self.alpha < 1 or self.order < 1:
            raise ConfigError("s, alpha and the interlacing factor must be positive")
        if self.m_min < 1 or self.m_max < self.m_min:
            raise ConfigError("m range must be nonempty and ascending")
        if self.R < 2:
            raise ConfigError("R must be at least 2")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if need_bound and (self.alpha < 2 or self.beta < 2 * self.alpha):
            raise ConfigError("bound evaluation needs alpha >= 2 and beta >= 2*alpha")


def source_matrices(cfg: ExperimentConfig, m: int) -> GeneratingMatrices:
    """Order-1 source net of dimension order*s with m x m matrices."""
    dim = cfg.order * cfg.s
    if cfg.generator == "faure":
        return faure_matrices(cfg.b, dim, m)
    if cfg.generator == "sobol":
        return sobol_matrices(dim, m)
    G = read_matrices(cfg.matrix_file)
    if G.s != dim:
        raise ConfigError(f"matrix file has s={G.s}, need {dim}")
    if G.base != cfg.b:
        raise ConfigError(f"matrix file has base {G.base}, config has {cfg.b}")
    return sequence_to_net(G, m)


def build_net(cfg: ExperimentConfig, m: int) -> tuple[GeneratingMatrices, GeneratingMatrices]:
    Q = source_matrices(cfg, m)
    return Q, interlace(Q, cfg.order)


def order_beta_t(cfg: ExperimentConfig, Q: GeneratingMatrices) -> int:
    """A t-value for which the interlaced net is an order-beta (t, m, s)-net."""
    m = Q.m
    t_src = exact_t_value(Q, 1)
    t = interlaced_t_bound(t_src, cfg.order, cfg.s, m)
    if cfg.order == cfg.beta:
        return t
    if cfg.order > cfg.beta:
        return propagate_t(t, cfg.order, cfg.beta)
    return cfg.beta * m


def estimated_kernel_evals(cfg: ExperimentConfig) -> int:
    per = sum(cfg.b ** (2 * m) for m in cfg.m_values) * cfg.R * cfg.s
    return per * (2 if cfg.baseline else 1)


def check_cost(cfg: ExperimentConfig) -> None:
    evals = estimated_kernel_evals(cfg)
    if evals > MAX_KERNEL_EVALS:
        raise CostGuardError(f"~{evals:.3g} kernel evaluations exceed {MAX_KERNEL_EVALS:.0e}")


@dataclass
class ConvergenceRecord:
    m: int
    N: int
    t: int
    rms: float
    standard_error: float
    best_shift_error: float
    bound: float
    mc_rms: float | None = None
    wall_time: float = field(default=0.0, compare=False)

    def payload(self) -> dict:
        d = asdict(self)
        d.pop("wall_time")
        if d["mc_rms"] is None:
            d.pop("mc_rms")
        return d


@dataclass
class RateFit:
    slope: float
    intercept: float


def fit_rate(points: Sequence[tuple[float, float]]) -> RateFit:
    """Least-squares line through (log N, log e)."""
    if len(points) < 3:
        raise ValueError("need at least three points to fit a rate")
    N = np.array([p[0] for p in points], dtype=float)
    e = np.array([p[1] for p in points], dtype=float)
    if np.any(e <= 0) or np.any(N <= 0):
        raise ValueError("N and errors must be positive")
    slope, intercept = np.polyfit(np.log(N), np.log(e), 1)
    return RateFit(float(slope), float(intercept))


def log_corrected(points: Sequence[tuple[float, float]], s: int) -> list[tuple[float, float]]:
    """Divide each error by (log N)^((s-1)/2)."""
    return [(N, e / math.log(N) ** ((s - 1) / 2)) for N, e in points]


def mc_baseline(params: KernelParams, N: int, R: int, seed: int) -> float:
    """RMS worst-case error of N i.i.d. uniform points over R replicates."""
    e2 = []
    for r in range(R):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, r, N, 1])))
        e2.append(squared_worst_case_error(params, rng.random((N, params.s))))
    return math.sqrt(math.fsum(e2) / R)


@dataclass
class ConvergenceResult:
    records: list[ConvergenceRecord]
    fit: RateFit
    fit_corrected: RateFit
    fit_baseline: RateFit | None = None


def converge(cfg: ExperimentConfig, log: Callable[[str], None] | None = None) -> ConvergenceResult:
    cfg.validate(need_bound=True)
    check_cost(cfg)
    params = KernelParams(cfg.alpha, cfg.weights())
    records = []
    for m in cfg.m_values:
        start = time.perf_counter()
        Q, G = build_net(cfg, m)
        P = generate_points(G)
        t = order_beta_t(cfg, Q)
        res = rms_wce_mc(params, P, cfg.R, cfg.seed)
        _, best = best_shift_search(params, P, cfg.R, cfg.seed, result=res)
        bound = theoretical_bound(cfg.alpha, cfg.beta, cfg.b, t, m, params.weights,
                                  literal=cfg.ctau_literal)
        mc = mc_baseline(params, P.N, cfg.R, cfg.seed) if cfg.baseline else None
        rec = ConvergenceRecord(m, P.N, t, res.estimate, res.standard_error, best, bound, mc,
                                time.perf_counter() - start)
        records.append(rec)
        if log:
            log(f"m={m} N={P.N} t={t} rms={rec.rms:.4e} bound={bound:.4e} "
                f"({rec.wall_time:.2f}s)")
    fit_recs = [r for r in records if r.m >= cfg.fit_start]
    pts = [(r.N, r.rms) for r in fit_recs]
    fit = fit_rate(pts)
    fit_c = fit_rate(log_corrected(pts, cfg.s))
    fit_b = fit_rate([(r.N, r.mc_rms) for r in fit_recs]) if cfg.baseline else None
    return ConvergenceResult(records, fit, fit_c, fit_b)


# --- test integrands with known integrals -----------------------------------

def _expsum(x):
    s = x.shape[1]
    return np.exp(x.sum(axis=1) / s)


INTEGRANDS: dict[str, tuple[Callable[[np.ndarray], np.ndarray], Callable[[int], float]]] = {
    "one": (lambda x: np.ones(x.shape[0]), lambda s: 1.0),
    "prod": (lambda x: np.prod(x, axis=1), lambda s: 2.0 ** -s),
    "prodsq": (lambda x: np.prod(x ** 2, axis=1), lambda s: 3.0 ** -s),
    "poly": (lambda x: np.prod(1 + x ** 3 - x / 2, axis=1), lambda s: 1.0 ** s),
    "expsum": (_expsum, lambda s: (s * math.expm1(1 / s)) ** s),
}


@dataclass
class IntegrationRecord:
    m: int
    N: int
    mean_abs_error: float
    rms_error: float


def shifted_estimates(P: PointSet, f: Callable[[np.ndarray], np.ndarray], R: int,
                      seed: int) -> np.ndarray:
    d = default_depth(P.n, P.base)
    out = []
    for r in range(R):
        X = apply_shift(P, sample_shift(seed, P.base, P.s, d, r)).values()
        out.append(math.fsum(f(X)) / P.N)
    return np.array(out)


def integrate(cfg: ExperimentConfig, integrand: str) -> tuple[list[IntegrationRecord], RateFit | None]:
    if integrand not in INTEGRANDS:
        raise ConfigError(f"unknown integrand {integrand!r}; choose from {sorted(INTEGRANDS)}")
    cfg.validate()
    f, exact = INTEGRANDS[integrand]
    I = exact(cfg.s)
    recs = []
    for m in cfg.m_values:
        _, G = build_net(cfg, m)
        P = generate_points(G)
        err = np.abs(shifted_estimates(P, f, cfg.R, cfg.seed) - I)
        recs.append(IntegrationRecord(m, P.N, float(np.mean(err)),
                                      float(math.sqrt(np.mean(err ** 2)))))
    fit = None
    fit_recs = [r for r in recs if r.m >= cfg.fit_start]
    if len(fit_recs) >= 3 and all(r.rms_error > 0 for r in fit_recs):
        fit = fit_rate([(r.N, r.rms_error) for r in fit_recs])
    return recs, fit


# --- output ------------------------------------------------------------------

def to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def to_json(command: str, cfg: ExperimentConfig | None, rows: Sequence[dict],
            extra: dict | None = None) -> str:
    doc = {"schema": SCHEMA_VERSION, "command": command}
    if cfg is not None:
        doc["config"] = {k: v for k, v in asdict(cfg).items() if k not in ("out", "format")}
    doc["records"] = list(rows)
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"
