"""Monte Carlo experiments: MISE of estimators, k-sensitivity and test rejection rates.

Every replicate ``r`` of model ``m`` draws its data from the stream
``(seed, DATA, key(m), r)``, where ``key`` is a CRC32 of the model name, so
results do not depend on worker count, model order or how a run is split
up.  All estimators see the same data within a replicate.
"""

from __future__ import annotations

import csv
import io
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from . import _rng
from .approximation import optimal_weight
from .copulas import from_name
from .empirical import PseudoSample
from .estimators import WeightSpec, default_grid, estimate_cfg, estimate_md, estimate_pickands, DependenceCurve
from .evdtest import TestConfig, run_test
from .shape import endpoint_correct_cfg, endpoint_correct_pickands, full_correction

__all__ = [
    "WORKERS_ENV",
    "ExperimentConfig",
    "model_key",
    "model_sample",
    "estimate_all",
    "run_mise",
    "run_k_sweep",
    "run_power_table",
    "write_csv",
    "ANL_RHOS",
    "MIXED_RHOS",
    "K_GRID",
]

WORKERS_ENV = "PICKANDS_WORKERS"

ANL_RHOS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
MIXED_RHOS = (0.1, 0.2, 0.3, 0.4, 0.5)
K_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0, 1.25, 1.5, 2.0)


def _version():
    from . import __version__

    return __version__


def workers_from_env(default=1):
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, default)))
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer") from None


def _map(fn, items, workers):
    workers = workers_from_env() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves order, so reductions are independent of completion order
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


@dataclass
class ExperimentConfig:
    """Settings shared by the Monte Carlo drivers (see the CLI)."""

    experiment: str = "mise"
    models: tuple = ()
    n: int = 100
    replicates: int = 500
    estimators: tuple = ("pickands", "cfg", "md:0.4", "md:0.6")
    k_grid: tuple = K_GRID
    gamma: float = 0.95
    corrected: bool = True
    test: TestConfig = field(default_factory=TestConfig)
    alphas: tuple = (0.05, 0.1)
    seed: int = 0
    workers: int | None = None
    output: str | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        for m in self.models:
            _as_copula(m)  # fail early on unknown names


def _as_copula(m):
    return from_name(m) if isinstance(m, str) else m


def model_key(model):
    return zlib.crc32(str(model).encode())


def model_sample(model, n, seed, r):
    """Data of replicate ``r`` for ``model`` as a :class:`PseudoSample`."""
    C = _as_copula(model)
    rng = _rng.stream(seed, _rng.DATA, model_key(C), r)
    return PseudoSample.from_uniform(C.sample(n, rng))


# ---------------------------------------------------------------------------
# estimators with corrections


def _parse_estimator(name):
    if name in ("pickands", "cfg", "md:opt"):
        return name, None
    if name.startswith("md:"):
        return "md", float(name[3:])
    raise ValueError(f"unknown estimator {name!r}; use pickands, cfg, md:<k> or md:opt")


def _optimal_weights(C, t, N=50):
    """Optimal discrete weights for each interior ``t``; endpoints reuse their neighbour."""
    out = [None] * len(t)
    for i, ti in enumerate(t):
        if 0 < ti < 1:
            out[i] = optimal_weight(C, ti, N=N, tol=1e-6).weight
    first = next(i for i, w in enumerate(out) if w is not None)
    last = max(i for i, w in enumerate(out) if w is not None)
    for i in range(len(t)):
        if out[i] is None:
            out[i] = out[first] if i < first else out[last]
    return out


def estimate_all(ps, estimators, t, gamma=0.95, corrected=True, opt_weights=None):
    """Curves for each estimator name, corrected as in practice if requested.

    Pickands and CFG estimates get their endpoint corrections first; every
    curve is then clamped to ``[max(t, 1-t), 1]`` and replaced by its
    greatest convex minorant.
    """
    out = {}
    for name in estimators:
        kind, k = _parse_estimator(name)
        if kind == "pickands":
            c = DependenceCurve(t, estimate_pickands(ps, t), name)
            c = endpoint_correct_pickands(c) if corrected else c
        elif kind == "cfg":
            c = DependenceCurve(t, estimate_cfg(ps, t), name)
            c = endpoint_correct_cfg(c) if corrected else c
        elif kind == "md":
            c = DependenceCurve(t, estimate_md(ps, t, WeightSpec.hk(k), gamma), name)
        else:
            if opt_weights is None:
                raise ValueError("md:opt needs precomputed optimal weights")
            vals = [estimate_md(ps, ti, w, gamma) for ti, w in zip(t, opt_weights)]
            c = DependenceCurve(t, vals, name)
        out[name] = full_correction(c) if corrected else c
    return out


def _ise_task(args):
    model, n, seed, r, estimators, t, gamma, corrected, opt_weights = args
    C = _as_copula(model)
    ps = model_sample(C, n, seed, r)
    truth = C.pickands
    curves = estimate_all(ps, estimators, t, gamma, corrected, opt_weights)
    return [integrate.trapezoid((curves[e].values - truth(t)) ** 2, t) for e in estimators]


def _mise_matrix(model, n, replicates, seed, estimators, t, gamma, corrected, workers):
    C = _as_copula(model)
    if not C.is_extreme_value:
        raise ValueError(f"MISE needs an extreme-value model, got {C}")
    opt = _optimal_weights(C, t) if "md:opt" in estimators else None
    tasks = [(str(C), n, seed, r, tuple(estimators), t, gamma, corrected, opt) for r in range(replicates)]
    return np.array(_map(_ise_task, tasks, workers))


def run_mise(models, estimators=("pickands", "cfg", "md:0.4", "md:0.6"), n=100, replicates=500, seed=0,
             t_grid=None, gamma=0.95, corrected=True, workers=None):
    """Mean integrated squared error per model and estimator.

    Returns
    -------
    list of dict
        One row per (model, estimator) with the MISE and its Monte Carlo
        standard error.
    """
    t = default_grid() if t_grid is None else np.asarray(t_grid, float)
    rows = []
    for m in models:
        C = _as_copula(m)
        ise = _mise_matrix(C, n, replicates, seed, estimators, t, gamma, corrected, workers)
        for j, e in enumerate(estimators):
            rows.append({
                "model": str(C),
                "tail_dependence": round(C.tail_dependence(), 12),
                "estimator": e,
                "corrected": corrected,
                "n": n,
                "replicates": replicates,
                "seed": seed,
                "mise": float(ise[:, j].mean()),
                "se": float(ise[:, j].std(ddof=1) / np.sqrt(replicates)) if replicates > 1 else float("nan"),
                "version": _version(),
            })
    return rows


def _family_models(family, rhos):
    out = []
    for rho in rhos:
        out.append(from_name(f"{family}(rho={rho})"))
    return out


def run_k_sweep(family="asy-neg-log", rhos=ANL_RHOS, k_grid=K_GRID, n=100, replicates=200, seed=0,
                t_grid=None, gamma=0.95, workers=None):
    """MISE of the corrected ``h_k`` estimator relative to its best ``k``.

    For each ``rho`` the curve ``k -> MISE(k) / min_l MISE(l)`` is computed
    on ``k_grid``; the row with ``rho = 'max'`` is the pointwise maximum of
    these curves (worst case over ``rho``).

    Returns
    -------
    rows : list of dict
    summary : dict
        ``argmin`` per ``rho`` and of the worst-case curve.
    """
    t = default_grid() if t_grid is None else np.asarray(t_grid, float)
    ests = tuple(f"md:{k:g}" for k in k_grid)
    rows, ratios, argmins = [], [], {}
    for C, rho in zip(_family_models(family, rhos), rhos):
        mise = _mise_matrix(C, n, replicates, seed, ests, t, gamma, True, workers).mean(axis=0)
        ratio = mise / mise.min()
        ratios.append(ratio)
        argmins[rho] = float(k_grid[int(np.argmin(mise))])
        for k, m, q in zip(k_grid, mise, ratio):
            rows.append({"family": family, "model": str(C), "rho": rho, "k": k, "mise": float(m), "ratio": float(q),
                         "n": n, "replicates": replicates, "seed": seed, "version": _version()})
    worst = np.max(ratios, axis=0)
    for k, q in zip(k_grid, worst):
        rows.append({"family": family, "model": "", "rho": "max", "k": k, "mise": float("nan"), "ratio": float(q),
                     "n": n, "replicates": replicates, "seed": seed, "version": _version()})
    summary = {"argmin": argmins, "worst_case_argmin": float(k_grid[int(np.argmin(worst))])}
    return rows, summary


def _test_task(args):
    model, n, seed, r, cfg = args
    C = _as_copula(model)
    ps = model_sample(C, n, seed, r)
    rep = run_test(ps, replace(cfg, seed=seed), key=(model_key(C), r))
    return rep.statistic, rep.p_value, rep.replicates


def run_power_table(models, n=200, trials=200, cfg=None, alphas=(0.05, 0.1), seed=0, workers=None):
    """Rejection frequencies of the bootstrap test.

    With ``cfg.decision == 'pvalue'`` a trial rejects at level ``a`` when
    its p-value is at most ``a``; with ``'quantile'`` when the statistic
    exceeds the ``1 - a`` quantile of its replicates.
    """
    cfg = TestConfig() if cfg is None else cfg
    rows = []
    for m in models:
        C = _as_copula(m)
        res = _map(_test_task, [(str(C), n, seed, r, cfg) for r in range(trials)], workers)
        row = {"model": str(C), "n": n, "trials": trials, "B": cfg.B, "k": cfg.k, "eps": cfg.eps,
               "decision": cfg.decision, "seed": seed, "version": _version()}
        for a in alphas:
            if cfg.decision == "pvalue":
                rej = [p <= a for _, p, _ in res]
            else:
                rej = [s > np.quantile(reps, 1 - a) for s, _, reps in res]
            rate = float(np.mean(rej))
            row[f"reject_{a:g}"] = rate
            row[f"se_{a:g}"] = float(np.sqrt(rate * (1 - rate) / trials))
        rows.append(row)
    return rows


def write_csv(rows, path=None, comments=()):
    """Write dict rows as CSV; ``comments`` become leading ``#`` lines."""
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    if rows:
        keys = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    text = buf.getvalue()
    if path is None:
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text
