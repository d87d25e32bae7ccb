"""Analytic-versus-Monte-Carlo validation suite used by ``guenoise validate``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import avg_channel_apply, depolarizing_f, twofold_apply, variance_matel_gue_avg
from .ensemble import RngStream, sample_gue
from .montecarlo import mc_channel_average, mc_nested_variance, mc_twofold, sff_mc_curve
from .sff import sff2, sff4, sff41
from .weingarten import closed_form_order2, haar_mc_validate, weingarten_table

Z_LIMIT = 4.0
PASS_FRACTION = 0.95
CHANNEL_TIMES = (0.3, 1.0, 3.0)
VARIANCE_TIMES = (0.5, 1.0, 2.0)
MAX_TWOFOLD_MC_N = 8


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        self.passed = bool(self.passed)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def within(estimate, reference, z_limit=Z_LIMIT, atol=1e-9):
    """Boolean mask of |estimate - reference| <= z_limit * SE (+ tiny slack for zero-variance entries)."""
    ref = np.asarray(reference)
    dev = np.abs(np.asarray(estimate.mean) - ref)
    return dev <= z_limit * np.asarray(estimate.std_error) + atol * (1.0 + np.abs(ref))


def mc_grid(n: int, points: int = 64) -> np.ndarray:
    return np.geomspace(0.05, 4.0 * n, points)


def check_sff(n, samples, seed) -> list[CheckResult]:
    grid = mc_grid(n)
    out = []
    for stream, (label, p, q, fn) in enumerate(
        [("R2", 1, (), sff2), ("R41", 2, (1,), sff41), ("R4", 2, (), sff4)]
    ):
        est = sff_mc_curve(p, q, grid, n, samples, RngStream(seed, 100 + stream))
        exact = np.array([fn(t, n) for t in grid])
        frac = float(np.mean(within(est, exact)))
        out.append(CheckResult(f"sff {label} vs MC (n={n})", frac >= PASS_FRACTION, f"{frac:.1%} of {grid.size} points within 4 SE"))
    return out


def check_channels(n, samples, seed) -> list[CheckResult]:
    a = sample_gue(n, RngStream(seed, 1))
    b = sample_gue(n, RngStream(seed, 2))
    out = []
    for j, t in enumerate(CHANNEL_TIMES):
        est = mc_channel_average(a, t, samples, RngStream(seed, 200 + j))
        frac = float(np.mean(within(est, avg_channel_apply(a, t))))
        out.append(CheckResult(f"onefold channel vs MC (n={n}, t={t})", frac >= PASS_FRACTION, f"{frac:.1%} of entries within 4 SE"))
        if n <= MAX_TWOFOLD_MC_N:
            est2 = mc_twofold(a, b, t, samples, RngStream(seed, 300 + j))
            frac2 = float(np.mean(within(est2, twofold_apply(a, b, t))))
            out.append(CheckResult(f"twofold channel vs MC (n={n}, t={t})", frac2 >= PASS_FRACTION, f"{frac2:.1%} of entries within 4 SE"))
    return out


def check_variance(n, samples, seed) -> list[CheckResult]:
    out = []
    for j, t in enumerate(VARIANCE_TIMES):
        for (m, k) in ((0, 0), (0, 1)):
            est = mc_nested_variance(m, k, t, n, 1.0, samples, RngStream(seed, 400 + 2 * j + k))
            exact = variance_matel_gue_avg(m, k, t, n, 1.0)
            ok = bool(within(est, exact))
            z = abs(float(est.mean) - exact) / float(est.std_error)
            out.append(CheckResult(f"element variance vs nested MC (n={n}, t={t}, ({m},{k}))", ok, f"|z| = {z:.2f}"))
    return out


def check_weingarten(n, samples, seed) -> list[CheckResult]:
    out = []
    if n >= 2:
        table = weingarten_table(2, n)
        err = max(abs(table.values[k] - v) for k, v in closed_form_order2(n).items())
        out.append(CheckResult(f"order-2 Weingarten closed form (n={n})", err <= 1e-13, f"max error {err:.1e}"))
    k = 2 if n >= 2 else 1
    res = haar_mc_validate(k, n, samples, RngStream(seed, 500))
    out.append(CheckResult(f"Haar moment panel vs MC (k={k}, n={n})", res.max_z_score < Z_LIMIT, f"max |z| = {res.max_z_score:.2f}"))
    return out


def check_properties(n) -> list[CheckResult]:
    grid = np.concatenate([[0.0], np.geomspace(1e-2, 10.0 * n, 128)])
    f = np.array([depolarizing_f(t, n).f for t in grid])
    t0 = max(abs(sff2(0, n) / n**2 - 1), abs(sff41(0, n) / n**3 - 1), abs(sff4(0, n) / n**4 - 1))
    even = max(abs(sff2(t, n) - sff2(-t, n)) for t in grid[::8])
    a = sample_gue(n, RngStream(0, 9))
    tr_err = max(abs(np.trace(avg_channel_apply(a, t)) - np.trace(a)) for t in grid[::16])
    return [
        CheckResult(f"form factors at t=0 (n={n})", t0 <= 1e-9, f"max relative error {t0:.1e}"),
        CheckResult(f"evenness of R2 (n={n})", even <= 1e-12, f"max |R2(t) - R2(-t)| = {even:.1e}"),
        CheckResult(f"f in [0, 1) (n={n})", bool(f.min() >= -1e-12 and f.max() < 1), f"range [{f.min():.3g}, {f.max():.6g}]"),
        CheckResult(f"f non-monotone (n={n})", bool(np.any(np.diff(f) < 0)), "a later time has smaller f"),
        CheckResult(f"trace preservation (n={n})", tr_err <= 1e-12 * (1 + abs(np.trace(a))), f"max error {tr_err:.1e}"),
    ]


def run_suite(n: int, samples: int, seed: int) -> list[CheckResult]:
    results = check_properties(n) if n >= 2 else []
    results += check_sff(n, samples, seed)
    if n >= 2:
        results += check_channels(n, samples, seed)
        results += check_variance(n, samples, seed)
    results += check_weingarten(n, samples, seed)
    return results
