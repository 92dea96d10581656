"""Acceptance suite: every library-level exit criterion, one test each.

Each test prints a PASS/FAIL line with its measured quantity and elapsed
time, and enforces both the numerical tolerance and the runtime budget.
The heavy experiments run through the same drivers the CLI uses.
"""

import math
import time

import numpy as np
import pytest

from usol.bumps import build_bump_kit
from usol.dyadic import build_delta_psi, build_pv_psi, dyadic_delta_sum, dyadic_pv_sum
from usol.harness.config import ExperimentConfig, parse_lambda_seq
from usol.harness.experiments import (exp_kernel, exp_normest, exp_oscillatory,
                                      exp_polar_check, exp_pv_check, exp_region,
                                      exp_restrict_extend, exp_sharpness_cone,
                                      exp_sharpness_glambda, exp_sharpness_knapp,
                                      exp_sharpness_stationary, exp_sweep)

CFG = ExperimentConfig(
    lambda_seq=parse_lambda_seq("0.125:0.0078125:5"),
).validate()


@pytest.fixture(scope="module")
def kits():
    kit = build_bump_kit()
    return kit, build_delta_psi(kit), build_pv_psi(kit)


def _report_line(num, label, detail, ok, elapsed):
    status = "PASS" if ok else "FAIL"
    print(f"\n{status} criterion {num:2d}: {label} -- {detail} ({elapsed:.1f}s)")


def _fit(report, label):
    return next(f for f in report.fits if f.label == label)


def _check(report, label):
    return next(c for c in report.checks if c.label == label)


def test_criterion_01_dyadic_delta_identity(kits):
    _, psi_d, _ = kits
    t0 = time.time()
    errs = []
    for g, target, osc in ((lambda x: np.exp(-np.pi * x * x), 1.0, 1.0),
                           (lambda x: x * np.exp(-np.pi * x * x), 0.0, 1.0),
                           (lambda x: np.cos(2 * np.pi * x) * np.exp(-np.pi * x * x),
                            1.0, 0.5)):
        res = dyadic_delta_sum(psi_d, g, -24, 24, g_osc_scale=osc)
        errs.append(abs(res.value - target))
    elapsed = time.time() - t0
    ok = max(errs) < 1e-7 and elapsed < 5.0
    _report_line(1, "dyadic delta identity",
                 f"max error {max(errs):.2e} over window [-24,24]", ok, elapsed)
    assert max(errs) < 1e-7
    assert elapsed < 5.0


def test_criterion_02_pv_identity_and_support(kits):
    _, _, psi_pv = kits
    t0 = time.time()
    res = dyadic_pv_sum(psi_pv, lambda x: x * np.exp(-np.pi * x * x), -24, 24)
    id_err = abs(res.value - 1.0)
    inner = np.abs(psi_pv.psi_hat(np.linspace(-0.49, 0.49, 197))).max()
    outer = np.abs(psi_pv.psi_hat(
        np.concatenate([np.linspace(2.01, 9.0, 280),
                        -np.linspace(2.01, 9.0, 280)]))).max()
    xs = np.geomspace(1e-4, 180.0, 301)
    odd = np.abs(psi_pv(xs) + psi_pv(-xs)).max()
    elapsed = time.time() - t0
    ok = id_err < 1e-7 and inner < 1e-10 and outer < 1e-10 and odd == 0.0 \
        and elapsed < 5.0
    _report_line(2, "pv identity and transform support",
                 f"identity {id_err:.2e}, support sups {inner:.1e}/{outer:.1e}, "
                 f"oddness {odd:.1e}", ok, elapsed)
    assert id_err < 1e-7
    assert inner < 1e-10 and outer < 1e-10
    assert odd == 0.0
    assert elapsed < 5.0


def test_criterion_03_abc_completeness():
    t0 = time.time()
    report = exp_pv_check(CFG)
    chk = _check(report, "abc-completeness")
    elapsed = time.time() - t0
    ok = chk.passed and elapsed < 10.0
    _report_line(3, "A/B/C decomposition completeness",
                 f"worst residual {chk.value:.2e} at 1000 lattice points x 5 z",
                 ok, elapsed)
    assert chk.passed
    assert elapsed < 10.0


@pytest.fixture(scope="module")
def kernel_report():
    return exp_kernel(CFG), time.time()


def test_criterion_04_kernel_support(kernel_report):
    report, _ = kernel_report
    t0 = time.time()
    c1 = _check(report, "kernel-support-constant-one")
    c2 = _check(report, "kernel-support-two-eta1")
    elapsed = time.time() - t0
    worst = max(c1.value, c2.value)
    ok = c1.passed and c2.passed
    _report_line(4, "kernel support exactness",
                 f"largest outside/peak ratio {worst:.2e}", ok, elapsed)
    assert c1.passed and c2.passed


def test_criterion_05_kernel_decay_slopes(kernel_report):
    report, _ = kernel_report
    f1 = _fit(report, "kernel-size-rho-1")
    f2 = _fit(report, "kernel-size-rho-small")
    ok = f1.passed and f2.passed
    _report_line(5, "kernel size scaling",
                 f"slopes {f1.slope:.3f} (target 2.0+-0.15), "
                 f"{f2.slope:.3f} (target 1.5+-0.15)", ok, 0.0)
    assert f1.passed and f2.passed


def test_criterion_06_oscillatory_decay():
    t0 = time.time()
    report = exp_oscillatory(CFG)
    f1 = _fit(report, "oscillatory-decay-rho-1")
    f2 = _fit(report, "oscillatory-decay-rho-small")
    elapsed = time.time() - t0
    ok = f1.passed and f2.passed and elapsed < 300.0
    _report_line(6, "oscillatory integral decay",
                 f"slopes {f1.slope:.3f} (target -1.0+-0.1), "
                 f"{f2.slope:.3f} (target -0.5+-0.1)", ok, elapsed)
    assert f1.passed and f2.passed
    assert elapsed < 300.0


def test_criterion_07_slab_operator_scaling(kernel_report):
    report, _ = kernel_report
    f = _fit(report, "slab-opnorm-scaling")
    _report_line(7, "slab operator L2->L6 scaling",
                 f"slope {f.slope:.3f} (target 0.5+-0.15)", f.passed, 0.0)
    assert f.passed


def test_criterion_08_polar_identity():
    t0 = time.time()
    report = exp_polar_check(CFG)
    worst = max(c.value for c in report.checks)
    elapsed = time.time() - t0
    ok = report.passed and elapsed < 60.0
    _report_line(8, "generalized polar coordinates",
                 f"worst relative error {worst:.2e} over 3 test functions",
                 ok, elapsed)
    assert report.passed
    assert elapsed < 60.0


def test_criterion_09_chart_vs_mollified():
    t0 = time.time()
    report = exp_restrict_extend(CFG)
    diff = _check(report, "chart-vs-mollified")
    rate = _check(report, "halving-rate")
    elapsed = time.time() - t0
    ok = report.passed and elapsed < 120.0
    _report_line(9, "chart vs mollified extension",
                 f"rel diff {diff.value:.4f} at eps 1e-3, halving ratio "
                 f"{rate.value:.2f}", ok, elapsed)
    assert diff.passed and rate.passed
    assert elapsed < 120.0


def test_criterion_10_knapp_regression():
    t0 = time.time()
    report = exp_sharpness_knapp(CFG)
    f1 = _fit(report, "knapp-pair-2-2")
    f2 = _fit(report, "knapp-pair-F")
    elapsed = time.time() - t0
    ok = f1.passed and f2.passed and elapsed < 300.0
    _report_line(10, "cap-family quotient slopes",
                 f"{f1.slope:.3f} (target -2.0+-0.1), "
                 f"{f2.slope:.3f} (target 0.667+-0.1)", ok, elapsed)
    assert f1.passed and f2.passed
    assert elapsed < 300.0


def test_criterion_11_glambda_regression():
    t0 = time.time()
    report = exp_sharpness_glambda(CFG)
    f1 = _fit(report, "glambda-pair-1-1/4")
    f2 = _fit(report, "glambda-pair-F")
    elapsed = time.time() - t0
    ok = f1.passed and f2.passed and elapsed < 300.0
    _report_line(11, "long-rectangle quotient slopes",
                 f"{f1.slope:.3f} (target -0.25+-0.1), "
                 f"{f2.slope:.3f} (target 0.0+-0.1)", ok, elapsed)
    assert f1.passed and f2.passed
    assert elapsed < 300.0


def test_criterion_12_stationary_and_cone():
    t0 = time.time()
    rep_s = exp_sharpness_stationary(CFG)
    rep_c = exp_sharpness_cone(CFG)
    s25 = _fit(rep_s, "stationary-shell-q-2.5")
    s40 = _fit(rep_s, "stationary-shell-q-4")
    c40 = _fit(rep_c, "cone-shell-q-4")
    c50 = _fit(rep_c, "cone-shell-q-5")
    elapsed = time.time() - t0
    ok = (s25.passed and s40.slope < -0.2 and abs(c40.slope) < 0.1
          and c50.passed and elapsed < 600.0)
    _report_line(12, "stationary/cone shell masses",
                 f"stationary q=2.5: {s25.slope:.3f} (0.5+-0.15), q=4: "
                 f"{s40.slope:.3f} (<0); cone q=4: {c40.slope:.3f} (0+-0.1), "
                 f"q=5: {c50.slope:.3f} (-0.5+-0.15)", ok, elapsed)
    assert s25.passed
    assert s40.slope < -0.2
    assert abs(c40.slope) < 0.1
    assert c50.passed
    assert elapsed < 600.0


def test_criterion_13_uniform_sweep():
    t0 = time.time()
    report = exp_sweep(CFG)
    leb = _check(report, "sweep-uniformity-lebesgue")
    lor = _check(report, "sweep-uniformity-lorentz")
    elapsed = time.time() - t0
    ok = leb.passed and lor.passed and elapsed < 900.0
    _report_line(13, "spectral-parameter uniformity",
                 f"ratio {leb.value:.2f} (< 5, Lebesgue at F), "
                 f"{lor.value:.2f} (< 8, restricted type at B); thresholds "
                 "are artifact knobs", ok, elapsed)
    assert leb.passed
    assert lor.passed
    assert elapsed < 900.0


def test_criterion_14_normest_sanity():
    t0 = time.time()
    report = exp_normest(CFG)
    elapsed = time.time() - t0
    worst = max(c.value for c in report.checks)
    ok = report.passed and elapsed < 30.0
    _report_line(14, "norm-estimator sanity",
                 f"worst error {worst:.2e} (identity, diagonal, rank-one)",
                 ok, elapsed)
    assert report.passed
    assert elapsed < 30.0


def test_criterion_15_region_classifier():
    t0 = time.time()
    report = exp_region(CFG)
    elapsed = time.time() - t0
    ok = report.passed and elapsed < 1.0
    _report_line(15, "exponent-region classifier",
                 "all 12 diagram points classified exactly", ok, elapsed)
    assert report.passed
    assert elapsed < 1.0
