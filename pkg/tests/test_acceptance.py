"""Acceptance suite: every top-level criterion at its stated scale and tolerance.

Each test runs one named experiment through the public runner and prints one
pass/fail line (visible with ``pytest tests/test_acceptance.py -v -s``). The
experiments carry the quantitative tolerances; this module enforces them and
the stated runtime budgets.
"""

import time

import numpy as np
import pytest
from scipy.integrate import quad

from skorokhod_kit.experiments import default_config, run_experiment


def run_criterion(number, title, experiment, tmp_path, budget_s=None, **overrides):
    config = default_config(experiment, out_dir=str(tmp_path / experiment), **overrides)
    t0 = time.perf_counter()
    result = run_experiment(config)
    elapsed = time.perf_counter() - t0
    ok = result.exit_code == 0 and (budget_s is None or elapsed <= budget_s)
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {number}] {title}: {status} ({elapsed:.1f} s)")
    for check in result.checks:
        mark = "ok" if check.passed else "FAILED"
        print(f"    {mark:6s} {check.name}: {check.detail}")
    assert result.exit_code == 0, [c.name for c in result.checks if not c.passed]
    if budget_s is not None:
        assert elapsed <= budget_s, f"runtime {elapsed:.1f}s over budget {budget_s}s"
    return result


def test_criterion_1_skorokhod_1d_properties(tmp_path):
    result = run_criterion(
        1,
        "1d reflection map: decomposition, monotone pushing, complementarity",
        "skorokhod-1d-props",
        tmp_path,
        budget_s=10.0,
    )
    agg = result.summary["aggregates"]
    assert agg["max_decomposition"] <= 1e-12
    assert agg["min_h_increment"] >= 0.0
    assert agg["total_complementarity_mass"] == 0.0


def test_criterion_2_rbm_terminal_law(tmp_path):
    result = run_criterion(
        2,
        "reflected terminal law: half-normal KS and two-sample KS",
        "rbm-density",
        tmp_path,
        budget_s=60.0,
    )
    assert result.summary["ks_half_normal"]["passed"] is True
    assert result.summary["ks_two_sample"]["passed"] is True


def test_criterion_3_isometry(tmp_path):
    result = run_criterion(
        3,
        "integral isometry for f = B_t at 1e5 paths",
        "ito-isometry",
        tmp_path,
        budget_s=300.0,
    )
    lhs, rhs = result.summary["lhs"], result.summary["rhs"]
    assert abs(lhs["mean"] - 0.5) <= 3.0 * lhs["std_error"]
    assert abs(rhs["mean"] - 0.5) <= 3.0 * rhs["std_error"]
    assert abs(lhs["mean"] - rhs["mean"]) <= 4.0 * result.summary["joint_se"]


def test_criterion_4_change_of_variables_residual(tmp_path):
    result = run_criterion(
        4,
        "cubic change-of-variables residual: size and order",
        "ito-formula",
        tmp_path,
    )
    assert result.summary["rms_coarse"] <= 0.05
    assert 1.5 <= result.summary["ratio"] <= 3.0


def test_criterion_5_local_time(tmp_path):
    # reproduce the pinned target with an independent quadrature oracle first
    oracle, err = quad(lambda s: 0.5 / np.sqrt(2.0 * np.pi * s), 0.0, 1.0)
    target = 1.0 / np.sqrt(2.0 * np.pi)
    assert err < 1e-9
    assert oracle == pytest.approx(target, rel=1e-9)
    result = run_criterion(
        5,
        "local time: occupation and Tanaka estimators",
        "local-time",
        tmp_path,
    )
    for key in ("occupation", "tanaka"):
        est = result.summary[key]
        assert abs(est["mean"] - target) <= 3.0 * est["std_error"]
    assert result.summary["fine_cross_rms"] <= 0.05


def test_criterion_6_nd_skorokhod(tmp_path):
    result = run_criterion(
        6,
        "multi-d reflection: containment, complementarity, inequality slacks, refinement",
        "nd-skorokhod-props",
        tmp_path,
        budget_s=120.0,
    )
    for name in ("unit_disc", "orthant"):
        worst = result.summary[name]
        assert worst["containment_slack"] >= -1e-9
        assert worst["interior_mass"] == 0.0
        assert worst["tanaka_gap"] >= -1e-9
        assert worst["modulus_gap"] >= -1e-9


def test_criterion_7_reflected_sde(tmp_path):
    result = run_criterion(
        7,
        "reflected SDE: pushdown, half-normal law, coefficient contracts",
        "rsde-consistency",
        tmp_path,
    )
    assert result.summary["pushdown"]["max_phi_gap"] <= 1e-12
    assert result.summary["ks_half_normal"]["passed"] is True
    assert result.summary["contract_accept"]["name"] == "unit-diffusion"
    assert result.summary["contract_accept"]["passed"] is True
    assert result.summary["contract_reject"]["passed"] is False


def test_criterion_8_domain_conditions(tmp_path):
    result = run_criterion(
        8,
        "geometric solvability conditions on orthant, strip, disc",
        "condition-checks",
        tmp_path,
    )
    a = result.summary["condition_a"]
    assert a["orthant2"]["status"] == "holds"
    assert abs(a["orthant2"]["c"] - 1.0 / np.sqrt(2.0)) <= 1e-6
    assert a["strip"]["status"] == "fails"
    assert result.summary["condition_b"]["unit_disc"]["status"] == "holds"


SMALL_SCALE = {
    "skorokhod-1d-props": {"n_paths": 40, "n_steps": 100},
    "rbm-density": {"n_paths": 100, "n_steps": 100, "emit_paths": True},
    "ito-isometry": {"n_paths": 400, "n_steps": 50},
    "ito-formula": {"n_paths": 5, "n_steps": 100},
    "local-time": {
        "n_paths": 60,
        "n_steps": 200,
        "options": {"fine_steps": 400, "fine_paths": 20},
    },
    "nd-skorokhod-props": {
        "n_paths": 8,
        "n_steps": 64,
        "options": {"refine_drivers": 2, "refine_n0": 32},
    },
    "rsde-consistency": {
        "n_paths": 100,
        "n_steps": 100,
        "options": {"route_steps": 50},
    },
    "condition-checks": {},
    "strong-error": {"n_paths": 8, "options": {"dt_levels": (1 / 8, 1 / 16, 1 / 32)}},
}


def test_criterion_9_determinism(tmp_path):
    # every experiment, rerun with an identical config, writes byte-identical
    # summaries (and path CSVs); reduced sizes keep this quick without
    # touching the determinism machinery being tested
    t0 = time.perf_counter()
    for name, overrides in SMALL_SCALE.items():
        first = run_experiment(
            default_config(name, out_dir=str(tmp_path / "a" / name), **overrides)
        )
        second = run_experiment(
            default_config(name, out_dir=str(tmp_path / "b" / name), **overrides)
        )
        assert first.artifacts.summary.read_bytes() == second.artifacts.summary.read_bytes(), name
        for f1, f2 in zip(first.artifacts.csv_files, second.artifacts.csv_files):
            assert f1.read_bytes() == f2.read_bytes(), name
    elapsed = time.perf_counter() - t0
    print(f"[criterion 9] determinism: byte-identical reruns for all 9 experiments: PASS ({elapsed:.1f} s)")
