"""One test per acceptance criterion; each prints a PASS/FAIL line with the measured values."""

import subprocess
import sys

import pytest

from invlab.verification import CRITERIA, run_criterion

TITLES = {
    1: "kernel_closed_forms",
    2: "kernel_recursion",
    3: "sine_integral_limits",
    4: "decomposition_identity",
    5: "constant_recovery",
    6: "tail_bound",
    7: "uniform_fourier_inversion",
    8: "fourier_laplace_bridge",
    9: "weierstrass_showcase",
    10: "cesaro_means",
    11: "scalar_identity",
    12: "semigroup_inversion",
    13: "determinism",
}


def _check(number):
    res = run_criterion(number, seed=0)
    print(res.line())
    assert res.passed, res.line()


def test_criterion_01_kernel_closed_forms():
    _check(1)


def test_criterion_02_kernel_recursion():
    _check(2)


def test_criterion_03_sine_integral_limits():
    _check(3)


def test_criterion_04_decomposition_identity():
    _check(4)


def test_criterion_05_constant_recovery():
    _check(5)


def test_criterion_06_tail_bound():
    _check(6)


def test_criterion_07_uniform_fourier_inversion():
    _check(7)


def test_criterion_08_fourier_laplace_bridge():
    _check(8)


def test_criterion_09_weierstrass_showcase():
    _check(9)


def test_criterion_10_cesaro_means():
    _check(10)


def test_criterion_11_scalar_identity():
    _check(11)


def test_criterion_12_semigroup_inversion():
    _check(12)


def test_criterion_13_determinism(tmp_path):
    _check(13)
    # the same check through the command line: two verify runs, byte-identical reports
    outs = []
    for k in range(2):
        path = tmp_path / f"verify{k}.json"
        cmd = [sys.executable, "-m", "invlab", "verify", "--only", "3,5,13", "--seed", "3", "--out", str(path)]
        subprocess.run(cmd, check=True, capture_output=True)
        outs.append(path.read_bytes())
    line = f"[{'PASS' if outs[0] == outs[1] else 'FAIL'}] criterion 13 via CLI: identical={outs[0] == outs[1]}"
    print(line)
    assert outs[0] == outs[1]


def test_every_criterion_has_a_test():
    assert sorted(CRITERIA) == sorted(TITLES)
