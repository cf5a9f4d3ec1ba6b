import json
import math
import os
import subprocess
from fractions import Fraction
from itertools import product
from pathlib import Path

import pytest

import hpboost

CONFIGS = Path(os.environ.get("HPBOOST_TEST_CONFIG_DIR", Path(__file__).parent.parent / "configs"))


def ref_belady(cache, requests):
    cache = list(cache)
    faults = 0
    for i, page in enumerate(requests):
        if page in cache:
            continue
        faults += 1
        rest = requests[i + 1 :]
        far = max(cache, key=lambda c: rest.index(c) if c in rest else len(rest) + 1)
        cache[cache.index(far)] = page
    return faults


def test_version():
    assert hpboost.__version__


def test_worked_example_params():
    p = hpboost.derive_params("1", "2", "1", "2")
    assert p["C"] == 6 and p["D"] == 144
    assert Fraction(p["p"]) == Fraction(1, 8)
    assert Fraction(p["mu"]) == Fraction(144, 7)


def test_bad_params_raise():
    with pytest.raises(ValueError):
        hpboost.derive_params("0", "2", "1", "2")


def test_belady_matches_python_reference():
    for seed in range(30):
        reqs = hpboost.paging_stream("uniform", 3, 25, seed)
        assert hpboost.belady_opt([1, 2, 3], reqs) == ref_belady([1, 2, 3], reqs)


def test_marking_and_boosted_costs():
    reqs = hpboost.paging_stream("nasty", 2, 200, 5)
    opt = ref_belady([1, 2], reqs)
    cost, answers = hpboost.run_marking(2, reqs, 9)
    assert len(answers) == len(reqs)
    assert opt <= cost <= 2 * (opt + 1)
    run = hpboost.run_boosted_marking(2, reqs, 9)
    assert run["opt"] == opt
    assert run["cost"] >= opt
    assert len(json.loads(run["ledger"])["phases"]) == run["phases"]


def test_seed_derivation():
    def mix(z):
        m = (1 << 64) - 1
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & m
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & m
        return z ^ (z >> 31)

    g = 0x9E3779B97F4A7C15
    for i in range(4):
        assert hpboost.trial_seed(11, i) == mix((11 + (i + 1) * g) & ((1 << 64) - 1))


def test_wilson():
    z, s, n = 3.0, 7, 50
    ph = s / n
    den = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / den
    half = z / den * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n))
    lo, hi = hpboost.wilson_interval(s, n)
    assert lo == pytest.approx(centre - half, abs=1e-12)
    assert hi == pytest.approx(centre + half, abs=1e-12)


def test_counterexamples_exact():
    assert Fraction(hpboost.bitguess_success_probability(5)) == 1 - Fraction(1, 32)
    assert Fraction(hpboost.lastguess_expected_cost(4, 3)) == 4 * (1 + Fraction(2, 3))
    # Doubling from (0,0) on 0,1,1: average over every answer tape.
    x = [0, 1, 1]
    want = Fraction(0)
    for ys in product([0, 1], repeat=len(x)):
        state, cost = 0, 0
        for t, r in enumerate(x):
            cost += (1 if state == r else 3) * 2**t
            state = ys[t]
        want += Fraction(cost, 2 ** len(x))
    atoms = hpboost.counterexample_distribution("doubling", 3, 0, x)
    assert sum(c * Fraction(p) for c, p in atoms) == want


def test_jss_and_diagonals():
    assert hpboost.diagonal_count(3, 4) == 3 * 16
    inst = json.dumps({"n": 2, "m": 4, "permutations": [[1, 2, 3, 4], [1, 2, 3, 4]]})
    assert hpboost.jss_exact_opt(inst) == 5


def test_oracle_suites_pass():
    for name in ("belady", "workfunction"):
        result = hpboost.oracle_suite(name, seed=3)
        assert all(c["mismatches"] == 0 for c in result["checks"])


def test_cli_in_process_and_binary(tmp_path):
    code, out, _ = hpboost.cli(["params", "--config", str(CONFIGS / "params.yaml")])
    assert code == 0 and "D=144" in out
    code, _, err = hpboost.cli(["params", "--config", str(CONFIGS / "params_missing_epsilon.yaml")])
    assert code == 2
    assert json.loads(err)["error"]["path"] == "params.epsilon"
    exe = os.environ.get("HPBOOST_CLI")
    if exe:
        proc = subprocess.run(
            [exe, "run", "--config", str(CONFIGS / "run_paging.yaml"), "--out", str(tmp_path)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["schema_version"] == 1
