import math

import pytest

from wavelet_cn import calculus, verify
from wavelet_cn.calculus import CoeffTable, _ancestor_sums
from wavelet_cn.reps import enumerate_reps


def test_default_seed_passes():
    ctx = verify.Context()
    results = verify.run(5, ctx)
    assert [r.name for r in results] == list(verify.SUITES)
    assert all(r.ok for r in results), [r.counterexample for r in results if not r.ok]


def test_zero_trials_warns():
    ctx = verify.Context()
    text = verify.report(verify.run(0, ctx), ctx)
    assert "warning: no trials were run" in text
    assert "0 failing suites" in text


def test_suite_streams_are_independent():
    ctx = verify.Context(seed=3)
    alone = verify.run(4, ctx, ["lemlem2"])
    together = verify.run(4, ctx, ["lemlem1", "lemlem2"])
    assert verify.report(alone, ctx).splitlines()[1] == verify.report(together, ctx).splitlines()[2]


def test_report_identical_across_threads():
    a = verify.report(verify.run(3, verify.Context(threads=1)), verify.Context())
    b = verify.report(verify.run(3, verify.Context(threads=8)), verify.Context())
    assert a == b


def _lower_with_sign_error(t, depth=None):
    n = t.level
    params = t.params
    depth = t.depth + 1 if depth is None else depth
    sums = _ancestor_sums(t, n, max(depth - 1, 0))
    entries = {}
    for r in enumerate_reps(params.p, depth):
        for j in range(n):
            if r.is_zero:
                entries[(r, j)] = t.get(r, j)
            else:
                entries[(r, j)] = (t.get(r, j) - sums[r.predecessor()] * math.comb(n, j)) * r.gamma(params)
    return CoeffTable(params, n - 1, depth, entries)


def test_mutation_in_lower_basis_is_caught(monkeypatch):
    monkeypatch.setattr(calculus, "lower_basis", _lower_with_sign_error)
    ctx = verify.Context()
    (res,) = verify.run(30, ctx, ["basis_change"])
    assert not res.ok
    assert res.counterexample.startswith("trial ")
    assert "lower_basis disagrees" in res.counterexample


def test_unknown_suite():
    with pytest.raises(KeyError):
        verify.run(1, verify.Context(), ["nope"])
