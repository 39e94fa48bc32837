import numpy as np
import pytest

from specmeas.suites import SUITES, run_suite

CONFIGS = [
    ("cbe", dict(n=4, beta=2.0)),
    ("cbe", dict(n=3, beta=1.0)),
    ("uniform-moments-circle", dict(n=4)),
    ("cross-validation", dict(n=3, samples=3000)),
    ("sun", dict(n=3)),
    ("so2n", dict(n=3)),
    ("jacobi", dict(n=3, beta=1.0)),
    ("jacobi", dict(n=3, beta=4.0)),
    ("bizth", dict(case=1, n=2)),
    ("bizth", dict(case=2, n=3)),
    ("bizth", dict(case=3, n=2)),
    ("bizth", dict(case=4, n=3)),
    ("unif2", dict(n=3, samples=2000)),
    ("eta", dict()),
]


def _run(name, kw, negative, seed):
    kw = {"samples": 4000} | kw
    return run_suite(name, np.random.default_rng(seed), negative=negative, **kw)


@pytest.mark.parametrize("name,kw", CONFIGS, ids=[f"{n}-{i}" for i, (n, _) in enumerate(CONFIGS)])
def test_suite_passes_and_negative_control_fails(name, kw):
    good = _run(name, kw, False, 31)
    assert good and all(r.passed for r in good), [r.line() for r in good if not r.passed]
    assert all(0 <= r.p_value <= 1 for r in good)
    bad = _run(name, kw, True, 31)
    assert not all(r.passed for r in bad)


def test_family_alpha_is_bonferroni_split():
    reports = _run("cbe", dict(n=4), False, 32)
    marginal = [r for r in reports if "spearman" not in r.name]
    assert all(r.alpha == pytest.approx(1e-3 / len(marginal)) for r in marginal)


def test_every_suite_is_registered():
    assert set(SUITES) == {n for n, _ in CONFIGS}
    with pytest.raises(KeyError):
        run_suite("nope", np.random.default_rng(0))
