"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

import time

import pytest

from plurilag.verify import (
    SUITES,
    run_suite,
    suite_closedness,
    suite_consistency,
    suite_flip_invariance,
    suite_flower,
    suite_gamma_limit,
    suite_octahedron_equivalence,
    suite_quad_layer,
)

LAGRANGIAN = [("q1d0", {}), ("exp", {}), ("exp-gamma", {"gamma": 0.1})]
QUAD = ["q1d0", "q1d1", "q3d0", "h1", "h2", "h3"]


def report(n, name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} criterion {n} ({name}): {detail}")
    assert ok, detail


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def worst(reports, key):
    return max(r.max_residuals[key] for r in reports)


def test_1_consistency():
    reports, dt = timed(lambda: [suite_consistency(m, trials=1000, seed=42, params=p) for m, p in LAGRANGIAN])
    ok = all(r.passed for r in reports) and worst(reports, "corner") < 1e-9 and worst(reports, "rank") == 0 and dt < 10
    report(1, "consistency", ok, f"max corner {worst(reports, 'corner'):.2e}, rank deviations "
                                 f"{worst(reports, 'rank'):g}, {dt:.1f} s")


def test_2_octahedron_equivalence():
    reports, dt = timed(lambda: [suite_octahedron_equivalence(m, trials=1000, seed=42, params=p) for m, p in LAGRANGIAN])
    ok = all(r.passed for r in reports) and worst(reports, "octahedron") < 1e-9 and worst(reports, "corner") < 1e-9
    ok = ok and dt < 10
    report(2, "octahedron", ok, f"max octahedron {worst(reports, 'octahedron'):.2e}, "
                                f"max corner {worst(reports, 'corner'):.2e}, {dt:.1f} s")


def test_3_closedness():
    def run():
        good = [suite_closedness(m, trials=500, seed=7) for m in ("q1d0", "exp")]
        control = suite_closedness("q1d0", trials=500, seed=7, perturb=1e-3)
        return good, control

    (good, control), dt = timed(run)
    ok = all(r.passed for r in good) and worst(good, "cube_action") < 1e-8 and worst(good, "constancy") < 1e-8
    ok = ok and not control.passed and dt < 30
    report(3, "closedness", ok, f"max |S| {worst(good, 'cube_action'):.2e}, constancy {worst(good, 'constancy'):.2e}, "
                                f"control constancy {control.max_residuals['constancy']:.2e} (fails), {dt:.1f} s")


def test_4_quad_layer():
    reports, dt = timed(lambda: [suite_quad_layer(m, trials=1000, seed=42) for m in QUAD])
    ok = all(r.passed for r in reports) and worst(reports, "spread") < 1e-10 and worst(reports, "octahedron") < 1e-9
    closure = reports[0].max_residuals["closure"]
    ok = ok and closure < 1e-8 and dt < 10
    report(4, "quad layer", ok, f"max spread {worst(reports, 'spread'):.2e}, octahedron "
                                f"{worst(reports, 'octahedron'):.2e}, q1d0 closure {closure:.2e}, {dt:.1f} s")


def test_5_flip_invariance():
    def run():
        return (suite_flip_invariance(seed=42, box=(3, 3, 3), flips=10),
                suite_flip_invariance(seed=42, box=(3, 3, 3), flips=10, form="perturbed"))

    (model, perturbed), dt = timed(run)
    change = model.max_residuals["action_change"]
    regroup = max(model.max_residuals["regrouping"], perturbed.max_residuals["regrouping"])
    ok = model.passed and perturbed.passed and change < 1e-8 and regroup < 1e-12 and dt < 5
    report(5, "flip invariance", ok, f"max |dS| {change:.2e}, max regrouping {regroup:.2e}, {dt:.1f} s")


def test_6_flower():
    reports, dt = timed(lambda: [suite_flower(m, trials=1000, seed=42) for m in ("q1d0", "exp")])
    toda = reports[1].max_residuals["toda"]
    ok = all(r.passed for r in reports) and worst(reports, "decomposition") < 1e-12 and toda < 1e-9 and dt < 5
    report(6, "flower", ok, f"max decomposition {worst(reports, 'decomposition'):.2e}, Toda {toda:.2e}, {dt:.1f} s")


def test_7_gamma_limit():
    r, dt = timed(lambda: suite_gamma_limit(trials=100, seed=42))
    ok = r.passed and r.max_residuals["gamma_zero"] == 0.0 and dt < 5
    report(7, "gamma limit", ok, f"corner log-ratio dev {r.max_residuals['corner_scaling']:.2e}, octahedron "
                                 f"{r.max_residuals['octahedron_scaling']:.2e}, gamma=0 diff "
                                 f"{r.max_residuals['gamma_zero']:g}, {dt:.1f} s")


DETERMINISM_RUNS = [
    ("consistency", "exp", 40), ("octahedron", "q1d0", 40), ("closedness", "exp", 20), ("quad", "q3d0", 40),
    ("flip", "q1d0", 1), ("flower", "exp", 20), ("gamma", "exp-gamma", 20),
]


def test_8_determinism():
    assert {s for s, _, _ in DETERMINISM_RUNS} == set(SUITES)
    bad = []
    for suite, model, trials in DETERMINISM_RUNS:
        first = run_suite(suite, model, trials=trials, seed=123).to_json(runtime=False)
        again = run_suite(suite, model, trials=trials, seed=123).to_json(runtime=False)
        pooled = run_suite(suite, model, trials=trials, seed=123, jobs=2).to_json(runtime=False)
        if not first == again == pooled:
            bad.append(suite)
    report(8, "determinism", not bad, f"{len(SUITES)} suites identical across reruns and jobs=2"
           if not bad else f"reports differ for {', '.join(bad)}")


@pytest.fixture(autouse=True)
def _show_line(capsys):
    # surface the PASS/FAIL line even when pytest captures output
    yield
    out = capsys.readouterr().out
    with capsys.disabled():
        print("\n" + out.strip())
