"""Seeded randomized suites checking the structural claims numerically.

Every trial draws from its own generator seeded by ``(seed, trial)``, so
reports do not depend on the order or the number of worker processes.
"""
from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, PluriLagError
from .forms import (
    ANTIPODE,
    CubeFields,
    Legs,
    ThreePointForm,
    ZeroForm,
    action,
    corner_el_residual,
    corner_residuals,
    cube_action,
    el_residual,
    leg_margin,
)
from .lattice import (
    OCTAHEDRON_LABELS,
    box_corner_surface,
    flip,
    flip_sign,
    flippable_cubes,
    flower,
    lift_flower,
    planar_patch,
)
from .models import ExpModel, get_model, toda_residual
from .solve import (
    complete_cube,
    corner_jacobian,
    find_roots,
    numeric_rank,
    propagate_box,
    propagate_quad,
    solve_single,
)

MAX_RETRIES = 100
ADMISSIBLE_MARGIN = 0.05
SUITES = ("consistency", "octahedron", "closedness", "quad", "flip", "flower", "gamma")

DEFAULT_TOL = {
    "consistency": {"corner": 1e-9, "rank": 0},
    "octahedron": {"octahedron": 1e-9, "corner": 1e-9},
    "closedness": {"cube_action": 1e-8, "constancy": 1e-8, "corner": 1e-9},
    "quad": {"spread": 1e-10, "octahedron": 1e-9, "closure": 1e-8},
    "flip": {"action_change": 1e-8, "regrouping": 1e-12},
    "flower": {"decomposition": 1e-12, "toda": 1e-9},
    "gamma": {"corner_scaling": math.log(20.0), "octahedron_scaling": math.log(20.0), "gamma_zero": 0.0},
}

# target pairs for cube completion: two fields that are not opposite
TARGET_PAIRS = tuple(p for p in itertools.combinations(OCTAHEDRON_LABELS, 2) if ANTIPODE[p[0]] != p[1])


@dataclass
class SuiteReport:
    suite: str
    model: str
    params: dict
    trials: int
    seed: int
    max_residuals: dict
    failures: list
    resamples: int
    tolerances: dict
    runtime_ms: float = 0.0
    rows: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self, runtime: bool = True) -> dict:
        d = asdict(self)
        d.pop("rows")
        if not runtime:
            d.pop("runtime_ms")
        return d

    def to_json(self, runtime: bool = True, indent=2) -> str:
        return json.dumps(_jsonable(self.to_dict(runtime)), indent=indent, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


@dataclass(frozen=True)
class SuiteSpec:
    """Everything a worker needs to run one trial (picklable)."""

    suite: str
    model: str
    params: tuple = ()
    alpha: tuple | None = None
    tol: tuple = ()
    options: tuple = ()

    @property
    def tolerances(self) -> dict:
        return dict(self.tol)

    @property
    def opts(self) -> dict:
        return dict(self.options)


@dataclass
class TrialResult:
    values: dict
    failed: bool = False
    payload: dict = field(default_factory=dict)
    resamples: int = 0


class SamplingError(PluriLagError, RuntimeError):
    """No admissible sample within the retry budget."""


@lru_cache(maxsize=None)
def _model(name, params):
    return get_model(name, **dict(params))


def trial_rng(seed: int, trial: int, stream: int | None = None) -> np.random.Generator:
    spawn = () if stream is None else (stream,)
    return np.random.default_rng(np.random.SeedSequence([seed, trial], spawn_key=spawn))


def _retry(draw, rng):
    """Call ``draw(rng)`` until it returns a value; count the failed attempts."""
    for attempt in range(MAX_RETRIES + 1):
        try:
            out = draw(rng)
        except PluriLagError:
            out = None
        if out is not None:
            return out, attempt
    raise SamplingError(f"no admissible sample after {MAX_RETRIES} retries")


def _alpha(spec, model, rng):
    return tuple(spec.alpha) if spec.alpha is not None else model.sample_alpha(rng)


def _judge(values, tol):
    return any(not (abs(v) <= tol[k]) for k, v in values.items() if k in tol)


# -- Lagrangian cube sampling -----------------------------------------------------

class PerturbedLegs(Legs):
    """``Lam + eps (a - b) (y - x)^2``: keeps skew-symmetry, breaks closedness."""

    def __init__(self, base: Legs, eps: float):
        self.base = base
        self.eps = eps

    def L(self, x, y, a):
        return self.base.L(x, y, a)

    def psi(self, x, y, a):
        return self.base.psi(x, y, a)

    def Lam(self, x, y, a, b):
        return self.base.Lam(x, y, a, b) + self.eps * (a - b) * (y - x) ** 2

    def phi(self, x, y, a, b):
        return self.base.phi(x, y, a, b) - 2 * self.eps * (a - b) * (y - x)

    def psi_domain(self, a):
        return self.base.psi_domain(a)

    def phi_domain(self, a, b):
        return self.base.phi_domain(a, b)


def _form(model, alpha, perturb=0.0):
    form = model.form(alpha)
    if perturb:
        form = ThreePointForm(PerturbedLegs(form.legs, perturb), alpha)
    return form


def _solved_cube(model, form, alpha, rng, tol=math.inf):
    """Random admissible octahedron with two fields re-solved from corner equations."""
    cf = model.sample_octahedron(rng, alpha, ADMISSIBLE_MARGIN)
    if cf is None or leg_margin(cf, (1, 2, 3), form) < ADMISSIBLE_MARGIN:
        return None
    targets = TARGET_PAIRS[rng.integers(len(TARGET_PAIRS))]
    given = {k: v for k, v in cf.as_dict().items() if k not in targets}
    sol = complete_cube(form, given, targets, tol=tol, model=model.name)
    if leg_margin(sol.fields, (1, 2, 3), form) < ADMISSIBLE_MARGIN:
        return None
    if max(abs(v) for v in sol.fields.octahedron()) > 50:
        return None
    return sol


def _payload(trial, sol=None, **extra):
    out = {"trial": trial}
    if sol is not None:
        out["fields"] = sol.fields.as_dict()
        out["alpha"] = list(sol.alpha)
        out["targets"] = [t for _, t in sol.steps]
    out.update(extra)
    return out


# -- trial functions --------------------------------------------------------------------

def _trial_consistency(spec, seed, trial):
    rng = trial_rng(seed, trial)
    model = _model(spec.model, spec.params)

    def draw(r):
        alpha = _alpha(spec, model, r)
        form = model.form(alpha)
        sol = _solved_cube(model, form, alpha, r)
        return None if sol is None else (sol, form)

    (sol, form), retries = _retry(draw, rng)
    used = {eq for eq, _ in sol.steps}
    unused = max(abs(v) for k, v in sol.residuals.items() if k not in used)
    used_max = max(abs(sol.residuals[k]) for k in used)
    rank = numeric_rank(corner_jacobian(form, sol.fields))
    values = {"corner": max(unused, used_max), "rank": float(rank - 2)}
    tol = spec.tolerances
    failed = _judge(values, tol)
    return TrialResult(values, failed, _payload(trial, sol, rank=rank, residuals=sol.residuals) if failed else {},
                       retries)


def _trial_octahedron(spec, seed, trial):
    rng = trial_rng(seed, trial)
    model = _model(spec.model, spec.params)

    def draw(r):
        alpha = _alpha(spec, model, r)
        form = model.form(alpha)
        sol = _solved_cube(model, form, alpha, r)
        if sol is None:
            return None
        # one corner equation and the octahedron relation
        (t1, t2) = [t for _, t in sol.steps]
        eq = ANTIPODE[t2]
        given = {k: v for k, v in sol.fields.as_dict().items() if k not in (t1, t2)}
        v1, _ = solve_single(form, given, eq, t1)
        given[t1] = v1
        partial = CubeFields(**given)
        v2 = model.solve_octahedron(partial.with_values(**{t2: 0.0}), alpha, t2)
        cf = partial.with_values(**{t2: v2})
        if leg_margin(cf, (1, 2, 3), form) < ADMISSIBLE_MARGIN:
            return None
        return sol, form, cf, eq, alpha

    (sol, form, cf, eq, alpha), retries = _retry(draw, rng)
    oct_a = sol.fields.octahedron()
    rel = abs(model.octahedron_residual(*oct_a, alpha)) / model.octahedron_scale(*oct_a, alpha)
    res_b = corner_residuals(cf, (1, 2, 3), form)
    values = {"octahedron": rel, "corner": max(abs(v) for v in res_b.values())}
    failed = _judge(values, spec.tolerances)
    payload = _payload(trial, sol, second=cf.as_dict(), equation=eq, residuals=res_b) if failed else {}
    return TrialResult(values, failed, payload, retries)


def _trial_closedness(spec, seed, trial):
    model = _model(spec.model, spec.params)
    perturb = spec.opts.get("perturb", 0.0)
    rng = trial_rng(seed, trial)
    streams = [trial_rng(seed, trial, k) for k in (0, 1)]
    counter = [0]

    def draw(r):
        # some alpha admit few solutions; redraw alpha when a stream runs dry
        alpha = _alpha(spec, model, r)
        form = _form(model, alpha, perturb)
        found = []
        for g in streams:
            for _ in range(MAX_RETRIES // 4):
                try:
                    sol = _solved_cube(model, form, alpha, g)
                except PluriLagError:
                    sol = None
                if sol is not None:
                    break
                counter[0] += 1
            if sol is None:
                return None
            found.append(sol)
        return found, form

    (sols, form), retries = _retry(draw, rng)
    retries += counter[0]
    s = [cube_action(sol.fields, (1, 2, 3), form) for sol in sols]
    values = {
        "cube_action": max(abs(v) for v in s),
        "constancy": abs(s[0] - s[1]),
        "corner": max(sol.max_residual for sol in sols),
    }
    failed = _judge(values, spec.tolerances)
    payload = _payload(trial, sols[0], cube_actions=s) if failed else {}
    return TrialResult(values, failed, payload, retries)


QUAD_SEPARATION = 1e-2


def _quad_ok(model, cube):
    vals = [cube.x, cube.xi, cube.xj, cube.xk, cube.xij, cube.xjk, cube.xik, *cube.routes]
    if model.name == "q3d0" and not all(1e-3 < v < 1e3 for v in vals):
        return False
    if not all(abs(v) < 1e3 for v in vals):
        return False
    # nearly coincident cube fields make the propagation ill-conditioned
    seven = np.array(vals[:7] + [cube.xijk])
    gaps = np.abs(seven[:, None] - seven[None, :]) + np.eye(8)
    return gaps.min() >= QUAD_SEPARATION


def _trial_quad(spec, seed, trial):
    rng = trial_rng(seed, trial)
    model = _model(spec.model, spec.params)

    def draw(r):
        alpha = _alpha(spec, model, r)
        x, xi, xj, xk = model.sample_fields(r)
        cube = propagate_quad(model, x, xi, xj, xk, alpha)
        return (cube, alpha) if _quad_ok(model, cube) else None

    (cube, alpha), retries = _retry(draw, rng)
    oct6 = (cube.xi, cube.xj, cube.xk, cube.xij, cube.xjk, cube.xik)
    values = {
        "spread": cube.rel_spread,
        "octahedron": abs(model.octahedron_residual(*oct6, alpha)) / model.octahedron_scale(*oct6, alpha),
    }
    if model.has_lagrangian:
        values["closure"] = cube_action(cube.cube_fields(), (1, 2, 3), model.form(alpha))
    failed = _judge(values, spec.tolerances)
    payload = _payload(trial, alpha=list(alpha), fields=list(oct6), routes=list(cube.routes)) if failed else {}
    return TrialResult(values, failed, payload, retries)


def _box_solution(model, shape, alpha, rng):
    axes = {}
    for d in range(3):
        for t in range(shape[d] + 1):
            v = [0, 0, 0]
            v[d] = t
            axes[tuple(v)] = float(rng.uniform(-2.0, 2.0))
    f, spread = propagate_box(model, shape, axes, alpha)
    vals = np.array(list(f.values()))
    if np.max(np.abs(vals)) > 1e3:
        return None
    # keep every logarithmic leg away from coincident values
    for (p, q, r), v in f.items():
        for d in range(3):
            n = [p, q, r]
            n[d] += 1
            if tuple(n) in f and abs(f[tuple(n)] - v) < 1e-2:
                return None
        for a, b in ((0, 1), (1, 2), (0, 2)):
            na, nb = [p, q, r], [p, q, r]
            na[a] += 1
            nb[b] += 1
            if tuple(na) in f and tuple(nb) in f and abs(f[tuple(na)] - f[tuple(nb)]) < 1e-2:
                return None
    return f


def _trial_flip(spec, seed, trial):
    rng = trial_rng(seed, trial)
    model = _model(spec.model, spec.params)
    opts = spec.opts
    shape = tuple(opts.get("box", (3, 3, 3)))
    nflips = int(opts.get("flips", 10))
    which = opts.get("form", "model")

    def draw(r):
        alpha = _alpha(spec, model, r)
        f = _box_solution(model, shape, alpha, r)
        return None if f is None else (f, alpha)

    (f, alpha), retries = _retry(draw, rng)
    if which == "zero":
        form = ZeroForm(alpha)
    else:
        form = _form(model, alpha, opts.get("perturb", 0.0) if which == "perturbed" else 0.0)
    surface = box_corner_surface(shape)
    s_old = action(surface, f, form)
    changes, regroup, skipped = [], [], 0
    for _ in range(nflips):
        cubes = flippable_cubes(surface, shape)
        if not cubes:
            skipped += 1
            continue
        c = cubes[rng.integers(len(cubes))]
        s = flip_sign(surface, c)
        cf = CubeFields.from_map(c, f)
        s_cube = cube_action(cf, c.dirs, form)
        surface = flip(surface, c)
        s_new = action(surface, f, form)
        changes.append(s_new - s_old)
        regroup.append(s_new - s_old + s * s_cube)
        s_old = s_new
    values = {"regrouping": max((abs(v) for v in regroup), default=0.0)}
    if which == "model":
        values["action_change"] = max((abs(v) for v in changes), default=0.0)
    failed = _judge(values, spec.tolerances) or skipped > 0
    payload = _payload(trial, alpha=list(alpha), changes=changes, skipped=skipped) if failed else {}
    return TrialResult(values, failed, payload, retries)


_FLOWER_CENTER = (1, 1)


def _flower_fields(model, alpha, rng):
    pts = [(p, q, r) for p in range(3) for q in range(3) for r in range(2)]
    if isinstance(model, ExpModel):
        # slopes proportional to log(alpha) keep diagonal differences outside the gap of phi
        slope = rng.uniform(1.3, 2.5) * np.log(alpha)
        return {v: float(-np.dot(slope, v) + rng.uniform(-0.05, 0.05)) for v in pts}
    vals = rng.uniform(-2.0, 2.0, len(pts))
    gaps = np.abs(vals[:, None] - vals[None, :]) + np.eye(len(pts))
    if gaps.min() < 1e-2:
        return None
    return dict(zip(pts, (float(v) for v in vals)))


def _trial_flower(spec, seed, trial):
    rng = trial_rng(seed, trial)
    model = _model(spec.model, spec.params)
    zero = spec.opts.get("form") == "zero"
    patch = planar_patch((2, 2))
    center = _FLOWER_CENTER

    def draw(r):
        alpha = _alpha(spec, model, r)
        f3 = _flower_fields(model, alpha, r)
        if f3 is None:
            return None
        form = ZeroForm(alpha) if zero else model.form(alpha)
        f2 = {v[:2]: x for v, x in f3.items() if v[2] == 0}
        el = el_residual(patch, f2, form, center)
        corners = lift_flower(flower(patch, center), center, 3)
        parts = [corner_el_residual(c, f3, form) for c in corners]
        toda = None
        if isinstance(model, ExpModel) and not zero:
            toda = _toda_check(patch, f2, form, alpha)
            if toda is None:
                return None
        return el, parts, toda, alpha, form

    (el, parts, toda, alpha, form), retries = _retry(draw, rng)
    scale = max(1.0, abs(el), *(abs(p) for p in parts))
    values = {"decomposition": abs(el - sum(parts)) / scale}
    if toda is not None:
        values["toda"] = toda
    failed = _judge(values, spec.tolerances)
    payload = _payload(trial, alpha=list(alpha), el=el, corners=parts) if failed else {}
    return TrialResult(values, failed, payload, retries)


def _toda_check(patch, f2, form, alpha):
    """Solve the planar EL equation for the center field, then evaluate Toda."""
    c = _FLOWER_CENTER
    petals = flower(patch, c)

    def el(t):
        g = dict(f2)
        g[c] = t
        return el_residual(patch, g, form, c, petals)

    roots = find_roots(el, [(-np.inf, np.inf)], f2[c])
    if not roots:
        return None
    g = dict(f2)
    g[c] = min(roots, key=lambda r: abs(r - f2[c]))
    try:
        return toda_residual(
            g[c], right=g[(2, 1)], left=g[(0, 1)], up=g[(1, 2)], down=g[(1, 0)],
            right_down=g[(2, 0)], left_up=g[(0, 2)], alpha_up=alpha[1], beta_right=alpha[0],
        )
    except DomainError:
        return None


def _trial_gamma(spec, seed, trial):
    rng = trial_rng(seed, trial)
    gammas = tuple(spec.opts.get("gammas", (1e-2, 1e-3, 1e-4)))
    base = ExpModel(0.0)
    deformed = [ExpModel(g) for g in gammas]

    def draw(r):
        alpha = _alpha(spec, base, r)
        cf = base.sample_octahedron(r, alpha, ADMISSIBLE_MARGIN)
        if leg_margin(cf, (1, 2, 3), base.form(alpha)) < ADMISSIBLE_MARGIN:
            return None
        c0 = base.corner_residuals_closed(cf, alpha)
        o0 = base.octahedron_value(cf, alpha)
        dc, do = [], []
        for m in deformed:
            c = m.corner_residuals_closed(cf, alpha)
            dc.append(max(abs(c[k] - c0[k]) for k in c0))
            do.append(abs(m.octahedron_value(cf, alpha) - o0))
        z = ExpModel(0.0)
        zero = max(abs(z.corner_residuals_closed(cf, alpha)[k] - c0[k]) for k in c0)
        zero = max(zero, abs(z.octahedron_value(cf, alpha) - o0))
        return cf, alpha, dc, do, zero

    (cf, alpha, dc, do, zero), retries = _retry(draw, rng)

    def scaling(d):
        worst = 0.0
        for (g1, d1), (g2, d2) in zip(zip(gammas, d), zip(gammas[1:], d[1:])):
            if d1 == 0 or d2 == 0:
                return math.inf
            worst = max(worst, abs(math.log((d1 / d2) / (g1 / g2))))
        return worst

    values = {"corner_scaling": scaling(dc), "octahedron_scaling": scaling(do), "gamma_zero": zero}
    failed = _judge(values, spec.tolerances)
    payload = _payload(trial, fields=cf.as_dict(), alpha=list(alpha), corner=dc, octahedron=do) if failed else {}
    return TrialResult(values, failed, payload, retries)


_TRIALS = {
    "consistency": _trial_consistency,
    "octahedron": _trial_octahedron,
    "closedness": _trial_closedness,
    "quad": _trial_quad,
    "flip": _trial_flip,
    "flower": _trial_flower,
    "gamma": _trial_gamma,
}


def _run_one(args):
    spec, seed, trial = args
    try:
        return _TRIALS[spec.suite](spec, seed, trial)
    except SamplingError as exc:
        return TrialResult({}, True, {"trial": trial, "reason": str(exc)}, MAX_RETRIES)


def run_trials(spec: SuiteSpec, trials: int, seed: int, jobs: int = 1) -> list:
    work = [(spec, seed, t) for t in range(trials)]
    if jobs <= 1 or trials < 2:
        return [_run_one(w) for w in work]
    chunk = max(1, trials // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, work, chunksize=chunk))


# -- public suites -----------------------------------------------------------------------

def run_suite(suite: str, model: str = "q1d0", trials: int = 100, seed: int = 0, alpha=None,
              params: dict | None = None, tol: dict | None = None, jobs: int = 1, **options) -> SuiteReport:
    """Run one suite and aggregate its trials into a report."""
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if trials < 1:
        raise DomainError("trials must be at least 1")
    params = {k: v for k, v in (params or {}).items() if v is not None}
    if suite == "gamma":
        model = "exp-gamma"
    m = get_model(model, **params)
    if suite in ("consistency", "octahedron", "closedness", "flower") and not m.has_lagrangian:
        raise DomainError(f"model {model} has no Lagrangian layer; suite {suite} needs one")
    if suite == "quad" and not m.has_quad:
        raise DomainError(f"model {model} has no quad-equation layer")
    if suite == "flip" and not (m.has_quad and m.has_lagrangian):
        raise DomainError(f"suite flip needs a model with quad and Lagrangian layers (q1d0), not {model}")
    if alpha is not None:
        alpha = tuple(float(a) for a in alpha)
        if len(alpha) != 3:
            raise DomainError("alpha needs three values")
    tolerances = dict(DEFAULT_TOL[suite])
    tolerances.update(tol or {})
    if suite == "quad" and not m.has_lagrangian:
        tolerances.pop("closure", None)
    if suite == "flip" and options.get("form", "model") != "model":
        tolerances.pop("action_change", None)
    if suite == "flower" and (not isinstance(m, ExpModel) or options.get("form") == "zero"):
        tolerances.pop("toda", None)
    spec = SuiteSpec(suite, model, tuple(sorted(params.items())), alpha,
                     tuple(sorted(tolerances.items())), tuple(sorted(_hashable(options).items())))
    start = time.perf_counter()
    results = run_trials(spec, trials, seed, jobs)
    runtime = (time.perf_counter() - start) * 1e3
    maxima = {}
    for r in results:
        for k, v in r.values.items():
            maxima[k] = max(maxima.get(k, 0.0), abs(v))
    report_params = dict(m.params)
    if alpha is not None:
        report_params["alpha"] = list(alpha)
    report_params.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in options.items()})
    return SuiteReport(
        suite=suite,
        model=m.name if suite != "gamma" else "exp-gamma",
        params=report_params,
        trials=trials,
        seed=seed,
        max_residuals=maxima,
        failures=[r.payload for r in results if r.failed],
        resamples=sum(r.resamples for r in results),
        tolerances=tolerances,
        runtime_ms=runtime,
        rows=[{"trial": t, **r.values, "failed": r.failed} for t, r in enumerate(results)],
    )


def _hashable(options):
    out = {}
    for k, v in options.items():
        out[k] = tuple(v) if isinstance(v, list) else v
    return out


def suite_consistency(model="q1d0", trials=1000, seed=0, **kw) -> SuiteReport:
    return run_suite("consistency", model, trials, seed, **kw)


def suite_octahedron_equivalence(model="q1d0", trials=1000, seed=0, **kw) -> SuiteReport:
    return run_suite("octahedron", model, trials, seed, **kw)


def suite_closedness(model="q1d0", trials=500, seed=0, perturb=0.0, **kw) -> SuiteReport:
    if perturb:
        kw["perturb"] = perturb
    return run_suite("closedness", model, trials, seed, **kw)


def suite_quad_layer(model="q1d0", trials=1000, seed=0, **kw) -> SuiteReport:
    return run_suite("quad", model, trials, seed, **kw)


def suite_flip_invariance(model="q1d0", box=(3, 3, 3), flips=10, seed=0, trials=1, form="model",
                          perturb=1e-3, **kw) -> SuiteReport:
    opts = {"box": tuple(box), "flips": flips, "form": form}
    if form == "perturbed":
        opts["perturb"] = perturb
    return run_suite("flip", model, trials, seed, **opts, **kw)


def suite_flower(model="q1d0", trials=1000, seed=0, form="model", **kw) -> SuiteReport:
    if form != "model":
        kw["form"] = form
    return run_suite("flower", model, trials, seed, **kw)


def suite_gamma_limit(trials=100, seed=0, gammas=(1e-2, 1e-3, 1e-4), **kw) -> SuiteReport:
    return run_suite("gamma", "exp-gamma", trials, seed, gammas=tuple(gammas), **kw)
