"""Command-line interface: every subcommand emits one JSON report.

Report shape (schema ``defquant-report/1``)::

    {
      "schema": "...", "version": "...",
      "command": "weight mc",
      "parameters": {...},           # parsed flags, JSON-safe
      "seed": 7,                     # or null
      "checks": [{"name", "value", "target", "tolerance", "pass"}, ...],
      "pass": true,
      "results": {...}               # command-specific payload
    }

Reports for identical (command, seed, version) are byte-identical: keys
are sorted and wall-clock time is only included when ``--timing`` is
given.  ``--table`` switches to a human-readable layout.  Exit codes:
0 all checks pass, 1 at least one check failed, 2 usage error.

The Monte Carlo subcommands accept ``--workers`` and split the sample
budget over a process pool with per-chunk seeds; the pooled estimate is
produced by inverse-variance combination, so the result is deterministic
for a fixed (seed, samples, workers) triple.
"""

from __future__ import annotations

import argparse
import json
import math
import multiprocessing
import random
import sys
import time
from fractions import Fraction

from . import __version__
from .exactnum import QC
from .exactpoly import Poly
from .graphs import (AdmissibleGraph, enumerate_graphs, fan_graph,
                     cycle_graph, wheel_graph, graph1_left, graph1_right,
                     graph2)
from .weight_mc import (weight_mc, WeightSource, two_valent_integral,
                        two_valent_out_out_exact, weight_poly_fit,
                        funimp_residuals, exact_zero_reason)
from .cache import WeightCache, default_path
from .series import (merkulov_wheel_zeta, shadow_sum, two_wheel_display,
                     harmonic_identity)
from .star import (PolyVectorField, star_order2, so3_bivector,
                   associativity_residual, associativity_sigma)
from .fedosov import (flat_input, solve_connection, catalan_trees,
                      catalan_expansion, catalan_number, fedosov_star,
                      moyal_star_jets)
from .geodesics import (MetricJet, exp_map_series, series_eval,
                        geodesic_ode_oracle, sphere_gamma_fn,
                        poincare_gamma_fn, metric_gamma_fn,
                        classical_fedosov_taylor)
from . import acceptance


class UsageError(Exception):
    pass


# -- flag parsing helpers ---------------------------------------------

def parse_complex(s: str, what: str = "value") -> complex:
    """'re,im' or a bare real part."""
    try:
        parts = s.split(",")
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"invalid {what} {s!r}: expected 're,im' or 're'")


def parse_exponents(s: str, dim: int) -> tuple:
    try:
        exps = tuple(int(p) for p in s.split(","))
    except ValueError:
        exps = ()
    if len(exps) != dim or any(e < 0 for e in exps):
        raise UsageError(
            f"invalid monomial {s!r}: expected {dim} comma-separated "
            "non-negative integers")
    return exps


def parse_samples(s: str) -> int:
    """Accept 200000, 2e5, 1e7 and similar."""
    try:
        val = float(s)
    except ValueError:
        raise UsageError(f"invalid sample count {s!r}")
    if val != int(val) or val <= 0:
        raise UsageError(f"invalid sample count {s!r}")
    return int(val)


_NAMED_GRAPHS = {
    "graph1_left": graph1_left,
    "graph1_right": graph1_right,
    "graph2": graph2,
}


def parse_graph(text: str) -> AdmissibleGraph:
    """Named graph (graph2, fan:3, wheel:4, cycle:2) or the K(n,m)[...]
    serialization."""
    if text in _NAMED_GRAPHS:
        return _NAMED_GRAPHS[text]()
    for prefix, fn in (("fan:", fan_graph), ("wheel:", wheel_graph),
                       ("cycle:", cycle_graph)):
        if text.startswith(prefix):
            try:
                return fn(int(text[len(prefix):]))
            except (ValueError, AssertionError) as exc:
                raise UsageError(f"bad graph spec {text!r}: {exc}")
    try:
        return AdmissibleGraph.from_text(text)
    except Exception as exc:
        raise UsageError(f"unknown graph serialization {text!r}: {exc}")


# -- JSON-safe conversions --------------------------------------------

def c_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def qc_json(c: QC) -> list:
    """Exact coefficient as ['p/q', 'r/s']."""
    return [str(c.re), str(c.im)]


def poly_json(p: Poly) -> list:
    return [[list(e), qc_json(c)] for e, c in sorted(p.terms.items())]


def check_json(name, value, target, tolerance, passed=None) -> dict:
    value = float(value)
    if passed is None:
        passed = abs(value - float(target)) <= float(tolerance)
    return {"name": name, "value": value, "target": float(target),
            "tolerance": float(tolerance), "pass": bool(passed)}


def emit(args, command: str, parameters: dict, seed, checks: list,
         results: dict, t0: float) -> int:
    ok = all(c["pass"] for c in checks)
    report = {
        "schema": "defquant-report/1",
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "checks": checks,
        "pass": ok,
        "results": results,
    }
    if args.timing:
        report["seconds"] = round(time.time() - t0, 3)
    if args.table:
        _print_table(report)
    else:
        print(json.dumps(report, sort_keys=True, indent=2))
    return 0 if ok else 1


def _print_table(report: dict) -> None:
    print(f"defquant {report['version']}  --  {report['command']}")
    for k, v in sorted(report["parameters"].items()):
        print(f"  {k:>14s} : {v}")
    if report.get("seconds") is not None:
        print(f"  {'seconds':>14s} : {report['seconds']}")
    for c in report["checks"]:
        mark = "PASS" if c["pass"] else "FAIL"
        print(f"  [{mark}] {c['name']}: value={c['value']:.6g} "
              f"target={c['target']:.6g} tol={c['tolerance']:.3g}")
    print(json.dumps(report["results"], sort_keys=True, indent=2))
    print("pass:", report["pass"])


# -- worker pool for the MC subcommands -------------------------------

def _mc_chunk(task):
    kind = task["kind"]
    if kind == "weight":
        g = AdmissibleGraph.from_text(task["graph"])
        res = weight_mc(g, lam=complex(*task["lam"]),
                        n_samples=task["n"], seed=task["seed"],
                        convention=task["convention"])
    else:
        res = two_valent_integral(task["valence_kind"],
                                  complex(*task["w1"]), complex(*task["w2"]),
                                  lam=complex(*task["lam"]),
                                  n_samples=task["n"], seed=task["seed"],
                                  propagator=task["propagator"])
    return (res.value.real, res.value.imag, res.stderr, res.n_samples)


def pooled_mc(task: dict, n_samples: int, seed: int, workers: int):
    """Split the budget into per-worker chunks and pool the estimates."""
    workers = max(1, workers)
    chunk_sizes = [n_samples // workers] * workers
    chunk_sizes[0] += n_samples - sum(chunk_sizes)
    tasks = []
    for w, n in enumerate(chunk_sizes):
        if n <= 0:
            continue
        t = dict(task)
        t["n"] = n
        t["seed"] = seed + 1_000_003 * w
        tasks.append(t)
    if len(tasks) == 1:
        outs = [_mc_chunk(tasks[0])]
    else:
        with multiprocessing.Pool(processes=len(tasks)) as pool:
            outs = pool.map(_mc_chunk, tasks)
    num = 0j
    den = 0.0
    n_tot = 0
    for re, im, s, n in outs:
        if s == 0.0:
            return complex(re, im), 0.0, n
        wgt = 1.0 / s ** 2
        num += wgt * complex(re, im)
        den += wgt
        n_tot += n
    return num / den, math.sqrt(1.0 / den), n_tot


# -- subcommand bodies ------------------------------------------------

def cmd_graphs_enumerate(args, t0):
    graphs = enumerate_graphs(args.n, args.m, args.out_degree,
                              allow_parallel=args.allow_parallel)
    results = {"count": len(graphs)}
    if args.canonical:
        classes = {}
        for g in graphs:
            gc, par, cons = g.canonical_form()
            entry = classes.setdefault(
                gc.to_text(), {"size": 0, "parity_consistent": cons})
            entry["size"] += 1
        results["canonical_classes"] = classes
        results["n_classes"] = len(classes)
    else:
        results["graphs"] = [g.to_text() for g in graphs]
    params = {"n": args.n, "m": args.m, "out_degree": args.out_degree,
              "allow_parallel": args.allow_parallel,
              "canonical": args.canonical}
    return emit(args, "graphs enumerate", params, None, [], results, t0)


def cmd_weight_mc(args, t0):
    g = parse_graph(args.graph)
    lam = parse_complex(args.lam, "lambda")
    n = parse_samples(args.samples)
    reason = exact_zero_reason(g)
    cache = WeightCache(args.cache) if (args.cache or args.write_cache
                                        or args.from_cache) else None
    if args.from_cache:
        if not cache.path.exists():
            raise UsageError(f"cache file {cache.path} does not exist")
        gc, par, _ = g.canonical_form()
        got = cache.get(gc.to_text(), lam, args.convention)
        if got is None:
            raise UsageError(
                f"no cached estimate for {gc.to_text()} at lambda="
                f"{lam} in {cache.path}")
        value, stderr, n_used = par * got.value, got.stderr, got.n_samples
    elif reason is not None:
        value, stderr, n_used = 0j, 0.0, 0
    else:
        task = {"kind": "weight", "graph": g.to_text(),
                "lam": [lam.real, lam.imag], "convention": args.convention}
        value, stderr, n_used = pooled_mc(task, n, args.seed, args.workers)
    checks = []
    if args.target is not None:
        tgt = parse_complex(args.target, "target")
        tol = max(args.tol, 3.0 * stderr)
        checks.append(check_json("value vs target", abs(value - tgt),
                                 0.0, tol))
    results = {"graph": g.to_text(), "value": c_json(value),
               "stderr": stderr, "n_samples": n_used,
               "exact_zero_reason": reason}
    if cache is not None and args.write_cache and reason is None:
        from .weight_mc import MCResult
        gc, par, _ = g.canonical_form()
        # transport the labeled-graph value to the canonical labeling;
        # readers multiply by their own parity on the way out
        cache.put(MCResult(par * value, stderr, n_used, args.seed, lam,
                           args.convention, gc.to_text()))
        results["cache_path"] = str(cache.path)
    params = {"graph": args.graph, "lambda": c_json(lam), "samples": n,
              "convention": args.convention, "workers": args.workers}
    return emit(args, "weight mc", params, args.seed, checks, results, t0)


def cmd_weight_fit_lambda(args, t0):
    g = parse_graph(args.graph)
    n = parse_samples(args.samples)
    cache = WeightCache(args.cache) if args.cache else None
    fit = weight_poly_fit(g, degree=args.degree, n_samples=n,
                          seed=args.seed, cache=cache)
    checks = []
    for order, resid, sig in funimp_residuals(fit):
        checks.append(check_json(f"reflection relation order {order}",
                                 abs(resid), 0.0, 3.0 * max(sig, 1e-12)))
    import numpy as np
    half = np.array([0.5 ** k for k in range(fit.degree + 1)])
    val, sig = fit.functional(np.zeros_like(half), half)
    checks.append(check_json("Im W at midpoint", abs(val.imag), 0.0,
                             3.0 * max(sig, 1e-12)))
    results = {
        "graph": g.to_text(),
        "degree": fit.degree,
        "coefficients": [c_json(c) for c in fit.coeffs],
        "nodes": [c_json(x) for x in fit.nodes],
        "node_values": [c_json(r.value) for r in fit.results],
        "node_stderr": [r.stderr for r in fit.results],
        "chi2": fit.chi2,
        "midpoint_value": c_json(fit(0.5)),
    }
    params = {"graph": args.graph, "samples": n, "degree": args.degree}
    return emit(args, "weight fit-lambda", params, args.seed, checks,
                results, t0)


def cmd_weight_two_valent(args, t0):
    w1 = parse_complex(args.w1, "w1")
    w2 = parse_complex(args.w2, "w2")
    lam = parse_complex(args.lam, "lambda")
    n = parse_samples(args.samples)
    if max(abs(w1), abs(w2)) >= 1.0:
        raise UsageError("w1 and w2 must lie in the open unit disk")
    task = {"kind": "two-valent", "valence_kind": args.kind,
            "w1": [w1.real, w1.imag], "w2": [w2.real, w2.imag],
            "lam": [lam.real, lam.imag], "propagator": args.propagator}
    value, stderr, n_used = pooled_mc(task, n, args.seed, args.workers)
    checks = []
    results = {"kind": args.kind, "value": c_json(value), "stderr": stderr,
               "n_samples": n_used}
    if args.kind == "out-out" and args.propagator == "disk":
        closed = two_valent_out_out_exact(w1, w2)
        results["closed_form"] = closed
        checks.append(check_json("matches closed form", abs(value - closed),
                                 0.0, max(1e-3, 3.0 * stderr)))
    else:
        checks.append(check_json("vanishes", abs(value), 0.0,
                                 max(1e-3, 3.0 * stderr)))
    params = {"kind": args.kind, "w1": c_json(w1), "w2": c_json(w2),
              "lambda": c_json(lam), "samples": n,
              "propagator": args.propagator, "workers": args.workers}
    return emit(args, "weight two-valent", params, args.seed, checks,
                results, t0)


_ZETA_TARGETS = {2: math.pi ** 2 / 6, 3: 1.2020569031595942854,
                 4: math.pi ** 4 / 90}


def cmd_series_zeta(args, t0):
    vb = merkulov_wheel_zeta(args.n, args.terms)
    checks = []
    if args.n in _ZETA_TARGETS:
        checks.append(check_json(f"zeta({args.n})", vb.value,
                                 _ZETA_TARGETS[args.n], 1e-6))
    results = {"n": args.n, "value": vb.value, "bound": vb.bound}
    params = {"n": args.n, "terms": args.terms}
    return emit(args, "series zeta", params, None, checks, results, t0)


def cmd_series_shadow(args, t0):
    vb = shadow_sum(args.n, args.w, args.terms)
    disp = two_wheel_display(args.w) if args.n == 2 else None
    results = {"n": args.n, "w": args.w, "value": vb.value,
               "bound": vb.bound}
    if disp is not None:
        results["two_wheel_display"] = {"value": disp.value,
                                        "bound": disp.bound}
    params = {"n": args.n, "w": args.w, "terms": args.terms}
    return emit(args, "series shadow", params, None, [], results, t0)


def cmd_series_harmonic(args, t0):
    lhs, mid, rhs = harmonic_identity(args.m)
    ok = lhs == mid == rhs
    checks = [check_json("exact equality", 0 if ok else 1, 0, 0)]
    results = {"m": args.m, "lhs": str(lhs), "mid": str(mid),
               "rhs": str(rhs), "pass": ok}
    return emit(args, "series harmonic", {"m": args.m}, None, checks,
                results, t0)


def _structure(name: str, dim_flag):
    if name == "so3":
        return so3_bivector()
    if name == "moyal":
        d = dim_flag or 2
        if d % 2:
            raise UsageError("moyal structure needs even dimension")
        mat = [[0] * d for _ in range(d)]
        for k in range(0, d, 2):
            mat[k][k + 1] = 1
            mat[k + 1][k] = -1
        return PolyVectorField.bivector(d, mat)
    raise UsageError(f"unknown structure {name!r}")


def cmd_star_assemble(args, t0):
    pi = _structure(args.structure, args.dim)
    lam = parse_complex(args.lam, "lambda")
    n = parse_samples(args.samples)
    cache = WeightCache(args.cache) if args.cache else None
    src = WeightSource(cache=cache, n_samples=n, seed=args.seed)
    series = star_order2(pi, lam, src)
    d = pi.dim
    f = Poly(d, {parse_exponents(args.f, d) if args.f else
                 tuple([2] + [0] * (d - 1)): QC(1)})
    g = Poly(d, {parse_exponents(args.g, d) if args.g else
                 tuple([0] * (d - 1) + [1]): QC(1)})
    prod = series.star(f, g)
    results = {
        "dim": d,
        "order": series.order,
        "term_counts": {str(k): len(op.terms)
                        for k, op in series.ops.items()},
        "mc_classes": {str(k): len(v)
                       for k, v in series.uncertainties.items()},
        "f": poly_json(f),
        "g": poly_json(g),
        "star": {str(k): poly_json(p) for k, p in prod.items()},
    }
    if args.dump_ops:
        results["operators"] = {str(k): op.to_jsonable()
                                for k, op in series.ops.items()}
    params = {"structure": args.structure, "lambda": c_json(lam),
              "samples": n, "f": args.f, "g": args.g}
    return emit(args, "star assemble", params, args.seed, [], results, t0)


def cmd_star_assoc(args, t0):
    pi = _structure(args.structure, args.dim)
    lam = parse_complex(args.lam, "lambda")
    n = parse_samples(args.samples)
    src = WeightSource(n_samples=n, seed=args.seed)
    series = star_order2(pi, lam, src)
    d = pi.dim
    rng = random.Random(args.seed + 1)

    def mono():
        while True:
            e = tuple(rng.randrange(args.deg_max) for _ in range(d))
            if 0 < sum(e) <= args.deg_max:
                return Poly(d, {e: QC(1)})

    checks = []
    worst = 0.0
    for trial in range(args.triples):
        f, g, h = mono(), mono(), mono()
        resid = associativity_residual(series, f, g, h, 2)
        low = [k for k in resid if k < 2]
        checks.append(check_json(f"triple {trial} orders 0,1 exact",
                                 len(low), 0, 0))
        sig = associativity_sigma(series, f, g, h, 2).get(2, {})
        r2 = resid.get(2)
        bad = 0
        if r2 is not None:
            for e, c in r2.terms.items():
                mag = abs(c.to_complex())
                bound = 3.0 * sig.get(e, 0.0)
                if bound == 0.0:
                    bad += int(mag != 0.0)
                else:
                    worst = max(worst, mag / bound)
                    bad += int(mag > bound)
        checks.append(check_json(
            f"triple {trial} order 2 within 3 sigma", bad, 0, 0))
    results = {"triples": args.triples, "deg_max": args.deg_max,
               "worst_ratio_to_3sigma": worst}
    params = {"structure": args.structure, "lambda": c_json(lam),
              "samples": n, "triples": args.triples,
              "deg_max": args.deg_max}
    return emit(args, "star assoc", params, args.seed, checks, results, t0)


def _fedosov_example(name: str, cap: int):
    if name == "flat":
        return flat_input(dim=2, cap=cap)
    if name == "curved":
        x2 = Poly(2, {(0, 1): QC(1)})
        return acceptance._symplectic_input(cap=cap, t_entries={(0, 0, 0): x2})
    raise UsageError(f"unknown example {name!r} (flat or curved)")


def cmd_fedosov_solve(args, t0):
    inp = _fedosov_example(args.example, args.cap)
    r = solve_connection(inp)
    by_deg = {}
    for (vexp, dxs, hpow), p in r.terms.items():
        deg = sum(vexp) + 2 * hpow
        by_deg[deg] = by_deg.get(deg, 0) + len(p.terms)
    checks = [check_json("normalization delta_inv r = 0",
                         0 if r.delta_inv().is_zero() else 1, 0, 0)]
    results = {"example": args.example, "cap": args.cap,
               "terms_by_deg": {str(k): v
                                for k, v in sorted(by_deg.items())}}
    if args.example == "curved" and args.cap >= 5:
        _, counts = catalan_trees(inp, 4)
        ok = all(counts[k] == catalan_number(k) for k in range(1, 5))
        checks.append(check_json("tree counts 1,1,2,5", 0 if ok else 1,
                                 0, 0))
        gap = catalan_expansion(inp, 4) - r
        checks.append(check_json("catalan expansion == iterate",
                                 0 if gap.is_zero() else 1, 0, 0))
        results["tree_counts"] = {str(k): counts[k] for k in counts}
    params = {"example": args.example, "cap": args.cap}
    return emit(args, "fedosov solve", params, None, checks, results, t0)


def cmd_fedosov_star(args, t0):
    inp = _fedosov_example(args.example, args.cap)
    f = Poly(2, {parse_exponents(args.f, 2): QC(1)})
    g = Poly(2, {parse_exponents(args.g, 2): QC(1)})
    st = fedosov_star(inp, f, g)
    checks = []
    if args.example == "flat":
        my = moyal_star_jets([[0, 1], [-1, 0]], f, g, args.cap // 2)
        keys = set(st) | set(my)
        bad = sum(1 for h in keys
                  if st.get(h, Poly.zero(2)) != my.get(h, Poly.zero(2)))
        checks.append(check_json("equals moyal oracle", bad, 0, 0))
    results = {"example": args.example, "cap": args.cap,
               "f": poly_json(f), "g": poly_json(g),
               "star": {str(k): poly_json(p) for k, p in sorted(st.items())}}
    params = {"example": args.example, "cap": args.cap, "f": args.f,
              "g": args.g}
    return emit(args, "fedosov star", params, None, checks, results, t0)


def _metric(name: str, order: int, seed: int):
    if name == "sphere":
        return MetricJet.sphere(order)
    if name == "poincare":
        return MetricJet.poincare_half_plane(order)
    if name == "flat":
        return MetricJet.flat(2, order)
    if name == "random":
        return MetricJet.random_metric(2, order, random.Random(seed))
    raise UsageError(f"unknown metric {name!r} "
                     "(sphere, poincare, flat, random)")


def cmd_geodesic_exp(args, t0):
    met = _metric(args.metric, args.order, args.seed)
    phi = exp_map_series(met, args.order)
    results = {"metric": args.metric, "order": args.order,
               "variables": "u1..ud then v1..vd; offsets from the base",
               "series": {f"phi{i + 1}": poly_json(p)
                          for i, p in enumerate(phi)}}
    if args.taylor:
        taus = [classical_fedosov_taylor(met, i, args.order)
                for i in range(met.dim)]
        gaps = sum(1 for i in range(met.dim)
                   if not (taus[i] - phi[i]).is_zero())
        results["flat_section_matches"] = gaps == 0
    params = {"metric": args.metric, "order": args.order,
              "taylor": args.taylor}
    return emit(args, "geodesic exp", params,
                args.seed if args.metric == "random" else None, [],
                results, t0)


def cmd_geodesic_oracle(args, t0):
    met = _metric(args.metric, args.order, args.seed)
    x = parse_complex(args.x, "x")
    v = parse_complex(args.v, "v")
    base = {"sphere": (math.asin(3.0 / 5.0), 0.0), "poincare": (0.0, 1.0),
            "flat": (0.0, 0.0), "random": (0.0, 0.0)}[args.metric]
    gamma_fn = {"sphere": sphere_gamma_fn,
                "poincare": poincare_gamma_fn}.get(args.metric)
    if gamma_fn is None:
        gamma_fn = metric_gamma_fn(met)
    start = (base[0] + x.real, base[1] + x.imag)
    vel = (v.real, v.imag)
    ode = geodesic_ode_oracle(gamma_fn, start, vel, args.t, steps=args.steps)
    sv = series_eval(exp_map_series(met, args.order),
                     (x.real, x.imag),
                     (vel[0] * args.t, vel[1] * args.t))
    ser = (start[0] + sv[0].real, start[1] + sv[1].real)
    gap = max(abs(ser[0] - ode[0]), abs(ser[1] - ode[1]))
    checks = []
    if args.tol is not None:
        checks.append(check_json("series vs ODE", gap, 0.0, args.tol))
    results = {"metric": args.metric, "start": list(start),
               "velocity": list(vel), "t": args.t,
               "ode_endpoint": list(ode), "series_endpoint": list(ser),
               "gap": gap}
    params = {"metric": args.metric, "x": c_json(x), "v": c_json(v),
              "t": args.t, "steps": args.steps, "order": args.order}
    return emit(args, "geodesic oracle", params,
                args.seed if args.metric == "random" else None, checks,
                results, t0)


def cmd_verify_all(args, t0):
    echo = print if args.table else (lambda s: print(s, file=sys.stderr))
    results = acceptance.run_all(quick=args.quick, echo=echo)
    checks = []
    for res in results:
        checks.append(check_json(f"criterion {res.index} {res.name}",
                                 0 if res.passed else 1, 0, 0))
    payload = {"quick": args.quick,
               "criteria": [r.to_jsonable() for r in results]}
    if not args.timing:
        for crit in payload["criteria"]:
            crit.pop("seconds", None)
    return emit(args, "verify all", {"quick": args.quick}, None, checks,
                payload, t0)


# -- parser -----------------------------------------------------------

def _add_common(p):
    p.add_argument("--table", action="store_true",
                   help="human-readable output instead of JSON")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock seconds (breaks byte-for-byte "
                        "report reproducibility)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="defquant",
        description="graph weights, star products, and geodesic series")
    sub = ap.add_subparsers(dest="group", required=True)

    g = sub.add_parser("graphs", help="graph enumeration")
    gs = g.add_subparsers(dest="action", required=True)
    p = gs.add_parser("enumerate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out-degree", type=int, default=2)
    p.add_argument("--allow-parallel", action="store_true")
    p.add_argument("--canonical", action="store_true",
                   help="group into canonical classes")
    _add_common(p)
    p.set_defaults(fn=cmd_graphs_enumerate)

    w = sub.add_parser("weight", help="Monte Carlo graph weights")
    ws = w.add_subparsers(dest="action", required=True)
    p = ws.add_parser("mc")
    p.add_argument("--graph", required=True,
                   help="K(n,m)[...] text or a named graph "
                        "(graph2, fan:3, ...)")
    p.add_argument("--lambda", dest="lam", default="0.5,0")
    p.add_argument("--samples", default="200000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--convention", choices=["raw", "formality"],
                   default="raw")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--target", default=None,
                   help="optional 're,im' reference value to check against")
    p.add_argument("--tol", type=float, default=2e-3)
    p.add_argument("--cache", default=None,
                   help="weight cache path (default from KW_CACHE)")
    p.add_argument("--write-cache", action="store_true")
    p.add_argument("--from-cache", action="store_true",
                   help="report the pooled cached estimate; no sampling")
    _add_common(p)
    p.set_defaults(fn=cmd_weight_mc)

    p = ws.add_parser("fit-lambda")
    p.add_argument("--graph", required=True)
    p.add_argument("--samples", default="400000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--cache", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_weight_fit_lambda)

    p = ws.add_parser("two-valent")
    p.add_argument("--kind", choices=["out-out", "in-out", "in-in"],
                   required=True)
    p.add_argument("--w1", required=True,
                   help="'re,im' in the unit disk; write --w1=-0.2,0.4 "
                        "for negative real parts")
    p.add_argument("--w2", required=True)
    p.add_argument("--lambda", dest="lam", default="0.5,0")
    p.add_argument("--samples", default="400000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--propagator", choices=["disk", "shoikhet"],
                   default="disk")
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=cmd_weight_two_valent)

    s = sub.add_parser("series", help="closed-form series recipes")
    ss = s.add_subparsers(dest="action", required=True)
    p = ss.add_parser("zeta")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--terms", type=int, default=10_000)
    _add_common(p)
    p.set_defaults(fn=cmd_series_zeta)
    p = ss.add_parser("shadow")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--terms", type=int, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_series_shadow)
    p = ss.add_parser("harmonic")
    p.add_argument("--m", type=int, required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_series_harmonic)

    st = sub.add_parser("star", help="star-product assembly")
    sts = st.add_subparsers(dest="action", required=True)
    p = sts.add_parser("assemble")
    p.add_argument("--structure", choices=["moyal", "so3"], default="so3")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--lambda", dest="lam", default="0.5,0")
    p.add_argument("--samples", default="400000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--f", default=None, help="monomial exponents 'a,b,...'")
    p.add_argument("--g", default=None)
    p.add_argument("--cache", default=None)
    p.add_argument("--dump-ops", action="store_true",
                   help="include the full bidifferential operators")
    _add_common(p)
    p.set_defaults(fn=cmd_star_assemble)
    p = sts.add_parser("assoc")
    p.add_argument("--structure", choices=["moyal", "so3"], default="so3")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--lambda", dest="lam", default="0.5,0")
    p.add_argument("--samples", default="400000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--triples", type=int, default=5)
    p.add_argument("--deg-max", type=int, default=3)
    _add_common(p)
    p.set_defaults(fn=cmd_star_assoc)

    f = sub.add_parser("fedosov", help="Weyl-bundle fixed points")
    fs = f.add_subparsers(dest="action", required=True)
    p = fs.add_parser("solve")
    p.add_argument("--example", choices=["flat", "curved"],
                   default="curved")
    p.add_argument("--cap", type=int, default=5)
    _add_common(p)
    p.set_defaults(fn=cmd_fedosov_solve)
    p = fs.add_parser("star")
    p.add_argument("--example", choices=["flat", "curved"], default="flat")
    p.add_argument("--cap", type=int, default=6)
    p.add_argument("--f", default="2,0")
    p.add_argument("--g", default="0,1")
    _add_common(p)
    p.set_defaults(fn=cmd_fedosov_star)

    ge = sub.add_parser("geodesic", help="exponential-map series")
    ges = ge.add_subparsers(dest="action", required=True)
    p = ges.add_parser("exp")
    p.add_argument("--metric",
                   choices=["sphere", "poincare", "flat", "random"],
                   default="sphere")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--taylor", action="store_true",
                   help="also run the flat-section recursion and compare")
    _add_common(p)
    p.set_defaults(fn=cmd_geodesic_exp)
    p = ges.add_parser("oracle")
    p.add_argument("--metric",
                   choices=["sphere", "poincare", "flat", "random"],
                   default="sphere")
    p.add_argument("--x", default="0,0", help="offset from the base point")
    p.add_argument("--v", default="1,0", help="initial velocity 're,im'")
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=4000)
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None,
                   help="gate the series-vs-ODE gap at this tolerance")
    _add_common(p)
    p.set_defaults(fn=cmd_geodesic_oracle)

    v = sub.add_parser("verify", help="acceptance suite")
    vs = v.add_subparsers(dest="action", required=True)
    p = vs.add_parser("all")
    p.add_argument("--quick", action="store_true",
                   help="reduced sample sizes; statistical gates widen to "
                        "4 sigma of the reduced run")
    _add_common(p)
    p.set_defaults(fn=cmd_verify_all)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.time()
    try:
        return args.fn(args, t0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
