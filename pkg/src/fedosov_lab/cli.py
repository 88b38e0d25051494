"""Command-line front end.

    fedosov-lab <command> --scenario <file> [--order N] [--out report.json]

Commands:
    verify   run the identity suite for the scenario's chart and perturbation
    star     print the product coefficient table for the scenario observables
    compare  probe the perturbed product against its predicted bivector series
    coeffs   print the scalar coefficient table with its cross-checks
    poisson  print the deformed bivector series and its Schouten residual

Exit status: 0 when every check passes, 1 when a check fails (the failing
anchors are named), 2 for usage or scenario errors.
"""

from __future__ import annotations

import argparse
import sys

from .algebra import GaussianRational, Polynomial
from .tensors import formal_poisson, series_inverse, series_schouten, TensorSeries
from .weyl import WeylForm, delta, delta_inv, sigma
from .geometry import validate_geometry
from .fedosov import StarEngine, coeff_sequences, curvature_residual, \
    abelian_residual
from .analysis import compare_onediff, curvature_onediff_identities
from .io import Check, ParseError, Report, ScenarioError, load_scenario

__all__ = ["main", "run"]


def _tensor_str(t):
    return str(t.to_strs())


def _default_observables(scenario):
    dim = scenario.geometry.dim
    f = scenario.observables.get("f")
    g = scenario.observables.get("g")
    if f is None:
        f = Polynomial.variable(dim, 0)
    if g is None:
        g = Polynomial.variable(dim, 1 % dim)
    return f, g


def _verify_checks(scenario):
    sid = scenario.scenario_id
    geom = scenario.geometry
    spec = scenario.build_spec()
    order = scenario.order
    checks = []

    for anchor, ok in validate_geometry(geom):
        checks.append(Check(anchor, sid, "0" if ok else "violated", ok))

    # structural operator checks on a deterministic probe form
    dim = geom.dim
    probe = WeylForm(dim, {
        (0, tuple(2 if t == 0 else 0 for t in range(dim)), (0,)):
            Polynomial.variable(dim, dim - 1),
        (1, tuple(1 if t == dim - 1 else 0 for t in range(dim)), ()):
            Polynomial.one(dim),
    })
    dd = delta(delta(probe))
    checks.append(Check("weyl.delta-squared", sid, str(dd), dd.is_zero()))
    kk = delta_inv(delta_inv(probe))
    checks.append(Check("weyl.delta-inv-squared", sid, str(kk), kk.is_zero()))
    hod = probe - (WeylForm.from_series(sigma(probe), dim)
                   + delta(delta_inv(probe)) + delta_inv(delta(probe)))
    checks.append(Check("weyl.hodge-decomposition", sid, str(hod), hod.is_zero()))

    engine = StarEngine(spec, order)
    r = engine.r()
    resid = curvature_residual(r, spec, drop_above=engine.cap - 2)
    checks.append(Check("connection.flatness-residual", sid,
                        str(resid), resid.is_zero()))

    f, g = _default_observables(scenario)
    for name, obs in (("f", f), ("g", g)):
        a = engine.section(obs)
        da = abelian_residual(a, spec, r, drop_above=engine.cap - 2)
        checks.append(Check("section.abelian-residual-%s" % name, sid,
                            str(da), da.is_zero()))

    one = Polynomial.one(dim)
    left = engine.star(one, f).as_series() - engine.star(f, one).as_series()
    unit = engine.star(one, f)
    unit_ok = unit.coeff(0) == f and all(
        unit.coeff(n).is_zero() for n in range(1, order + 1)) and left.is_zero()
    checks.append(Check("star.unit-neutral", sid,
                        "0" if unit_ok else str(unit.as_series()), unit_ok))

    sk_ok = True
    detail = "0"
    min_k = spec.min_k()
    for i in range(dim):
        for j in range(dim):
            xi, xj = Polynomial.variable(dim, i), Polynomial.variable(dim, j)
            comm1 = (engine.star(xi, xj).as_series()
                     - engine.star(xj, xi).as_series()).coeff(1, Polynomial.zero(dim))
            wbar = geom.omega_bar.entry(i, j).scale(GaussianRational(0, -1))
            if comm1 != wbar:
                sk_ok = False
                detail = "coordinates %d,%d: %s" % (i + 1, j + 1, comm1 - wbar)
    checks.append(Check("star.first-order-bracket", sid, detail, sk_ok))

    try:
        coeff_sequences(scenario.coeff_limit, cross_check=True)
        checks.append(Check("coeffs.recursions-vs-taylor", sid, "0", True))
    except ArithmeticError as exc:
        checks.append(Check("coeffs.recursions-vs-taylor", sid, str(exc), False))

    if not geom.is_flat():
        for c in curvature_onediff_identities(geom, f, g):
            checks.append(Check(c.anchor, sid, c.residual, c.passed))

    if spec.is_perturbed:
        base_engine = StarEngine(spec.unperturbed(), order)
        rep = compare_onediff(spec, order, base=base_engine.spec,
                              engines=(engine, base_engine))
        bad = rep.failures()
        checks.append(Check(
            "onediff.guaranteed-orders", sid,
            "0" if not bad else "orders %s" % [c.n for c in bad], rep.passed))
        if min_k is not None and min_k + 1 <= order:
            first = rep.orders[min_k + 1]
            checks.append(Check(
                "onediff.first-shift", sid,
                str(first.residual.to_strs()) if not first.ok else "0", first.ok))
    return checks


def _star_checks(scenario):
    sid = scenario.scenario_id
    spec = scenario.build_spec()
    engine = StarEngine(spec, scenario.order)
    f, g = _default_observables(scenario)
    res = engine.star(f, g)
    checks = []
    for n in range(scenario.order + 1):
        checks.append(Check("star.coefficient.h%d" % n, sid,
                            str(res.coeff(n)), True))
    return checks


def _compare_checks(scenario):
    sid = scenario.scenario_id
    spec = scenario.build_spec()
    if not spec.is_perturbed:
        raise ScenarioError("compare needs a perturbation block")
    rep = compare_onediff(spec, scenario.order)
    checks = []
    for c in rep.orders:
        base = "onediff.order-%d" % c.n
        if c.guaranteed:
            checks.append(Check(base, sid, str(c.residual.to_strs())
                                if not c.ok else "0", c.ok))
        else:
            checks.append(Check(base + ".informational", sid,
                                str(c.residual.to_strs()), True))
        checks.append(Check(base + ".probe", sid, _tensor_str(c.probe), True))
        checks.append(Check(base + ".predicted", sid,
                            _tensor_str(c.predicted), True))
    return checks


def _coeffs_checks(scenario, limit):
    sid = scenario.scenario_id if scenario else "none"
    checks = []
    try:
        table = coeff_sequences(limit, cross_check=True)
        checks.append(Check("coeffs.recursions-vs-taylor", sid, "0", True))
    except ArithmeticError as exc:
        checks.append(Check("coeffs.recursions-vs-taylor", sid, str(exc), False))
        return checks, None
    half_ok = all(v == table.c[0] for v in table.c.values()) and str(table.c[1]) == "1/2"
    checks.append(Check("coeffs.c-constant-half", sid,
                        "0" if half_ok else "drift", half_ok))
    for n in range(limit + 1):
        checks.append(Check("coeffs.row-%d" % n, sid,
                            "sigma=%s kappa=%s c=%s" % (
                                table.sigma.get(n, 0), table.kappa[n], table.c[n]),
                            True))
    return checks, table


def _poisson_checks(scenario):
    sid = scenario.scenario_id
    spec = scenario.build_spec()
    if not spec.is_perturbed:
        raise ScenarioError("poisson needs a perturbation block")
    order = scenario.order
    geom = scenario.geometry
    alpha = spec.alpha_series(order)
    obar = formal_poisson(alpha, geom, order)
    checks = []
    for n in range(order + 1):
        checks.append(Check("poisson.series.h%d" % n, sid,
                            _tensor_str(obar.coeff(n)), True))
    omega_series = TensorSeries.from_terms(
        geom.dim, "lower", order,
        [(0, geom.omega)] + list(alpha.hs.coeffs.items()))
    inv = series_inverse(omega_series, order)
    agree = all(obar.coeff(n) == inv.coeff(n) for n in range(order + 1))
    checks.append(Check("poisson.inverse-cross-check", sid,
                        "0" if agree else "mismatch", agree))
    sch = series_schouten(obar, obar, order)
    sch_zero = all(t.is_zero() for t in sch.coeffs.values())
    checks.append(Check("poisson.schouten-residual", sid,
                        "0" if sch_zero else "nonzero", sch_zero))
    return checks


def run(command, scenario, order=None, coeff_limit=None):
    """Run one command against a loaded Scenario and return a Report."""
    if scenario is not None and order is not None:
        scenario.order = order
    if command == "verify":
        checks = _verify_checks(scenario)
    elif command == "star":
        checks = _star_checks(scenario)
    elif command == "compare":
        checks = _compare_checks(scenario)
    elif command == "coeffs":
        limit = coeff_limit or (scenario.coeff_limit if scenario else 8)
        checks, _ = _coeffs_checks(scenario, limit)
    elif command == "poisson":
        checks = _poisson_checks(scenario)
    else:
        raise ScenarioError("unknown command %r" % command)
    sid = scenario.scenario_id if scenario else "none"
    return Report(command, sid, checks)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fedosov-lab",
        description="Exact star-product construction and identity checking.")
    parser.add_argument("command",
                        choices=["verify", "star", "compare", "coeffs", "poisson"])
    parser.add_argument("--scenario", help="scenario JSON file")
    parser.add_argument("--order", type=int, default=None,
                        help="expansion order (coeffs: table limit)")
    parser.add_argument("--out", help="write the JSON report to this path")
    args = parser.parse_args(argv)

    try:
        scenario = None
        if args.scenario is not None:
            scenario = load_scenario(args.scenario)
        elif args.command != "coeffs":
            parser.error("command %r requires --scenario" % args.command)
        report = run(args.command, scenario,
                     order=None if args.command == "coeffs" else args.order,
                     coeff_limit=args.order if args.command == "coeffs" else None)
    except (ParseError, ScenarioError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2

    print(report.table())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    if report.passed:
        return 0
    failing = [c.anchor for c in report.checks if not c.passed]
    print("failing: %s" % ", ".join(failing), file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
