"""One-differentiable content of perturbed star products.

Perturbing the curvature input of the product by a central two-form series
alpha^hbar shifts the product coefficients; on linear coordinate observables
every higher-derivative contribution vanishes, so probing with coordinates
extracts the constant bivector part of each order exactly.  This module
computes those probes, the predicted bivector series

    T_n = (i/2) [ sum_{p >= 1} (mu alpha^hbar)^{<> p} ]_{n-1},

their comparison, and a family of curvature identities that pin the constant
prefactors of the first curvature-dependent corrections.

Curvature bookkeeping.  With A_l = R_{ijkl} y^i y^j y^k, the triple
contraction A_{l1} o_3 A_{l2} is i hbar^3 times a real polynomial matrix;
``CalR`` stores that pure polynomial P ("lower"), so the two-form actually
appearing in the identities is i hbar^3 P_{l1 l2} and the raised version is
i hbar^3 mu(P).  Identity right-hand sides below quote their constants
against that convention.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import GaussianRational, HbarSeries, Polynomial, I
from .tensors import Tensor2, TensorSeries, mu, series_diamond, two_form_d
from .weyl import (WeylForm, central_two_form, delta_inv, i_over_hbar, moyal,
                   odd_bracket, sigma, two_form_to_tensor, y_dx_form,
                   y_gradient)
from .geometry import GeometryError, cov_ext_deriv
from .fedosov import StarEngine, WeylCurvatureSpec

__all__ = [
    "CalR",
    "cal_r",
    "beta_form",
    "gamma_form",
    "bivector_probe",
    "predicted_onediff",
    "OrderComparison",
    "ComparisonReport",
    "compare_onediff",
    "IdentityCheck",
    "curvature_onediff_identities",
]

_HALF_I = GaussianRational(0, Fraction(1, 2))
_MINUS_I = GaussianRational(0, -1)


def _same_chart(g1, g2):
    return g1 is g2 or (g1.dim == g2.dim and g1.omega == g2.omega
                        and g1.gamma == g2.gamma)


# -- curvature pair tensor -------------------------------------------------------


class CalR:
    """The curvature pair contraction, stored prefactor-free.

    ``lower`` is the real polynomial matrix P with
    A_{l1} o_3 A_{l2} = i hbar^3 P_{l1 l2}; ``upper`` raises both indices,
    upper = -wbar wbar P.  P is skew.
    """

    __slots__ = ("geometry", "lower", "upper")

    def __init__(self, geometry, lower):
        self.geometry = geometry
        self.lower = lower
        self.upper = mu(lower, geometry)

    def is_zero(self):
        return self.lower.is_zero()


def cal_r(geom):
    """Contract the cubic curvature forms A_l = R_{ijkl} y^i y^j y^k pairwise.

    Flat charts give the zero tensor (not an error).
    """
    dim = geom.dim
    curv = geom.curvature()
    a_weyl = []
    for l in range(dim):
        terms = {}
        for i in range(dim):
            for j in range(dim):
                for k in range(dim):
                    v = curv.entry(i, j, k, l)
                    if v.is_zero():
                        continue
                    u = [0] * dim
                    u[i] += 1
                    u[j] += 1
                    u[k] += 1
                    key = (0, tuple(u), ())
                    terms[key] = terms.get(key, Polynomial.zero(dim)) + v
        terms = {key: p for key, p in terms.items() if not p.is_zero()}
        a_weyl.append(WeylForm(dim, terms))
    rows = [[Polynomial.zero(dim) for _ in range(dim)] for _ in range(dim)]
    for l1 in range(dim):
        if a_weyl[l1].is_zero():
            continue
        for l2 in range(dim):
            if a_weyl[l2].is_zero():
                continue
            prod = moyal(a_weyl[l1], a_weyl[l2], geom, only_k=3)
            if prod.is_zero():
                continue
            poly = prod.terms.get((3, (0,) * dim, ()))
            if poly is None:
                continue
            rows[l1][l2] = poly.scale(_MINUS_I)
    return CalR(geom, Tensor2(dim, "lower", rows))


# -- propagation two-forms -------------------------------------------------------


def _transported(seed, n, geom):
    """Apply (delta_inv . covariant-derivative) n times to delta_inv(seed)."""
    u = delta_inv(seed)
    for _ in range(n):
        u = delta_inv(cov_ext_deriv(u, geom))
    return u


def _square_two_form(u, geom, hbar_power):
    """i * (y-free part of u o u) / hbar^{hbar_power+1}, as a lower tensor."""
    yfree = moyal(u, u, geom).y_free()
    t = two_form_to_tensor(yfree, hbar_power + 1)
    return t.scale(I)


def beta_form(n, geom):
    """Two-form of the n-step curvature transport square.

    (i/hbar) ((delta_inv par)^n delta_inv R)^2 at y = 0 is a single power
    hbar^{n+2} times this tensor; it vanishes for odd n and for flat charts.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if geom.is_flat():
        return Tensor2.zeros(geom.dim, "lower")
    u = _transported(geom.curvature().weyl_two_form, n, geom)
    return _square_two_form(u, geom, n + 2)


def gamma_form(n, alpha, k, geom):
    """Two-form of the n-step transport square of a central perturbation.

    (i/hbar) ((delta_inv par)^n delta_inv(hbar^k alpha))^2 at y = 0 is
    hbar^{2k+n} times this tensor; zero for odd n, and on a flat chart zero
    for every n >= 1 whenever alpha is constant (the transport is then pure
    exterior derivative and kills constants in one step).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if k < 1:
        raise ValueError("k must be at least 1")
    if not alpha.is_skew():
        raise ValueError("alpha must be skew")
    if not two_form_d(alpha).is_zero():
        raise ValueError("alpha must be closed")
    u = _transported(central_two_form(alpha, hpow=k), n, geom)
    return _square_two_form(u, geom, 2 * k + n)


# -- coordinate bivector probes --------------------------------------------------


def _coordinate_products(engine):
    """dim x dim grid of StarResults on the coordinate functions."""
    dim = engine.spec.dim
    xs = [Polynomial.variable(dim, i) for i in range(dim)]
    return [[engine.star(xs[i], xs[j]) for j in range(dim)] for i in range(dim)]


def _probe_from_grids(g1, g2, n, dim):
    return Tensor2(dim, "upper",
                   [[g1[i][j].coeff(n) - g2[i][j].coeff(n) for j in range(dim)]
                    for i in range(dim)])


def bivector_probe(spec1, spec2, n, order, engines=None):
    """Matrix of order-n product coefficients on coordinates, differenced.

    Entry (i, j) is  C~_n(x^i, x^j) - C_n(x^i, x^j), with C~ from ``spec1``
    and C from ``spec2``.  Both specs must share the chart.  ``engines`` may
    carry a pair of prebuilt StarEngine instances to amortize the solves.
    """
    if not _same_chart(spec1.geometry, spec2.geometry):
        raise GeometryError("bivector probes need a shared chart")
    if n > order:
        raise ValueError("probe order exceeds the expansion order")
    if engines is None:
        engines = (StarEngine(spec1, order), StarEngine(spec2, order))
    e1, e2 = engines
    return _probe_from_grids(_coordinate_products(e1), _coordinate_products(e2),
                             n, spec1.dim)


def predicted_onediff(alpha_h, geom, order):
    """Predicted bivector series of the perturbation, one order shifted.

    Returns the HbarSeries with coefficient (i/2) [sum_{p>=1}
    (mu alpha^hbar)^{<> p}]_{n-1} at hbar^n — the expected coordinate probe
    of the perturbed-minus-unperturbed product at each order.  Adding the
    hbar^0 bivector wbar to the inner sum (with sign) reassembles the formal
    Poisson bivector, which ``formal_poisson`` computes independently.
    """
    if alpha_h.variance != "lower":
        raise ValueError("perturbation must be a lower tensor series")
    if alpha_h.dim != geom.dim:
        raise ValueError("perturbation dim does not match chart dim")
    inner = order - 1
    abar = alpha_h.with_order(inner).map_tensors(lambda t: mu(t, geom),
                                                 variance="upper")
    total = TensorSeries(geom.dim, "upper", HbarSeries(inner, {}))
    power = abar
    while not power.is_zero():
        total = total + power
        power = series_diamond(abar, power, geom, inner)
    out = {}
    for m, t in total.hs.coeffs.items():
        scaled = t.scale(_HALF_I)
        if not scaled.is_zero():
            out[m + 1] = scaled
    return HbarSeries(order, out)


class OrderComparison:
    """Probe vs prediction at one order, with its exact residual."""

    __slots__ = ("n", "probe", "predicted", "residual", "guaranteed")

    def __init__(self, n, probe, predicted, guaranteed):
        self.n = n
        self.probe = probe
        self.predicted = predicted
        self.residual = probe - predicted
        self.guaranteed = guaranteed

    @property
    def ok(self):
        return self.residual.is_zero()

    def __repr__(self):
        return "OrderComparison(n=%d, ok=%s, guaranteed=%s)" % (
            self.n, self.ok, self.guaranteed)


class ComparisonReport:
    """Per-order probes of a perturbed product against the bivector series.

    Orders are marked guaranteed when the remainder provably vanishes on
    coordinate probes: every order for a flat chart with constant
    perturbation, otherwise only through min_k + 1 (the first perturbed
    order), since beyond it the remainder may carry curvature- or
    derivative-of-alpha terms.
    """

    def __init__(self, spec, order, orders):
        self.spec = spec
        self.order = order
        self.orders = orders

    @property
    def passed(self):
        return all(c.ok for c in self.orders if c.guaranteed)

    def failures(self):
        return [c for c in self.orders if c.guaranteed and not c.ok]

    def __repr__(self):
        return "ComparisonReport(order=%d, passed=%s)" % (self.order, self.passed)


def compare_onediff(spec, order, base=None, engines=None):
    """Probe the perturbed product against its predicted bivector series.

    ``base`` defaults to the unperturbed spec on the same chart.  Returns a
    ComparisonReport whose per-order records hold the probe matrix, the
    predicted matrix, and their difference.  ``engines`` may carry prebuilt
    (perturbed, base) StarEngine instances to reuse their cached solutions.
    """
    if not spec.is_perturbed:
        raise ValueError("comparison needs a perturbed spec")
    if base is None:
        base = spec.unperturbed()
    if not _same_chart(spec.geometry, base.geometry):
        raise GeometryError("comparison needs a shared chart")
    if engines is None:
        engines = (StarEngine(spec, order), StarEngine(base, order))
    g1 = _coordinate_products(engines[0])
    g2 = _coordinate_products(engines[1])
    predicted = predicted_onediff(spec.alpha_series(order), spec.geometry, order)
    all_orders = spec.is_flat_constant() and not base.is_perturbed
    limit = order if all_orders else min(order, spec.min_k() + 1)
    zero = Tensor2.zeros(spec.dim, "upper")
    records = []
    for n in range(order + 1):
        probe = _probe_from_grids(g1, g2, n, spec.dim)
        pred = predicted.coeff(n, zero)
        records.append(OrderComparison(n, probe, pred, n <= limit))
    return ComparisonReport(spec, order, records)


# -- curvature identity suite ----------------------------------------------------


class IdentityCheck:
    """A named exact identity with its residual."""

    __slots__ = ("anchor", "residual", "passed", "detail")

    def __init__(self, anchor, residual, passed, detail=""):
        self.anchor = anchor
        self.residual = residual
        self.passed = passed
        self.detail = detail

    def __repr__(self):
        return "IdentityCheck(%r, passed=%s)" % (self.anchor, self.passed)


def _check_forms(anchor, lhs, rhs, detail=""):
    res = lhs - rhs
    return IdentityCheck(anchor, str(res), res.is_zero(), detail)


def _check_series(anchor, lhs, rhs, detail=""):
    n = max(lhs.order, rhs.order)
    res = lhs.with_order(n) - rhs.with_order(n)
    return IdentityCheck(anchor, str(res), res.is_zero(), detail)


def _grad_pair_series(upper, f, g, coeff, hpow):
    """HbarSeries with hbar^hpow term  coeff * upper^{mn} d_m f d_n g."""
    dim = upper.dim
    acc = Polynomial.zero(dim)
    for m in range(dim):
        df = f.partial(m)
        if df.is_zero():
            continue
        for nn in range(dim):
            dg = g.partial(nn)
            if dg.is_zero():
                continue
            v = upper.entry(m, nn)
            if v.is_zero():
                continue
            acc = acc + v * df * dg
    acc = acc.scale(coeff)
    return HbarSeries(hpow, {} if acc.is_zero() else {hpow: acc})


def curvature_onediff_identities(geom, f, g):
    """Exact checks of the curvature corrections entering the probe orders.

    Evaluates, purely from the graded-algebra primitives, the first
    transport of a linear section through the curvature, the three pair
    products that produce the constant bivector corrections, and their
    mutual ratios; each is compared against its closed form in the
    curvature pair tensor.  Returns a list of IdentityCheck records.
    """
    if geom.is_flat():
        raise GeometryError("curvature identities need a curved chart")
    dim = geom.dim
    checks = []
    curv = geom.curvature()
    calr = cal_r(geom)
    p_lower = calr.lower
    p_upper = calr.upper

    checks.append(IdentityCheck(
        "curvature-pair.skew",
        "0" if p_lower.is_skew() else "asymmetric",
        p_lower.is_skew(),
        "pair tensor is antisymmetric"))

    a1 = y_gradient(f)
    b1 = y_gradient(g)
    u = delta_inv(curv.weyl_two_form)

    def transport(lin):
        return delta_inv(i_over_hbar(odd_bracket(u, lin, geom)))

    ta = transport(a1)
    tb = transport(b1)

    # cubic transport of a linear section: -(1/24) wbar^{lm} R_{ijkl} y^3 d_m f
    expect = {}
    for l in range(dim):
        for m in range(dim):
            w = geom.omega_bar.entry(l, m).constant_value()
            if w == 0:
                continue
            dmf = f.partial(m)
            if dmf.is_zero():
                continue
            for i in range(dim):
                for j in range(dim):
                    for k in range(dim):
                        v = curv.entry(i, j, k, l)
                        if v.is_zero():
                            continue
                        uu = [0] * dim
                        uu[i] += 1
                        uu[j] += 1
                        uu[k] += 1
                        key = (0, tuple(uu), ())
                        term = (v * dmf).scale(w)
                        expect[key] = expect.get(key, Polynomial.zero(dim)) + term
    expect = {kk: vv for kk, vv in expect.items() if not vv.is_zero()}
    rhs24 = WeylForm(dim, expect).scale(GaussianRational(Fraction(-1, 24)))
    checks.append(_check_forms(
        "transport.cubic-curvature-term", ta, rhs24,
        "one curvature transport of a linear section"))

    # the central transport form: B = delta_inv((i/hbar) y-free(u o u))
    b_central = delta_inv(i_over_hbar(moyal(u, u, geom).y_free()))
    b_expect = y_dx_form(p_lower.scale(GaussianRational(Fraction(-1, 64))), hpow=2)
    checks.append(_check_forms(
        "transport.central-curvature-form", b_central, b_expect,
        "curvature square channels into the pair tensor"))

    # beta bridge: the n = 0 propagation form equals -P/32
    checks.append(IdentityCheck(
        "propagation.curvature-square-bridge",
        "0" if beta_form(0, geom) == p_lower.scale(Fraction(-1, 32)) else "mismatch",
        beta_form(0, geom) == p_lower.scale(Fraction(-1, 32)),
        "two-form of the curvature transport square"))

    # identity (pair product of two transported sections)
    lhs1 = sigma(moyal(ta, tb, geom))
    rhs1 = _grad_pair_series(p_upper, f, g,
                             GaussianRational(0, Fraction(-1, 576)), 3)
    checks.append(_check_series(
        "onediff.transport-pair-product", lhs1, rhs1,
        "sigma of transported-section pair"))

    # identity (double transport against an untouched section)
    lhs2 = sigma(moyal(transport(ta), b1, geom)) \
        + sigma(moyal(a1, transport(tb), geom))
    rhs2 = _grad_pair_series(p_upper, f, g,
                             GaussianRational(0, Fraction(-1, 96)), 3)
    checks.append(_check_series(
        "onediff.double-transport", lhs2, rhs2,
        "twice-transported section against a plain one"))

    # identity (central form against plain sections)
    def central_transport(lin):
        return delta_inv(i_over_hbar(odd_bracket(b_central, lin, geom)))

    lhs3 = sigma(moyal(central_transport(a1), b1, geom)) \
        + sigma(moyal(a1, central_transport(b1), geom))
    rhs3 = _grad_pair_series(p_upper, f, g,
                             GaussianRational(0, Fraction(-1, 64)), 3)
    checks.append(_check_series(
        "onediff.central-form-transport", lhs3, rhs3,
        "central curvature form against plain sections"))

    # ratio checks, independent of the pair-tensor normalization
    base = lhs1.coeff(3, Polynomial.zero(dim))
    six = lhs2.coeff(3, Polynomial.zero(dim))
    nine = lhs3.coeff(3, Polynomial.zero(dim))
    if base.is_zero():
        checks.append(IdentityCheck(
            "onediff.ratio-checks", "degenerate", True,
            "pair product vanished; ratios not informative"))
    else:
        ok6 = six == base.scale(GaussianRational(6))
        ok9 = nine == base.scale(GaussianRational(9))
        checks.append(IdentityCheck(
            "onediff.ratio-double-over-pair",
            "0" if ok6 else str(six - base.scale(GaussianRational(6))), ok6,
            "double transport is six times the pair product"))
        checks.append(IdentityCheck(
            "onediff.ratio-central-over-pair",
            "0" if ok9 else str(nine - base.scale(GaussianRational(9))), ok9,
            "central form is nine times the pair product"))
    return checks
