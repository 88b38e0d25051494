"""Star products from flat sections of the Weyl bundle.

Given a chart and a central curvature perturbation, the module solves the
two fixed-point equations

    r = delta_inv(Q) + delta_inv(par r + (i/hbar) r o r),
    a = f + delta_inv(par a + (i/hbar) [r, a]),

where Q collects the curvature two-form of the connection and the central
perturbation terms hbar^k alpha_k.  Both right-hand sides raise filtration
degree, so sweeping degrees converges after at most cap+1 passes; the solver
iterates incrementally, updating the nonlinear terms only by the newly fixed
slice.  The product of two observables is then

    f * g = sigma(section(f) o section(g)),

read off order by order in hbar.  With a degree cap D the section of f is
exact through degree D-2, so a cap of 2N+2 delivers every product
coefficient through hbar^N exactly; the comfort margin is asserted by a
cap-sensitivity test rather than trusted.

The module also houses the scalar sequences sigma_p, kappa_p, c_p that
govern the perturbation series in the flat/constant case: they satisfy

    sigma_1 = 1/2,  sigma_n = 1/2 * sum_{l+m=n} sigma_l sigma_m,
    kappa_0 = 1,    kappa_n = sum_{l+m=n, m>=1} kappa_l sigma_m,
    c_n = 1/2 * sum_{l+m=n} kappa_l kappa_m,

whose generating functions are 1 - sqrt(1-x), 1/sqrt(1-x) and 1/(2(1-x));
independent Taylor-coefficient routines are provided so the recursions can
be cross-checked rather than trusted.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import HbarSeries, Polynomial
from .tensors import TensorSeries, is_closed
from .weyl import (WeylForm, central_two_form, delta_inv, i_over_hbar, moyal,
                   moyal_sigma, odd_bracket)
from .geometry import cov_ext_deriv

__all__ = [
    "WeylCurvatureSpec",
    "PerturbationError",
    "ConvergenceError",
    "solve_r",
    "flat_section",
    "abelian_residual",
    "curvature_residual",
    "StarResult",
    "StarEngine",
    "star",
    "CoeffTable",
    "coeff_sequences",
    "taylor_one_minus_sqrt",
    "taylor_inv_sqrt",
    "taylor_half_geometric",
]


class PerturbationError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class WeylCurvatureSpec:
    """A chart together with a central perturbation of its curvature input.

    The perturbation is a finite hbar-polynomial of covariant two-forms,
    each coefficient skew and closed, with no hbar^0 part.  It enters the
    r-equation as the central Weyl form  sum_k hbar^k alpha_k.
    """

    def __init__(self, geometry, perturbation=None):
        self.geometry = geometry
        if perturbation is not None and perturbation.is_zero():
            perturbation = None
        if perturbation is not None:
            if perturbation.variance != "lower":
                raise PerturbationError("perturbation must be covariant")
            if perturbation.dim != geometry.dim:
                raise PerturbationError("perturbation dim does not match chart")
            for k, t in perturbation.hs.coeffs.items():
                if k == 0:
                    raise PerturbationError("perturbation must have no hbar^0 part")
                if not t.is_skew():
                    raise PerturbationError("perturbation coefficient at hbar^%d is not skew" % k)
                if not is_closed(t):
                    raise PerturbationError("perturbation coefficient at hbar^%d is not closed" % k)
        self.perturbation = perturbation

    @property
    def dim(self):
        return self.geometry.dim

    @property
    def is_perturbed(self):
        return self.perturbation is not None

    def min_k(self):
        """Lowest hbar power carrying a perturbation, or None."""
        return self.perturbation.min_power() if self.is_perturbed else None

    def is_flat_constant(self):
        """Flat connection and constant perturbation coefficients."""
        if not self.geometry.is_flat():
            return False
        if not self.is_perturbed:
            return True
        return all(t.is_constant() for t in self.perturbation.hs.coeffs.values())

    def unperturbed(self):
        return WeylCurvatureSpec(self.geometry)

    def alpha_series(self, order):
        """The perturbation as a TensorSeries truncated/extended to ``order``."""
        if not self.is_perturbed:
            return TensorSeries(self.dim, "lower", HbarSeries(order, {}))
        return self.perturbation.with_order(order)

    def q_form(self, cap):
        """The curvature source: the Weyl curvature two-form plus the
        central terms hbar^k alpha_k, truncated at the degree cap."""
        geom = self.geometry
        q = WeylForm.zero(self.dim, cap)
        if not geom.is_flat():
            q = q + geom.curvature().weyl_two_form.capped(cap)
        if self.is_perturbed:
            for k, t in sorted(self.perturbation.hs.coeffs.items()):
                if cap is not None and 2 * k > cap:
                    continue
                q = q + central_two_form(t, hpow=k, cap=cap)
        return q

    def __repr__(self):
        return "WeylCurvatureSpec(dim=%d, flat=%s, perturbed=%s)" % (
            self.dim, self.geometry.is_flat(), self.is_perturbed)


def _i_over_hbar_or_zero(a):
    return a if a.is_zero() else i_over_hbar(a)


def solve_r(spec, cap, max_passes=None):
    """Solve  r = delta_inv(Q + par r + (i/hbar) r o r)  through the cap.

    Returns the unique fixed point with delta_inv(r) = 0 and lowest degree 3,
    exact through filtration degree cap - 1 (degree-cap terms of the source
    would need products just above the cap).  Raises ConvergenceError if a
    sweep fails to stabilize within cap+2 passes, which would mean some
    operator stopped raising degree.
    """
    if cap < 3:
        raise ValueError("degree cap must be at least 3")
    geom = spec.geometry
    q = spec.q_form(cap)
    r = WeylForm.zero(spec.dim, cap)
    body = q  # Q + par r + (i/hbar) r o r for the current r
    limit = cap + 2 if max_passes is None else max_passes
    passes = 0
    while True:
        cand = delta_inv(body)
        step = cand - r
        if step.is_zero():
            break
        passes += 1
        if passes > limit:
            raise ConvergenceError(
                "r-recursion did not stabilize within %d passes" % limit)
        upd = cov_ext_deriv(step, geom)
        cross = odd_bracket(r, step, geom) + moyal(step, step, geom, parity=1)
        upd = upd + _i_over_hbar_or_zero(cross)
        body = body + upd
        r = r + step
    if not delta_inv(r).is_zero():
        raise ConvergenceError("fixed point violates the delta_inv(r) = 0 gauge")
    if not r.is_zero() and r.min_degree() < 3:
        raise ConvergenceError("fixed point has terms below degree 3")
    return r


def flat_section(f, spec, r, cap):
    """Solve  a = f + delta_inv(par a + (i/hbar) [r, a])  through the cap.

    ``f`` is a polynomial observable or an hbar-series of polynomials; the
    recursion is hbar-linear, so a series input needs one solve, not one per
    coefficient.  The result is the section of the flattened connection with
    scalar part f, exact through degree cap - 2.
    """
    geom = spec.geometry
    if isinstance(f, Polynomial):
        f = HbarSeries(cap // 2, {0: f})
    base = WeylForm.from_series(f, spec.dim, cap)
    a = WeylForm.zero(spec.dim, cap)
    body = WeylForm.zero(spec.dim, cap)  # par a + (i/hbar) [r, a]
    limit = cap + 2
    passes = 0
    use_r = not r.is_zero()
    while True:
        cand = base + delta_inv(body)
        step = cand - a
        if step.is_zero():
            break
        passes += 1
        if passes > limit:
            raise ConvergenceError(
                "section recursion did not stabilize within %d passes" % limit)
        upd = cov_ext_deriv(step, geom)
        if use_r:
            upd = upd + _i_over_hbar_or_zero(odd_bracket(r, step, geom))
        body = body + upd
        a = a + step
    return a


def abelian_residual(a, spec, r, drop_above=None):
    """D a = par a - delta a + (i/hbar)[r, a]: zero on flat sections.

    With capped inputs the bracket part is only trustworthy through degree
    cap - 2; pass ``drop_above`` to truncate the residual accordingly.
    """
    from .weyl import delta as _delta
    out = cov_ext_deriv(a, spec.geometry) - _delta(a)
    if not r.is_zero():
        out = out + _i_over_hbar_or_zero(odd_bracket(r, a, spec.geometry))
    if drop_above is not None:
        out = out.capped(drop_above)
    return out


def curvature_residual(r, spec, drop_above=None):
    """delta r - (Q + par r + (i/hbar) r o r): the defining equation of r."""
    from .weyl import delta as _delta
    geom = spec.geometry
    cap = r.cap
    body = spec.q_form(cap) + cov_ext_deriv(r, geom)
    sq = moyal(r, r, geom, parity=1)
    body = body + _i_over_hbar_or_zero(sq)
    out = _delta(r) - body
    if drop_above is not None:
        out = out.capped(drop_above)
    return out


class StarResult:
    """An evaluated product expansion: coeffs[n] is the full hbar^n term."""

    __slots__ = ("f", "g", "order", "coeffs")

    def __init__(self, f, g, order, coeffs):
        self.f = f
        self.g = g
        self.order = order
        self.coeffs = {n: p for n, p in coeffs.items() if not p.is_zero()}

    def coeff(self, n):
        p = self.coeffs.get(n)
        return p if p is not None else Polynomial.zero(self.f.dim)

    def as_series(self):
        return HbarSeries(self.order, dict(self.coeffs))

    def rows(self):
        return [(n, str(self.coeff(n))) for n in range(self.order + 1)]

    def __str__(self):
        return "\n".join("hbar^%d: %s" % row for row in self.rows())

    def __repr__(self):
        return "StarResult(order=%d, %d nonzero coefficients)" % (
            self.order, len(self.coeffs))


class StarEngine:
    """Caches the r-solution and sections for one curvature spec and order."""

    def __init__(self, spec, order, cap=None):
        if order < 1:
            raise ValueError("order must be at least 1")
        self.spec = spec
        self.order = order
        self.cap = 2 * order + 2 if cap is None else cap
        self._r = None
        self._sections = {}

    def r(self):
        if self._r is None:
            self._r = solve_r(self.spec, self.cap)
        return self._r

    @staticmethod
    def _key(f):
        if isinstance(f, Polynomial):
            return str(f)
        return tuple((n, str(p)) for n, p in sorted(f.coeffs.items()))

    def section(self, f):
        key = self._key(f)
        a = self._sections.get(key)
        if a is None:
            a = flat_section(f, self.spec, self.r(), self.cap)
            self._sections[key] = a
        return a

    def product_series(self, f, g):
        """sigma(section(f) o section(g)) through the engine order."""
        a = self.section(f)
        b = self.section(g)
        return moyal_sigma(a, b, self.spec.geometry, order=self.order)

    def star(self, f, g):
        hs = self.product_series(f, g)
        return StarResult(f, g, self.order, dict(hs.coeffs))

    def star_series(self, fs, gs):
        """Product of two hbar-series observables, as an hbar-series."""
        return self.product_series(fs, gs)


def star(f, g, spec, order):
    """One-shot product expansion; build a StarEngine to amortize solves."""
    return StarEngine(spec, order).star(f, g)


# -- scalar coefficient sequences ----------------------------------------------------


class CoeffTable:
    """The sequences sigma_p, kappa_p, c_p as exact rationals."""

    __slots__ = ("limit", "sigma", "kappa", "c", "cross_checked")

    def __init__(self, limit, sigma, kappa, c, cross_checked=False):
        self.limit = limit
        self.sigma = sigma
        self.kappa = kappa
        self.c = c
        self.cross_checked = cross_checked

    def rows(self):
        out = []
        for n in range(self.limit + 1):
            out.append((n,
                        self.sigma.get(n, Fraction(0)),
                        self.kappa[n],
                        self.c[n]))
        return out

    def __str__(self):
        lines = ["%3s  %-12s %-12s %-8s" % ("n", "sigma_n", "kappa_n", "c_n")]
        for n, s, k, c in self.rows():
            lines.append("%3d  %-12s %-12s %-8s" % (n, s, k, c))
        return "\n".join(lines)


def coeff_sequences(limit, cross_check=True):
    """Compute sigma, kappa, c by their recursions up to ``limit``.

    With ``cross_check`` the values are compared against independent Taylor
    expansions of the generating functions; a mismatch raises
    ArithmeticError (it would mean one of the two routes is wrong).
    """
    if limit < 1:
        raise ValueError("limit must be at least 1")
    half = Fraction(1, 2)
    sig = {1: half}
    for n in range(2, limit + 1):
        sig[n] = half * sum(sig[l] * sig[n - l] for l in range(1, n))
    kap = {0: Fraction(1)}
    for n in range(1, limit + 1):
        kap[n] = sum(kap[n - m] * sig[m] for m in range(1, n + 1))
    c = {n: half * sum(kap[l] * kap[n - l] for l in range(0, n + 1))
         for n in range(0, limit + 1)}
    table = CoeffTable(limit, sig, kap, c)
    if cross_check:
        s_or = taylor_one_minus_sqrt(limit)
        k_or = taylor_inv_sqrt(limit)
        c_or = taylor_half_geometric(limit)
        for n in range(1, limit + 1):
            if sig[n] != s_or[n]:
                raise ArithmeticError("sigma_%d disagrees with its Taylor expansion" % n)
        for n in range(0, limit + 1):
            if kap[n] != k_or[n]:
                raise ArithmeticError("kappa_%d disagrees with its Taylor expansion" % n)
            if c[n] != c_or[n]:
                raise ArithmeticError("c_%d disagrees with its Taylor expansion" % n)
        table.cross_checked = True
    return table


def _sqrt_one_minus(limit):
    """Taylor coefficients of sqrt(1-x) from squaring: s*s = 1 - x."""
    s = [Fraction(1)]
    for n in range(1, limit + 1):
        target = Fraction(-1) if n == 1 else Fraction(0)
        conv = sum(s[j] * s[n - j] for j in range(1, n))
        s.append((target - conv) / 2)
    return s


def taylor_one_minus_sqrt(limit):
    """Taylor coefficients of 1 - sqrt(1-x) (index 0 is 0)."""
    s = _sqrt_one_minus(limit)
    return [Fraction(0)] + [-v for v in s[1:]]


def taylor_inv_sqrt(limit):
    """Taylor coefficients of 1/sqrt(1-x), via the series reciprocal."""
    s = _sqrt_one_minus(limit)
    x = [Fraction(1)]
    for n in range(1, limit + 1):
        x.append(-sum(s[j] * x[n - j] for j in range(1, n + 1)))
    return x


def taylor_half_geometric(limit):
    """Taylor coefficients of 1/(2(1-x)), via the reciprocal of (1-x)."""
    g = [Fraction(1)]
    for n in range(1, limit + 1):
        # reciprocal of 1 - x: g_n = -(coefficients of 1-x beyond 0) convolved
        g.append(g[n - 1])
    return [v / 2 for v in g]
