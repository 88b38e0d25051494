"""The Weyl algebra of a chart: polynomial fiber variables y^1..y^{2d} over
the base coordinates, formal powers of hbar, and antisymmetric dx factors.

A ``WeylForm`` is a finite sum of monomials

    c(x) * hbar^h * y^{u} * dx^{i_1} ^ ... ^ dx^{i_q}      (i_1 < ... < i_q)

stored sparsely as  (h, u, form) -> Polynomial.  The *filtration degree* of a
monomial is 2*h + |u|; an optional ``cap`` drops every monomial above a fixed
degree, which keeps the fixed-point recursions finite.

The fiberwise product is

    a o b   =  sum_k  a o_k b,
    a o_k b =  ((-i*hbar/2)^k / k!) * wbar^{r1 s1} ... wbar^{rk sk}
               * (d^k a / dy^{r1}..dy^{rk}) * (d^k b / dy^{s1}..dy^{sk}),

with dx factors multiplied by wedge.  Each graded piece preserves the
filtration degree of a product exactly, so a cap can be enforced pairwise.

Sign conventions for the chart operators:

    delta a      =  dx^k ^ (da/dy^k)
    delta_inv a  =  (1/(p+q)) y^k i(d/dx^k) a    on a piece with q = y-degree
                    and p = form degree (0 when p + q = 0)
    sigma a      =  the part with no y and no dx, as an hbar series.

``delta_inv`` divides by y-degree plus form degree; this normalization is the
one under which  a = sigma(a) + delta(delta_inv a) + delta_inv(delta a)
holds piecewise, which the recursion machinery depends on.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from .algebra import GaussianRational, HbarSeries, Polynomial, I, ONE

__all__ = [
    "WeylForm",
    "HbarDivisionError",
    "moyal",
    "moyal_graded",
    "moyal_sigma",
    "odd_bracket",
    "commutator",
    "delta",
    "delta_inv",
    "sigma",
    "exterior_d",
    "i_over_hbar",
    "wedge_merge",
    "pairing_table",
    "central_two_form",
    "y_dx_form",
    "y_gradient",
    "two_form_to_tensor",
]


class HbarDivisionError(ValueError):
    pass


_MINUS_I_HALF = GaussianRational(0, Fraction(-1, 2))


def wedge_merge(I1, I2):
    """Merge two strictly increasing index tuples under the wedge product.

    Returns (sign, merged) or None when an index repeats.
    """
    if not I1:
        return 1, I2
    if not I2:
        return 1, I1
    out = []
    sign = 1
    i = j = 0
    n1 = len(I1)
    while i < n1 and j < len(I2):
        a, b = I1[i], I2[j]
        if a == b:
            return None
        if a < b:
            out.append(a)
            i += 1
        else:
            out.append(b)
            j += 1
            if (n1 - i) % 2:
                sign = -sign
    out.extend(I1[i:])
    out.extend(I2[j:])
    return sign, tuple(out)


def pairing_table(entries, k, dim):
    """Rows (d, e, weight) describing all k-fold structure contractions.

    ``entries`` lists the nonzero (r, s, w) of the contraction matrix.  A row
    says: apply the y-derivative multi-index d on the left factor and e on the
    right, weighted by prod(w_t^{m_t}) / prod(m_t!) over the multiset of
    chosen entries.  The k = 0 table is the single trivial row.
    """
    rows = []
    for combo in itertools.combinations_with_replacement(range(len(entries)), k):
        d = [0] * dim
        e = [0] * dim
        w = ONE
        t_prev = None
        mult = 0
        for t in combo:
            r, s, wt = entries[t]
            d[r] += 1
            e[s] += 1
            if t == t_prev:
                mult += 1
            else:
                t_prev, mult = t, 1
            w = w * wt / mult
        rows.append((tuple(d), tuple(e), w))
    return rows


class WeylForm:
    """A Weyl-algebra-valued differential form, exact and sparse.

    ``cap`` is the maximum retained filtration degree (None keeps everything).
    Binary operations propagate the tighter cap of their operands.  Equality
    compares mathematical content only, not caps.
    """

    __slots__ = ("dim", "cap", "terms")

    def __init__(self, dim, terms=None, cap=None):
        self.dim = dim
        self.cap = cap
        clean = {}
        for (h, u, form), p in (terms or {}).items():
            if len(u) != dim:
                raise ValueError("y-exponent tuple of wrong length")
            if not isinstance(p, Polynomial):
                p = Polynomial.constant(dim, p)
            if p.is_zero():
                continue
            if cap is not None and 2 * h + sum(u) > cap:
                continue
            clean[(h, tuple(u), tuple(form))] = p
        self.terms = clean

    @classmethod
    def _make(cls, dim, terms, cap):
        w = object.__new__(cls)
        w.dim = dim
        w.cap = cap
        w.terms = terms
        return w

    @classmethod
    def zero(cls, dim, cap=None):
        return cls._make(dim, {}, cap)

    @classmethod
    def from_poly(cls, p, hpow=0, cap=None):
        key = (hpow, (0,) * p.dim, ())
        if p.is_zero() or (cap is not None and 2 * hpow > cap):
            return cls.zero(p.dim, cap)
        return cls._make(p.dim, {key: p}, cap)

    @classmethod
    def from_series(cls, hs, dim, cap=None):
        """Embed an hbar-series of base polynomials as a 0-form."""
        terms = {}
        for n, p in hs.coeffs.items():
            if p.is_zero():
                continue
            if cap is not None and 2 * n > cap:
                continue
            terms[(n, (0,) * dim, ())] = p
        return cls._make(dim, terms, cap)

    # -- linear structure ---------------------------------------------------

    def _merge_cap(self, other):
        if self.cap is None:
            return other.cap
        if other.cap is None:
            return self.cap
        return min(self.cap, other.cap)

    def __add__(self, other):
        if not isinstance(other, WeylForm):
            return NotImplemented
        if self.dim != other.dim:
            raise ValueError("weyl form dims differ")
        cap = self._merge_cap(other)
        out = {k: p for k, p in self.terms.items()
               if cap is None or 2 * k[0] + sum(k[1]) <= cap}
        for k, p in other.terms.items():
            if cap is not None and 2 * k[0] + sum(k[1]) > cap:
                continue
            prev = out.get(k)
            s = p if prev is None else prev + p
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return WeylForm._make(self.dim, out, cap)

    def __sub__(self, other):
        if not isinstance(other, WeylForm):
            return NotImplemented
        if self.dim != other.dim:
            raise ValueError("weyl form dims differ")
        cap = self._merge_cap(other)
        out = {k: p for k, p in self.terms.items()
               if cap is None or 2 * k[0] + sum(k[1]) <= cap}
        for k, p in other.terms.items():
            if cap is not None and 2 * k[0] + sum(k[1]) > cap:
                continue
            prev = out.get(k)
            s = (-p) if prev is None else prev - p
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return WeylForm._make(self.dim, out, cap)

    def __neg__(self):
        return WeylForm._make(self.dim,
                              {k: -p for k, p in self.terms.items()}, self.cap)

    def scale(self, c):
        c = GaussianRational.coerce(c)
        if not c:
            return WeylForm.zero(self.dim, self.cap)
        return WeylForm._make(self.dim, {k: p.scale(c) for k, p in self.terms.items()}, self.cap)

    def mul_poly(self, q):
        """Multiply every coefficient by a base polynomial."""
        out = {}
        for k, p in self.terms.items():
            v = p * q
            if not v.is_zero():
                out[k] = v
        return WeylForm._make(self.dim, out, self.cap)

    def mul_hbar(self, k=1):
        cap = self.cap
        out = {}
        for (h, u, form), p in self.terms.items():
            if cap is not None and 2 * (h + k) + sum(u) > cap:
                continue
            out[(h + k, u, form)] = p
        return WeylForm._make(self.dim, out, cap)

    def div_hbar(self, k=1):
        """Divide by hbar^k; every monomial must carry at least hbar^k."""
        out = {}
        for (h, u, form), p in self.terms.items():
            if h < k:
                raise HbarDivisionError("monomial with hbar^%d cannot be divided by hbar^%d" % (h, k))
            out[(h - k, u, form)] = p
        return WeylForm._make(self.dim, out, self.cap)

    def capped(self, cap):
        """Re-truncate to filtration degree <= cap and record the new cap."""
        out = {k: p for k, p in self.terms.items()
               if cap is None or 2 * k[0] + sum(k[1]) <= cap}
        return WeylForm._make(self.dim, out, cap)

    # -- structure queries ------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, WeylForm):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def min_degree(self):
        return min((2 * h + sum(u) for (h, u, _f) in self.terms), default=None)

    def homogeneous(self, n):
        """The filtration-degree-n part."""
        out = {k: p for k, p in self.terms.items() if 2 * k[0] + sum(k[1]) == n}
        return WeylForm._make(self.dim, out, self.cap)

    def form_degrees(self):
        return sorted({len(f) for (_h, _u, f) in self.terms})

    def split_form_degrees(self):
        parts = {}
        for k, p in self.terms.items():
            parts.setdefault(len(k[2]), {})[k] = p
        return {q: WeylForm._make(self.dim, t, self.cap) for q, t in parts.items()}

    def y_free(self):
        zero = (0,) * self.dim
        out = {k: p for k, p in self.terms.items() if k[1] == zero}
        return WeylForm._make(self.dim, out, self.cap)

    def max_hpow(self):
        return max((h for (h, _u, _f) in self.terms), default=0)

    # -- canonical text form -------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda k: (k[0], sum(k[1]), k[1], k[2]))
        parts = []
        for h, u, form in keys:
            p = self.terms[(h, u, form)]
            factors = []
            if h:
                factors.append("hbar^%d" % h)
            ps = str(p)
            bare = ps.lstrip("-")
            factors.append(ps if ("+" not in bare and "-" not in bare and not ps.startswith("-")) else "(%s)" % ps)
            for j, e in enumerate(u):
                if e:
                    factors.append("y%d" % (j + 1) + ("^%d" % e if e > 1 else ""))
            if form:
                factors.append("dx_{%s}" % ",".join(str(i + 1) for i in form))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return "WeylForm(%d, %s)" % (self.dim, self)


# -- the fiberwise product ------------------------------------------------------------


def _falling(u, d):
    out = 1
    for a, b in zip(u, d):
        if b:
            if b > a:
                return 0
            for t in range(b):
                out *= a - t
    return out


def moyal(a, b, geom, only_k=None, parity=None):
    """Fiberwise product a o b (or a filtered selection of graded pieces).

    ``only_k`` keeps a single o_k; ``parity`` (0 or 1) keeps only the even or
    odd graded pieces, which is all a graded commutator ever needs.
    """
    if a.dim != b.dim:
        raise ValueError("weyl form dims differ")
    if a.dim != geom.dim:
        raise ValueError("form dim does not match chart dim")
    cap = a._merge_cap(b)
    out = {}
    prefactors = _hbar_prefactors(max((sum(u) for (_h, u, _f) in a.terms), default=0))
    table = geom.moyal_table
    b_items = [(2 * hb + sum(ub), hb, ub, Ib, pb)
               for (hb, ub, Ib), pb in b.terms.items()]
    if cap is not None:
        b_items.sort(key=lambda t: t[0])
    for (ha, ua, Ia), pa in a.terms.items():
        qa = sum(ua)
        base_a = 2 * ha + qa
        for base_b, hb, ub, Ib, pb in b_items:
            if cap is not None and base_a + base_b > cap:
                break
            merged = wedge_merge(Ia, Ib)
            if merged is None:
                continue
            sign, IJ = merged
            kmax = min(qa, sum(ub))
            if only_k is not None:
                if only_k > kmax:
                    continue
                krange = (only_k,)
            elif parity is not None:
                krange = range(parity, kmax + 1, 2)
            else:
                krange = range(kmax + 1)
            pab = None
            for k in krange:
                pref = prefactors[k] if k < len(prefactors) else _MINUS_I_HALF ** k
                if sign < 0:
                    pref = -pref
                for d, e, w in table(k):
                    ff = _falling(ua, d)
                    if not ff:
                        continue
                    ff2 = _falling(ub, e)
                    if not ff2:
                        continue
                    if pab is None:
                        pab = pa * pb
                    c = pref * w * (ff * ff2)
                    key = (ha + hb + k,
                           tuple(x - y + z - t for x, y, z, t in zip(ua, d, ub, e)),
                           IJ)
                    v = pab.scale(c)
                    prev = out.get(key)
                    s = v if prev is None else prev + v
                    if s.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = s
    return WeylForm._make(a.dim, out, cap)


_PREFACTOR_CACHE = [ONE]


def _hbar_prefactors(kmax):
    while len(_PREFACTOR_CACHE) <= kmax:
        _PREFACTOR_CACHE.append(_PREFACTOR_CACHE[-1] * _MINUS_I_HALF)
    return _PREFACTOR_CACHE


def moyal_graded(a, b, k, geom):
    """The graded piece a o_k b alone (hbar prefactor included)."""
    return moyal(a, b, geom, only_k=k)


def odd_bracket(a, b, geom):
    """The graded commutator computed as 2 * sum of the odd graded pieces.

    For homogeneous form degrees the even pieces of [a, b] always cancel in
    pairs, so this equals ``commutator`` while doing a single product pass.
    The equality of the two routes is itself a tested identity.
    """
    return moyal(a, b, geom, parity=1).scale(GaussianRational(2))


def _exps_factorial(u):
    out = 1
    for e in u:
        if e > 1:
            out *= factorial(e)
    return out


def moyal_sigma(a, b, geom, order=None):
    """The scalar projection of a o b without building the full product.

    Only fully contracted pairs survive the projection: both monomials must
    be dx-free with equal y-degree k, and the single k-fold pairing that
    matches their exponents exactly contributes  prefactor * weight * u! * v!.
    """
    if a.dim != b.dim:
        raise ValueError("weyl form dims differ")
    if a.dim != geom.dim:
        raise ValueError("form dim does not match chart dim")
    cap = a._merge_cap(b)
    out = {}
    prefactors = _hbar_prefactors(max((sum(u) for (_h, u, _f) in a.terms), default=0))
    table_map = geom.moyal_table_map
    by_deg = {}
    for (hb, ub, Ib), pb in b.terms.items():
        if Ib:
            continue
        by_deg.setdefault(sum(ub), []).append((hb, ub, pb))
    for (ha, ua, Ia), pa in a.terms.items():
        if Ia:
            continue
        k = sum(ua)
        rows = by_deg.get(k)
        if rows is None:
            continue
        base_a = 2 * ha + k
        fa = _exps_factorial(ua)
        lookup = table_map(k)
        for hb, ub, pb in rows:
            if cap is not None and base_a + 2 * hb + k > cap:
                continue
            w = lookup.get((ua, ub))
            if w is None:
                continue
            c = prefactors[k] * w * (fa * _exps_factorial(ub))
            h = ha + hb + k
            v = (pa * pb).scale(c)
            prev = out.get(h)
            s = v if prev is None else prev + v
            if s.is_zero():
                out.pop(h, None)
            else:
                out[h] = s
    if order is None:
        order = cap // 2 if cap is not None else max(out, default=0)
        order = max(order, max(out, default=0))
    return HbarSeries(order, {h: p for h, p in out.items() if h <= order})


def commutator(a, b, geom):
    """Graded commutator [a, b] = a o b - (-1)^{q1 q2} b o a.

    Mixed form degrees are handled by splitting both operands into
    homogeneous pieces.
    """
    qa = a.form_degrees()
    qb = b.form_degrees()
    if len(qa) <= 1 and len(qb) <= 1:
        ab = moyal(a, b, geom)
        ba = moyal(b, a, geom)
        if qa and qb and (qa[0] * qb[0]) % 2:
            return ab + ba
        return ab - ba
    out = WeylForm.zero(a.dim, a._merge_cap(b))
    for q1, a1 in a.split_form_degrees().items():
        for q2, b1 in b.split_form_degrees().items():
            ab = moyal(a1, b1, geom)
            ba = moyal(b1, a1, geom)
            out = out + (ab + ba if (q1 * q2) % 2 else ab - ba)
    return out


def i_over_hbar(a):
    """Multiply by i and divide by hbar (every term must carry hbar)."""
    return a.div_hbar(1).scale(I)


# -- chart operators ---------------------------------------------------------------


def delta(a):
    """dx^k ^ (da/dy^k): trades one y for one dx, lowering degree by one."""
    out = {}
    for (h, u, form), p in a.terms.items():
        for k in range(a.dim):
            e = u[k]
            if not e:
                continue
            merged = wedge_merge((k,), form)
            if merged is None:
                continue
            sign, nf = merged
            nu = u[:k] + (e - 1,) + u[k + 1:]
            v = p.scale(e * sign)
            key = (h, nu, nf)
            prev = out.get(key)
            s = v if prev is None else prev + v
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return WeylForm._make(a.dim, out, a.cap)


def delta_inv(a):
    """The partial inverse of delta; kills pieces with no y and no dx."""
    out = {}
    cap = a.cap
    for (h, u, form), p in a.terms.items():
        q = sum(u)
        total = q + len(form)
        if total == 0:
            continue
        if cap is not None and 2 * h + q + 1 > cap:
            continue
        w = Fraction(1, total)
        for pos, k in enumerate(form):
            nu = u[:k] + (u[k] + 1,) + u[k + 1:]
            nf = form[:pos] + form[pos + 1:]
            c = w if pos % 2 == 0 else -w
            v = p.scale(c)
            key = (h, nu, nf)
            prev = out.get(key)
            s = v if prev is None else prev + v
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return WeylForm._make(a.dim, out, a.cap)


def sigma(a):
    """Project onto the center: the y-free, dx-free part, as an hbar series."""
    zero = (0,) * a.dim
    order = a.cap // 2 if a.cap is not None else max((h for (h, _u, _f) in a.terms), default=0)
    coeffs = {}
    for (h, u, form), p in a.terms.items():
        if u == zero and not form:
            coeffs[h] = p
    return HbarSeries(order, coeffs)


def exterior_d(a):
    """Exterior derivative in the base variables: dx^m ^ (da/dx^m)."""
    out = {}
    for (h, u, form), p in a.terms.items():
        for m in range(a.dim):
            dp = p.partial(m)
            if dp.is_zero():
                continue
            merged = wedge_merge((m,), form)
            if merged is None:
                continue
            sign, nf = merged
            if sign < 0:
                dp = -dp
            key = (h, u, nf)
            prev = out.get(key)
            s = dp if prev is None else prev + dp
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return WeylForm._make(a.dim, out, a.cap)


# -- builders bridging tensors and Weyl forms ------------------------------------------


def central_two_form(t, hpow=0, cap=None):
    """Embed a skew lower tensor as the central 2-form sum_{i<j} t_ij dx^i ^ dx^j."""
    terms = {}
    dim = t.dim
    zero = (0,) * dim
    for i in range(dim):
        for j in range(i + 1, dim):
            v = t.rows[i][j]
            if not v.is_zero():
                terms[(hpow, zero, (i, j))] = v
    return WeylForm(dim, terms, cap)


def y_dx_form(t, hpow=0, cap=None):
    """The one-form t_{ij} y^i dx^j from a lower tensor."""
    dim = t.dim
    terms = {}
    for i in range(dim):
        for j in range(dim):
            v = t.rows[i][j]
            if v.is_zero():
                continue
            u = tuple(1 if m == i else 0 for m in range(dim))
            key = (hpow, u, (j,))
            prev = terms.get(key)
            terms[key] = v if prev is None else prev + v
    return WeylForm(dim, terms, cap)


def y_gradient(f, cap=None):
    """The fiber-linear 0-form (df/dx^j) y^j of an observable."""
    dim = f.dim
    terms = {}
    for j in range(dim):
        d = f.partial(j)
        if d.is_zero():
            continue
        u = tuple(1 if m == j else 0 for m in range(dim))
        terms[(0, u, ())] = d
    return WeylForm._make(dim, terms, cap)


def two_form_to_tensor(a, hpow=0):
    """Extract the skew lower tensor of a y-free 2-form at a fixed hbar power.

    Inverse of ``central_two_form`` on its image.
    """
    from .tensors import Tensor2

    dim = a.dim
    zero = (0,) * dim
    rows = [[Polynomial.zero(dim) for _ in range(dim)] for _ in range(dim)]
    for (h, u, form), p in a.terms.items():
        if h != hpow or u != zero or len(form) != 2:
            raise ValueError("not a y-free 2-form at hbar^%d" % hpow)
        i, j = form
        rows[i][j] = rows[i][j] + p
        rows[j][i] = rows[j][i] - p
    return Tensor2(dim, "lower", rows)
