"""Coordinate tensors on a chart and the bilinear contractions between them.

``Tensor2`` holds a rank-2 tensor with polynomial entries and an explicit
variance tag: ``"lower"`` for two covariant indices (2-forms, metrics-like
objects) and ``"upper"`` for two contravariant indices (bivectors).  The
diamond contraction couples two like-variance tensors through the structure
matrix of the chart:

    lower:  (a <> b)_ij  =  sum_rs  wbar^{rs} a_{ri} b_{sj}
    upper:  (A <> B)^ij  =  sum_rs  w_{rs}  A^{ri} B^{sj}

where w is the symplectic matrix and wbar its inverse.  ``mu`` and ``mu_inv``
raise and lower both indices at once:

    mu(a)^{ij}     = - wbar^{ir} wbar^{js} a_{rs}
    mu_inv(A)_{ij} = - w_{ir} w_{js} A^{rs}

``formal_poisson`` assembles the deformed bivector series from a perturbation
of the symplectic form, and ``series_inverse`` inverts a form-valued series
order by order; the two must agree, which the tests exploit as a dual-route
check.
"""

from __future__ import annotations

from .algebra import GaussianRational, HbarSeries, Polynomial, ONE, ZERO

__all__ = [
    "Tensor2",
    "Tensor3",
    "TensorSeries",
    "VarianceError",
    "SingularMatrixError",
    "diamond",
    "diamond_power",
    "mu",
    "mu_inv",
    "schouten",
    "two_form_d",
    "is_closed",
    "formal_poisson",
    "series_inverse",
    "series_diamond",
    "series_schouten",
    "invert_scalar_matrix",
]


class VarianceError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


def _coerce_poly(dim, v):
    if isinstance(v, Polynomial):
        if v.dim != dim:
            raise ValueError("entry dim mismatch")
        return v
    return Polynomial.constant(dim, v)


class Tensor2:
    """Rank-2 tensor with Polynomial entries and a variance tag."""

    __slots__ = ("dim", "variance", "rows")

    def __init__(self, dim, variance, rows):
        if variance not in ("lower", "upper"):
            raise VarianceError("variance must be 'lower' or 'upper'")
        if len(rows) != dim or any(len(r) != dim for r in rows):
            raise ValueError("rows must form a %d x %d matrix" % (dim, dim))
        self.dim = dim
        self.variance = variance
        self.rows = tuple(tuple(_coerce_poly(dim, v) for v in r) for r in rows)

    @classmethod
    def zeros(cls, dim, variance):
        z = Polynomial.zero(dim)
        return cls(dim, variance, [[z] * dim for _ in range(dim)])

    @classmethod
    def from_function(cls, dim, variance, fn):
        return cls(dim, variance, [[fn(i, j) for j in range(dim)] for i in range(dim)])

    def entry(self, i, j):
        return self.rows[i][j]

    # -- linear structure ---------------------------------------------------

    def _check(self, other):
        if self.dim != other.dim:
            raise ValueError("tensor dims differ")
        if self.variance != other.variance:
            raise VarianceError("tensor variances differ: %s vs %s" % (self.variance, other.variance))

    def __add__(self, other):
        self._check(other)
        return Tensor2(self.dim, self.variance,
                       [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        return Tensor2(self.dim, self.variance,
                       [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda p: -p)

    def scale(self, c):
        return self.map(lambda p: p.scale(c))

    def map(self, fn, variance=None):
        return Tensor2(self.dim, variance or self.variance,
                       [[fn(v) for v in r] for r in self.rows])

    def transpose(self):
        return Tensor2(self.dim, self.variance,
                       [[self.rows[j][i] for j in range(self.dim)] for i in range(self.dim)])

    # -- predicates -----------------------------------------------------------

    def is_zero(self):
        return all(v.is_zero() for r in self.rows for v in r)

    def is_skew(self):
        for i in range(self.dim):
            if not self.rows[i][i].is_zero():
                return False
            for j in range(i):
                if self.rows[i][j] != -self.rows[j][i]:
                    return False
        return True

    def is_constant(self):
        return all(v.is_constant() for r in self.rows for v in r)

    def constant_rows(self):
        if not self.is_constant():
            raise ValueError("tensor entries are not constant")
        return [[v.constant_value() for v in r] for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, Tensor2):
            return NotImplemented
        return (self.dim, self.variance, self.rows) == (other.dim, other.variance, other.rows)

    def __hash__(self):
        return hash((self.dim, self.variance, self.rows))

    # -- evaluation -------------------------------------------------------------

    def pair(self, f, g):
        """Apply an upper tensor to two observables: sum A^{ij} d_i f d_j g."""
        if self.variance != "upper":
            raise VarianceError("pairing requires an upper tensor")
        df = [f.partial(i) for i in range(self.dim)]
        dg = [g.partial(j) for j in range(self.dim)]
        out = Polynomial.zero(self.dim)
        for i in range(self.dim):
            if df[i].is_zero():
                continue
            for j in range(self.dim):
                v = self.rows[i][j]
                if v.is_zero() or dg[j].is_zero():
                    continue
                out = out + v * df[i] * dg[j]
        return out

    def to_strs(self):
        """Dense row-major matrix of canonical polynomial strings."""
        return [[str(v) for v in r] for r in self.rows]

    def __str__(self):
        return "[" + "; ".join(", ".join(str(v) for v in r) for r in self.rows) + "]"

    def __repr__(self):
        return "Tensor2(%d, %s, %s)" % (self.dim, self.variance, self)


class Tensor3:
    """Fully antisymmetric rank-3 tensor, stored on strictly increasing triples."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim, entries=None):
        self.dim = dim
        clean = {}
        for (i, j, k), v in (entries or {}).items():
            if not (0 <= i < j < k < dim):
                raise ValueError("triple (%d,%d,%d) must be strictly increasing" % (i, j, k))
            v = _coerce_poly(dim, v)
            if not v.is_zero():
                clean[(i, j, k)] = v
        self.entries = clean

    def entry(self, i, j, k):
        if len({i, j, k}) < 3:
            return Polynomial.zero(self.dim)
        order = sorted([i, j, k])
        v = self.entries.get(tuple(order))
        if v is None:
            return Polynomial.zero(self.dim)
        sign = _perm_sign((i, j, k))
        return v if sign == 1 else -v

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, Tensor3):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def __repr__(self):
        body = ", ".join("(%d,%d,%d): %s" % (i + 1, j + 1, k + 1, v)
                         for (i, j, k), v in sorted(self.entries.items()))
        return "Tensor3(%d, {%s})" % (self.dim, body)


def _perm_sign(triple):
    i, j, k = triple
    sign = 1
    if i > j:
        i, j = j, i
        sign = -sign
    if j > k:
        j, k = k, j
        sign = -sign
    if i > j:
        i, j = j, i
        sign = -sign
    return sign


# -- structure-matrix contractions ------------------------------------------


def diamond(a, b, geom):
    """Diamond contraction of two like-variance tensors through the chart."""
    if not isinstance(a, Tensor2) or not isinstance(b, Tensor2):
        raise TypeError("diamond expects Tensor2 operands")
    a._check(b)
    if a.dim != geom.dim:
        raise ValueError("tensor dim does not match chart dim")
    pairs = geom.omega_bar_pairs if a.variance == "lower" else geom.omega_pairs
    dim = a.dim
    out = [[Polynomial.zero(dim) for _ in range(dim)] for _ in range(dim)]
    for r, s, w in pairs:
        arow = a.rows[r]
        brow = b.rows[s]
        for i in range(dim):
            ari = arow[i]
            if ari.is_zero():
                continue
            ari_w = ari.scale(w)
            for j in range(dim):
                if brow[j].is_zero():
                    continue
                out[i][j] = out[i][j] + ari_w * brow[j]
    return Tensor2(dim, a.variance, out)


def diamond_power(a, n, geom):
    """n-fold diamond power a <> (a <> (... <> a)); requires n >= 1 and skew a."""
    if n < 1:
        raise ValueError("diamond power requires n >= 1")
    out = a
    for _ in range(n - 1):
        out = diamond(a, out, geom)
    return out


def mu(alpha, geom):
    """Raise both indices of a lower tensor: mu(a)^{ij} = -wbar^{ir} wbar^{js} a_{rs}."""
    if alpha.variance != "lower":
        raise VarianceError("mu expects a lower tensor")
    wbar = geom.omega_bar.rows
    dim = alpha.dim
    out = [[Polynomial.zero(dim) for _ in range(dim)] for _ in range(dim)]
    for r, s, _w in _nonzero_positions(alpha):
        ars = alpha.rows[r][s]
        for i in range(dim):
            wir = wbar[i][r]
            if wir.is_zero():
                continue
            for j in range(dim):
                wjs = wbar[j][s]
                if wjs.is_zero():
                    continue
                out[i][j] = out[i][j] - wir * wjs * ars
    return Tensor2(dim, "upper", out)


def mu_inv(A, geom):
    """Lower both indices of an upper tensor: mu_inv(A)_{ij} = -w_{ir} w_{js} A^{rs}."""
    if A.variance != "upper":
        raise VarianceError("mu_inv expects an upper tensor")
    w = geom.omega.rows
    dim = A.dim
    out = [[Polynomial.zero(dim) for _ in range(dim)] for _ in range(dim)]
    for r, s, _w in _nonzero_positions(A):
        ars = A.rows[r][s]
        for i in range(dim):
            wir = w[i][r]
            if wir.is_zero():
                continue
            for j in range(dim):
                wjs = w[j][s]
                if wjs.is_zero():
                    continue
                out[i][j] = out[i][j] - wir * wjs * ars
    return Tensor2(dim, "lower", out)


def _nonzero_positions(t):
    for r in range(t.dim):
        for s in range(t.dim):
            v = t.rows[r][s]
            if not v.is_zero():
                yield r, s, v


# -- brackets and derivatives --------------------------------------------------


def schouten(A, B):
    """Schouten bracket of two skew upper tensors, as a rank-3 tensor.

    [A,B]^{ijk} is the cyclic sum over (i,j,k) of
    A^{li} d_l B^{jk} + B^{li} d_l A^{jk}; for skew inputs the cyclic sum is
    already fully antisymmetric.
    """
    if A.variance != "upper" or B.variance != "upper":
        raise VarianceError("schouten expects upper tensors")
    A._check(B)
    dim = A.dim
    out = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(j + 1, dim):
                v = _schouten_component(A, B, i, j, k)
                if not v.is_zero():
                    out[(i, j, k)] = v
    return Tensor3(dim, out)


def _schouten_component(A, B, i, j, k):
    dim = A.dim
    out = Polynomial.zero(dim)
    for (c0, c1, c2) in ((i, j, k), (j, k, i), (k, i, j)):
        for l in range(dim):
            a = A.rows[l][c0]
            b = B.rows[c1][c2]
            if not a.is_zero():
                d = b.partial(l)
                if not d.is_zero():
                    out = out + a * d
            a2 = B.rows[l][c0]
            if not a2.is_zero():
                d2 = A.rows[c1][c2].partial(l)
                if not d2.is_zero():
                    out = out + a2 * d2
    return out


def two_form_d(alpha):
    """Exterior derivative of a lower skew tensor: (d a)_{ijk} = d_i a_{jk} - d_j a_{ik} + d_k a_{ij}."""
    if alpha.variance != "lower":
        raise VarianceError("exterior derivative expects a lower tensor")
    dim = alpha.dim
    out = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(j + 1, dim):
                v = (alpha.rows[j][k].partial(i)
                     - alpha.rows[i][k].partial(j)
                     + alpha.rows[i][j].partial(k))
                if not v.is_zero():
                    out[(i, j, k)] = v
    return Tensor3(dim, out)


def is_closed(alpha):
    return two_form_d(alpha).is_zero()


# -- hbar series of tensors ------------------------------------------------------


class TensorSeries:
    """Truncated hbar-series whose coefficients are like-variance tensors."""

    __slots__ = ("dim", "variance", "hs")

    def __init__(self, dim, variance, hs):
        if variance not in ("lower", "upper"):
            raise VarianceError("variance must be 'lower' or 'upper'")
        for n, t in hs.coeffs.items():
            if not isinstance(t, Tensor2) or t.dim != dim or t.variance != variance:
                raise VarianceError("series coefficient at order %d has wrong shape" % n)
        self.dim = dim
        self.variance = variance
        self.hs = hs

    @classmethod
    def from_terms(cls, dim, variance, order, terms):
        """Build from an iterable of (power, Tensor2) pairs; repeated powers add."""
        coeffs = {}
        for n, t in terms:
            coeffs[n] = coeffs[n] + t if n in coeffs else t
        return cls(dim, variance, HbarSeries(order, coeffs))

    @property
    def order(self):
        return self.hs.order

    def coeff(self, n):
        return self.hs.coeff(n, Tensor2.zeros(self.dim, self.variance))

    def powers(self):
        return sorted(self.hs.coeffs)

    def __add__(self, other):
        self._check(other)
        return TensorSeries(self.dim, self.variance, self.hs + other.hs)

    def __sub__(self, other):
        self._check(other)
        return TensorSeries(self.dim, self.variance, self.hs - other.hs)

    def _check(self, other):
        if self.dim != other.dim or self.variance != other.variance:
            raise VarianceError("tensor series are not compatible")

    def map_tensors(self, fn, variance=None):
        out = self.hs.map(fn)
        return TensorSeries(self.dim, variance or self.variance, out)

    def with_order(self, order):
        return TensorSeries(self.dim, self.variance, self.hs.truncate(order) if order < self.order
                            else self.hs.with_order(order))

    def min_power(self):
        return self.hs.min_power()

    def is_zero(self):
        return self.hs.is_zero()

    def __eq__(self, other):
        if not isinstance(other, TensorSeries):
            return NotImplemented
        return (self.dim, self.variance, self.hs) == (other.dim, other.variance, other.hs)

    def __repr__(self):
        return "TensorSeries(%d, %s, %s)" % (self.dim, self.variance, self.hs)


def series_diamond(A, B, geom, order=None):
    A._check(B)
    hs = A.hs.convolve(B.hs, mul=lambda a, b: diamond(a, b, geom), order=order)
    return TensorSeries(A.dim, A.variance, hs)


def series_schouten(A, B, order=None):
    """Order-by-order Schouten bracket of two upper tensor series.

    Returns the HbarSeries of Tensor3 brackets; zero iff the series bracket
    vanishes through the truncation order.
    """
    if order is None:
        order = min(A.order, B.order)
    out = {}
    for n1, t1 in A.hs.coeffs.items():
        for n2, t2 in B.hs.coeffs.items():
            n = n1 + n2
            if n > order:
                continue
            v = schouten(t1, t2)
            out[n] = _t3_add(out[n], v) if n in out else v
    return HbarSeries(order, out)


def _t3_add(a, b):
    entries = dict(a.entries)
    for key, v in b.entries.items():
        s = entries[key] + v if key in entries else v
        if s.is_zero():
            entries.pop(key, None)
        else:
            entries[key] = s
    return Tensor3(a.dim, entries)


def formal_poisson(perturbation, geom, order):
    """Deformed bivector series for the Weyl curvature w + a^hbar.

    Given the lower perturbation series a^hbar (no hbar^0 part, skew
    coefficients), returns

        wbar  -  sum_{p >= 1} (mu(a^hbar))^{<> p}

    truncated at ``order``.  For closed perturbations the output is a formal
    Poisson bivector; for any perturbation it inverts w + a^hbar, which
    ``series_inverse`` checks independently.
    """
    if perturbation.variance != "lower":
        raise VarianceError("perturbation must be a lower tensor series")
    if perturbation.dim != geom.dim:
        raise ValueError("perturbation dim does not match chart dim")
    zero_part = perturbation.hs.coeff(0)
    if zero_part is not None and not zero_part.is_zero():
        raise ValueError("perturbation must start at hbar^1 or higher")
    for n, t in perturbation.hs.coeffs.items():
        if not t.is_skew():
            raise ValueError("perturbation coefficient at order %d is not skew" % n)

    abar = perturbation.with_order(order).map_tensors(lambda t: mu(t, geom), variance="upper")
    acc = TensorSeries(geom.dim, "upper", HbarSeries(order, {0: geom.omega_bar}))
    power = abar
    while not power.is_zero():
        acc = acc - power
        power = series_diamond(abar, power, geom, order)
    return acc


def series_inverse(omega_series, order):
    """Invert a lower tensor series order by order.

    The hbar^0 coefficient must be a constant invertible matrix.  Returns the
    upper series Obar with  O_{ij} Obar^{jk} = delta_i^k  through ``order``.
    """
    if omega_series.variance != "lower":
        raise VarianceError("series_inverse expects a lower tensor series")
    dim = omega_series.dim
    lead = omega_series.coeff(0)
    w0 = invert_scalar_matrix(lead.constant_rows())
    winv = Tensor2(dim, "upper", w0)
    inv = {0: winv}
    higher = {n: t for n, t in omega_series.hs.coeffs.items() if 0 < n <= order}
    for n in range(1, order + 1):
        acc = None
        for l, el in higher.items():
            if l > n:
                continue
            contrib = _mat_mul(el, inv[n - l])
            acc = contrib if acc is None else _mat_add(acc, contrib)
        if acc is None:
            inv[n] = Tensor2.zeros(dim, "upper")
        else:
            inv[n] = Tensor2(dim, "upper", [[-v for v in row] for row in _mat_mul_rows(w0, acc)])
    coeffs = {n: t for n, t in inv.items() if not t.is_zero()}
    return TensorSeries(dim, "upper", HbarSeries(order, coeffs))


def _mat_mul(a, b):
    """Matrix product of two Tensor2's entry grids (no variance bookkeeping)."""
    dim = a.dim
    return [[_dot(a.rows[i], [b.rows[k][j] for k in range(dim)]) for j in range(dim)]
            for i in range(dim)]


def _mat_mul_rows(scalar_rows, rows):
    dim = len(scalar_rows)
    out = []
    for i in range(dim):
        row = []
        for j in range(dim):
            acc = None
            for k in range(dim):
                c = scalar_rows[i][k]
                if not c:
                    continue
                v = rows[k][j].scale(c)
                acc = v if acc is None else acc + v
            row.append(acc if acc is not None else Polynomial.zero(dim))
        out.append(row)
    return out


def _mat_add(a, b):
    return [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(a, b)]


def _dot(row, col):
    acc = None
    for x, y in zip(row, col):
        if x.is_zero() or y.is_zero():
            continue
        v = x * y
        acc = v if acc is None else acc + v
    dim = row[0].dim
    return acc if acc is not None else Polynomial.zero(dim)


def invert_scalar_matrix(rows):
    """Exact inverse of a square GaussianRational matrix by elimination."""
    n = len(rows)
    a = [[GaussianRational.coerce(v) for v in r] for r in rows]
    inv = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        scale = a[col][col].inverse()
        a[col] = [v * scale for v in a[col]]
        inv[col] = [v * scale for v in inv[col]]
        for r in range(n):
            if r == col or not a[r][col]:
                continue
            factor = a[r][col]
            a[r] = [v - factor * w for v, w in zip(a[r], a[col])]
            inv[r] = [v - factor * w for v, w in zip(inv[r], inv[col])]
    return inv
