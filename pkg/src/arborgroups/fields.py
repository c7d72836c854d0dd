"""Exact arithmetic in F_p and the 2-power extensions F_{p^(2^d)}.

Preimages of a base-field point under iterates of z^2 + c are obtained by
repeated square roots, and each square root lives in at most a quadratic
extension.  Working depth-d trees therefore fit inside the single ambient
field F_{p^m} with m = 2^d, since the finite fields of 2-power degree
over F_p form one increasing chain.  One context object holds that field:
a deterministically chosen irreducible modulus, reduction tables, and a
square-root routine, so that every "pick a root" decision downstream is
reproducible.

Elements are coefficient vectors of length m over F_p, little-endian in
the residue class of the modulus variable.  The canonical total order is
lexicographic on that vector; "the" square root of a square, the chosen
zeta_4, and the chosen sqrt(2) are always the lex-smaller candidate.

The modulus is the lexicographically first monic irreducible polynomial
of degree m: candidates x^m + c_{m-1} x^(m-1) + ... + c_0 are scanned in
lex order of (c_0, ..., c_{m-1}); anything with c_0 = 0 is divisible by x
and skipped analytically.  Irreducibility for degree 2^t uses the Rabin
criterion, which for a 2-power degree needs only the full-degree Frobenius
fixed-point test plus one gcd condition at degree m/2.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

__all__ = ["FieldCtx", "FieldElement", "build_field"]


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class FieldElement:
    """One element of F_{p^m}, an immutable coefficient vector.

    Parameters
    ----------
    ctx : FieldCtx
        Ambient field.
    coeffs : sequence of int
        Little-endian coefficients, length ``ctx.m``; reduced mod p.
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        coeffs = tuple(int(c) % ctx.p for c in coeffs)
        if len(coeffs) != ctx.m:
            raise ValueError(
                f"expected {ctx.m} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.ctx.signature != self.ctx.signature:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.ctx.p
        return FieldElement(
            self.ctx, [(a + b) % p for a, b in zip(self.coeffs, other.coeffs)]
        )

    __radd__ = __add__

    def __neg__(self):
        p = self.ctx.p
        return FieldElement(self.ctx, [(-a) % p for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.ctx._mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, e):
        return self.ctx._pow(self, e)

    def inv(self):
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        return self.ctx._pow(self, self.ctx.q - 2)

    @property
    def is_zero(self):
        return not any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.from_int(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return (
            self.ctx.signature == other.ctx.signature
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.coeffs, self.ctx.signature))

    def __lt__(self, other):
        return self.coeffs < self._coerce(other).coeffs

    def __le__(self, other):
        return self.coeffs <= self._coerce(other).coeffs

    def __repr__(self):
        return f"FieldElement{self.coeffs}"


class FieldCtx:
    """The ambient field F_{p^m} with reduction tables and square roots.

    Instances are immutable once built; share freely across threads.
    Use :func:`build_field` rather than constructing directly.
    """

    def __init__(self, p, m, modulus):
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = tuple(int(c) % p for c in modulus[:-1]) + (1,)
        self.signature = (p, m, self.modulus)
        # red[k] = coefficient vector of x^(m+k) mod modulus, k = 0..m-2
        red = np.zeros((max(m - 1, 0), m), dtype=np.int64)
        if m >= 2:
            red[0] = [(-c) % p for c in self.modulus[:m]]
            for k in range(1, m - 1):
                shifted = np.zeros(m + 1, dtype=np.int64)
                shifted[1:] = red[k - 1]
                red[k] = (shifted[:m] + shifted[m] * red[0]) % p
        self._red = red
        self.zero = FieldElement(self, (0,) * m)
        self.one = FieldElement(self, (1,) + (0,) * (m - 1))
        t, e = self.q - 1, 0
        while t % 2 == 0:
            t //= 2
            e += 1
        self._ts_t, self._ts_e = t, e
        self._nonsquare = None
        self._zeta4 = ()
        self._sqrt2 = ()

    # -- construction helpers -------------------------------------------------

    def element(self, coeffs):
        return FieldElement(self, coeffs)

    def from_int(self, v):
        return FieldElement(self, (v,) + (0,) * (self.m - 1))

    def elements(self):
        """All field elements in canonical (lexicographic) order."""
        for coeffs in itertools.product(range(self.p), repeat=self.m):
            yield FieldElement(self, coeffs)

    # -- core arithmetic -------------------------------------------------------

    def _mul(self, a, b):
        m, p = self.m, self.p
        conv = np.convolve(
            np.asarray(a.coeffs, dtype=np.int64),
            np.asarray(b.coeffs, dtype=np.int64),
        )
        res = np.zeros(2 * m - 1, dtype=np.int64)
        res[: conv.size] = conv
        for i in range(2 * m - 2, m - 1, -1):
            coef = res[i] % p
            if coef:
                res[:m] += coef * self._red[i - m]
        return FieldElement(self, (res[:m] % p).tolist())

    def _pow(self, a, e):
        e = int(e)
        if e < 0:
            return self._pow(a.inv(), -e)
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            e >>= 1
        return result

    # -- quadratic structure ---------------------------------------------------

    def is_square(self, a):
        if a.is_zero:
            return True
        return self._pow(a, (self.q - 1) // 2) == self.one

    def _first_nonsquare(self):
        if self._nonsquare is None:
            for el in self.elements():
                if not el.is_zero and not self.is_square(el):
                    self._nonsquare = el
                    break
        return self._nonsquare

    def sqrt(self, a):
        """Both square roots of ``a``, canonically ordered, or None.

        Returns
        -------
        tuple of FieldElement or None
            ``(r, -r)`` with ``r`` lex-smaller; ``(0, 0)`` for the
            degenerate input 0; None when ``a`` is a non-square.
        """
        if a.is_zero:
            return (self.zero, self.zero)
        if not self.is_square(a):
            return None
        if self.q % 4 == 3:
            r = self._pow(a, (self.q + 1) // 4)
        else:
            t, e = self._ts_t, self._ts_e
            c = self._pow(self._first_nonsquare(), t)
            r = self._pow(a, (t + 1) // 2)
            rem = self._pow(a, t)
            big = e
            while rem != self.one:
                i, probe = 0, rem
                while probe != self.one:
                    probe = self._mul(probe, probe)
                    i += 1
                b = c
                for _ in range(big - i - 1):
                    b = self._mul(b, b)
                big = i
                c = self._mul(b, b)
                rem = self._mul(rem, c)
                r = self._mul(r, b)
        pair = (r, -r)
        return pair if pair[0] <= pair[1] else (pair[1], pair[0])

    def zeta4(self):
        """Canonical primitive 4th root of unity, or None if absent."""
        if self._zeta4 == ():
            pair = self.sqrt(-self.one)
            self._zeta4 = None if pair is None else pair[0]
        return self._zeta4

    def sqrt2(self):
        """Canonical square root of 2, or None if absent."""
        if self._sqrt2 == ():
            pair = self.sqrt(self.from_int(2))
            self._sqrt2 = None if pair is None else pair[0]
        return self._sqrt2

    def __repr__(self):
        return f"FieldCtx(p={self.p}, m={self.m})"


# ---------------------------------------------------------------------------
# modulus selection


def _polydivmod(r, h, p):
    r = r.copy() % p
    m = h.size - 1
    for i in range(r.size - 1, m - 1, -1):
        coef = r[i] % p
        if coef:
            r[i - m : i + 1] = (r[i - m : i + 1] - coef * h) % p
    return r[:m]


def _polymulmod(a, b, h, p):
    return _polydivmod(np.convolve(a, b), h, p)


def _x_pow_mod(e, h, p):
    m = h.size - 1
    result = np.zeros(m, dtype=np.int64)
    result[0] = 1
    base = np.zeros(m, dtype=np.int64)
    if m == 1:
        base[0] = (-h[0]) % p
    else:
        base[1] = 1
    while e:
        if e & 1:
            result = _polymulmod(result, base, h, p)
        base = _polymulmod(base, base, h, p)
        e >>= 1
    return result


def _polygcd(a, b, p):
    a, b = a.copy() % p, b.copy() % p
    while b.any():
        deg_b = int(np.max(np.nonzero(b)))
        lead_inv = pow(int(b[deg_b]), p - 2, p)
        b_monic = (b * lead_inv) % p
        r = a.copy()
        for i in range(r.size - 1, deg_b - 1, -1):
            coef = r[i] % p
            if coef:
                r[i - deg_b : i + 1] = (
                    r[i - deg_b : i + 1] - coef * b_monic[: deg_b + 1]
                ) % p
        a, b = b, r[:deg_b] if deg_b else np.zeros(1, dtype=np.int64)
    return a


def _is_irreducible_2power(coeffs, p):
    """Rabin test for monic h of degree m = 2^t over F_p."""
    h = np.asarray(coeffs, dtype=np.int64)
    m = h.size - 1
    xq = _x_pow_mod(p**m, h, p)
    x_itself = np.zeros(m, dtype=np.int64)
    if m == 1:
        x_itself[0] = (-h[0]) % p
    else:
        x_itself[1] = 1
    if not np.array_equal(xq, x_itself):
        return False
    if m == 1:
        return True
    half = _x_pow_mod(p ** (m // 2), h, p)
    diff = (half - x_itself) % p
    g = _polygcd(h, diff, p)
    nz = np.nonzero(g)[0]
    return nz.size == 1 and nz[0] == 0


@lru_cache(maxsize=None)
def build_field(p, depth):
    """Construct F_{p^(2^depth)} with the deterministic first modulus.

    Parameters
    ----------
    p : int
        Odd prime.
    depth : int
        Tree depth the field must accommodate; extension degree 2^depth.

    Returns
    -------
    FieldCtx
    """
    if not _is_prime(p) or p == 2:
        raise ValueError(f"p must be an odd prime, got {p}")
    if not 0 <= depth <= 6:
        raise ValueError(f"depth must be in 0..6, got {depth}")
    m = 2**depth
    if m == 1:
        return FieldCtx(p, 1, (0, 1))
    # scan monic candidates in lex order of (c_0 .. c_{m-1}); c_0 = 0 would
    # be divisible by x, so start at (1, 0, ..., 0)
    n = p ** (m - 1)
    while True:
        digits = []
        t = n
        for _ in range(m):
            digits.append(t % p)
            t //= p
        digits.reverse()
        cand = tuple(digits) + (1,)
        if _is_irreducible_2power(cand, p):
            return FieldCtx(p, m, cand)
        n += 1
