"""Coefficients of the weight-2 CM newform attached to y^2 = x^3 + pibar^(2i)/4.

The Hecke character sends a prime ideal (g), g = 1 mod 3 coprime to 3*pi, to
conj((pi^i/g)_3) * g; summing over integral ideals prime to the conductor
gives a_n supported on n = 1 mod 3, with a_p = pibar.  Coefficients are
produced multiplicatively from prime ideal data; a direct generator
enumeration over the norm ball is kept as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .eisenstein import (
    ONE,
    EisensteinInt,
    Fq2,
    NotPrime,
    ZERO,
    cubic_residue_symbol,
    is_prime_element,
    is_prime_int,
    residue_map_omega,
    split_prime,
    unit_power,
)


class BadPrimeClass(ValueError):
    pass


class RamifiedIdeal(ValueError):
    pass


class BadNormalization(ValueError):
    pass


class MismatchAt(AssertionError):
    def __init__(self, n, got, want):
        self.n = n
        super().__init__(f"coefficient mismatch at n={n}: {got} != {want}")


def conductor_and_level(p, i):
    """(e3, N): conductor (sqrt(-3))^e3 * (pibar) and level N = 3^(e3+1) * p.

    e3 = 1 and N = 9p when p^i = 4 mod 9; e3 = 2 and N = 27p when p^i = 7.
    """
    if not is_prime_int(p) or p % 9 not in (4, 7):
        raise BadPrimeClass(f"{p} is not a prime congruent to 4,7 mod 9")
    if i not in (1, 2):
        raise ValueError("power must be 1 or 2")
    cls = pow(p, i, 9)
    e3 = 1 if cls == 4 else 2
    return e3, 3 ** (e3 + 1) * p


def hecke_psi(gen, p, i):
    """psi((gen)) = conj((pi^i/gen)_3) * gen, gen prime, 1 mod 3, coprime to 3p."""
    if gen.norm() % 3 == 0 or gen.norm() % p == 0:
        raise RamifiedIdeal(f"({gen}) is not coprime to 3*{p}")
    if gen.residue_mod3() != (1, 0):
        raise BadNormalization(f"{gen} is not 1 mod 3")
    if not is_prime_element(gen):
        raise NotPrime(f"{gen} is not prime")
    s = split_prime(p)
    sym = cubic_residue_symbol(s.pi, gen) ** i
    return sym.conj() * gen


# ----------------------------------------------------------- prime tables


def _smallest_prime_factors(limit):
    spf = list(range(limit + 1))
    for q in range(2, int(limit**0.5) + 1):
        if spf[q] == q:
            for m in range(q * q, limit + 1, q):
                if spf[m] == m:
                    spf[m] = q
    return spf


def _cubic_symbol_split(value_mod_l, ell, w):
    """Exponent k with (value/g)_3 = w^k, computed in F_ell (w = omega mod g)."""
    c = pow(value_mod_l, (ell - 1) // 3, ell)
    if c == 1:
        return 0
    if c == w:
        return 1
    if c == w * w % ell:
        return 2
    raise ArithmeticError("cube character value out of range")


def _split_prime_psi(split, i, ell):
    """(psi(lam), psi(lambar)) for a split good prime ell."""
    s_ell = split_prime(ell)
    values = []
    for g in (s_ell.pi, s_ell.pibar):
        w = residue_map_omega(g)
        v = (split.pi.a + split.pi.b * w) % ell
        k = _cubic_symbol_split(pow(v, i, ell), ell, w)
        values.append(unit_power(-k) * g)
    return values


def _inert_prime_psi(split, i, ell):
    """psi((ell)) for an inert good prime ell; the 1 mod 3 generator is -ell."""
    F = Fq2(ell)
    k = F.cubic_char_exponent(F.pow(F.embed(split.pi), i))
    return unit_power(-k) * EisensteinInt(-ell, 0)


def _prime_power_coeffs(split, i, ell, emax, sqrt_d=None):
    """[a_{ell^e}] for e = 0..emax.

    sqrt_d = None builds the form's own character.  Otherwise build the Hecke
    character of y^2 = x^3 + sqrt_d^2/4 for a rational sqrt_d: the sextic
    symbol of a square is the cubic symbol of its root, so psi(q) =
    conj((sqrt_d/q)_3) * gen(q).  Bad primes are 3 and p in both cases.
    """
    out = [ONE]
    if ell == 3:
        return out + [ZERO] * emax
    if ell == split.p:
        if sqrt_d is None:
            # only (pibar^e) stays coprime to the conductor; psi there is pibar
            return out + [split.pibar**e for e in range(1, emax + 1)]
        return out + [ZERO] * emax
    if ell % 3 == 2:
        if sqrt_d is None:
            u = _inert_prime_psi(split, i, ell)
        else:
            F = Fq2(ell)
            k = F.cubic_char_exponent(F.embed(EisensteinInt(sqrt_d % ell, 0)))
            u = unit_power(-k) * EisensteinInt(-ell, 0)
        for e in range(1, emax + 1):
            out.append(ZERO if e % 2 else u ** (e // 2))
        return out
    if sqrt_d is None:
        u, v = _split_prime_psi(split, i, ell)
    else:
        s_ell = split_prime(ell)
        uv = []
        for g in (s_ell.pi, s_ell.pibar):
            w = residue_map_omega(g)
            k = _cubic_symbol_split(sqrt_d % ell, ell, w)
            uv.append(unit_power(-k) * g)
        u, v = uv
    for e in range(1, emax + 1):
        acc = ZERO
        for j in range(e + 1):
            acc = acc + u**j * v ** (e - j)
        out.append(acc)
    return out


def qexp_coefficients(p, i, M, conjugate=False):
    """a_1..a_M of the newform (index 0 of the returned list is unused)."""
    split = split_prime(p)
    spf = _smallest_prime_factors(M) if M >= 2 else []
    coeffs = [ZERO] * (M + 1)
    if M >= 1:
        coeffs[1] = ONE
    tables = {}
    for n in range(2, M + 1):
        ell = spf[n]
        m, e = n, 0
        while m % ell == 0:
            m //= ell
            e += 1
        if ell not in tables:
            emax = 1
            while ell ** (emax + 1) <= M:
                emax += 1
            tables[ell] = _prime_power_coeffs(split, i, ell, emax)
        coeffs[n] = coeffs[m] * tables[ell][e]
    if conjugate:
        coeffs = [c.conj() for c in coeffs]
    return coeffs


def qexp_coefficients_direct(p, i, M, conjugate=False):
    """Oracle route: walk generators x = 1 mod 3 with norm <= M, coprime to
    the conductor, and sum psi((x)) per norm.  psi((x)) is assembled from the
    prime factorization of x by trial division, with symbols from the generic
    Euler-criterion implementation."""
    split = split_prime(p)
    coeffs = [ZERO] * (M + 1)
    bound = int((4 * M / 3) ** 0.5) + 2
    sym_cache = {}

    def prime_symbol(g):
        if g not in sym_cache:
            sym_cache[g] = cubic_residue_symbol(split.pi, g) ** i
        return sym_cache[g]

    spf = _smallest_prime_factors(M)
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            x = EisensteinInt(a, b)
            n = x.norm()
            if n == 0 or n > M or x.residue_mod3() != (1, 0):
                continue
            if n % p == 0 and not x % split.pi:
                continue  # not coprime to the conductor
            # factor x by trial division over the primes dividing its norm
            sym = ONE
            rest = x
            m = n
            while m > 1:
                ell = spf[m]
                if ell % 3 == 2:
                    g = EisensteinInt(-ell, 0)
                    while not rest % g:
                        rest = rest.exact_div(g)
                        sym = sym * prime_symbol(g)
                        m //= ell * ell
                else:
                    s_ell = split_prime(ell)
                    for g in (s_ell.pi, s_ell.pibar):
                        while not rest % g:
                            rest = rest.exact_div(g)
                            if ell != p:  # psi at (pibar) is pibar itself
                                sym = sym * prime_symbol(g)
                            m //= ell
            assert rest.is_unit()
            coeffs[n] = coeffs[n] + sym.conj() * x
    if M >= 1:
        assert coeffs[1] == ONE
    if conjugate:
        coeffs = [c.conj() for c in coeffs]
    return coeffs


@dataclass(frozen=True)
class HeckeForm:
    p: int
    i: int
    pi: EisensteinInt
    pibar: EisensteinInt
    N: int
    e3: int
    conjugate: bool
    coeffs: tuple

    @property
    def terms(self):
        return len(self.coeffs) - 1

    def a(self, n):
        return self.coeffs[n]

    def conjugate_form(self):
        return HeckeForm(
            p=self.p,
            i=self.i,
            pi=self.pi,
            pibar=self.pibar,
            N=self.N,
            e3=self.e3,
            conjugate=not self.conjugate,
            coeffs=tuple(c.conj() for c in self.coeffs),
        )


def build_form(p, i, M, conjugate=False, coeffs=None):
    """HeckeForm with coefficients a_1..a_M (computed unless supplied)."""
    e3, N = conductor_and_level(p, i)
    split = split_prime(p)
    if coeffs is None:
        coeffs = qexp_coefficients(p, i, M, conjugate=conjugate)
    return HeckeForm(
        p=p,
        i=i,
        pi=split.pi,
        pibar=split.pibar,
        N=N,
        e3=e3,
        conjugate=conjugate,
        coeffs=tuple(coeffs),
    )


# ------------------------------------------------------------- nebentypus


def nebentypus(p, i, d):
    """xi(d) = (-3/d) psi((d))/d on integers, computed through the residue
    character mod p: xi(d) = conj((d/pi)_3^i) by cubic reciprocity (signs and
    units drop out of the symbol).  Zero when gcd(d, 3p) > 1."""
    d = int(d)
    if d % 3 == 0 or d % p == 0:
        return ZERO
    split = split_prime(p)
    w = residue_map_omega(split.pi)
    k = _cubic_symbol_split(pow(d % p, i, p), p, w)
    return unit_power(-k)


@dataclass(frozen=True)
class TwistReport:
    p: int
    i: int
    M: int
    checked: int
    ok: bool = True


def twist_check(p, i, M):
    """Verify b_n = conj(chi)(n) * a_n for n <= M coprime to p, where b_n come
    from the Hecke character of the rational curve y^2 = x^3 + p^(6-2i)/4 and
    chi is the cubic residue character mod p."""
    split = split_prime(p)
    a = qexp_coefficients(p, i, M)
    sqrt_d = p ** (3 - i)  # the twisted curve is y^2 = x^3 + p^(6-2i)/4

    spf = _smallest_prime_factors(M) if M >= 2 else []
    b = [ZERO] * (M + 1)
    if M >= 1:
        b[1] = ONE
    tables = {}
    for n in range(2, M + 1):
        ell = spf[n]
        m, e = n, 0
        while m % ell == 0:
            m //= ell
            e += 1
        if ell not in tables:
            emax = 1
            while ell ** (emax + 1) <= M:
                emax += 1
            tables[ell] = _prime_power_coeffs(split, i, ell, emax, sqrt_d=sqrt_d)
        b[n] = b[m] * tables[ell][e]

    w = residue_map_omega(split.pi)
    checked = 0
    for n in range(1, M + 1):
        if n % p == 0:
            continue
        if n % 3 == 1:
            # the twisting character is conj((pi^i/n)_3); with (n/pi)_3 = w^k
            # via cubic reciprocity this is w^(-k)
            k = _cubic_symbol_split(pow(n % p, i, p), p, w)
            want = unit_power(-k) * a[n]
        else:
            want = ZERO
        if b[n] != want:
            raise MismatchAt(n, b[n], want)
        checked += 1
    return TwistReport(p=p, i=i, M=M, checked=checked)
