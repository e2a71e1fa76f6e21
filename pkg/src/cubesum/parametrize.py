"""The orchestrated pipeline from CM sites to certified cube sums.

Stages: evaluate both forms' Abel-Jacobi images at a ranked candidate site,
map through wp on the matching lattice, recognize the algebraic coordinates
(the non-torsion side lives over K(pi^(1/3)), so x is recognized after
scaling by a cube root; the torsion side has x = 0), twist both to points of
E(p^i) over K, take the difference, and descend to Q by the trace or the
sqrt(-3) endomorphism.  Every recognized object is certified by exact
arithmetic before it is used; numerical failures raise and the driver
retries at higher precision.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from . import analytic, curves
from .analytic import (
    GUARD_BITS,
    PoleAtLatticePoint,
    TermsCapExceeded,
    eval_z,
    lattice_of_curve,
    recognize_qomega,
    terms_needed,
    wp_eval,
)
from .cmpoint import candidate_points
from .curves import CurvePoint, DescentFailed, add, endo_omega, mul_sqrt_m3
from .eisenstein import QOmega, split_prime
from .heckeform import build_form


class RecognitionFailed(ArithmeticError):
    pass


class EvalResidualTooLarge(ArithmeticError):
    pass


class PrecisionExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class RecognizedPoint:
    form: str  # "f" or "fc"
    at_infinity: bool
    x_scaled: QOmega | None  # x * mult^(2i/3) * w^twist_k, exact in K
    y: QOmega | None
    mult_tag: str | None  # "pi" or "pibar": which cube root made x algebraic
    twist_k: int
    residual_bits: int  # -log2 of the worst re-embedding residual


def evaluate_cm(form, site, prec=192, max_terms=None, lattice=None):
    """("infinity", None) or ("point", (x, y)) for the form at the site.

    x = wp(z), y = wp'(z)/2 on the lattice of the form's own curve; the curve
    residual must clear 2^-(prec-40) or the evaluation is rejected.
    """
    D = (form.pi if form.conjugate else form.pibar) ** (2 * form.i)
    if lattice is None:
        lattice = lattice_of_curve(D, prec)
    with mp.workprec(prec + GUARD_BITS):
        z = eval_z(form, site, prec, max_terms=max_terms)
        if lattice.contains(z):
            return "infinity", None
        try:
            wp, wpd = wp_eval(lattice, z, prec)
        except PoleAtLatticePoint:
            return "infinity", None
        x, y = wp, wpd / 2
        res = abs(y * y - x**3 - D.to_mpc(mp) / 4)
        scale = max(1, abs(x) ** 3)
        if res > mp.mpf(2) ** (-(prec - 40)) * scale:
            raise EvalResidualTooLarge(f"curve residual 2^{mp.log(res, 2)} at {site}")
        return "point", (x, y)


def _cube_root_scalings(split, i, prec):
    """Principal cube roots of pi^(2i) and pibar^(2i) as mpc."""
    with mp.workprec(prec + GUARD_BITS):
        third = mp.mpf(1) / 3
        return {
            "pi": (split.pi.to_mpc(mp) ** (2 * i)) ** third,
            "pibar": (split.pibar.to_mpc(mp) ** (2 * i)) ** third,
        }


def recognize(raw, split, i, den_bound, prec=192, form="f"):
    """Exact coordinates for a raw complex point of the form's curve.

    Tries, for each unit twist w^k and for the two cube-root scalings, to
    recognize (x * root * w^k, y) in K; the recognized pair is certified
    exactly downstream (twisted point on the curve), so a rare misrecognition
    surfaces as RecognitionFailed there and triggers a precision retry.
    """
    x, y = raw
    with mp.workprec(prec + GUARD_BITS):
        tol_bits = prec // 2
        y_rec = recognize_qomega(y, den_bound, tol_bits)
        if y_rec is None:
            raise RecognitionFailed(f"y = {y} not recognized (bound {den_bound})")
        roots = _cube_root_scalings(split, i, prec)
        w = analytic.omega_mpc()
        order = ("pi", "pibar") if form == "f" else ("pibar", "pi")
        best = None
        for tag in order:
            scaled = mp.mpc(x) * roots[tag]
            for k in range(3):
                cand = recognize_qomega(scaled * w**k, den_bound, tol_bits)
                if cand is not None:
                    res = abs(cand.to_mpc(mp) - scaled * w**k)
                    bits = prec if res == 0 else int(-mp.log(res, 2))
                    best = RecognizedPoint(
                        form=form,
                        at_infinity=False,
                        x_scaled=cand,
                        y=y_rec,
                        mult_tag=tag,
                        twist_k=k,
                        residual_bits=min(bits, prec),
                    )
                    return best
        raise RecognitionFailed(f"x = {x} not recognized under either cube root")


def recognized_infinity(form="f"):
    return RecognizedPoint(
        form=form, at_infinity=True, x_scaled=None, y=None, mult_tag=None, twist_k=0,
        residual_bits=0,
    )


def twist_point(rp, split, i):
    """The exact point of E(p^i)(K) behind a recognized point.

    For mult_tag "pi" the twist is (x, y) -> (pi^(2i/3) x, pi^i y), which
    lands the recognized x_scaled directly in the x-slot; "pibar" is the
    conjugate map.  Exactness of the result on E(p^i) certifies recognition.
    """
    D = QOmega(Fraction(split.p) ** (2 * i))
    if rp.at_infinity:
        return CurvePoint.infinity(D)
    mult = split.pi if rp.mult_tag == "pi" else split.pibar
    x = rp.x_scaled
    y = mult.to_q() ** i * rp.y
    P = CurvePoint(D, x, y)
    if not P.on_curve():
        raise RecognitionFailed(
            f"twisted point ({x}, {y}) fails the exact curve equation"
        )
    return P


def twist_and_combine(rp_f, rp_fc, split, i):
    """phi(phi-image) - phi^c(phi^c-image) on E(p^i), exact over K."""
    Pf = twist_point(rp_f, split, i)
    Pfc = twist_point(rp_fc, split, i)
    return add(Pf, -Pfc)


def descend(PK, p, i):
    """A nontorsion rational point from an exact K-point of E(p^i).

    Branch 1 is the trace P + conj(P); branch 2 is [sqrt(-3)]P when that is
    rational.  Both branches are tried across the six unit twists
    [w^k](+-P) before giving up.
    """
    variants = []
    for sgn in (1, -1):
        Q = PK if sgn == 1 else -PK
        for k in range(3):
            variants.append((k, sgn, Q))
            Q = endo_omega(Q)
    for k, sgn, Q in variants:
        trace = add(Q, Q.conj())
        if trace.is_rational() and curves.is_nontorsion(trace, p, i):
            return trace, f"trace(w^{k}{'+' if sgn > 0 else '-'})"
        R = mul_sqrt_m3(Q)
        if R.is_rational() and curves.is_nontorsion(R, p, i):
            return R, f"sqrt-3(w^{k}{'+' if sgn > 0 else '-'})"
    raise DescentFailed(f"no rational nontorsion point from {PK}")


@dataclass
class PipelineResult:
    p: int
    i: int
    split: object
    site: object
    predicted_form: str
    bits: int
    terms: int
    rec_f: RecognizedPoint
    rec_fc: RecognizedPoint
    point_K: CurvePoint
    descent_branch: str
    point_Q: CurvePoint
    certificate: object
    X: QOmega
    Y: QOmega
    cube: object
    checks: dict
    timings_ms: dict


def _attempt_site(cand, split, p, i, prec, max_terms, forms_cache, form_factory):
    timings = {}
    t0 = time.perf_counter()
    site = cand.site
    M = terms_needed(float(site.im_coeff) * 3**0.5, prec)
    if max_terms is not None and M > max_terms:
        raise TermsCapExceeded(f"site {site.label()} needs {M} > {max_terms} terms")
    key = (prec,)
    if key not in forms_cache or forms_cache[key][0].terms < M:
        f = form_factory(p, i, M)
        forms_cache[key] = (f, f.conjugate_form())
    f, fc = forms_cache[key]
    timings["coefficients_ms"] = 1000 * (time.perf_counter() - t0)

    t0 = time.perf_counter()
    Lf = lattice_of_curve(split.pibar ** (2 * i), prec)
    Lfc = lattice_of_curve(split.pi ** (2 * i), prec)
    kind_f, raw_f = evaluate_cm(f, site, prec, max_terms=max_terms, lattice=Lf)
    kind_fc, raw_fc = evaluate_cm(fc, site, prec, max_terms=max_terms, lattice=Lfc)
    timings["evaluate_ms"] = 1000 * (time.perf_counter() - t0)

    t0 = time.perf_counter()
    den_bound = 1 << max(prec // 3, 40)
    rec_f = (
        recognized_infinity("f")
        if kind_f == "infinity"
        else recognize(raw_f, split, i, den_bound, prec, form="f")
    )
    rec_fc = (
        recognized_infinity("fc")
        if kind_fc == "infinity"
        else recognize(raw_fc, split, i, den_bound, prec, form="fc")
    )
    timings["recognize_ms"] = 1000 * (time.perf_counter() - t0)

    t0 = time.perf_counter()
    PK = twist_and_combine(rec_f, rec_fc, split, i)
    if PK.is_infinity:
        raise RecognitionFailed("twisted difference is the identity; site unusable")
    PQ, branch = descend(PK, p, i)
    cert = curves.nontorsion_certificate(PQ, p, i)
    if not cert.nontorsion:
        raise DescentFailed("descended point is torsion")
    X, Y = curves.isogeny_to_432(PQ, p, i)
    cube = curves.to_cube_sum(X, Y, p, i)
    timings["descent_ms"] = 1000 * (time.perf_counter() - t0)

    checks = {
        "twisted_difference_on_curve": {"ok": PK.on_curve()},
        "descended_point_rational": {"ok": PQ.is_rational()},
        "nontorsion_certificate": {
            "ok": cert.nontorsion,
            "primes": list(cert.primes),
            "counts": list(cert.counts),
            "bound": cert.bound,
        },
        "cube_identity": {"ok": cube.verify()},
        "recognition_residual_bits": {
            "f": rec_f.residual_bits,
            "fc": rec_fc.residual_bits,
        },
    }
    return PipelineResult(
        p=p,
        i=i,
        split=split,
        site=site,
        predicted_form=cand.predicted_nontorsion,
        bits=prec,
        terms=M,
        rec_f=rec_f,
        rec_fc=rec_fc,
        point_K=PK,
        descent_branch=branch,
        point_Q=PQ,
        certificate=cert,
        X=X,
        Y=Y,
        cube=cube,
        checks=checks,
        timings_ms=timings,
    )


def solve_pipeline(p, i, bits=192, max_terms=2_000_000, eval_mode="auto", form_factory=None):
    """End-to-end: u^3 + v^3 = p^i with exact verification.

    Candidate sites are tried in ranked order; recognition failures double
    the working precision (up to 4 retries) per the denominator-bound
    schedule.  eval_mode restricts the sites ("tau", "wtau", or "auto");
    form_factory lets the caller supply cached coefficients.
    """
    split = split_prime(p)
    cands = candidate_points(p, i)
    if eval_mode in ("tau", "wtau"):
        cands = [c for c in cands if c.site.kind == eval_mode]
    if not cands:
        raise ValueError(f"no candidate sites for eval mode {eval_mode}")
    if form_factory is None:
        form_factory = build_form
    errors = []
    prec = bits
    for _ in range(5):
        forms_cache = {}
        for cand in cands:
            try:
                return _attempt_site(cand, split, p, i, prec, max_terms, forms_cache, form_factory)
            except (
                RecognitionFailed,
                EvalResidualTooLarge,
                DescentFailed,
                TermsCapExceeded,
            ) as e:
                errors.append(f"{cand.site.label()}@{prec}b: {e}")
        prec *= 2
    raise PrecisionExhausted("; ".join(errors[-8:]))
