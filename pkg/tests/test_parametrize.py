from fractions import Fraction

import pytest
from mpmath import mp

from cubesum.cmpoint import CMPoint, EvalSite, classify_root
from cubesum.curves import CurvePoint, endo_omega, mul
from cubesum.eisenstein import QOmega, split_prime
from cubesum.heckeform import build_form, conductor_and_level
from cubesum.parametrize import (
    PrecisionExhausted,
    RecognitionFailed,
    descend,
    evaluate_cm,
    recognize,
    solve_pipeline,
    twist_point,
)
from cubesum.analytic import terms_needed


def q(a, b=0):
    return QOmega(Fraction(a), Fraction(b))


def site_for(p, i, r, kind="tau"):
    split = split_prime(p)
    t = (r * r - r + 1) // (3 * p)
    _, N = conductor_and_level(p, i)
    k_pi, k_pibar = classify_root(r, split)
    pt = CMPoint(p=p, r=r, t=t, class_pi=k_pi, class_pibar=k_pibar)
    im = Fraction(1, 18 * p * t) if kind == "tau" else Fraction(3, 2 * N)
    return EvalSite(kind, pt, N, im)


def unit_orbit(P):
    """The six points (w^k x, +-y)."""
    out = []
    Q = P
    for _ in range(3):
        out.extend([Q, -Q])
        Q = endo_omega(Q)
    return out


def prepare(p, i, r, kind, prec=192):
    split = split_prime(p)
    site = site_for(p, i, r, kind)
    M = terms_needed(float(site.im_coeff) * 3**0.5, prec)
    f = build_form(p, i, M)
    return split, site, f, f.conjugate_form()


def test_evaluate_cm_p7_tau_fixture():
    # phi at tau_5 is the non-torsion side with y = (-9w-4)/2; phi^c there is
    # the torsion point (0, -pi/2)
    prec = 192
    split, site, f, fc = prepare(7, 1, 5, "tau", prec)
    kind, raw = evaluate_cm(f, site, prec)
    assert kind == "point"
    rec = recognize(raw, split, 1, 1 << 64, prec, form="f")
    assert rec.y == q(-2, Fraction(-9, 2))
    # x * pi^(2/3) recognized up to a unit twist of the cube-root branch
    orbit = {q(-1, 4) * q(0, 1) ** k for k in range(3)}
    assert rec.x_scaled in orbit

    kind_c, raw_c = evaluate_cm(fc, site, prec)
    assert kind_c == "point"
    rec_c = recognize(raw_c, split, 1, 1 << 64, prec, form="fc")
    assert rec_c.x_scaled == q(0)
    assert rec_c.y in (split.pi.to_q() / 2, -split.pi.to_q() / 2)


def test_evaluate_cm_p13_tau23_torsion_fixture():
    # at the reference site r = 23 (t = 13), phi^c lands on (0, pi/2)
    prec = 192
    split, site, f, fc = prepare(13, 1, 23, "tau", prec)
    kind_c, raw_c = evaluate_cm(fc, site, prec)
    assert kind_c == "point"
    rec_c = recognize(raw_c, split, 1, 1 << 64, prec, form="fc")
    assert rec_c.x_scaled == q(0)
    assert rec_c.y in (split.pi.to_q() / 2, -split.pi.to_q() / 2)


def test_recognize_p13_nontorsion_fixture():
    prec = 192
    split, site, f, fc = prepare(13, 1, 23, "tau", prec)
    kind, raw = evaluate_cm(f, site, prec)
    assert kind == "point"
    rec = recognize(raw, split, 1, 1 << 64, prec, form="f")
    assert rec.y in (q(Fraction(7, 2), Fraction(9, 2)), -q(Fraction(7, 2), Fraction(9, 2)))
    orbit = {q(-7, -2) * q(0, 1) ** k for k in range(3)}
    assert rec.x_scaled in orbit


def test_recognize_p31_fixture():
    prec = 224
    split, site, f, fc = prepare(31, 1, 26, "tau", prec)
    kind, raw = evaluate_cm(f, site, prec)
    assert kind == "point"
    rec = recognize(raw, split, 1, 1 << 80, prec, form="f")
    want_y = q(Fraction(-2531, 686), Fraction(-549, 343))
    assert rec.y in (want_y, -want_y)
    want_x = q(Fraction(-404, 49), Fraction(-130, 49))
    orbit = {want_x * q(0, 1) ** k for k in range(3)}
    assert rec.x_scaled in orbit


def test_recognized_point_reembedding():
    prec = 192
    split, site, f, fc = prepare(7, 1, 5, "tau", prec)
    kind, raw = evaluate_cm(f, site, prec)
    rec = recognize(raw, split, 1, 1 << 64, prec, form="f")
    assert rec.residual_bits >= prec // 2
    with mp.workprec(prec):
        yv = rec.y.to_mpc(mp)
        assert abs(yv - raw[1]) < mp.mpf(2) ** (-(prec // 2))


def test_twist_and_combine_reference_points():
    # the three reference K-points, each up to the documented 6-orbit
    targets = {
        (7, 1): CurvePoint.make(q(49), q(0, Fraction(-7, 3)), q(Fraction(7, 18), Fraction(7, 9))),
        (13, 1): CurvePoint.make(
            q(169), q(Fraction(13, 3), Fraction(13, 3)), q(Fraction(65, 18), Fraction(65, 9))
        ),
        (31, 1): CurvePoint.make(
            q(961), q(0, Fraction(-217, 12)), q(Fraction(-3131, 72), Fraction(-3131, 36))
        ),
    }
    # x for 13: -13 w^2 / 3 = 13/3 + 13/3 w; y = 65 sqrt(-3)/18 = 65/18 + 65/9 w
    for (p, i), want in targets.items():
        r = solve_pipeline(p, i)
        assert r.point_K in unit_orbit(want), f"p={p}: {r.point_K} not in orbit"


def test_twist_point_exactness_certifies():
    # corrupting a recognized coordinate must be caught by the exact check
    split = split_prime(7)
    prec = 192
    _, site, f, fc = prepare(7, 1, 5, "tau", prec)
    kind, raw = evaluate_cm(f, site, prec)
    rec = recognize(raw, split, 1, 1 << 64, prec, form="f")
    import dataclasses

    bad = dataclasses.replace(rec, y=rec.y + q(1))
    with pytest.raises(RecognitionFailed):
        twist_point(bad, split, 1)


def test_descend_trace_branch_directly():
    # conj acts by w -> -1-w on coordinates; a rational input returns [2]P
    P = CurvePoint.make(q(49), q(Fraction(-20, 9)), q(Fraction(-61, 54)))
    assert P.conj() == P
    R, branch = descend(P, 7, 1)
    assert R.is_rational()
    assert branch.startswith("trace")
    assert R == mul(2, P)


def test_descend_output_invariants():
    for p, i in ((7, 1), (13, 1)):
        r = solve_pipeline(p, i)
        PQ = r.point_Q
        assert PQ.is_rational()
        assert PQ.on_curve()
        assert PQ.x.b == 0 and PQ.y.b == 0
        assert r.certificate.nontorsion


def test_twist_point_at_infinity():
    from cubesum.parametrize import recognized_infinity

    split = split_prime(7)
    P = twist_point(recognized_infinity("f"), split, 1)
    assert P.is_infinity


def test_pipeline_alternate_precision():
    r = solve_pipeline(7, 1, bits=96)
    assert r.cube.verify() and r.bits == 96
    r = solve_pipeline(7, 1, bits=320)
    assert r.cube.verify() and r.bits == 320


def test_pipeline_determinism():
    r1 = solve_pipeline(13, 1)
    r2 = solve_pipeline(13, 1)
    assert r1.cube == r2.cube
    assert r1.point_K == r2.point_K
    assert r1.site.label() == r2.site.label()
    assert r1.bits == r2.bits and r1.terms == r2.terms


def test_pipeline_eval_modes():
    r_tau = solve_pipeline(7, 1, eval_mode="tau")
    assert r_tau.site.kind == "tau"
    assert r_tau.cube.verify()
    r_w = solve_pipeline(7, 1, eval_mode="wtau")
    assert r_w.site.kind == "wtau"
    assert r_w.cube.verify()


def test_pipeline_terms_cap():
    with pytest.raises(PrecisionExhausted):
        solve_pipeline(7, 1, max_terms=40)


def test_torsion_site_value_is_negative_cusp_image():
    # diagnostic, not load-bearing: the torsion value observed at a CM site
    # is the negation of the cusp-zero image of the same form
    from cubesum.analytic import l_value_and_cusp_zero, lattice_of_curve, wp_eval

    for p in (7, 13, 31):
        split = split_prime(p)
        r = solve_pipeline(p, 1)
        tor = r.rec_fc if (r.rec_fc.x_scaled is not None and not r.rec_fc.x_scaled) else r.rec_f
        conj = tor.form == "fc"
        z0, _ = l_value_and_cusp_zero(p, 1, 192, conjugate=conj)
        base = split.pi if conj else split.pibar
        L = lattice_of_curve(base**2, 192)
        with mp.workprec(224):
            _, ypr = wp_eval(L, z0, 192)
            half = base.to_mpc(mp) / 2
            cusp_sign = 1 if abs(ypr / 2 - half) < abs(ypr / 2 + half) else -1
        site_sign = 1 if tor.y == base.to_q() / 2 else -1
        assert site_sign == -cusp_sign


def test_predicted_form_matches_reality():
    # the annotation must agree with which side came out non-torsion
    for p, i in ((7, 1), (13, 1), (31, 1), (7, 2)):
        r = solve_pipeline(p, i)
        tor_f = r.rec_f.at_infinity or not r.rec_f.x_scaled
        tor_fc = r.rec_fc.at_infinity or not r.rec_fc.x_scaled
        assert tor_f != tor_fc  # exactly one torsion side at each site
        assert r.predicted_form == ("fc" if tor_f else "f")
