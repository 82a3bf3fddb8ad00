from fractions import Fraction as F

import pytest

from symmops.exact import M_SYM, fq
from symmops.models import Params
from symmops.operators import compose, expand, raw_commutator
from symmops.symalg import (case_of, build_generators, verify_relations, verify_casimir,
                            recovered_centrals, lambdas, printed_casimir_pvz_odd, commutes_with_H,
                            jacobi_residual, operator_order, ttw_k1_lambda_template,
                            ttw_k1_omega_template, fit_sigma, racah_checks, degeneration_checks,
                            relation_report, central, CentralData)


def test_case_selection():
    assert case_of("ttw", 3) == "ttw"
    assert case_of("pvz", 2) == "pvz-even"
    assert case_of("pvz", 3) == "pvz-odd"


@pytest.mark.parametrize("model,p,q", [("pvz", 1, 2), ("pvz", 1, 1), ("pvz", 2, 1), ("ttw", 1, 1), ("ttw", 1, 2)])
@pytest.mark.parametrize("kappa", [F(0), F(1, 2)])
def test_relations_and_casimir(model, p, q, kappa):
    P = Params(p, q, F(1, 3), F(2, 5), F(3, 2), kappa)
    gs = build_generators(P, model)
    for name, res in verify_relations(gs).items():
        assert res.is_zero(), name
    assert verify_casimir(gs).is_zero()
    for name, res in commutes_with_H(gs).items():
        assert res.is_zero(), name
    assert jacobi_residual(gs).is_zero()
    rec = recovered_centrals(gs)
    disp = lambdas(gs)
    for name, poly in rec.items():
        assert poly is not None and poly == disp[name], name


def test_generators_commute_with_raw_hamiltonian():
    P = Params(1, 2, F(1, 3), F(2, 5), F(3, 2), F(-1, 3))
    gs = build_generators(P, "pvz")
    H = gs.sector.raw_H()
    for name, op in gs.ops.items():
        assert raw_commutator(expand(op), H).is_zero(), name


def test_pvz_even_ab_example():
    P = Params(1, 2, F(2, 7), F(1, 3), F(1), F(0))
    gs = build_generators(P, "pvz")
    assert gs.case == "pvz-even"
    assert (compose(gs.A, gs.B) - compose(gs.B, gs.A) - gs.B).is_zero()


def test_pvz_odd_constant_term_identity():
    P = Params(2, 1, F(1, 3), F(2, 5), F(3, 2), F(1, 2))
    gs = build_generators(P, "pvz")
    S = gs.sector
    c = gs.consts
    X = gs.consts["X"]
    lhs = X.rmul_poly(M_SYM + P.p) + central(S, c["K00(-p,H)"] * fq(c["J00(-p)"]))
    assert lhs == gs.products["JK"]


def test_pvz_odd_printed_casimir_sign_is_wrong():
    P = Params(1, 1, F(1, 3), F(1, 4), F(1), F(0))
    gs = build_generators(P, "pvz")
    assert verify_casimir(gs).is_zero()
    printed = printed_casimir_pvz_odd(gs)
    assert not printed.is_zero()
    # the printed combination equals 2(B^2 + C^2)
    assert printed == (compose(gs.B, gs.B) + compose(gs.C, gs.C)).scale(2)


def test_ttw_generators_even_in_M():
    P = Params(1, 2, F(1, 3), F(2, 5), F(3, 2), F(1, 2))
    gs = build_generators(P, "ttw")
    for op in gs.ops.values():
        assert op.is_even_M()


@pytest.mark.parametrize("kappa", [F(0), F(1, 2), F(-1, 3)])
def test_ttw_k1_templates(kappa):
    P = Params(1, 1, F(1, 3), F(2, 5), F(3, 2), kappa)
    gs = build_generators(P, "ttw")
    rec = recovered_centrals(gs)
    want = P.omega ** 2 - kappa ** 2 / 4
    assert fit_sigma(rec["Lambda"], lambda s: ttw_k1_lambda_template(P, s, False)) == want
    assert fit_sigma(rec["Omega"], lambda s: ttw_k1_omega_template(P, s, False)) == want
    assert fit_sigma(rec["Lambda"], lambda s: ttw_k1_lambda_template(P, s, True)) is None
    assert fit_sigma(rec["Omega"], lambda s: ttw_k1_omega_template(P, s, True)) is None


def test_racah_degeneration():
    P = Params(1, 1, F(1, 3), F(2, 5), F(3, 2), F(0))
    gs = build_generators(P, "ttw")
    r = racah_checks(gs, P.omega ** 2)
    assert r["Racah [A,B]=C"] and r["Racah [A,C]"]
    assert r["Racah [B,C] corrected"] and r["Racah Casimir corrected"]
    assert not r["Racah [B,C] printed"] and not r["Racah Casimir printed"]


def test_bannai_ito_degeneration():
    P = Params(1, 1, F(1, 3), F(2, 5), F(3, 2), F(0))
    gs = build_generators(P, "pvz")
    res, _ = degeneration_checks(gs)
    bi = {k: v for k, v in res.items() if k.startswith("BI")}
    assert len(bi) == 4 and all(bi.values())
    assert res["{B,C} k=1 display"]


def test_bannai_ito_bc_display_curved():
    P = Params(1, 1, F(1, 3), F(2, 5), F(3, 2), F(1, 2))
    res, _ = degeneration_checks(build_generators(P, "pvz"))
    assert res["{B,C} k=1 display"]


def test_orders_flat_k1():
    P = Params(1, 1, F(1, 3), F(2, 5), F(3, 2), F(0))
    gs = build_generators(P, "ttw")
    assert operator_order(gs.B) == 2
    assert operator_order(gs.C) == 3


def test_relation_report_shape():
    P = Params(1, 1, F(1, 3), F(1, 4), F(1), F(0))
    rep = relation_report(build_generators(P, "ttw"))
    assert set(rep) >= {"case", "params", "relations", "lambda", "omega", "sigma_fit", "casimir_pass"}
    assert rep["pass"] and rep["casimir_pass"]
    assert rep["sigma_fit"] == "1"
    names = {r["name"] for r in rep["relations"] if r.get("informational")}
    assert "k=1: Racah [B,C] printed" in names


def test_central_data_matches_generators():
    P = Params(2, 1, F(1, 3), F(2, 5), F(3, 2), F(1, 2))
    gs = build_generators(P, "ttw")
    cd = CentralData(P, "ttw")
    assert cd.consts == gs.consts or all(cd.consts[k] == gs.consts[k] for k in cd.consts)
    assert lambdas(cd) == lambdas(gs)
