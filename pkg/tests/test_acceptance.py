"""Acceptance gate: one check per shipped guarantee, one verdict line each.

Every test prints ``CRITERION <k>: PASS/FAIL — <measurements>`` so the run
log doubles as a conformance report.  Long release-gating checks (marked
``extended``) are skipped unless ``APNLAB_EXTENDED=1``.
"""

from __future__ import annotations

import time
import warnings

import numpy as np
import pytest

from apnlab.analysis import (
    brute_cubic_root_count,
    cubic_root_count,
    cubic_trinomial_has_root,
    ddt,
    is_apn,
    is_apn_quadratic,
    sweep_key_lemma,
    verify_adjoint_permutation_agreement,
    verify_resultant_identity,
    verify_subfield_scaled_permutations,
)
from apnlab.bitlinalg import BitMatrix, rank
from apnlab.families import (
    make_edel_pott,
    make_new_bivariate,
    make_new_trinomial,
    representatives,
    search_trinomial_params,
    sweep_primitives,
)
from apnlab.gf2n import field_new, poly_is_irreducible, subfield_embedding
from apnlab.invariants import gamma_rank
from apnlab.vbf import (
    LinearizedPoly,
    UnivariatePoly,
    compose,
    random_affine_permutation,
    to_table,
)

from conftest import get_field, requires_extended
from test_bitlinalg import naive_rank

GIB = 1 << 30

# Published rank values the tables must reproduce exactly.
TABLE4_RANKS = (11818, 12370, 15358, 13200, 13800, 13842,
                13642, 13700, 13798, 13642, 13960, 14034)
TABLE5_RANKS = (38470, 41494, 38470, 58676, 61726, 60894,
                130816, 47890, 48428, 48460, 48596, 48558)
# rows whose printed forms carry representation-dependent coefficients
COEFF_ROWS_GF256 = (4, 6, 9, 11)


def report(num: int, ok: bool, detail: str) -> None:
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def subfield_unit_exponents(m: int) -> list[int]:
    """Primitive-power exponents of GF(2^m)* inside GF(2^(3m))."""
    step = ((1 << (3 * m)) - 1) // ((1 << m) - 1)
    return [step * j for j in range((1 << m) - 1)]


# ---------------------------------------------------------------------------
# criterion 1: the bivariate family is APN over its stated degrees
# ---------------------------------------------------------------------------

def test_criterion_01_bivariate_family_apn():
    budget_s = 120.0
    t0 = time.perf_counter()
    deltas = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for m in (2, 4, 5, 7):
            deltas[m] = ddt(make_new_bivariate(m).table).delta
    elapsed = time.perf_counter() - t0
    ok = all(d == 2 for d in deltas.values()) and elapsed <= budget_s
    report(1, ok,
           f"differential uniformity {deltas} over GF(2^(2m)), "
           f"m in (2,4,5,7), {elapsed:.1f}s (budget {budget_s:.0f}s)")


@requires_extended
@pytest.mark.extended
def test_criterion_01x_bivariate_m8():
    budget_s = 3600.0
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        delta = ddt(make_new_bivariate(8).table).delta
    elapsed = time.perf_counter() - t0
    ok = delta == 2 and elapsed <= budget_s
    report(1, ok, f"extended m=8: delta={delta} over GF(2^16), "
                  f"{elapsed:.1f}s (budget {budget_s:.0f}s)")


# ---------------------------------------------------------------------------
# criterion 2: the trinomial family is APN for every admissible parameter
# ---------------------------------------------------------------------------

def test_criterion_02_trinomial_family_apn():
    budget_s = 600.0
    t0 = time.perf_counter()
    checked = 0
    failures = []
    for m in (2, 3):
        tuples = search_trinomial_params(m)
        assert tuples, f"no parameters found for m={m}"
        for s, mu in tuples:
            for v_exp in subfield_unit_exponents(m):
                inst = make_new_trinomial(m, s, mu, v_exp)
                checked += 1
                if ddt(inst.table).delta != 2:
                    failures.append((m, s, mu.bits, v_exp))
    # a sampled slice of the next degree up
    sampled = search_trinomial_params(4)[:6]
    assert len(sampled) >= 5
    for s, mu in sampled:
        inst = make_new_trinomial(4, s, mu, subfield_unit_exponents(4)[1])
        checked += 1
        if ddt(inst.table).delta != 2:
            failures.append((4, s, mu.bits, "sample"))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed <= budget_s
    report(2, ok,
           f"{checked} members delta=2 (m=2,3 exhaustive x all subfield v; "
           f"6 sampled at m=4), failures={failures[:4]}, "
           f"{elapsed:.1f}s (budget {budget_s:.0f}s)")


# ---------------------------------------------------------------------------
# criterion 3: the GF(2^8) rank table reproduces all published values
# ---------------------------------------------------------------------------

def test_criterion_03_rank_table_gf256():
    budget_s = 7200.0
    per_row_budget = 1 * GIB
    t0 = time.perf_counter()
    rows = representatives(8)
    mismatches = []
    swept = {}
    for k, (inst, want) in enumerate(zip(rows, TABLE4_RANKS), start=1):
        got = gamma_rank(inst.table, family=inst.label,
                         budget=per_row_budget).gamma_rank
        if got == want:
            continue
        if k in COEFF_ROWS_GF256:
            # printed coefficients depend on the primitive element: sweep the
            # other generator classes before declaring a mismatch
            hit = None
            for u in sweep_primitives(field_new(8), limit=128):
                alt = representatives(8, u=u)[k - 1]
                if not is_apn(alt.table):
                    continue
                r = gamma_rank(alt.table, budget=per_row_budget).gamma_rank
                if r == want:
                    hit = u.bits
                    break
            if hit is not None:
                swept[k] = hit
                continue
        mismatches.append((k, got, want))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed <= budget_s
    report(3, ok,
           f"12/12 rows exact={not mismatches}, mismatches={mismatches}, "
           f"primitive sweeps used={swept or 'none'}, <=1GiB/row, "
           f"{elapsed:.1f}s (budget {budget_s:.0f}s)")


# ---------------------------------------------------------------------------
# criterion 4 (extended): the GF(2^9) gated rows reproduce published values
# ---------------------------------------------------------------------------

@requires_extended
@pytest.mark.extended
def test_criterion_04x_rank_table_gf512_gated_rows():
    per_row_budget = 12 * GIB
    t0 = time.perf_counter()
    rows = representatives(9)
    got = {}
    for k in (1, 12):
        got[k] = gamma_rank(rows[k - 1].table,
                            budget=per_row_budget).gamma_rank
    elapsed = time.perf_counter() - t0
    want = {1: TABLE5_RANKS[0], 12: TABLE5_RANKS[11]}
    ok = got == want
    report(4, ok, f"GF(2^9) rows 1,12: got={got} want={want}, "
                  f"<=12GiB, {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# criterion 5: the factored resultant identity holds pointwise
# ---------------------------------------------------------------------------

def test_criterion_05_resultant_identity():
    budget_s = 10.0
    t0 = time.perf_counter()
    reports = {m: verify_resultant_identity(m) for m in (4, 5)}
    elapsed = time.perf_counter() - t0
    ok = (all(r.all_ok for r in reports.values())
          and all(r.checked == (1 << m) ** 3 for m, r in reports.items())
          and elapsed <= budget_s)
    detail = {m: (r.identity_holds, r.b_coeff_zero_set_ok,
                  r.denominator_nonzero_ok) for m, r in reports.items()}
    report(5, ok,
           f"full sweeps m=4,5 (identity, zero-set, denominator)={detail}, "
           f"{elapsed:.2f}s (budget {budget_s:.0f}s)")


# ---------------------------------------------------------------------------
# criterion 6: the five-part coefficient lemma holds at every point
# ---------------------------------------------------------------------------

def test_criterion_06_key_lemma_exhaustive():
    budget_s = 60.0
    t0 = time.perf_counter()
    tuples_checked = 0
    bad = []
    for m in (2, 3):
        for s, mu in search_trinomial_params(m):
            for v_exp in subfield_unit_exponents(m):
                sweep = sweep_key_lemma(m, s, mu, v_exp)
                tuples_checked += 1
                if not sweep.all_pass:
                    bad.append((m, s, mu.bits, v_exp,
                                sweep.claim_failures[:2],
                                sweep.factorization_failures[:2]))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed <= budget_s
    report(6, ok,
           f"{tuples_checked} parameter tuples, five claims plus printed "
           f"factorizations at every nonzero point, failures={bad[:2]}, "
           f"{elapsed:.1f}s (budget {budget_s:.0f}s)")


# ---------------------------------------------------------------------------
# criterion 7: the cubic-root classifier is exact
# ---------------------------------------------------------------------------

def test_criterion_07_cubic_classifier_exact():
    budget_s = 10.0
    t0 = time.perf_counter()
    cases = 0
    wrong = []
    for m in (3, 4, 5, 6):
        f = get_field(m)
        for a in range(1, f.order):
            for b in range(1, f.order):
                cases += 1
                got = cubic_root_count(f, a, b).root_count
                want = brute_cubic_root_count(f, a, b)
                if got != want:
                    wrong.append((m, a, b, got, want))
    elapsed = time.perf_counter() - t0
    ok = not wrong and elapsed <= budget_s
    report(7, ok, f"{cases} nonzero (a,b) pairs over m=3..6, "
                  f"mismatches={wrong[:3]}, {elapsed:.1f}s "
                  f"(budget {budget_s:.0f}s)")


# ---------------------------------------------------------------------------
# criterion 8: supporting lemmas (trinomial roots, scaled maps, adjoints)
# ---------------------------------------------------------------------------

def test_criterion_08_supporting_lemmas():
    checks = []
    # z^3 + z + 1 has no root outside multiples-of-3 degrees
    rootless = [m for m in (2, 4, 5, 7, 8, 10, 11)
                if not cubic_trinomial_has_root(m)]
    checks.append(("rootless", len(rootless) == 7))
    # every subfield multiple of a valid kernel map is still a permutation,
    # for every admissible (s, mu) through degree parameter 4
    swept = 0
    for m in (2, 3, 4):
        for s, mu in search_trinomial_params(m):
            assert verify_subfield_scaled_permutations(m, s, mu)
            swept += 1
    checks.append(("scaled-permutations-exhaustive", swept == 24 + 756 + 6720))
    # a linear map permutes exactly when its trace-adjoint does
    f9 = get_field(9)
    rng = np.random.default_rng(2024)
    agree = all(
        verify_adjoint_permutation_agreement(
            LinearizedPoly(f9, [int(c) for c in rng.integers(0, 512, 9)]))
        for _ in range(200))
    checks.append(("adjoint-agreement-200", agree))
    ok = all(flag for _, flag in checks)
    report(8, ok, f"{checks}, scaled sweeps={swept}")


# ---------------------------------------------------------------------------
# criterion 9: the rank invariant is invariant where it must be
# ---------------------------------------------------------------------------

def test_criterion_09_rank_invariance():
    budget_s = 60.0
    t0 = time.perf_counter()
    f = get_field(6)
    base = to_table(UnivariatePoly.monomial(f, 3))
    want = gamma_rank(base).gamma_rank
    rng = np.random.default_rng(99)
    ranks = []
    for _ in range(10):
        pre = random_affine_permutation(f, rng)
        post = random_affine_permutation(f, rng)
        ranks.append(gamma_rank(compose(post, compose(base, pre))).gamma_rank)
    # independence from the field representation: another irreducible modulus
    alt_mod = next(p for p in range(65, 128)
                   if p != f.modulus and poly_is_irreducible(p))
    alt_field = field_new(6, modulus=alt_mod)
    alt_rank = gamma_rank(
        to_table(UnivariatePoly.monomial(alt_field, 3))).gamma_rank
    elapsed = time.perf_counter() - t0
    ok = (want == 1102 and all(r == want for r in ranks)
          and alt_rank == want and elapsed <= budget_s)
    report(9, ok,
           f"10 affine conjugates of the cube map all rank {want}, "
           f"modulus {alt_mod:#x} gives {alt_rank}, "
           f"{elapsed:.1f}s (budget {budget_s:.0f}s)")


# ---------------------------------------------------------------------------
# criterion 10 (extended): the plateaued construction hits the table value
# ---------------------------------------------------------------------------

@requires_extended
@pytest.mark.extended
def test_criterion_10x_plateaued_construction_rank():
    budget_s = 7200.0
    t0 = time.perf_counter()
    f8 = field_new(8)
    found = None
    tried = 0
    for u in sweep_primitives(f8, limit=128):
        tried += 1
        inst = make_edel_pott(f8, u=u)
        if is_apn(inst.table):
            found = (u.bits, gamma_rank(inst.table).gamma_rank)
            break
    elapsed = time.perf_counter() - t0
    ok = found is not None and found[1] == 14034 and elapsed <= budget_s
    report(10, ok, f"APN member found after {tried} primitives: "
                   f"(u, rank)={found}, want rank 14034, {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# criterion 11: the quadratic shortcut is trustworthy
# ---------------------------------------------------------------------------

def test_criterion_11_quadratic_shortcut_agreement():
    f = get_field(6)
    rng = np.random.default_rng(6)
    weight2 = [e for e in range(1, 63) if bin(e).count("1") <= 2]
    disagreements = []
    for i in range(20):
        k = int(rng.integers(2, 6))
        terms = [(int(rng.integers(1, 64)), int(e))
                 for e in rng.choice(weight2, k, replace=False)]
        t = to_table(UnivariatePoly(f, terms))
        if is_apn(t) != is_apn_quadratic(t):
            disagreements.append(("random", i))
    for inst in representatives(8):
        if is_apn(inst.table) != is_apn_quadratic(inst.table):
            disagreements.append(("row", inst.label))
    ok = not disagreements
    report(11, ok, f"20 random quadratics over GF(2^6) plus all 12 "
                   f"reference rows over GF(2^8); "
                   f"disagreements={disagreements}")


# ---------------------------------------------------------------------------
# criterion 12: packed elimination equals textbook elimination
# ---------------------------------------------------------------------------

def test_criterion_12_rank_against_naive():
    rng = np.random.default_rng(123)
    wrong = 0
    for i in range(1000):
        rows = int(rng.integers(1, 257))
        cols = int(rng.integers(1, 257))
        density = float(rng.uniform(0.02, 0.98))
        d = (rng.random((rows, cols)) < density).astype(np.uint8)
        if rank(BitMatrix.from_dense01(d)) != naive_rank(d):
            wrong += 1
    ok = wrong == 0
    report(12, ok, f"1000 random matrices up to 256x256, "
                   f"mismatches={wrong}")
