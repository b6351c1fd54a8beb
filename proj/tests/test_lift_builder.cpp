#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "metalift/lift_builder.hpp"

using namespace metalift;

namespace {

GroupParams group575() {
    GroupParams g = new_group(5, 2, 4, 7);
    g.bind_a0(discrete_log_a0(make_field(g), 7));
    return g;
}

GroupParams group328() {
    GroupParams g = new_group(3, 2, 2, 8);
    g.bind_a0(discrete_log_a0(make_field(g), 8));
    return g;
}

LiftPlan worked_example_plan(const GroupParams& g) {
    auto d = decide_lift(Decomposition{{SummandSpec{1, 2}, SummandSpec{3, 2}}}, g);
    REQUIRE(d.liftable());
    LiftPlan plan = *d.plan;
    assign_eigenvalues(plan, g);
    return plan;
}

}  // namespace

TEST_CASE("build_T for the worked-example chain") {
    GroupParams g = group575();
    LiftPlan plan = worked_example_plan(g);
    auto ring = make_ring(g, 8, 2);
    LocalMatrix T = build_T(plan, ring);
    REQUIRE(T.dim() == 4);
    // diagonal zeta^1, zeta^7, zeta^24, zeta^18; subdiagonal (1, t, 1)
    CHECK(ring->compare(T.at(0, 0), ring->zeta_q(1)).equal);
    CHECK(ring->compare(T.at(1, 1), ring->zeta_q(7)).equal);
    CHECK(ring->compare(T.at(2, 2), ring->zeta_q(24)).equal);
    CHECK(ring->compare(T.at(3, 3), ring->zeta_q(18)).equal);
    CHECK(ring->compare(T.at(1, 0), ring->one()).equal);
    CHECK(ring->compare(T.at(2, 1), ring->uniformizer()).equal);
    CHECK(ring->compare(T.at(3, 2), ring->one()).equal);
    // T^q = Id at precision and eigenvalues pairwise distinct
    CHECK(matrices_equal_at_precision(T.pow(25), LocalMatrix::identity(ring, 4)).equal);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) CHECK_FALSE(ring->compare(T.at(i, i), T.at(j, j)).equal);
}

TEST_CASE("single 1x1 chain with a-flag 1") {
    GroupParams g = group575();
    auto d = decide_lift(Decomposition{{SummandSpec{2, 1}}}, g);
    REQUIRE(d.liftable());
    LiftPlan plan = *d.plan;
    assign_eigenvalues(plan, g);
    auto ring = make_ring(g, 4, 2);
    LocalMatrix T = build_T(plan, ring);
    REQUIRE(T.dim() == 1);
    CHECK(ring->compare(T.at(0, 0), ring->one()).equal);
    LocalMatrix G = build_Gamma_recursive(plan, ring, g);
    CHECK(ring->compare(G.at(0, 0), ring->zeta_m(2)).equal);
    LiftPair pair{ring, T, G, plan};
    auto rep = verify_lift(pair, g);
    for (const auto& c : rep.checks) {
        CAPTURE(c.name, c.details);
        CHECK(c.pass);
    }
}

TEST_CASE("worked example: Gamma exists, verifies, and reduces correctly") {
    GroupParams g = group575();
    LiftPlan plan = worked_example_plan(g);
    auto ring = make_ring(g, 8, 2);
    LocalMatrix T = build_T(plan, ring);
    LocalMatrix G = build_Gamma_recursive(plan, ring, g);
    LiftPair pair{ring, T, G, plan};

    // sigma(E_1) = zeta_m * E_1
    CHECK(ring->compare(G.at(0, 0), ring->zeta_m(1)).equal);

    LiftReport rep = verify_lift(pair, g);
    for (const auto& c : rep.checks) {
        CAPTURE(c.name, c.details);
        CHECK(c.pass);
        CHECK(c.precision >= 32);
    }

    // diagonal of Gamma reduces to zeta^eps alpha^(i-1)
    auto F = ring->residue_field();
    FieldElement ze = F->pow(F->zeta_m(), 1);
    FieldElement ap = F->one();
    for (int i = 0; i < 4; ++i) {
        CHECK(reduce(G.at(i, i)) == ze * ap);
        ap = ap * F->from_int(g.alpha());
    }

    ReductionResult red = reduce_lift_full(pair, g);
    CHECK(red.match);
    Decomposition want{{SummandSpec{1, 2}, SummandSpec{3, 2}}};
    CHECK(red.computed == want.sorted());
    CHECK(reduce_lift(pair, g) == want.sorted());

    // reduced T is Id + Jordan pattern with blocks (2,2)
    CHECK(red.module.tau.at(1, 0) == F->one());
    CHECK(red.module.tau.at(2, 1).is_zero());
    CHECK(red.module.tau.at(3, 2) == F->one());
}

TEST_CASE("Gamma^k T = T^(alpha^k) Gamma^k for k = 1..m") {
    GroupParams g = group575();
    LiftPlan plan = worked_example_plan(g);
    auto ring = make_ring(g, 6, 2);
    LocalMatrix T = build_T(plan, ring);
    LocalMatrix G = build_Gamma_recursive(plan, ring, g);
    for (i64 k = 1; k <= 4; ++k) {
        LocalMatrix Gk = G.pow(static_cast<u64>(k));
        u64 ak = pow_mod(7, static_cast<u64>(k), 25);
        CHECK(matrices_equal_at_precision(Gk.mul(T), T.pow(ak).mul(Gk)).equal);
    }
}

TEST_CASE("recursive vs closed-form Gamma agree (300 seeded single chains, d <= 6)") {
    std::mt19937_64 rng(60322);
    GroupParams g5 = group575();
    GroupParams g3 = group328();
    for (int done = 0; done < 300; ++done) {
        const GroupParams& g = (done % 2 == 0) ? g5 : g3;
        auto ring = make_ring(g, 4, 2);
        int d = 2 + static_cast<int>(rng() % 5);
        std::vector<i64> exps;  // distinct exponents, otherwise arbitrary
        while (static_cast<int>(exps.size()) < d) {
            i64 c = static_cast<i64>(rng() % static_cast<u64>(g.q()));
            if (std::find(exps.begin(), exps.end(), c) == exps.end()) exps.push_back(c);
        }
        std::vector<LocalElement> lams, as;
        for (i64 ex : exps) lams.push_back(ring->zeta_q(ex));
        for (int i = 0; i + 1 < d; ++i)
            as.push_back((rng() % 2) ? ring->uniformizer() : ring->one());
        i64 eps = static_cast<i64>(rng() % static_cast<u64>(g.m()));

        auto rec = build_gamma_block_recursive(lams, as, eps, ring, g);
        auto closed = build_gamma_block_closed_form(lams, as, eps, ring, g);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                CAPTURE(done, d, i, j);
                CHECK(values_agree(rec[static_cast<size_t>(i)][static_cast<size_t>(j)],
                                   closed[static_cast<size_t>(i)][static_cast<size_t>(j)]));
            }
    }
}

TEST_CASE("gamma_{1,1} is zeta^eps and gamma_{i,i} reduces to zeta^eps alpha^(i-1)") {
    GroupParams g = group575();
    auto ring = make_ring(g, 4, 2);
    std::vector<i64> exps{1, 7, 24, 18};
    std::vector<LocalElement> lams;
    for (i64 ex : exps) lams.push_back(ring->zeta_q(ex));
    std::vector<LocalElement> as{ring->one(), ring->uniformizer(), ring->one()};
    auto F = ring->residue_field();
    for (i64 eps = 0; eps < 4; ++eps) {
        auto closed = build_gamma_block_closed_form(lams, as, eps, ring, g);
        CHECK(ring->compare(closed[0][0], ring->zeta_m(eps)).equal);
        FieldElement ze = F->pow(F->zeta_m(), static_cast<u64>(eps));
        FieldElement ap = F->one();
        for (int i = 0; i < 4; ++i) {
            CHECK(reduce(closed[static_cast<size_t>(i)][static_cast<size_t>(i)]) == ze * ap);
            ap = ap * F->from_int(g.alpha());
        }
    }
}

TEST_CASE("replacing the split by a unit is caught by the block-structure check") {
    GroupParams g = group575();
    LiftPlan plan = worked_example_plan(g);
    auto ring = make_ring(g, 6, 2);
    LiftPlan tampered = plan;
    tampered.subdiag[0][1] = SubdiagSymbol::unit;
    LocalMatrix T = build_T(tampered, ring);
    LocalMatrix G = build_Gamma_recursive(tampered, ring, g);
    // verify against the original plan: the predicted split structure is gone
    LiftPair pair{ring, T, G, plan};
    LiftReport rep = verify_lift(pair, g);
    bool block_check_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "Gamma mod m is block lower triangular" && !c.pass) block_check_failed = true;
    CHECK(block_check_failed);
}

TEST_CASE("round trips over (5,2,4,7)") {
    GroupParams g5 = group575();

    SECTION("worked example round trip") {
        auto r = round_trip(Decomposition{{SummandSpec{1, 2}, SummandSpec{3, 2}}}, g5, {8, 2, false});
        CHECK(r.liftable);
        CHECK(r.report.all_pass());
        CHECK(r.round_trip_ok);
    }
    SECTION("non-liftable input") {
        auto r = round_trip(Decomposition{{SummandSpec{1, 2}, SummandSpec{1, 2}}}, g5, {});
        CHECK_FALSE(r.liftable);
        REQUIRE(r.refusal.has_value());
    }
    SECTION("single summands, liftable and not") {
        for (i64 kappa : {1, 4, 5, 8, 9}) {
            auto r = round_trip(Decomposition{{SummandSpec{1, kappa}}}, g5, {});
            CAPTURE(kappa);
            CHECK(r.liftable);
            CHECK(r.report.all_pass());
            CHECK(r.round_trip_ok);
        }
        for (i64 kappa : {2, 3, 6, 7}) {
            auto r = round_trip(Decomposition{{SummandSpec{1, kappa}}}, g5, {});
            CHECK_FALSE(r.liftable);
        }
    }
}

TEST_CASE("round trips over (3,2,2,8) including multi-chain plans") {
    GroupParams g = group328();
    std::mt19937_64 rng(505);
    int lifted = 0;
    for (int trial = 0; trial < 60; ++trial) {
        Decomposition dec;
        int s = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < s; ++i)
            dec.summands.push_back({static_cast<i64>(rng() % 2), 1 + static_cast<i64>(rng() % 6)});
        auto r = round_trip(dec, g, {});
        if (!r.liftable) continue;
        ++lifted;
        CAPTURE(trial);
        CHECK(r.report.all_pass());
        CHECK(r.round_trip_ok);
    }
    CHECK(lifted >= 10);
}

TEST_CASE("chain split at every position reduces to one-dimensional summands") {
    // one chain of four kappa = 1 summands, uniformizer at every subdiagonal
    // slot: the reduction must give eps, eps + a0, eps + 2 a0, eps + 3 a0
    GroupParams g = group575();
    LiftPlan plan;
    plan.input.summands = {SummandSpec{1, 1}, SummandSpec{2, 1}, SummandSpec{3, 1}, SummandSpec{0, 1}};
    plan.chains = {{0, 1, 2, 3}};
    plan.a_flags = {0};  // total dimension 4 = 0 mod 4
    plan.subdiag = {{SubdiagSymbol::uniformizer, SubdiagSymbol::uniformizer, SubdiagSymbol::uniformizer}};
    REQUIRE(plan_conditions_hold(plan, g));
    assign_eigenvalues(plan, g);
    auto ring = make_ring(g, 4, 2);
    LiftPair pair{ring, build_T(plan, ring), build_Gamma_recursive(plan, ring, g), plan};
    auto rep = verify_lift(pair, g);
    for (const auto& c : rep.checks) {
        CAPTURE(c.name, c.details);
        CHECK(c.pass);
    }
    ReductionResult red = reduce_lift_full(pair, g);
    CHECK(red.match);
    Decomposition want{{SummandSpec{1, 1}, SummandSpec{2, 1}, SummandSpec{3, 1}, SummandSpec{0, 1}}};
    CHECK(red.computed == want.sorted());
}

TEST_CASE("all liftable single summands over (5,2,4,7) round-trip") {
    GroupParams g = group575();
    for (i64 kappa : {1, 4, 5, 8, 9, 12, 13, 16, 17, 20, 21, 24, 25}) {
        auto r = round_trip(Decomposition{{SummandSpec{2, kappa}}}, g, {});
        CAPTURE(kappa);
        REQUIRE(r.liftable);
        CHECK(r.report.all_pass());
        CHECK(r.round_trip_ok);
    }
}

TEST_CASE("projective module round trip (dimension q = 25)") {
    GroupParams g = group575();
    auto r = round_trip(Decomposition{{SummandSpec{0, 25}}}, g, {4, 2, false});
    CHECK(r.liftable);
    CHECK(r.report.all_pass());
    CHECK(r.round_trip_ok);
    REQUIRE(r.pair.has_value());
    CHECK(r.pair->T.dim() == 25);
}

TEST_CASE("degenerate m=1 group: Gamma is the identity") {
    GroupParams g = new_group(5, 1, 1, 1);
    g.bind_a0(discrete_log_a0(make_field(g), 1));
    auto r = round_trip(Decomposition{{SummandSpec{0, 3}}}, g, {});
    CHECK(r.liftable);
    CHECK(r.report.all_pass());
    CHECK(r.round_trip_ok);
    REQUIRE(r.pair.has_value());
    auto ring = r.pair->ring;
    CHECK(matrices_equal_at_precision(r.pair->Gamma, LocalMatrix::identity(ring, 3)).equal);
}

TEST_CASE("m=1, full dimension kappa = q uses the exponent-0 slot") {
    GroupParams g = new_group(5, 1, 1, 1);
    g.bind_a0(0);
    auto r = round_trip(Decomposition{{SummandSpec{0, 5}}}, g, {});
    REQUIRE(r.liftable);
    CHECK(r.report.all_pass());
    CHECK(r.round_trip_ok);
    // all five 5th roots of unity appear, 0 last
    std::vector<i64> exps = r.pair->plan.exponents[0];
    CHECK(exps.back() == 0);
    std::sort(exps.begin(), exps.end());
    CHECK(exps == std::vector<i64>{0, 1, 2, 3, 4});
}

TEST_CASE("degree-two residue field: the whole pipeline over (5,1,3,1)") {
    // f = ord_3(5) = 2; exercises the y-layer (quadratic Hensel-lifted
    // modulus) through build, verify, reduce and decompose over F_25
    GroupParams g = new_group(5, 1, 3, 1);
    g.bind_a0(discrete_log_a0(make_field(g), 1));
    CHECK(g.f() == 2);
    for (auto dec : {Decomposition{{SummandSpec{1, 3}}},
                     Decomposition{{SummandSpec{2, 1}}},
                     Decomposition{{SummandSpec{1, 3}, SummandSpec{1, 1}}},
                     Decomposition{{SummandSpec{0, 4}}}}) {
        auto r = round_trip(dec, g, {});
        CAPTURE(dec.summands.size());
        REQUIRE(r.liftable);
        CHECK(r.report.all_pass());
        CHECK(r.round_trip_ok);
    }
    // kappa = 2 is neither 0 nor 1 mod 3
    CHECK_FALSE(round_trip(Decomposition{{SummandSpec{0, 2}}}, g, {}).liftable);
}

TEST_CASE("ramification index e = 3") {
    GroupParams g = group575();
    auto ring = make_ring(g, 3, 3);
    CHECK(ring->prec_cap() == 3 * 3 * 20);
    CHECK(valuation(ring->one() - ring->zeta_q(1)) == 3);
    CHECK(valuation(ring->from_int(5)) == 60);
    LocalElement t = ring->uniformizer();
    CHECK(ring->compare(ring->pow(t, 3), ring->one() - ring->zeta_q(1)).equal);
    CHECK(ring->compare(t * divide_by_t(t * t), t * t).equal);
    auto r = round_trip(Decomposition{{SummandSpec{1, 2}, SummandSpec{3, 2}}}, g, {3, 3, false});
    REQUIRE(r.liftable);
    CHECK(r.report.all_pass());
    CHECK(r.round_trip_ok);
}

TEST_CASE("p = 2 ring and round trip") {
    GroupParams g = new_group(2, 3, 3, 1);  // q = 8, m = 3, trivial action
    g.bind_a0(discrete_log_a0(make_field(g), 1));
    CHECK(g.f() == 2);  // ord_3(2) = 2
    auto ring = make_ring(g, 4, 2);
    CHECK(ring->phi_q() == 4);
    CHECK(valuation(ring->from_int(2)) == 8);
    CHECK(ring->compare(ring->pow(ring->zeta_q(1), 8), ring->one()).equal);
    auto r = round_trip(Decomposition{{SummandSpec{1, 3}}}, g, {});
    REQUIRE(r.liftable);
    CHECK(r.report.all_pass());
    CHECK(r.round_trip_ok);
}

TEST_CASE("T-summand count equals zero-entries + 1") {
    GroupParams g = group328();
    auto d = decide_lift(Decomposition{{SummandSpec{0, 2}, SummandSpec{0, 2}, SummandSpec{0, 1}}}, g);
    if (!d.liftable()) return;
    LiftPlan plan = *d.plan;
    assign_eigenvalues(plan, g);
    auto ring = make_ring(g, 4, 2);
    LocalMatrix T = build_T(plan, ring);
    int zeros = 0;
    for (int i = 0; i + 1 < T.dim(); ++i)
        if (ring->compare_zero(T.at(i + 1, i)).equal) ++zeros;
    CHECK(zeros + 1 == static_cast<int>(plan.chains.size()));
}
