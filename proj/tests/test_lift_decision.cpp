#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "metalift/lift_decision.hpp"

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

// Unpruned brute-force oracle: every set partition, every ordering per block,
// conditions (a), (b), (c) checked literally.
bool oracle_liftable(const Decomposition& dec_in, const GroupParams& params, bool strict_uniform_a = false) {
    Decomposition dec;
    for (const auto& s : dec_in.summands) dec.summands.push_back(normalize_spec(params, s));
    const int s = static_cast<int>(dec.summands.size());
    if (s == 0) return true;
    const i64 m = params.m();
    const i64 a0 = params.a0();

    auto block_feasible_orderings = [&](const std::vector<int>& block) {
        // returns set of achievable a-values over all orderings, empty if none
        std::vector<int> perm = block;
        std::sort(perm.begin(), perm.end());
        std::vector<int> avals;
        do {
            i64 sum = 0;
            bool ok = true;
            for (size_t j = 0; j < perm.size(); ++j) {
                const auto& cur = dec.summands[static_cast<size_t>(perm[j])];
                sum += cur.kappa;
                if (j > 0) {
                    const auto& prev = dec.summands[static_cast<size_t>(perm[j - 1])];
                    if (cur.epsilon != ((prev.epsilon + a0 * prev.kappa) % m + m) % m) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) continue;
            if (sum > params.q()) continue;
            i64 r = sum % m;
            if (r != 0 && r != 1) continue;
            if (std::find(avals.begin(), avals.end(), static_cast<int>(r)) == avals.end())
                avals.push_back(static_cast<int>(r));
        } while (std::next_permutation(perm.begin(), perm.end()));
        return avals;
    };

    // enumerate set partitions by assigning each element to an existing or new block
    std::vector<std::vector<int>> blocks;
    auto rec = [&](auto&& self, int elem) -> bool {
        if (elem == s) {
            std::vector<std::vector<int>> a_options;
            for (const auto& b : blocks) {
                auto av = block_feasible_orderings(b);
                if (av.empty()) return false;
                a_options.push_back(av);
            }
            if (!strict_uniform_a) return true;
            for (int a : {0, 1}) {
                bool all = true;
                for (const auto& av : a_options)
                    all = all && std::find(av.begin(), av.end(), a) != av.end();
                if (all) return true;
            }
            return false;
        }
        for (size_t bi = 0; bi < blocks.size(); ++bi) {
            blocks[bi].push_back(elem);
            if (self(self, elem + 1)) return true;
            blocks[bi].pop_back();
        }
        blocks.push_back({elem});
        if (self(self, elem + 1)) return true;
        blocks.pop_back();
        return false;
    };
    return rec(rec, 0);
}

}  // namespace

TEST_CASE("worked example verdicts (q=25, m=4, alpha=7)") {
    GroupParams g = group575();

    // single summands: liftable exactly when kappa = 0 or 1 mod 4
    std::vector<i64> expected_yes{1, 4, 5, 8, 9, 12, 13, 16, 17, 20, 21, 24, 25};
    for (i64 kappa = 1; kappa <= 25; ++kappa) {
        auto d = decide_lift(Decomposition{{SummandSpec{2, kappa}}}, g);
        bool want = std::find(expected_yes.begin(), expected_yes.end(), kappa) != expected_yes.end();
        CHECK(d.liftable() == want);
    }

    // projective summand: single chain, a-flag 1
    auto proj = decide_lift(Decomposition{{SummandSpec{0, 25}}}, g);
    REQUIRE(proj.liftable());
    CHECK(proj.plan->chains.size() == 1);
    CHECK(proj.plan->a_flags[0] == 1);

    // V(1,2) + V(3,2): one chain, 3 = 1 + 1*2 mod 4, sum 4 = 0 mod 4
    auto yes = decide_lift(Decomposition{{SummandSpec{1, 2}, SummandSpec{3, 2}}}, g);
    REQUIRE(yes.liftable());
    REQUIRE(yes.plan->chains.size() == 1);
    CHECK(yes.plan->chains[0].size() == 2);
    CHECK(yes.plan->a_flags[0] == 0);
    // the chain must start at epsilon=1 and continue with epsilon=3
    CHECK(yes.plan->input.summands[static_cast<size_t>(yes.plan->chains[0][0])].epsilon == 1);
    CHECK(yes.plan->input.summands[static_cast<size_t>(yes.plan->chains[0][1])].epsilon == 3);
    // the uniformizer sits at the split between the two kappa=2 summands
    REQUIRE(yes.plan->subdiag[0].size() == 3);
    CHECK(yes.plan->subdiag[0][0] == SubdiagSymbol::unit);
    CHECK(yes.plan->subdiag[0][1] == SubdiagSymbol::uniformizer);
    CHECK(yes.plan->subdiag[0][2] == SubdiagSymbol::unit);

    // V(1,2) + V(1,2): not liftable
    auto no1 = decide_lift(Decomposition{{SummandSpec{1, 2}, SummandSpec{1, 2}}}, g);
    CHECK_FALSE(no1.liftable());
    REQUIRE(no1.refusal.has_value());
    CHECK(no1.refusal->s == 2);

    // V(eps1, 21) + V(eps1 + a0*21, 23): 44 > 25 and 23 = 3 mod 4
    i64 eps1 = 1;
    i64 eps2 = (eps1 + g.a0() * 21) % 4;
    auto no2 = decide_lift(Decomposition{{SummandSpec{eps1, 21}, SummandSpec{eps2, 23}}}, g);
    CHECK_FALSE(no2.liftable());
}

TEST_CASE("empty decomposition lifts trivially") {
    GroupParams g = group575();
    auto d = decide_lift(Decomposition{}, g);
    CHECK(d.liftable());
    CHECK(d.plan->chains.empty());
}

TEST_CASE("returned plans re-validate independently") {
    GroupParams g = group575();
    std::mt19937_64 rng(99);
    int validated = 0;
    for (int trial = 0; trial < 400; ++trial) {
        Decomposition dec;
        int s = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < s; ++i)
            dec.summands.push_back({static_cast<i64>(rng() % 4), 1 + static_cast<i64>(rng() % 25)});
        auto d = decide_lift(dec, g);
        if (d.liftable()) {
            CHECK(plan_conditions_hold(*d.plan, g));
            ++validated;
        }
    }
    CHECK(validated > 20);
}

TEST_CASE("decide agrees with the unpruned brute-force oracle (seeded, s <= 5, kappa <= q)") {
    for (const GroupParams& g : {group575(), group328()}) {
        std::mt19937_64 rng(4242);
        for (int trial = 0; trial < 250; ++trial) {
            Decomposition dec;
            int s = 1 + static_cast<int>(rng() % 5);
            for (int i = 0; i < s; ++i)
                dec.summands.push_back({static_cast<i64>(rng() % g.m()),
                                        1 + static_cast<i64>(rng() % g.q())});
            bool got = decide_lift(dec, g).liftable();
            bool want = oracle_liftable(dec, g);
            CAPTURE(g.p(), trial, s);
            CHECK(got == want);
        }
    }
}

TEST_CASE("strict-uniform-a mode agrees with the strict oracle") {
    for (const GroupParams& g : {group575(), group328()}) {
        std::mt19937_64 rng(777);
        int differences = 0;
        for (int trial = 0; trial < 150; ++trial) {
            Decomposition dec;
            int s = 1 + static_cast<int>(rng() % 4);
            for (int i = 0; i < s; ++i)
                dec.summands.push_back({static_cast<i64>(rng() % g.m()),
                                        1 + static_cast<i64>(rng() % 8)});
            bool strict = decide_lift(dec, g, true).liftable();
            bool strict_oracle = oracle_liftable(dec, g, true);
            bool lax = decide_lift(dec, g, false).liftable();
            CHECK(strict == strict_oracle);
            if (strict != lax) ++differences;
            if (strict) CHECK(lax);  // strict implies lax
        }
        (void)differences;
    }
}

TEST_CASE("chain graph edges follow the successor rule") {
    GroupParams g = group575();
    Decomposition dec{{SummandSpec{1, 2}, SummandSpec{3, 2}, SummandSpec{0, 1}}};
    ChainGraph cg = build_chain_graph(dec.sorted(), g);
    CHECK(cg.nodes.size() == 3);
    for (auto [i, j] : cg.edges) {
        i64 want = (cg.nodes[static_cast<size_t>(i)].epsilon + g.a0() * cg.nodes[static_cast<size_t>(i)].kappa) % 4;
        CHECK(cg.nodes[static_cast<size_t>(j)].epsilon == want);
    }
}

TEST_CASE("eigenvalue assignment: worked example chain") {
    GroupParams g = group575();
    auto d = decide_lift(Decomposition{{SummandSpec{1, 2}, SummandSpec{3, 2}}}, g);
    REQUIRE(d.liftable());
    assign_eigenvalues(*d.plan, g);
    REQUIRE(d.plan->exponents.size() == 1);
    CHECK(d.plan->exponents[0] == std::vector<i64>{1, 7, 24, 18});
    CHECK(orbit_balance_check(*d.plan, g));
}

TEST_CASE("eigenvalue assignment: 1x1 chain with a-flag 1 gets exponent 0") {
    GroupParams g = group575();
    auto d = decide_lift(Decomposition{{SummandSpec{2, 1}}}, g);
    REQUIRE(d.liftable());
    assign_eigenvalues(*d.plan, g);
    CHECK(d.plan->exponents[0] == std::vector<i64>{0});
    CHECK(orbit_balance_check(*d.plan, g));
}

TEST_CASE("eigenvalue assignment: projective chain covers everything") {
    GroupParams g = group575();
    auto d = decide_lift(Decomposition{{SummandSpec{0, 25}}}, g);
    REQUIRE(d.liftable());
    assign_eigenvalues(*d.plan, g);
    REQUIRE(d.plan->exponents[0].size() == 25);
    // six full orbits then the reserved 0 slot at the end
    CHECK(d.plan->exponents[0].front() == 1);
    CHECK(d.plan->exponents[0].back() == 0);
    std::vector<i64> sorted_exps = d.plan->exponents[0];
    std::sort(sorted_exps.begin(), sorted_exps.end());
    for (i64 i = 0; i < 25; ++i) CHECK(sorted_exps[static_cast<size_t>(i)] == i);
    CHECK(orbit_balance_check(*d.plan, g));
    // dim - dim^{C_q} = 25 - 1 = 24 = 0 mod 4
    CHECK((25 - 1) % 4 == 0);
}

TEST_CASE("within-chain exponents are distinct and follow the successor law") {
    for (const GroupParams& g : {group575(), group328()}) {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 200; ++trial) {
            Decomposition dec;
            int s = 1 + static_cast<int>(rng() % 3);
            for (int i = 0; i < s; ++i)
                dec.summands.push_back({static_cast<i64>(rng() % g.m()),
                                        1 + static_cast<i64>(rng() % g.q())});
            auto d = decide_lift(dec, g);
            if (!d.liftable()) continue;
            assign_eigenvalues(*d.plan, g);
            for (size_t c = 0; c < d.plan->chains.size(); ++c) {
                const auto& exps = d.plan->exponents[c];
                std::vector<i64> cp = exps;
                std::sort(cp.begin(), cp.end());
                CHECK(std::adjacent_find(cp.begin(), cp.end()) == cp.end());  // pairwise distinct
                // lambda-successor: inside an orbit lambda_{i+1} = lambda_i^alpha,
                // wraparound at orbit ends (positions divisible by m)
                i64 n_orbit = static_cast<i64>(exps.size()) - d.plan->a_flags[c];
                for (i64 i = 1; i <= n_orbit; ++i) {
                    i64 lam_next = (exps[static_cast<size_t>(i - 1)] * g.alpha()) % g.q();
                    i64 o = g.ord_at(g.q());
                    if (i % o != 0)
                        CHECK(exps[static_cast<size_t>(i)] == lam_next);
                    else
                        CHECK(exps[static_cast<size_t>(i - o)] == lam_next);
                }
            }
            if (g.faithful()) CHECK(orbit_balance_check(*d.plan, g));
        }
    }
}

TEST_CASE("orbit_balance_check rejects unfaithful groups") {
    GroupParams g = new_group(5, 2, 4, 1);
    g.bind_a0(0);
    LiftPlan plan;
    CHECK_THROWS_AS(orbit_balance_check(plan, g), std::invalid_argument);
}
