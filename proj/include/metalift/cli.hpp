#pragma once

// Command implementations behind the command-line tool.  Each command takes
// parsed inputs and returns an exit code plus a JSON document:
//   0  success
//   1  negative verdict (decide/lift on a non-liftable module)
//   2  input error
//   3  internal verification failure
// File handling and flag parsing live in the tool's main().

#include <random>
#include <sstream>
#include <string>

#include "metalift/json_io.hpp"

namespace metalift::cli {

using io::json;

struct CmdResult {
    int exit_code = 0;
    json output;
};

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInput = 2;
constexpr int kExitVerification = 3;

struct Precision {
    i64 N = 0;  // 0 = derive from the group (cap >= 64)
    i64 e = 2;
};

inline GroupParams bind_group(i64 p, i64 h, i64 m, i64 alpha) {
    GroupParams g = new_group(p, h, m, alpha);
    auto F = make_field(g);
    g.bind_a0(discrete_log_a0(F, g.alpha()));
    return g;
}

inline json field_summary(const GroupParams& g) {
    auto F = make_field(g);
    json mod = json::array();
    for (i64 c : F->modulus_poly()) mod.push_back(c);
    i64 card = 1;
    for (i64 i = 0; i < F->f(); ++i) card *= F->p();
    return json{{"p", F->p()},
                {"f", F->f()},
                {"cardinality", card},
                {"modulus_poly", mod},
                {"zeta_m", io::field_element_to_json(F->zeta_m())},
                {"zeta_m_encoded", F->zeta_m().encoded()}};
}

inline CmdResult cmd_info(i64 p, i64 h, i64 m, i64 alpha) {
    GroupParams g = bind_group(p, h, m, alpha);
    json out{{"group", io::group_to_json(g)}, {"residue_field", field_summary(g)}};
    return {kExitOk, std::move(out)};
}

inline CmdResult cmd_decide(const GroupParams& g, const Decomposition& dec, bool strict_uniform_a) {
    LiftDecision d = decide_lift(dec, g, strict_uniform_a);
    json out;
    out["group"] = io::group_to_json(g);
    out["liftable"] = d.liftable();
    if (d.liftable()) {
        LiftPlan plan = *d.plan;
        assign_eigenvalues(plan, g);
        out["plan"] = io::plan_to_json(plan);
        if (g.faithful()) out["orbit_balanced"] = orbit_balance_check(plan, g);
        return {kExitOk, std::move(out)};
    }
    out["certificate"] = io::refusal_to_json(*d.refusal);
    return {kExitNegative, std::move(out)};
}

inline CmdResult cmd_lift(const GroupParams& g, const Decomposition& dec, Precision prec, bool strict_uniform_a) {
    RoundTripOptions opt;
    opt.N = prec.N;
    opt.e = prec.e;
    opt.strict_uniform_a = strict_uniform_a;
    RoundTripResult r = round_trip(dec, g, opt);
    json out;
    out["group"] = io::group_to_json(g);
    out["liftable"] = r.liftable;
    if (!r.liftable) {
        out["certificate"] = io::refusal_to_json(*r.refusal);
        return {kExitNegative, std::move(out)};
    }
    out["context"] = io::ring_header(*r.pair->ring);
    out["plan"] = io::plan_to_json(r.pair->plan);
    out["T"] = io::local_matrix_to_json(r.pair->T);
    out["Gamma"] = io::local_matrix_to_json(r.pair->Gamma);
    out["report"] = io::report_to_json(r.report);
    out["reduced"] = io::decomposition_to_json(r.reduced);
    out["round_trip_ok"] = r.round_trip_ok;
    int code = (r.report.all_pass() && r.round_trip_ok) ? kExitOk : kExitVerification;
    return {code, std::move(out)};
}

// reduce a stored (T, Gamma) pair modulo the maximal ideal and decompose
inline CmdResult cmd_reduce(const json& doc) {
    const json& hdr = doc.contains("context") ? doc.at("context") : doc.at("group");
    GroupParams g = bind_group(io::int_field(hdr, "p"), io::int_field(hdr, "h"), io::int_field(hdr, "m"),
                               io::int_field(hdr, "alpha"));
    i64 N = hdr.contains("N") ? io::int_field(hdr, "N") : default_precision_level(g, 2);
    i64 e = hdr.contains("e") ? io::int_field(hdr, "e") : 2;
    RingCtxPtr ring = make_ring(g, N, e);
    LocalMatrix T = io::local_matrix_from_json(doc.at("T"), ring);
    LocalMatrix G = io::local_matrix_from_json(doc.at("Gamma"), ring);
    const auto& F = ring->residue_field();
    const int d = T.dim();
    ResidueMatrix tau(F, d), sigma(F, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            tau.at(i, j) = reduce(T.at(i, j));
            sigma.at(i, j) = reduce(G.at(i, j));
        }
    KModule M{std::move(tau), std::move(sigma)};
    RelationReport rel = verify_kg_relations(M, g);
    json out{{"group", io::group_to_json(g)}};
    if (!rel.all_ok()) {
        out["error"] = "reduced pair violates the group relations";
        return {kExitVerification, std::move(out)};
    }
    out["decomposition"] = io::decomposition_to_json(decompose(M, g));
    return {kExitOk, std::move(out)};
}

inline CmdResult cmd_decompose(const GroupParams& g, const json& module_doc) {
    auto F = make_field(g);
    KModule M = io::kmodule_from_json(module_doc, F);
    RelationReport rel = verify_kg_relations(M, g);
    json out{{"group", io::group_to_json(g)}};
    if (!rel.all_ok()) {
        out["error"] = "matrices do not satisfy tau^q=1, sigma^m=1, sigma tau sigma^-1 = tau^alpha";
        return {kExitVerification, std::move(out)};
    }
    out["decomposition"] = io::decomposition_to_json(decompose(M, g));
    return {kExitOk, std::move(out)};
}

// ---------------------------------------------------------------------------
// selftest: identity oracles, cross-oracles, and round trips, seeded

namespace detail {

inline LocalElement random_element(const RingCtxPtr& ctx, std::mt19937_64& rng) {
    std::vector<u64> c(static_cast<size_t>(ctx->f() * ctx->phi_q() * ctx->e()));
    for (auto& v : c) v = rng() % ctx->pN();
    return ctx->element_from(std::move(c), ctx->prec_cap());
}

struct Suite {
    std::string name;
    i64 trials = 0;
    i64 failures = 0;
};

}  // namespace detail

inline CmdResult cmd_selftest(u64 seed, i64 trials) {
    if (trials < 1) throw std::invalid_argument("selftest: trials must be positive");
    std::mt19937_64 rng(seed);
    std::vector<detail::Suite> suites;
    GroupParams g5 = bind_group(5, 2, 4, 7);
    GroupParams g3 = bind_group(3, 2, 2, 8);
    RingCtxPtr r5 = make_ring(g5, 3, 2);
    RingCtxPtr r3 = make_ring(g3, 4, 2);

    {
        detail::Suite s{"sum_prod_identity", 10 * trials, 0};
        for (i64 i = 0; i < s.trials; ++i) {
            const RingCtxPtr& ctx = (i % 2 == 0) ? r5 : r3;
            int n = 2 + static_cast<int>(rng() % 5);
            std::vector<LocalElement> xs;
            for (int k = 0; k < n; ++k) xs.push_back(detail::random_element(ctx, rng));
            LocalElement z = (i % 10 == 0) ? xs.back() : detail::random_element(ctx, rng);
            if (!sum_prod_identity_check(z, std::span<const LocalElement>(xs))) ++s.failures;
        }
        suites.push_back(s);
    }
    {
        detail::Suite s{"ablL_identity", 10 * trials, 0};
        for (i64 i = 0; i < s.trials; ++i) {
            const RingCtxPtr& ctx = (i % 2 == 0) ? r5 : r3;
            int d = 5 + static_cast<int>(rng() % 3);
            std::vector<LocalElement> lams;
            for (int k = 0; k < d; ++k) lams.push_back(detail::random_element(ctx, rng));
            i64 l = 2 + static_cast<i64>(rng() % (d - 3));
            i64 L = l + 1 + static_cast<i64>(rng() % (d - 1 - l));
            i64 a_idx = 1 + static_cast<i64>(rng() % d);
            i64 b_idx = 1 + static_cast<i64>(rng() % d);
            if (!ablL_identity_check(a_idx, b_idx, 1, l, L, d, std::span<const LocalElement>(lams))) ++s.failures;
        }
        suites.push_back(s);
    }
    {
        detail::Suite s{"t_alpha_formula_vs_iterated", 2 * trials, 0};
        for (i64 i = 0; i < s.trials; ++i) {
            const RingCtxPtr& ctx = (i % 2 == 0) ? r5 : r3;
            int d = 2 + static_cast<int>(rng() % 5);
            i64 alpha = 1 + static_cast<i64>(rng() % 50);
            std::vector<LocalElement> lams, as;
            for (int k = 0; k < d; ++k) lams.push_back(detail::random_element(ctx, rng));
            for (int k = 0; k + 1 < d; ++k) as.push_back(detail::random_element(ctx, rng));
            LocalMatrix T(ctx, d);
            for (int k = 0; k < d; ++k) T.at(k, k) = lams[static_cast<size_t>(k)];
            for (int k = 0; k + 1 < d; ++k) T.at(k + 1, k) = as[static_cast<size_t>(k)];
            LocalMatrix Ta = LocalMatrix::identity(ctx, d);
            for (i64 x = 0; x < alpha; ++x) Ta = Ta.mul(T);
            auto M = t_alpha_matrix(alpha, std::span<const LocalElement>(lams), std::span<const LocalElement>(as));
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    if (!values_agree(Ta.at(a, b), M[static_cast<size_t>(a)][static_cast<size_t>(b)])) ++s.failures;
        }
        suites.push_back(s);
    }
    {
        detail::Suite s{"gamma_recursive_vs_closed_form", 3 * trials, 0};
        for (i64 i = 0; i < s.trials; ++i) {
            const GroupParams& g = (i % 2 == 0) ? g5 : g3;
            const RingCtxPtr& ctx = (i % 2 == 0) ? r5 : r3;
            int d = 2 + static_cast<int>(rng() % 5);
            std::vector<i64> exps;
            while (static_cast<int>(exps.size()) < d) {
                i64 c = static_cast<i64>(rng() % static_cast<u64>(g.q()));
                bool fresh = true;
                for (i64 v : exps) fresh = fresh && v != c;
                if (fresh) exps.push_back(c);
            }
            std::vector<LocalElement> lams, as;
            for (i64 ex : exps) lams.push_back(ctx->zeta_q(ex));
            for (int k = 0; k + 1 < d; ++k)
                as.push_back((rng() % 2) ? ctx->uniformizer() : ctx->one());
            i64 eps = static_cast<i64>(rng() % static_cast<u64>(g.m()));
            auto rec = build_gamma_block_recursive(lams, as, eps, ctx, g);
            auto closed = build_gamma_block_closed_form(lams, as, eps, ctx, g);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    if (!values_agree(rec[static_cast<size_t>(a)][static_cast<size_t>(b)],
                                      closed[static_cast<size_t>(a)][static_cast<size_t>(b)])) ++s.failures;
        }
        suites.push_back(s);
    }
    {
        detail::Suite s{"round_trip_random_decompositions", std::max<i64>(trials / 2, 1), 0};
        for (i64 i = 0; i < s.trials; ++i) {
            const GroupParams& g = (i % 2 == 0) ? g5 : g3;
            Decomposition dec;
            int cnt = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < cnt; ++k)
                dec.summands.push_back({static_cast<i64>(rng() % static_cast<u64>(g.m())),
                                        1 + static_cast<i64>(rng() % 6)});
            try {
                RoundTripResult r = round_trip(dec, g, {});
                if (r.liftable && !(r.report.all_pass() && r.round_trip_ok)) ++s.failures;
            } catch (const std::exception&) {
                ++s.failures;
            }
        }
        suites.push_back(s);
    }
    {
        // fixed battery: the q=25, m=4, alpha=7 verdicts
        detail::Suite s{"worked_example_verdicts", 0, 0};
        auto expect = [&](const Decomposition& dec, bool want) {
            ++s.trials;
            if (decide_lift(dec, g5).liftable() != want) ++s.failures;
        };
        for (i64 kappa = 1; kappa <= 25; ++kappa)
            expect(Decomposition{{SummandSpec{1, kappa}}}, kappa % 4 == 0 || kappa % 4 == 1);
        expect(Decomposition{{SummandSpec{1, 2}, SummandSpec{3, 2}}}, true);
        expect(Decomposition{{SummandSpec{1, 2}, SummandSpec{1, 2}}}, false);
        expect(Decomposition{{SummandSpec{1, 21}, SummandSpec{(1 + g5.a0() * 21) % 4, 23}}}, false);
        suites.push_back(s);
    }

    json jsuites = json::array();
    bool pass = true;
    for (const auto& s : suites) {
        pass = pass && s.failures == 0;
        jsuites.push_back(json{{"name", s.name}, {"trials", s.trials}, {"failures", s.failures}});
    }
    json out{{"seed", seed}, {"suites", jsuites}, {"pass", pass}};
    return {pass ? kExitOk : kExitVerification, std::move(out)};
}

}  // namespace metalift::cli
