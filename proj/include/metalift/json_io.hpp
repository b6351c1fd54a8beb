#pragma once

// JSON serialization for every exchange type.  Matrices are row-major;
// ring coefficients are emitted as decimal strings so consumers never face
// 64-bit overflow; both strings and numbers are accepted on input.

#include <string>
#include <vector>

#include <json.hpp>

#include "metalift/lift_builder.hpp"

namespace metalift::io {

using json = nlohmann::json;

inline i64 int_field(const json& j, const std::string& key) {
    if (!j.contains(key)) throw std::invalid_argument("missing field '" + key + "'");
    const json& v = j.at(key);
    if (v.is_number_integer()) return v.get<i64>();
    if (v.is_string()) return std::stoll(v.get<std::string>());
    throw std::invalid_argument("field '" + key + "' must be an integer");
}

inline u64 coeff_from_json(const json& v) {
    if (v.is_number_unsigned() || v.is_number_integer()) return v.get<u64>();
    if (v.is_string()) return std::stoull(v.get<std::string>());
    throw std::invalid_argument("coefficient must be an integer or decimal string");
}

// ---- group ------------------------------------------------------------------

inline json group_to_json(const GroupParams& g) {
    json ord = json::object();
    for (auto [pk, o] : g.ord_table()) ord[std::to_string(pk)] = o;
    json j{{"p", g.p()},       {"h", g.h()},           {"q", g.q()},
           {"m", g.m()},       {"alpha", g.alpha()},   {"m_prime", g.m_prime()},
           {"f", g.f()},       {"faithful", g.faithful()}, {"ord_table", ord}};
    if (g.has_a0()) j["a0"] = g.a0();
    return j;
}

inline GroupParams group_from_json(const json& j) {
    return new_group(int_field(j, "p"), int_field(j, "h"), int_field(j, "m"), int_field(j, "alpha"));
}

// ---- decompositions ----------------------------------------------------------

inline json decomposition_to_json(const Decomposition& dec) {
    json arr = json::array();
    for (const auto& s : dec.summands) arr.push_back(json{{"epsilon", s.epsilon}, {"kappa", s.kappa}});
    return arr;
}

inline Decomposition decomposition_from_json(const json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("decomposition must be an array");
    Decomposition dec;
    for (const auto& e : arr) dec.summands.push_back({int_field(e, "epsilon"), int_field(e, "kappa")});
    return dec;
}

// ---- residue field -----------------------------------------------------------

inline json field_element_to_json(const FieldElement& a) {
    json arr = json::array();
    for (i64 c : a.coeffs()) arr.push_back(c);
    return arr;
}

inline FieldElement field_element_from_json(const json& arr, const FieldCtxPtr& ctx) {
    if (!arr.is_array() || static_cast<i64>(arr.size()) != ctx->f())
        throw std::invalid_argument("field element must be a length-f coefficient list");
    std::vector<i64> c;
    for (const auto& v : arr) c.push_back(((v.get<i64>() % ctx->p()) + ctx->p()) % ctx->p());
    return FieldElement(ctx, std::move(c));
}

inline json kmodule_to_json(const KModule& M) {
    json tau = json::array(), sigma = json::array();
    for (int i = 0; i < M.dim(); ++i) {
        json tr = json::array(), sr = json::array();
        for (int j = 0; j < M.dim(); ++j) {
            tr.push_back(field_element_to_json(M.tau.at(i, j)));
            sr.push_back(field_element_to_json(M.sigma.at(i, j)));
        }
        tau.push_back(std::move(tr));
        sigma.push_back(std::move(sr));
    }
    return json{{"dimension", M.dim()}, {"tau", tau}, {"sigma", sigma}};
}

inline KModule kmodule_from_json(const json& j, const FieldCtxPtr& ctx) {
    const int n = static_cast<int>(int_field(j, "dimension"));
    ResidueMatrix tau(ctx, n), sigma(ctx, n);
    const json& jt = j.at("tau");
    const json& js = j.at("sigma");
    if (static_cast<int>(jt.size()) != n || static_cast<int>(js.size()) != n)
        throw std::invalid_argument("module matrices must have 'dimension' rows");
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) {
            tau.at(i, jj) = field_element_from_json(jt.at(static_cast<size_t>(i)).at(static_cast<size_t>(jj)), ctx);
            sigma.at(i, jj) = field_element_from_json(js.at(static_cast<size_t>(i)).at(static_cast<size_t>(jj)), ctx);
        }
    return KModule{std::move(tau), std::move(sigma)};
}

// ---- local ring --------------------------------------------------------------

inline json ring_header(const RingContext& ctx) {
    const GroupParams& g = ctx.params();
    return json{{"p", g.p()}, {"h", g.h()}, {"m", g.m()}, {"alpha", g.alpha()}, {"N", ctx.N()}, {"e", ctx.e()}};
}

// coeffs as nested f x phi(q) x e array (decimal strings)
inline json local_element_to_json(const LocalElement& z) {
    const RingContext& ctx = *z.ctx();
    const i64 f = ctx.f(), phi = ctx.phi_q(), e = ctx.e();
    json yarr = json::array();
    for (i64 iy = 0; iy < f; ++iy) {
        json xarr = json::array();
        for (i64 ix = 0; ix < phi; ++ix) {
            json tarr = json::array();
            for (i64 it = 0; it < e; ++it) {
                u64 v = z.coeffs()[static_cast<size_t>((it * phi + ix) * f + iy)];
                tarr.push_back(std::to_string(v));
            }
            xarr.push_back(std::move(tarr));
        }
        yarr.push_back(std::move(xarr));
    }
    return json{{"prec", z.prec()}, {"coeffs", yarr}};
}

inline LocalElement local_element_from_json(const json& j, const RingCtxPtr& ctx) {
    const i64 f = ctx->f(), phi = ctx->phi_q(), e = ctx->e();
    const json& yarr = j.at("coeffs");
    if (static_cast<i64>(yarr.size()) != f) throw std::invalid_argument("element: wrong y-dimension");
    std::vector<u64> c(static_cast<size_t>(f * phi * e), 0);
    for (i64 iy = 0; iy < f; ++iy) {
        const json& xarr = yarr.at(static_cast<size_t>(iy));
        if (static_cast<i64>(xarr.size()) != phi) throw std::invalid_argument("element: wrong x-dimension");
        for (i64 ix = 0; ix < phi; ++ix) {
            const json& tarr = xarr.at(static_cast<size_t>(ix));
            if (static_cast<i64>(tarr.size()) != e) throw std::invalid_argument("element: wrong t-dimension");
            for (i64 it = 0; it < e; ++it)
                c[static_cast<size_t>((it * phi + ix) * f + iy)] = coeff_from_json(tarr.at(static_cast<size_t>(it)));
        }
    }
    return ctx->element_from(std::move(c), int_field(j, "prec"));
}

inline json local_matrix_to_json(const LocalMatrix& M) {
    json rows = json::array();
    for (int i = 0; i < M.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.dim(); ++j) row.push_back(local_element_to_json(M.at(i, j)));
        rows.push_back(std::move(row));
    }
    return json{{"dim", M.dim()}, {"entries", rows}};
}

inline LocalMatrix local_matrix_from_json(const json& j, const RingCtxPtr& ctx) {
    const int d = static_cast<int>(int_field(j, "dim"));
    LocalMatrix M(ctx, d);
    const json& rows = j.at("entries");
    if (static_cast<int>(rows.size()) != d) throw std::invalid_argument("matrix: row count mismatch");
    for (int i = 0; i < d; ++i) {
        const json& row = rows.at(static_cast<size_t>(i));
        if (static_cast<int>(row.size()) != d) throw std::invalid_argument("matrix: column count mismatch");
        for (int c = 0; c < d; ++c) M.at(i, c) = local_element_from_json(row.at(static_cast<size_t>(c)), ctx);
    }
    return M;
}

// ---- plans and reports --------------------------------------------------------

inline json plan_to_json(const LiftPlan& plan) {
    json chains = json::array();
    for (const auto& ch : plan.chains) {
        json c = json::array();
        for (int idx : ch) c.push_back(idx);
        chains.push_back(std::move(c));
    }
    json exps = json::array();
    for (const auto& ex : plan.exponents) {
        json c = json::array();
        for (i64 v : ex) c.push_back(v);
        exps.push_back(std::move(c));
    }
    json sds = json::array();
    for (const auto& sd : plan.subdiag) {
        json c = json::array();
        for (SubdiagSymbol s : sd) c.push_back(s == SubdiagSymbol::unit ? "1" : "t");
        sds.push_back(std::move(c));
    }
    json aflags = json::array();
    for (int a : plan.a_flags) aflags.push_back(a);
    return json{{"summands", decomposition_to_json(plan.input)},
                {"chains", chains},
                {"a_flags", aflags},
                {"eigenvalue_exponents", exps},
                {"subdiagonal", sds}};
}

inline json refusal_to_json(const RefusalCertificate& cert) {
    json nodes = json::array();
    for (const auto& s : cert.graph.nodes) nodes.push_back(json{{"epsilon", s.epsilon}, {"kappa", s.kappa}});
    json edges = json::array();
    for (auto [i, j] : cert.graph.edges) edges.push_back(json::array({i, j}));
    return json{{"s", cert.s},
                {"search_bound", cert.search_bound},
                {"nodes", nodes},
                {"edges", edges},
                {"statement", cert.statement}};
}

inline json report_to_json(const LiftReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks) {
        json e{{"name", c.name}, {"pass", c.pass}, {"precision", c.precision}};
        if (!c.details.empty()) e["details"] = c.details;
        if (c.indeterminate) e["indeterminate"] = true;
        checks.push_back(std::move(e));
    }
    return json{{"checks", checks}, {"all_pass", rep.all_pass()}};
}

}  // namespace metalift::io
