// Command-line front end.
//
//   metalift info      --p 5 --h 2 --m 4 --alpha 7
//   metalift decide    --in job.json [--strict-uniform-a]
//   metalift lift      --in job.json [--N 8] [--e 2] [--out lift.json]
//   metalift reduce    --in lift.json
//   metalift decompose --in job.json
//   metalift selftest  [--seed 0] [--trials 100]
//
// Job files carry {"group": {...}, "precision": {...}, <payload>}; the group
// and precision may instead come from flags.  Exit codes: 0 ok, 1 negative
// verdict, 2 input error, 3 internal verification failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "metalift/cli.hpp"

namespace {

using metalift::i64;
using metalift::cli::CmdResult;
using metalift::cli::json;

struct GroupFlags {
    i64 p = 0, h = 0, m = 0, alpha = 0;
    bool complete() const { return p > 0 && h > 0 && m > 0 && alpha > 0; }
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    json j;
    in >> j;
    return j;
}

metalift::GroupParams resolve_group(const std::optional<json>& doc, const GroupFlags& flags) {
    if (doc && doc->contains("group")) {
        const json& g = doc->at("group");
        return metalift::cli::bind_group(metalift::io::int_field(g, "p"), metalift::io::int_field(g, "h"),
                                         metalift::io::int_field(g, "m"), metalift::io::int_field(g, "alpha"));
    }
    if (!flags.complete())
        throw std::invalid_argument("group not given: pass --p --h --m --alpha or a job file with a \"group\" object");
    return metalift::cli::bind_group(flags.p, flags.h, flags.m, flags.alpha);
}

metalift::cli::Precision resolve_precision(const std::optional<json>& doc, i64 flagN, i64 flagE) {
    metalift::cli::Precision prec;
    if (doc && doc->contains("precision")) {
        const json& p = doc->at("precision");
        if (p.contains("N")) prec.N = metalift::io::int_field(p, "N");
        if (p.contains("e")) prec.e = metalift::io::int_field(p, "e");
    }
    if (flagN > 0) prec.N = flagN;
    if (flagE > 0) prec.e = flagE;
    return prec;
}

void emit(const CmdResult& r, const std::string& out_path) {
    std::string text = r.output.dump(2);
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
        out << text << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lifting of modular representations of C_q x| C_m to characteristic zero"};
    app.set_help_flag("--help", "print this help message and exit");  // frees -h for --h
    app.require_subcommand(1);

    GroupFlags flags;
    std::string in_path, out_path;
    i64 flagN = 0, flagE = 0;
    i64 seed = 0, trials = 100;
    bool strict_a = false;

    auto add_group_flags = [&](CLI::App* cmd) {
        cmd->set_help_flag("--help", "print this help message and exit");
        cmd->add_option("--p", flags.p, "prime p");
        cmd->add_option("--h", flags.h, "exponent h (q = p^h)");
        cmd->add_option("--m", flags.m, "order of the acting cyclic group");
        cmd->add_option("--alpha", flags.alpha, "conjugation exponent");
    };
    auto add_io_flags = [&](CLI::App* cmd, bool needs_in) {
        auto* o = cmd->add_option("--in", in_path, "input job file (JSON)");
        if (needs_in) o->required();
        cmd->add_option("--out", out_path, "output file (default stdout)");
    };

    CLI::App* c_info = app.add_subcommand("info", "derived arithmetic of the group and residue field");
    add_group_flags(c_info);
    c_info->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* c_decide = app.add_subcommand("decide", "decide liftability of a decomposition");
    add_group_flags(c_decide);
    add_io_flags(c_decide, true);
    c_decide->add_flag("--strict-uniform-a", strict_a, "require one a in {0,1} shared by all chains");

    CLI::App* c_lift = app.add_subcommand("lift", "construct and verify the lift (T, Gamma)");
    add_group_flags(c_lift);
    add_io_flags(c_lift, true);
    c_lift->add_option("--N", flagN, "p-adic precision level");
    c_lift->add_option("--e", flagE, "ramification index of the auxiliary extension");
    c_lift->add_flag("--strict-uniform-a", strict_a, "require one a in {0,1} shared by all chains");

    CLI::App* c_reduce = app.add_subcommand("reduce", "reduce stored matrices mod the maximal ideal and decompose");
    add_io_flags(c_reduce, true);

    CLI::App* c_dec = app.add_subcommand("decompose", "decompose a residue-field matrix pair");
    add_group_flags(c_dec);
    add_io_flags(c_dec, true);

    CLI::App* c_self = app.add_subcommand("selftest", "seeded identity oracles, cross-oracles, round trips");
    c_self->add_option("--seed", seed, "RNG seed");
    c_self->add_option("--trials", trials, "base trial count per suite");
    c_self->add_option("--out", out_path, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        CmdResult result;
        if (*c_info) {
            if (!flags.complete()) throw std::invalid_argument("info requires --p --h --m --alpha");
            result = metalift::cli::cmd_info(flags.p, flags.h, flags.m, flags.alpha);
        } else if (*c_decide) {
            json doc = load_json(in_path);
            auto g = resolve_group(doc, flags);
            auto dec = metalift::io::decomposition_from_json(doc.at("decomposition"));
            result = metalift::cli::cmd_decide(g, dec, strict_a);
        } else if (*c_lift) {
            json doc = load_json(in_path);
            auto g = resolve_group(doc, flags);
            auto dec = metalift::io::decomposition_from_json(doc.at("decomposition"));
            result = metalift::cli::cmd_lift(g, dec, resolve_precision(doc, flagN, flagE), strict_a);
        } else if (*c_reduce) {
            result = metalift::cli::cmd_reduce(load_json(in_path));
        } else if (*c_dec) {
            json doc = load_json(in_path);
            auto g = resolve_group(doc, flags);
            result = metalift::cli::cmd_decompose(g, doc.at("module"));
        } else if (*c_self) {
            result = metalift::cli::cmd_selftest(static_cast<metalift::u64>(seed), trials);
        }
        emit(result, out_path);
        return result.exit_code;
    } catch (const std::invalid_argument& ex) {
        std::cerr << json{{"error", ex.what()}}.dump() << "\n";
        return metalift::cli::kExitInput;
    } catch (const json::exception& ex) {
        std::cerr << json{{"error", ex.what()}}.dump() << "\n";
        return metalift::cli::kExitInput;
    } catch (const std::exception& ex) {
        std::cerr << json{{"error", ex.what()}}.dump() << "\n";
        return metalift::cli::kExitVerification;
    }
}
