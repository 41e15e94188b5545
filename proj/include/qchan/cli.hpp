// CLI driver as a library function so tests can exercise it in-process.
// Exit codes: 0 success (CP or Boundary where CP matters), 1 malformed input
// or flags, 2 NotCP where CP is required, 3 unsupported decomposition
// target, 4 internal consistency failure.
#pragma once

#include "qchan/extremal.hpp"
#include "qchan/io.hpp"
#include "qchan/sample.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace qchan {

namespace detail {

struct CliOptions {
    std::string input;
    double eps = 0.05;
    double tol = 1e-10;
    bool normalize_choi = false;
    bool pretty = false;
    std::uint64_t seed = 0;
    std::string kind = "general";
};

/// Input resolution: "-" or empty reads standard input; a leading '{' is
/// inline JSON; anything else is a file path.
inline std::string read_input(const std::string& input, std::istream& in) {
    if (input.empty() || input == "-") {
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    if (input.front() == '{') return input;
    std::ifstream file(input);
    if (!file) throw invalid_parameter("cannot read input file: " + input);
    std::ostringstream ss;
    ss << file.rdbuf();
    return ss.str();
}

inline AffineChannel read_channel(const CliOptions& opts, std::istream& in) {
    return channel_from_json(Json::parse(read_input(opts.input, in)));
}

inline void emit(const Json& j, bool pretty, std::ostream& out) {
    out << (pretty ? j.dump(2) : j.dump()) << '\n';
}

}  // namespace detail

inline int cli_run(std::vector<std::string> args, std::istream& in, std::ostream& out,
                   std::ostream& err) {
    CLI::App app{"Single-qubit channels in affine Bloch-ball form: CP verification "
                 "(Choi spectrum and closed-form conditions), classification, canonical "
                 "form, Kraus operators, universal-set decomposition, sampling."};
    app.require_subcommand(1);

    detail::CliOptions opts;
    const std::string schema =
        "channel JSON {\"M\":[[..],[..],[..]],\"t\":[x,y,z]} or {\"lambda\":[l1,l2,l3]}; "
        "inline JSON, a file path, or - for standard input";

    const auto add_common = [&](CLI::App* sc, bool takes_input) {
        if (takes_input) sc->add_option("input", opts.input, schema);
        sc->add_option("--eps", opts.eps, "decomposition budget (default 0.05)");
        sc->add_option("--tol", opts.tol, "CP verdict tolerance (default 1e-10)")
            ->check(CLI::PositiveNumber);
        sc->add_flag("--normalize-choi", opts.normalize_choi,
                     "report trace-1 Choi eigenvalues");
        sc->add_flag("--pretty", opts.pretty, "indent JSON output");
        sc->add_option("--seed", opts.seed, "RNG seed (default 0)");
        sc->add_option("--kind", opts.kind, "sample kind: unital | general | extremal");
    };

    CLI::App* sc_verify = app.add_subcommand("verify", "CP report for a channel");
    CLI::App* sc_classify =
        app.add_subcommand("classify", "Kraus rank, indivisibility, pure outputs, extremality");
    CLI::App* sc_canonical = app.add_subcommand("canonical", "signed-SVD canonical form");
    CLI::App* sc_kraus = app.add_subcommand("kraus", "Kraus operators as [[re,im],...] arrays");
    CLI::App* sc_decompose =
        app.add_subcommand("decompose", "universal-set decomposition (unital or extremal)");
    CLI::App* sc_sample = app.add_subcommand("sample", "draw a random channel");
    CLI::App* sc_pancake =
        app.add_subcommand("pancake", "circle-contact margin table over the (a,c) grid");
    for (CLI::App* sc : {sc_verify, sc_classify, sc_canonical, sc_kraus, sc_decompose})
        add_common(sc, true);
    add_common(sc_sample, false);
    add_common(sc_pancake, false);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);

        if (app.got_subcommand(sc_verify)) {
            const AffineChannel phi = detail::read_channel(opts, in);
            const CPReport rep = cp_report(phi, opts.tol);
            detail::emit(cp_report_to_json(rep, opts.normalize_choi), opts.pretty, out);
            return rep.verdict == CpVerdict::NotCP ? 2 : 0;
        }

        if (app.got_subcommand(sc_classify)) {
            const AffineChannel phi = detail::read_channel(opts, in);
            Json j;
            j["kraus_rank"] = kraus_rank(phi);
            j["indivisible"] = is_indivisible(phi);
            j["pure_output"] = pure_output_to_json(pure_outputs(phi));
            if (const auto uv = extremal_test(phi)) {
                const ExtremalClass cls = classify_extremal_uv(uv->first, uv->second);
                Json e;
                e["u"] = uv->first;
                e["v"] = uv->second;
                e["class"] = to_string(cls.kind);
                j["extremal"] = e;
            } else {
                j["extremal"] = nullptr;
            }
            detail::emit(j, opts.pretty, out);
            return 0;
        }

        if (app.got_subcommand(sc_canonical)) {
            const AffineChannel phi = detail::read_channel(opts, in);
            detail::emit(canonical_to_json(phi, to_canonical(phi)), opts.pretty, out);
            return 0;
        }

        if (app.got_subcommand(sc_kraus)) {
            const AffineChannel phi = detail::read_channel(opts, in);
            detail::emit(kraus_to_json(kraus_decomposition(phi)), opts.pretty, out);
            return 0;
        }

        if (app.got_subcommand(sc_decompose)) {
            const AffineChannel phi = detail::read_channel(opts, in);
            const CPReport rep = cp_report(phi, opts.tol);
            if (rep.verdict == CpVerdict::NotCP) throw not_cp_error(rep.eig_margin);
            DecompositionPlan plan;
            if (is_unital(phi)) {
                plan = decompose_unital(phi, opts.eps);
            } else if (extremal_test(phi)) {
                plan = decompose_extremal(phi, opts.eps);
            } else {
                err << "decompose: channel is neither unital nor extremal\n";
                return 3;
            }
            detail::emit(plan_to_json(plan), opts.pretty, out);
            return 0;
        }

        if (app.got_subcommand(sc_sample)) {
            Rng rng(opts.seed);
            const AffineChannel phi = sample_channel(rng, sample_kind_from_string(opts.kind));
            detail::emit(channel_to_json(phi), opts.pretty, out);
            return 0;
        }

        // pancake: fixed 0.01 grid over 0 < c < a^2, a <= 1.
        Json rows = Json::array();
        double max_margin = -std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 100; ++i) {
            const double a = i / 100.0;
            for (int k = 1; k / 100.0 < a * a; ++k) {
                const double c = k / 100.0;
                const PancakeMargin pm = pancake_margin(a, c);
                Json row;
                row["a"] = a;
                row["c"] = c;
                row["t3"] = pm.t3;
                row["margin_plus"] = pm.margins.first;
                row["margin_minus"] = pm.margins.second;
                rows.push_back(row);
                max_margin = std::max({max_margin, pm.margins.first, pm.margins.second});
            }
        }
        Json j;
        j["step"] = 0.01;
        j["max_margin"] = max_margin;
        j["rows"] = rows;
        detail::emit(j, opts.pretty, out);
        return 0;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 1;
    } catch (const not_cp_error& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const internal_consistency_error& e) {
        err << e.what() << '\n';
        return 4;
    } catch (const invalid_parameter& e) {
        err << e.what() << '\n';
        return 1;
    } catch (const Json::exception& e) {
        err << "malformed JSON: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace qchan
