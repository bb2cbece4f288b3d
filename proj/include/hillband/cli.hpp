#pragma once

// Command-line front end: load a potential file, run one of
// bands/disc/eigs/converge/verify, emit CSV or JSON. Exit codes: 0 success,
// 1 computation failure (integration/bracketing), 2 usage or input-format
// problems.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "hillband/io.hpp"
#include "hillband/oracle.hpp"

namespace hillband::cli {

namespace detail {

inline void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw format_error("cannot open output file '" + path + "'");
    out << content;
}

inline std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            std::size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size()) throw format_error("");
            out.push_back(v);
        } catch (const std::exception&) {
            throw format_error("bad --n-list entry '" + item + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw format_error("--n-list must name at least one truncation");
    return out;
}

} // namespace detail

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// The cross-validation suite behind `hillband verify`.
inline std::vector<VerifyCheck> run_verification() {
    using std::numbers::pi;
    std::vector<VerifyCheck> checks;
    auto add = [&](const std::string& name, auto&& body) {
        VerifyCheck c{name, false, ""};
        try {
            c.detail = body();
            c.pass = c.detail.empty();
        } catch (const std::exception& e) {
            c.detail = e.what();
        }
        checks.push_back(std::move(c));
    };

    add("free-band-structure", [&]() -> std::string {
        SearchConfig cfg;
        cfg.num_gaps = 3;
        BandStructure bs = band_structure(PrimitiveProfile::zero(), cfg);
        if (std::abs(bs.bottom()) > 1e-8) return "lambda_0 off zero";
        for (int k = 1; k <= 3; ++k)
            for (Side side : {Side::minus, Side::plus}) {
                const GapEndpoint& e = bs.endpoint(k, side);
                if (std::abs(e.lambda - k * k * pi * pi) > 1e-8) return "endpoint off (k pi)^2";
                if (!e.collapsed) return "free gap not collapsed";
                Parity expect = (k % 2 == 0) ? Parity::periodic : Parity::semiperiodic;
                if (e.parity != expect) return "parity rule violated";
            }
        return "";
    });

    add("comb-discriminant-closed-form", [&]() -> std::string {
        SearchConfig cfg;
        for (double alpha : {1.0, 4.0, -2.0}) {
            auto saw = PrimitiveProfile::sawtooth(alpha);
            auto samples = sample_discriminant(saw, 0.0, 200.0, 60, cfg);
            for (const DiscSample& s : samples) {
                if (!s.valid) return "missing sample";
                if (std::abs(s.delta - oracle::kp_discriminant(alpha, s.lambda)) >= 1e-8)
                    return "engine discriminant off closed form at lambda = " + io::fmt(s.lambda);
            }
        }
        return "";
    });

    add("conservation-laws", [&]() -> std::string {
        std::vector<PrimitiveProfile> profiles;
        profiles.push_back(PrimitiveProfile::zero());
        profiles.push_back(
            build_primitive(FourierPotential::from_harmonics({{1, {1.0, 0.0}}}, 0.0)));
        profiles.push_back(PrimitiveProfile::sawtooth(1.0));
        IntegratorConfig integ;
        for (const auto& profile : profiles)
            for (int i = 0; i < 40; ++i) {
                double lam = -20.0 + 320.0 * i / 39.0;
                Monodromy M = monodromy(profile, lam, 0.0, integ);
                if (std::abs(M.det() - 1.0) > 1e-9) return "det M drifted from 1";
                PropState a = propagate(profile, lam, {1.0, 0.0, 0.0}, 0.37, integ);
                PropState b = propagate(profile, lam, {0.0, 1.0, 0.0}, 0.37, integ);
                if (std::abs(lagrange_bracket(a, b) - 1.0) > 1e-9)
                    return "Lagrange bracket not conserved";
            }
        return "";
    });

    add("galerkin-agreement-2cos", [&]() -> std::string {
        auto cosp = FourierPotential::from_harmonics({{1, {1.0, 0.0}}}, 0.0);
        SearchConfig cfg;
        cfg.num_gaps = 1;
        BandStructure bs = band_structure(build_primitive(cosp), cfg);
        auto semis = oracle::galerkin_eigenvalues({cosp, Parity::semiperiodic, 256}, 2);
        for (int i = 0; i < 2; ++i) {
            double engine =
                bs.endpoint(1, i == 0 ? Side::minus : Side::plus).lambda;
            if (std::abs(engine - semis[i]) > 1e-6 * std::max(1.0, std::abs(semis[i])))
                return "first-gap endpoint off the Galerkin value";
        }
        return "";
    });

    add("random-potential-structure", [&]() -> std::string {
        SearchConfig cfg;
        cfg.num_gaps = 2;
        for (std::uint64_t seed : {1ull, 2ull}) {
            auto profile = build_primitive(random_potential(seed, 16, 5.0, 0.6));
            BandStructure bs = band_structure(profile, cfg);
            auto report = classify_and_validate(profile, bs, cfg);
            if (!report.all_pass()) return "structural check failed for seed " + std::to_string(seed);
        }
        return "";
    });

    add("shift-equivariance", [&]() -> std::string {
        auto q = random_potential(1, 16, 5.0, 0.6);
        SearchConfig cfg;
        cfg.num_gaps = 2;
        BandStructure base = band_structure(build_primitive(q), cfg);
        BandStructure moved = band_structure(build_primitive(q.with_mean(2.5)), cfg);
        for (std::size_t i = 0; i < base.endpoints.size(); ++i)
            if (std::abs(moved.endpoints[i].lambda - base.endpoints[i].lambda - 2.5) > 1e-8)
                return "endpoints did not translate with the mean";
        return "";
    });

    add("bands-json-round-trip", [&]() -> std::string {
        SearchConfig cfg;
        cfg.num_gaps = 2;
        BandStructure bs = band_structure(PrimitiveProfile::zero(), cfg);
        BandStructure back =
            io::bands_from_json(io::parse_json_text(io::bands_json(bs).dump()));
        if (back.endpoints.size() != bs.endpoints.size()) return "endpoint count changed";
        for (std::size_t i = 0; i < bs.endpoints.size(); ++i)
            if (back.endpoints[i].lambda != bs.endpoints[i].lambda)
                return "lambda not bit-identical after round trip";
        return "";
    });

    return checks;
}

/// One parsed invocation: the subcommand plus every surface knob; numeric
/// fields below zero mean "keep the engine default".
struct RunConfig {
    std::string subcommand;
    std::string potential_path;
    std::string out_path; // empty: stdout
    std::string format = "csv";
    std::string parity_name = "periodic";
    std::string n_list_text;
    int gaps = 3;
    int samples = 200;
    int count = 6;
    double lambda_min = 0.0;
    double lambda_max = 100.0;
    double rel_tol = -1.0;
    double root_tol = -1.0;
    double s_step = -1.0;

    SearchConfig search_config() const {
        SearchConfig cfg;
        if (rel_tol > 0.0) {
            cfg.integ.rel_tol = rel_tol;
            cfg.integ.abs_tol = 0.01 * rel_tol;
        }
        if (root_tol > 0.0) cfg.root_tol = root_tol;
        if (s_step > 0.0) cfg.s_step = s_step;
        return cfg;
    }
};

/// CLI entry point; args without the program name.
inline int run(const std::vector<std::string>& args) {
    CLI::App app{"band-gap spectra of 1-D periodic Schrodinger operators with "
                 "distributional (H^-1) potentials"};
    app.require_subcommand(1);

    RunConfig rc;

    auto add_common = [&](CLI::App* cmd, bool needs_potential) {
        if (needs_potential)
            cmd->add_option("--potential", rc.potential_path, "potential JSON file")->required();
        cmd->add_option("--out", rc.out_path, "output path (default: stdout)");
        cmd->add_option("--format", rc.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--rel-tol", rc.rel_tol, "integrator relative tolerance");
        cmd->add_option("--root-tol", rc.root_tol, "endpoint tolerance in lambda");
        cmd->add_option("--s-step", rc.s_step, "scan grid step in sqrt(lambda)");
    };

    CLI::App* bands = app.add_subcommand("bands", "gap endpoints with parity and collapse flags");
    add_common(bands, true);
    bands->add_option("--gaps", rc.gaps, "number of gaps");

    CLI::App* disc = app.add_subcommand("disc", "discriminant samples over a lambda range");
    add_common(disc, true);
    disc->add_option("--lambda-min", rc.lambda_min, "lower end of the range");
    disc->add_option("--lambda-max", rc.lambda_max, "upper end of the range");
    disc->add_option("--samples", rc.samples, "number of samples");

    CLI::App* eigs = app.add_subcommand("eigs", "periodic/semiperiodic eigenvalues on [0,1]");
    add_common(eigs, true);
    eigs->add_option("--count", rc.count, "how many eigenvalues");
    eigs->add_option("--parity", rc.parity_name, "periodic or semiperiodic")
        ->check(CLI::IsMember({"periodic", "semiperiodic"}));

    CLI::App* converge = app.add_subcommand("converge", "endpoints of Fourier truncations q_n");
    add_common(converge, true);
    converge->add_option("--n-list", rc.n_list_text, "comma-separated truncation orders")
        ->required();
    converge->add_option("--gaps", rc.gaps, "number of gaps");

    CLI::App* verify = app.add_subcommand("verify", "run the cross-validation suite");
    verify->add_option("--out", rc.out_path, "report path (default: stdout)");

    std::vector<const char*> argv;
    argv.push_back("hillband");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        SearchConfig cfg = rc.search_config();
        bool as_json = (rc.format == "json");

        if (bands->parsed()) {
            cfg.num_gaps = rc.gaps;
            io::LoadedPotential p = io::load_potential(rc.potential_path);
            BandStructure bs = band_structure(p.profile, cfg);
            detail::write_output(rc.out_path, as_json ? io::bands_json(bs).dump(2) + "\n"
                                                      : io::bands_csv(bs));
        } else if (disc->parsed()) {
            io::LoadedPotential p = io::load_potential(rc.potential_path);
            auto data =
                sample_discriminant(p.profile, rc.lambda_min, rc.lambda_max, rc.samples, cfg);
            detail::write_output(rc.out_path, as_json ? io::samples_json(data).dump(2) + "\n"
                                                      : io::samples_csv(data));
        } else if (eigs->parsed()) {
            io::LoadedPotential p = io::load_potential(rc.potential_path);
            Parity parity =
                rc.parity_name == "periodic" ? Parity::periodic : Parity::semiperiodic;
            auto vals = parity == Parity::periodic
                            ? periodic_eigenvalues(p.profile, rc.count, cfg)
                            : semiperiodic_eigenvalues(p.profile, rc.count, cfg);
            detail::write_output(rc.out_path,
                                 as_json ? io::eigenvalues_json(vals, parity).dump(2) + "\n"
                                         : io::eigenvalues_csv(vals));
        } else if (converge->parsed()) {
            cfg.num_gaps = rc.gaps;
            io::LoadedPotential p = io::load_potential(rc.potential_path);
            auto table =
                convergence_study(p.fourier, detail::parse_n_list(rc.n_list_text), cfg);
            detail::write_output(rc.out_path, as_json ? io::convergence_json(table).dump(2) + "\n"
                                                      : io::convergence_csv(table));
        } else { // verify
            auto checks = run_verification();
            bool all = true;
            std::string report;
            for (const VerifyCheck& c : checks) {
                all = all && c.pass;
                report += c.pass ? "PASS  " : "FAIL  ";
                report += c.name;
                if (!c.pass && !c.detail.empty()) report += "  (" + c.detail + ")";
                report += '\n';
            }
            detail::write_output(rc.out_path, report);
            return all ? 0 : 1;
        }
        return 0;
    } catch (const format_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace hillband::cli
