#pragma once

// Potential files, band-structure serialization and the CSV emitters used
// by the CLI. Floating-point values go out as %.17g (CSV) and through the
// JSON library's shortest-round-trip encoding, so re-reading reproduces the
// binary doubles exactly.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hillband/potential.hpp"
#include "hillband/spectrum.hpp"

namespace hillband::io {

using json = nlohmann::json;

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw format_error(std::string("invalid JSON: ") + e.what());
    }
}

/// A potential ready for both spectral work (profile, exact where
/// available) and truncation studies (Fourier table).
struct LoadedPotential {
    FourierPotential fourier;
    PrimitiveProfile profile = PrimitiveProfile::zero();
    std::string type;
};

/// Accepted forms:
///   {"type":"fourier","mean":c,"harmonics":[{"m":1,"re":..,"im":..},...]}
///       positive m only; negative-m coefficients are synthesized as
///       conjugates
///   {"type":"delta_comb","alpha":a,"truncation":K}   (truncation default 16)
///   {"type":"random","seed":s,"K":k,"amplitude":a,"decay":d}  (decay default 0.6)
inline LoadedPotential potential_from_json(const json& j) {
    try {
        std::string type = j.at("type").get<std::string>();
        if (type == "fourier") {
            double mean = j.value("mean", 0.0);
            std::vector<std::pair<int, complexd>> entries;
            for (const json& h : j.value("harmonics", json::array())) {
                int m = h.at("m").get<int>();
                if (m < 1)
                    throw format_error(
                        "fourier potential files carry positive m only (conjugates are "
                        "synthesized)");
                entries.emplace_back(m,
                                     complexd{h.value("re", 0.0), h.value("im", 0.0)});
            }
            LoadedPotential out;
            out.fourier = FourierPotential::from_harmonics(entries, mean);
            out.profile = build_primitive(out.fourier);
            out.type = type;
            return out;
        }
        if (type == "delta_comb") {
            double alpha = j.at("alpha").get<double>();
            int K = j.value("truncation", 16);
            auto [fourier, profile] = delta_comb(alpha, K);
            return {std::move(fourier), std::move(profile), type};
        }
        if (type == "random") {
            auto seed = j.at("seed").get<std::uint64_t>();
            int K = j.at("K").get<int>();
            double amplitude = j.at("amplitude").get<double>();
            double decay = j.value("decay", 0.6);
            LoadedPotential out;
            out.fourier = random_potential(seed, K, amplitude, decay);
            out.profile = build_primitive(out.fourier);
            out.type = type;
            return out;
        }
        throw format_error("unknown potential type '" + type + "'");
    } catch (const json::exception& e) {
        throw format_error(std::string("malformed potential: ") + e.what());
    }
}

inline LoadedPotential load_potential(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot read potential file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return potential_from_json(parse_json_text(buf.str()));
}

// ---- band structures ------------------------------------------------------

inline json endpoint_json(const GapEndpoint& e) {
    return json{{"k", e.k},
                {"side", to_string(e.side)},
                {"lambda", e.lambda},
                {"parity", to_string(e.parity)},
                {"collapsed", e.collapsed}};
}

inline json bands_json(const BandStructure& bs) {
    json eps = json::array();
    for (const GapEndpoint& e : bs.endpoints) eps.push_back(endpoint_json(e));
    json out{{"mean_shift", bs.mean_shift_applied}, {"endpoints", std::move(eps)}};
    if (!bs.warnings.empty()) out["warnings"] = bs.warnings;
    return out;
}

inline Side side_from_string(const std::string& s) {
    if (s == "minus") return Side::minus;
    if (s == "plus") return Side::plus;
    if (s == "bottom") return Side::bottom;
    throw format_error("unknown endpoint side '" + s + "'");
}

inline BandStructure bands_from_json(const json& j) {
    try {
        BandStructure bs;
        bs.mean_shift_applied = j.at("mean_shift").get<double>();
        for (const json& e : j.at("endpoints")) {
            GapEndpoint ep;
            ep.k = e.at("k").get<int>();
            ep.side = side_from_string(e.at("side").get<std::string>());
            ep.lambda = e.at("lambda").get<double>();
            std::string parity = e.at("parity").get<std::string>();
            if (parity != "periodic" && parity != "semiperiodic")
                throw format_error("unknown parity '" + parity + "'");
            ep.parity = parity == "periodic" ? Parity::periodic : Parity::semiperiodic;
            ep.collapsed = e.at("collapsed").get<bool>();
            bs.endpoints.push_back(ep);
        }
        if (j.contains("warnings"))
            bs.warnings = j.at("warnings").get<std::vector<std::string>>();
        return bs;
    } catch (const json::exception& e) {
        throw format_error(std::string("malformed band structure: ") + e.what());
    }
}

inline std::string bands_csv(const BandStructure& bs) {
    std::string out = "k,side,lambda,parity,collapsed\n";
    for (const GapEndpoint& e : bs.endpoints) {
        out += std::to_string(e.k);
        out += ',';
        out += to_string(e.side);
        out += ',';
        out += fmt(e.lambda);
        out += ',';
        out += to_string(e.parity);
        out += ',';
        out += e.collapsed ? '1' : '0';
        out += '\n';
    }
    return out;
}

// ---- discriminant samples --------------------------------------------------

/// Failed samples are missing rows.
inline std::string samples_csv(const std::vector<DiscSample>& samples) {
    std::string out = "lambda,delta\n";
    for (const DiscSample& s : samples) {
        if (!s.valid) continue;
        out += fmt(s.lambda);
        out += ',';
        out += fmt(s.delta);
        out += '\n';
    }
    return out;
}

inline json samples_json(const std::vector<DiscSample>& samples) {
    json arr = json::array();
    for (const DiscSample& s : samples)
        if (s.valid) arr.push_back(json{{"lambda", s.lambda}, {"delta", s.delta}});
    return json{{"samples", std::move(arr)}};
}

// ---- eigenvalue lists --------------------------------------------------------

inline std::string eigenvalues_csv(const std::vector<double>& vals) {
    std::string out = "j,lambda\n";
    for (std::size_t i = 0; i < vals.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += fmt(vals[i]);
        out += '\n';
    }
    return out;
}

inline json eigenvalues_json(const std::vector<double>& vals, Parity parity) {
    return json{{"parity", to_string(parity)}, {"eigenvalues", vals}};
}

// ---- convergence tables ------------------------------------------------------

inline std::string convergence_csv(const ConvergenceTable& table) {
    std::string out = "n,k,side,lambda\n";
    for (const ConvergenceRow& row : table.rows)
        for (const GapEndpoint& e : row.structure.endpoints) {
            out += std::to_string(row.n);
            out += ',';
            out += std::to_string(e.k);
            out += ',';
            out += to_string(e.side);
            out += ',';
            out += fmt(e.lambda);
            out += '\n';
        }
    return out;
}

inline json convergence_json(const ConvergenceTable& table) {
    json rows = json::array();
    for (const ConvergenceRow& row : table.rows)
        rows.push_back(json{{"n", row.n}, {"structure", bands_json(row.structure)}});
    return json{{"rows", std::move(rows)}};
}

} // namespace hillband::io
