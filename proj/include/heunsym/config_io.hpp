#pragma once

// Plain-text configuration parsing and formatting: complex numbers in
// "re+imi" form, key=value files with '#' comments, comma-separated arrays.

#include <cctype>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "heunsym/errors.hpp"
#include "heunsym/fuchsian.hpp"

namespace heunsym {

/// Parse "1.5-0.25i", "2", "-3i", "1e-3+2.5e2i".
inline cplx parse_complex(std::string s) {
    // strip whitespace
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) throw ParseError("parse_complex: empty token");

    const bool has_i = t.back() == 'i' || t.back() == 'I';
    if (!has_i) {
        std::size_t pos = 0;
        double re;
        try {
            re = std::stod(t, &pos);
        } catch (const std::exception&) {
            throw ParseError("parse_complex: bad number '" + s + "'");
        }
        if (pos != t.size()) throw ParseError("parse_complex: trailing junk in '" + s + "'");
        return {re, 0.0};
    }
    t.pop_back(); // drop 'i'
    // locate the sign splitting real and imaginary parts (not after e/E)
    std::size_t split = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    try {
        if (split == std::string::npos) {
            // pure imaginary: "i", "-i", "2.5i"
            if (t.empty() || t == "+") return {0.0, 1.0};
            if (t == "-") return {0.0, -1.0};
            std::size_t pos = 0;
            const double im = std::stod(t, &pos);
            if (pos != t.size())
                throw ParseError("parse_complex: trailing junk in '" + s + "'");
            return {0.0, im};
        }
        const std::string re_part = t.substr(0, split);
        std::string im_part = t.substr(split);
        std::size_t pos = 0;
        const double re = std::stod(re_part, &pos);
        if (pos != re_part.size())
            throw ParseError("parse_complex: trailing junk in '" + s + "'");
        double im;
        if (im_part == "+") im = 1.0;
        else if (im_part == "-") im = -1.0;
        else {
            im = std::stod(im_part, &pos);
            if (pos != im_part.size())
                throw ParseError("parse_complex: trailing junk in '" + s + "'");
        }
        return {re, im};
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("parse_complex: bad number '" + s + "'");
    }
}

/// "re+imi" with 17 significant digits, sign and 'i' always present.
inline std::string format_complex(cplx v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
    return buf;
}

inline std::vector<cplx> parse_complex_list(const std::string& s) {
    std::vector<cplx> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(parse_complex(item));
    if (out.empty()) throw ParseError("parse_complex_list: empty list");
    return out;
}

/// key=value file with '#' comments; later keys override earlier ones.
inline std::map<std::string, std::string> read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string stripped;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) stripped.push_back(c);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError("bad config line: " + line);
        kv[stripped.substr(0, eq)] = stripped.substr(eq + 1);
    }
    return kv;
}

/// Build a configuration from keys phi/chi/lambda (canonical) or
/// points/chi/lambda (general placement).
inline SymmetricHeunConfig config_from_kv(const std::map<std::string, std::string>& kv) {
    auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError(std::string("missing config key: ") + key);
        return it->second;
    };
    const auto chis_v = parse_complex_list(need("chi"));
    if (chis_v.size() != 4) throw ParseError("config key 'chi' needs 4 entries");
    const std::array<cplx, 4> chis{chis_v[0], chis_v[1], chis_v[2], chis_v[3]};
    const cplx lambda = parse_complex(need("lambda"));
    if (kv.count("points")) {
        const auto pts_v = parse_complex_list(need("points"));
        if (pts_v.size() != 4) throw ParseError("config key 'points' needs 4 entries");
        return SymmetricHeunConfig::from_points({pts_v[0], pts_v[1], pts_v[2], pts_v[3]},
                                                chis, lambda);
    }
    return SymmetricHeunConfig::canonical_config(parse_complex(need("phi")), chis, lambda);
}

inline std::string config_to_text(const SymmetricHeunConfig& cfg) {
    std::ostringstream out;
    if (cfg.canonical) {
        out << "phi=" << format_complex(cfg.phi) << "\n";
    } else {
        out << "points=";
        for (int k = 0; k < 4; ++k)
            out << (k ? "," : "") << format_complex(cfg.points[static_cast<std::size_t>(k)]);
        out << "\n";
    }
    out << "chi=";
    for (int k = 0; k < 4; ++k)
        out << (k ? "," : "") << format_complex(cfg.chis[static_cast<std::size_t>(k)]);
    out << "\n";
    out << "lambda=" << format_complex(cfg.lambda) << "\n";
    return out.str();
}

} // namespace heunsym
