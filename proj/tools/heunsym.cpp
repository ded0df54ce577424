// Command-line front end: evaluation, coefficient tables, CSV grids,
// verification suites, Mobius transforms, connection coefficients and
// eigenvalue search for the symmetric-form Heun equation.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "heunsym/config_io.hpp"
#include "heunsym/connection.hpp"
#include "heunsym/heun_classical.hpp"
#include "heunsym/mobius.hpp"
#include "heunsym/oracle.hpp"
#include "heunsym/series.hpp"

using namespace heunsym;

namespace {

struct RunConfig {
    std::string mode;
    std::string config_path;
    std::string phi, chi, lambda, z;
    int terms = 0; // 0 = adaptive default
    double tol = 1e-10;
    std::string family = "general";
    std::string grid;
    std::string window;
    std::string output;
    std::string mobius_kind;
    std::string mobius_value = "0";
    int point_index = 0; // 1-based; 0 = all where applicable
    unsigned seed = 42;
};

int term_budget(const RunConfig& rc) {
    int cap = 20000;
    if (const char* env = std::getenv("HEUNSYM_MAX_TERMS")) {
        try {
            cap = std::max(8, std::stoi(env));
        } catch (const std::exception&) {
            throw ParseError("HEUNSYM_MAX_TERMS is not an integer");
        }
    }
    if (rc.terms > 0) {
        if (rc.terms < 8) throw ParseError("--terms must be at least 8");
        return std::min(rc.terms, cap);
    }
    return std::min(400, cap);
}

RecurrenceFamily family_of(const std::string& name) {
    if (name == "general") return RecurrenceFamily::general;
    if (name == "circular") return RecurrenceFamily::circular;
    if (name == "simplest") return RecurrenceFamily::simplest;
    throw ParseError("unknown family: " + name);
}

SymmetricHeunConfig load_config(const RunConfig& rc) {
    if (!rc.config_path.empty()) return config_from_kv(read_key_values(rc.config_path));
    std::map<std::string, std::string> kv;
    if (rc.phi.empty() || rc.chi.empty() || rc.lambda.empty())
        throw ParseError("need either --config or all of --phi/--chi/--lambda");
    kv["phi"] = rc.phi;
    kv["chi"] = rc.chi;
    kv["lambda"] = rc.lambda;
    return config_from_kv(kv);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const RunConfig& rc, const std::string& text) {
    if (rc.output.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(rc.output, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + rc.output);
    out << text;
}

struct GridSpec {
    double r0, r1;
    int nr;
    double t0, t1;
    int nt;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g{};
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ParseError("grid spec needs 'r0:r1:nr,t0:t1:nt'");
    auto triple = [](const std::string& part, double& a, double& b, int& n) {
        std::istringstream in(part);
        std::string x;
        std::vector<std::string> v;
        while (std::getline(in, x, ':')) v.push_back(x);
        if (v.size() != 3) throw ParseError("grid spec needs 'r0:r1:nr,t0:t1:nt'");
        try {
            a = std::stod(v[0]);
            b = std::stod(v[1]);
            n = std::stoi(v[2]);
        } catch (const std::exception&) {
            throw ParseError("bad grid numbers");
        }
        if (n < 1 || !std::isfinite(a) || !std::isfinite(b))
            throw ParseError("bad grid bounds");
    };
    triple(s.substr(0, comma), g.r0, g.r1, g.nr);
    triple(s.substr(comma + 1), g.t0, g.t1, g.nt);
    return g;
}

int mode_eval(const RunConfig& rc) {
    auto cfg = load_config(rc);
    if (rc.z.empty()) throw ParseError("eval needs --z");
    const cplx z = parse_complex(rc.z);
    auto [f1, f2] = fundamental_pair(cfg, family_of(rc.family), term_budget(rc));
    const auto e1 = eval_series(f1, z);
    const auto e2 = eval_series(f2, z);
    std::ostringstream out;
    out << "F1=" << format_complex(e1.value) << "\n"
        << "dF1=" << format_complex(e1.derivative) << "\n"
        << "F2=" << format_complex(e2.value) << "\n"
        << "dF2=" << format_complex(e2.derivative) << "\n";
    emit(rc, out.str());
    return 0;
}

int mode_fundamental(const RunConfig& rc) {
    auto cfg = load_config(rc);
    const int n = term_budget(rc);
    auto [f1, f2] = fundamental_pair(cfg, family_of(rc.family), n);
    std::ostringstream out;
    out << "n,re_f1,im_f1,re_f2,im_f2\n";
    for (std::size_t m = 0; m < f1.coeffs.size(); ++m)
        out << m << ',' << fmt(f1.coeffs[m].real()) << ',' << fmt(f1.coeffs[m].imag())
            << ',' << fmt(f2.coeffs[m].real()) << ',' << fmt(f2.coeffs[m].imag()) << "\n";
    emit(rc, out.str());
    return 0;
}

int mode_table(const RunConfig& rc) {
    auto cfg = load_config(rc);
    if (rc.grid.empty()) throw ParseError("table needs --grid r0:r1:nr,t0:t1:nt");
    const GridSpec g = parse_grid(rc.grid);
    const auto family = family_of(rc.family);
    const int n = term_budget(rc);

    auto [f1, f2] = fundamental_pair(cfg, family, n);
    SeriesSolution l1, l2;
    const bool wants_exterior = g.r1 > 0.95;
    if (wants_exterior) {
        l1 = laurent_solution(cfg, family, InitTag::F1, n);
        l2 = laurent_solution(cfg, family, InitTag::F2, n);
    }
    const Poly P_inv = wants_exterior ? l1.config.characteristic() : Poly{};

    std::ostringstream out;
    out << "re_z,im_z,re_F1,im_F1,re_F2,im_F2,wronskian_residual,ode_residual\n";
    for (int ir = 0; ir < g.nr; ++ir) {
        const double r = g.nr == 1 ? g.r0 : g.r0 + (g.r1 - g.r0) * ir / double(g.nr - 1);
        for (int it = 0; it < g.nt; ++it) {
            const double t =
                g.nt == 1 ? g.t0 : g.t0 + (g.t1 - g.t0) * it / double(g.nt - 1);
            const cplx z = std::polar(r, t);
            cplx v1, d1v, v2, d2v;
            double wr, ode;
            if (r < 0.95) {
                const auto e1 = eval_series(f1, z);
                const auto e2 = eval_series(f2, z);
                v1 = e1.value; d1v = e1.derivative;
                v2 = e2.value; d2v = e2.derivative;
                wr = wronskian_residual(f1, f2, z);
                ode = std::max(ode_residual(cfg, f1, z), ode_residual(cfg, f2, z));
            } else if (r > 1.05) {
                const auto e1 = eval_series(l1, z);
                const auto e2 = eval_series(l2, z);
                v1 = e1.value; d1v = e1.derivative;
                v2 = e2.value; d2v = e2.derivative;
                // the exterior pair is the inverted-image fundamental pair:
                // its Wronskian in z carries the chain-rule factor -1/z^2
                const cplx w = 1.0 / z;
                const cplx expect = -(w * w) *
                    std::exp(-0.5 * continuous_log_along(P_inv, 0.0, w));
                wr = std::abs(v1 * d2v - v2 * d1v - expect);
                ode = std::max(ode_residual(cfg, l1, z), ode_residual(cfg, l2, z));
            } else {
                throw OutsideDomain("table: grid radius falls in the gap [0.95, 1.05] "
                                    "around the singular circle");
            }
            out << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << fmt(v1.real()) << ','
                << fmt(v1.imag()) << ',' << fmt(v2.real()) << ',' << fmt(v2.imag()) << ','
                << fmt(wr) << ',' << fmt(ode) << "\n";
        }
    }
    emit(rc, out.str());
    return 0;
}

SymmetricHeunConfig random_canonical(std::mt19937& rng) {
    std::uniform_real_distribution<double> uphi(0.15, std::numbers::pi / 2 - 0.15);
    std::uniform_real_distribution<double> uchi(-1.2, 1.2);
    std::uniform_real_distribution<double> ulam(-4.0, 4.0);
    const double phi = uphi(rng);
    std::array<cplx, 4> chis{uchi(rng), uchi(rng), uchi(rng), uchi(rng)};
    const double lam = ulam(rng);
    return SymmetricHeunConfig::canonical_config(phi, chis, lam);
}

int mode_verify(const RunConfig& rc) {
    std::mt19937 rng(rc.seed);
    const bool explicit_cfg =
        !rc.config_path.empty() || !(rc.phi.empty() && rc.chi.empty() && rc.lambda.empty());
    std::vector<SymmetricHeunConfig> cfgs;
    if (explicit_cfg) {
        cfgs.push_back(load_config(rc));
    } else {
        for (int k = 0; k < 20; ++k) cfgs.push_back(random_canonical(rng));
    }
    const int n = std::max(term_budget(rc), 300);

    std::ostringstream out;
    bool ok = true;
    auto report = [&](const char* name, double worst, double threshold) {
        const bool pass = worst < threshold;
        ok = ok && pass;
        out << name << ": max_residual=" << fmt(worst) << " threshold=" << fmt(threshold)
            << (pass ? " PASS" : " FAIL") << "\n";
    };

    // Wronskian law on a polar grid, and the equation residual at |z| = 0.5
    double worst_wr = 0.0, worst_ode = 0.0;
    for (const auto& cfg : cfgs) {
        auto [f1, f2] = fundamental_pair(cfg, RecurrenceFamily::general, n);
        for (int ir = 1; ir <= 10; ++ir)
            for (int it = 0; it < 10; ++it) {
                const cplx z = std::polar(0.08 * ir, 2.0 * std::numbers::pi * it / 10.0);
                worst_wr = std::max(worst_wr, wronskian_residual(f1, f2, z));
            }
        for (int it = 0; it < 8; ++it) {
            const cplx z = std::polar(0.5, 2.0 * std::numbers::pi * it / 8.0);
            worst_ode = std::max(worst_ode, ode_residual(cfg, f1, z));
            worst_ode = std::max(worst_ode, ode_residual(cfg, f2, z));
        }
    }
    report("wronskian", worst_wr, 1e-10);
    report("ode_residual", worst_ode, 1e-9);

    // Mobius covariance of the three group generators
    double worst_cov = 0.0;
    for (std::size_t ci = 0; ci < std::min<std::size_t>(cfgs.size(), 5); ++ci) {
        const auto& cfg = cfgs[ci];
        auto [f1, f2] = fundamental_pair(cfg, RecurrenceFamily::general, n);
        const cplx zeta(0.3, 0.2);
        for (int gen = 0; gen < 3; ++gen) {
            PrimitiveMap prim;
            cplx dzdw, d2zdw2, w; // z(w) pullback data at the image point w
            if (gen == 0) {
                prim = {PrimitiveMap::Kind::Translate, cplx(0.4, -0.3)};
                w = zeta + prim.value;
                dzdw = 1.0;
                d2zdw2 = 0.0;
            } else if (gen == 1) {
                prim = {PrimitiveMap::Kind::Scale, cplx(1.7, 0.4)};
                w = zeta * prim.value;
                dzdw = 1.0 / prim.value;
                d2zdw2 = 0.0;
            } else {
                prim = {PrimitiveMap::Kind::Invert, 0.0};
                w = 1.0 / zeta;
                dzdw = -1.0 / (w * w);
                d2zdw2 = 2.0 / (w * w * w);
            }
            const auto tcfg = transform_config(cfg, prim);
            const Equation eq = equation_of(tcfg);
            for (const auto& f : {f1, f2}) {
                const auto e = eval_series(f, zeta);
                const cplx d2 = eval_second_derivative(f, zeta);
                const cplx val = e.value;
                const cplx dw = e.derivative * dzdw;
                const cplx dww = d2 * dzdw * dzdw + e.derivative * d2zdw2;
                const cplx res = dww + eq.p1(w) * dw + eq.p0(w) * val;
                const double scale = std::max(
                    {std::abs(dww), std::abs(eq.p1(w) * dw), std::abs(eq.p0(w) * val), 1.0});
                worst_cov = std::max(worst_cov, std::abs(res) / scale);
            }
        }
    }
    report("mobius_covariance", worst_cov, 1e-8);

    // cross-ratio invariance under random maps
    double worst_cr = 0.0;
    std::uniform_real_distribution<double> um(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        MobiusMap m{cplx(um(rng), um(rng)), cplx(um(rng), um(rng)), cplx(um(rng), um(rng)),
                    cplx(um(rng), um(rng))};
        if (std::abs(m.a * m.d - m.b * m.c) < 1e-2) continue;
        std::array<cplx, 4> zz{cplx(um(rng), um(rng)), cplx(um(rng), um(rng)),
                               cplx(um(rng), um(rng)), cplx(um(rng), um(rng))};
        bool distinct = true;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (std::abs(zz[a] - zz[b]) < 1e-2) distinct = false;
        if (!distinct) continue;
        try {
            const cplx before = cross_ratio(zz[0], zz[1], zz[2], zz[3]);
            const cplx after =
                cross_ratio(m.apply(zz[0]), m.apply(zz[1]), m.apply(zz[2]), m.apply(zz[3]));
            worst_cr = std::max(worst_cr, std::abs(before - after) / (1.0 + std::abs(before)));
        } catch (const DuplicatePoints&) {
            continue;
        }
    }
    report("cross_ratio", worst_cr, 1e-11);

    // Lagrange identity on interior paths
    double worst_lag = 0.0;
    std::uniform_real_distribution<double> ul(-2.0, 2.0);
    for (std::size_t ci = 0; ci < std::min<std::size_t>(cfgs.size(), 5); ++ci) {
        const cplx lam1(ul(rng), ul(rng)), lam2(ul(rng), ul(rng));
        ContourPath path{{cplx(-0.3, 0.1), cplx(0.2, -0.35), cplx(0.5, 0.3)}};
        worst_lag =
            std::max(worst_lag, verify_lagrange_identity(cfgs[ci], lam1, lam2, path).gap);
    }
    report("lagrange", worst_lag, 1e-6);

    emit(rc, out.str());
    return ok ? 0 : 1;
}

int mode_mobius(const RunConfig& rc) {
    auto cfg = load_config(rc);
    if (rc.mobius_kind.empty())
        throw ParseError("mobius needs --map translate|scale|invert");
    PrimitiveMap prim;
    if (rc.mobius_kind == "translate")
        prim = {PrimitiveMap::Kind::Translate, parse_complex(rc.mobius_value)};
    else if (rc.mobius_kind == "scale")
        prim = {PrimitiveMap::Kind::Scale, parse_complex(rc.mobius_value)};
    else if (rc.mobius_kind == "invert")
        prim = {PrimitiveMap::Kind::Invert, 0.0};
    else
        throw ParseError("unknown map kind: " + rc.mobius_kind);
    emit(rc, config_to_text(transform_config(cfg, prim)));
    return 0;
}

int mode_connect(const RunConfig& rc) {
    auto cfg = load_config(rc);
    std::ostringstream out;
    const int lo = rc.point_index > 0 ? rc.point_index : 1;
    const int hi = rc.point_index > 0 ? rc.point_index : 4;
    for (int j = lo; j <= hi; ++j) {
        const auto cp = connection_gamma(cfg, j - 1, std::max(term_budget(rc), 300));
        out << "j=" << j << " Gamma1=" << format_complex(cp.gamma1)
            << " Gamma2=" << format_complex(cp.gamma2)
            << " verification_gap=" << fmt(cp.verification_gap) << "\n";
    }
    emit(rc, out.str());
    return 0;
}

int mode_spectrum(const RunConfig& rc) {
    auto cfg = load_config(rc);
    if (rc.window.empty()) throw ParseError("spectrum needs --window lo:hi");
    const auto colon = rc.window.find(':');
    if (colon == std::string::npos) throw ParseError("window spec is lo:hi");
    double lo, hi;
    try {
        lo = std::stod(rc.window.substr(0, colon));
        hi = std::stod(rc.window.substr(colon + 1));
    } catch (const std::exception&) {
        throw ParseError("bad window numbers");
    }
    const auto roots = eigenvalue_search(cfg, 0, 3, lo, hi, rc.tol);
    std::ostringstream out;
    for (cplx r : roots) out << "lambda=" << format_complex(r) << "\n";
    emit(rc, out.str());
    return 0;
}

int run(int argc, char** argv) {
    RunConfig rc;
    CLI::App app{"symmetric-form Heun equation toolkit"};
    app.add_option("mode", rc.mode, "eval|fundamental|table|verify|mobius|connect|spectrum")
        ->required();
    app.add_option("--config", rc.config_path, "config file (key=value)");
    app.add_option("--phi", rc.phi, "canonical angle (complex, 're+imi')");
    app.add_option("--chi", rc.chi, "four chi values, comma separated");
    app.add_option("--lambda", rc.lambda, "accessory parameter");
    app.add_option("--z", rc.z, "evaluation point");
    app.add_option("--terms", rc.terms, "series truncation (default adaptive)");
    app.add_option("--tol", rc.tol, "tolerance")->check(CLI::PositiveNumber);
    app.add_option("--family", rc.family, "general|circular|simplest");
    app.add_option("--grid", rc.grid, "polar grid r0:r1:nr,t0:t1:nt");
    app.add_option("--window", rc.window, "real lambda window lo:hi (spectrum)");
    app.add_option("--output", rc.output, "output path (default stdout)");
    app.add_option("--map", rc.mobius_kind, "translate|scale|invert (mobius)");
    app.add_option("--map-value", rc.mobius_value, "map parameter (mobius)");
    app.add_option("--j", rc.point_index, "singular point index 1..4 (connect)");
    app.add_option("--seed", rc.seed, "rng seed for randomized suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (rc.mode == "eval") return mode_eval(rc);
        if (rc.mode == "fundamental") return mode_fundamental(rc);
        if (rc.mode == "table") return mode_table(rc);
        if (rc.mode == "verify") return mode_verify(rc);
        if (rc.mode == "mobius") return mode_mobius(rc);
        if (rc.mode == "connect") return mode_connect(rc);
        if (rc.mode == "spectrum") return mode_spectrum(rc);
        throw ParseError("unknown mode: " + rc.mode);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
