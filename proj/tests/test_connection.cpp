#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>
#include <random>

#include "heunsym/connection.hpp"

using namespace heunsym;
using std::numbers::pi;

namespace {

// second derivative of the local Frobenius solution, termwise
cplx local_second(const LocalFrobenius& lf, cplx z) {
    const cplx w = z - lf.center;
    cplx V = 0.0, V1 = 0.0, V2 = 0.0;
    for (std::size_t m = lf.coeffs.size(); m-- > 0;) {
        V = V * w + lf.coeffs[m];
        if (m >= 1) V1 = V1 * w + double(m) * lf.coeffs[m];
        if (m >= 2) V2 = V2 * w + double(m) * double(m - 1) * lf.coeffs[m];
    }
    const cplx r = lf.exponent;
    return std::exp(r * std::log(w)) *
           (V2 + 2.0 * r * V1 / w + r * (r - 1.0) * V / (w * w));
}

SymmetricHeunConfig spectral_fixture(cplx lambda) {
    // conjugation-symmetric pattern: real phi, chi_1 = chi_4, chi_2 = chi_3
    return SymmetricHeunConfig::canonical_config(pi / 3, {0.3, 0.8, 0.8, 0.3}, lambda);
}

} // namespace

TEST_CASE("frobenius_local basics") {
    auto cfg = SymmetricHeunConfig::canonical_config(pi / 3, {0.0, 0.4, -0.3, 0.6}, 1.2);

    // q_1 = 0: exponents {1/2, 0}
    auto fa = frobenius_local(cfg, 0, ExponentChoice::alpha);
    auto fb = frobenius_local(cfg, 0, ExponentChoice::beta);
    CHECK(std::abs(fa.exponent - 0.5) < 1e-14);
    CHECK(std::abs(fb.exponent) < 1e-14);
    CHECK(fa.coeffs[0] == cplx(1.0));
    CHECK(fb.coeffs[0] == cplx(1.0));

    // residual of the symmetric-form equation inside the local disk
    const Equation eq = equation_of(cfg);
    for (int j = 0; j < 4; ++j) {
        for (auto choice : {ExponentChoice::alpha, ExponentChoice::beta}) {
            auto lf = frobenius_local(cfg, j, choice);
            const cplx zj = cfg.points[static_cast<std::size_t>(j)];
            const cplx z = zj + 0.1 * (cplx(0.0) - zj);
            auto [v, d] = local_eval(lf, z);
            const cplx d2 = local_second(lf, z);
            const double scale =
                std::max({std::abs(d2), std::abs(eq.p1(z) * d), std::abs(eq.p0(z) * v), 1.0});
            CHECK(std::abs(d2 + eq.p1(z) * d + eq.p0(z) * v) / scale < 1e-9);
        }
    }

    // alpha = beta at chi = pi/4 is resonant
    auto bad = SymmetricHeunConfig::canonical_config(pi / 3, {pi / 4, 0.4, -0.3, 0.6}, 1.2);
    CHECK_THROWS_AS(frobenius_local(bad, 0, ExponentChoice::alpha), ResonantExponents);
}

TEST_CASE("decompose_local") {
    auto cfg = SymmetricHeunConfig::canonical_config(pi / 3, {0.25, 0.4, -0.3, 0.6}, 0.8);
    const int j = 2;
    const cplx zj = cfg.points[j];
    auto fa = frobenius_local(cfg, j, ExponentChoice::alpha);
    auto fb = frobenius_local(cfg, j, ExponentChoice::beta);
    const cplx zm = zj + 0.2 * fa.disk_radius * (-zj / std::abs(zj));

    // basis element decomposes as (1, 0)
    const SolutionHandle ha = [&fa](cplx z) { return local_eval(fa, z); };
    auto dec = decompose_local(cfg, ha, j, zm);
    CHECK(std::abs(dec.c_alpha - 1.0) < 1e-10);
    CHECK(std::abs(dec.c_beta) < 1e-10);

    // linearity
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
    const SolutionHandle hb = [&fb](cplx z) { return local_eval(fb, z); };
    const SolutionHandle hmix = [&](cplx z) {
        auto [va, da] = ha(z);
        auto [vb, db] = hb(z);
        return std::make_pair(a * va + b * vb, a * da + b * db);
    };
    auto dm = decompose_local(cfg, hmix, j, zm);
    CHECK(std::abs(dm.c_alpha - a) < 1e-10);
    CHECK(std::abs(dm.c_beta - b) < 1e-10);

    // boundary-bracket consistency: the constant P^{1/2} Wronskian of (F1, F2)
    // equals |alpha - beta| |P'(z_j)|^{1/2} |det C| in the singular limit
    auto [f1, f2] = fundamental_pair(cfg, RecurrenceFamily::general, 400);
    const SolutionHandle h1 = [&f1](cplx z) {
        auto e = eval_series(f1, z);
        return std::make_pair(e.value, e.derivative);
    };
    const SolutionHandle h2 = [&f2](cplx z) {
        auto e = eval_series(f2, z);
        return std::make_pair(e.value, e.derivative);
    };
    auto d1 = decompose_local(cfg, h1, j, zm);
    auto d2 = decompose_local(cfg, h2, j, zm);
    const cplx detC = d1.c_alpha * d2.c_beta - d2.c_alpha * d1.c_beta;
    const Poly P = cfg.characteristic();
    const double lhs = std::abs(fa.exponent - fb.exponent) *
                       std::sqrt(std::abs(P.derivative().eval(zj))) * std::abs(detC);
    CHECK(std::abs(lhs - 1.0) < 1e-6); // |P(0)^{1/2}| = 1 on canonical configs
}

TEST_CASE("gamma_solve basis identities") {
    auto cfg = SymmetricHeunConfig::canonical_config(pi / 3, {0.25, 0.4, -0.3, 0.6}, 0.8);
    auto [f1, f2] = fundamental_pair(cfg, RecurrenceFamily::general, 400);
    const SolutionHandle h1 = [&f1](cplx z) {
        auto e = eval_series(f1, z);
        return std::make_pair(e.value, e.derivative);
    };
    const cplx dir = cfg.points[0] / std::abs(cfg.points[0]);
    auto g1 = gamma_solve(cfg, h1, 0.7 * dir, 0.6 * dir);
    CHECK(std::abs(g1.gamma1 - 1.0) < 1e-10);
    CHECK(std::abs(g1.gamma2) < 1e-10);
    CHECK(g1.verification_gap < 1e-10);
}

TEST_CASE("connection coefficients at every singular point") {
    auto cfg = SymmetricHeunConfig::canonical_config(pi / 3, {0.25, 0.4, -0.3, 0.6}, 0.8);
    for (int j = 0; j < 4; ++j) {
        auto cp = connection_gamma(cfg, j);
        CHECK(cp.verification_gap < 1e-7);
        CHECK(std::abs(cp.gamma1) + std::abs(cp.gamma2) > 1e-10);

        // representation identity along the segment between matching points
        const LocalFrame lf = symmetric_to_local_frame(cfg, j);
        const cplx zj = cfg.points[static_cast<std::size_t>(j)];
        auto fa = frobenius_local(cfg, j, ExponentChoice::alpha);
        const cplx z_near = zj + 0.15 * fa.disk_radius * (-zj / std::abs(zj));
        const SolutionHandle raw = [&lf](cplx z) { return local_solution_at(lf, z); };
        const cplx K = decompose_local(cfg, raw, j, z_near).c_alpha;
        auto [f1, f2] = fundamental_pair(cfg, RecurrenceFamily::general, 400);
        const cplx dir = zj / std::abs(zj);
        for (int t = 0; t <= 10; ++t) {
            const cplx z = (0.6 + 0.01 * t) * dir;
            const cplx lhs = raw(z).first / K;
            const cplx rhs = cp.gamma1 * eval_series(f1, z).value +
                             cp.gamma2 * eval_series(f2, z).value;
            CHECK(std::abs(lhs - rhs) < 1e-7 * std::max(1.0, std::abs(lhs)));
        }
    }
}

TEST_CASE("eigenvalue search and orthogonality") {
    const int i = 0, j = 3;

    // continuity of the shooting function
    {
        auto base = spectral_fixture(0.0);
        const cplx d0 = boundary_mismatch(base.with_lambda(1.0), i, j);
        const cplx d1 = boundary_mismatch(base.with_lambda(1.0 + 1e-3), i, j);
        CHECK(std::abs(d1 - d0) < 0.1);
    }

    auto tmpl = spectral_fixture(0.0);
    auto roots = eigenvalue_search(tmpl, i, j, -25.0, 0.0, 1e-8, 80);
    REQUIRE(roots.size() >= 2);
    for (cplx r : roots) {
        CHECK(std::abs(boundary_mismatch(tmpl.with_lambda(r), i, j)) < 1e-8);
    }

    // orthogonality of two distinct eigenfunctions
    auto cfg1 = tmpl.with_lambda(roots[0]);
    auto cfg2 = tmpl.with_lambda(roots[1]);
    auto e1 = eigenfunction(cfg1, i, j);
    auto e2 = eigenfunction(cfg2, i, j);
    ContourPath path{{tmpl.points[i], tmpl.points[j]}};
    path.measure = Measure::inverse_sqrt_P;
    auto [ai, bi] = indices_from_chi(tmpl.chis[i], 4);
    (void)bi;
    const double ee = 2.0 * ai.real(); // same chi pattern at both endpoints
    const cplx ortho = orthogonality_integral(cfg1, e1, e2, path, {ee, ee}, 1e-9);
    CHECK(std::abs(ortho) < 1e-6);

    // negative control: non-eigen pair
    auto cfg3 = tmpl.with_lambda(roots[0] + 0.7);
    auto e3 = eigenfunction(cfg3, i, j);
    const cplx bad = orthogonality_integral(cfg1, e1, e3, path, {ee, 0.0}, 1e-9);
    CHECK(std::abs(bad) > 1e-3);

    // empty window
    CHECK_THROWS_AS(
        eigenvalue_search(tmpl, i, j, roots[0].real() + 0.2, roots[0].real() + 0.4, 1e-8, 8),
        NoRootInWindow);
}
