#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>
#include <random>

#include "heunsym/oracle.hpp"
#include "heunsym/series.hpp"

using namespace heunsym;
using std::numbers::pi;

namespace {
SymmetricHeunConfig random_canonical(std::mt19937& rng) {
    std::uniform_real_distribution<double> uphi(0.15, pi / 2 - 0.15);
    std::uniform_real_distribution<double> uchi(-1.2, 1.2);
    std::uniform_real_distribution<double> ulam(-4.0, 4.0);
    std::array<cplx, 4> chis{uchi(rng), uchi(rng), uchi(rng), uchi(rng)};
    return SymmetricHeunConfig::canonical_config(uphi(rng), chis, ulam(rng));
}
} // namespace

TEST_CASE("constant solution propagates exactly") {
    auto cfg = SymmetricHeunConfig::canonical_config(pi / 4, {0.0, 0.0, 0.0, 0.0}, 0.0);
    ContourPath path{{cplx(0.0), cplx(0.3, 0.2), cplx(0.5), cplx(-0.1, -0.4)}};
    auto [v, d] = integrate_path(cfg, path, {1.0, 0.0});
    CHECK(std::abs(v - 1.0) < 1e-12);
    CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("path independence in a simply connected region") {
    std::mt19937 rng(3);
    auto cfg = random_canonical(rng);
    const cplx target(0.4, 0.3);
    ContourPath direct{{cplx(0.0), target}};
    ContourPath dogleg{{cplx(0.0), cplx(0.45, -0.15), cplx(0.1, 0.35), target}};
    auto a = integrate_path(cfg, direct, {1.0, 0.0}, 1e-12);
    auto b = integrate_path(cfg, dogleg, {1.0, 0.0}, 1e-12);
    CHECK(std::abs(a.first - b.first) < 1e-10);
    CHECK(std::abs(a.second - b.second) < 1e-10);
}

TEST_CASE("agrees with the series solutions inside the disk") {
    std::mt19937 rng(5);
    for (int rep = 0; rep < 3; ++rep) {
        auto cfg = random_canonical(rng);
        auto [f1, f2] = fundamental_pair(cfg, RecurrenceFamily::general, 300);
        for (cplx z : {cplx(0.5), cplx(-0.3, 0.45), cplx(0.1, -0.6)}) {
            ContourPath path{{cplx(0.0), z}};
            auto o1 = integrate_path(cfg, path, {1.0, 0.0}, 1e-12);
            auto o2 = integrate_path(cfg, path, {0.0, 1.0}, 1e-12);
            auto s1 = eval_series(f1, z);
            auto s2 = eval_series(f2, z);
            CHECK(std::abs(o1.first - s1.value) < 1e-8);
            CHECK(std::abs(o2.first - s2.value) < 1e-8);
            CHECK(std::abs(o1.second - s1.derivative) < 1e-8);
        }
    }
}

TEST_CASE("monodromy around a single singular point is nontrivial") {
    auto cfg = SymmetricHeunConfig::canonical_config(pi / 3, {0.4, -0.3, 0.7, 0.2}, 1.1);
    const cplx z1 = cfg.points[0];
    const cplx start = z1 + 0.3;
    ContourPath loop{{start, z1 + cplx(0.0, 0.3), z1 - 0.3, z1 - cplx(0.0, 0.3), start}};
    auto [v, d] = integrate_path(cfg, loop, {1.0, 0.0}, 1e-12);
    CHECK(std::abs(v - 1.0) + std::abs(d) > 1e-3);
}

TEST_CASE("exclusion radius enforcement") {
    std::mt19937 rng(7);
    auto cfg = random_canonical(rng);
    ContourPath bad{{cplx(0.0), cfg.points[0] * 0.9995}};
    CHECK_THROWS_AS(integrate_path(cfg, bad, {1.0, 0.0}), SingularApproach);
}

TEST_CASE("quadrature") {
    std::mt19937 rng(9);
    auto cfg = random_canonical(rng);

    ContourPath path{{cplx(0.1, 0.1), cplx(0.4, -0.2)}};
    CHECK(std::abs(quadrature(cfg, [](cplx) { return cplx(0.0); }, path)) == 0.0);

    // measure-weighted unit integrand against a fixed-step composite reference
    path.measure = Measure::inverse_sqrt_P;
    const cplx adaptive = quadrature(cfg, [](cplx) { return cplx(1.0); }, path, 1e-12);
    const Equation eq = equation_of(cfg);
    const MeasureTracker mu(eq, path);
    cplx ref = 0.0;
    const int n = 20000; // fixed-step Simpson reference
    const cplx za = path.vertices[0], d = path.vertices[1] - za;
    for (int i = 0; i < n; ++i) {
        const double t0 = double(i) / n, t1 = double(i + 1) / n;
        const cplx f0 = mu.weight(za + t0 * d, 0);
        const cplx fm = mu.weight(za + 0.5 * (t0 + t1) * d, 0);
        const cplx f1 = mu.weight(za + t1 * d, 0);
        ref += (f0 + 4.0 * fm + f1) / 6.0 * (t1 - t0) * d;
    }
    CHECK(std::abs(adaptive - ref) < 1e-10);
}

TEST_CASE("Lagrange identity, four-point form") {
    std::mt19937 rng(11);
    auto cfg = random_canonical(rng);

    auto same = verify_lagrange_identity(cfg, cplx(1.3, 0.2), cplx(1.3, 0.2),
                                         ContourPath{{cplx(0.0), cplx(0.5, 0.2)}});
    CHECK(std::abs(same.lhs) < 1e-10);
    CHECK(std::abs(same.rhs) < 1e-10);

    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        auto c = random_canonical(rng);
        const cplx l1(u(rng), u(rng)), l2(u(rng), u(rng));
        ContourPath path{{cplx(-0.3, 0.1), cplx(0.2, -0.35), cplx(0.5, 0.3)}};
        auto chk = verify_lagrange_identity(c, l1, l2, path);
        CHECK(chk.gap < 1e-6);
    }
}

TEST_CASE("Lagrange identity, five-point form with equidistant accessory pair") {
    std::vector<cplx> pts;
    for (int k = 0; k < 5; ++k)
        pts.push_back(std::exp(cplx(0.0, 2.0 * pi * k / 5.0)));
    const std::vector<cplx> chis{0.3, -0.5, 0.2, 0.8, -0.1};
    const cplx dl(0.7, -0.4);
    const std::vector<cplx> lam1{cplx(0.9, 0.3), cplx(-0.6, 0.5)};
    const std::vector<cplx> lam2{lam1[0] + dl, lam1[1] + dl};
    auto c1 = FuchsianConfig::symmetric(pts, chis, lam1);
    auto c2 = FuchsianConfig::symmetric(pts, chis, lam2);
    ContourPath path{{cplx(0.1), cplx(0.25, 0.3), cplx(-0.2, 0.4)}};
    auto chk = verify_lagrange_identity(c1, c2, path);
    CHECK(chk.gap < 1e-5);
    CHECK(std::abs(chk.lhs) > 1e-8); // nontrivial both sides
}

TEST_CASE("orthogonality integral structure") {
    // constant-solution config: integrand reduces to the bare measure between
    // two singular endpoints; self-consistency across tolerances
    auto cfg = SymmetricHeunConfig::canonical_config(pi / 4, {0.0, 0.0, 0.0, 0.0}, 0.0);
    ContourPath path{{cfg.points[3], cfg.points[0]}};
    path.measure = Measure::inverse_sqrt_P;
    auto one = [](cplx) { return cplx(1.0); };
    const cplx coarse = orthogonality_integral(cfg, one, one, path, {0.0, 0.0}, 1e-6);
    const cplx fine = orthogonality_integral(cfg, one, one, path, {0.0, 0.0}, 1e-11);
    CHECK(std::abs(coarse) > 0.1); // finite, nonzero norm-type integral
    CHECK(std::abs(coarse - fine) < 1e-5 * (1.0 + std::abs(fine)));

    CHECK_THROWS_AS(orthogonality_integral(cfg, one, one, path, {-0.6, 0.0}),
                    NonIntegrableEndpoint);
}
