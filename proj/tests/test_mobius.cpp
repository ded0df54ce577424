#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>
#include <random>

#include "heunsym/mobius.hpp"

using namespace heunsym;
using std::numbers::pi;

namespace {
const cplx I(0.0, 1.0);

MobiusMap random_map(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        cplx a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng)), d(u(rng), u(rng));
        if (std::abs(a * d - b * c) > 0.1) return {a, b, c, d};
    }
}
} // namespace

TEST_CASE("apply") {
    CHECK(std::abs(MobiusMap::identity().apply(cplx(0.3, -0.7)) - cplx(0.3, -0.7)) < 1e-15);
    CHECK(std::abs(MobiusMap::inversion().apply(2.0) - 0.5) < 1e-15);
    // z / (z + 1) at z = 1
    MobiusMap m{1.0, 0.0, 1.0, 1.0};
    CHECK(std::abs(m.apply(1.0) - 0.5) < 1e-15);
    // compactified conventions
    CHECK(std::abs(m(RiemannPoint::infinity()).value() - 1.0) < 1e-15);
    CHECK(m(RiemannPoint(cplx(-1.0))).is_infinity());
}

TEST_CASE("group algebra") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        MobiusMap m = random_map(rng);
        MobiusMap id = compose(m, invert(m));
        for (int k = 0; k < 5; ++k) {
            cplx z(u(rng), u(rng));
            CHECK(std::abs(id.apply(z) - z) < 1e-12);
        }
    }
    // inversion is an involution
    MobiusMap inv2 = invert(MobiusMap::inversion());
    cplx z(0.4, 1.3);
    CHECK(std::abs(inv2.apply(z) - MobiusMap::inversion().apply(z)) < 1e-15);
    // translations form a subgroup
    MobiusMap t = compose(MobiusMap::translation(cplx(1.0, 2.0)), MobiusMap::translation(cplx(-0.5, 0.25)));
    CHECK(std::abs(t.apply(z) - (z + cplx(0.5, 2.25))) < 1e-14);
}

TEST_CASE("decompose") {
    // z/(z+1) at z = 1 through the chain
    MobiusMap m{1.0, 0.0, 1.0, 1.0};
    auto chain = decompose(m);
    CHECK(std::abs(apply_chain(chain, RiemannPoint(cplx(1.0))).value() - 0.5) < 1e-14);

    // affine branch
    auto affine = decompose(MobiusMap{3.0, 2.0, 0.0, 1.0});
    REQUIRE(affine.size() == 2);
    CHECK(affine[0].kind == PrimitiveMap::Kind::Scale);
    CHECK(std::abs(affine[0].value - 3.0) < 1e-15);
    CHECK(affine[1].kind == PrimitiveMap::Kind::Translate);
    CHECK(std::abs(affine[1].value - 2.0) < 1e-15);

    // random maps recompose pointwise
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        MobiusMap r = random_map(rng);
        auto ch = decompose(r);
        for (int k = 0; k < 10; ++k) {
            cplx z(u(rng), u(rng));
            RiemannPoint img = r(RiemannPoint(z));
            RiemannPoint via = apply_chain(ch, RiemannPoint(z));
            if (img.is_infinity() || via.is_infinity()) continue;
            CHECK(std::abs(img.value() - via.value()) < 1e-11 * (1.0 + std::abs(img.value())));
        }
    }
}

TEST_CASE("cross ratio") {
    auto pts4 = canonical_points(pi / 4);
    CHECK(std::abs(cross_ratio(pts4[0], pts4[1], pts4[2], pts4[3]) - 2.0) < 1e-13);

    for (double phi : {0.3, 0.9, 1.4}) {
        auto p = canonical_points(phi);
        const cplx a = cross_ratio(p[0], p[1], p[2], p[3]);
        CHECK(std::abs(a - 1.0 / (std::sin(phi) * std::sin(phi))) < 1e-12 * std::abs(a));
    }

    CHECK(std::abs(cross_ratio(0.0, 1.0, 2.0, 3.0) - 4.0 / 3.0) < 1e-14);

    // infinity conventions: (0, 1, a, inf) has cross-ratio a/(a-1)
    const cplx a = cross_ratio(RiemannPoint(cplx(0.0)), RiemannPoint(cplx(1.0)),
                               RiemannPoint(cplx(4.0)), RiemannPoint::infinity());
    CHECK(std::abs(a - 4.0 / 3.0) < 1e-14);

    CHECK_THROWS_AS(cross_ratio(1.0, 1.0, 2.0, 3.0), DuplicatePoints);
}

TEST_CASE("cross ratio is Mobius invariant") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int tested = 0;
    while (tested < 100) {
        MobiusMap m = random_map(rng);
        std::array<cplx, 4> z{cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                              cplx(u(rng), u(rng))};
        bool ok = true;
        std::array<RiemannPoint, 4> w;
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < j; ++k)
                if (std::abs(z[j] - z[k]) < 1e-3) ok = false;
        if (!ok) continue;
        for (int j = 0; j < 4; ++j) w[j] = m(RiemannPoint(z[j]));
        const cplx a0 = cross_ratio(z[0], z[1], z[2], z[3]);
        const cplx a1 = cross_ratio(w[0], w[1], w[2], w[3]);
        CHECK(std::abs(a1 - a0) < 1e-11 * (1.0 + std::abs(a0)));
        ++tested;
    }
}

TEST_CASE("is_circular") {
    CHECK(is_circular({0.0, 1.0, 2.0, 3.0}));
    auto p = canonical_points(pi / 3);
    CHECK(is_circular(p));
    CHECK_FALSE(is_circular({0.0, 1.0, 2.0, I}));
}

TEST_CASE("canonicalize") {
    // already-canonical points: phi recovered, images match
    for (double phi : {0.4, pi / 3, 1.2}) {
        auto p = canonical_points(phi);
        auto res = canonicalize(p);
        CHECK(std::abs(res.phi - phi) < 1e-10);
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(res.map(RiemannPoint(p[j])).value() - p[j]) < 1e-9);
    }

    // (0,1,2,3): a = 4/3, sin^2 phi = 3/4, phi = pi/3
    auto res = canonicalize({0.0, 1.0, 2.0, 3.0});
    CHECK(std::abs(res.phi - pi / 3) < 1e-12);
    auto target = canonical_points(res.phi);
    const std::array<cplx, 4> src{0.0, 1.0, 2.0, 3.0};
    for (int j = 0; j < 4; ++j)
        CHECK(std::abs(res.map(RiemannPoint(src[j])).value() - target[j]) < 1e-10);

    // non-circular points: complex phi, sigma constraints still hold
    auto nc = canonicalize({0.0, 1.0, 2.0, I});
    CHECK(std::abs(nc.phi.imag()) > 1e-6);
    std::vector<cplx> imgs;
    for (cplx z : {cplx(0.0), cplx(1.0), cplx(2.0), I})
        imgs.push_back(nc.map(RiemannPoint(z)).value());
    auto s = elementary_symmetric(imgs);
    CHECK(std::abs(s[0]) < 1e-10);
    CHECK(std::abs(s[2]) < 1e-10);
    CHECK(std::abs(s[3] - 1.0) < 1e-10);
}

TEST_CASE("transform_config generators") {
    auto cfg = SymmetricHeunConfig::canonical_config(0.8, {0.3, -0.4, 0.9, 0.2}, cplx(1.5, 0.5));

    // translation: q and lambda unchanged, points shifted
    auto tr = transform_config(cfg, PrimitiveMap{PrimitiveMap::Kind::Translate, cplx(0.7, -0.2)});
    CHECK(std::abs(tr.lambda - cfg.lambda) < 1e-14);
    for (int j = 0; j < 4; ++j) {
        CHECK(std::abs(tr.points[j] - (cfg.points[j] + cplx(0.7, -0.2))) < 1e-14);
        CHECK(std::abs(tr.q[j] - cfg.q[j]) < 1e-12);
    }

    // dilatation t = 2: lambda -> 4 lambda, q -> 8 q
    auto sc = transform_config(cfg, PrimitiveMap{PrimitiveMap::Kind::Scale, cplx(2.0)});
    CHECK(std::abs(sc.lambda - 4.0 * cfg.lambda) < 1e-13);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(sc.q[j] - 8.0 * cfg.q[j]) < 1e-12);

    // inversion of a canonical circular config: points reversed, lambda shifted
    auto in = transform_config(cfg, PrimitiveMap{PrimitiveMap::Kind::Invert, 0.0});
    for (int j = 0; j < 4; ++j) CHECK(std::abs(in.points[j] - cfg.points[3 - j]) < 1e-13);
    const cplx shift = cplx(0.0, 0.25) * std::sin(2.0 * cfg.phi) * cfg.rho[0];
    CHECK(std::abs(in.lambda - (cfg.lambda - shift)) < 1e-13);
    for (int j = 0; j < 4; ++j)
        CHECK(std::abs(in.q[j] - (-cfg.q[j] / (cfg.points[j] * cfg.points[j]))) < 1e-12);
}
