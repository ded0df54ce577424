#ifndef HEUNSYM_MOBIUS_HPP
#define HEUNSYM_MOBIUS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "heunsym/errors.hpp"
#include "heunsym/fuchsian.hpp"

namespace heunsym {

/// Point on the Riemann sphere as a projective pair, so z = infinity is
/// first-class.
struct RiemannPoint {
    cplx num = 0.0;
    cplx den = 1.0;

    RiemannPoint() = default;
    RiemannPoint(cplx z) : num(z), den(1.0) {}
    RiemannPoint(cplx n, cplx d) : num(n), den(d) {}

    static RiemannPoint infinity() { return {1.0, 0.0}; }

    bool is_infinity() const {
        return std::abs(den) <= 1e-14 * std::max(1.0, std::abs(num));
    }

    cplx value() const {
        if (is_infinity()) throw Error("RiemannPoint: value() at infinity");
        return num / den;
    }
};

/// Fractional-linear map u = (a z + b)/(c z + d), ad - bc != 0.
struct MobiusMap {
    cplx a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    MobiusMap() = default;
    MobiusMap(cplx a_, cplx b_, cplx c_, cplx d_) : a(a_), b(b_), c(c_), d(d_) {
        const double m = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
        if (std::abs(det()) <= 1e-14 * m * m)
            throw DegenerateMap("MobiusMap: vanishing determinant");
    }

    cplx det() const { return a * d - b * c; }

    static MobiusMap identity() { return {}; }
    static MobiusMap translation(cplx zeta) { return {1.0, zeta, 0.0, 1.0}; }
    static MobiusMap dilatation(cplx t) { return {t, 0.0, 0.0, 1.0}; }
    static MobiusMap inversion() { return {0.0, 1.0, 1.0, 0.0}; }

    RiemannPoint operator()(const RiemannPoint& z) const {
        return {a * z.num + b * z.den, c * z.num + d * z.den};
    }

    /// Convenience for finite input/output; z = -d/c maps to infinity and is
    /// reported through the RiemannPoint overload instead.
    cplx apply(cplx z) const { return (*this)(RiemannPoint(z)).value(); }
};

inline MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2) {
    // (m1 o m2)(z) = m1(m2(z))
    return {m1.a * m2.a + m1.b * m2.c, m1.a * m2.b + m1.b * m2.d,
            m1.c * m2.a + m1.d * m2.c, m1.c * m2.b + m1.d * m2.d};
}

inline MobiusMap invert(const MobiusMap& m) { return {m.d, -m.b, -m.c, m.a}; }

/// Primitive factors produced by decompose().
struct PrimitiveMap {
    enum class Kind { Translate, Scale, Invert } kind;
    cplx value = 0.0; // shift or scale factor; unused for Invert

    MobiusMap as_map() const {
        switch (kind) {
            case Kind::Translate: return MobiusMap::translation(value);
            case Kind::Scale: return MobiusMap::dilatation(value);
            case Kind::Invert: return MobiusMap::inversion();
        }
        return MobiusMap::identity();
    }
};

/// Factors the map into translations, one inversion, and a dilatation,
/// applied left to right: map = last o ... o first.
inline std::vector<PrimitiveMap> decompose(const MobiusMap& m) {
    using K = PrimitiveMap::Kind;
    if (std::abs(m.c) <= 1e-14 * std::max({std::abs(m.a), std::abs(m.b), std::abs(m.d)})) {
        return {{K::Scale, m.a / m.d}, {K::Translate, m.b / m.d}};
    }
    return {{K::Translate, m.d / m.c},
            {K::Invert, 0.0},
            {K::Scale, (m.b * m.c - m.a * m.d) / (m.c * m.c)},
            {K::Translate, m.a / m.c}};
}

inline RiemannPoint apply_chain(const std::vector<PrimitiveMap>& chain, RiemannPoint z) {
    for (const auto& p : chain) z = p.as_map()(z);
    return z;
}

/// Cross-ratio a = ((z1-z3)(z2-z4)) / ((z2-z3)(z1-z4)) with the limit
/// conventions at infinity.
inline cplx cross_ratio(const RiemannPoint& z1, const RiemannPoint& z2, const RiemannPoint& z3,
                        const RiemannPoint& z4) {
    auto diff = [](const RiemannPoint& x, const RiemannPoint& y) {
        return x.num * y.den - y.num * x.den;
    };
    double scale = 0.0;
    for (auto* p : {&z1, &z2, &z3, &z4})
        scale = std::max(scale, std::max(std::abs(p->num), std::abs(p->den)));
    const std::array<const RiemannPoint*, 4> pts{&z1, &z2, &z3, &z4};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(diff(*pts[i], *pts[j])) <= 1e-14 * scale * scale)
                throw DuplicatePoints("cross_ratio: coincident points");
    const cplx num = diff(z1, z3) * diff(z2, z4);
    const cplx den = diff(z2, z3) * diff(z1, z4);
    return num / den;
}

inline cplx cross_ratio(cplx z1, cplx z2, cplx z3, cplx z4) {
    return cross_ratio(RiemannPoint(z1), RiemannPoint(z2), RiemannPoint(z3), RiemannPoint(z4));
}

/// True iff the four points are concyclic (real cross-ratio).
inline bool is_circular(const std::array<cplx, 4>& pts) {
    const cplx a = cross_ratio(pts[0], pts[1], pts[2], pts[3]);
    return std::abs(a.imag()) <= 1e-10 * (1.0 + std::abs(a));
}

/// The map with m(p1) = 0, m(p2) = 1, m(p3) = infinity.
inline MobiusMap map_to_standard_triple(const RiemannPoint& p1, const RiemannPoint& p2,
                                        const RiemannPoint& p3) {
    // m(z) = ((z - p1)(p2 - p3)) / ((z - p3)(p2 - p1)) in projective form.
    auto diff = [](const RiemannPoint& x, const RiemannPoint& y) {
        return x.num * y.den - y.num * x.den;
    };
    const cplx k = diff(p2, p3), l = diff(p2, p1);
    return {k * p1.den, -k * p1.num, l * p3.den, -l * p3.num};
}

/// The map sending (s1,s2,s3) to (t1,t2,t3).
inline MobiusMap map_three_points(const std::array<RiemannPoint, 3>& src,
                                  const std::array<RiemannPoint, 3>& dst) {
    return compose(invert(map_to_standard_triple(dst[0], dst[1], dst[2])),
                   map_to_standard_triple(src[0], src[1], src[2]));
}

struct Canonicalization {
    MobiusMap map;
    cplx phi;
};

inline std::array<cplx, 4> canonical_points(cplx phi) {
    const cplx I(0.0, 1.0);
    const cplx e = std::exp(I * phi), einv = std::exp(-I * phi);
    return {e, -einv, -e, einv};
}

/// Maps four distinct points onto the biquadratic configuration
/// (e^{i phi}, -e^{-i phi}, -e^{i phi}, e^{-i phi}), in that order.
/// sin^2 phi = 1 / cross_ratio; phi on the principal-arcsine branch with
/// Re phi in (0, pi/2].
inline Canonicalization canonicalize(const std::array<cplx, 4>& pts) {
    require_distinct({pts.begin(), pts.end()});
    const cplx a = cross_ratio(pts[0], pts[1], pts[2], pts[3]);
    if (std::abs(a) < 1e-12 || std::abs(a - 1.0) < 1e-12 || std::abs(a) > 1e12)
        throw DegenerateCrossRatio("canonicalize: cross-ratio in {0,1,inf}");
    const cplx phi = std::asin(std::sqrt(1.0 / a));
    const auto target = canonical_points(phi);
    MobiusMap m = map_three_points({pts[0], pts[1], pts[2]}, {target[0], target[1], target[2]});
    const cplx z4_img = m(RiemannPoint(pts[3])).value();
    if (std::abs(z4_img - target[3]) > 1e-10 * (1.0 + std::abs(target[3])))
        throw Error("canonicalize: fourth point missed its target");
    return {m, phi};
}

// ----- extended group action on equation parameters -----

namespace detail {

inline void translate_accessory(std::vector<cplx>& lam, cplx zeta) {
    // lambda_l -> sum_{m >= l} C(m,l) zeta^{m-l} lambda_m
    const int L = static_cast<int>(lam.size());
    std::vector<cplx> out(lam.size(), 0.0);
    for (int l = 0; l < L; ++l) {
        cplx binom = 1.0, zpow = 1.0;
        for (int m = l; m < L; ++m) {
            if (m > l) {
                binom *= double(m) / double(m - l);
                zpow *= zeta;
            }
            out[static_cast<std::size_t>(l)] += binom * zpow * lam[static_cast<std::size_t>(m)];
        }
    }
    lam = std::move(out);
}

} // namespace detail

/// Generator action on a general-N symmetric Fuchsian configuration.
/// Indices are untouched: q_j = alpha_j beta_j P'(z_j) transforms
/// covariantly through the point motion alone, and the accessory
/// coefficients follow the printed generator rules.
inline FuchsianConfig transform_config(const FuchsianConfig& cfg, const PrimitiveMap& g) {
    using K = PrimitiveMap::Kind;
    const int N = cfg.n_points;
    std::vector<cplx> pts = cfg.points;
    std::vector<cplx> lam = cfg.accessory;
    const std::vector<cplx> q = cfg.q_values();

    switch (g.kind) {
        case K::Translate:
            for (auto& z : pts) z += g.value;
            detail::translate_accessory(lam, g.value);
            break;
        case K::Scale: {
            cplx t = g.value;
            for (auto& z : pts) z *= t;
            for (std::size_t l = 0; l < lam.size(); ++l)
                lam[l] *= std::pow(t, double(N - static_cast<int>(l) - 2));
            break;
        }
        case K::Invert: {
            cplx sigmaN = 1.0;
            for (cplx z : pts) {
                if (std::abs(z) < 1e-12) throw SingularAtOrigin("inversion with a point at 0");
                sigmaN *= z;
            }
            const double sign = (N % 2 == 0) ? -1.0 : 1.0; // (-1)^{N-1}
            std::vector<cplx> newlam(lam.size());
            const int L = static_cast<int>(lam.size()); // == N-3
            for (int l = 0; l < L; ++l) {
                cplx s = 0.0;
                for (int j = 0; j < N; ++j)
                    s += std::pow(pts[static_cast<std::size_t>(j)], double(l + 3 - N)) *
                         q[static_cast<std::size_t>(j)];
                newlam[static_cast<std::size_t>(l)] =
                    sign / sigmaN * (s - lam[static_cast<std::size_t>(L - 1 - l)]);
            }
            lam = std::move(newlam);
            for (auto& z : pts) z = 1.0 / z;
            break;
        }
    }
    return FuchsianConfig(std::move(pts), cfg.indices, std::move(lam), cfg.tol);
}

/// Generator action on the N = 4 instance: chi is carried over unchanged
/// (q then transforms covariantly by construction) and lambda follows
/// the N = 4 rules: fixed under translation, t^2 under dilatation,
/// (lambda - sum q_j/z_j)/sigma_4 under inversion.
inline SymmetricHeunConfig transform_config(const SymmetricHeunConfig& cfg,
                                            const PrimitiveMap& g) {
    using K = PrimitiveMap::Kind;
    std::array<cplx, 4> pts = cfg.points;
    cplx lambda = cfg.lambda;
    switch (g.kind) {
        case K::Translate:
            for (auto& z : pts) z += g.value;
            break;
        case K::Scale:
            for (auto& z : pts) z *= g.value;
            lambda *= g.value * g.value;
            break;
        case K::Invert: {
            cplx qsum = 0.0;
            for (int j = 0; j < 4; ++j) {
                if (std::abs(pts[static_cast<std::size_t>(j)]) < 1e-12)
                    throw SingularAtOrigin("inversion with a point at 0");
                qsum += cfg.q[static_cast<std::size_t>(j)] / pts[static_cast<std::size_t>(j)];
            }
            lambda = (lambda - qsum) / cfg.sigma[3];
            for (auto& z : pts) z = 1.0 / z;
            break;
        }
    }
    return SymmetricHeunConfig::from_points(pts, cfg.chis, lambda);
}

/// Action of an arbitrary map, extended from the generators by composition
/// through decompose().
template <class Config>
inline Config transform_config(const Config& cfg, const MobiusMap& m) {
    Config out = cfg;
    for (const auto& g : decompose(m)) out = transform_config(out, g);
    return out;
}

} // namespace heunsym

#endif
