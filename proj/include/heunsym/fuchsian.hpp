#ifndef HEUNSYM_FUCHSIAN_HPP
#define HEUNSYM_FUCHSIAN_HPP

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "heunsym/errors.hpp"
#include "heunsym/poly.hpp"

namespace heunsym {

/// Default tolerances: structural invariants absolute, derived identities relative.
struct Tolerances {
    double structural = 1e-12;
    double derived = 1e-11;
};

inline double point_scale(const std::vector<cplx>& pts) {
    double s = 1.0;
    for (cplx z : pts) s = std::max(s, std::abs(z));
    return s;
}

inline void require_distinct(const std::vector<cplx>& pts, double rel_tol = 1e-10) {
    const double scale = point_scale(pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (std::abs(pts[i] - pts[j]) < rel_tol * scale)
                throw DuplicatePoints("singular points too close");
}

/// Elementary symmetric functions sigma_1..sigma_N of the given points,
/// so that prod (z - z_j) = sum (-1)^k sigma_k z^{N-k}.
inline std::vector<cplx> elementary_symmetric(const std::vector<cplx>& pts) {
    std::vector<cplx> sigma(pts.size() + 1, 0.0);
    sigma[0] = 1.0;
    std::size_t used = 0;
    for (cplx z : pts) {
        ++used;
        for (std::size_t k = used; k >= 1; --k) sigma[k] += z * sigma[k - 1];
    }
    return {sigma.begin() + 1, sigma.end()};
}

/// sigma_k with z_j set to zero, i.e. the elementary symmetric functions of
/// the other three points. j is 1-based.
inline std::array<cplx, 3> reduced_symmetric(const std::array<cplx, 4>& pts, int j) {
    std::vector<cplx> rest;
    rest.reserve(3);
    for (int k = 0; k < 4; ++k)
        if (k != j - 1) rest.push_back(pts[static_cast<std::size_t>(k)]);
    auto s = elementary_symmetric(rest);
    return {s[0], s[1], s[2]};
}

/// Index pair (alpha, beta) from the uniformization angle chi.
inline std::pair<cplx, cplx> indices_from_chi(cplx chi, int n_points) {
    const double w = 1.0 - 2.0 / double(n_points);
    const cplx c = std::cos(chi), s = std::sin(chi);
    return {w * c * c, w * s * s};
}

/// The four combinations rho_2..rho_5 of sin^2(2 chi_j) with phi phases.
inline std::array<cplx, 4> rho_functions(cplx phi, const std::array<cplx, 4>& chis) {
    std::array<cplx, 4> s2;
    for (int j = 0; j < 4; ++j) {
        const cplx s = std::sin(2.0 * chis[static_cast<std::size_t>(j)]);
        s2[static_cast<std::size_t>(j)] = s * s;
    }
    const cplx I(0.0, 1.0);
    const cplx ep = std::exp(I * phi), em = std::exp(-I * phi);
    const cplx ep2 = std::exp(2.0 * I * phi), em2 = std::exp(-2.0 * I * phi);
    const cplx rho2 = (s2[0] + s2[2]) - (s2[1] + s2[3]);
    const cplx rho3 = em * (s2[0] - s2[2]) + ep * (s2[1] - s2[3]);
    const cplx rho4 = ep2 * (s2[0] + s2[2]) - em2 * (s2[1] + s2[3]);
    const cplx rho5 = ep * (s2[0] - s2[2]) + em * (s2[1] - s2[3]);
    return {rho2, rho3, rho4, rho5};
}

/// General-N symmetric-form Fuchsian equation data: N distinct points, index
/// pairs obeying the Fuchs relation, and the accessory polynomial Lambda(z)
/// of degree N-4.
struct FuchsianConfig {
    int n_points = 0;
    std::vector<cplx> points;
    std::vector<std::pair<cplx, cplx>> indices; // (alpha_j, beta_j)
    std::vector<cplx> accessory;                // lambda_0 .. lambda_{N-4}
    Tolerances tol{};

    FuchsianConfig(std::vector<cplx> pts, std::vector<std::pair<cplx, cplx>> idx,
                   std::vector<cplx> acc, Tolerances t = {})
        : n_points(static_cast<int>(pts.size())),
          points(std::move(pts)),
          indices(std::move(idx)),
          accessory(std::move(acc)),
          tol(t) {
        if (n_points < 4) throw Error("FuchsianConfig: need N >= 4");
        if (indices.size() != points.size()) throw Error("FuchsianConfig: index count");
        if (accessory.size() != static_cast<std::size_t>(n_points - 3))
            throw Error("FuchsianConfig: accessory length must be N-3");
        require_distinct(points);
        cplx s = 0.0;
        for (auto& [a, b] : indices) s += a + b;
        if (std::abs(s - cplx(double(n_points - 2))) > 1e-12 * double(n_points))
            throw FuchsRelationViolated("sum of indices must be N-2");
    }

    /// Fully symmetric instance: alpha_j + beta_j = 1 - 2/N for every point.
    static FuchsianConfig symmetric(std::vector<cplx> pts, const std::vector<cplx>& chis,
                                    std::vector<cplx> acc) {
        const int n = static_cast<int>(pts.size());
        std::vector<std::pair<cplx, cplx>> idx;
        idx.reserve(pts.size());
        for (cplx chi : chis) idx.push_back(indices_from_chi(chi, n));
        return FuchsianConfig(std::move(pts), std::move(idx), std::move(acc));
    }

    Poly characteristic() const { return poly_from_roots(points); } // P(z)

    /// q_j = alpha_j beta_j P'(z_j).
    std::vector<cplx> q_values() const {
        const Poly dP = characteristic().derivative();
        std::vector<cplx> q(points.size());
        for (std::size_t j = 0; j < points.size(); ++j)
            q[j] = indices[j].first * indices[j].second * dP.eval(points[j]);
        return q;
    }
};

/// Exponent shifts nu_j that bring the indices to the symmetric pattern
/// alpha_j + beta_j = 1 - 2/N; they always sum to zero under the Fuchs
/// relation.
inline std::vector<cplx> symmetrize_indices(const FuchsianConfig& cfg) {
    const double w = 1.0 - 2.0 / double(cfg.n_points);
    std::vector<cplx> nu(cfg.points.size());
    cplx sum = 0.0;
    for (std::size_t j = 0; j < cfg.points.size(); ++j) {
        nu[j] = (cplx(w) - cfg.indices[j].first - cfg.indices[j].second) / 2.0;
        sum += nu[j];
    }
    if (std::abs(sum) > 1e-12 * double(cfg.n_points))
        throw FuchsRelationViolated("nu shifts do not sum to zero");
    return nu;
}

/// N = 4 symmetric-form Heun equation instance. chi is the primary index
/// parameterization; q is derived. phi and rho are defined only in the
/// canonical frame sigma_1 = sigma_3 = 0, sigma_4 = 1 with the points in
/// the order (e^{i phi}, -e^{-i phi}, -e^{i phi}, e^{-i phi}).
struct SymmetricHeunConfig {
    std::array<cplx, 4> points{};
    std::array<cplx, 4> chis{};
    cplx lambda = 0.0;

    std::array<cplx, 4> q{};
    std::array<cplx, 4> sigma{};
    bool canonical = false;
    cplx phi = 0.0;               // valid iff canonical
    std::array<cplx, 4> rho{};    // valid iff canonical
    bool chi_branch_resolved = false; // true if chis came from raw q data
    Tolerances tol{};

    static SymmetricHeunConfig from_points(const std::array<cplx, 4>& pts,
                                           const std::array<cplx, 4>& chis, cplx lambda) {
        SymmetricHeunConfig c;
        c.points = pts;
        c.chis = chis;
        c.lambda = lambda;
        c.finish();
        return c;
    }

    static SymmetricHeunConfig canonical_config(cplx phi, const std::array<cplx, 4>& chis,
                                                cplx lambda) {
        const cplx I(0.0, 1.0);
        const cplx e = std::exp(I * phi), einv = std::exp(-I * phi);
        return from_points({e, -einv, -e, einv}, chis, lambda);
    }

    /// Constructor from raw q_j; resolves a chi branch by principal arcsine
    /// and marks the choice.
    static SymmetricHeunConfig from_q(const std::array<cplx, 4>& pts,
                                      const std::array<cplx, 4>& qs, cplx lambda) {
        std::array<cplx, 4> chis;
        for (int j = 1; j <= 4; ++j) {
            cplx prod = 1.0;
            for (int k = 0; k < 4; ++k)
                if (k != j - 1) prod *= pts[static_cast<std::size_t>(j - 1)] - pts[static_cast<std::size_t>(k)];
            // sin^2(2 chi_j) = 16 q_j / prod_{k != j}(z_j - z_k)
            const cplx s2 = 16.0 * qs[static_cast<std::size_t>(j - 1)] / prod;
            chis[static_cast<std::size_t>(j - 1)] = 0.5 * std::asin(std::sqrt(s2));
        }
        SymmetricHeunConfig c = from_points(pts, chis, lambda);
        c.chi_branch_resolved = true;
        for (int j = 0; j < 4; ++j)
            if (std::abs(c.q[static_cast<std::size_t>(j)] - qs[static_cast<std::size_t>(j)]) >
                1e-9 * (1.0 + std::abs(qs[static_cast<std::size_t>(j)])))
                throw Error("from_q: chi branch does not reproduce q");
        return c;
    }

    SymmetricHeunConfig with_lambda(cplx new_lambda) const {
        SymmetricHeunConfig c = *this;
        c.lambda = new_lambda;
        return c;
    }

    Poly characteristic() const {
        return poly_from_roots({points[0], points[1], points[2], points[3]});
    }

    std::array<cplx, 3> reduced(int j) const { return reduced_symmetric(points, j); }

    void finish() {
        require_distinct({points.begin(), points.end()});
        auto s = elementary_symmetric({points.begin(), points.end()});
        sigma = {s[0], s[1], s[2], s[3]};
        for (int j = 1; j <= 4; ++j) {
            cplx prod = 1.0;
            for (int k = 0; k < 4; ++k)
                if (k != j - 1) prod *= points[static_cast<std::size_t>(j - 1)] - points[static_cast<std::size_t>(k)];
            const cplx s2chi = std::sin(2.0 * chis[static_cast<std::size_t>(j - 1)]);
            q[static_cast<std::size_t>(j - 1)] = 0.0625 * s2chi * s2chi * prod;
        }
        canonical = std::abs(sigma[0]) < 1e-10 && std::abs(sigma[2]) < 1e-10 &&
                    std::abs(sigma[3] - 1.0) < 1e-10;
        if (canonical) {
            const cplx I(0.0, 1.0);
            phi = std::log(points[0]) / I;
            // phi is meaningful only if the points follow the canonical order.
            const cplx e = std::exp(I * phi), einv = std::exp(-I * phi);
            const std::array<cplx, 4> expect{e, -einv, -e, einv};
            for (int j = 0; j < 4; ++j)
                if (std::abs(points[static_cast<std::size_t>(j)] - expect[static_cast<std::size_t>(j)]) > 1e-9)
                    canonical = false;
            if (canonical) rho = rho_functions(phi, chis);
        }
    }
};

/// Uniform pointwise view of either config kind: the coefficients of
/// F'' + p1 F' + p0 F = 0.
struct Equation {
    int n_points = 4;
    std::vector<cplx> points;
    std::vector<cplx> q;
    std::vector<cplx> p1_residues; // 1 - alpha_j - beta_j per point
    Poly accessory;  // Lambda(z)
    Poly P;
    double exclusion_radius = 0.0; // absolute; 0 disables the guard

    cplx p1(cplx z) const {
        guard(z);
        cplx s = 0.0;
        for (std::size_t j = 0; j < points.size(); ++j) s += p1_residues[j] / (z - points[j]);
        return s;
    }

    cplx p0(cplx z) const {
        guard(z);
        cplx s = accessory.eval(z);
        for (std::size_t j = 0; j < points.size(); ++j) s += q[j] / (z - points[j]);
        return s / P.eval(z);
    }

    double distance_to_singular(cplx z) const {
        double d = std::numeric_limits<double>::infinity();
        for (cplx zj : points) d = std::min(d, std::abs(z - zj));
        return d;
    }

private:
    void guard(cplx z) const {
        if (exclusion_radius > 0.0 && distance_to_singular(z) < exclusion_radius)
            throw SingularPointHit("evaluation too close to a singular point");
    }
};

inline Equation equation_of(const SymmetricHeunConfig& cfg) {
    Equation e;
    e.n_points = 4;
    e.points = {cfg.points.begin(), cfg.points.end()};
    e.q = {cfg.q.begin(), cfg.q.end()};
    e.p1_residues.assign(4, cplx(0.5));
    e.accessory = Poly::constant(cfg.lambda);
    e.P = cfg.characteristic();
    return e;
}

inline Equation equation_of(const FuchsianConfig& cfg) {
    Equation e;
    e.n_points = cfg.n_points;
    e.points = cfg.points;
    e.q = cfg.q_values();
    e.p1_residues.reserve(cfg.points.size());
    for (auto& [a, b] : cfg.indices) e.p1_residues.push_back(cplx(1.0) - a - b);
    e.accessory = Poly(cfg.accessory);
    e.P = cfg.characteristic();
    return e;
}

/// (p1, p0) of the normal-form equation at z, with a singular-point
/// exclusion guard.
inline std::pair<cplx, cplx> equation_coefficients_at(const SymmetricHeunConfig& cfg, cplx z,
                                                      double exclusion_radius = 1e-9) {
    Equation e = equation_of(cfg);
    e.exclusion_radius = exclusion_radius * point_scale(e.points);
    return {e.p1(z), e.p0(z)};
}

} // namespace heunsym

#endif
