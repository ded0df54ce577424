#pragma once

// Local Frobenius data at the singular points, decomposition of global
// solutions in local bases, connection coefficients expressing the local
// regular solution in the fundamental pair (F1, F2), and the two-point
// boundary eigenvalue search in the accessory parameter.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "heunsym/errors.hpp"
#include "heunsym/fuchsian.hpp"
#include "heunsym/heun_classical.hpp"
#include "heunsym/oracle.hpp"
#include "heunsym/series.hpp"

namespace heunsym {

enum class ExponentChoice { alpha, beta };

struct LocalFrobenius {
    int point_index = 0;
    cplx center;
    cplx exponent;       // leading exponent rho
    cplx other_exponent; // the partner index at the same point
    std::vector<cplx> coeffs; // f_0 = 1
    double disk_radius = 0.0; // distance to the nearest other singular point
};

/// Value/derivative handle for an arbitrary solution.
using SolutionHandle = std::function<std::pair<cplx, cplx>(cplx)>;

namespace detail {

inline void check_nonresonant(cplx alpha, cplx beta, const char* where) {
    const cplx diff = alpha - beta;
    if (std::abs(diff.imag()) < 1e-8 &&
        std::abs(diff.real() - std::round(diff.real())) < 1e-8)
        throw ResonantExponents(std::string(where) +
                                ": integer exponent difference at the singular point");
}

} // namespace detail

/// Frobenius solution about z_j obtained by recentering the polynomial form
/// P^2 F'' + (1/2) P P' F' + (lambda P + sum_k q_k P/(z - z_k)) F = 0.
inline LocalFrobenius frobenius_local(const SymmetricHeunConfig& cfg, int j,
                                      ExponentChoice choice, int m_max = 120) {
    if (j < 0 || j >= 4) throw Error("frobenius_local: index out of range");
    auto [alpha, beta] = indices_from_chi(cfg.chis[static_cast<std::size_t>(j)], 4);
    detail::check_nonresonant(alpha, beta, "frobenius_local");

    const Poly P = cfg.characteristic();
    Poly C = Poly::constant(cfg.lambda) * P;
    for (int k = 0; k < 4; ++k) {
        std::vector<cplx> others;
        for (int l = 0; l < 4; ++l)
            if (l != k) others.push_back(cfg.points[static_cast<std::size_t>(l)]);
        C = C + cfg.q[static_cast<std::size_t>(k)] * poly_from_roots(others);
    }
    const Poly A = P * P;
    const Poly B = 0.5 * (P * P.derivative());

    const cplx zj = cfg.points[static_cast<std::size_t>(j)];
    LocalFrobenius lf;
    lf.point_index = j;
    lf.center = zj;
    lf.exponent = choice == ExponentChoice::alpha ? alpha : beta;
    lf.other_exponent = choice == ExponentChoice::alpha ? beta : alpha;
    lf.coeffs = frobenius_series(A.shifted(zj), B.shifted(zj), C.shifted(zj),
                                 lf.exponent, m_max);
    lf.disk_radius = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k)
        if (k != j)
            lf.disk_radius = std::min(
                lf.disk_radius, std::abs(zj - cfg.points[static_cast<std::size_t>(k)]));
    return lf;
}

/// Value and derivative of (z - z_j)^rho * sum f_m (z - z_j)^m, principal branch.
inline std::pair<cplx, cplx> local_eval(const LocalFrobenius& lf, cplx z) {
    const cplx w = z - lf.center;
    if (std::abs(w) == 0.0) throw SingularPointHit("local_eval: at the expansion point");
    if (std::abs(w) > 0.98 * lf.disk_radius)
        throw OutsideDomain("local_eval: outside the Frobenius disk");
    auto [v, d] = taylor_eval(lf.coeffs, w);
    const cplx wp = std::exp(lf.exponent * std::log(w));
    return {wp * v, wp * (d + lf.exponent * v / w)};
}

struct LocalDecomposition {
    cplx c_alpha;
    cplx c_beta;
    double condition = 0.0;
};

namespace detail {

/// 2x2 solve [col1 col2] x = rhs with a 2-norm condition estimate.
inline std::pair<std::array<cplx, 2>, double> solve2(std::array<cplx, 2> col1,
                                                     std::array<cplx, 2> col2,
                                                     std::array<cplx, 2> rhs) {
    const cplx det = col1[0] * col2[1] - col2[0] * col1[1];
    const double frob2 = std::norm(col1[0]) + std::norm(col1[1]) + std::norm(col2[0]) +
                         std::norm(col2[1]);
    // singular values of a 2x2: s^2 = (frob2 +- sqrt(frob2^2 - 4|det|^2)) / 2
    const double disc = std::sqrt(std::max(frob2 * frob2 - 4.0 * std::norm(det), 0.0));
    const double smax = std::sqrt(0.5 * (frob2 + disc));
    const double smin = std::sqrt(std::max(0.5 * (frob2 - disc), 0.0));
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (cond > 1e8) throw IllConditioned("local basis matrix is numerically singular");
    const cplx x0 = (rhs[0] * col2[1] - col2[0] * rhs[1]) / det;
    const cplx x1 = (col1[0] * rhs[1] - rhs[0] * col1[1]) / det;
    return {{x0, x1}, cond};
}

} // namespace detail

/// Match value and derivative at matching_point against the two local
/// Frobenius solutions at z_j.
inline LocalDecomposition decompose_local(const SymmetricHeunConfig& cfg,
                                          const SolutionHandle& sol, int j,
                                          cplx matching_point, int m_max = 120) {
    const auto fa = frobenius_local(cfg, j, ExponentChoice::alpha, m_max);
    const auto fb = frobenius_local(cfg, j, ExponentChoice::beta, m_max);
    const auto [va, da] = local_eval(fa, matching_point);
    const auto [vb, db] = local_eval(fb, matching_point);
    const auto [v, d] = sol(matching_point);
    auto [x, cond] = detail::solve2({va, da}, {vb, db}, {v, d});
    return {x[0], x[1], cond};
}

struct ConnectionPair {
    cplx gamma1;
    cplx gamma2;
    double verification_gap = 0.0; // relative mismatch at the second point
};

/// Express `sol` in the basis (F1, F2) by a 2x2 solve at z_match, then verify
/// the representation at the independent point z_verify.
inline ConnectionPair gamma_solve(const SymmetricHeunConfig& cfg, const SolutionHandle& sol,
                                  cplx z_match, cplx z_verify, int n_terms = 400) {
    auto [f1, f2] = fundamental_pair(cfg, RecurrenceFamily::general, n_terms);
    const auto e1 = eval_series(f1, z_match);
    const auto e2 = eval_series(f2, z_match);
    const auto [v, d] = sol(z_match);
    auto [g, cond] = detail::solve2({e1.value, e1.derivative}, {e2.value, e2.derivative},
                                    {v, d});
    (void)cond;

    const auto w1 = eval_series(f1, z_verify);
    const auto w2 = eval_series(f2, z_verify);
    const auto [vv, dv] = sol(z_verify);
    const cplx recon = g[0] * w1.value + g[1] * w2.value;
    const cplx recon_d = g[0] * w1.derivative + g[1] * w2.derivative;
    const double scale = std::max({std::abs(vv), std::abs(dv), 1e-30});
    const double gap = std::max(std::abs(recon - vv), std::abs(recon_d - dv)) / scale;
    return {g[0], g[1], gap};
}

/// Connection coefficients of the local regular solution at z_j, normalized so
/// its leading Frobenius coefficient is 1, in the basis (F1, F2).
inline ConnectionPair connection_gamma(const SymmetricHeunConfig& cfg, int j,
                                       int n_terms = 400) {
    if (!cfg.canonical)
        throw NotCanonical("connection_gamma: canonical circular configuration required");
    const LocalFrame lf = symmetric_to_local_frame(cfg, j);
    const SolutionHandle raw = [&lf](cplx z) { return local_solution_at(lf, z); };

    // normalization: the pullback behaves like K (z - z_j)^{alpha_j} near z_j;
    // recover K from the alpha-component of its local decomposition
    const cplx zj = cfg.points[static_cast<std::size_t>(j)];
    const auto fa = frobenius_local(cfg, j, ExponentChoice::alpha);
    const cplx z_near = zj + 0.15 * fa.disk_radius * (-zj / std::abs(zj));
    const auto dec = decompose_local(cfg, raw, j, z_near);
    if (std::abs(dec.c_alpha) < 1e-200)
        throw IllConditioned("connection_gamma: vanishing leading coefficient");
    const cplx K = dec.c_alpha;

    const SolutionHandle sol = [raw, K](cplx z) {
        auto [v, d] = raw(z);
        return std::make_pair(v / K, d / K);
    };
    const cplx dir = zj / std::abs(zj);
    return gamma_solve(cfg, sol, 0.7 * dir, 0.6 * dir, n_terms);
}

/// Shooting function of the two-point boundary problem: the coefficient
/// C^{beta_j} of the solution launched as the pure-alpha Frobenius solution
/// at z_i and continued across the interior.
inline cplx boundary_mismatch(const SymmetricHeunConfig& cfg, int i, int j,
                              double ode_tol = 1e-12) {
    if (i == j) throw Error("boundary_mismatch: need two distinct singular points");
    const auto fa_i = frobenius_local(cfg, i, ExponentChoice::alpha);
    const cplx zi = cfg.points[static_cast<std::size_t>(i)];
    const cplx zj = cfg.points[static_cast<std::size_t>(j)];
    const cplx z_launch = zi + 0.25 * fa_i.disk_radius * (-zi / std::abs(zi));
    const auto y0 = local_eval(fa_i, z_launch);

    const auto fa_j = frobenius_local(cfg, j, ExponentChoice::alpha);
    const cplx z_match = zj + 0.25 * fa_j.disk_radius * (-zj / std::abs(zj));
    ContourPath path{{z_launch, cplx(0.0), z_match}};
    const auto ym = integrate_path(cfg, path, y0, ode_tol);

    const SolutionHandle handle = [&ym, &z_match](cplx z) {
        if (std::abs(z - z_match) > 1e-12)
            throw Error("boundary_mismatch: handle queried off the matching point");
        return ym;
    };
    return decompose_local(cfg, handle, j, z_match).c_beta;
}

/// Real-window eigenvalue search: coarse grid scan for local minima of |D|,
/// then secant refinement (iterates projected back to the real axis).
inline std::vector<cplx> eigenvalue_search(const SymmetricHeunConfig& cfg, int i, int j,
                                           double lambda_lo, double lambda_hi,
                                           double tol = 1e-8, int n_grid = 60) {
    if (n_grid < 3) throw Error("eigenvalue_search: grid too coarse");
    auto D = [&](double lam) { return boundary_mismatch(cfg.with_lambda(lam), i, j); };

    std::vector<double> grid(static_cast<std::size_t>(n_grid));
    std::vector<cplx> val(static_cast<std::size_t>(n_grid));
    for (int k = 0; k < n_grid; ++k) {
        grid[static_cast<std::size_t>(k)] =
            lambda_lo + (lambda_hi - lambda_lo) * double(k) / double(n_grid - 1);
        val[static_cast<std::size_t>(k)] = D(grid[static_cast<std::size_t>(k)]);
    }

    std::vector<cplx> roots;
    for (int k = 1; k + 1 < n_grid; ++k) {
        const double m0 = std::abs(val[static_cast<std::size_t>(k) - 1]);
        const double m1 = std::abs(val[static_cast<std::size_t>(k)]);
        const double m2 = std::abs(val[static_cast<std::size_t>(k) + 1]);
        if (m1 >= m0 || m1 >= m2) continue; // refine only interior |D| minima
        double x0 = grid[static_cast<std::size_t>(k) - 1], x1 = grid[static_cast<std::size_t>(k)];
        cplx d0 = val[static_cast<std::size_t>(k) - 1], d1 = val[static_cast<std::size_t>(k)];
        for (int it = 0; it < 60 && std::abs(d1) > tol; ++it) {
            if (std::abs(d1 - d0) == 0.0) break;
            const cplx step = d1 * (x1 - x0) / (d1 - d0);
            const double x2 = x1 - step.real();
            if (!std::isfinite(x2)) break;
            x0 = x1;
            d0 = d1;
            x1 = std::clamp(x2, lambda_lo - 0.5 * std::abs(lambda_hi - lambda_lo),
                            lambda_hi + 0.5 * std::abs(lambda_hi - lambda_lo));
            d1 = D(x1);
        }
        if (std::abs(d1) <= tol) {
            bool dup = false;
            for (cplx r : roots)
                if (std::abs(r - x1) < 1e-6 * (1.0 + std::abs(x1))) dup = true;
            if (!dup) roots.push_back(x1);
        }
    }
    if (roots.empty())
        throw NoRootInWindow("eigenvalue_search: no root found in the window");
    std::sort(roots.begin(), roots.end(),
              [](cplx a, cplx b) { return a.real() < b.real(); });
    return roots;
}

/// Piecewise evaluator of the eigenfunction launched as the pure-alpha
/// Frobenius solution at z_i: local series near z_i and z_j, the fundamental
/// pair in the interior.  Suitable as a quadrature integrand between the two
/// singular endpoints.
inline std::function<cplx(cplx)> eigenfunction(const SymmetricHeunConfig& cfg, int i,
                                               int j) {
    auto fa_i = frobenius_local(cfg, i, ExponentChoice::alpha);
    const cplx zi = cfg.points[static_cast<std::size_t>(i)];
    const cplx zj = cfg.points[static_cast<std::size_t>(j)];

    // interior representation in (F1, F2)
    const cplx z_in = zi + 0.35 * fa_i.disk_radius * (-zi / std::abs(zi));
    const SolutionHandle near_i = [fa_i](cplx z) { return local_eval(fa_i, z); };
    auto gp = gamma_solve(cfg, near_i, z_in,
                          zi + 0.4 * fa_i.disk_radius * (-zi / std::abs(zi)));
    auto pair_series = fundamental_pair(cfg, RecurrenceFamily::general, 400);

    // decomposition at z_j from the interior side
    auto fa_j = frobenius_local(cfg, j, ExponentChoice::alpha);
    auto fb_j = frobenius_local(cfg, j, ExponentChoice::beta);
    const cplx z_mj = zj + 0.3 * fa_j.disk_radius * (-zj / std::abs(zj));
    const SolutionHandle interior = [gp, pair_series](cplx z) {
        const auto e1 = eval_series(pair_series.first, z);
        const auto e2 = eval_series(pair_series.second, z);
        return std::make_pair(gp.gamma1 * e1.value + gp.gamma2 * e2.value,
                              gp.gamma1 * e1.derivative + gp.gamma2 * e2.derivative);
    };
    const auto dec_j = decompose_local(cfg, interior, j, z_mj);

    return [fa_i, fa_j, fb_j, dec_j, interior, zi, zj](cplx z) {
        if (std::abs(z - zi) < 0.45 * fa_i.disk_radius) return local_eval(fa_i, z).first;
        if (std::abs(z - zj) < 0.45 * fa_j.disk_radius)
            return dec_j.c_alpha * local_eval(fa_j, z).first +
                   dec_j.c_beta * local_eval(fb_j, z).first;
        return interior(z).first;
    };
}

} // namespace heunsym
