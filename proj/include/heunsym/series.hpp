#ifndef HEUNSYM_SERIES_HPP
#define HEUNSYM_SERIES_HPP

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "heunsym/errors.hpp"
#include "heunsym/fuchsian.hpp"
#include "heunsym/poly.hpp"

namespace heunsym {

/// Coefficient family of the nine-term recurrence.
enum class RecurrenceFamily { general, circular, simplest };

enum class SeriesKind { Taylor, Laurent };
enum class InitTag { F1, F2 };

/// Per-config data for the recurrence multipliers r_{n-1}..r_{n-8}.
///
/// The general family is derived by substitution: multiply the equation by P(z)^2
/// so the operator becomes A F'' + B F' + C F with A = P^2, B = P P'/2,
/// C = lambda P + sum_j q_j P/(z - z_j), and read the row of z^{n-2} off the
/// polynomial products. The circular and simplest closed forms are the same
/// row specialized to the canonical frame.
struct RecurrenceContext {
    RecurrenceFamily family;
    // general family: polynomial coefficient tables
    std::array<cplx, 9> a{};  // P^2
    std::array<cplx, 8> b{};  // P P' / 2
    std::array<cplx, 5> c{};  // lambda P + sum q_j P/(z - z_j)
    // circular/simplest family scalars
    cplx lambda = 0.0;
    cplx cos2phi = 0.0;
    std::array<cplx, 4> isin_rho{}; // (i/4) sin(2 phi) * rho_{2..5}

    static RecurrenceContext build(const SymmetricHeunConfig& cfg, RecurrenceFamily family) {
        RecurrenceContext ctx;
        ctx.family = family;
        ctx.lambda = cfg.lambda;
        if (family == RecurrenceFamily::general) {
            const Poly P = cfg.characteristic();
            const Poly A = P * P;
            const Poly B = cplx(0.5) * (P * P.derivative());
            Poly C = cfg.lambda * P;
            for (int j = 1; j <= 4; ++j) {
                const auto rs = cfg.reduced(j);
                // P(z)/(z - z_j) = z^3 - s1 z^2 + s2 z - s3
                const Poly Qj{{-rs[2], rs[1], -rs[0], cplx(1.0)}};
                C = C + cfg.q[static_cast<std::size_t>(j - 1)] * Qj;
            }
            for (int k = 0; k <= 8; ++k) ctx.a[static_cast<std::size_t>(k)] = A.coeff(k);
            for (int k = 0; k <= 7; ++k) ctx.b[static_cast<std::size_t>(k)] = B.coeff(k);
            for (int k = 0; k <= 4; ++k) ctx.c[static_cast<std::size_t>(k)] = C.coeff(k);
            if (std::abs(ctx.a[0]) < 1e-300)
                throw BadFamilyForConfig("general family requires sigma_4 != 0");
            return ctx;
        }
        if (!cfg.canonical)
            throw BadFamilyForConfig("circular/simplest families require the canonical frame");
        ctx.cos2phi = std::cos(2.0 * cfg.phi);
        const cplx fac = cplx(0.0, 0.25) * std::sin(2.0 * cfg.phi);
        for (int k = 0; k < 4; ++k)
            ctx.isin_rho[static_cast<std::size_t>(k)] = fac * cfg.rho[static_cast<std::size_t>(k)];
        if (family == RecurrenceFamily::simplest) {
            if (std::abs(cfg.sigma[1]) > 1e-10)
                throw BadFamilyForConfig("simplest family requires sigma_2 = 0");
            for (auto r : cfg.rho)
                if (std::abs(fac * r) > 1e-12)
                    throw BadFamilyForConfig("simplest family requires vanishing rho terms");
        }
        return ctx;
    }

    /// Multipliers of f_{n-1}..f_{n-8}, n >= 2.
    std::array<cplx, 8> coeffs(int n) const {
        const double dn = double(n), dn1 = double(n - 1);
        const double inv = 1.0 / (dn * dn1);
        std::array<cplx, 8> r{};
        switch (family) {
            case RecurrenceFamily::general: {
                for (int k = 1; k <= 8; ++k) {
                    const double m = dn - double(k);
                    cplx num = a[static_cast<std::size_t>(k)] * m * (m - 1.0) +
                               b[static_cast<std::size_t>(k - 1)] * m;
                    if (k >= 2 && k <= 6) num += c[static_cast<std::size_t>(k - 2)];
                    r[static_cast<std::size_t>(k - 1)] = num / (a[0] * dn * dn1);
                }
                break;
            }
            case RecurrenceFamily::circular: {
                // Closed forms for the canonical frame. The sign of the
                // cos(2 phi) part of r_{n-2} follows the derivation (the
                // printed table carries the opposite sign there).
                r[1] = (lambda - isin_rho[0]) * inv -
                       4.0 * (1.0 - 5.0 / dn + 1.5 / dn1) * cos2phi;
                r[2] = -isin_rho[1] * inv;
                r[3] = (-2.0 * lambda * cos2phi + isin_rho[2]) * inv +
                       2.0 * (1.0 - 16.0 / dn + 9.0 / dn1) * (2.0 * cos2phi * cos2phi + 1.0);
                r[4] = isin_rho[3] * inv;
                r[5] = lambda * inv - 4.0 * (1.0 - 33.0 / dn + 22.5 / dn1) * cos2phi;
                r[7] = 1.0 - 56.0 / dn + 42.0 / dn1;
                break;
            }
            case RecurrenceFamily::simplest: {
                r[1] = lambda * inv;
                r[3] = 2.0 * (1.0 - 16.0 / dn + 9.0 / dn1);
                r[5] = lambda * inv;
                r[7] = 1.0 - 56.0 / dn + 42.0 / dn1;
                break;
            }
        }
        return r;
    }
};

inline std::array<cplx, 8> recurrence_coeffs(RecurrenceFamily family,
                                             const SymmetricHeunConfig& cfg, int n) {
    if (n < 2) throw Error("recurrence_coeffs: n must be >= 2");
    return RecurrenceContext::build(cfg, family).coeffs(n);
}

/// Taylor (or Laurent, via the inverted config) solution of the equation.
struct SeriesSolution {
    SeriesKind kind = SeriesKind::Taylor;
    InitTag init = InitTag::F1;
    std::vector<cplx> coeffs;
    SymmetricHeunConfig config; // the config whose Taylor series this is

    /// Cauchy-Hadamard convergence radius estimate of the stored Taylor
    /// series (infinity for terminating series).
    double radius_estimate() const {
        if (coeffs.size() < 50) throw InsufficientTerms("radius_estimate: need >= 50 terms");
        const std::size_t lo = coeffs.size() / 2;
        std::vector<std::pair<double, double>> pts; // (n, log|f_n|)
        for (std::size_t n = lo; n < coeffs.size(); ++n) {
            const double m = std::abs(coeffs[n]);
            if (m > 0.0) pts.emplace_back(double(n), std::log(m));
        }
        if (pts.size() < 5) return std::numeric_limits<double>::infinity();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : pts) {
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double nn = double(pts.size());
        const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        return std::exp(-slope);
    }
};

inline void check_series_config(const SymmetricHeunConfig& cfg) {
    for (cplx z : cfg.points)
        if (std::abs(z) < 1e-10 * point_scale({cfg.points.begin(), cfg.points.end()}))
            throw Error("series expansion requires all singular points away from 0");
}

/// Runs the nine-term recurrence f_n = -sum_{k=1..8} r_{n-k} f_{n-k}.
inline SeriesSolution series_coeffs(const SymmetricHeunConfig& cfg, RecurrenceFamily family,
                                    InitTag init, int n_max) {
    if (n_max < 8) throw Error("series_coeffs: n_max must be >= 8");
    check_series_config(cfg);
    const RecurrenceContext ctx = RecurrenceContext::build(cfg, family);
    SeriesSolution sol;
    sol.init = init;
    sol.config = cfg;
    sol.coeffs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    sol.coeffs[0] = (init == InitTag::F1) ? 1.0 : 0.0;
    sol.coeffs[1] = (init == InitTag::F1) ? 0.0 : 1.0;
    for (int n = 2; n <= n_max; ++n) {
        const auto r = ctx.coeffs(n);
        cplx acc = 0.0;
        for (int k = 1; k <= 8 && k <= n; ++k)
            acc += r[static_cast<std::size_t>(k - 1)] * sol.coeffs[static_cast<std::size_t>(n - k)];
        const cplx fn = -acc;
        if (std::abs(fn) > 1e300) throw Overflow("series_coeffs: coefficient overflow");
        sol.coeffs[static_cast<std::size_t>(n)] = fn;
    }
    return sol;
}

/// The fundamental pair (F1, F2).
inline std::pair<SeriesSolution, SeriesSolution> fundamental_pair(const SymmetricHeunConfig& cfg,
                                                                  RecurrenceFamily family,
                                                                  int n_max) {
    return {series_coeffs(cfg, family, InitTag::F1, n_max),
            series_coeffs(cfg, family, InitTag::F2, n_max)};
}

struct EvalResult {
    cplx value;
    cplx derivative;
    double tail_bound; // |f_N w^N| of the underlying Taylor sum
};

/// Evaluates value and termwise derivative. Laurent solutions evaluate the
/// stored Taylor series at 1/z with the chain rule for the derivative.
inline EvalResult eval_series(const SeriesSolution& sol, cplx z, double tol = 1e-10) {
    const cplx w = (sol.kind == SeriesKind::Taylor) ? z : 1.0 / z;
    if (sol.coeffs.size() >= 50) {
        const double rad = sol.radius_estimate();
        if (std::isfinite(rad) && std::abs(w) >= 0.98 * rad)
            throw OutsideDomain("eval_series: point outside the convergence disk");
    }
    auto [v, d] = taylor_eval(sol.coeffs, w);
    const double tail = std::abs(sol.coeffs.back()) * std::pow(std::abs(w), double(sol.coeffs.size() - 1));
    if (tail > tol * std::max(1.0, std::abs(v)))
        throw NotConverged("eval_series: truncation tail above tolerance");
    if (sol.kind == SeriesKind::Laurent) d *= -w * w; // d/dz = -w^2 d/dw
    return {v, d, tail};
}

/// Second termwise derivative (in the original variable).
inline cplx eval_second_derivative(const SeriesSolution& sol, cplx z) {
    const cplx w = (sol.kind == SeriesKind::Taylor) ? z : 1.0 / z;
    cplx d2 = 0.0, d1 = 0.0;
    for (std::size_t i = sol.coeffs.size(); i-- > 2;)
        d2 = d2 * w + double(i) * double(i - 1) * sol.coeffs[i];
    if (sol.kind == SeriesKind::Taylor) return d2;
    for (std::size_t i = sol.coeffs.size(); i-- > 1;)
        d1 = d1 * w + double(i) * sol.coeffs[i];
    // F(z) = G(1/z): F'' = G'' / z^4 + 2 G' / z^3
    return d2 * w * w * w * w + 2.0 * d1 * w * w * w;
}

/// |F1 F2' - F2 F1' - (P(0)/P(z))^{1/2}| with the square root on the branch
/// continuous along the segment from 0 and equal to 1 at z = 0.
inline double wronskian_residual(const SeriesSolution& f1, const SeriesSolution& f2, cplx z,
                                 double tol = 1e-10) {
    const auto e1 = eval_series(f1, z, tol);
    const auto e2 = eval_series(f2, z, tol);
    const cplx wr = e1.value * e2.derivative - e2.value * e1.derivative;
    const Poly P = f1.config.characteristic();
    const cplx dlog = continuous_log_along(P, 0.0, z); // log P(z) - log P(0)
    return std::abs(wr - std::exp(-0.5 * dlog));
}

/// Residual of the equation for the given solution at z.
inline double ode_residual(const SymmetricHeunConfig& cfg, const SeriesSolution& sol, cplx z,
                           double tol = 1e-8) {
    Equation eq = equation_of(cfg);
    eq.exclusion_radius = 1e-8 * point_scale(eq.points);
    const auto e = eval_series(sol, z, tol);
    const cplx d2 = eval_second_derivative(sol, z);
    return std::abs(d2 + eq.p1(z) * e.derivative + eq.p0(z) * e.value);
}

/// Inversion symmetry of a canonical circular configuration: points 1/z_j,
/// same chi (which realizes q_j -> -q_j/z_j^2), lambda shifted by
/// -(i/4) sin(2 phi) rho_2. Taylor solutions of the result, read as Laurent
/// series, solve the original equation for |z| > 1.
inline SymmetricHeunConfig invert_config(const SymmetricHeunConfig& cfg) {
    if (!cfg.canonical || std::abs(cfg.phi.imag()) > 1e-10)
        throw NotCanonical("invert_config: requires canonical circular configuration");
    std::array<cplx, 4> pts;
    for (int j = 0; j < 4; ++j) pts[static_cast<std::size_t>(j)] = 1.0 / cfg.points[static_cast<std::size_t>(j)];
    const cplx shift = cplx(0.0, 0.25) * std::sin(2.0 * cfg.phi) * cfg.rho[0];
    return SymmetricHeunConfig::from_points(pts, cfg.chis, cfg.lambda - shift);
}

/// Exterior (Laurent) solution of cfg's equation built from the inverted
/// configuration's Taylor series.
inline SeriesSolution laurent_solution(const SymmetricHeunConfig& cfg, RecurrenceFamily family,
                                       InitTag init, int n_max) {
    SeriesSolution sol = series_coeffs(invert_config(cfg), family, init, n_max);
    sol.kind = SeriesKind::Laurent;
    return sol;
}

} // namespace heunsym

#endif
