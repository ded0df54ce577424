#pragma once

// Independent numerical ground truth: adaptive Runge-Kutta integration of the
// symmetric-form equation along complex polyline paths, adaptive
// Gauss-Kronrod quadrature, and the Lagrange-identity / orthogonality checks.
//
// This header deliberately depends only on the core equation types, never on
// the series machinery, so it can arbitrate disagreements independently.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "heunsym/errors.hpp"
#include "heunsym/fuchsian.hpp"
#include "heunsym/poly.hpp"

namespace heunsym {

enum class Measure { none, inverse_sqrt_P, general_N };

struct ContourPath {
    std::vector<cplx> vertices;
    double exclusion_radius = 1e-3; // relative to config scale
    Measure measure = Measure::none;

    void validate() const {
        if (vertices.size() < 2) throw Error("ContourPath: need at least two vertices");
        for (std::size_t i = 1; i < vertices.size(); ++i)
            if (std::abs(vertices[i] - vertices[i - 1]) == 0.0)
                throw Error("ContourPath: consecutive vertices coincide");
    }
};

namespace detail {

using OdeRhs = std::function<void(cplx, const std::vector<cplx>&, std::vector<cplx>&)>;

/// Dormand-Prince 5(4) over one straight segment, t in [0,1].
inline void dp45_segment(const OdeRhs& rhs, cplx za, cplx zb, std::vector<cplx>& y,
                         double tol) {
    static const double C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double B5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                                 -2187.0 / 6784, 11.0 / 84,  0.0};
    static const double B4[7] = {5179.0 / 57600,    0.0,         7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    const cplx dz = zb - za;
    const std::size_t m = y.size();
    std::vector<std::vector<cplx>> k(7, std::vector<cplx>(m));
    std::vector<cplx> yt(m), dy(m);

    double t = 0.0, h = 0.1;
    while (t < 1.0) {
        h = std::min(h, 1.0 - t);
        for (int s = 0; s < 7; ++s) {
            yt = y;
            for (int p = 0; p < s; ++p)
                if (A[s][p] != 0.0)
                    for (std::size_t i = 0; i < m; ++i) yt[i] += h * A[s][p] * k[p][i];
            rhs(za + (t + C[s] * h) * dz, yt, dy);
            for (std::size_t i = 0; i < m; ++i) k[s][i] = dz * dy[i];
        }
        double err = 0.0, ynorm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            cplx e5 = 0.0;
            for (int s = 0; s < 7; ++s) e5 += h * (B5[s] - B4[s]) * k[s][i];
            err = std::max(err, std::abs(e5));
            ynorm = std::max(ynorm, std::abs(y[i]));
        }
        const double bound = tol * (1.0 + ynorm);
        if (err <= bound) {
            for (std::size_t i = 0; i < m; ++i) {
                cplx dstep = 0.0;
                for (int s = 0; s < 7; ++s) dstep += h * B5[s] * k[s][i];
                y[i] += dstep;
            }
            t += h;
        }
        const double ratio = err > 0.0 ? std::pow(bound / err, 0.2) : 5.0;
        h *= std::clamp(0.9 * ratio, 0.2, 5.0);
        if (h < 1e-14) throw StepUnderflow("dp45: step size underflow");
    }
}

inline double min_singular_distance_on_segment(const std::vector<cplx>& pts, cplx za,
                                               cplx zb) {
    double best = std::numeric_limits<double>::infinity();
    const cplx d = zb - za;
    const double dd = std::norm(d);
    for (cplx zj : pts) {
        const double tproj =
            dd > 0.0 ? std::clamp((std::conj(d) * (zj - za)).real() / dd, 0.0, 1.0) : 0.0;
        best = std::min(best, std::abs(za + tproj * d - zj));
    }
    return best;
}

} // namespace detail

/// First-order system right-hand side of the equation (F, F').
inline detail::OdeRhs equation_rhs(const Equation& eq) {
    return [eq](cplx z, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        dy.resize(2);
        dy[0] = y[1];
        dy[1] = -eq.p1(z) * y[1] - eq.p0(z) * y[0];
    };
}

namespace detail {

template <class Config>
std::pair<cplx, cplx> integrate_path_impl(const Config& cfg, const ContourPath& path,
                                          std::pair<cplx, cplx> y0, double tol) {
    path.validate();
    const Equation eq = equation_of(cfg);
    const double scale = point_scale(eq.points);
    const double excl = path.exclusion_radius * scale;
    for (std::size_t i = 1; i < path.vertices.size(); ++i)
        if (min_singular_distance_on_segment(eq.points, path.vertices[i - 1],
                                             path.vertices[i]) < excl)
            throw SingularApproach("integrate_path: path violates the exclusion radius");
    std::vector<cplx> y{y0.first, y0.second};
    const auto rhs = equation_rhs(eq);
    for (std::size_t i = 1; i < path.vertices.size(); ++i)
        dp45_segment(rhs, path.vertices[i - 1], path.vertices[i], y, tol);
    return {y[0], y[1]};
}

} // namespace detail

inline std::pair<cplx, cplx> integrate_path(const SymmetricHeunConfig& cfg,
                                            const ContourPath& path,
                                            std::pair<cplx, cplx> y0, double tol = 1e-12) {
    return detail::integrate_path_impl(cfg, path, y0, tol);
}

inline std::pair<cplx, cplx> integrate_path(const FuchsianConfig& cfg,
                                            const ContourPath& path,
                                            std::pair<cplx, cplx> y0, double tol = 1e-12) {
    return detail::integrate_path_impl(cfg, path, y0, tol);
}

namespace detail {

// QUADPACK 7-15 Gauss-Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> gk_x{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk_wk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk_wg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// One 7-15 panel over the straight segment [za, zb]; returns (kronrod, |k-g|).
inline std::pair<cplx, double> gk15(const std::function<cplx(cplx)>& f, cplx za, cplx zb) {
    const cplx mid = 0.5 * (za + zb), half = 0.5 * (zb - za);
    cplx kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        if (i == 7) {
            const cplx v = f(mid);
            kron += gk_wk[7] * v;
            gauss += gk_wg[3] * v;
            break;
        }
        const cplx vp = f(mid + half * gk_x[static_cast<std::size_t>(i)]);
        const cplx vm = f(mid - half * gk_x[static_cast<std::size_t>(i)]);
        kron += gk_wk[static_cast<std::size_t>(i)] * (vp + vm);
        if (i % 2 == 1)
            gauss += gk_wg[static_cast<std::size_t>(i / 2)] * (vp + vm);
    }
    kron *= half;
    gauss *= half;
    return {kron, std::abs(kron - gauss)};
}

inline cplx adaptive_gk(const std::function<cplx(cplx)>& f, cplx za, cplx zb, double tol,
                        int depth = 0) {
    auto [val, err] = gk15(f, za, zb);
    if (err <= tol * (1.0 + std::abs(val)) || std::abs(zb - za) < 1e-10) return val;
    if (depth > 40) throw NoConvergence("quadrature: panel recursion limit reached");
    const cplx mid = 0.5 * (za + zb);
    return adaptive_gk(f, za, mid, tol * 0.7, depth + 1) +
           adaptive_gk(f, mid, zb, tol * 0.7, depth + 1);
}

/// Branch-continuous log P tracked along the polyline, anchored at segment
/// midpoints (path endpoints may be zeros of P).
inline std::vector<cplx> logp_at_midpoints(const Poly& P, const std::vector<cplx>& v) {
    std::vector<cplx> out(v.size() - 1);
    auto mid = [&](std::size_t i) { return 0.5 * (v[i] + v[i + 1]); };
    out[0] = std::log(P.eval(mid(0)));
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        out[i] = out[i - 1] + continuous_log_along(P, mid(i - 1), v[i]) +
                 continuous_log_along(P, v[i], mid(i));
    return out;
}

} // namespace detail

/// Branch-continuous measure weight at z on segment i of the path.
class MeasureTracker {
public:
    MeasureTracker(const Equation& eq, const ContourPath& path)
        : eq_(&eq), path_(&path), logp_(detail::logp_at_midpoints(eq.P, path.vertices)) {}

    /// d(mu)/dz at a point on segment i (0-based).
    cplx weight(cplx z, std::size_t segment) const {
        const Poly& P = eq_->P;
        const cplx mid =
            0.5 * (path_->vertices[segment] + path_->vertices[segment + 1]);
        const cplx lp = logp_[segment] + continuous_log_along(P, mid, z);
        const int N = eq_->n_points;
        switch (path_->measure) {
            case Measure::none:
                return 1.0;
            case Measure::inverse_sqrt_P:
                return std::exp(-0.5 * lp);
            case Measure::general_N: {
                cplx ratio; // (z^{N-3} - 1) / (z - 1)
                if (std::abs(z - 1.0) > 1e-6) {
                    ratio = (std::pow(z, N - 3) - 1.0) / (z - 1.0);
                } else {
                    ratio = 0.0;
                    for (int k = 0; k < N - 3; ++k) ratio += std::pow(z, k);
                }
                return ratio * std::exp((2.0 / N - 1.0) * lp);
            }
        }
        return 1.0;
    }

private:
    const Equation* eq_;
    const ContourPath* path_;
    std::vector<cplx> logp_;
};

/// Adaptive quadrature of integrand * measure over the path interior.
template <class Config>
cplx quadrature(const Config& cfg, const std::function<cplx(cplx)>& integrand,
                const ContourPath& path, double tol = 1e-10) {
    path.validate();
    const Equation eq = equation_of(cfg);
    const MeasureTracker mu(eq, path);
    cplx total = 0.0;
    for (std::size_t i = 1; i < path.vertices.size(); ++i) {
        auto f = [&](cplx z) { return integrand(z) * mu.weight(z, i - 1); };
        total += detail::adaptive_gk(f, path.vertices[i - 1], path.vertices[i], tol);
    }
    return total;
}

struct LagrangeCheck {
    cplx lhs;
    cplx rhs;
    double gap;
};

namespace detail {

/// Shared worker: equations eq1/eq2 differ only in the accessory polynomial
/// dLam = Lambda_2 - Lambda_1.  Integrates both solutions and the identity
/// integral in one augmented pass with branch-continuous P^theta.
inline LagrangeCheck lagrange_impl(const Equation& eq1, const Equation& eq2,
                                   const Poly& dLam, const ContourPath& path, double tol) {
    path.validate();
    const int N = eq1.n_points;
    const Poly& P = eq1.P;
    const Poly dP = P.derivative();
    const cplx logp0 = std::log(P.eval(path.vertices.front()));
    const double theta = 2.0 / N;

    // state: (F1, F1', F2, F2', I, w) with w = log P(z) - log P(z0) tracked
    // continuously and I' = dLam(z) P^{theta-1} F1 F2.
    auto rhs = [&](cplx z, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        dy.resize(6);
        dy[0] = y[1];
        dy[1] = -eq1.p1(z) * y[1] - eq1.p0(z) * y[0];
        dy[2] = y[3];
        dy[3] = -eq2.p1(z) * y[3] - eq2.p0(z) * y[2];
        dy[5] = dP.eval(z) / P.eval(z);
        dy[4] = dLam.eval(z) * std::exp((theta - 1.0) * (logp0 + y[5])) * y[0] * y[2];
    };

    std::vector<cplx> y{1.0, 0.0, 1.0, 0.0, 0.0, 0.0};
    // boundary bracket P^theta (F2 F1' - F1 F2'); this ordering, together
    // with the (Lambda_2 - Lambda_1) factor on the integral side, is the one
    // that follows from differentiating the bracket directly.
    auto bracket = [&](const std::vector<cplx>& s) {
        return std::exp(theta * (logp0 + s[5])) * (s[2] * s[1] - s[0] * s[3]);
    };
    const cplx b0 = bracket(y);
    for (std::size_t i = 1; i < path.vertices.size(); ++i)
        dp45_segment(rhs, path.vertices[i - 1], path.vertices[i], y, tol);
    const cplx lhs = y[4];
    const cplx rhs_val = bracket(y) - b0;
    const double gap = std::abs(lhs - rhs_val) /
                       (1.0 + std::max(std::abs(lhs), std::abs(rhs_val)));
    return {lhs, rhs_val, gap};
}

} // namespace detail

inline LagrangeCheck verify_lagrange_identity(const SymmetricHeunConfig& cfg, cplx lambda1,
                                              cplx lambda2, const ContourPath& path,
                                              double tol = 1e-12) {
    const Equation eq1 = equation_of(cfg.with_lambda(lambda1));
    const Equation eq2 = equation_of(cfg.with_lambda(lambda2));
    return detail::lagrange_impl(eq1, eq2, Poly::constant(lambda2 - lambda1), path, tol);
}

inline LagrangeCheck verify_lagrange_identity(const FuchsianConfig& cfg1,
                                              const FuchsianConfig& cfg2,
                                              const ContourPath& path, double tol = 1e-12) {
    const Equation eq1 = equation_of(cfg1);
    const Equation eq2 = equation_of(cfg2);
    std::vector<cplx> d(std::max(cfg2.accessory.size(), cfg1.accessory.size()), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const cplx a2 = i < cfg2.accessory.size() ? cfg2.accessory[i] : 0.0;
        const cplx a1 = i < cfg1.accessory.size() ? cfg1.accessory[i] : 0.0;
        d[i] = a2 - a1;
    }
    return detail::lagrange_impl(eq1, eq2, Poly{std::move(d)}, path, tol);
}

/// Improper integral sol1 * sol2 * measure over a path whose endpoints may be
/// singular points; panels refine geometrically toward both endpoints.
/// `endpoint_exponent` gives, per endpoint, the real part of the combined
/// local exponent of sol1 * sol2 there (used for the integrability check
/// together with the measure's own endpoint exponent).
template <class Config>
cplx orthogonality_integral(const Config& cfg, const std::function<cplx(cplx)>& sol1,
                            const std::function<cplx(cplx)>& sol2, const ContourPath& path,
                            std::array<double, 2> endpoint_exponent, double tol = 1e-9) {
    path.validate();
    const Equation eq = equation_of(cfg);
    const double measure_exp =
        path.measure == Measure::none ? 0.0 : (2.0 / eq.n_points - 1.0);
    for (double e : endpoint_exponent)
        if (e + measure_exp <= -1.0 + 1e-12)
            throw NonIntegrableEndpoint(
                "orthogonality_integral: endpoint exponent not integrable");

    const MeasureTracker mu(eq, path);
    cplx total = 0.0;
    const std::size_t nseg = path.vertices.size() - 1;
    for (std::size_t i = 0; i < nseg; ++i) {
        const cplx za = path.vertices[i], zb = path.vertices[i + 1];
        const cplx d = zb - za;
        auto f = [&](cplx z) { return sol1(z) * sol2(z) * mu.weight(z, i); };
        const bool sing_a = (i == 0), sing_b = (i == nseg - 1);
        // substitution t = u^m (resp. 1 - u^m) absorbs the endpoint exponent:
        // choose m so the u-integrand vanishes at least linearly at u = 0.
        auto grade = [](double e) {
            const int m = static_cast<int>(std::ceil(2.0 / (e + 1.0)));
            return std::clamp(m, 1, 12);
        };
        // Below u_floor the offset u^m d is lost to double rounding against the
        // endpoint coordinate, so the point would evaluate exactly at the
        // singularity.  The substituted integrand vanishes at least linearly
        // there, so returning 0 truncates an O(u_floor^2)-size tail; this caps
        // the achievable absolute accuracy near singular endpoints at roughly
        // 1e-8 regardless of the requested tolerance.
        auto from_start = [&](double e, double t0, double t1) {
            const int m = grade(e);
            const double u_floor =
                std::pow(64.0 * 2.3e-16 * (1.0 + std::abs(za)) / std::abs(d), 1.0 / m);
            auto g = [&](cplx u) {
                if (std::abs(u) < u_floor) return cplx(0.0);
                const cplx um = std::pow(u, m);
                return f(za + um * d) * double(m) * std::pow(u, m - 1) * d;
            };
            return detail::adaptive_gk(g, std::pow(t0, 1.0 / m), std::pow(t1, 1.0 / m), tol);
        };
        auto from_end = [&](double e, double t0, double t1) {
            const int m = grade(e);
            const double u_floor =
                std::pow(64.0 * 2.3e-16 * (1.0 + std::abs(zb)) / std::abs(d), 1.0 / m);
            auto g = [&](cplx u) {
                if (std::abs(u) < u_floor) return cplx(0.0);
                const cplx um = std::pow(u, m);
                return f(za + (1.0 - um) * d) * double(m) * std::pow(u, m - 1) * d;
            };
            return detail::adaptive_gk(g, std::pow(1.0 - t0, 1.0 / m),
                                       std::pow(1.0 - t1, 1.0 / m), tol) *
                   -1.0;
        };
        if (sing_a && sing_b) {
            total += from_start(endpoint_exponent[0] + measure_exp, 0.0, 0.5);
            total += from_end(endpoint_exponent[1] + measure_exp, 0.5, 1.0);
        } else if (sing_a) {
            total += from_start(endpoint_exponent[0] + measure_exp, 0.0, 1.0);
        } else if (sing_b) {
            total += from_end(endpoint_exponent[1] + measure_exp, 0.0, 1.0);
        } else {
            total += detail::adaptive_gk(f, za, zb, tol);
        }
    }
    return total;
}

} // namespace heunsym
