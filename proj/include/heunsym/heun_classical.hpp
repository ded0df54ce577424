#pragma once

// Classical local Heun solution at z = 0 (three-term recurrence), the second
// exponent solution, and the frame change between the symmetric four-point
// form and the classical (0, 1, a, infinity) form.

#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "heunsym/errors.hpp"
#include "heunsym/fuchsian.hpp"
#include "heunsym/mobius.hpp"

namespace heunsym {

struct HeunGParams {
    cplx a_G;      // third finite singular point (not 0 or 1)
    cplx lambda;   // accessory parameter
    cplx alpha_G;
    cplx beta_G;
    cplx gamma_G;
    cplx delta_G;

    cplx epsilon_G() const { return alpha_G + beta_G + 1.0 - gamma_G - delta_G; }
};

namespace detail {

inline bool is_nonpositive_integer(cplx v, double tol = 1e-12) {
    if (std::abs(v.imag()) > tol) return false;
    const double r = v.real();
    if (r > 0.5) return false;
    return std::abs(r - std::round(r)) <= tol;
}

inline bool is_integer(cplx v, double tol = 1e-12) {
    if (std::abs(v.imag()) > tol) return false;
    return std::abs(v.real() - std::round(v.real())) <= tol;
}

inline void check_heun_g(const HeunGParams& p) {
    if (std::abs(p.a_G) < 1e-14) throw ZeroModulus("heun_g: a_G = 0");
    if (std::abs(p.a_G - 1.0) < 1e-14)
        throw DuplicatePoints("heun_g: a_G = 1 collides with the second singular point");
    if (is_nonpositive_integer(p.gamma_G))
        throw ResonantGamma("heun_g: gamma_G is a nonpositive integer");
}

} // namespace detail

/// Row of the three-term recurrence h_{n+1} = s1(n) h_n + s2(n) h_{n-1},
/// obtained by substituting the power series into the equation multiplied
/// through by z(z-1)(z-a) and collecting the coefficient of z^n.
inline std::pair<cplx, cplx> heun_g_recurrence_row(const HeunGParams& p, int n) {
    const cplx a = p.a_G, g = p.gamma_G, d = p.delta_G, e = p.epsilon_G();
    const cplx den = a * cplx(double(n) + 1.0) * (cplx(double(n)) + g);
    const cplx s1 = ((1.0 + a) * double(n) * double(n - 1) +
                     (g * (1.0 + a) + d * a + e) * double(n) + p.lambda) /
                    den;
    const cplx s2 = -(cplx(double(n - 1)) + p.alpha_G) * (cplx(double(n - 1)) + p.beta_G) / den;
    return {s1, s2};
}

/// Alternative coefficient form with denominator (gamma + n - 1)(gamma - 1),
/// written as h_n + R1(n) h_{n-1} + R2(n) h_{n-2} = 0.  Its n-dependence is
/// inconsistent with direct substitution into the equation; it is retained
/// purely as a diagnostic cross-check and must not be used for computation.
inline std::pair<cplx, cplx> heun_g_recurrence_row_variant(const HeunGParams& p, int n) {
    const cplx a = p.a_G, g = p.gamma_G, d = p.delta_G;
    const cplx al = p.alpha_G, be = p.beta_G;
    const cplx den = a * (g + double(n) - 1.0) * (g - 1.0);
    const cplx R1 = -1.0 - 1.0 / a +
                    (p.lambda - g * (a * d - a + al + be - d - g)) / den;
    const cplx R2 = 1.0 / a + (-al * be + al * g + be * g - g * g + al + be - 2.0 * g - 1.0) / den;
    return {R1, R2};
}

inline std::vector<cplx> heun_g_coeffs(const HeunGParams& p, int n_max) {
    detail::check_heun_g(p);
    std::vector<cplx> h(static_cast<std::size_t>(n_max) + 1);
    h[0] = 1.0;
    if (n_max >= 1) h[1] = p.lambda / (p.a_G * p.gamma_G);
    for (int n = 1; n < n_max; ++n) {
        auto [s1, s2] = heun_g_recurrence_row(p, n);
        h[static_cast<std::size_t>(n) + 1] = s1 * h[static_cast<std::size_t>(n)] +
                                             s2 * h[static_cast<std::size_t>(n) - 1];
        if (std::abs(h[static_cast<std::size_t>(n) + 1]) > 1e300)
            throw Overflow("heun_g_coeffs: coefficient overflow");
    }
    return h;
}

struct HeunGEval {
    cplx value;
    cplx derivative;
    cplx second;
};

/// Adaptive partial-sum evaluation with termwise first and second derivatives.
inline HeunGEval heun_g_eval_full(const HeunGParams& p, cplx z, double tol = 1e-14,
                                  double disk_factor = 0.95, int n_cap = 100000) {
    detail::check_heun_g(p);
    const double radius = std::min(1.0, std::abs(p.a_G));
    if (std::abs(z) > disk_factor * radius)
        throw OutsideDisk("heun_g_eval: |z| exceeds the convergence disk");

    cplx h_prev = 1.0, h_cur = p.lambda / (p.a_G * p.gamma_G);
    cplx sum = h_prev, d1 = 0.0, d2 = 0.0;
    cplx zp = 1.0; // z^{n-1} when processing term n
    if (z == 0.0) {
        // only n = 0 contributes to the value and n = 1 to the derivative
        return {cplx(1.0), h_cur, 2.0 * (heun_g_coeffs(p, 2)[2])};
    }
    int quiet = 0;
    for (int n = 1; n <= n_cap; ++n) {
        const cplx term = h_cur * zp * z; // h_n z^n
        sum += term;
        d1 += double(n) * h_cur * zp;
        if (n >= 2) d2 += double(n) * double(n - 1) * h_cur * zp / z;
        if (std::abs(term) < tol * (1.0 + std::abs(sum))) {
            if (++quiet >= 4) return {sum, d1, d2};
        } else {
            quiet = 0;
        }
        auto [s1, s2] = heun_g_recurrence_row(p, n);
        const cplx h_next = s1 * h_cur + s2 * h_prev;
        h_prev = h_cur;
        h_cur = h_next;
        zp *= z;
        if (std::abs(sum) > 1e300) throw Overflow("heun_g_eval: partial sum overflow");
    }
    throw NoConvergence("heun_g_eval: term cap reached before tolerance was met");
}

inline std::pair<cplx, cplx> heun_g_eval(const HeunGParams& p, cplx z, double tol = 1e-14) {
    const auto e = heun_g_eval_full(p, z, tol);
    return {e.value, e.derivative};
}

/// Residual |H'' + (g/z + d/(z-1) + e/(z-a)) H' + (ab z - lambda) H / (z(z-1)(z-a))|
/// normalized by the magnitude of the largest term.
inline double heun_g_residual(const HeunGParams& p, cplx z, double tol = 1e-14) {
    const auto ev = heun_g_eval_full(p, z, tol);
    const cplx p1 = p.gamma_G / z + p.delta_G / (z - 1.0) + p.epsilon_G() / (z - p.a_G);
    const cplx p0 =
        (p.alpha_G * p.beta_G * z - p.lambda) / (z * (z - 1.0) * (z - p.a_G));
    const cplx t2 = ev.second, t1 = p1 * ev.derivative, t0 = p0 * ev.value;
    const double scale = std::max({std::abs(t2), std::abs(t1), std::abs(t0), 1.0});
    return std::abs(t2 + t1 + t0) / scale;
}

/// Parameter set of the exponent-shifted solution H = z^{1-gamma} Htilde.
inline HeunGParams second_solution_params(const HeunGParams& p) {
    const cplx rho = 1.0 - p.gamma_G;
    HeunGParams q;
    q.a_G = p.a_G;
    q.alpha_G = p.alpha_G + rho;
    q.beta_G = p.beta_G + rho;
    q.gamma_G = 2.0 - p.gamma_G;
    q.delta_G = p.delta_G;
    q.lambda = p.lambda + rho * (p.delta_G * p.a_G + p.epsilon_G());
    return q;
}

/// Second local solution z^{1-gamma} (1 + O(z)), principal branch.
inline std::pair<cplx, cplx> second_local_solution(const HeunGParams& p, cplx z,
                                                   double tol = 1e-14) {
    const cplx rho = 1.0 - p.gamma_G;
    if (detail::is_integer(rho))
        throw LogarithmicCase("second_local_solution: integer exponent difference at 0");
    const HeunGParams q = second_solution_params(p);
    const auto [v, d] = heun_g_eval(q, z, tol);
    const cplx w = std::exp(rho * std::log(z));
    return {w * v, w * (d + rho * v / z)};
}

struct LocalFrame {
    HeunGParams params;
    MobiusMap frame;              // maps (z_j, k1, k2, k3) -> (0, 1, a_G, inf)
    std::array<cplx, 3> weight_e; // exponents of the weight u^{e0}(u-1)^{e1}(u-a)^{ea}
    std::array<int, 4> order;     // source-point indices in frame order (j, k1, k2, k3)
};

namespace detail {

inline cplx mobius_d1(const MobiusMap& m, cplx z) {
    const cplx den = m.c * z + m.d;
    return (m.a * m.d - m.b * m.c) / (den * den);
}

inline cplx mobius_d2(const MobiusMap& m, cplx z) {
    const cplx den = m.c * z + m.d;
    return -2.0 * m.c * (m.a * m.d - m.b * m.c) / (den * den * den);
}

} // namespace detail

/// Frame change from the symmetric four-point form to the classical form.
/// `ordering` permutes the three remaining point-indices; the first becomes 1,
/// the second becomes a_G and the third goes to infinity.
inline LocalFrame symmetric_to_local_frame(const SymmetricHeunConfig& cfg, int j,
                                           std::array<int, 3> ordering = {0, 1, 2}) {
    if (j < 0 || j >= 4) throw Error("symmetric_to_local_frame: index out of range");
    std::array<int, 3> rest{};
    {
        int t = 0;
        for (int k = 0; k < 4; ++k)
            if (k != j) rest[static_cast<std::size_t>(t++)] = k;
    }
    std::array<int, 4> order{j, rest[static_cast<std::size_t>(ordering[0])],
                             rest[static_cast<std::size_t>(ordering[1])],
                             rest[static_cast<std::size_t>(ordering[2])]};
    for (int i = 0; i < 4; ++i)
        for (int k = i + 1; k < 4; ++k)
            if (order[static_cast<std::size_t>(i)] == order[static_cast<std::size_t>(k)])
                throw DegenerateFrame("symmetric_to_local_frame: repeated ordering index");

    const cplx z0 = cfg.points[static_cast<std::size_t>(order[0])];
    const cplx z1 = cfg.points[static_cast<std::size_t>(order[1])];
    const cplx z2 = cfg.points[static_cast<std::size_t>(order[2])];
    const cplx z3 = cfg.points[static_cast<std::size_t>(order[3])];
    MobiusMap frame = map_to_standard_triple(z0, z1, z3);
    const cplx a_G = frame.apply(z2);
    if (std::abs(a_G) < 1e-12 || std::abs(a_G - 1.0) < 1e-12)
        throw DegenerateFrame("symmetric_to_local_frame: degenerate image a_G");

    // exponents (alpha_k, beta_k) of the four points, frame order
    std::array<cplx, 4> al{}, be{};
    for (int i = 0; i < 4; ++i) {
        auto [A, B] = indices_from_chi(cfg.chis[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])], 4);
        al[static_cast<std::size_t>(i)] = A;
        be[static_cast<std::size_t>(i)] = B;
    }
    const cplx e0 = al[0], e1 = al[1], ea = al[2];
    const cplx s = e0 + e1 + ea;

    HeunGParams p;
    p.a_G = a_G;
    p.gamma_G = 1.0 - (be[0] - al[0]);
    p.delta_G = 1.0 - (be[1] - al[1]);
    p.alpha_G = al[3] + s;
    p.beta_G = be[3] + s;

    // accessory parameter by pointwise extraction of the transformed p0
    // coefficient: r0(u) = (alpha beta u - lambda_G) / (u (u-1) (u-a)).
    const Equation eq = equation_of(cfg);
    const MobiusMap inv = invert(frame);
    auto lambda_at = [&](cplx u) {
        const cplx z = inv.apply(u);
        const cplx du = detail::mobius_d1(frame, z);
        const cplx ddu = detail::mobius_d2(frame, z);
        const cplx q1 = (ddu + eq.p1(z) * du) / (du * du);
        const cplx q0 = eq.p0(z) / (du * du);
        const cplx wl = e0 / u + e1 / (u - 1.0) + ea / (u - a_G); // W'/W
        const cplx wll = wl * wl - e0 / (u * u) - e1 / ((u - 1.0) * (u - 1.0)) -
                         ea / ((u - a_G) * (u - a_G)); // W''/W
        const cplx r0 = q0 + q1 * wl + wll;
        return p.alpha_G * p.beta_G * u - r0 * u * (u - 1.0) * (u - a_G);
    };
    const cplx u1 = 0.31 + cplx(0.0, 0.07), u2 = 0.52 - cplx(0.0, 0.11);
    const cplx l1 = lambda_at(u1), l2 = lambda_at(u2);
    if (std::abs(l1 - l2) > 1e-8 * (1.0 + std::abs(l1)))
        throw DegenerateFrame("symmetric_to_local_frame: accessory extraction inconsistent");
    p.lambda = 0.5 * (l1 + l2);

    return {p, frame, {e0, e1, ea}, order};
}

/// Local solution at singular point z_j of the symmetric form, evaluated by
/// pulling the classical series back through the frame and weight.  Returns
/// value and derivative with respect to the original variable.
inline std::pair<cplx, cplx> local_solution_at(const LocalFrame& lf, cplx z,
                                               double tol = 1e-14) {
    const cplx u = lf.frame.apply(z);
    const auto [g, dg] = heun_g_eval(lf.params, u, tol);
    const cplx e0 = lf.weight_e[0], e1 = lf.weight_e[1], ea = lf.weight_e[2];
    const cplx W = std::exp(e0 * std::log(u)) * std::exp(e1 * std::log(u - 1.0)) *
                   std::exp(ea * std::log(u - lf.params.a_G));
    const cplx wl = e0 / u + e1 / (u - 1.0) + ea / (u - lf.params.a_G);
    const cplx du = detail::mobius_d1(lf.frame, z);
    const cplx value = W * g;
    const cplx deriv = W * (wl * g + dg) * du;
    return {value, deriv};
}

} // namespace heunsym
