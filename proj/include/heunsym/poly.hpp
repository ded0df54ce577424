#ifndef HEUNSYM_POLY_HPP
#define HEUNSYM_POLY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "heunsym/errors.hpp"

namespace heunsym {

using cplx = std::complex<double>;

/// Dense polynomial with complex coefficients, lowest degree first.
struct Poly {
    std::vector<cplx> c;

    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs) : c(std::move(coeffs)) { trim(); }

    static Poly constant(cplx v) { return Poly{{v}}; }
    static Poly linear(cplx c0, cplx c1) { return Poly{{c0, c1}}; }

    int degree() const { return static_cast<int>(c.size()) - 1; }

    cplx coeff(int k) const {
        if (k < 0 || k >= static_cast<int>(c.size())) return 0.0;
        return c[static_cast<std::size_t>(k)];
    }

    void trim() {
        while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    }

    cplx eval(cplx z) const {
        cplx acc = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
        return acc;
    }

    Poly derivative() const {
        if (c.size() <= 1) return Poly{{cplx(0.0)}};
        std::vector<cplx> d(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = double(i) * c[i];
        return Poly{std::move(d)};
    }

    /// Recenter: returns q with q(w) = p(center + w).
    Poly shifted(cplx center) const {
        // Synthetic Taylor shift, O(n^2).
        std::vector<cplx> q(c.begin(), c.end());
        const int n = static_cast<int>(q.size());
        for (int i = 0; i < n - 1; ++i)
            for (int j = n - 2; j >= i; --j) q[j] += center * q[j + 1];
        return Poly{std::move(q)};
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<cplx> r(std::max(a.c.size(), b.c.size()), 0.0);
        for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
        return Poly{std::move(r)};
    }

    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<cplx> r(std::max(a.c.size(), b.c.size()), 0.0);
        for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
        return Poly{std::move(r)};
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        std::vector<cplx> r(a.c.size() + b.c.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return Poly{std::move(r)};
    }

    friend Poly operator*(cplx s, const Poly& a) {
        std::vector<cplx> r(a.c);
        for (auto& v : r) v *= s;
        return Poly{std::move(r)};
    }
};

/// Monic product prod_k (z - roots[k]).
inline Poly poly_from_roots(const std::vector<cplx>& roots) {
    Poly p = Poly::constant(1.0);
    for (cplx r : roots) p = p * Poly::linear(-r, 1.0);
    return p;
}

/// Frobenius series of A F'' + B F' + C F = 0 about w = 0 with leading
/// exponent rho: F = w^rho * sum_m f_m w^m, f_0 = 1. Requires w = 0 to be
/// at worst a regular singular point of the equation.
///
/// Collecting w^{rho-2+p} gives sum_m f_m phi_{p-m}(rho+m) = 0 with
/// phi_i(s) = a_i s(s-1) + b_{i-1} s + c_{i-2}. The lowest nonvanishing
/// phi_{i0} is the indicial polynomial; rho must be one of its roots.
inline std::vector<cplx> frobenius_series(const Poly& A, const Poly& B, const Poly& C,
                                          cplx rho, int n_terms) {
    auto phi = [&](int i, cplx s) {
        return A.coeff(i) * s * (s - 1.0) + B.coeff(i - 1) * s + C.coeff(i - 2);
    };
    const int max_shift = std::max({A.degree(), B.degree() + 1, C.degree() + 2});

    // leading coefficients of recentered polynomials vanish only up to
    // rounding; test against each operator's own scale
    auto poly_scale = [](const Poly& p) {
        double s = 0.0;
        for (cplx v : p.c) s = std::max(s, std::abs(v));
        return s;
    };
    const double sA = poly_scale(A), sB = poly_scale(B), sC = poly_scale(C);
    auto effectively_nonzero = [](cplx v, double scale) {
        return std::abs(v) > 1e-10 * scale;
    };
    int i0 = 0;
    while (i0 <= max_shift) {
        if (effectively_nonzero(A.coeff(i0), sA) || effectively_nonzero(B.coeff(i0 - 1), sB) ||
            effectively_nonzero(C.coeff(i0 - 2), sC))
            break;
        ++i0;
    }
    if (i0 > max_shift) throw Error("frobenius_series: zero operator");
    if (std::abs(phi(i0, rho)) > 1e-8 * (1.0 + std::abs(rho) * std::abs(rho)))
        throw ResonantExponents("frobenius_series: rho is not an indicial root");

    std::vector<cplx> f(static_cast<std::size_t>(n_terms), 0.0);
    f[0] = 1.0;
    for (int m = 1; m < n_terms; ++m) {
        cplx rhs = 0.0;
        const int kmax = std::min(m, max_shift - i0);
        for (int k = 1; k <= kmax; ++k)
            rhs += phi(i0 + k, rho + double(m - k)) * f[static_cast<std::size_t>(m - k)];
        const cplx den = phi(i0, rho + double(m));
        if (std::abs(den) < 1e-12 * (1.0 + double(m) * double(m)))
            throw ResonantExponents("frobenius_series: resonant recurrence denominator");
        f[static_cast<std::size_t>(m)] = -rhs / den;
        if (std::abs(f[static_cast<std::size_t>(m)]) > 1e300)
            throw Overflow("frobenius_series: coefficient overflow");
    }
    return f;
}

/// log p(z1) - log p(z0) continued along the straight segment, so powers of
/// p can be taken on a branch continuous along that segment. The segment
/// must avoid the zeros of p.
inline cplx continuous_log_along(const Poly& p, cplx z0, cplx z1, int steps = 64) {
    cplx acc = 0.0;
    cplx prev = p.eval(z0);
    if (std::abs(prev) == 0.0) throw Error("continuous_log_along: zero at segment start");
    for (int k = 1; k <= steps; ++k) {
        const cplx z = z0 + (z1 - z0) * (double(k) / double(steps));
        const cplx cur = p.eval(z);
        if (std::abs(cur) == 0.0) throw Error("continuous_log_along: zero on segment");
        acc += std::log(cur / prev); // ratio near 1 for small steps
        prev = cur;
    }
    return acc;
}

/// Value and termwise derivative of sum f_m w^m at w.
inline std::pair<cplx, cplx> taylor_eval(const std::vector<cplx>& f, cplx w) {
    cplx v = 0.0, d = 0.0;
    for (std::size_t i = f.size(); i-- > 0;) {
        v = v * w + f[i];
        if (i >= 1) d = d * w + double(i) * f[i];
    }
    return {v, d};
}

} // namespace heunsym

#endif
