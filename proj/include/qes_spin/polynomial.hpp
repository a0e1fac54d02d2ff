#pragma once

#include "errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

namespace qes {

using cplx = std::complex<double>;
/// Ascending-degree complex coefficient vector: a[0] + a[1] x + ...
using CPoly = std::vector<cplx>;

/**
 * Minimal complex arithmetic over an arbitrary real type.
 *
 * std::complex is unspecified for non-builtin reals, so the extended
 * precision paths use this instead.
 */
template <class R>
struct Cx {
    R re{0}, im{0};

    Cx() = default;
    Cx(const R& r) : re(r), im(0) {}
    template <class T>
        requires std::is_arithmetic_v<T>
    Cx(T v) : re(R(v)), im(0) {}
    Cx(R r, R i) : re(std::move(r)), im(std::move(i)) {}
    explicit Cx(const cplx& z) : re(z.real()), im(z.imag()) {}

    Cx& operator+=(const Cx& o) { re += o.re; im += o.im; return *this; }
    Cx& operator-=(const Cx& o) { re -= o.re; im -= o.im; return *this; }
    Cx& operator*=(const Cx& o) {
        R r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    Cx& operator/=(const Cx& o) {
        R d = o.re * o.re + o.im * o.im;
        R r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = r;
        return *this;
    }
    friend Cx operator+(Cx a, const Cx& b) { return a += b; }
    friend Cx operator-(Cx a, const Cx& b) { return a -= b; }
    friend Cx operator*(Cx a, const Cx& b) { return a *= b; }
    friend Cx operator/(Cx a, const Cx& b) { return a /= b; }
    friend Cx operator-(const Cx& a) { return Cx(-a.re, -a.im); }
    friend bool operator==(const Cx& a, const Cx& b) { return a.re == b.re && a.im == b.im; }

    R norm2() const { return re * re + im * im; }
    Cx conj() const { return Cx(re, -im); }
    cplx to_cplx() const { return cplx(static_cast<double>(re), static_cast<double>(im)); }
};

template <class R>
inline R abs(const Cx<R>& z) {
    using std::sqrt;
    return sqrt(z.norm2());
}

inline double mag(const cplx& z) { return std::abs(z); }
template <class R>
inline double mag(const Cx<R>& z) {
    return static_cast<double>(abs(z));
}
inline cplx conj_of(const cplx& z) { return std::conj(z); }
template <class R>
inline Cx<R> conj_of(const Cx<R>& z) {
    return z.conj();
}

/// Degree after dropping trailing coefficients with |a_i| <= tol (zero polynomial gives 0).
inline int degree(const CPoly& a, double tol = 0.0) {
    for (int i = static_cast<int>(a.size()) - 1; i > 0; --i)
        if (std::abs(a[i]) > tol) return i;
    return 0;
}

inline CPoly trimmed(CPoly a, double tol = 0.0) {
    a.resize(static_cast<std::size_t>(degree(a, tol)) + 1);
    return a;
}

template <class C>
C horner(const std::vector<C>& a, const C& x) {
    C acc(0);
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * x + *it;
    return acc;
}

/// Value and first derivative by a single Horner sweep.
template <class C>
std::pair<C, C> horner_d(const std::vector<C>& a, const C& x) {
    C p(0), dp(0);
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        dp = dp * x + p;
        p = p * x + *it;
    }
    return {p, dp};
}

template <class C>
std::vector<C> poly_mul(const std::vector<C>& a, const std::vector<C>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<C> out(a.size() + b.size() - 1, C(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

template <class C>
std::vector<C> poly_add(std::vector<C> a, const std::vector<C>& b) {
    if (a.size() < b.size()) a.resize(b.size(), C(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

template <class C>
std::vector<C> poly_scale(std::vector<C> a, const C& s) {
    for (auto& c : a) c *= s;
    return a;
}

/// Derivative of an ascending coefficient vector.
template <class C>
std::vector<C> poly_derivative(const std::vector<C>& a) {
    if (a.size() <= 1) return {C(0)};
    std::vector<C> out(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * C(static_cast<double>(i));
    return out;
}

template <class C>
struct DivMod {
    std::vector<C> quot;
    std::vector<C> rem;
};

/// Long division a = q*b + r with deg r < deg b; b's leading coefficient must be nonzero.
template <class C>
DivMod<C> poly_divmod(std::vector<C> a, const std::vector<C>& b) {
    const int nb = static_cast<int>(b.size()) - 1;
    if (nb < 0 || b.back() == C(0)) throw ParamError("division by a polynomial with zero leading coefficient");
    const int na = static_cast<int>(a.size()) - 1;
    if (na < nb) return {{C(0)}, a};
    std::vector<C> q(static_cast<std::size_t>(na - nb + 1), C(0));
    for (int i = na; i >= nb; --i) {
        C f = a[i] / b[nb];
        q[i - nb] = f;
        for (int t = 0; t <= nb; ++t) a[i - nb + t] -= f * b[t];
        a[i] = C(0);
    }
    a.resize(nb > 0 ? nb : 1);
    if (nb == 0) a[0] = C(0);
    return {q, a};
}

/// Monic polynomial with the given roots.
template <class C>
std::vector<C> poly_from_roots(const std::vector<C>& roots) {
    std::vector<C> out{C(1)};
    for (const auto& r : roots) {
        std::vector<C> next(out.size() + 1, C(0));
        for (std::size_t i = 0; i < out.size(); ++i) {
            next[i + 1] += out[i];
            next[i] -= r * out[i];
        }
        out = std::move(next);
    }
    return out;
}

/// Deterministic ordering: by real part, then imaginary part.
inline void sort_complex(std::vector<cplx>& v) {
    std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

namespace detail {

/// Parlett-Reinsch diagonal balancing (radix 2) in place.
inline void balance(Eigen::MatrixXcd& A) {
    const int n = static_cast<int>(A.rows());
    const double radix = 2.0, sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(A(j, i));
                r += std::abs(A(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                A.row(i) /= f;
                A.col(i) *= f;
            }
        }
    }
}

} // namespace detail

/// Eigenvalues of the balanced companion matrix; leading coefficient must be nonzero.
inline std::vector<cplx> companion_roots(const CPoly& a_in) {
    const CPoly a = trimmed(a_in);
    const int n = static_cast<int>(a.size()) - 1;
    if (n <= 0) return {};
    if (a[n] == cplx(0)) throw ParamError("zero leading coefficient");
    if (n == 1) return {-a[0] / a[1]};
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) M(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) M(i, n - 1) = -a[i] / a[n];
    detail::balance(M);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    if (es.info() != Eigen::Success) throw Error("companion eigenvalue iteration failed");
    std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
    return out;
}

/// Newton steps on each root independently; a step is rejected if it does not reduce |p|.
inline std::vector<cplx> newton_polish(const CPoly& a, std::vector<cplx> roots, int steps = 1) {
    for (auto& r : roots) {
        for (int s = 0; s < steps; ++s) {
            auto [p, dp] = horner_d(a, r);
            if (dp == cplx(0) || p == cplx(0)) break;
            cplx cand = r - p / dp;
            if (std::abs(horner(a, cand)) <= std::abs(p)) r = cand;
            else break;
        }
    }
    return roots;
}

/// Companion-matrix roots with one Newton polish step, sorted.
inline std::vector<cplx> poly_roots(const CPoly& a) {
    auto r = newton_polish(a, companion_roots(a), 1);
    sort_complex(r);
    return r;
}

/**
 * Simultaneous Aberth-Ehrlich iteration.
 *
 * eval(z) returns (p(z), p'(z)). Iterates Gauss-Seidel style until every
 * correction is below tol * max(1, |z|), or until corrections below `loose`
 * stop shrinking (the round-off floor of the coefficients). Returns true on
 * either kind of convergence.
 */
template <class C, class Eval>
bool aberth(std::vector<C>& z, Eval&& eval, int max_iter, double tol, double loose = 0.0) {
    const std::size_t n = z.size();
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto [p, dp] = eval(z[i]);
            if (p == C(0)) continue;
            C ratio = p / dp;
            C s(0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s += C(1) / (z[i] - z[j]);
            C w = ratio / (C(1) - ratio * s);
            z[i] -= w;
            worst = std::max(worst, mag(w) / std::max(1.0, mag(z[i])));
        }
        if (worst <= tol) return true;
        if (worst <= loose && worst > 0.25 * prev) return true;
        prev = worst;
    }
    return false;
}

} // namespace qes
