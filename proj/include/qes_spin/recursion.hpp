#pragma once

#include "errors.hpp"
#include "models.hpp"
#include "polynomial.hpp"
#include "spin.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>
#include <vector>

namespace qes {

using rational = boost::multiprecision::cpp_rational;

/// Exact complex rational, enough arithmetic for the recursions.
struct GaussianRational {
    rational re{0}, im{0};

    GaussianRational() = default;
    GaussianRational(int v) : re(v) {}
    GaussianRational(rational r) : re(std::move(r)) {}
    GaussianRational(rational r, rational i) : re(std::move(r)), im(std::move(i)) {}

    GaussianRational& operator+=(const GaussianRational& o) { re += o.re; im += o.im; return *this; }
    GaussianRational& operator-=(const GaussianRational& o) { re -= o.re; im -= o.im; return *this; }
    GaussianRational& operator*=(const GaussianRational& o) {
        rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        rational d = o.re * o.re + o.im * o.im;
        if (d == 0) throw ParamError("exact division by zero");
        rational r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = std::move(r);
        return *this;
    }
    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }

    cplx to_cplx() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

namespace detail {

template <class R>
struct recursion_scalar {
    using type = std::complex<R>;
    static type make(const R& re, const R& im) { return {re, im}; }
};
template <>
struct recursion_scalar<rational> {
    using type = GaussianRational;
    static type make(const rational& re, const rational& im) { return {re, im}; }
};

} // namespace detail

/// P_{l+2} = (a0 + a1 E) P_l + b P_{l-2}.
template <class C>
struct RecursionStep {
    C a0, a1, b;
};

/**
 * Model three-term recursion for the series psi(z) = sum_l P_l(E) z^l.
 *
 *   LMG:      P_{l+2} = (E + (j-l)delta) / ((l+1)(l+2)g) P_l - (2j+1-l)(2j+2-l)/((l+1)(l+2)) P_{l-2}
 *   rotor:    P_{l+2} = -[2l(l-2j)(2c-a-b) + 2j(2jc+a+b) - 4E] / ((a-b)(l+1)(l+2)) P_l
 *                       - (2j+1-l)(2j+2-l)/((l+1)(l+2)) P_{l-2}
 *   two-axis: (l+1)(l+2) P_{l+2} = -(2iE/chi) P_l + (2j+1-l)(2j+2-l) P_{l-2}
 *
 * Valid for every l >= 0 with P_{-1} = P_{-2} = 0.
 */
template <class R>
RecursionStep<typename detail::recursion_scalar<R>::type> recursion_step(const BasicModelParams<R>& m,
                                                                          SpinLabel label, int l) {
    using C = typename detail::recursion_scalar<R>::type;
    auto mk = [](const R& re, const R& im = R(0)) { return detail::recursion_scalar<R>::make(re, im); };
    validate(m);
    if (l < 0) throw ParamError("recursion index must be non-negative");
    const R j = R(label.twice_j) / R(2);
    const R L = R(l);
    const R lp = R((l + 1) * (l + 2));
    // (2j+1-l)(2j+2-l) in integer arithmetic: zero exactly at l = 2j+1 and l = 2j+2.
    const R tail = R((label.twice_j + 1 - l) * (label.twice_j + 2 - l));
    RecursionStep<C> st;
    if (auto* x = std::get_if<LmgT<R>>(&m)) {
        if (x->g == R(0)) throw ParamError("LMG recursion divides by g");
        const R den = lp * x->g;
        st.a1 = mk(R(1) / den);
        st.a0 = mk((j - L) * x->delta / den);
        st.b = mk(-tail / lp);
    } else if (auto* x = std::get_if<RotorT<R>>(&m)) {
        const R den = (x->a - x->b) * lp;
        const R lin = R(2) * L * (L - R(2) * j) * (R(2) * x->c - x->a - x->b) +
                      R(2) * j * (R(2) * j * x->c + x->a + x->b);
        st.a1 = mk(R(4) / den);
        st.a0 = mk(-lin / den);
        st.b = mk(-tail / lp);
    } else {
        const R chi = std::get<TwoAxisT<R>>(m).chi;
        st.a1 = mk(R(0), -R(2) / (chi * lp));
        st.a0 = C(0);
        st.b = mk(tail / lp);
    }
    return st;
}

/// P_l(E) with ascending coefficients; the true polynomial is coeffs * exp(log_scale).
template <class C>
struct EnergyPolynomialT {
    int index_l = 0;
    std::vector<C> coeffs;
    double log_scale = 0.0;
    Parity parity = Parity::even;
};

using EnergyPolynomial = EnergyPolynomialT<cplx>;
using ExactEnergyPolynomial = EnergyPolynomialT<GaussianRational>;

/**
 * P_0 .. P_{l_max} with seeds P_0 = P_1 = 1.
 *
 * In floating point each new polynomial is divided by its largest
 * coefficient magnitude and the logarithm of that factor is accumulated in
 * log_scale. The exact scalar path keeps log_scale = 0.
 */
template <class R>
std::vector<EnergyPolynomialT<typename detail::recursion_scalar<R>::type>>
generate_polys(const BasicModelParams<R>& m, SpinLabel label, int l_max) {
    using C = typename detail::recursion_scalar<R>::type;
    constexpr bool floating = std::is_same_v<C, cplx>;
    validate(m);
    if (l_max < 1) throw ParamError("l_max must be at least 1");
    std::vector<EnergyPolynomialT<C>> P(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= std::min(l_max, 1); ++l) P[l] = {l, {C(1)}, 0.0, l % 2 ? Parity::odd : Parity::even};
    for (int l = 0; l + 2 <= l_max; ++l) {
        const auto st = recursion_step(m, label, l);
        const auto& cur = P[l];
        std::vector<C> next = poly_mul(cur.coeffs, std::vector<C>{st.a0, st.a1});
        if (l >= 2 && !(st.b == C(0))) {
            const auto& prev = P[l - 2];
            C factor = st.b;
            if constexpr (floating) factor *= std::exp(prev.log_scale - cur.log_scale);
            next = poly_add(next, poly_scale(prev.coeffs, factor));
        }
        EnergyPolynomialT<C> out{l + 2, std::move(next), cur.log_scale, (l % 2) ? Parity::odd : Parity::even};
        if constexpr (floating) {
            double mx = 0.0;
            for (const auto& c : out.coeffs) mx = std::max(mx, std::abs(c));
            if (mx > 0.0) {
                for (auto& c : out.coeffs) c /= mx;
                out.log_scale += std::log(mx);
            }
            out.coeffs = trimmed(out.coeffs);
        } else {
            while (out.coeffs.size() > 1 && out.coeffs.back() == C(0)) out.coeffs.pop_back();
        }
        P[l + 2] = std::move(out);
    }
    return P;
}

/// Index parity decides the sector: the even-index critical polynomial belongs to even psi.
template <class C>
struct CriticalPairT {
    EnergyPolynomialT<C> p_even_sector;
    EnergyPolynomialT<C> p_odd_sector;
};

template <class R>
CriticalPairT<typename detail::recursion_scalar<R>::type> critical_pair(const BasicModelParams<R>& m,
                                                                         SpinLabel label) {
    const int l1 = label.twice_j + 1, l2 = label.twice_j + 2;
    auto P = generate_polys(m, label, l2);
    if (l1 % 2 == 0) return {P[l1], P[l2]};
    return {P[l2], P[l1]};
}

/// P_l(E) and dP_l/dE by running the recursion numerically at fixed E, with a common rescaling.
inline std::pair<cplx, cplx> eval_recursion(const std::vector<RecursionStep<cplx>>& steps, int l, cplx E) {
    cplx p = 1.0, dp = 0.0, pm = 0.0, dpm = 0.0;
    for (int t = l % 2; t + 2 <= l; t += 2) {
        const auto& st = steps[t];
        const cplx lin = st.a0 + st.a1 * E;
        const cplx np = lin * p + st.b * pm;
        const cplx ndp = st.a1 * p + lin * dp + st.b * dpm;
        pm = p;
        dpm = dp;
        p = np;
        dp = ndp;
        const double mx = std::max({std::abs(p), std::abs(dp), std::abs(pm), std::abs(dpm)});
        if (mx > 1e100 || (mx < 1e-100 && mx > 0.0)) {
            p /= mx;
            dp /= mx;
            pm /= mx;
            dpm /= mx;
        }
    }
    return {p, dp};
}

inline std::vector<RecursionStep<cplx>> recursion_steps(const ModelParams& m, SpinLabel label, int l_max) {
    std::vector<RecursionStep<cplx>> out;
    for (int l = 0; l + 2 <= l_max; ++l) out.push_back(recursion_step(m, label, l));
    return out;
}

struct CriticalZeros {
    std::vector<cplx> even_sector;
    std::vector<cplx> odd_sector;
    bool complex_zero = false; ///< a Hermitian model produced a zero with |Im E| above tolerance
};

/**
 * Zeros of P_{2j+1} and P_{2j+2}.
 *
 * Companion-matrix roots of the rescaled coefficients seed an Aberth
 * iteration that evaluates P_l(E) through the recursion itself, so the final
 * zeros do not inherit the coefficient conditioning.
 */
inline CriticalZeros critical_zeros(const ModelParams& m, SpinLabel label, double imag_tol = 1e-8) {
    const auto pair = critical_pair(m, label);
    const auto steps = recursion_steps(m, label, label.twice_j + 2);
    auto zeros_of = [&](const EnergyPolynomial& P) {
        std::vector<cplx> z = companion_roots(P.coeffs);
        aberth(z, [&](const cplx& E) { return eval_recursion(steps, P.index_l, E); }, 200, 1e-15, 1e-9);
        sort_complex(z);
        return z;
    };
    CriticalZeros out;
    out.even_sector = zeros_of(pair.p_even_sector);
    out.odd_sector = zeros_of(pair.p_odd_sector);
    for (const auto* v : {&out.even_sector, &out.odd_sector})
        for (const auto& e : *v)
            if (std::abs(e.imag()) > imag_tol * std::max(1.0, std::abs(e))) out.complex_zero = true;
    return out;
}

struct MergedZero {
    cplx energy;
    int multiplicity = 1;
};

/// Both sectors merged and sorted; zeros within `radius` are reported once with multiplicity.
inline std::vector<MergedZero> merged_zeros(const CriticalZeros& cz, double radius = 1e-7) {
    std::vector<cplx> all = cz.even_sector;
    all.insert(all.end(), cz.odd_sector.begin(), cz.odd_sector.end());
    sort_complex(all);
    std::vector<MergedZero> out;
    for (const auto& e : all) {
        if (!out.empty() && std::abs(out.back().energy - e) <= radius) {
            auto& b = out.back();
            b.energy = (b.energy * double(b.multiplicity) + e) / double(b.multiplicity + 1);
            ++b.multiplicity;
        } else {
            out.push_back({e, 1});
        }
    }
    return out;
}

/// Every zero repeated by multiplicity, sorted: the full quasi-exact spectrum from the recursion.
inline std::vector<cplx> recursion_energies(const ModelParams& m, SpinLabel label) {
    const auto cz = critical_zeros(m, label);
    std::vector<cplx> all = cz.even_sector;
    all.insert(all.end(), cz.odd_sector.begin(), cz.odd_sector.end());
    sort_complex(all);
    return all;
}

namespace detail {

/// Cauchy-style radius making the divisor's coefficients comparable in size.
inline double coefficient_radius(const CPoly& b) {
    const int n = degree(b);
    if (n == 0) return 1.0;
    double r = 0.0;
    for (int i = 0; i < n; ++i)
        if (b[i] != cplx(0)) r = std::max(r, std::pow(std::abs(b[i] / b[n]), 1.0 / (n - i)));
    return r > 0.0 ? r : 1.0;
}

inline CPoly rescale_variable(CPoly a, double rho) {
    double f = 1.0;
    for (auto& c : a) {
        c *= f;
        f *= rho;
    }
    return a;
}

} // namespace detail

/**
 * Largest relative remainder of P_{2j+1+2l} / P_{2j+1} and P_{2j+2+2l} / P_{2j+2}, l = 1..l_extra.
 *
 * E is rescaled by the divisor's root radius before dividing, and remainders
 * are measured against the largest dividend coefficient.
 */
inline double factorization_check(const ModelParams& m, SpinLabel label, int l_extra) {
    const int base = label.twice_j + 1;
    const auto P = generate_polys(m, label, base + 1 + 2 * std::max(l_extra, 0));
    double worst = 0.0;
    for (int chain = 0; chain < 2; ++chain) {
        const CPoly& div = P[base + chain].coeffs;
        const double rho = detail::coefficient_radius(div);
        const CPoly b = detail::rescale_variable(div, rho);
        for (int l = 0; l <= l_extra; ++l) {
            const CPoly a = detail::rescale_variable(P[base + chain + 2 * l].coeffs, rho);
            const auto dm = poly_divmod(a, b);
            double amax = 0.0, rmax = 0.0;
            for (const auto& c : a) amax = std::max(amax, std::abs(c));
            for (const auto& c : dm.rem) rmax = std::max(rmax, std::abs(c));
            if (amax > 0.0) worst = std::max(worst, rmax / amax);
        }
    }
    return worst;
}

/// Exact-arithmetic version: true when every remainder vanishes identically.
inline bool factorization_exact(const BasicModelParams<rational>& m, SpinLabel label, int l_extra) {
    const int base = label.twice_j + 1;
    const auto P = generate_polys(m, label, base + 1 + 2 * std::max(l_extra, 0));
    for (int chain = 0; chain < 2; ++chain)
        for (int l = 0; l <= l_extra; ++l) {
            const auto dm = poly_divmod(P[base + chain + 2 * l].coeffs, P[base + chain].coeffs);
            for (const auto& c : dm.rem)
                if (!(c == GaussianRational(0))) return false;
        }
    return true;
}

/**
 * Series truncation at a critical zero: max |P_l(E)| / S_l over 2j < l <= l_max
 * on E's parity chain.
 *
 * S_l runs the same recursion on absolute values, (|a0| + |a1| (|E| + eta)) S_l + |b| S_{l-2},
 * so the ratio is the size of P_l(E) against the rounding scale of its terms.
 * eta = 4 eps * energy_scale is the accuracy of a computed zero. Without it a zero
 * that is exactly E = 0 but computed as 1e-33 leaves P_l and S_l both O(E) with ratio 1.
 * energy_scale defaults to |E|; pass the largest |zero| of the spectrum.
 */
inline double truncation_residual(const ModelParams& m, SpinLabel label, cplx E, Parity chain, int l_max,
                                  double energy_scale = -1.0) {
    const auto steps = recursion_steps(m, label, l_max);
    const double e_abs = std::abs(E) + 4.0 * std::numeric_limits<double>::epsilon() *
                                           (energy_scale < 0.0 ? std::abs(E) : energy_scale);
    double worst = 0.0;
    cplx p = 1.0, pm = 0.0;
    double s = 1.0, sm = 0.0;
    for (int l = chain == Parity::odd ? 1 : 0; l <= l_max; l += 2) {
        if (l > label.twice_j) worst = std::max(worst, std::abs(p) / s);
        if (l + 2 > l_max) break;
        const auto& st = steps[l];
        const cplx lin = st.a0 + st.a1 * E;
        const cplx np = lin * p + st.b * pm;
        const double ns = (std::abs(st.a0) + std::abs(st.a1) * e_abs) * s + std::abs(st.b) * sm;
        pm = p;
        p = np;
        sm = s;
        s = ns;
        if (s > 1e200) {
            p /= s;
            pm /= s;
            sm /= s;
            s = 1.0;
        }
    }
    return worst;
}

} // namespace qes
