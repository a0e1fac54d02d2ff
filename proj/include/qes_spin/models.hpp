#pragma once

#include "errors.hpp"
#include "polynomial.hpp"
#include "qes_engine.hpp"
#include "spin.hpp"

#include <cmath>
#include <string>
#include <variant>
#include <vector>

namespace qes {

/// Lipkin-Meshkov-Glick: H = delta J0 + g (J+^2 + J-^2).
template <class R>
struct LmgT {
    R delta{0}, g{0};
};

/// Asymmetric rigid rotor: H = a Jx^2 + b Jy^2 + c Jz^2.
template <class R>
struct RotorT {
    R a{0}, b{0}, c{0};
};

/// Two-axis countertwisting: H = chi/(2i) (J+^2 - J-^2).
template <class R>
struct TwoAxisT {
    R chi{0};
};

template <class R>
using BasicModelParams = std::variant<LmgT<R>, RotorT<R>, TwoAxisT<R>>;

using Lmg = LmgT<double>;
using Rotor = RotorT<double>;
using TwoAxis = TwoAxisT<double>;
using ModelParams = BasicModelParams<double>;

template <class R>
std::string model_name(const BasicModelParams<R>& m) {
    switch (m.index()) {
    case 0: return "lmg";
    case 1: return "rotor";
    default: return "two-axis";
    }
}

/// Throws ParamError when the model's dividing parameter vanishes.
template <class R>
void validate(const BasicModelParams<R>& m) {
    if (auto* r = std::get_if<RotorT<R>>(&m)) {
        if (r->a == r->b) throw ParamError("rotor requires a != b");
    } else if (auto* t = std::get_if<TwoAxisT<R>>(&m)) {
        if (t->chi == R(0)) throw ParamError("two-axis requires chi != 0");
    }
}

/// All three models are k = 2 members of the general family.
inline HamiltonianSpec to_spec(const ModelParams& m, SpinLabel label) {
    validate(m);
    HamiltonianSpec s;
    s.k = 2;
    s.c_s = {0.0, 0.0};
    const double j = label.j();
    if (auto* l = std::get_if<Lmg>(&m)) {
        s.c_plus = s.c_minus = l->g;
        s.c_s[0] = l->delta;
    } else if (auto* r = std::get_if<Rotor>(&m)) {
        s.c_plus = s.c_minus = (r->a - r->b) / 4.0;
        s.c_s[1] = (2.0 * r->c - r->a - r->b) / 2.0;
        s.c_star = (r->a + r->b) / 2.0 * j * (j + 1.0);
    } else {
        const double chi = std::get<TwoAxis>(m).chi;
        s.c_plus = chi / cplx(0.0, 2.0);
        s.c_minus = -chi / cplx(0.0, 2.0);
    }
    return s;
}

/// Closed-form level for N <= 1: energy and monic psi(z), ascending in z.
struct GoldenLevel {
    cplx energy;
    CPoly psi;
};

namespace detail {

inline CPoly z_monomial(int p) {
    CPoly out(static_cast<std::size_t>(p) + 1, cplx(0.0));
    out[p] = 1.0;
    return out;
}

/// z^p (z^2 + c).
inline CPoly z_pair(int p, cplx c) {
    CPoly out(static_cast<std::size_t>(p) + 3, cplx(0.0));
    out[p] = c;
    out[p + 2] = 1.0;
    return out;
}

} // namespace detail

/**
 * Tabulated N = 0 and N = 1 levels of the three models.
 *
 * These are hand transcriptions of closed forms and never call the engine.
 * Throws Unsupported for N >= 2.
 */
inline std::vector<GoldenLevel> golden_levels(const ModelParams& m, SpinLabel label, const Sector& s) {
    validate(m);
    if (s.cap_n >= 2) throw Unsupported("closed forms exist only for N <= 1");
    const int tj = label.twice_j;
    const double j = label.j();
    const int p = s.p;
    const cplx I(0.0, 1.0);
    std::vector<GoldenLevel> out;

    if (auto* l = std::get_if<Lmg>(&m)) {
        const double D = l->delta, g = l->g;
        if (s.cap_n == 0) return {{cplx((p - j) * D), detail::z_monomial(p)}};
        if (g == 0.0) throw ParamError("N = 1 closed forms divide by g");
        if (tj == 2 && p == 0) {
            const double R = std::sqrt(D * D + 4 * g * g);
            out.push_back({-R, detail::z_pair(0, -(D + R) / (2 * g))});
            out.push_back({R, detail::z_pair(0, -(D - R) / (2 * g))});
        } else if (tj == 3 && p == 0) {
            const double R = std::sqrt(D * D + 12 * g * g);
            out.push_back({-D / 2 - R, detail::z_pair(0, -(D + R) / (6 * g))});
            out.push_back({-D / 2 + R, detail::z_pair(0, -(D - R) / (6 * g))});
        } else if (tj == 3 && p == 1) {
            const double R = std::sqrt(D * D + 12 * g * g);
            out.push_back({D / 2 - R, detail::z_pair(1, -(D + R) / (2 * g))});
            out.push_back({D / 2 + R, detail::z_pair(1, -(D - R) / (2 * g))});
        } else if (tj == 4 && p == 1) {
            const double R = std::sqrt(D * D + 36 * g * g);
            out.push_back({-R, detail::z_pair(1, -(D + R) / (6 * g))});
            out.push_back({R, detail::z_pair(1, -(D - R) / (6 * g))});
        }
    } else if (auto* r = std::get_if<Rotor>(&m)) {
        const double a = r->a, b = r->b, c = r->c;
        if (s.cap_n == 0)
            return {{cplx((a + b) / 2 * j * (j + 1) + (2 * c - a - b) / 2 * (p - j) * (p - j)), detail::z_monomial(p)}};
        const double R = std::sqrt(a * a + b * b + c * c - a * b - b * c - a * c);
        if (tj == 2 && p == 0) {
            out.push_back({a + c, detail::z_pair(0, 1.0)});
            out.push_back({b + c, detail::z_pair(0, -1.0)});
        } else if (tj == 3 && p == 0) {
            out.push_back({5 * (a + b + c) / 4 - R, detail::z_pair(0, -(a + b - 2 * c + 2 * R) / (3 * (a - b)))});
            out.push_back({5 * (a + b + c) / 4 + R, detail::z_pair(0, -(a + b - 2 * c - 2 * R) / (3 * (a - b)))});
        } else if (tj == 3 && p == 1) {
            out.push_back({5 * (a + b + c) / 4 + R, detail::z_pair(1, (a + b - 2 * c + 2 * R) / (a - b))});
            out.push_back({5 * (a + b + c) / 4 - R, detail::z_pair(1, (a + b - 2 * c - 2 * R) / (a - b))});
        } else if (tj == 4 && p == 1) {
            out.push_back({4 * a + b + c, detail::z_pair(1, 1.0)});
            out.push_back({a + 4 * b + c, detail::z_pair(1, -1.0)});
        }
    } else {
        const double chi = std::get<TwoAxis>(m).chi;
        if (s.cap_n == 0) return {{cplx(0.0), detail::z_monomial(p)}};
        const double r3 = std::sqrt(3.0);
        if (tj == 2 && p == 0) {
            out.push_back({chi, detail::z_pair(0, I)});
            out.push_back({-chi, detail::z_pair(0, -I)});
        } else if (tj == 3 && p == 0) {
            out.push_back({r3 * chi, detail::z_pair(0, r3 / 3 * I)});
            out.push_back({-r3 * chi, detail::z_pair(0, -r3 / 3 * I)});
        } else if (tj == 3 && p == 1) {
            out.push_back({r3 * chi, detail::z_pair(1, r3 * I)});
            out.push_back({-r3 * chi, detail::z_pair(1, -r3 * I)});
        } else if (tj == 4 && p == 1) {
            out.push_back({3 * chi, detail::z_pair(1, I)});
            out.push_back({-3 * chi, detail::z_pair(1, -I)});
        }
    }
    if (out.empty()) throw Unsupported("no closed form tabulated for this sector");
    return out;
}

/// Model-specialized BAE left sides with the denominator 2 P2 written out per model.
struct ModelBae {
    std::vector<cplx> value;       ///< sum_{l != i} 2/(x_i - x_l) + P1(x_i)/P2(x_i)
    std::vector<cplx> denominator; ///< P2(x_i), so value * denominator is the generic left side
};

/**
 * LMG:      P2 = 4g(x^3 + x),  P1 = 2g(3-4j+2p)x^2 + 2 delta x + 2g(1+2p)
 * rotor:    P2 = (a-b)(x^3 + x) - 2(a+b-2c)x^2,
 *           P1 = (a-b)/2 [(3-4j+2p)x^2 + 1 + 2p] + 2(2c-a-b)(1+p-j)x
 * two-axis: P2 = -2i chi (x^3 - x),  P1 = -i chi [(3-4j+2p)x^2 - (1+2p)]
 */
inline ModelBae model_bae_terms(const ModelParams& m, SpinLabel label, const Sector& s,
                                const std::vector<cplx>& roots, double min_distance = 1e-8) {
    validate(m);
    const int n = static_cast<int>(roots.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (std::abs(roots[a] - roots[b]) <= min_distance) throw CollidingRoots("Bethe roots collide");
    const double j = label.j();
    const double p = s.p;
    const cplx I(0.0, 1.0);
    ModelBae out;
    for (int i = 0; i < n; ++i) {
        const cplx x = roots[i];
        cplx p2, p1;
        if (auto* l = std::get_if<Lmg>(&m)) {
            p2 = 4.0 * l->g * (x * x * x + x);
            p1 = 2.0 * l->g * (3 - 4 * j + 2 * p) * x * x + 2.0 * l->delta * x + 2.0 * l->g * (1 + 2 * p);
        } else if (auto* r = std::get_if<Rotor>(&m)) {
            const double a = r->a, b = r->b, c = r->c;
            p2 = (a - b) * (x * x * x + x) - 2.0 * (a + b - 2 * c) * x * x;
            p1 = (a - b) / 2.0 * ((3 - 4 * j + 2 * p) * x * x + 1.0 + 2 * p) + 2.0 * (2 * c - a - b) * (1 + p - j) * x;
        } else {
            const double chi = std::get<TwoAxis>(m).chi;
            p2 = -2.0 * I * chi * (x * x * x - x);
            p1 = -I * chi * ((3 - 4 * j + 2 * p) * x * x - (1 + 2 * p));
        }
        cplx sum = 0.0;
        for (int l = 0; l < n; ++l)
            if (l != i) sum += 2.0 / (x - roots[l]);
        out.value.push_back(sum + p1 / p2);
        out.denominator.push_back(p2);
    }
    return out;
}

inline double model_bae_residual(const ModelParams& m, SpinLabel label, const Sector& s,
                                 const std::vector<cplx>& roots, double min_distance = 1e-8) {
    double r = 0.0;
    for (const auto& v : model_bae_terms(m, label, s, roots, min_distance).value) r = std::max(r, std::abs(v));
    return r;
}

} // namespace qes
