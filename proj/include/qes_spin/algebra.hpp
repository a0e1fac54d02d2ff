#pragma once

#include "errors.hpp"
#include "polynomial.hpp"
#include "spin.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace qes {

namespace detail {

/// Dense product that skips exact zeros of the left factor. The generators are
/// banded or diagonal, so this is O(n^2) for them and bit-identical to A * B.
template <class Matrix>
Matrix mul(const Matrix& A, const Matrix& B) {
    using Scalar = typename Matrix::Scalar;
    Matrix out = Matrix::Zero(A.rows(), B.cols());
    for (Eigen::Index l = 0; l < A.cols(); ++l)
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const Scalar a = A(i, l);
            if (a == Scalar(0)) continue;
            for (Eigen::Index j = 0; j < B.cols(); ++j)
                if (B(l, j) != Scalar(0)) out(i, j) += a * B(l, j);
        }
    return out;
}

template <class S>
struct real_of {
    using type = S;
};
template <class R>
struct real_of<std::complex<R>> {
    using type = R;
};

} // namespace detail

/**
 * Matrices of sl(2) and pl(sl(2)) on V_j, lowest weight first (m = 0..2j).
 *
 * Scalar defaults to complex double; a real extended-precision type can be
 * used when identities must be resolved below double round-off at large j.
 */
template <class Scalar>
struct AlgebraRepT {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    SpinLabel label;
    int k = 1;
    Matrix j_plus, j_minus, j_zero;
    Matrix p_plus, p_minus, p_zero;

    /// Spin-j Casimir J+J- + J0(J0 - 1), formed by matrix products.
    Matrix casimir_sl2() const {
        const auto I = Matrix::Identity(j_zero.rows(), j_zero.cols());
        return detail::mul(j_plus, j_minus) + detail::mul(j_zero, Matrix(j_zero - I));
    }
};

using AlgebraRep = AlgebraRepT<cplx>;

template <class Scalar = cplx>
AlgebraRepT<Scalar> build_sl2(SpinLabel label) {
    using R = typename detail::real_of<Scalar>::type;
    using std::sqrt;
    using Matrix = typename AlgebraRepT<Scalar>::Matrix;
    const int n = label.dim();
    AlgebraRepT<Scalar> rep;
    rep.label = label;
    rep.k = 1;
    rep.j_plus = Matrix::Zero(n, n);
    rep.j_zero = Matrix::Zero(n, n);
    for (int m = 0; m < n; ++m) {
        rep.j_zero(m, m) = Scalar(R(2 * m - label.twice_j) / R(2));
        if (m + 1 < n) rep.j_plus(m + 1, m) = Scalar(sqrt(R((m + 1) * (label.twice_j - m))));
    }
    rep.j_minus = rep.j_plus.adjoint();
    rep.p_plus = rep.j_plus;
    rep.p_minus = rep.j_minus;
    rep.p_zero = rep.j_zero;
    return rep;
}

template <class Scalar>
AlgebraRepT<Scalar> extend_to_plsl2(AlgebraRepT<Scalar> rep, int k) {
    using R = typename detail::real_of<Scalar>::type;
    if (k < 1) throw ParamError("deformation degree k must be positive");
    rep.k = k;
    rep.p_plus = rep.j_plus;
    rep.p_minus = rep.j_minus;
    for (int i = 1; i < k; ++i) {
        rep.p_plus = detail::mul(rep.p_plus, rep.j_plus);
        rep.p_minus = detail::mul(rep.p_minus, rep.j_minus);
    }
    rep.p_zero = rep.j_zero / Scalar(R(k));
    return rep;
}

template <class Scalar = cplx>
AlgebraRepT<Scalar> build_plsl2(SpinLabel label, int k) {
    return extend_to_plsl2(build_sl2<Scalar>(label), k);
}

/// phi^(2k)(p0, c) = -prod_i [c - (k p0 + k - i + 1)(k p0 + k - i)] + prod_i [c - i(i - 1)].
template <class T>
T phi_poly(int k, const T& p0, const T& c) {
    T a(1), b(1);
    for (int i = 1; i <= k; ++i) {
        const T u = T(k) * p0 + T(k - i + 1);
        const T v = T(k) * p0 + T(k - i);
        a *= c - u * v;
        b *= c - T(i * (i - 1));
    }
    return b - a;
}

/// Matrix version of phi_poly; P0 and C are used through products only, no diagonal shortcut.
template <class Matrix>
Matrix phi_matrix(int k, const Matrix& P0, const Matrix& C) {
    using Scalar = typename Matrix::Scalar;
    const Matrix I = Matrix::Identity(P0.rows(), P0.cols());
    Matrix a = I, b = I;
    for (int i = 1; i <= k; ++i) {
        const Matrix u = Scalar(k) * P0 + Scalar(k - i + 1) * I;
        const Matrix v = Scalar(k) * P0 + Scalar(k - i) * I;
        a = detail::mul(a, Matrix(C - detail::mul(u, v)));
        b = detail::mul(b, Matrix(C - Scalar(i * (i - 1)) * I));
    }
    return b - a;
}

struct CommutatorResiduals {
    double r1 = 0.0; ///< |[P0,P+] - P+| + |[P0,P-] + P-| in max norm
    double r2 = 0.0; ///< |[P+,P-] - (phi(P0,C) - phi(P0-1,C))| in max norm
    double scale = 0.0; ///< max-norm of P+P-, the size of the cancelling terms
};

namespace detail {

template <class Matrix>
double max_norm(const Matrix& m) {
    double out = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            using std::abs;
            out = std::max(out, static_cast<double>(abs(m(i, j))));
        }
    return out;
}

} // namespace detail

template <class Scalar>
CommutatorResiduals commutator_residuals(const AlgebraRepT<Scalar>& rep) {
    using Matrix = typename AlgebraRepT<Scalar>::Matrix;
    const Matrix I = Matrix::Identity(rep.p_zero.rows(), rep.p_zero.cols());
    const Matrix C = rep.casimir_sl2();
    using detail::mul;
    const Matrix pp = mul(rep.p_plus, rep.p_minus);
    const Matrix pm = mul(rep.p_minus, rep.p_plus);
    CommutatorResiduals out;
    out.r1 = detail::max_norm(Matrix(mul(rep.p_zero, rep.p_plus) - mul(rep.p_plus, rep.p_zero) - rep.p_plus)) +
             detail::max_norm(Matrix(mul(rep.p_zero, rep.p_minus) - mul(rep.p_minus, rep.p_zero) + rep.p_minus));
    const Matrix rhs = phi_matrix(rep.k, rep.p_zero, C) - phi_matrix(rep.k, Matrix(rep.p_zero - I), C);
    out.r2 = detail::max_norm(Matrix(pp - pm - rhs));
    out.scale = detail::max_norm(pp);
    return out;
}

template <class Scalar>
struct CasimirCheck {
    typename AlgebraRepT<Scalar>::Matrix K;
    double r_order = 0.0;   ///< |K - (P-P+ + phi(P0, C))|
    double r_product = 0.0; ///< |K - prod_i (C - i(i-1))|
    double scale = 0.0;
};

/// K = P+P- + phi(P0 - 1, C), checked against the other ordering and the product form.
template <class Scalar>
CasimirCheck<Scalar> casimir_plsl2(const AlgebraRepT<Scalar>& rep) {
    using Matrix = typename AlgebraRepT<Scalar>::Matrix;
    const Matrix I = Matrix::Identity(rep.p_zero.rows(), rep.p_zero.cols());
    const Matrix C = rep.casimir_sl2();
    CasimirCheck<Scalar> out;
    const Matrix pp = detail::mul(rep.p_plus, rep.p_minus);
    out.K = pp + phi_matrix(rep.k, Matrix(rep.p_zero - I), C);
    const Matrix other = detail::mul(rep.p_minus, rep.p_plus) + phi_matrix(rep.k, rep.p_zero, C);
    Matrix prod = I;
    for (int i = 1; i <= rep.k; ++i) prod = detail::mul(prod, Matrix(C - Scalar(i * (i - 1)) * I));
    out.r_order = detail::max_norm(Matrix(out.K - other));
    out.r_product = detail::max_norm(Matrix(out.K - prod));
    out.scale = std::max(detail::max_norm(pp), detail::max_norm(prod));
    return out;
}

// ---------------------------------------------------------------------------
// Differential realization on the sector polynomials in x = z^k.

/// Polynomial in theta = x d/dx with integer coefficients, ascending.
using ThetaPoly = std::vector<std::int64_t>;

/// x^shift * f(theta).
struct ThetaTerm {
    int shift = 0;
    CPoly f;
};

namespace detail {

inline ThetaPoly theta_mul(const ThetaPoly& a, const ThetaPoly& b) {
    ThetaPoly out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline CPoly to_cpoly(const ThetaPoly& a) {
    CPoly out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = cplx(static_cast<double>(a[i]), 0.0);
    return out;
}

/// Stirling numbers of the second kind S(r, d) for r, d <= n.
inline std::vector<std::vector<std::int64_t>> stirling2(int n) {
    std::vector<std::vector<std::int64_t>> S(n + 1, std::vector<std::int64_t>(n + 1, 0));
    S[0][0] = 1;
    for (int r = 1; r <= n; ++r)
        for (int d = 1; d <= r; ++d) S[r][d] = d * S[r - 1][d] + S[r - 1][d - 1];
    return S;
}

} // namespace detail

/// prod_{i=1..k} (2j - p - i + 1 - k theta), the theta part of the gauged P+.
inline ThetaPoly theta_p_plus(const Sector& s, SpinLabel label) {
    ThetaPoly out{1};
    for (int i = 1; i <= s.k; ++i) out = detail::theta_mul(out, {label.twice_j - s.p - i + 1, -s.k});
    return out;
}

/// prod_{i=1..k} (p - i + 1 + k theta), the theta part of the gauged P-.
inline ThetaPoly theta_p_minus(const Sector& s) {
    ThetaPoly out{1};
    for (int i = 1; i <= s.k; ++i) out = detail::theta_mul(out, {s.p - i + 1, s.k});
    return out;
}

/**
 * Convert a sum of x^shift f(theta) terms into derivative form.
 *
 * Uses theta^r = sum_d S(r, d) x^d D^d. Result index d holds the ascending
 * coefficient polynomial multiplying d^d/dx^d; orders up to max_order.
 */
inline std::vector<CPoly> theta_to_derivative(const std::vector<ThetaTerm>& terms, int max_order) {
    int need = max_order;
    for (const auto& t : terms) need = std::max(need, static_cast<int>(t.f.size()) - 1);
    const auto S = detail::stirling2(need);
    std::vector<CPoly> out(static_cast<std::size_t>(need) + 1);
    for (const auto& t : terms) {
        for (int r = 0; r < static_cast<int>(t.f.size()); ++r) {
            if (t.f[r] == cplx(0)) continue;
            for (int d = 0; d <= r; ++d) {
                if (S[r][d] == 0) continue;
                const int power = t.shift + d;
                const cplx c = t.f[r] * static_cast<double>(S[r][d]);
                if (power < 0) {
                    if (c != cplx(0)) throw AssemblyError("negative power of x in differential realization");
                    continue;
                }
                auto& poly = out[d];
                if (static_cast<int>(poly.size()) <= power) poly.resize(power + 1, cplx(0));
                poly[power] += c;
            }
        }
    }
    for (auto& poly : out)
        if (poly.empty()) poly = {cplx(0)};
    out.resize(static_cast<std::size_t>(std::max(max_order, 0)) + 1, CPoly{cplx(0)});
    return out;
}

/// Gauge-transformed P+, P-, P0 on the sector polynomials, each as derivative-order coefficient lists.
struct DiffOpRealization {
    Sector sector;
    SpinLabel label;
    std::vector<CPoly> p_plus;  ///< index = derivative order 0..k
    std::vector<CPoly> p_minus;
    std::vector<CPoly> p_zero;
};

inline DiffOpRealization diff_realization(const Sector& s, SpinLabel label) {
    DiffOpRealization out;
    out.sector = s;
    out.label = label;
    const ThetaPoly fm = theta_p_minus(s);
    if (fm[0] != 0) throw AssemblyError("P- keeps an x^-1 term: sector constraint violated");
    out.p_plus = theta_to_derivative({{1, detail::to_cpoly(theta_p_plus(s, label))}}, s.k);
    out.p_minus = theta_to_derivative({{-1, detail::to_cpoly(fm)}}, s.k);
    const double shift0 = (s.p - 0.5 * label.twice_j) / s.k;
    out.p_zero = theta_to_derivative({{0, CPoly{cplx(shift0), cplx(1.0)}}}, s.k);
    return out;
}

/// Image of x^n under sum_d coeffs[d](x) d^d/dx^d, as an ascending polynomial.
inline CPoly apply_to_monomial(const std::vector<CPoly>& coeffs, int n) {
    CPoly out;
    for (int d = 0; d < static_cast<int>(coeffs.size()); ++d) {
        if (d > n) break;
        double falling = 1.0;
        for (int t = 0; t < d; ++t) falling *= (n - t);
        const auto& poly = coeffs[d];
        for (int e = 0; e < static_cast<int>(poly.size()); ++e) {
            if (poly[e] == cplx(0)) continue;
            const int power = e + n - d;
            if (static_cast<int>(out.size()) <= power) out.resize(power + 1, cplx(0));
            out[power] += poly[e] * falling;
        }
    }
    if (out.empty()) out = {cplx(0)};
    return out;
}

} // namespace qes
