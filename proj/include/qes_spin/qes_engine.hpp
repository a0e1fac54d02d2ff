#pragma once

#include "algebra.hpp"
#include "errors.hpp"
#include "polynomial.hpp"
#include "spin.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/float128.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace qes {

/**
 * Coefficients of H = c+ P+ + c- P- + sum_s c_s (k P0)^s + c*.
 *
 * c_s[s-1] multiplies (k P0)^s, so c_s has exactly k entries.
 */
struct HamiltonianSpec {
    int k = 2;
    cplx c_plus{0.0};
    cplx c_minus{0.0};
    std::vector<cplx> c_s;
    cplx c_star{0.0};

    void validate() const {
        if (k < 1) throw ParamError("k must be positive");
        if (static_cast<int>(c_s.size()) != k) throw ParamError("c_s must hold exactly k coefficients");
    }

    /// conj(c+) == c- and the diagonal coefficients real, up to tol relative to the largest coefficient.
    bool hermitian(double tol = 1e-14) const {
        double s = std::max({std::abs(c_plus), std::abs(c_minus), std::abs(c_star)});
        for (const auto& c : c_s) s = std::max(s, std::abs(c));
        const double lim = tol * std::max(s, 1e-300);
        if (std::abs(std::conj(c_plus) - c_minus) > lim) return false;
        if (std::abs(c_star.imag()) > lim) return false;
        for (const auto& c : c_s)
            if (std::abs(c.imag()) > lim) return false;
        return true;
    }
};

/// H = sum_i P_i(x) d^i/dx^i acting on polynomials of one sector; coeffs[i] is P_i.
struct OdeOperator {
    Sector sector;
    SpinLabel label;
    std::vector<CPoly> coeffs;

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    CPoly image(int n) const { return apply_to_monomial(coeffs, n); }
    const CPoly& coeff(int i) const { return coeffs.at(static_cast<std::size_t>(i)); }
};

/// Verification thresholds; every one can be overridden from the command line.
struct Tolerances {
    double spectrum = 1e-8;  ///< energy agreement between routes
    double bae = 1e-6;       ///< BAE residual relative to the term scale
    double leak = 1e-10;     ///< coefficient of x^{N+1} in H x^N relative to the operator scale
    double collide = 1e-8;   ///< minimum distance between distinct Bethe roots
    /// Smallest usable leading component of a unit eigenvector. Judged on the quad-refined
    /// vector, so physically small components (about 1e-14 for the rotor near 2j = 40) still pass.
    double leading = 1e-24;
    double roundtrip = 1e-8; ///< roots -> coefficients reconstruction, relative
};

/// One quasi-exact level of a sector.
struct QesSolution {
    Sector sector;
    cplx energy{0.0};
    CPoly phi_coeffs;              ///< monic, ascending, degree N
    std::vector<cplx> bethe_roots; ///< N roots in x = z^k, sorted
    std::vector<cplx> z_zeros;     ///< p zeros at the origin plus all k branches of every root, sorted
    Eigen::VectorXcd amplitudes;   ///< spin-basis amplitudes, unit norm, length 2j+1
    double bae_residual = 0.0;     ///< max |BAE left side| over roots
    double bae_relative = 0.0;     ///< max over roots of |left side| / sum of term magnitudes
    bool bae_applicable = true;    ///< false when two roots collide
};

struct BaeResidual {
    double value = 0.0;
    double relative = 0.0;
    bool applicable = true;
};

// ---------------------------------------------------------------------------

namespace detail {

/// log C(n, m) via lgamma.
inline double log_binomial(int n, int m) {
    return std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
}

inline double op_scale(const OdeOperator& op) {
    double s = 0.0;
    for (const auto& p : op.coeffs)
        for (const auto& c : p) s = std::max(s, std::abs(c));
    return s;
}

} // namespace detail

/// Gauge-transformed x^{-p/k} H x^{p/k} on the sector polynomials.
inline OdeOperator assemble_ode(const HamiltonianSpec& spec, const Sector& s, SpinLabel label) {
    spec.validate();
    if (s.k != spec.k) throw ParamError("sector and Hamiltonian disagree on k");
    const ThetaPoly fm = theta_p_minus(s);
    if (fm[0] != 0) throw AssemblyError("P- keeps an x^-1 term: sector constraint violated");

    std::vector<ThetaTerm> terms;
    terms.push_back({1, poly_scale(detail::to_cpoly(theta_p_plus(s, label)), spec.c_plus)});
    terms.push_back({-1, poly_scale(detail::to_cpoly(fm), spec.c_minus)});

    // k P0 = k theta + p - j on the gauged polynomials.
    const CPoly kp0{cplx(s.p - 0.5 * label.twice_j), cplx(s.k)};
    CPoly diag{spec.c_star};
    CPoly power{cplx(1.0)};
    for (int e = 1; e <= spec.k; ++e) {
        power = poly_mul(power, kp0);
        diag = poly_add(diag, poly_scale(power, spec.c_s[e - 1]));
    }
    terms.push_back({0, diag});

    OdeOperator op;
    op.sector = s;
    op.label = label;
    op.coeffs = theta_to_derivative(terms, spec.k);

    const double scale = std::max(detail::op_scale(op), 1e-300);
    for (int n = 0; n <= s.cap_n; ++n) {
        const CPoly img = op.image(n);
        for (int e = s.cap_n + 1; e < static_cast<int>(img.size()); ++e)
            if (std::abs(img[e]) > 1e-10 * scale)
                throw SubspaceLeak("H x^" + std::to_string(n) + " has a component on x^" + std::to_string(e));
    }
    return op;
}

/// Matrix of the operator on the monomials 1, x, ..., x^N: H x^n = sum_i M(i, n) x^i.
inline Eigen::MatrixXcd subspace_matrix(const OdeOperator& op) {
    const int d = op.sector.dim();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n < d; ++n) {
        const CPoly img = op.image(n);
        for (int i = 0; i < std::min(d, static_cast<int>(img.size())); ++i) M(i, n) = img[i];
    }
    return M;
}

/**
 * Similarity transform to the normalized spin basis.
 *
 * With s_n = sqrt(C(2j, kn+p)) the result is S^-1 M S, which is Hermitian
 * whenever the Hamiltonian is.
 */
inline Eigen::MatrixXcd balanced_matrix(const OdeOperator& op, const Eigen::MatrixXcd& M) {
    const int d = op.sector.dim();
    std::vector<double> lb(d);
    for (int n = 0; n < d; ++n) lb[n] = detail::log_binomial(op.label.twice_j, op.sector.m_of(n));
    Eigen::MatrixXcd H = M;
    for (int i = 0; i < d; ++i)
        for (int n = 0; n < d; ++n)
            if (M(i, n) != cplx(0)) H(i, n) = M(i, n) * std::exp(0.5 * (lb[n] - lb[i]));
    return H;
}

/// z-plane zeros: p at the origin plus the k branches of every root, sorted.
inline std::vector<cplx> z_zeros_of(const std::vector<cplx>& roots, const Sector& s) {
    std::vector<cplx> out(static_cast<std::size_t>(s.p), cplx(0.0));
    for (const auto& x : roots) {
        const double r = std::pow(std::abs(x), 1.0 / s.k);
        const double th = std::arg(x);
        for (int b = 0; b < s.k; ++b) out.push_back(std::polar(r, (th + 2.0 * std::numbers::pi * b) / s.k));
    }
    sort_complex(out);
    return out;
}

/**
 * Spin-basis amplitudes of psi(z) = prod (z - zeros), unit norm.
 *
 * Monomial coefficients c_m relate to amplitudes by c_m = sqrt(C(2j, m)) A_m.
 * The expansion is rescaled as it goes so large zeros cannot overflow.
 */
inline Eigen::VectorXcd normalize_state(const std::vector<cplx>& z_zeros, const Sector& s, SpinLabel label) {
    const int tj = label.twice_j;
    if (static_cast<int>(z_zeros.size()) != s.p + s.k * s.cap_n)
        throw ParamError("zero count does not match the sector");
    CPoly c{cplx(1.0)};
    for (const auto& z : z_zeros) {
        CPoly next(c.size() + 1, cplx(0.0));
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= z * c[i];
        }
        double mx = 0.0;
        for (const auto& v : next) mx = std::max(mx, std::abs(v));
        if (!(mx > 0.0) || !std::isfinite(mx)) throw OverflowGuard("wavefunction expansion left the double range");
        for (auto& v : next) v /= mx;
        c = std::move(next);
    }
    const double lbmax = detail::log_binomial(tj, tj / 2);
    if (0.5 * lbmax > 700.0)
        throw OverflowGuard("binomial weights exceed the double exponent range; needs about " +
                            std::to_string(static_cast<int>(0.5 * lbmax / std::log(10.0))) +
                            " decimal exponent digits");
    Eigen::VectorXcd A = Eigen::VectorXcd::Zero(tj + 1);
    for (int m = 0; m < static_cast<int>(c.size()); ++m)
        A(m) = c[m] * std::exp(-0.5 * detail::log_binomial(tj, m));
    const double nrm = A.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw OverflowGuard("amplitude normalization failed");
    return A / nrm;
}

/**
 * Amplitudes straight from the ascending coefficients of phi(x): c_n sits at
 * m = p + k n, so states off the sector ladder are exactly zero. Weights are
 * combined in log space.
 */
inline Eigen::VectorXcd amplitudes_from_phi(const CPoly& phi, const Sector& s, SpinLabel label) {
    const int tj = label.twice_j;
    if (s.p + s.k * (static_cast<int>(phi.size()) - 1) > tj) throw ParamError("phi degree exceeds the sector");
    std::vector<double> lg(phi.size(), -std::numeric_limits<double>::infinity());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < phi.size(); ++n) {
        if (phi[n] == cplx(0)) continue;
        lg[n] = std::log(std::abs(phi[n])) - 0.5 * detail::log_binomial(tj, s.m_of(static_cast<int>(n)));
        top = std::max(top, lg[n]);
    }
    if (!std::isfinite(top)) throw OverflowGuard("phi has no finite nonzero coefficient");
    Eigen::VectorXcd A = Eigen::VectorXcd::Zero(tj + 1);
    for (std::size_t n = 0; n < phi.size(); ++n)
        if (std::isfinite(lg[n])) A(s.m_of(static_cast<int>(n))) = phi[n] / std::abs(phi[n]) * std::exp(lg[n] - top);
    return A / A.norm();
}

/// Per-root left side of the Bethe ansatz equations with the term-magnitude scale of each.
struct BaeTerms {
    std::vector<cplx> value;
    std::vector<double> scale;
};

/**
 * For each root a: sum_{i=1..k} P_i(x_a) i! e_{i-1}(w) with w_l = 1/(x_a - x_l), l != a.
 *
 * e_r is the elementary symmetric polynomial, so the inner sum runs over
 * unordered (i-1)-subsets of the other roots. The scale of a root adds up
 * |c| |x_a|^d i! e_{i-1}(|w|) over every monomial c x^d of every P_i.
 * Throws CollidingRoots when two roots are closer than min_distance.
 */
inline BaeTerms bae_terms(const std::vector<cplx>& roots, const OdeOperator& op, double min_distance = 1e-8) {
    const int n = static_cast<int>(roots.size());
    const int k = op.order();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (std::abs(roots[a] - roots[b]) <= min_distance) throw CollidingRoots("Bethe roots collide");
    BaeTerms out;
    out.value.resize(n);
    out.scale.resize(n);
    for (int a = 0; a < n; ++a) {
        std::vector<cplx> e(k, cplx(0.0));
        std::vector<double> ea(k, 0.0);
        e[0] = 1.0;
        ea[0] = 1.0;
        for (int l = 0; l < n; ++l) {
            if (l == a) continue;
            const cplx w = 1.0 / (roots[a] - roots[l]);
            for (int r = k - 1; r >= 1; --r) {
                e[r] += w * e[r - 1];
                ea[r] += std::abs(w) * ea[r - 1];
            }
        }
        cplx sum = 0.0;
        double scale = 0.0;
        double fact = 1.0;
        for (int i = 1; i <= k; ++i) {
            fact *= i;
            const cplx pi = horner(op.coeff(i), roots[a]);
            double pabs = 0.0, pw = 1.0;
            for (const auto& c : op.coeff(i)) {
                pabs += std::abs(c) * pw;
                pw *= std::abs(roots[a]);
            }
            sum += pi * fact * e[i - 1];
            scale += pabs * fact * ea[i - 1];
        }
        out.value[a] = sum;
        out.scale[a] = scale;
    }
    return out;
}

inline BaeResidual bae_residual(const std::vector<cplx>& roots, const OdeOperator& op, double min_distance = 1e-8) {
    BaeResidual out;
    if (roots.empty()) return out;
    try {
        const BaeTerms t = bae_terms(roots, op, min_distance);
        for (std::size_t a = 0; a < roots.size(); ++a) {
            out.value = std::max(out.value, std::abs(t.value[a]));
            const double rel = t.scale[a] > 0.0 ? std::abs(t.value[a]) / t.scale[a] : std::abs(t.value[a]);
            out.relative = std::max(out.relative, rel);
        }
    } catch (const CollidingRoots&) {
        out.applicable = false;
        out.value = out.relative = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

/// E = c* + sum_s c_s (kN + p - j)^s - c+ prod_i (2j - p - i + 1 - k(N - 1)) sum_i x_i.
inline cplx energy_from_roots(const std::vector<cplx>& roots, const HamiltonianSpec& spec, const Sector& s,
                              SpinLabel label) {
    spec.validate();
    const double top = s.k * s.cap_n + s.p - 0.5 * label.twice_j;
    cplx e = spec.c_star;
    double pw = 1.0;
    for (int i = 1; i <= spec.k; ++i) {
        pw *= top;
        e += spec.c_s[i - 1] * pw;
    }
    if (roots.empty()) return e;
    double f = 1.0;
    for (int i = 1; i <= spec.k; ++i) f *= label.twice_j - s.p - i + 1 - s.k * (s.cap_n - 1);
    cplx sum = 0.0;
    for (const auto& x : roots) sum += x;
    return e - spec.c_plus * f * sum;
}

// ---------------------------------------------------------------------------
// Extended-precision refinement of one eigenpair and its roots.

namespace detail {

using quad = boost::multiprecision::float128;
using wide = boost::multiprecision::cpp_bin_float_50;

template <class R>
struct Refined {
    bool converged = false;
    cplx energy{0.0};
    double lead = 0.0;          ///< |top component| of the unit balanced eigenvector
    CPoly phi;                  ///< monic phi rounded to double
    std::vector<cplx> roots;    ///< sorted
    bool roots_converged = true;
};

/// Gaussian elimination with partial pivoting restricted to a band of half-width bw.
template <class C>
std::vector<C> banded_solve(std::vector<std::vector<C>> A, std::vector<C> b, int bw, const C& tiny) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        const int last = std::min(n - 1, c + bw);
        int piv = c;
        double best = mag(A[c][c]);
        for (int r = c + 1; r <= last; ++r)
            if (mag(A[r][c]) > best) {
                best = mag(A[r][c]);
                piv = r;
            }
        if (piv != c) {
            std::swap(A[piv], A[c]);
            std::swap(b[piv], b[c]);
        }
        if (A[c][c] == C(0)) A[c][c] = tiny;
        const int width = std::min(n - 1, c + 2 * bw);
        for (int r = c + 1; r <= last; ++r) {
            if (A[r][c] == C(0)) continue;
            const C f = A[r][c] / A[c][c];
            for (int col = c + 1; col <= width; ++col) A[r][col] -= f * A[c][col];
            A[r][c] = C(0);
            b[r] -= f * b[c];
        }
    }
    std::vector<C> x(n);
    for (int r = n - 1; r >= 0; --r) {
        C s = b[r];
        for (int col = r + 1; col <= std::min(n - 1, r + 2 * bw); ++col) s -= A[r][col] * x[col];
        x[r] = s / A[r][r];
    }
    return x;
}

/**
 * Shifted inverse iteration in precision R, then Aberth iteration on phi.
 *
 * The balanced matrix is rebuilt in R from the exact double entries of M and
 * binomials evaluated in R, so the only double-precision input is the seed.
 */
template <class R>
Refined<R> refine_level(const OdeOperator& op, const Eigen::MatrixXcd& M, cplx lambda, const Eigen::VectorXcd& seed) {
    using C = Cx<R>;
    using std::sqrt;
    const Sector& s = op.sector;
    const int d = s.dim();
    const R eps = std::numeric_limits<R>::epsilon();

    std::vector<R> binom(op.label.twice_j + 1);
    binom[0] = R(1);
    for (int m = 1; m <= op.label.twice_j; ++m) binom[m] = binom[m - 1] * R(op.label.twice_j - m + 1) / R(m);
    std::vector<R> sn(d);
    for (int n = 0; n < d; ++n) sn[n] = sqrt(binom[s.m_of(n)]);

    int bw = 0;
    double hmax = 0.0;
    std::vector<std::vector<C>> H(d, std::vector<C>(d, C(0)));
    for (int i = 0; i < d; ++i)
        for (int n = 0; n < d; ++n)
            if (M(i, n) != cplx(0)) {
                H[i][n] = C(M(i, n)) * C(sn[n] / sn[i]);
                bw = std::max(bw, std::abs(i - n));
                hmax = std::max(hmax, mag(H[i][n]));
            }
    hmax = std::max(hmax, 1e-300);

    Refined<R> out;
    std::vector<C> x(d);
    for (int n = 0; n < d; ++n) x[n] = C(seed(n));
    C sigma(lambda);
    const C tiny(R(hmax) * eps * eps);
    const double stop = 1e3 * static_cast<double>(eps) * hmax;
    for (int it = 0; it < 16; ++it) {
        auto A = H;
        for (int i = 0; i < d; ++i) A[i][i] -= sigma;
        std::vector<C> y = banded_solve(std::move(A), x, bw, tiny);
        C xy(0);
        R ny(0);
        for (int n = 0; n < d; ++n) {
            xy += x[n].conj() * y[n];
            ny += y[n].norm2();
        }
        ny = sqrt(ny);
        const C delta = C(1) / xy;
        for (int n = 0; n < d; ++n) x[n] = y[n] / C(ny);
        sigma += delta;
        if (mag(delta) <= stop) {
            out.converged = true;
            break;
        }
    }
    out.energy = sigma.to_cplx();
    out.lead = mag(x[d - 1]);
    if (out.lead == 0.0) return out;

    std::vector<C> phi(d);
    const C top = x[d - 1] * C(sn[d - 1]);
    for (int n = 0; n < d; ++n) phi[n] = x[n] * C(sn[n]) / top;
    phi[d - 1] = C(1);
    out.phi.resize(d);
    for (int n = 0; n < d; ++n) out.phi[n] = phi[n].to_cplx();
    if (d == 1) return out;

    std::vector<cplx> start = poly_roots(out.phi);
    // Aberth divides by root differences, so split exact duplicates first.
    for (std::size_t a = 0; a < start.size(); ++a)
        for (std::size_t b = a + 1; b < start.size(); ++b)
            if (start[a] == start[b]) start[b] += cplx(1e-7, 1e-7) * std::max(1.0, std::abs(start[b]));
    std::vector<C> z(start.size());
    for (std::size_t a = 0; a < start.size(); ++a) z[a] = C(start[a]);
    out.roots_converged = aberth(z, [&](const C& t) { return horner_d(phi, t); }, 400,
                                 1e4 * static_cast<double>(eps), 1e-20);
    out.roots.resize(z.size());
    for (std::size_t a = 0; a < z.size(); ++a) out.roots[a] = z[a].to_cplx();
    sort_complex(out.roots);
    return out;
}

} // namespace detail

/// Energies of one sector only, straight from the dense eigenvalue problem, sorted.
inline std::vector<cplx> quasi_exact_energies(const OdeOperator& op) {
    const Eigen::MatrixXcd H = balanced_matrix(op, subspace_matrix(op));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H, false);
    if (es.info() != Eigen::Success) throw Error("subspace eigenvalue iteration failed");
    std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + H.rows());
    sort_complex(out);
    return out;
}

/**
 * All N+1 levels of a sector with roots, zeros, amplitudes and BAE residuals.
 *
 * Dense eigendecomposition of the balanced subspace matrix gives seeds that
 * are refined in quad precision (50 digits if quad does not settle); Bethe
 * roots start from companion-matrix roots and are finished by Aberth
 * iteration at the same precision. Levels are sorted by energy.
 */
inline std::vector<QesSolution> quasi_exact_spectrum(const OdeOperator& op, const Tolerances& tol = {}) {
    const Sector& s = op.sector;
    const int d = s.dim();
    const Eigen::MatrixXcd M = subspace_matrix(op);
    const Eigen::MatrixXcd H = balanced_matrix(op, M);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H, true);
    if (es.info() != Eigen::Success) throw Error("subspace eigenvalue iteration failed");
    Eigen::VectorXcd vals = es.eigenvalues();
    Eigen::MatrixXcd vecs = es.eigenvectors();

    // Within an exactly degenerate eigenspace only one direction can carry a
    // leading coefficient: rotate the space so the first vector takes all of it.
    const double hn = std::max(H.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<bool> done(d, false);
    for (int a = 0; a < d; ++a) {
        if (done[a]) continue;
        std::vector<int> group{a};
        for (int b = a + 1; b < d; ++b)
            if (!done[b] && std::abs(vals(b) - vals(a)) <= 1e-10 * hn) group.push_back(b);
        for (int g : group) done[g] = true;
        if (group.size() < 2) continue;
        Eigen::MatrixXcd V(d, group.size());
        for (std::size_t g = 0; g < group.size(); ++g) V.col(g) = vecs.col(group[g]);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(V);
        Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, group.size());
        Eigen::VectorXcd w = Q.row(d - 1).adjoint();
        if (w.norm() == 0.0) continue;
        w /= w.norm();
        // Orthonormal basis of span(Q) whose first vector is Q w.
        Eigen::MatrixXcd B(group.size(), group.size());
        B.col(0) = w;
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr2(B.leftCols(1));
        Eigen::MatrixXcd U = qr2.householderQ() * Eigen::MatrixXcd::Identity(group.size(), group.size());
        Eigen::MatrixXcd rotated = Q * U;
        for (std::size_t g = 0; g < group.size(); ++g) vecs.col(group[g]) = rotated.col(g);
    }

    std::vector<QesSolution> out;
    out.reserve(d);
    for (int a = 0; a < d; ++a) {
        Eigen::VectorXcd seed = vecs.col(a);
        seed /= seed.norm();
        QesSolution sol;
        sol.sector = s;

        auto accept = [&](const auto& r) {
            sol.energy = r.energy;
            sol.phi_coeffs = r.phi;
            sol.bethe_roots = r.roots;
            return r.converged && r.roots_converged;
        };
        auto rq = detail::refine_level<detail::quad>(op, M, vals(a), seed);
        if (rq.lead < tol.leading)
            throw DegenerateEigenvector("sector p=" + std::to_string(s.p) + " level " + std::to_string(a) +
                                        ": leading coefficient " + std::to_string(rq.lead) +
                                        " too small for a monic polynomial");
        bool ok = accept(rq);
        BaeResidual bae = bae_residual(sol.bethe_roots, op, tol.collide);
        if (!ok || (bae.applicable && bae.relative > 1e-2 * tol.bae)) {
            auto rw = detail::refine_level<detail::wide>(op, M, vals(a), seed);
            if (rw.lead >= tol.leading) {
                accept(rw);
                bae = bae_residual(sol.bethe_roots, op, tol.collide);
            }
        }
        sol.bae_residual = bae.value;
        sol.bae_relative = bae.relative;
        sol.bae_applicable = bae.applicable;
        sol.z_zeros = z_zeros_of(sol.bethe_roots, s);
        sol.amplitudes = amplitudes_from_phi(sol.phi_coeffs, s, op.label);
        out.push_back(std::move(sol));
    }
    std::sort(out.begin(), out.end(), [](const QesSolution& x, const QesSolution& y) {
        if (x.energy.real() != y.energy.real()) return x.energy.real() < y.energy.real();
        return x.energy.imag() < y.energy.imag();
    });
    return out;
}

/// Every sector of a Hamiltonian: assembled operators and solutions, in sector order.
struct SectorSolutions {
    OdeOperator op;
    std::vector<QesSolution> levels;
};

inline std::vector<SectorSolutions> solve_all_sectors(const HamiltonianSpec& spec, SpinLabel label,
                                                      const Tolerances& tol = {}) {
    std::vector<SectorSolutions> out;
    for (const auto& s : enumerate_sectors(label, spec.k)) {
        OdeOperator op = assemble_ode(spec, s, label);
        auto levels = quasi_exact_spectrum(op, tol);
        out.push_back({std::move(op), std::move(levels)});
    }
    return out;
}

/// Merged energies of all sectors, sorted by (real, imag).
inline std::vector<cplx> engine_energies(const HamiltonianSpec& spec, SpinLabel label) {
    std::vector<cplx> out;
    for (const auto& s : enumerate_sectors(label, spec.k)) {
        auto e = quasi_exact_energies(assemble_ode(spec, s, label));
        out.insert(out.end(), e.begin(), e.end());
    }
    sort_complex(out);
    return out;
}

} // namespace qes
