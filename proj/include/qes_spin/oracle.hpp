#pragma once

#include "algebra.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "spin.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace qes {

/**
 * Full (2j+1)-dimensional model Hamiltonian in the |j,m> basis.
 *
 * Built from the Cartesian components Jx = (J+ + J-)/2, Jy = (J+ - J-)/(2i),
 * Jz = J0 rather than from the ladder form used by the engine. Does not
 * validate the parameters, so derivative families such as (a, b, c) =
 * (0, 0, 1) are accepted.
 */
inline Eigen::MatrixXcd hamiltonian_matrix(const ModelParams& m, SpinLabel label) {
    const AlgebraRep rep = build_sl2(label);
    const cplx I(0.0, 1.0);
    const Eigen::MatrixXcd Jx = (rep.j_plus + rep.j_minus) / 2.0;
    const Eigen::MatrixXcd Jy = (rep.j_plus - rep.j_minus) / (2.0 * I);
    const Eigen::MatrixXcd& Jz = rep.j_zero;
    if (auto* l = std::get_if<Lmg>(&m)) {
        // J+^2 + J-^2 = 2 (Jx^2 - Jy^2)
        return l->delta * Jz + 2.0 * l->g * (Jx * Jx - Jy * Jy);
    }
    if (auto* r = std::get_if<Rotor>(&m)) return r->a * Jx * Jx + r->b * Jy * Jy + r->c * Jz * Jz;
    // chi/(2i) (J+^2 - J-^2) = chi (Jx Jy + Jy Jx)
    const double chi = std::get<TwoAxis>(m).chi;
    return chi * (Jx * Jy + Jy * Jx);
}

struct SpectrumResult {
    Eigen::VectorXd energies;  ///< ascending
    Eigen::MatrixXcd states;   ///< column i is the eigenvector of energies(i)
    std::vector<Parity> parity_tags;
};

inline double hermiticity_residual(const Eigen::MatrixXcd& A) {
    return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

/// Parity class of a vector from its weight on even and odd m; MixedParity when both exceed tol.
inline Parity parity_of(const Eigen::VectorXcd& v, double tol = 1e-8) {
    double we = 0.0, wo = 0.0;
    for (Eigen::Index m = 0; m < v.size(); ++m) (m % 2 ? wo : we) += std::norm(v(m));
    const double tot = we + wo;
    if (std::min(we, wo) > tol * tot) throw MixedParity("eigenvector has weight in both parity classes");
    return we >= wo ? Parity::even : Parity::odd;
}

/**
 * Cyclic Jacobi diagonalization of a complex Hermitian matrix.
 *
 * Each rotation first removes the phase of A(p,q) with a diagonal unitary
 * and then applies a real plane rotation. Pairs with A(p,q) == 0 are never
 * touched, so exact block structure (such as m-parity) is preserved.
 */
inline SpectrumResult eigensolve(const Eigen::MatrixXcd& H) {
    const int n = static_cast<int>(H.rows());
    if (H.cols() != n) throw ParamError("eigensolve needs a square matrix");
    const double hnorm = n ? H.cwiseAbs().maxCoeff() : 0.0;
    if (n && hermiticity_residual(H) > 1e-8 * std::max(hnorm, 1e-300))
        throw NonHermitianInput("matrix is not Hermitian");
    Eigen::MatrixXcd A = (H + H.adjoint()) / 2.0;
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Identity(n, n);
    const double fro = A.norm();
    double prev = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(A(p, q));
        off = std::sqrt(off);
        // Stop at the round-off floor: tiny, or no longer shrinking once small.
        if (off <= 1e-16 * fro || (off <= 1e-12 * fro && off >= 0.5 * prev)) break;
        prev = off;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = A(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) continue;
                const cplx ph = apq / r;
                const double app = A(p, p).real(), aqq = A(q, q).real();
                const double tau = (aqq - app) / (2.0 * r);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // V = diag(1, conj(ph)) * [[c, s], [-s, c]] on the (p, q) plane.
                const cplx vpp = c, vpq = s, vqp = -s * std::conj(ph), vqq = c * std::conj(ph);
                for (int k = 0; k < n; ++k) {
                    const cplx akp = A(k, p), akq = A(k, q);
                    A(k, p) = akp * vpp + akq * vqp;
                    A(k, q) = akp * vpq + akq * vqq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx apk = A(p, k), aqk = A(q, k);
                    A(p, k) = std::conj(vpp) * apk + std::conj(vqp) * aqk;
                    A(q, k) = std::conj(vpq) * apk + std::conj(vqq) * aqk;
                }
                A(p, q) = A(q, p) = 0.0;
                A(p, p) = A(p, p).real();
                A(q, q) = A(q, q).real();
                for (int k = 0; k < n; ++k) {
                    const cplx vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = vkp * vpp + vkq * vqp;
                    V(k, q) = vkp * vpq + vkq * vqq;
                }
            }
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return A(a, a).real() < A(b, b).real(); });
    SpectrumResult out;
    out.energies.resize(n);
    out.states.resize(n, n);
    for (int i = 0; i < n; ++i) {
        out.energies(i) = A(order[i], order[i]).real();
        out.states.col(i) = V.col(order[i]);
    }
    out.parity_tags.resize(n, Parity::even);
    return out;
}

struct ParitySplit {
    std::vector<double> even;
    std::vector<double> odd;
};

/**
 * Partition levels by m-parity support and tag them in place.
 *
 * A near-degenerate cluster holding a mixed vector is rotated to diagonalize
 * the parity operator inside the cluster. Pure clusters are left untouched so
 * their vectors stay exact eigenvectors.
 */
inline ParitySplit parity_split(SpectrumResult& r, SpinLabel label, double cluster_tol = 1e-8) {
    const int n = static_cast<int>(r.energies.size());
    if (n != label.dim()) throw ParamError("spectrum does not match the spin dimension");
    const double scale = n ? std::max(1.0, r.energies.cwiseAbs().maxCoeff()) : 1.0;
    Eigen::VectorXd parity(n);
    for (int m = 0; m < n; ++m) parity(m) = m % 2 ? -1.0 : 1.0;
    auto pure = [&](int i) {
        try {
            parity_of(r.states.col(i));
            return true;
        } catch (const MixedParity&) {
            return false;
        }
    };
    for (int a = 0; a < n;) {
        int b = a + 1;
        while (b < n && r.energies(b) - r.energies(b - 1) <= cluster_tol * scale) ++b;
        bool mixed = false;
        for (int i = a; i < b; ++i) mixed = mixed || !pure(i);
        if (b - a > 1 && mixed) {
            const Eigen::MatrixXcd V = r.states.middleCols(a, b - a);
            const Eigen::MatrixXcd Pc = V.adjoint() * parity.asDiagonal() * V;
            const SpectrumResult inner = eigensolve(Pc);
            r.states.middleCols(a, b - a) = V * inner.states;
        }
        a = b;
    }
    ParitySplit out;
    r.parity_tags.assign(n, Parity::even);
    for (int i = 0; i < n; ++i) {
        r.parity_tags[i] = parity_of(r.states.col(i));
        (r.parity_tags[i] == Parity::even ? out.even : out.odd).push_back(r.energies(i));
    }
    return out;
}

/// Diagonalize and tag in one call.
inline SpectrumResult oracle_spectrum(const ModelParams& m, SpinLabel label) {
    SpectrumResult r = eigensolve(hamiltonian_matrix(m, label));
    parity_split(r, label);
    return r;
}

} // namespace qes
