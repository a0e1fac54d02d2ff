#pragma once

#include "errors.hpp"
#include "models.hpp"
#include "oracle.hpp"
#include "qes_engine.hpp"
#include "spin.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace qes {

struct SpherePoint {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline SpherePoint north_pole() { return {0.0, 0.0, 1.0}; }

/**
 * Inverse stereographic projection, origin to the south pole:
 * (2 Re z, 2 Im z, |z|^2 - 1) / (|z|^2 + 1). Non-finite z maps to the north pole.
 *
 * For |z| > 1 the equivalent form in w = 1/z is used so large zeros keep
 * full relative accuracy.
 */
inline SpherePoint project(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return north_pole();
    const double r = std::abs(z);
    if (r <= 1.0) {
        const double n = r * r;
        return {2.0 * z.real() / (n + 1.0), 2.0 * z.imag() / (n + 1.0), (n - 1.0) / (n + 1.0)};
    }
    const cplx w = 1.0 / z;
    const double n = std::norm(w);
    return {2.0 * w.real() / (n + 1.0), -2.0 * w.imag() / (n + 1.0), (1.0 - n) / (1.0 + n)};
}

/// Inverse of project; the north pole has no finite preimage and returns infinity.
inline cplx unproject(const SpherePoint& p) {
    if (p.z <= 0.0) return cplx(p.x, p.y) / (1.0 - p.z);
    const cplx d(p.x, -p.y);
    if (d == cplx(0.0)) return cplx(std::numeric_limits<double>::infinity(), 0.0);
    return (1.0 + p.z) / d;
}

/// Sphere points of a level: its z-plane zeros by default, or the x-plane Bethe roots.
inline std::vector<SpherePoint> constellation(const QesSolution& sol, bool x_roots = false) {
    const auto& src = x_roots ? sol.bethe_roots : sol.z_zeros;
    std::vector<SpherePoint> out;
    out.reserve(src.size());
    for (const auto& z : src) out.push_back(project(z));
    return out;
}

// ---------------------------------------------------------------------------

/**
 * One-parameter family of model parameters.
 *
 * `param` names the scanned field. For LMG an optional coupled_sum ties the
 * other coupling to it, e.g. delta = coupled_sum - g.
 */
struct ModelFamily {
    ModelParams base;
    std::string param;
    std::optional<double> coupled_sum;

    ModelParams at(double v) const { return with(v, false); }

    /// Parameters whose Hamiltonian is dH/dparam (all three models are linear in their couplings).
    ModelParams tangent() const { return with(1.0, true); }

private:
    ModelParams with(double v, bool derivative) const {
        ModelParams m = base;
        const double other = coupled_sum ? (derivative ? -v : *coupled_sum - v) : 0.0;
        if (auto* l = std::get_if<Lmg>(&m)) {
            if (derivative) *l = Lmg{0.0, 0.0};
            if (param == "g") {
                l->g = v;
                if (coupled_sum) l->delta = other;
            } else if (param == "delta") {
                l->delta = v;
                if (coupled_sum) l->g = other;
            } else {
                throw ParamError("LMG has no parameter '" + param + "'");
            }
        } else if (auto* r = std::get_if<Rotor>(&m)) {
            if (coupled_sum) throw ParamError("coupled scans are only defined for LMG");
            if (derivative) *r = Rotor{0.0, 0.0, 0.0};
            if (param == "a") r->a = v;
            else if (param == "b") r->b = v;
            else if (param == "c") r->c = v;
            else throw ParamError("rotor has no parameter '" + param + "'");
        } else {
            if (coupled_sum) throw ParamError("coupled scans are only defined for LMG");
            if (param != "chi") throw ParamError("two-axis has no parameter '" + param + "'");
            std::get<TwoAxis>(m).chi = v;
        }
        return m;
    }
};

/// Ground state with the parity tie-break used by the fidelity.
struct GroundState {
    double energy = 0.0;
    Eigen::VectorXcd state;
    Parity parity = Parity::even;
    bool tie_break = false;      ///< the even state was chosen inside a near-degenerate pair
    double lowest_gap = 0.0;     ///< |E0(even) - E0(odd)|
    double min_parity_gap = 0.0; ///< smallest |E_i(even) - E_i(odd)| over the lowest pairs
    double h_norm = 0.0;         ///< spectral radius max |E|
};

/**
 * Oracle ground state.
 *
 * If the lowest even and odd levels lie within degeneracy_tol * h_norm the
 * even one is taken; otherwise the lowest level overall.
 */
inline GroundState ground_state(const ModelParams& m, SpinLabel label, double degeneracy_tol = 1e-3,
                                int gap_pairs = 4) {
    SpectrumResult r = eigensolve(hamiltonian_matrix(m, label));
    const ParitySplit ps = parity_split(r, label);
    GroundState g;
    const int n = static_cast<int>(r.energies.size());
    g.h_norm = n ? r.energies.cwiseAbs().maxCoeff() : 0.0;
    int lowest_even = -1;
    for (int i = 0; i < n; ++i)
        if (r.parity_tags[i] == Parity::even) {
            lowest_even = i;
            break;
        }
    int pick = 0;
    if (!ps.odd.empty() && !ps.even.empty()) {
        g.lowest_gap = std::abs(ps.even[0] - ps.odd[0]);
        if (g.lowest_gap <= degeneracy_tol * g.h_norm) {
            pick = lowest_even;
            g.tie_break = true;
        }
        g.min_parity_gap = std::numeric_limits<double>::infinity();
        const int pairs = std::min({gap_pairs, static_cast<int>(ps.even.size()), static_cast<int>(ps.odd.size())});
        for (int i = 0; i < pairs; ++i) g.min_parity_gap = std::min(g.min_parity_gap, std::abs(ps.even[i] - ps.odd[i]));
    }
    g.energy = r.energies(pick);
    g.state = r.states.col(pick);
    g.parity = r.parity_tags[pick];
    return g;
}

/// <psi0| dH/dparam |psi0> at one family point.
inline double hellmann_feynman(const ModelFamily& fam, SpinLabel label, double v, double degeneracy_tol = 1e-3) {
    const GroundState g = ground_state(fam.at(v), label, degeneracy_tol);
    const Eigen::MatrixXcd dH = hamiltonian_matrix(fam.tangent(), label);
    return (g.state.adjoint() * dH * g.state)(0, 0).real();
}

struct ScanRow {
    double param = 0.0;
    double ground_energy = 0.0;
    double fidelity = 1.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double min_parity_gap = 0.0;
    double lowest_parity_gap = 0.0;
    double h_norm = 0.0;
    Parity ground_parity = Parity::even;
};

struct ScanOptions {
    std::optional<double> delta; ///< fidelity half-separation; default half the grid step
    std::optional<double> h;     ///< finite-difference step; default 1e-3 of the grid span
    int gap_pairs = 4;
    double degeneracy_tol = 1e-3;
    bool fidelity = true;
    bool derivatives = true;
    unsigned threads = 0; ///< 0: QES_SPIN_THREADS, else hardware concurrency
};

/// Worker count from QES_SPIN_THREADS when set to a positive integer, else the hardware count.
inline unsigned worker_count(unsigned requested = 0) {
    if (requested) return requested;
    if (const char* env = std::getenv("QES_SPIN_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(i) for i in [0, n) on a bounded pool; the first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    if (w <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < w; ++t) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
}

inline void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw GridError("empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw GridError("grid must be strictly increasing");
}

/// Evenly spaced grid from..to with count >= 2 points.
inline std::vector<double> linspace(double from, double to, int count) {
    if (count < 2) throw GridError("grid needs at least two points");
    if (!(to > from)) throw GridError("grid end must exceed its start");
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = from + (to - from) * i / (count - 1);
    return g;
}

/**
 * All ScanRow columns over a grid, rows in grid order.
 *
 * Fidelity F = |<psi0(v - delta)|psi0(v + delta)>|, with both points clamped
 * to [grid.front(), grid.back()] so the scan never leaves the requested range.
 * Derivatives by central differences of the oracle ground energy with step h.
 */
inline std::vector<ScanRow> scan(const ModelFamily& fam, SpinLabel label, const std::vector<double>& grid,
                                 const ScanOptions& opt = {}) {
    check_grid(grid);
    const double step = grid.size() > 1 ? (grid.back() - grid.front()) / (grid.size() - 1) : 0.0;
    const double delta = opt.delta.value_or(step / 2.0);
    const double h = opt.h.value_or(1e-3 * (grid.back() - grid.front()));
    if (opt.fidelity && !(delta > 0.0)) throw GridError("fidelity separation must be positive");
    if (opt.derivatives && !(h > 0.0)) throw GridError("finite-difference step must be positive");

    std::vector<ScanRow> rows(grid.size());
    parallel_for(grid.size(), worker_count(opt.threads), [&](std::size_t i) {
        const double v = grid[i];
        const GroundState g = ground_state(fam.at(v), label, opt.degeneracy_tol, opt.gap_pairs);
        ScanRow row;
        row.param = v;
        row.ground_energy = g.energy;
        row.min_parity_gap = g.min_parity_gap;
        row.lowest_parity_gap = g.lowest_gap;
        row.h_norm = g.h_norm;
        row.ground_parity = g.parity;
        if (opt.fidelity) {
            double a = v - delta, b = v + delta;
            if (grid.size() > 1) {
                a = std::max(a, grid.front());
                b = std::min(b, grid.back());
            }
            const GroundState lo = ground_state(fam.at(a), label, opt.degeneracy_tol);
            const GroundState hi = ground_state(fam.at(b), label, opt.degeneracy_tol);
            row.fidelity = std::abs(lo.state.dot(hi.state));
        }
        if (opt.derivatives) {
            const double ep = ground_state(fam.at(v + h), label, opt.degeneracy_tol).energy;
            const double em = ground_state(fam.at(v - h), label, opt.degeneracy_tol).energy;
            row.d1 = (ep - em) / (2.0 * h);
            row.d2 = (ep - 2.0 * g.energy + em) / (h * h);
        }
        rows[i] = row;
    });
    return rows;
}

inline std::vector<ScanRow> fidelity_scan(const ModelFamily& fam, SpinLabel label, const std::vector<double>& grid,
                                          double delta) {
    ScanOptions o;
    o.delta = delta;
    o.derivatives = false;
    return scan(fam, label, grid, o);
}

inline std::vector<ScanRow> derivative_scan(const ModelFamily& fam, SpinLabel label, const std::vector<double>& grid,
                                            double h) {
    ScanOptions o;
    o.h = h;
    o.fidelity = false;
    return scan(fam, label, grid, o);
}

inline std::vector<ScanRow> degeneracy_map(const ModelFamily& fam, SpinLabel label, const std::vector<double>& grid,
                                           int gap_pairs = 4) {
    ScanOptions o;
    o.fidelity = false;
    o.derivatives = false;
    o.gap_pairs = gap_pairs;
    return scan(fam, label, grid, o);
}

/// Grid value at the smallest fidelity (first occurrence).
inline double fidelity_minimum(const std::vector<ScanRow>& rows) {
    if (rows.empty()) throw GridError("empty scan");
    return std::min_element(rows.begin(), rows.end(),
                            [](const ScanRow& a, const ScanRow& b) { return a.fidelity < b.fidelity; })
        ->param;
}

} // namespace qes
