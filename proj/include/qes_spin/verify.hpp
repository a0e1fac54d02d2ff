#pragma once

#include "algebra.hpp"
#include "analysis.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "oracle.hpp"
#include "qes_engine.hpp"
#include "recursion.hpp"
#include "spin.hpp"

#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace qes {

enum class CheckStatus { pass, fail, skip };

inline const char* to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    default: return "skip";
    }
}

struct VerifyCheck {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    CheckStatus status = CheckStatus::pass;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;

    bool passed() const {
        return std::none_of(checks.begin(), checks.end(),
                            [](const VerifyCheck& c) { return c.status == CheckStatus::fail; });
    }
    const VerifyCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct VerifyOptions {
    Tolerances tol;
    int recursion_max_twice_j = 20; ///< recursion checks run for j <= 10
    int factorization_extra = 5;
    bool algebra = true;
};

namespace detail {

/// Max over pairs of |a_i - b_i| for two equally long lists sorted by (re, im).
inline double sorted_distance(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    sort_complex(a);
    sort_complex(b);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// |p(x)| against sum |c_i| |x|^i.
inline double relative_value(const CPoly& p, cplx x) {
    double s = 0.0, pw = 1.0;
    for (const auto& c : p) {
        s += std::abs(c) * pw;
        pw *= std::abs(x);
    }
    return s > 0.0 ? std::abs(horner(p, x)) / s : 0.0;
}

} // namespace detail

/**
 * Cross-oracle invariant suite for one model at one spin.
 *
 * Every check records its measured value and threshold. Checks whose
 * preconditions do not hold (recursion routes above the size limit, closed
 * forms for N >= 2, ...) are recorded as skipped.
 */
inline VerifyReport run_verify(const ModelParams& m, SpinLabel label, const VerifyOptions& opt = {}) {
    VerifyReport rep;
    const Tolerances& tol = opt.tol;
    auto add = [&](std::string name, double value, double threshold, std::string detail = {}) {
        const bool ok = value <= threshold;
        rep.checks.push_back({std::move(name), value, threshold, ok ? CheckStatus::pass : CheckStatus::fail,
                              std::move(detail)});
    };
    auto skip = [&](std::string name, std::string why) {
        rep.checks.push_back({std::move(name), 0.0, 0.0, CheckStatus::skip, std::move(why)});
    };
    // Failures inside one check are recorded rather than aborting the suite.
    auto guarded = [&](const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            rep.checks.push_back({name, std::numeric_limits<double>::infinity(), 0.0, CheckStatus::fail, e.what()});
        }
    };

    validate(m);
    const int dim = label.dim();
    const auto sectors = enumerate_sectors(label, 2);
    {
        int total = 0;
        for (const auto& s : sectors) total += s.dim();
        add("sectors.partition", std::abs(total - dim), 0.0);
    }

    if (opt.algebra) {
        guarded("algebra.commutators", [&] {
            const auto r = commutator_residuals(build_plsl2<boost::multiprecision::float128>(label, 2));
            add("algebra.commutators", std::max(r.r1, r.r2), 1e-9, "k=2, quad precision");
        });
    }

    // Oracle.
    const Eigen::MatrixXcd H = hamiltonian_matrix(m, label);
    SpectrumResult orc;
    double hnorm = 0.0;
    guarded("oracle.diagonalization", [&] {
        const double hmax = std::max(H.cwiseAbs().maxCoeff(), 1e-300);
        add("oracle.hermiticity", hermiticity_residual(H) / hmax, 1e-12);
        orc = eigensolve(H);
        const ParitySplit ps = parity_split(orc, label);
        hnorm = orc.energies.cwiseAbs().maxCoeff();
        const Eigen::MatrixXcd& V = orc.states;
        add("oracle.orthonormality",
            (V.adjoint() * V - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-10);
        double res = 0.0;
        for (int i = 0; i < dim; ++i) res = std::max(res, (H * V.col(i) - orc.energies(i) * V.col(i)).norm());
        add("oracle.eigen_residual", res / std::max(hnorm, 1e-300), 1e-9);
        int mismatch = 0;
        for (const auto& s : sectors) {
            const auto& block = s.p == 0 ? ps.even : ps.odd;
            mismatch += std::abs(static_cast<int>(block.size()) - s.dim());
        }
        add("oracle.parity_blocks", mismatch, 0.0);
    });
    std::vector<cplx> oracle_e;
    for (int i = 0; i < orc.energies.size(); ++i) oracle_e.push_back(orc.energies(i));

    // Engine.
    const HamiltonianSpec spec = to_spec(m, label);
    std::vector<SectorSolutions> eng;
    guarded("engine.solve", [&] { eng = solve_all_sectors(spec, label, tol); });
    if (eng.empty()) return rep;

    std::vector<cplx> engine_e;
    double imag_max = 0.0, bae_worst = 0.0, rt_worst = 0.0, phi_worst = 0.0, lead_worst = 0.0, sum_worst = 0.0;
    double support_worst = 0.0, spec_bae_worst = 0.0, proj_worst = 0.0, sphere_worst = 0.0;
    int not_applicable = 0, count_mismatch = 0;
    for (const auto& ss : eng) {
        const Sector& s = ss.op.sector;
        for (const auto& lv : ss.levels) {
            engine_e.push_back(lv.energy);
            imag_max = std::max(imag_max, std::abs(lv.energy.imag()));
            if (lv.bae_applicable) bae_worst = std::max(bae_worst, lv.bae_relative);
            else ++not_applicable;

            // Coefficient i is compared against e_{N-i}(|x|), its size before cancellation.
            const CPoly rebuilt = poly_from_roots(lv.bethe_roots);
            std::vector<cplx> mags;
            for (const auto& x : lv.bethe_roots) mags.push_back(-std::abs(x));
            const CPoly bound = poly_from_roots(mags);
            for (std::size_t i = 0; i < lv.phi_coeffs.size(); ++i) {
                const double d = std::abs(rebuilt.at(i) - lv.phi_coeffs[i]);
                const double a = std::max(std::abs(lv.phi_coeffs[i]), std::abs(bound.at(i)));
                rt_worst = std::max(rt_worst, a > 0.0 ? d / a : d);
            }
            for (const auto& x : lv.bethe_roots) phi_worst = std::max(phi_worst, detail::relative_value(lv.phi_coeffs, x));

            // Leading order: sum of roots from phi, then the energy formula.
            if (s.cap_n >= 1) {
                cplx sum = 0.0;
                double sabs = 0.0;
                for (const auto& x : lv.bethe_roots) {
                    sum += x;
                    sabs += std::abs(x);
                }
                const cplx from_phi = -lv.phi_coeffs[s.cap_n - 1];
                sum_worst = std::max(sum_worst, std::abs(from_phi - sum) / std::max(sabs, 1e-300));
            }
            {
                const cplx e = energy_from_roots(lv.bethe_roots, spec, s, label);
                double scale = std::abs(spec.c_star);
                const double top = s.k * s.cap_n + s.p - 0.5 * label.twice_j;
                double pw = 1.0;
                for (int i = 1; i <= spec.k; ++i) {
                    pw *= std::abs(top);
                    scale += std::abs(spec.c_s[i - 1]) * pw;
                }
                double f = 1.0, sabs = 0.0;
                for (int i = 1; i <= spec.k; ++i) f *= label.twice_j - s.p - i + 1 - s.k * (s.cap_n - 1);
                for (const auto& x : lv.bethe_roots) sabs += std::abs(x);
                scale += std::abs(spec.c_plus) * std::abs(f) * sabs;
                scale = std::max({scale, std::abs(lv.energy), 1e-300});
                lead_worst = std::max(lead_worst, std::abs(e - lv.energy) / scale);
            }

            for (int mm = 0; mm < dim; ++mm)
                if ((mm - s.p) % s.k != 0) support_worst = std::max(support_worst, std::abs(lv.amplitudes(mm)));

            if (lv.bae_applicable && !lv.bethe_roots.empty()) {
                const BaeTerms gen = bae_terms(lv.bethe_roots, ss.op, tol.collide);
                const ModelBae sp = model_bae_terms(m, label, s, lv.bethe_roots, tol.collide);
                for (std::size_t a = 0; a < lv.bethe_roots.size(); ++a) {
                    const double d = std::abs(sp.value[a] * sp.denominator[a] - gen.value[a]);
                    spec_bae_worst = std::max(spec_bae_worst, d / std::max(gen.scale[a], 1e-300));
                }
            }

            const auto pts = constellation(lv);
            if (static_cast<int>(pts.size()) != s.p + s.k * s.cap_n) ++count_mismatch;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const auto& p = pts[i];
                sphere_worst = std::max(sphere_worst, std::abs(p.x * p.x + p.y * p.y + p.z * p.z - 1.0));
                const cplx z = lv.z_zeros[i];
                if (std::abs(z) <= 1e6)
                    proj_worst = std::max(proj_worst, std::abs(unproject(p) - z) / std::max(1.0, std::abs(z)));
            }
        }
    }
    const double rho = std::max(hnorm, 1e-300);
    if (!oracle_e.empty()) add("engine.vs_oracle", detail::sorted_distance(engine_e, oracle_e), tol.spectrum);
    add("engine.real_energies", imag_max / rho, 1e-9);
    add("engine.bae_relative", bae_worst, tol.bae,
        not_applicable ? std::to_string(not_applicable) + " level(s) with colliding roots" : std::string());
    add("engine.root_roundtrip", rt_worst, tol.roundtrip);
    add("engine.phi_at_roots", phi_worst, 1e-8);
    add("engine.root_sum", sum_worst, 1e-8);
    add("engine.energy_from_roots", lead_worst, 1e-8);
    add("engine.amplitude_support", support_worst, 0.0);
    add("models.specialized_bae", spec_bae_worst, 1e-9);
    add("analysis.constellation_count", count_mismatch, 0.0);
    add("analysis.unit_sphere", sphere_worst, 1e-12);
    add("analysis.projection_roundtrip", proj_worst, 1e-12);

    // Closed forms.
    {
        double worst = 0.0;
        int compared = 0;
        for (const auto& ss : eng) {
            std::vector<GoldenLevel> gold;
            try {
                gold = golden_levels(m, label, ss.op.sector);
            } catch (const Unsupported&) {
                continue;
            } catch (const ParamError&) {
                continue;
            }
            std::vector<cplx> ge, ee;
            for (const auto& g : gold) ge.push_back(g.energy);
            for (const auto& lv : ss.levels) ee.push_back(lv.energy);
            double gs = 1e-300;
            for (const auto& g : ge) gs = std::max(gs, std::abs(g));
            worst = std::max(worst, detail::sorted_distance(ge, ee) / gs);
            ++compared;
        }
        if (compared) add("models.golden", worst, 1e-10);
        else skip("models.golden", "no tabulated sector at this spin");
    }

    if (std::holds_alternative<TwoAxis>(m)) {
        double re = 0.0;
        for (const auto& ss : eng)
            for (const auto& lv : ss.levels)
                for (const auto& x : lv.bethe_roots) re = std::max(re, std::abs(x.real()));
        add("models.two_axis_imaginary_roots", re, 1e-8);
        std::vector<cplx> e = engine_e;
        sort_complex(e);
        double anti = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) anti = std::max(anti, std::abs(e[i] + e[e.size() - 1 - i]));
        add("models.two_axis_antisymmetry", anti, 1e-8);
    }

    // Recursion route.
    if (label.twice_j > opt.recursion_max_twice_j) {
        for (const char* n : {"recursion.vs_oracle", "recursion.vs_engine", "recursion.factorization",
                              "recursion.truncation", "recursion.degree_law"})
            skip(n, "recursion checks are limited to 2j <= " + std::to_string(opt.recursion_max_twice_j));
        return rep;
    }
    guarded("recursion", [&] {
        const CriticalZeros cz = critical_zeros(m, label);
        std::vector<cplx> all = cz.even_sector;
        all.insert(all.end(), cz.odd_sector.begin(), cz.odd_sector.end());
        add("recursion.vs_oracle", detail::sorted_distance(all, oracle_e), 1e-7,
            cz.complex_zero ? "complex zero flagged" : "");
        double sec = 0.0;
        for (const auto& ss : eng) {
            std::vector<cplx> ee;
            for (const auto& lv : ss.levels) ee.push_back(lv.energy);
            sec = std::max(sec, detail::sorted_distance(ee, ss.op.sector.p == 0 ? cz.even_sector : cz.odd_sector));
        }
        add("recursion.vs_engine", sec, 1e-7);
        add("recursion.factorization", factorization_check(m, label, opt.factorization_extra), 1e-8);
        double tr = 0.0;
        const int lmax = label.twice_j + 2 + 2 * opt.factorization_extra;
        double escale = 0.0;
        for (const auto& e : all) escale = std::max(escale, std::abs(e));
        for (const auto& e : cz.even_sector)
            tr = std::max(tr, truncation_residual(m, label, e, Parity::even, lmax, escale));
        for (const auto& e : cz.odd_sector)
            tr = std::max(tr, truncation_residual(m, label, e, Parity::odd, lmax, escale));
        add("recursion.truncation", tr, 1e-8);
        const auto pair = critical_pair(m, label);
        const int deg = degree(pair.p_even_sector.coeffs) + degree(pair.p_odd_sector.coeffs);
        add("recursion.degree_law", std::abs(deg - dim), 0.0);
    });
    return rep;
}

} // namespace qes
