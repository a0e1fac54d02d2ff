#include <catch_amalgamated.hpp>

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <qes_spin/models.hpp>
#include <qes_spin/oracle.hpp>

using namespace qes;
namespace qt = qes::testing;

namespace {

double param_scale(const ModelParams& m) {
    if (auto* l = std::get_if<Lmg>(&m)) return std::max(std::abs(l->delta), std::abs(l->g));
    if (auto* r = std::get_if<Rotor>(&m)) return std::max({std::abs(r->a), std::abs(r->b), std::abs(r->c)});
    return std::abs(std::get<TwoAxis>(m).chi);
}

/// Closed-form spectra for 2j = 0..3 and the odd sector of 2j = 4, typed from the formulas.
std::vector<double> closed_form(const ModelParams& m, int tj) {
    std::vector<double> e;
    if (auto* l = std::get_if<Lmg>(&m)) {
        const double D = l->delta, g = l->g;
        const double s4 = std::sqrt(D * D + 4 * g * g), s12 = std::sqrt(D * D + 12 * g * g),
                     s36 = std::sqrt(D * D + 36 * g * g);
        switch (tj) {
        case 0: e = {0.0}; break;
        case 1: e = {-D / 2, D / 2}; break;
        case 2: e = {-s4, 0.0, s4}; break;
        case 3: e = {-D / 2 - s12, -D / 2 + s12, D / 2 - s12, D / 2 + s12}; break;
        case 4: e = {-s36, s36}; break;
        }
    } else if (auto* r = std::get_if<Rotor>(&m)) {
        const double a = r->a, b = r->b, c = r->c;
        const double R = std::sqrt(a * a + b * b + c * c - a * b - b * c - a * c);
        switch (tj) {
        case 0: e = {0.0}; break;
        case 1: e = {(a + b + c) / 4, (a + b + c) / 4}; break;
        case 2: e = {a + b, a + c, b + c}; break;
        case 3: {
            const double mid = 5 * (a + b + c) / 4;
            e = {mid - R, mid - R, mid + R, mid + R};
            break;
        }
        }
    } else {
        const double x = std::get<TwoAxis>(m).chi, r3 = std::sqrt(3.0);
        switch (tj) {
        case 0: e = {0.0}; break;
        case 1: e = {0.0, 0.0}; break;
        case 2: e = {-x, 0.0, x}; break;
        case 3: e = {-r3 * x, -r3 * x, r3 * x, r3 * x}; break;
        case 4: e = {-3 * x, 3 * x}; break;
        }
    }
    std::sort(e.begin(), e.end());
    return e;
}

/// psi(z) = z^p phi(z^k), monic ascending coefficients.
CPoly psi_of(const QesSolution& sol) {
    const Sector& s = sol.sector;
    CPoly out(static_cast<std::size_t>(s.p + s.k * s.cap_n) + 1, cplx(0.0));
    for (int n = 0; n <= s.cap_n; ++n) out[s.p + s.k * n] = sol.phi_coeffs[n];
    return out;
}

} // namespace

TEST_CASE("model matrices equal the ladder-operator forms") {
    qt::Gen g(201);
    for (int trial = 0; trial < 60; ++trial) {
        const ModelParams m = g.model();
        const SpinLabel label = g.spin(20);
        const auto H = hamiltonian_matrix(m, label);
        const auto R = qt::ref_hamiltonian(m, label);
        CHECK((H - R).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, R.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("closed-form spectra at small spin, engine and table routes") {
    qt::Gen g(202);
    for (int trial = 0; trial < 30; ++trial) {
        const ModelParams m = g.model();
        const double scale = param_scale(m);
        for (int tj = 0; tj <= 3; ++tj) {
            const SpinLabel label{tj};
            const auto expect = closed_form(m, tj);
            const auto eng = qt::sorted_real(engine_energies(to_spec(m, label), label));
            INFO(model_name(m) << " 2j=" << tj);
            CHECK(qt::max_abs_diff(eng, expect) <= 1e-10 * scale);
            std::vector<cplx> table;
            for (const auto& s : enumerate_sectors(label, 2))
                for (const auto& lv : golden_levels(m, label, s)) table.push_back(lv.energy);
            CHECK(qt::max_abs_diff(qt::sorted_real(table), expect) <= 1e-10 * scale);
        }
        // 2j = 4: the odd sector has N = 1
        if (m.index() != 1) {
            const SpinLabel label{4};
            const Sector odd = enumerate_sectors(label, 2)[1];
            std::vector<cplx> table;
            for (const auto& lv : golden_levels(m, label, odd)) table.push_back(lv.energy);
            CHECK(qt::max_abs_diff(qt::sorted_real(table), closed_form(m, 4)) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("golden levels match engine energies and wavefunctions over random draws") {
    qt::Gen g(203);
    for (int trial = 0; trial < 100; ++trial) {
        const ModelParams m = g.model();
        const double scale = param_scale(m);
        for (int tj = 0; tj <= 5; ++tj) {
            const SpinLabel label{tj};
            const HamiltonianSpec spec = to_spec(m, label);
            for (const auto& s : enumerate_sectors(label, 2)) {
                if (s.cap_n >= 2) continue;
                const auto gold = golden_levels(m, label, s);
                const auto levels = quasi_exact_spectrum(assemble_ode(spec, s, label));
                REQUIRE(gold.size() == levels.size());
                for (const auto& gl : gold) {
                    double best = INFINITY;
                    const QesSolution* hit = nullptr;
                    for (const auto& sol : levels) {
                        const double d = std::abs(sol.energy - gl.energy);
                        if (d < best) {
                            best = d;
                            hit = &sol;
                        }
                    }
                    INFO(model_name(m) << " 2j=" << tj << " p=" << s.p);
                    CHECK(best <= 1e-10 * std::max(std::abs(gl.energy), scale));
                    const CPoly psi = psi_of(*hit);
                    REQUIRE(psi.size() == gl.psi.size());
                    for (std::size_t i = 0; i < psi.size(); ++i)
                        CHECK(std::abs(psi[i] - gl.psi[i]) <= 1e-9 * std::max(1.0, std::abs(gl.psi[i])));
                }
            }
        }
    }
}

TEST_CASE("golden table coverage and errors") {
    const SpinLabel label{6};
    const Sector s = enumerate_sectors(label, 2)[0];
    CHECK_THROWS_AS(golden_levels(Lmg{1.0, 1.0}, label, s), Unsupported);
    const SpinLabel two{2};
    CHECK_THROWS_AS(golden_levels(Lmg{1.0, 0.0}, two, enumerate_sectors(two, 2)[0]), ParamError);
    CHECK_THROWS_AS(to_spec(Rotor{1.0, 1.0, 0.0}, two), ParamError);
    CHECK_THROWS_AS(to_spec(TwoAxis{0.0}, two), ParamError);
}

TEST_CASE("assembled second-order coefficients equal the hand-derived model polynomials") {
    qt::Gen g(204);
    const cplx I(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const ModelParams m = g.model();
        const SpinLabel label{g.integer(2, 20)};
        const double j = label.j();
        for (const auto& s : enumerate_sectors(label, 2)) {
            const auto op = assemble_ode(to_spec(m, label), s, label);
            const double p = s.p;
            CPoly p2(4, cplx(0.0)), p1(3, cplx(0.0));
            if (auto* l = std::get_if<Lmg>(&m)) {
                p2 = {0.0, 4 * l->g, 0.0, 4 * l->g};
                p1 = {2 * l->g * (1 + 2 * p), 2 * l->delta, 2 * l->g * (3 - 4 * j + 2 * p)};
            } else if (auto* r = std::get_if<Rotor>(&m)) {
                const double a = r->a, b = r->b, c = r->c;
                p2 = {0.0, a - b, -2 * (a + b - 2 * c), a - b};
                p1 = {(a - b) / 2 * (1 + 2 * p), 2 * (2 * c - a - b) * (1 + p - j), (a - b) / 2 * (3 - 4 * j + 2 * p)};
            } else {
                const double chi = std::get<TwoAxis>(m).chi;
                p2 = {0.0, 2.0 * I * chi, 0.0, -2.0 * I * chi};
                p1 = {I * chi * (1 + 2 * p), 0.0, -I * chi * (3 - 4 * j + 2 * p)};
            }
            const double sc = std::max(1.0, param_scale(m) * j * j);
            auto close = [&](const CPoly& got, const CPoly& want) {
                for (std::size_t i = 0; i < std::max(got.size(), want.size()); ++i) {
                    const cplx x = i < got.size() ? got[i] : cplx(0), y = i < want.size() ? want[i] : cplx(0);
                    if (std::abs(x - y) > 1e-12 * sc) return false;
                }
                return true;
            };
            INFO(model_name(m) << " 2j=" << label.twice_j << " p=" << s.p);
            CHECK(close(op.coeff(2), p2));
            CHECK(close(op.coeff(1), p1));
        }
    }
}

TEST_CASE("specialized BAE times P2 equals the generic BAE on random roots") {
    qt::Gen g(205);
    for (int trial = 0; trial < 200; ++trial) {
        const ModelParams m = g.model();
        const SpinLabel label{g.integer(4, 24)};
        const auto sectors = enumerate_sectors(label, 2);
        const Sector s = sectors[g.integer(0, 1)];
        const auto op = assemble_ode(to_spec(m, label), s, label);
        const auto roots = g.distinct_points(s.cap_n, 2.0, 0.05);
        const auto gen = bae_terms(roots, op);
        const auto spec = model_bae_terms(m, label, s, roots);
        for (int i = 0; i < s.cap_n; ++i) {
            const cplx lhs = spec.value[i] * spec.denominator[i];
            CHECK(std::abs(lhs - gen.value[i]) <= 1e-10 * std::max(1.0, gen.scale[i]));
        }
    }
}

TEST_CASE("two-axis roots are purely imaginary and spectra are antisymmetric") {
    qt::Gen g(206);
    for (int trial = 0; trial < 10; ++trial) {
        const TwoAxis m{g.signed_uniform(0.1, 5.0)};
        const SpinLabel label{g.integer(1, 30)};
        const auto spec = to_spec(m, label);
        std::vector<double> e;
        for (const auto& sec : solve_all_sectors(spec, label))
            for (const auto& sol : sec.levels) {
                e.push_back(sol.energy.real());
                for (const auto& x : sol.bethe_roots)
                    CHECK(std::abs(x.real()) <= 1e-8 * std::max(1.0, std::abs(x)));
            }
        std::sort(e.begin(), e.end());
        for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] + e[e.size() - 1 - i]) <= 1e-8 * std::abs(m.chi));
    }
}

TEST_CASE("rotor levels with an exponentially small top component are still solved") {
    // The highest even-sector level of this rotor at 2j = 39 has a leading
    // component of about 1.7e-14 in the balanced basis.
    const ModelParams m = Rotor{1.0, 2.0, 3.0};
    const SpinLabel label{39};
    std::vector<double> e;
    for (const auto& sec : solve_all_sectors(to_spec(m, label), label))
        for (const auto& sol : sec.levels) {
            e.push_back(sol.energy.real());
            CHECK(sol.bae_applicable);
            CHECK(sol.bae_relative <= 1e-6);
        }
    std::sort(e.begin(), e.end());
    const auto ref = qt::ref_spectrum(m, label);
    CHECK(qt::max_abs_diff(e, ref) <= 1e-8 * qt::max_abs(ref));
}
