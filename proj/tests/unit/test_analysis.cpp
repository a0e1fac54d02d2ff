#include <catch_amalgamated.hpp>

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <qes_spin/analysis.hpp>

using namespace qes;
namespace qt = qes::testing;

TEST_CASE("projection landmarks") {
    const SpherePoint s = project(cplx(0.0));
    CHECK(s.z == -1.0);
    const SpherePoint e = project(cplx(0.0, 1.0));
    CHECK(e.y == Catch::Approx(1.0));
    CHECK(std::abs(e.z) < 1e-15);
    const SpherePoint n = project(cplx(INFINITY, 0.0));
    CHECK(n.z == 1.0);
    CHECK(std::isinf(unproject(north_pole()).real()));
}

TEST_CASE("projection lands on the unit sphere and round-trips for |z| up to 1e6") {
    qt::Gen g(501);
    for (int trial = 0; trial < 20000; ++trial) {
        const double r = std::pow(10.0, g.uniform(-8.0, 6.0));
        const cplx z = std::polar(r, g.uniform(-M_PI, M_PI));
        const SpherePoint p = project(z);
        CHECK(std::abs(p.x * p.x + p.y * p.y + p.z * p.z - 1.0) <= 1e-15 * 4);
        const cplx back = unproject(p);
        CHECK(std::abs(back - z) / std::max(1.0, std::abs(z)) <= 1e-12);
    }
}

TEST_CASE("constellations hold p + kN points") {
    qt::Gen g(502);
    for (int trial = 0; trial < 20; ++trial) {
        const ModelParams m = g.model();
        const SpinLabel label{g.integer(0, 16)};
        for (const auto& sec : solve_all_sectors(to_spec(m, label), label))
            for (const auto& sol : sec.levels) {
                const Sector& s = sol.sector;
                CHECK(static_cast<int>(constellation(sol).size()) == s.p + s.k * s.cap_n);
                CHECK(static_cast<int>(constellation(sol, true).size()) == s.cap_n);
            }
    }
}

TEST_CASE("model families set the scanned parameter and its tangent") {
    const ModelFamily lmg{Lmg{0.0, 0.0}, "g", 10.0};
    const auto at = std::get<Lmg>(lmg.at(1.5));
    CHECK(at.g == 1.5);
    CHECK(at.delta == 8.5);
    const auto t = std::get<Lmg>(lmg.tangent());
    CHECK(t.g == 1.0);
    CHECK(t.delta == -1.0);
    const ModelFamily rot{Rotor{20.0, 1.5, 0.0}, "c", std::nullopt};
    CHECK(std::get<Rotor>(rot.at(0.7)).c == 0.7);
    CHECK(std::get<Rotor>(rot.tangent()).a == 0.0);
    CHECK_THROWS_AS((ModelFamily{TwoAxis{1.0}, "g", std::nullopt}.at(1.0)), ParamError);
    CHECK_THROWS_AS((ModelFamily{Rotor{1.0, 2.0, 0.0}, "c", 3.0}.at(1.0)), ParamError);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(linspace(1.0, 0.5, 5), GridError);
    CHECK_THROWS_AS(linspace(0.0, 1.0, 1), GridError);
    CHECK_THROWS_AS(check_grid({0.0, 0.5, 0.4}), GridError);
    CHECK_THROWS_AS(check_grid({}), GridError);
    const auto g = linspace(0.0, 1.0, 5);
    CHECK(g.size() == 5);
    CHECK(g.back() == 1.0);
}

TEST_CASE("scan rows are in grid order and independent of the worker count") {
    const ModelFamily fam{Lmg{0.0, 0.0}, "g", 10.0};
    const auto grid = linspace(0.2, 2.5, 11);
    ScanOptions one, many;
    one.threads = 1;
    many.threads = 4;
    const auto a = scan(fam, SpinLabel{12}, grid, one);
    const auto b = scan(fam, SpinLabel{12}, grid, many);
    REQUIRE(a.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(a[i].param == grid[i]);
        CHECK(a[i].ground_energy == b[i].ground_energy);
        CHECK(a[i].fidelity == b[i].fidelity);
        CHECK(a[i].d2 == b[i].d2);
        CHECK(a[i].fidelity > 0.0);
        CHECK(a[i].fidelity <= 1.0 + 1e-12);
    }
}

TEST_CASE("ground state is the even member of a near-degenerate pair") {
    const GroundState g = ground_state(TwoAxis{1.0}, SpinLabel{9});
    CHECK(g.tie_break);
    CHECK(g.parity == Parity::even);
    CHECK(g.lowest_gap < 1e-10);
    const GroundState l = ground_state(Lmg{5.0, 0.1}, SpinLabel{8});
    CHECK_FALSE(l.tie_break);
    CHECK(l.energy == Catch::Approx(qt::ref_spectrum(Lmg{5.0, 0.1}, SpinLabel{8}).front()));
}

TEST_CASE("finite-difference d1 matches Hellmann-Feynman with second-order error") {
    const ModelFamily fam{Rotor{3.0, 1.0, 0.0}, "c", std::nullopt};
    const SpinLabel label{8};
    const double v = 0.8;
    const double hf = hellmann_feynman(fam, label, v);
    auto d1 = [&](double h) { return derivative_scan(fam, label, {v}, h).front().d1; };
    const double e1 = std::abs(d1(0.02) - hf), e2 = std::abs(d1(0.01) - hf);
    CHECK(e1 / e2 == Catch::Approx(4.0).epsilon(0.2));
}

TEST_CASE("two-axis ground state does not depend on chi") {
    const ModelFamily fam{TwoAxis{1.0}, "chi", std::nullopt};
    const auto rows = scan(fam, SpinLabel{10}, linspace(0.1, 5.0, 8));
    for (const auto& r : rows) {
        CHECK(std::abs(r.fidelity - 1.0) <= 1e-8);
        CHECK(r.d1 == Catch::Approx(rows.front().d1).epsilon(1e-6));
    }
    for (const auto& r : degeneracy_map(fam, SpinLabel{11}, linspace(0.1, 5.0, 8))) CHECK(r.min_parity_gap <= 1e-8);
}

TEST_CASE("fidelity minimum picks the first smallest row") {
    std::vector<ScanRow> rows(3);
    rows[0].param = 1.0;
    rows[0].fidelity = 0.9;
    rows[1].param = 2.0;
    rows[1].fidelity = 0.5;
    rows[2].param = 3.0;
    rows[2].fidelity = 0.5;
    CHECK(fidelity_minimum(rows) == 2.0);
    CHECK_THROWS_AS(fidelity_minimum({}), GridError);
}
