// Bethe roots of the LMG ground state and their sphere constellation.
//
//   demo_lmg_constellation [twice_j] [delta] [g]

#include <qes_spin/qes_spin.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    const qes::SpinLabel label{argc > 1 ? std::atoi(argv[1]) : 10};
    const double delta = argc > 2 ? std::atof(argv[2]) : 8.2;
    const double g = argc > 3 ? std::atof(argv[3]) : 1.8;
    const qes::ModelParams model = qes::Lmg{delta, g};

    const auto sectors = qes::solve_all_sectors(qes::to_spec(model, label), label);
    const qes::QesSolution* ground = nullptr;
    for (const auto& sec : sectors)
        for (const auto& sol : sec.levels)
            if (!ground || sol.energy.real() < ground->energy.real()) ground = &sol;

    std::printf("LMG j=%g delta=%g g=%g\n", label.j(), delta, g);
    std::printf("ground energy %.12g in the %s sector (N=%d), BAE relative residual %.2e\n", ground->energy.real(),
                ground->sector.p == 0 ? "even" : "odd", ground->sector.cap_n, ground->bae_relative);
    std::printf("%4s %14s %14s   %9s %9s %9s\n", "i", "Re z", "Im z", "X", "Y", "Z");
    const auto points = qes::constellation(*ground);
    for (std::size_t i = 0; i < points.size(); ++i)
        std::printf("%4zu %14.8f %14.8f   %9.5f %9.5f %9.5f\n", i, ground->z_zeros[i].real(), ground->z_zeros[i].imag(),
                    points[i].x, points[i].y, points[i].z);
    return 0;
}
