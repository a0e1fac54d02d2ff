// Fidelity and ground-energy derivatives of the rigid rotor across c.
//
//   demo_rotor_scan [twice_j] [points]

#include <qes_spin/qes_spin.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    const qes::SpinLabel label{argc > 1 ? std::atoi(argv[1]) : 40};
    const int points = argc > 2 ? std::atoi(argv[2]) : 30;
    const qes::ModelFamily family{qes::Rotor{20.0, 1.5, 0.0}, "c", std::nullopt};

    const auto rows = qes::scan(family, label, qes::linspace(0.1, 3.0, points));
    std::printf("rotor a=20 b=1.5, j=%g\n", label.j());
    std::printf("%8s %16s %12s %12s %12s %12s\n", "c", "E0", "fidelity", "d1", "d2", "gap/|H|");
    for (const auto& r : rows)
        std::printf("%8.4f %16.8f %12.8f %12.6f %12.4f %12.3e\n", r.param, r.ground_energy, r.fidelity, r.d1, r.d2,
                    r.lowest_parity_gap / r.h_norm);
    std::printf("fidelity minimum at c = %.4f\n", qes::fidelity_minimum(rows));
    return 0;
}
