// Two-axis spectrum from the critical polynomials of the energy recursion,
// checked against direct diagonalization.
//
//   demo_two_axis_recursion [twice_j] [chi]

#include <qes_spin/qes_spin.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    const qes::SpinLabel label{argc > 1 ? std::atoi(argv[1]) : 9};
    const double chi = argc > 2 ? std::atof(argv[2]) : 1.0;
    const qes::ModelParams model = qes::TwoAxis{chi};

    const auto pair = qes::critical_pair(model, label);
    std::printf("two-axis j=%g chi=%g\n", label.j(), chi);
    std::printf("critical polynomials: P_%d (even sector, degree %zu), P_%d (odd sector, degree %zu)\n",
                pair.p_even_sector.index_l, pair.p_even_sector.coeffs.size() - 1, pair.p_odd_sector.index_l,
                pair.p_odd_sector.coeffs.size() - 1);
    std::printf("factorization remainder (5 further polynomials): %.2e\n", qes::factorization_check(model, label, 5));

    const auto cz = qes::critical_zeros(model, label);
    qes::SpectrumResult r = qes::eigensolve(qes::hamiltonian_matrix(model, label));
    const qes::ParitySplit ps = qes::parity_split(r, label);
    auto show = [](const char* name, std::vector<qes::cplx> zeros, const std::vector<double>& oracle) {
        qes::sort_complex(zeros);
        std::printf("%s sector\n%18s %18s %10s\n", name, "recursion", "diagonalization", "diff");
        for (std::size_t i = 0; i < zeros.size() && i < oracle.size(); ++i)
            std::printf("%18.10f %18.10f %10.2e\n", zeros[i].real(), oracle[i], std::abs(zeros[i].real() - oracle[i]));
    };
    show("even", cz.even_sector, ps.even);
    show("odd", cz.odd_sector, ps.odd);
    return 0;
}
