#pragma once

#include "errors.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace qes {

/// Spin j stored as the integer 2j.
struct SpinLabel {
    int twice_j = 0;

    SpinLabel() = default;
    explicit SpinLabel(int twice) : twice_j(twice) {
        if (twice < 0) throw ParamError("twice_j must be non-negative");
    }

    double j() const { return 0.5 * twice_j; }
    int dim() const { return twice_j + 1; }
    bool operator==(const SpinLabel&) const = default;
};

enum class Parity { even, odd };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

/**
 * One irreducible pl(sl(2)) block of V_j.
 *
 * The block holds the states m = p, p+k, ..., p+k*cap_n and satisfies
 * k*cap_n = 2j - p - q.
 */
struct Sector {
    int k = 1;
    int p = 0;
    int q = 0;
    int cap_n = 0;

    int dim() const { return cap_n + 1; }
    /// Basis index m (lowest-weight first) of the n-th sector state.
    int m_of(int n) const { return p + k * n; }
    bool operator==(const Sector&) const = default;
};

/// One sector per p = 0..min(k-1, 2j); q is solved for and must be unique.
inline std::vector<Sector> enumerate_sectors(SpinLabel label, int k) {
    if (k < 1) throw ParamError("deformation degree k must be positive");
    std::vector<Sector> out;
    const int tj = label.twice_j;
    for (int p = 0; p <= std::min(k - 1, tj); ++p) {
        int found = 0;
        Sector s{k, p, 0, 0};
        for (int q = 0; q < k; ++q) {
            const int rest = tj - p - q;
            if (rest >= 0 && rest % k == 0) {
                ++found;
                s.q = q;
                s.cap_n = rest / k;
            }
        }
        if (found != 1)
            throw AssemblyError("sector p=" + std::to_string(p) + " has " + std::to_string(found) +
                                " admissible q values");
        out.push_back(s);
    }
    return out;
}

/// The sector of V_j containing basis index m.
inline Sector sector_of(SpinLabel label, int k, int m) {
    if (m < 0 || m >= label.dim()) throw ParamError("basis index outside the representation");
    for (const auto& s : enumerate_sectors(label, k))
        if (m % k == s.p) return s;
    throw ParamError("basis index outside the representation");
}

} // namespace qes
