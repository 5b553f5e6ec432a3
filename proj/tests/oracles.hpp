#pragma once

// Independent oracles for the closed-form library values, derived a different
// way than the library computes them and evaluated in extended precision.

#include <utility>
#include <vector>

namespace oracle {

/// Effective conductivity of a concentric-sphere assemblage by explicit
/// dipole-coefficient propagation. Each shell is (conductivity, outer
/// radius), innermost first. Inside shell k the potential under a unit
/// applied field is (A r + B / r^2) cos(theta); continuity of potential and
/// of normal current across each interface propagates (A, B) outward, and
/// the assemblage value is the conductivity of the homogeneous sphere with
/// the same exterior dipole response.
inline long double coated_sphere_sigma(
    const std::vector<std::pair<long double, long double>>& shells) {
    long double A = 1.0L, B = 0.0L;
    for (std::size_t k = 0; k + 1 < shells.size(); ++k) {
        const long double R = shells[k].second;
        const long double s_in = shells[k].first;
        const long double s_out = shells[k + 1].first;
        const long double R3 = R * R * R;
        const long double P = A + B / R3;                      // potential match
        const long double Q = (s_in / s_out) * (A - 2 * B / R3);  // current match
        A = (2 * P + Q) / 3;
        B = R3 * (P - Q) / 3;
    }
    const long double r3 = shells.back().second;
    const long double s3 = shells.back().first;
    const long double r33 = r3 * r3 * r3;
    return s3 * (A - 2 * B / r33) / (A + B / r33);
}

/// Two-phase coated-sphere value in the variational form (matrix plus a
/// single-fraction correction), algebraically distinct from the nested form
/// used by the library.
inline long double alt_reference_form(long double s1, long double s3, long double t1) {
    if (s1 == s3) return s3;
    return s3 + t1 / (1 / (s1 - s3) + (1 - t1) / (3 * s3));
}

}  // namespace oracle
