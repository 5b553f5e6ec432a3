#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "interphase/util.hpp"

namespace interphase {

/// A doubly coated sphere: core of conductivity sigma1 and radius r1, a thin
/// coating (the interphase) of conductivity sigma2 out to r2, and an outer
/// shell of conductivity sigma3 out to r3. An assemblage of scaled copies of
/// this sphere fills space and has an exactly computable isotropic effective
/// conductivity.
struct AssemblageSpec {
    double r1, r2, r3;
    double sigma1, sigma2, sigma3;

    AssemblageSpec(double r1_, double r2_, double r3_, double s1, double s2, double s3)
        : r1(r1_), r2(r2_), r3(r3_), sigma1(s1), sigma2(s2), sigma3(s3) {
        require(std::isfinite(r1) && std::isfinite(r2) && std::isfinite(r3),
                "assemblage radii must be finite");
        require(r1 > 0 && r1 <= r2 && r2 <= r3, "assemblage radii must satisfy 0 < r1 <= r2 <= r3");
        require(std::isfinite(s1) && std::isfinite(s2) && std::isfinite(s3) && s1 > 0 &&
                    s2 > 0 && s3 > 0,
                "assemblage conductivities must be positive");
    }

    /// Interphase thickness h = r2 - r1.
    double interphase_thickness() const { return r2 - r1; }
};

struct VolumeFractions {
    double theta1, theta2, theta3;
};

/// Volume fractions of core, interphase, and outer shell.
inline VolumeFractions volume_fractions(const AssemblageSpec& spec) {
    double c1 = std::pow(spec.r1 / spec.r3, 3);
    double c2 = std::pow(spec.r2 / spec.r3, 3);
    return {c1, c2 - c1, 1.0 - c2};
}

/// Interphase outer radius r2 for a prescribed interphase volume fraction.
inline double radius_from_fraction(double r1, double r3, double theta2) {
    require(r1 > 0 && r3 >= r1, "radii must satisfy 0 < r1 <= r3");
    double theta2_max = 1.0 - std::pow(r1 / r3, 3);
    require(theta2 >= 0 && theta2 <= theta2_max + 1e-15,
            "interphase fraction outside feasible range");
    return std::cbrt(theta2 * r3 * r3 * r3 + r1 * r1 * r1);
}

/// Effective conductivity of the reference composite: a coated-sphere
/// assemblage with core sigma1 (fraction theta1) and shell sigma3, no
/// interphase. The sigma1 == sigma3 singularity of the printed form is a
/// removable homogeneous limit and returns sigma3.
inline double reference_sigma_star(double sigma1, double sigma3, double theta1) {
    require(sigma1 > 0 && sigma3 > 0, "conductivities must be positive");
    require(theta1 >= 0 && theta1 <= 1, "core fraction must lie in [0, 1]");
    if (sigma1 == sigma3) return sigma3;
    return sigma3 + 3.0 * sigma3 * theta1 / (1.0 - theta1 - 3.0 * sigma3 / (sigma3 - sigma1));
}

/// Exact effective conductivity of the doubly-coated-sphere assemblage, as a
/// nested continued fraction in the fractions theta1, theta2. The
/// sigma2 == sigma1 singularity of the printed formula is removable: the core
/// and interphase merge into a single core of fraction theta1 + theta2.
inline double exact_sigma_star(double sigma1, double sigma2, double sigma3, double theta1,
                               double theta2) {
    require(sigma1 > 0 && sigma2 > 0 && sigma3 > 0, "conductivities must be positive");
    require(theta1 >= 0 && theta2 >= 0 && theta1 + theta2 <= 1 + 1e-15,
            "fractions must be nonnegative and sum to at most 1");
    if (sigma2 == sigma1) return reference_sigma_star(sigma1, sigma3, theta1 + theta2);
    double theta3 = 1.0 - theta1 - theta2;
    double a = theta2 - 3.0 * sigma2 * (1.0 - theta3) / (sigma2 - sigma1);
    if (a == 0) throw std::domain_error("exact effective conductivity: zero inner denominator");
    double b = sigma3 - sigma2 - 3.0 * sigma2 * theta1 / a;
    if (b == 0) throw std::domain_error("exact effective conductivity: zero inner denominator");
    double c = theta3 - 3.0 * sigma3 / b;
    if (c == 0) throw std::domain_error("exact effective conductivity: zero outer denominator");
    double result = sigma3 + 3.0 * sigma3 * (1.0 - theta3) / c;
    if (!std::isfinite(result))
        throw std::domain_error("exact effective conductivity: formula not finite here");
    return result;
}

inline double exact_sigma_star(const AssemblageSpec& spec) {
    auto f = volume_fractions(spec);
    return exact_sigma_star(spec.sigma1, spec.sigma2, spec.sigma3, f.theta1, f.theta2);
}

/// First-order change of the assemblage effective conductivity in the
/// interphase thickness h, from the closed-form derivative of the exact
/// formula at h = 0. Exactly linear in h. Singular as sigma2 -> 0 (the layer
/// becomes insulating and the expansion in h breaks down).
inline double delta_sigma_first_order(double sigma1, double sigma2, double sigma3,
                                      double theta1, double r1, double h) {
    if (!(sigma2 > 0)) throw std::domain_error("interphase conductivity must be positive");
    require(sigma1 > 0 && sigma3 > 0, "conductivities must be positive");
    require(r1 > 0, "core radius must be positive");
    require(h >= 0, "thickness must be nonnegative");
    double num = -9.0 * sigma3 * theta1 * (sigma3 - sigma2) *
                 (sigma1 * sigma1 + 2.0 * sigma2 * sigma3);
    double d = (sigma3 - sigma1) * theta1 + sigma1 + 2.0 * sigma3;
    double den = r1 * sigma2 * d * d;
    return h * num / den;
}

/// First-order approximation of the assemblage effective conductivity:
/// the reference value plus the first-order thickness correction.
inline double approx_sigma_star(double sigma1, double sigma2, double sigma3, double theta1,
                                double r1, double h) {
    return reference_sigma_star(sigma1, sigma3, theta1) +
           delta_sigma_first_order(sigma1, sigma2, sigma3, theta1, r1, h);
}

inline double approx_sigma_star(const AssemblageSpec& spec) {
    auto f = volume_fractions(spec);
    return approx_sigma_star(spec.sigma1, spec.sigma2, spec.sigma3, f.theta1, spec.r1,
                             spec.interphase_thickness());
}

/// Highly conducting thin-interphase limit: theta2 -> 0 with the product
/// theta2 * sigma2 held constant. theta3 is the shell fraction in the limit.
inline double high_contrast_limit(double sigma1, double sigma3, double theta3,
                                  double product_theta2_sigma2) {
    require(sigma1 > 0 && sigma3 > 0, "conductivities must be positive");
    require(theta3 > 0 && theta3 <= 1, "shell fraction must lie in (0, 1]");
    require(product_theta2_sigma2 >= 0, "conductance product must be nonnegative");
    if (theta3 == 1.0) return sigma3;  // no core and no interphase
    double inner = sigma3 - sigma1 - 2.0 * product_theta2_sigma2 / (3.0 * (1.0 - theta3));
    double c = theta3 - 3.0 * sigma3 / inner;
    double result = sigma3 + 3.0 * (1.0 - theta3) * sigma3 / c;
    if (std::isnan(result))
        throw std::domain_error("high-contrast limit: zero denominator");
    return result;
}

/// Poorly conducting thin-interphase limit: theta2 -> 0 with the ratio
/// sigma2 / theta2 held constant. An infinite ratio drops the interfacial
/// resistance term entirely.
inline double low_contrast_limit(double sigma1, double sigma3, double theta3,
                                 double ratio_sigma2_over_theta2) {
    require(sigma1 > 0 && sigma3 > 0, "conductivities must be positive");
    require(theta3 > 0 && theta3 <= 1, "shell fraction must lie in (0, 1]");
    require(ratio_sigma2_over_theta2 > 0, "resistance ratio must be positive");
    double term = std::isinf(ratio_sigma2_over_theta2)
                      ? 0.0
                      : 1.0 / ((1.0 - theta3) * ratio_sigma2_over_theta2);
    double inner = sigma3 - 3.0 / (3.0 / sigma1 + term);
    double c = theta3 - 3.0 * sigma3 / inner;
    double result = sigma3 + 3.0 * (1.0 - theta3) * sigma3 / c;
    if (std::isnan(result))
        throw std::domain_error("low-contrast limit: zero denominator");
    return result;
}

enum class LayerOrientation { Parallel, Perpendicular };

/// Effective conductivity of a simple laminate: the arithmetic mean of the
/// layer conductivities for fields parallel to the layers, the harmonic mean
/// for fields perpendicular to them.
inline double laminate_sigma_star(const std::vector<double>& conductivities,
                                  const std::vector<double>& fractions,
                                  LayerOrientation orientation) {
    require(!conductivities.empty(), "laminate needs at least one layer");
    require(conductivities.size() == fractions.size(),
            "laminate conductivity/fraction lists must have equal length");
    KahanSum fsum;
    for (double f : fractions) {
        require(std::isfinite(f) && f >= 0, "laminate fractions must be nonnegative");
        fsum.add(f);
    }
    require(std::abs(fsum.value() - 1.0) <= 1e-12, "laminate fractions must sum to 1");
    KahanSum acc;
    for (size_t i = 0; i < conductivities.size(); ++i) {
        require(conductivities[i] > 0, "laminate conductivities must be positive");
        acc.add(orientation == LayerOrientation::Parallel
                    ? fractions[i] * conductivities[i]
                    : fractions[i] / conductivities[i]);
    }
    return orientation == LayerOrientation::Parallel ? acc.value() : 1.0 / acc.value();
}

/// True when sigma2 lies in the intermediate band [min(s1,s3)/10, 10 max(s1,s3)]
/// where the thin-interphase expansion is trustworthy; outside it results carry
/// a non-fatal warning.
inline bool sigma2_in_intermediate_band(double sigma1, double sigma2, double sigma3) {
    double lo = std::min(sigma1, sigma3) / 10.0;
    double hi = 10.0 * std::max(sigma1, sigma3);
    return sigma2 >= lo && sigma2 <= hi;
}

}  // namespace interphase
