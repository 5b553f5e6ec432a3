#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "interphase/assemblage.hpp"
#include "interphase/cellio.hpp"
#include "interphase/mesh.hpp"
#include "interphase/shift.hpp"
#include "interphase/solver.hpp"
#include "interphase/svgplot.hpp"
#include "interphase/sweep.hpp"
#include "interphase/tensor.hpp"

namespace interphase {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

namespace detail {

inline std::string fmt(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

inline double rel_dev(double got, double want) {
    return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-300});
}

inline CheckResult check(std::string name, bool ok, std::string detail) {
    return CheckResult{std::move(name), ok, std::move(detail)};
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937& rng, double lo, double hi) {
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// Random symmetric positive-definite tensor: log-uniform eigenvalues in a
/// random orthonormal frame.
inline ConductivityTensor random_spd_tensor(std::mt19937& rng, int dim, double lo, double hi) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double q[3][3] = {};
    for (int c = 0; c < dim; ++c) {
        while (true) {
            double v[3] = {};
            for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
            for (int p = 0; p < c; ++p) {
                double d = 0;
                for (int i = 0; i < dim; ++i) d += v[i] * q[i][p];
                for (int i = 0; i < dim; ++i) v[i] -= d * q[i][p];
            }
            double norm = 0;
            for (int i = 0; i < dim; ++i) norm += v[i] * v[i];
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (int i = 0; i < dim; ++i) q[i][c] = v[i] / norm;
                break;
            }
        }
    }
    std::vector<double> eig(dim);
    for (int k = 0; k < dim; ++k) eig[k] = log_uniform(rng, lo, hi);
    SymMat m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            double s = 0;
            for (int k = 0; k < dim; ++k) s += eig[k] * q[i][k] * q[j][k];
            m.set(i, j, s);
        }
    return ConductivityTensor(m);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Suite: worked-example. The worked three-phase example (core 1, layer 5,
// matrix 10, core fraction 27/64, radii 3 and 4) against independently
// computed high-precision values.
// ---------------------------------------------------------------------------
inline ValidationReport validate_worked_example() {
    ValidationReport rep{"worked-example", {}};
    const double t1 = 27.0 / 64.0;
    const double h1 = radius_from_fraction(3, 4, 0.1) - 3.0;
    const double h2 = radius_from_fraction(3, 4, 0.01) - 3.0;
    rep.checks.push_back(detail::check(
        "thickness_theta2_0.1", std::abs(h1 - 0.2204) <= 5e-5,
        "h = " + detail::fmt(h1, 10) + ", expected 0.2204 to 4 decimals"));
    rep.checks.push_back(detail::check(
        "thickness_theta2_0.01", std::abs(h2 - 0.0235) <= 5e-5,
        "h = " + detail::fmt(h2, 10) + ", expected 0.0235 to 4 decimals"));

    const double exact = exact_sigma_star(1, 5, 10, t1, 0.1);
    const double ref = reference_sigma_star(1, 10, t1);
    const double approx = approx_sigma_star(1, 5, 10, t1, 3.0, h1);
    const double slope = delta_sigma_first_order(1, 5, 10, t1, 3.0, 1.0);
    struct Anchor {
        const char* name;
        double got, want;
    } anchors[] = {
        {"exact_anchor", exact, 4.9333362683339494},
        {"reference_anchor", ref, 5.4064272211720227},
        {"approx_anchor", approx, 4.9481513855943624},
        {"slope_anchor", slope, -2.0788948009762687},
    };
    for (const auto& a : anchors) {
        double dev = detail::rel_dev(a.got, a.want);
        rep.checks.push_back(detail::check(
            a.name, dev <= 1e-12,
            detail::fmt(a.got, 17) + " vs " + detail::fmt(a.want, 17) +
                " (rel dev " + detail::fmt(dev, 3) + ", tol 1e-12)"));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Suite: reduction. When the layer conductivity equals the matrix, both the
// exact assemblage value and the corrected value collapse to the two-phase
// reference, over 1000 random material draws.
// ---------------------------------------------------------------------------
inline ValidationReport validate_reduction() {
    ValidationReport rep{"reduction", {}};
    std::mt19937 rng(20260814u);
    double worst_exact = 0, worst_approx = 0;
    const double r3 = 4.0;
    for (int i = 0; i < 1000; ++i) {
        double s1 = detail::log_uniform(rng, 0.1, 10);
        double s3 = detail::log_uniform(rng, 0.1, 10);
        double t1 = detail::uniform(rng, 0.05, 0.85);
        double t2 = detail::uniform(rng, 0.01, 0.95 - t1);
        double ref = reference_sigma_star(s1, s3, t1);
        double exact = exact_sigma_star(s1, s3, s3, t1, t2);
        double r1 = r3 * std::cbrt(t1);
        double h = radius_from_fraction(r1, r3, t2) - r1;
        double approx = approx_sigma_star(s1, s3, s3, t1, r1, h);
        worst_exact = std::max(worst_exact, detail::rel_dev(exact, ref));
        worst_approx = std::max(worst_approx, detail::rel_dev(approx, ref));
    }
    rep.checks.push_back(detail::check(
        "exact_reduces_to_reference", worst_exact <= 1e-12,
        "worst relative deviation " + detail::fmt(worst_exact, 3) + " over 1000 draws (tol 1e-12)"));
    rep.checks.push_back(detail::check(
        "approx_reduces_to_reference", worst_approx <= 1e-12,
        "worst relative deviation " + detail::fmt(worst_approx, 3) + " over 1000 draws (tol 1e-12)"));
    return rep;
}

// ---------------------------------------------------------------------------
// Suite: richardson. The corrected value is first-order accurate in the layer
// thickness: halving h shrinks the residual error by about 4 (second-order
// remainder), and the relative error stays inside the expected bands.
// ---------------------------------------------------------------------------
inline ValidationReport validate_richardson() {
    ValidationReport rep{"richardson", {}};
    const double t1 = 27.0 / 64.0, r1 = 3.0, r3 = 4.0;
    auto residual = [&](double s2, double h) {
        double t2 = std::pow((r1 + h) / r3, 3) - t1;
        return exact_sigma_star(1, s2, 10, t1, t2) - approx_sigma_star(1, s2, 10, t1, r1, h);
    };
    for (double s2 : {1.0, 2.0, 5.0, 8.0}) {
        double ratio = residual(s2, 0.06) / residual(s2, 0.03);
        rep.checks.push_back(detail::check(
            "halving_ratio_sigma2_" + detail::fmt(s2, 3), ratio >= 3.5 && ratio <= 4.5,
            "error(h)/error(h/2) = " + detail::fmt(ratio, 7) + ", expected in [3.5, 4.5]"));
    }
    auto band = [&](double t2, double tol, const char* name) {
        double h = radius_from_fraction(r1, r3, t2) - r1;
        double worst = 0;
        for (int i = 0; i <= 32; ++i) {
            double s2 = std::pow(10.0, i / 32.0);
            double exact = exact_sigma_star(1, s2, 10, t1, t2);
            double approx = approx_sigma_star(1, s2, 10, t1, r1, h);
            worst = std::max(worst, std::abs(approx - exact) / exact);
        }
        rep.checks.push_back(detail::check(
            name, worst <= tol,
            "worst relative error " + detail::fmt(worst, 4) + " over sigma2 in [1, 10] (tol " +
                detail::fmt(tol, 2) + ")"));
    };
    band(0.01, 0.01, "thin_layer_error_band");
    band(0.1, 0.05, "thick_layer_error_band");
    return rep;
}

// ---------------------------------------------------------------------------
// Suite: laminate-shift. Shifting the interface of a two-phase laminate is a
// pure volume-fraction exchange, so the raw two-sided shift formula must
// reproduce the analytic derivative of the laminate value, both for fields
// across the layers and along them.
// ---------------------------------------------------------------------------
inline ValidationReport validate_laminate_shift() {
    ValidationReport rep{"laminate-shift", {}};
    std::mt19937 rng(71001u);
    double worst_series = 0, worst_plane = 0;
    for (int i = 0; i < 50; ++i) {
        double sa = detail::log_uniform(rng, 0.2, 5.0);
        double sb = detail::log_uniform(rng, 0.2, 5.0);
        double f = detail::uniform(rng, 0.1, 0.9);
        // Field across the layers: continuous normal current J = sigma_star.
        {
            double star = laminate_sigma_star({sa, sb}, {f, 1 - f},
                                              LayerOrientation::Perpendicular);
            double want = star * star * (1.0 / sb - 1.0 / sa);  // d(star)/df, growing phase a
            InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
            auto& p = mesh.patches()[0];
            p.plus = SideFields{Vec{star / sa, 0.0}, Vec{star, 0.0}};   // phase a side
            p.minus = SideFields{Vec{star / sb, 0.0}, Vec{star, 0.0}};  // phase b side
            double got = interface_shift_delta(mesh, std::vector<double>{1.0}).value;
            worst_series = std::max(worst_series, detail::rel_dev(got, want));
        }
        // Field along the layers: continuous tangential field E = 1.
        {
            double want = sa - sb;  // d(arithmetic mean)/df
            InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
            auto& p = mesh.patches()[0];
            p.plus = SideFields{Vec{0.0, 1.0}, Vec{0.0, sa}};
            p.minus = SideFields{Vec{0.0, 1.0}, Vec{0.0, sb}};
            double got = interface_shift_delta(mesh, std::vector<double>{1.0}).value;
            worst_plane = std::max(worst_plane, detail::rel_dev(got, want));
        }
    }
    rep.checks.push_back(detail::check(
        "series_orientation", worst_series <= 1e-10,
        "worst relative deviation " + detail::fmt(worst_series, 3) + " over 50 draws (tol 1e-10)"));
    rep.checks.push_back(detail::check(
        "in_plane_orientation", worst_plane <= 1e-10,
        "worst relative deviation " + detail::fmt(worst_plane, 3) + " over 50 draws (tol 1e-10)"));
    return rep;
}

// ---------------------------------------------------------------------------
// Suite: interphase-laminate. Inserting a thin third layer into a two-phase
// laminate: the single-layer correction must equal thickness times the exact
// derivative of the three-phase laminate value at zero thickness.
// ---------------------------------------------------------------------------
inline ValidationReport validate_interphase_laminate() {
    ValidationReport rep{"interphase-laminate", {}};
    std::mt19937 rng(71002u);
    double worst_series = 0, worst_plane = 0;
    for (int i = 0; i < 50; ++i) {
        double s1 = detail::log_uniform(rng, 0.2, 5.0);  // phase the layer displaces
        double s2 = detail::log_uniform(rng, 0.2, 5.0);  // inserted layer
        double s3 = detail::log_uniform(rng, 0.2, 5.0);  // other bulk phase
        double f1 = detail::uniform(rng, 0.15, 0.7);
        double h = detail::uniform(rng, 0.01, 0.1);
        auto iso1 = make_isotropic(s1, 2);
        auto iso2 = make_isotropic(s2, 2);
        // Across the layers: fractions (f1 - h, h, 1 - f1) in series.
        {
            double star = laminate_sigma_star({s1, s3}, {f1, 1 - f1},
                                              LayerOrientation::Perpendicular);
            double slope = star * star * (1.0 / s1 - 1.0 / s2);  // d(star)/dh at h = 0
            InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
            auto& p = mesh.patches()[0];
            p.thickness = h;
            p.tn = TangentialNormal{Vec{0.0, 0.0}, Vec{star, 0.0}, Side::Minus};
            double got = single_interphase_delta(mesh, iso1, iso2).value;
            worst_series = std::max(worst_series, detail::rel_dev(got, h * slope));
        }
        // Along the layers: arithmetic mean, slope sigma2 - sigma1.
        {
            InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
            auto& p = mesh.patches()[0];
            p.thickness = h;
            p.tn = TangentialNormal{Vec{0.0, 1.0}, Vec{0.0, 0.0}, Side::Minus};
            double got = single_interphase_delta(mesh, iso1, iso2).value;
            worst_plane = std::max(worst_plane, detail::rel_dev(got, h * (s2 - s1)));
        }
    }
    rep.checks.push_back(detail::check(
        "series_orientation", worst_series <= 1e-10,
        "worst relative deviation " + detail::fmt(worst_series, 3) + " over 50 draws (tol 1e-10)"));
    rep.checks.push_back(detail::check(
        "in_plane_orientation", worst_plane <= 1e-10,
        "worst relative deviation " + detail::fmt(worst_plane, 3) + " over 50 draws (tol 1e-10)"));
    return rep;
}

// ---------------------------------------------------------------------------
// Suite: formula-family. Consistency between the members of the correction
// family: layer stacks against their graded-profile equivalents, single layer
// against a constant profile, permutation invariance of stacks, and the
// telescoping rearrangement of the stack mean.
// ---------------------------------------------------------------------------
inline ValidationReport validate_formula_family() {
    ValidationReport rep{"formula-family", {}};
    std::mt19937 rng(71003u);
    double worst_graded = 0, worst_single = 0, worst_perm = 0, worst_tele = 0;
    for (int draw = 0; draw < 25; ++draw) {
        const int dim = (draw % 2) ? 3 : 2;
        const int K = 2 + (draw % 4);
        std::vector<ConductivityTensor> layers;
        std::vector<double> fractions;
        double fsum = 0;
        for (int k = 0; k < K; ++k) {
            layers.push_back(detail::random_spd_tensor(rng, dim, 0.2, 5.0));
            fractions.push_back(detail::uniform(rng, 0.2, 1.0));
            fsum += fractions.back();
        }
        KahanSum norm;
        for (auto& f : fractions) f /= fsum;
        for (double f : fractions) norm.add(f);
        fractions.back() += 1.0 - norm.value();  // make the sum exactly 1
        InterphaseStack stack(layers, fractions);
        ConductivityTensor sigma1 = detail::random_spd_tensor(rng, dim, 0.2, 5.0);

        const double h = detail::uniform(rng, 0.05, 0.2);
        Vec normal = dim == 2 ? Vec{1.0, 0.0} : Vec{1.0, 0.0, 0.0};
        InterfaceMesh mesh = plane_mesh(normal);
        auto& p = mesh.patches()[0];
        p.thickness = h;
        Vec et = dim == 2 ? Vec{0.0, detail::uniform(rng, -1.0, 1.0)}
                          : Vec{0.0, detail::uniform(rng, -1.0, 1.0),
                                detail::uniform(rng, -1.0, 1.0)};
        Vec jn = dim == 2 ? Vec{detail::uniform(rng, -1.0, 1.0), 0.0}
                          : Vec{detail::uniform(rng, -1.0, 1.0), 0.0, 0.0};
        p.tn = TangentialNormal{et, jn, Side::Minus};

        double multi = multi_interphase_delta(mesh, sigma1, stack).value;
        double graded =
            graded_interphase_delta(mesh, sigma1, GradedProfile::from_stack(stack, h)).value;
        worst_graded = std::max(worst_graded, detail::rel_dev(multi, graded));

        ConductivityTensor lone = detail::random_spd_tensor(rng, dim, 0.2, 5.0);
        double single = single_interphase_delta(mesh, sigma1, lone).value;
        double constant =
            graded_interphase_delta(mesh, sigma1,
                                    GradedProfile::piecewise_constant({0.0, h}, {lone}))
                .value;
        worst_single = std::max(worst_single, detail::rel_dev(single, constant));

        std::vector<ConductivityTensor> shuffled_layers;
        std::vector<double> shuffled_fractions;
        std::vector<int> order(K);
        for (int k = 0; k < K; ++k) order[k] = k;
        std::shuffle(order.begin(), order.end(), rng);
        for (int k : order) {
            shuffled_layers.push_back(layers[static_cast<std::size_t>(k)]);
            shuffled_fractions.push_back(fractions[static_cast<std::size_t>(k)]);
        }
        InterphaseStack shuffled(shuffled_layers, shuffled_fractions);
        double multi_perm = multi_interphase_delta(mesh, sigma1, shuffled).value;
        worst_perm = std::max(worst_perm, detail::rel_dev(multi_perm, multi));

        // Telescoping rearrangement of the stack mean:
        //   sum_k f_k s^k = s^1 - sum_{k=1}^{K-1} (sum_{i>k} f_i) (s^k - s^{k+1}).
        SymMat rhs = layers[0].mat();
        for (int k = 0; k < K - 1; ++k) {
            KahanSum tail;
            for (int i = k + 1; i < K; ++i) tail.add(fractions[static_cast<std::size_t>(i)]);
            rhs = rhs - (layers[static_cast<std::size_t>(k)].mat() -
                         layers[static_cast<std::size_t>(k + 1)].mat()) *
                            tail.value();
        }
        SymMat lhs = stack.mean_sigma().mat();
        worst_tele = std::max(worst_tele,
                              (lhs - rhs).max_abs() / std::max(lhs.max_abs(), 1e-300));
    }
    rep.checks.push_back(detail::check(
        "stack_matches_graded", worst_graded <= 1e-12,
        "worst relative deviation " + detail::fmt(worst_graded, 3) + " (tol 1e-12)"));
    rep.checks.push_back(detail::check(
        "constant_matches_single", worst_single <= 1e-12,
        "worst relative deviation " + detail::fmt(worst_single, 3) + " (tol 1e-12)"));
    rep.checks.push_back(detail::check(
        "layer_permutation_invariance", worst_perm <= 1e-14,
        "worst relative deviation " + detail::fmt(worst_perm, 3) + " (tol 1e-14)"));
    rep.checks.push_back(detail::check(
        "stack_mean_telescoping", worst_tele <= 1e-13,
        "worst relative matrix deviation " + detail::fmt(worst_tele, 3) + " (tol 1e-13)"));
    return rep;
}

// ---------------------------------------------------------------------------
// Suite: limits. The exact assemblage value approaches the fixed-product
// (highly conducting layer) and fixed-ratio (poorly conducting layer)
// asymptotes as the layer fraction shrinks, at first order in the fraction.
// ---------------------------------------------------------------------------
inline ValidationReport validate_limits() {
    ValidationReport rep{"limits", {}};
    const double t1 = 27.0 / 64.0;
    const double t3 = 1.0 - t1;
    const double fractions[] = {1e-2, 1e-3, 1e-4};

    const double hi = high_contrast_limit(1.0, 10.0, t3, 1.0);
    rep.checks.push_back(detail::check(
        "high_contrast_value", detail::rel_dev(hi, 6.3475461986900055) <= 1e-12,
        "limit value " + detail::fmt(hi, 17) + " vs 6.3475461986900055 (tol 1e-12)"));
    double hi_dev[3];
    for (int i = 0; i < 3; ++i) {
        double t2 = fractions[i];
        double exact = exact_sigma_star(1.0, 1.0 / t2, 10.0, t1, t2);
        hi_dev[i] = std::abs(exact - hi) / hi;
    }
    rep.checks.push_back(detail::check(
        "high_contrast_convergence", hi_dev[0] > hi_dev[1] && hi_dev[1] > hi_dev[2],
        "deviations " + detail::fmt(hi_dev[0], 4) + " > " + detail::fmt(hi_dev[1], 4) + " > " +
            detail::fmt(hi_dev[2], 4) + " as the layer fraction shrinks"));
    rep.checks.push_back(detail::check(
        "high_contrast_final_deviation", hi_dev[2] < 1e-3,
        "relative deviation " + detail::fmt(hi_dev[2], 4) + " at fraction 1e-4 (tol 1e-3)"));

    const double lo = low_contrast_limit(1.0, 10.0, t3, 10.0);
    rep.checks.push_back(detail::check(
        "low_contrast_value", detail::rel_dev(lo, 5.3611329775325529) <= 1e-12,
        "limit value " + detail::fmt(lo, 17) + " vs 5.3611329775325529 (tol 1e-12)"));
    double lo_dev[3];
    for (int i = 0; i < 3; ++i) {
        double t2 = fractions[i];
        double exact = exact_sigma_star(1.0, 10.0 * t2, 10.0, t1, t2);
        lo_dev[i] = std::abs(exact - lo) / lo;
    }
    rep.checks.push_back(detail::check(
        "low_contrast_convergence", lo_dev[0] > lo_dev[1] && lo_dev[1] > lo_dev[2],
        "deviations " + detail::fmt(lo_dev[0], 4) + " > " + detail::fmt(lo_dev[1], 4) + " > " +
            detail::fmt(lo_dev[2], 4) + " as the layer fraction shrinks"));
    rep.checks.push_back(detail::check(
        "low_contrast_final_deviation", lo_dev[2] < 1e-3,
        "relative deviation " + detail::fmt(lo_dev[2], 4) + " at fraction 1e-4 (tol 1e-3)"));
    return rep;
}

// ---------------------------------------------------------------------------
// Suite: solver-oracles. The spectral cell solver against closed forms: a
// laminate (arithmetic/harmonic means), the two-phase checkerboard (geometric
// mean by duality), and a homogeneous cell (one-step convergence).
// ---------------------------------------------------------------------------
inline ValidationReport validate_solver_oracles() {
    ValidationReport rep{"solver-oracles", {}};
    {
        SolveOptions opts;
        opts.tolerance = 1e-10;
        auto cell = laminate_cell(2, 256, 0, {1.0 / 3.0, 2.0 / 3.0},
                                  {make_isotropic(7.3, 2), make_isotropic(1.0, 2)});
        double fa = cell.phase_fraction(0);
        double series = 1.0 / (fa / 7.3 + (1 - fa) / 1.0);
        double in_plane = fa * 7.3 + (1 - fa) * 1.0;
        auto sx = solve_periodic(cell, Vec{1.0, 0.0}, opts);
        auto sy = solve_periodic(cell, Vec{0.0, 1.0}, opts);
        double dev_x = detail::rel_dev(sx.mean_current[0], series);
        double dev_y = detail::rel_dev(sy.mean_current[1], in_plane);
        rep.checks.push_back(detail::check(
            "laminate_series", dev_x <= 1e-8,
            "grid 256, harmonic mean: relative deviation " + detail::fmt(dev_x, 3) +
                " (tol 1e-8)"));
        rep.checks.push_back(detail::check(
            "laminate_in_plane", dev_y <= 1e-8,
            "grid 256, arithmetic mean: relative deviation " + detail::fmt(dev_y, 3) +
                " (tol 1e-8)"));
    }
    {
        SolveOptions opts;
        opts.tolerance = 1e-9;
        auto cell = checkerboard_cell(512, make_isotropic(1.0, 2), make_isotropic(4.0, 2));
        auto s = solve_periodic(cell, Vec{1.0, 0.0}, opts);
        double want = 2.0;  // sqrt(1 * 4), exact by duality
        double dev = detail::rel_dev(s.mean_current[0], want);
        rep.checks.push_back(detail::check(
            "checkerboard_duality", dev <= 0.02,
            "grid 512, conductivities (1, 4): value " + detail::fmt(s.mean_current[0], 8) +
                " vs 2 (rel dev " + detail::fmt(dev, 3) + ", tol 2e-2)"));
    }
    {
        auto cell = uniform_cell(2, 16, make_isotropic(3.7, 2));
        auto s = solve_periodic(cell, Vec{1.0, 0.0});
        bool ok = s.residual_history.size() == 1 &&
                  detail::rel_dev(s.mean_current[0], 3.7) <= 1e-13;
        rep.checks.push_back(detail::check(
            "uniform_single_iteration", ok,
            "homogeneous cell: " + std::to_string(s.residual_history.size()) +
                " iteration(s), mean current " + detail::fmt(s.mean_current[0], 16)));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Suite: shift-cross-validation. The interface-shift formula evaluated on
// solver fields of a 2D circular inclusion against a finite-difference
// derivative of the effective value with respect to the inclusion radius.
// ---------------------------------------------------------------------------
inline ValidationReport validate_shift_cross_validation() {
    ValidationReport rep{"shift-cross-validation", {}};
    const int n = 256;
    const double radius = 0.3;
    const auto inclusion = make_isotropic(5.0, 2);
    const auto matrix = make_isotropic(1.0, 2);
    SolveOptions opts;
    opts.tolerance = 1e-9;

    // Finite-difference route on smoothed cells (differentiable in the radius).
    auto family = [&](double r) {
        return circular_inclusion_cell(n, r, inclusion, matrix, /*smoothed=*/true);
    };
    SymMat fd = finite_difference_sensitivity(family, radius, 0.02, opts);

    // Shift route: sharp solve, fields sampled on both sides of the circle.
    auto cell = circular_inclusion_cell(n, radius, inclusion, matrix, /*smoothed=*/false);
    auto sol = solve_periodic(cell, Vec{1.0, 0.0}, opts);
    InterfaceMesh mesh = circle_mesh(radius, 512, cell.volume(), Vec{0.5, 0.5});
    mesh = sample_interface_fields(sol, std::move(mesh), Side::Plus, 1.5);
    mesh = sample_interface_fields(sol, std::move(mesh), Side::Minus, 1.5);
    ShiftOptions sopts;
    sopts.check_continuity = false;  // voxel fields carry discretization error
    std::vector<double> shifts(mesh.size(), 1.0);
    double slope = interface_shift_delta(mesh, shifts, sopts).value;

    double dev = detail::rel_dev(slope, fd(0, 0));
    rep.checks.push_back(detail::check(
        "circle_growth_slope", dev <= 0.02,
        "shift formula " + detail::fmt(slope, 7) + " vs finite difference " +
            detail::fmt(fd(0, 0), 7) + " (rel dev " + detail::fmt(dev, 3) + ", tol 2e-2)"));
    return rep;
}

// ---------------------------------------------------------------------------
// Suite: sweep-curves. Reproduces the committed sweep configurations and
// checks the structural facts visible in each: elementary bounds, the three
// curves crossing where layer and matrix coincide, the asymptote tails, and
// that the plots render.
// ---------------------------------------------------------------------------
inline const std::vector<std::string>& sweep_config_names() {
    static const std::vector<std::string> names = {
        "sweep-1-10-thick", "sweep-1-10-thin",  "sweep-10-1-thick",
        "sweep-10-1-thin",  "sweep-1-100-thick", "sweep-100-1-thick",
    };
    return names;
}

inline ValidationReport validate_sweep_curves(const std::string& config_dir) {
    ValidationReport rep{"sweep-curves", {}};
    for (const auto& name : sweep_config_names()) {
        SweepConfig cfg = load_sweep_config(config_dir + "/" + name + ".json");
        std::vector<SweepRow> rows = run_sweep(cfg);

        double wiener_lo = std::min(cfg.sigma1, cfg.sigma3);
        double wiener_hi = std::max(cfg.sigma1, cfg.sigma3);
        bool wiener_ok = true;
        double cross_dev = -1;
        bool high_ok = true, low_ok = true, tail_order_ok = true;
        double worst_high = 0, worst_low = 0;
        for (const auto& row : rows) {
            double exact = row.exact.value();
            double lo_bound = std::min(wiener_lo, row.sigma2);
            double hi_bound = std::max(wiener_hi, row.sigma2);
            if (exact < lo_bound * (1 - 1e-12) || exact > hi_bound * (1 + 1e-12))
                wiener_ok = false;
            if (row.sigma2 == cfg.sigma3) {
                double ref = row.reference.value();
                cross_dev = std::max(detail::rel_dev(exact, ref),
                                     detail::rel_dev(row.approx.value(), ref));
            }
            if (row.sigma2 >= cfg.sigma2_max / 10.0) {  // top decade
                double dev = std::abs(row.high_limit.value() - exact) / exact;
                worst_high = std::max(worst_high, dev);
                if (dev > 0.05) high_ok = false;
            }
            if (row.sigma2 <= cfg.sigma2_min * 10.0) {  // bottom decade
                double dev = std::abs(row.low_limit.value() - exact) / exact;
                worst_low = std::max(worst_low, dev);
                if (dev > 0.10) low_ok = false;
                if (std::abs(row.low_limit.value() - exact) >=
                    std::abs(row.high_limit.value() - exact))
                    tail_order_ok = false;
            }
        }
        rep.checks.push_back(detail::check(
            name + "_elementary_bounds", wiener_ok,
            "exact value inside [min, max] of the three conductivities at every sample"));
        rep.checks.push_back(detail::check(
            name + "_triple_intersection", cross_dev >= 0 && cross_dev <= 1e-10,
            "exact/corrected/reference agree at sigma2 = sigma3 (rel dev " +
                detail::fmt(cross_dev, 3) + ", tol 1e-10)"));
        rep.checks.push_back(detail::check(
            name + "_high_asymptote_tail", high_ok,
            "fixed-product asymptote within 5% on the top decade (worst " +
                detail::fmt(worst_high, 3) + ")"));
        rep.checks.push_back(detail::check(
            name + "_low_asymptote_tail", low_ok && tail_order_ok,
            "fixed-ratio asymptote within 10% and closer than the fixed-product one on the "
            "bottom decade (worst " +
                detail::fmt(worst_low, 3) + ")"));

        std::ostringstream csv;
        write_sweep_csv(csv, cfg, rows);
        std::istringstream csv_in(csv.str());
        CsvTable table = parse_csv(csv_in, name);
        PlotOptions popts;
        popts.title = cfg.name;
        std::string svg = render_plot(table, popts);
        std::size_t polylines = 0, pos = 0;
        while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
            ++polylines;
            pos += 9;
        }
        rep.checks.push_back(detail::check(
            name + "_plot_renders", polylines == cfg.curves.size() && svg.find("</svg>") != std::string::npos,
            std::to_string(polylines) + " curves rendered from " + name + ".json"));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------
inline const std::vector<std::string>& validation_suite_names() {
    static const std::vector<std::string> names = {
        "worked-example", "reduction",      "richardson",
        "laminate-shift", "interphase-laminate", "formula-family",
        "limits",        "solver-oracles", "shift-cross-validation",
        "sweep-curves",  "all",
    };
    return names;
}

inline ValidationReport run_validation(const std::string& suite,
                                       const std::string& config_dir = "configs") {
    if (suite == "worked-example") return validate_worked_example();
    if (suite == "reduction") return validate_reduction();
    if (suite == "richardson") return validate_richardson();
    if (suite == "laminate-shift") return validate_laminate_shift();
    if (suite == "interphase-laminate") return validate_interphase_laminate();
    if (suite == "formula-family") return validate_formula_family();
    if (suite == "limits") return validate_limits();
    if (suite == "solver-oracles") return validate_solver_oracles();
    if (suite == "shift-cross-validation") return validate_shift_cross_validation();
    if (suite == "sweep-curves") return validate_sweep_curves(config_dir);
    if (suite == "all") {
        ValidationReport all{"all", {}};
        for (const auto& name : validation_suite_names()) {
            if (name == "all") continue;
            ValidationReport sub = run_validation(name, config_dir);
            for (auto& c : sub.checks) {
                c.name = name + "/" + c.name;
                all.checks.push_back(std::move(c));
            }
        }
        return all;
    }
    std::string known;
    for (const auto& name : validation_suite_names())
        known += (known.empty() ? "" : ", ") + name;
    throw std::invalid_argument("unknown validation suite '" + suite +
                                "'; available suites: " + known);
}

inline nlohmann::json report_to_json(const ValidationReport& rep) {
    nlohmann::json j;
    j["suite"] = rep.suite;
    j["passed"] = rep.all_passed();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : rep.checks)
        j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return j;
}

inline std::string report_summary(const ValidationReport& rep) {
    std::ostringstream os;
    std::size_t passed = 0;
    for (const auto& c : rep.checks) {
        os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
        if (c.passed) ++passed;
    }
    os << "suite " << rep.suite << ": " << passed << "/" << rep.checks.size()
       << " checks passed\n";
    return os.str();
}

}  // namespace interphase
