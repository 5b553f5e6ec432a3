#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "interphase/assemblage.hpp"
#include "interphase/mesh.hpp"
#include "interphase/shift.hpp"

using namespace interphase;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// Orthonormal frame with a random first axis; columns are the frame vectors.
std::vector<Vec> random_frame(std::mt19937& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec> frame;
    while (static_cast<int>(frame.size()) < dim) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
        for (const auto& q : frame) v = v - q * v.dot(q);
        if (v.norm() < 1e-6) continue;
        frame.push_back(v * (1.0 / v.norm()));
    }
    return frame;
}

ConductivityTensor from_frame(const std::vector<Vec>& frame, const std::vector<double>& eig) {
    const int dim = frame[0].dim();
    SymMat m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            double s = 0;
            for (int k = 0; k < dim; ++k) s += eig[k] * frame[k][i] * frame[k][j];
            m.set(i, j, s);
        }
    return ConductivityTensor(m);
}

}  // namespace

TEST_CASE("laminate interface shift reproduces the volume-fraction derivative",
          "[shift]") {
    const double sa = 3.0, sb = 0.7, f = 0.4;
    SECTION("field across the layers") {
        double star = laminate_sigma_star({sa, sb}, {f, 1 - f},
                                          LayerOrientation::Perpendicular);
        InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
        auto& p = mesh.patches()[0];
        p.plus = SideFields{Vec{star / sa, 0.0}, Vec{star, 0.0}};
        p.minus = SideFields{Vec{star / sb, 0.0}, Vec{star, 0.0}};
        REQUIRE_THAT(interface_shift_delta(mesh, std::vector<double>{1.0}).value,
                     WithinRel(star * star * (1.0 / sb - 1.0 / sa), 1e-12));
    }
    SECTION("field along the layers") {
        InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
        auto& p = mesh.patches()[0];
        p.plus = SideFields{Vec{0.0, 1.0}, Vec{0.0, sa}};
        p.minus = SideFields{Vec{0.0, 1.0}, Vec{0.0, sb}};
        REQUIRE_THAT(interface_shift_delta(mesh, std::vector<double>{1.0}).value,
                     WithinRel(sa - sb, 1e-12));
    }
    SECTION("shift amplitudes attached to the patches give the same value") {
        InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
        auto& p = mesh.patches()[0];
        p.plus = SideFields{Vec{0.0, 1.0}, Vec{0.0, sa}};
        p.minus = SideFields{Vec{0.0, 1.0}, Vec{0.0, sb}};
        p.shift_amplitude = -0.35;
        REQUIRE_THAT(interface_shift_delta(mesh).value,
                     WithinRel(-0.35 * (sa - sb), 1e-12));
    }
}

TEST_CASE("one-sided form agrees with the two-sided form when the normal is a "
          "shared eigenvector",
          "[shift]") {
    std::mt19937 rng(90210u);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    for (int dim : {2, 3}) {
        for (int draw = 0; draw < 20; ++draw) {
            auto frame = random_frame(rng, dim);  // frame[0] is the interface normal
            std::vector<double> eig_minus(dim), eig_plus(dim);
            for (int k = 0; k < dim; ++k) {
                eig_minus[k] = u(rng);
                eig_plus[k] = u(rng);
            }
            ConductivityTensor sm = from_frame(frame, eig_minus);
            ConductivityTensor sp = from_frame(frame, eig_plus);

            // Fields satisfying tangential-E / normal-J continuity.
            const Vec& n = frame[0];
            double e_n_minus = amp(rng);
            Vec e_minus = n * e_n_minus;
            Vec e_plus = n * (eig_minus[0] * e_n_minus / eig_plus[0]);
            for (int k = 1; k < dim; ++k) {
                double c = amp(rng);
                e_minus = e_minus + frame[k] * c;
                e_plus = e_plus + frame[k] * c;
            }
            const double gamma = amp(rng);

            InterfaceMesh mesh = plane_mesh(n);
            auto& p = mesh.patches()[0];
            p.minus = SideFields{e_minus, sm.apply(e_minus)};
            p.plus = SideFields{e_plus, sp.apply(e_plus)};
            double two_sided = interface_shift_delta(mesh, std::vector<double>{gamma}).value;

            InterfaceMesh mesh_tn = plane_mesh(n);
            auto& q = mesh_tn.patches()[0];
            q.thickness = 0.0;
            q.tn = TangentialNormal{e_minus - n * e_minus.dot(n),
                                    n * (eig_minus[0] * e_n_minus), Side::Minus};
            // thickness plays the role of the shift distance in the tn form,
            // but it must be nonnegative; fold the sign into the comparison.
            q.thickness = std::abs(gamma);
            double tn = interface_shift_delta_tn(mesh_tn, sp, sm).value;
            if (gamma < 0) tn = -tn;

            REQUIRE_THAT(two_sided, WithinAbs(tn, 1e-12 * std::max(1.0, std::abs(tn))));
        }
    }
}

TEST_CASE("continuity violations and missing data are rejected", "[shift]") {
    SECTION("tangential field jump") {
        InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
        auto& p = mesh.patches()[0];
        p.plus = SideFields{Vec{1.0, 1.0}, Vec{1.0, 1.0}};
        p.minus = SideFields{Vec{1.0, 1.5}, Vec{1.0, 1.5}};  // E_t mismatch
        REQUIRE_THROWS_AS(interface_shift_delta(mesh, std::vector<double>{1.0}), std::invalid_argument);
        ShiftOptions loose;
        loose.continuity_tol = 0.5;
        REQUIRE_NOTHROW(interface_shift_delta(mesh, std::vector<double>{1.0}, loose));
        loose.check_continuity = false;
        REQUIRE_NOTHROW(interface_shift_delta(mesh, std::vector<double>{1.0}, loose));
    }
    SECTION("one side missing") {
        InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
        mesh.patches()[0].plus = SideFields{Vec{1.0, 0.0}, Vec{1.0, 0.0}};
        REQUIRE_THROWS_AS(interface_shift_delta(mesh, std::vector<double>{1.0}), std::invalid_argument);
    }
    SECTION("wrong number of shifts") {
        InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
        REQUIRE_THROWS_AS(interface_shift_delta(mesh, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    }
    SECTION("interface components missing or malformed") {
        auto iso1 = make_isotropic(1.0, 2);
        auto iso2 = make_isotropic(2.0, 2);
        InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
        auto& p = mesh.patches()[0];
        p.thickness = 0.1;
        REQUIRE_THROWS_WITH(single_interphase_delta(mesh, iso1, iso2),
                            Catch::Matchers::ContainsSubstring("components missing"));
        p.tn = TangentialNormal{Vec{0.0, 1.0}, Vec{1.0, 0.0}, std::nullopt};
        REQUIRE_THROWS_WITH(single_interphase_delta(mesh, iso1, iso2),
                            Catch::Matchers::ContainsSubstring("side not declared"));
        p.tn = TangentialNormal{Vec{0.5, 1.0}, Vec{1.0, 0.0}, Side::Minus};
        REQUIRE_THROWS_WITH(single_interphase_delta(mesh, iso1, iso2),
                            Catch::Matchers::ContainsSubstring("not tangential"));
        p.tn = TangentialNormal{Vec{0.0, 1.0}, Vec{1.0, 0.5}, Side::Minus};
        REQUIRE_THROWS_WITH(single_interphase_delta(mesh, iso1, iso2),
                            Catch::Matchers::ContainsSubstring("not parallel"));
        p.tn = TangentialNormal{Vec{0.0, 1.0}, Vec{1.0, 0.0}, Side::Minus};
        p.thickness = -0.1;
        REQUIRE_THROWS_AS(single_interphase_delta(mesh, iso1, iso2), std::invalid_argument);
    }
}

TEST_CASE("layer stacks, graded profiles and their equivalences", "[shift]") {
    auto iso = [](double v, int d) { return make_isotropic(v, d); };
    const double h = 0.12;
    InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
    auto& p = mesh.patches()[0];
    p.thickness = h;
    p.tn = TangentialNormal{Vec{0.0, 0.8}, Vec{-0.6, 0.0}, Side::Minus};
    auto sigma1 = iso(1.4, 2);

    SECTION("stack equals its piecewise-constant profile") {
        InterphaseStack stack({iso(2.0, 2), iso(0.5, 2), iso(4.0, 2)}, {0.5, 0.2, 0.3});
        double a = multi_interphase_delta(mesh, sigma1, stack).value;
        double b = graded_interphase_delta(mesh, sigma1,
                                           GradedProfile::from_stack(stack, h))
                       .value;
        REQUIRE_THAT(a, WithinRel(b, 1e-13));
    }
    SECTION("single layer equals a one-layer stack and a constant profile") {
        auto layer = iso(3.3, 2);
        double s = single_interphase_delta(mesh, sigma1, layer).value;
        double m = multi_interphase_delta(mesh, sigma1, InterphaseStack({layer}, {1.0})).value;
        double g = graded_interphase_delta(
                       mesh, sigma1, GradedProfile::piecewise_constant({0.0, h}, {layer}))
                       .value;
        REQUIRE_THAT(s, WithinRel(m, 1e-14));
        REQUIRE_THAT(s, WithinRel(g, 1e-13));
    }
    SECTION("zero-width layers are dropped from stack profiles") {
        InterphaseStack with_zero({iso(2.0, 2), iso(9.9, 2), iso(0.5, 2)}, {0.6, 0.0, 0.4});
        InterphaseStack without({iso(2.0, 2), iso(0.5, 2)}, {0.6, 0.4});
        double a = graded_interphase_delta(mesh, sigma1,
                                           GradedProfile::from_stack(with_zero, h))
                       .value;
        double b = graded_interphase_delta(mesh, sigma1,
                                           GradedProfile::from_stack(without, h))
                       .value;
        REQUIRE_THAT(a, WithinRel(b, 1e-14));
    }
    SECTION("linear profile means match closed forms") {
        const double a = 2.0, b = 3.0, H = 0.2;
        auto profile = GradedProfile::piecewise_linear(
            {0.0, H}, {iso(a, 2), iso(a + b * H, 2)});
        const double hq = 0.15;
        SymMat mean = profile.mean_sigma(hq);
        SymMat mean_inv = profile.mean_inverse(hq);
        REQUIRE_THAT(mean(0, 0), WithinRel(a + b * hq / 2.0, 1e-12));
        REQUIRE_THAT(mean(0, 1), WithinAbs(0.0, 1e-15));
        REQUIRE_THAT(mean_inv(0, 0),
                     WithinRel(std::log((a + b * hq) / a) / (b * hq), 1e-10));
    }
    SECTION("callable profile matches its table equivalent") {
        const double H = 0.2;
        auto rule = [&](double z) { return iso(1.0 + z * z, 2); };
        auto profile = GradedProfile::from_function(rule);
        SymMat mean = profile.mean_sigma(H);
        REQUIRE_THAT(mean(0, 0), WithinRel(1.0 + H * H / 3.0, 1e-12));
    }
    SECTION("profile evaluation respects the declared domain") {
        auto profile = GradedProfile::piecewise_constant({0.0, 0.1}, {iso(2.0, 2)});
        REQUIRE_THROWS_AS(profile.evaluate(0.2), std::invalid_argument);
        REQUIRE_THROWS_AS(profile.mean_sigma(0.2), std::invalid_argument);
        REQUIRE_THROWS_AS(GradedProfile::piecewise_constant({0.1, 0.2}, {iso(1.0, 2)}),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(GradedProfile::piecewise_constant({0.0, 0.0}, {iso(1.0, 2)}),
                          std::invalid_argument);
    }
}

TEST_CASE("stack constructors validate their inputs", "[shift]") {
    auto iso = [](double v) { return make_isotropic(v, 2); };
    REQUIRE_THROWS_AS(InterphaseStack({}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(InterphaseStack({iso(1.0)}, {0.5}), std::invalid_argument);
    REQUIRE_THROWS_AS(InterphaseStack({iso(1.0), iso(2.0)}, {0.5}), std::invalid_argument);
    REQUIRE_THROWS_AS(
        InterphaseStack({make_isotropic(1.0, 2), make_isotropic(2.0, 3)}, {0.5, 0.5}),
        std::invalid_argument);
}

TEST_CASE("stack mean obeys the telescoping rearrangement", "[shift]") {
    auto iso = [](double v) { return make_isotropic(v, 3); };
    std::vector<ConductivityTensor> layers{iso(2.0), iso(0.7), iso(5.0), iso(1.1)};
    std::vector<double> f{0.4, 0.3, 0.2, 0.1};
    InterphaseStack stack(layers, f);
    SymMat rhs = layers[0].mat();
    for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
        double tail = 0;
        for (std::size_t i = k + 1; i < layers.size(); ++i) tail += f[i];
        rhs = rhs - (layers[k].mat() - layers[k + 1].mat()) * tail;
    }
    REQUIRE_THAT((stack.mean_sigma().mat() - rhs).max_abs(), WithinAbs(0.0, 1e-14));
}

TEST_CASE("several interfaces shift simultaneously by summation", "[shift]") {
    auto make = [](double sa, double sb) {
        InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
        auto& p = mesh.patches()[0];
        p.plus = SideFields{Vec{0.0, 1.0}, Vec{0.0, sa}};
        p.minus = SideFields{Vec{0.0, 1.0}, Vec{0.0, sb}};
        return mesh;
    };
    InterfaceMesh a = make(3.0, 1.0), b = make(0.5, 2.0);
    double total = multi_interface_shift({a, b}, {{0.2}, {-0.1}}).value;
    double separate = interface_shift_delta(a, std::vector<double>{0.2}).value +
                      interface_shift_delta(b, std::vector<double>{-0.1}).value;
    REQUIRE_THAT(total, WithinRel(separate, 1e-14));
    REQUIRE_THROWS_AS(multi_interface_shift({a, b}, {{0.2}}), std::invalid_argument);
}

TEST_CASE("thickness-gradient diagnostic is reported", "[shift]") {
    InterfaceMesh mesh = plane_mesh(Vec{1.0, 0.0});
    auto& p = mesh.patches()[0];
    p.thickness = 0.1;
    p.thickness_gradient = 0.25;
    p.tn = TangentialNormal{Vec{0.0, 1.0}, Vec{0.0, 0.0}, Side::Minus};
    auto r = single_interphase_delta(mesh, make_isotropic(1.0, 2), make_isotropic(2.0, 2));
    REQUIRE(r.max_thickness_gradient == 0.25);
}

TEST_CASE("delta tensors are recovered from quadratic-form samples", "[shift]") {
    for (int dim : {2, 3}) {
        SymMat d(dim);
        d.set(0, 0, 0.7);
        d.set(1, 1, -1.3);
        d.set(0, 1, 0.4);
        if (dim == 3) {
            d.set(2, 2, 2.2);
            d.set(0, 2, -0.6);
            d.set(1, 2, 0.1);
        }
        auto evaluator = [&](const Vec& e0) { return quadratic_form(d, e0); };
        SymMat got = assemble_delta_tensor(evaluator, canonical_applied_fields(dim));
        REQUIRE_THAT((got - d).max_abs(), WithinAbs(0.0, 1e-12));
    }
    SECTION("rank-deficient field sets are rejected") {
        std::vector<Vec> repeated(3, Vec{1.0, 0.0});
        auto evaluator = [](const Vec&) { return 1.0; };
        REQUIRE_THROWS_AS(assemble_delta_tensor(evaluator, repeated), std::invalid_argument);
        std::vector<Vec> too_few{Vec{1.0, 0.0}, Vec{0.0, 1.0}};
        REQUIRE_THROWS_AS(assemble_delta_tensor(evaluator, too_few), std::invalid_argument);
    }
}
