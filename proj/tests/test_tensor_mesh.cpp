#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "interphase/mesh.hpp"
#include "interphase/quadrature.hpp"
#include "interphase/tensor.hpp"
#include "interphase/util.hpp"

using namespace interphase;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("vectors validate dimension and content", "[tensor]") {
    Vec v{1.0, 2.0, 3.0};
    REQUIRE(v.dim() == 3);
    REQUIRE_THAT(v.dot(v), WithinRel(14.0, 1e-15));
    REQUIRE_THAT(v.norm(), WithinRel(std::sqrt(14.0), 1e-15));
    REQUIRE_THROWS_AS(Vec{}.dot(v), std::invalid_argument);
    REQUIRE_THROWS_AS((Vec{1.0, std::nan("")}), std::invalid_argument);
    REQUIRE_THROWS_AS((Vec{1.0, 2.0, 3.0, 4.0}), std::invalid_argument);
    Vec sum = v + v * 2.0;
    REQUIRE_THAT(sum[2], WithinRel(9.0, 1e-15));
}

TEST_CASE("symmetric matrices mirror entries and act on vectors", "[tensor]") {
    SymMat m(2);
    m.set(0, 1, 0.5);
    m.set(0, 0, 2.0);
    m.set(1, 1, 3.0);
    REQUIRE(m(1, 0) == 0.5);
    Vec mv = m.apply(Vec{1.0, 2.0});
    REQUIRE_THAT(mv[0], WithinRel(3.0, 1e-15));
    REQUIRE_THAT(mv[1], WithinRel(6.5, 1e-15));
    REQUIRE(SymMat::identity(3)(2, 2) == 1.0);
    REQUIRE(m.max_abs() == 3.0);
}

TEST_CASE("conductivity tensors enforce symmetry and positivity", "[tensor]") {
    const double asym[] = {1.0, 0.2, 0.3, 1.0};  // not symmetric
    REQUIRE_THROWS_AS(ConductivityTensor(2, std::span<const double>(asym)),
                      std::invalid_argument);
    SymMat indef(2);
    indef.set(0, 0, 1.0);
    indef.set(1, 1, -2.0);
    REQUIRE_THROWS_AS(ConductivityTensor(indef), std::invalid_argument);
    REQUIRE_THROWS_AS(make_isotropic(0.0, 2), std::invalid_argument);

    SymMat m(3);
    m.set(0, 0, 4.0);
    m.set(1, 1, 2.5);
    m.set(2, 2, 1.5);
    m.set(0, 1, 0.7);
    m.set(1, 2, -0.4);
    ConductivityTensor t(m);
    SymMat prod(3);
    const SymMat inv = t.inverse().mat();
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += m(i, k) * inv(k, j);
            prod.set(i, j, s);
        }
    REQUIRE_THAT((prod - SymMat::identity(3)).max_abs(), WithinAbs(0.0, 1e-14));

    auto eig = t.eigenvalues();
    REQUIRE(eig[0] > 0);
    REQUIRE(eig[0] <= eig[1]);
    REQUIRE(eig[1] <= eig[2]);
    REQUIRE_THAT(eig[0] + eig[1] + eig[2], WithinRel(8.0, 1e-12));  // trace
}

TEST_CASE("eigenvalues of a known matrix", "[tensor]") {
    SymMat m(2);
    m.set(0, 0, 2.0);
    m.set(1, 1, 2.0);
    m.set(0, 1, 1.0);
    auto eig = detail::sym_eigenvalues(m);
    REQUIRE_THAT(eig[0], WithinRel(1.0, 1e-12));
    REQUIRE_THAT(eig[1], WithinRel(3.0, 1e-12));
}

TEST_CASE("field decomposition splits into tangential and normal parts", "[tensor]") {
    Vec n{0.0, 0.0, 1.0};
    Vec f{1.0, -2.0, 3.0};
    FieldSplit s = decompose_field(f, n);
    REQUIRE_THAT(s.normal[2], WithinRel(3.0, 1e-15));
    REQUIRE_THAT(s.tangential[0], WithinRel(1.0, 1e-15));
    REQUIRE_THAT(s.tangential.dot(n), WithinAbs(0.0, 1e-15));
    Vec recomposed = s.tangential + s.normal;
    REQUIRE_THAT((recomposed - f).norm(), WithinAbs(0.0, 1e-15));
    REQUIRE_THROWS_AS(decompose_field(f, Vec{0.0, 0.0, 2.0}), std::invalid_argument);
}

TEST_CASE("quadratic forms agree between raw matrices and tensors", "[tensor]") {
    SymMat m(2);
    m.set(0, 0, 2.0);
    m.set(1, 1, 5.0);
    m.set(0, 1, 1.0);
    ConductivityTensor t(m);
    Vec v{0.3, -0.7};
    REQUIRE_THAT(quadratic_form(m, v), WithinRel(quadratic_form(t, v), 1e-15));
    REQUIRE_THAT(quadratic_form(m, v), WithinRel(v.dot(m.apply(v)), 1e-15));
}

TEST_CASE("gauss-legendre rules hit polynomials exactly", "[quadrature]") {
    auto rule = gauss_legendre(7);
    double wsum = 0, x12 = 0;
    for (auto [x, w] : rule) {
        wsum += w;
        x12 += w * std::pow(x, 12);
    }
    REQUIRE_THAT(wsum, WithinRel(2.0, 1e-14));
    REQUIRE_THAT(x12, WithinRel(2.0 / 13.0, 1e-13));  // degree 12 < 2*7
}

TEST_CASE("adaptive matrix quadrature integrates smooth and broken integrands",
          "[quadrature]") {
    auto f = [](double x) {
        SymMat m(2);
        m.set(0, 0, std::exp(x));
        m.set(1, 1, x * x * x);
        m.set(0, 1, std::sin(3 * x));
        return m;
    };
    SymMat integral = integrate_matrix(f, 0.0, 2.0, 2);
    REQUIRE_THAT(integral(0, 0), WithinRel(std::exp(2.0) - 1.0, 1e-12));
    REQUIRE_THAT(integral(1, 1), WithinRel(4.0, 1e-12));
    REQUIRE_THAT(integral(0, 1), WithinRel((1.0 - std::cos(6.0)) / 3.0, 1e-11));

    // A jump aligned with a declared breakpoint is integrated exactly.
    auto step = [](double x) {
        SymMat m(1);
        m.set(0, 0, x < 0.3 ? 2.0 : 5.0);
        return m;
    };
    SymMat s = integrate_matrix(step, 0.0, 1.0, 1, {0.3});
    REQUIRE_THAT(s(0, 0), WithinRel(0.3 * 2.0 + 0.7 * 5.0, 1e-12));

    QuadratureOptions strict;
    strict.max_depth = 2;
    auto rough = [](double x) {
        SymMat m(1);
        m.set(0, 0, x < 0.31 ? 0.0 : 1.0);  // jump off any panel boundary
        return m;
    };
    REQUIRE_THROWS_AS(integrate_matrix(rough, 0.0, 1.0, 1, {}, strict), QuadratureError);
}

TEST_CASE("interface patches validate their geometry", "[mesh]") {
    REQUIRE_THROWS_AS(InterfacePatch(Vec{0.0, 0.0}, Vec{1.0, 1.0}, 1.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(InterfacePatch(Vec{0.0, 0.0}, Vec{1.0, 0.0}, 0.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(InterfacePatch(Vec{0.0, 0.0, 0.0}, Vec{1.0, 0.0}, 1.0),
                      std::invalid_argument);
    InterfaceMesh mesh(2, 1.0);
    REQUIRE_THROWS_AS(mesh.add_patch(InterfacePatch(Vec{0.0, 0.0, 0.0},
                                                    Vec{0.0, 0.0, 1.0}, 1.0)),
                      std::invalid_argument);
}

TEST_CASE("circle meshes cover the circumference with balanced normals", "[mesh]") {
    InterfaceMesh mesh = circle_mesh(0.3, 64);
    REQUIRE(mesh.size() == 64);
    REQUIRE_THAT(mesh.total_area(), WithinRel(2.0 * M_PI * 0.3, 1e-13));
    KahanSum nx, ny;
    for (const auto& p : mesh.patches()) {
        nx.add(p.area() * p.unit_normal()[0]);
        ny.add(p.area() * p.unit_normal()[1]);
        REQUIRE_THAT(p.unit_normal().norm(), WithinRel(1.0, 1e-12));
    }
    REQUIRE_THAT(nx.value(), WithinAbs(0.0, 1e-13));
    REQUIRE_THAT(ny.value(), WithinAbs(0.0, 1e-13));
}

TEST_CASE("sphere meshes integrate surface moments to high order", "[mesh]") {
    const double R = 1.7;
    InterfaceMesh mesh = sphere_mesh(R, 24, 48);
    REQUIRE_THAT(mesh.total_area(), WithinRel(4.0 * M_PI * R * R, 1e-12));
    // Second moment of the unit normal over the sphere: (area / 3) I.
    SymMat moment(3);
    for (const auto& p : mesh.patches()) {
        const Vec& n = p.unit_normal();
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                moment.set(i, j, moment(i, j) + p.area() * n[i] * n[j]);
    }
    SymMat expected = SymMat::identity(3) * (4.0 * M_PI * R * R / 3.0);
    REQUIRE_THAT((moment - expected).max_abs() / expected(0, 0), WithinAbs(0.0, 1e-12));
}

TEST_CASE("plane meshes carry a single patch with the cell volume", "[mesh]") {
    InterfaceMesh mesh = plane_mesh(Vec{0.0, 1.0}, 2.5, 4.0);
    REQUIRE(mesh.size() == 1);
    REQUIRE(mesh.cell_volume() == 4.0);
    REQUIRE(mesh.patches()[0].area() == 2.5);
}
