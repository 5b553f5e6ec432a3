#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "interphase/quadrature.hpp"
#include "interphase/tensor.hpp"
#include "interphase/util.hpp"

namespace interphase {

/// Which side of an interface a field sample was taken on. The patch normal
/// is directed outward from the plus side: points at position + eps*normal
/// lie on the minus side, points at position - eps*normal on the plus side.
/// A positive interface shift moves the interface along +normal, growing the
/// plus phase into the minus region.
enum class Side { Minus, Plus };

/// Raw field samples on one side of an interface.
struct SideFields {
    Vec E;  // electric field
    Vec J;  // current density
};

/// Interface-adapted field components: the tangential part of E and the
/// normal part of J, both continuous across a perfect interface. The side
/// the samples were taken on must be declared by whoever attaches them.
struct TangentialNormal {
    Vec E_tangential;
    Vec J_normal;
    std::optional<Side> side;
};

/// One quadrature patch on an interface: a point, the unit normal at that
/// point (directed outward from the plus side, see Side), and the patch
/// measure (length in 2D, area in 3D). Field samples and layer data are
/// attached as needed by the consumer.
class InterfacePatch {
  public:
    InterfacePatch(Vec point, Vec unit_normal, double area)
        : point_(point), normal_(unit_normal), area_(area) {
        require(point.dim() == unit_normal.dim(), "patch point/normal dimension mismatch");
        require(std::isfinite(area) && area > 0, "patch area must be positive");
        require(std::abs(unit_normal.norm() - 1.0) <= 1e-12,
                "patch normal must be a unit vector");
    }

    const Vec& point() const { return point_; }
    const Vec& unit_normal() const { return normal_; }
    double area() const { return area_; }
    int dim() const { return point_.dim(); }

    // Optional attachments.
    std::optional<SideFields> minus;       // fields on the minus side
    std::optional<SideFields> plus;        // fields on the plus side
    std::optional<TangentialNormal> tn;    // interface-adapted components
    double thickness = 0.0;                // local layer thickness
    double shift_amplitude = 0.0;          // local normal displacement of the interface
    double thickness_gradient = 0.0;       // |surface gradient| of the thickness

  private:
    Vec point_;
    Vec normal_;
    double area_;
};

/// A discrete interface: a set of patches plus the volume of the periodic
/// cell (or representative volume) the interface lives in, used to normalize
/// surface integrals into effective-property corrections.
class InterfaceMesh {
  public:
    InterfaceMesh(int dim, double cell_volume) : dim_(dim), cell_volume_(cell_volume) {
        require(dim >= 1 && dim <= 3, "mesh dimension must be 1, 2, or 3");
        require(std::isfinite(cell_volume) && cell_volume > 0,
                "cell volume must be positive");
    }

    void add_patch(InterfacePatch patch) {
        require(patch.dim() == dim_, "patch dimension does not match mesh");
        patches_.push_back(std::move(patch));
    }

    int dim() const { return dim_; }
    double cell_volume() const { return cell_volume_; }
    const std::vector<InterfacePatch>& patches() const { return patches_; }
    std::vector<InterfacePatch>& patches() { return patches_; }
    size_t size() const { return patches_.size(); }

    double total_area() const {
        KahanSum s;
        for (const auto& p : patches_) s.add(p.area());
        return s.value();
    }

  private:
    int dim_;
    double cell_volume_;
    std::vector<InterfacePatch> patches_;
};

/// A flat interface in a periodic cell. Fields are uniform on each side of a
/// flat interface, so a single patch carrying the full cross-section suffices.
inline InterfaceMesh plane_mesh(const Vec& unit_normal, double cross_section_area = 1.0,
                                double cell_volume = 1.0, std::optional<Vec> point = {}) {
    InterfaceMesh mesh(unit_normal.dim(), cell_volume);
    Vec p = point ? *point : Vec::zero(unit_normal.dim());
    mesh.add_patch(InterfacePatch(p, unit_normal, cross_section_area));
    return mesh;
}

/// A circle of the given radius, discretized into equal arcs with outward
/// radial normals (2D). The enclosed region is the plus side, so a positive
/// shift grows the inclusion.
inline InterfaceMesh circle_mesh(double radius, int n_patches, double cell_volume = 1.0,
                                 std::optional<Vec> center = {}) {
    require(radius > 0, "circle radius must be positive");
    require(n_patches >= 3, "circle mesh needs at least 3 patches");
    Vec c = center ? *center : Vec::zero(2);
    require(c.dim() == 2, "circle center must be 2D");
    InterfaceMesh mesh(2, cell_volume);
    double arc = 2.0 * M_PI * radius / n_patches;
    for (int i = 0; i < n_patches; ++i) {
        double phi = 2.0 * M_PI * (i + 0.5) / n_patches;
        Vec n({std::cos(phi), std::sin(phi)});
        Vec p({c[0] + radius * n[0], c[1] + radius * n[1]});
        mesh.add_patch(InterfacePatch(p, n, arc));
    }
    return mesh;
}

/// A sphere of the given radius with outward radial normals (3D), using
/// Gauss-Legendre nodes in cos(polar angle) and a uniform azimuthal grid.
/// This rule integrates smooth surface fields to high order. The enclosed
/// region is the plus side.
inline InterfaceMesh sphere_mesh(double radius, int n_polar, int n_azimuth,
                                 double cell_volume = 1.0, std::optional<Vec> center = {}) {
    require(radius > 0, "sphere radius must be positive");
    require(n_polar >= 2 && n_azimuth >= 3, "sphere mesh resolution too small");
    Vec c = center ? *center : Vec::zero(3);
    require(c.dim() == 3, "sphere center must be 3D");
    InterfaceMesh mesh(3, cell_volume);
    auto nodes = gauss_legendre(n_polar);
    double dphi = 2.0 * M_PI / n_azimuth;
    for (auto [mu, w] : nodes) {
        double sin_theta = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int j = 0; j < n_azimuth; ++j) {
            double phi = dphi * (j + 0.5);
            Vec n({sin_theta * std::cos(phi), sin_theta * std::sin(phi), mu});
            Vec p({c[0] + radius * n[0], c[1] + radius * n[1], c[2] + radius * n[2]});
            mesh.add_patch(InterfacePatch(p, n, radius * radius * w * dphi));
        }
    }
    return mesh;
}

}  // namespace interphase
