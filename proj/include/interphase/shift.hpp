#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "interphase/mesh.hpp"
#include "interphase/quadrature.hpp"
#include "interphase/tensor.hpp"
#include "interphase/util.hpp"

namespace interphase {

/// An ordered stack of interphase layers at one interface: conductivities
/// together with their fractions of the total layer thickness. Only the
/// thickness-weighted mean of the conductivities and of their inverses enter
/// the first-order correction.
class InterphaseStack {
  public:
    InterphaseStack(std::vector<ConductivityTensor> conductivities,
                    std::vector<double> fractions)
        : sigmas_(std::move(conductivities)), fractions_(std::move(fractions)) {
        require(!sigmas_.empty(), "interphase stack must be nonempty");
        require(sigmas_.size() == fractions_.size(),
                "stack conductivity/fraction lists must have equal length");
        KahanSum sum;
        for (double f : fractions_) {
            require(std::isfinite(f) && f >= 0, "stack fractions must be nonnegative");
            sum.add(f);
        }
        require(std::abs(sum.value() - 1.0) <= 1e-12, "stack fractions must sum to 1");
        for (const auto& s : sigmas_)
            require(s.dim() == sigmas_.front().dim(), "stack tensors must share a dimension");
    }

    int dim() const { return sigmas_.front().dim(); }
    size_t size() const { return sigmas_.size(); }
    const std::vector<ConductivityTensor>& conductivities() const { return sigmas_; }
    const std::vector<double>& fractions() const { return fractions_; }

    /// Thickness-weighted arithmetic mean of the layer conductivities.
    ConductivityTensor mean_sigma() const {
        SymMat acc(dim());
        for (size_t k = 0; k < sigmas_.size(); ++k)
            acc = acc + sigmas_[k].mat() * fractions_[k];
        return ConductivityTensor(acc);
    }

    /// Thickness-weighted mean of the layer resistivities (inverse tensors).
    ConductivityTensor mean_inverse() const {
        SymMat acc(dim());
        for (size_t k = 0; k < sigmas_.size(); ++k)
            acc = acc + sigmas_[k].inverse().mat() * fractions_[k];
        return ConductivityTensor(acc);
    }

  private:
    std::vector<ConductivityTensor> sigmas_;
    std::vector<double> fractions_;
};

/// Conductivity profile through the thickness of a graded layer, sigma(z) for
/// z measured from the reference interface. Given either as a callable rule
/// or as a sampled table with a declared interpolation (piecewise constant or
/// piecewise linear). Finite jumps at the ends of the layer are permitted.
class GradedProfile {
  public:
    static GradedProfile from_function(std::function<ConductivityTensor(double)> fn,
                                       std::vector<double> breakpoints = {}) {
        require(static_cast<bool>(fn), "graded profile needs a callable");
        GradedProfile p;
        p.kind_ = Kind::Callable;
        p.fn_ = std::move(fn);
        p.grid_ = std::move(breakpoints);
        return p;
    }

    /// Table of constant segments: breakpoints z_0 < z_1 < ... < z_K bound K
    /// segments with the given values; z_0 must be 0.
    static GradedProfile piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<ConductivityTensor> values) {
        validate_table(breakpoints, values, values.size() + 1);
        GradedProfile p;
        p.kind_ = Kind::PiecewiseConstant;
        p.grid_ = std::move(breakpoints);
        p.values_ = std::move(values);
        return p;
    }

    /// Table of nodal values with linear interpolation between nodes; the
    /// first node must be at z = 0.
    static GradedProfile piecewise_linear(std::vector<double> nodes,
                                          std::vector<ConductivityTensor> values) {
        require(values.size() >= 2, "piecewise-linear profile needs at least two nodes");
        validate_table(nodes, values, values.size());
        GradedProfile p;
        p.kind_ = Kind::PiecewiseLinear;
        p.grid_ = std::move(nodes);
        p.values_ = std::move(values);
        return p;
    }

    /// The piecewise-constant profile equivalent to a layer stack of the
    /// given total thickness.
    static GradedProfile from_stack(const InterphaseStack& stack, double total_thickness) {
        require(std::isfinite(total_thickness) && total_thickness > 0,
                "stack profile needs a positive total thickness");
        std::vector<double> cuts{0.0};
        std::vector<ConductivityTensor> values;
        KahanSum z;
        for (size_t k = 0; k < stack.size(); ++k) {
            if (stack.fractions()[k] == 0) continue;  // zero-width layers do not contribute
            z.add(stack.fractions()[k] * total_thickness);
            cuts.push_back(z.value());
            values.push_back(stack.conductivities()[k]);
        }
        require(!values.empty(), "stack profile needs at least one layer of nonzero width");
        cuts.back() = total_thickness;  // guard the rounding of the running sum
        return piecewise_constant(std::move(cuts), std::move(values));
    }

    ConductivityTensor evaluate(double z) const {
        switch (kind_) {
            case Kind::Callable:
                return fn_(z);
            case Kind::PiecewiseConstant: {
                size_t seg = locate(z);
                return values_[seg];
            }
            case Kind::PiecewiseLinear: {
                size_t seg = locate(z);
                double z0 = grid_[seg], z1 = grid_[seg + 1];
                double t = (z - z0) / (z1 - z0);
                t = std::clamp(t, 0.0, 1.0);
                SymMat m = values_[seg].mat() * (1.0 - t) + values_[seg + 1].mat() * t;
                return ConductivityTensor(m);
            }
        }
        throw std::logic_error("unreachable");
    }

    /// Through-thickness average (1/h) * integral of sigma(z) over [0, h].
    SymMat mean_sigma(double h, const QuadratureOptions& opts = {}) const {
        return mean_of(h, opts, /*invert=*/false);
    }

    /// Through-thickness average (1/h) * integral of sigma(z)^-1 over [0, h].
    SymMat mean_inverse(double h, const QuadratureOptions& opts = {}) const {
        return mean_of(h, opts, /*invert=*/true);
    }

  private:
    enum class Kind { Callable, PiecewiseConstant, PiecewiseLinear };

    static void validate_table(const std::vector<double>& grid,
                               const std::vector<ConductivityTensor>& values,
                               size_t expected_grid_size) {
        require(!values.empty(), "graded profile table must be nonempty");
        require(grid.size() == expected_grid_size,
                "graded profile table has mismatched grid and value counts");
        require(grid.front() == 0.0, "graded profile must start at z = 0");
        for (size_t i = 0; i + 1 < grid.size(); ++i)
            require(grid[i] < grid[i + 1], "graded profile grid must be strictly increasing");
        for (const auto& v : values)
            require(v.dim() == values.front().dim(),
                    "graded profile tensors must share a dimension");
    }

    size_t locate(double z) const {
        double zmax = grid_.back();
        require(z >= -1e-12 * std::max(zmax, 1.0) && z <= zmax * (1.0 + 1e-12) + 1e-300,
                "graded profile evaluated outside its table domain");
        z = std::clamp(z, 0.0, zmax);
        size_t seg = 0;
        while (seg + 2 < grid_.size() && z >= grid_[seg + 1]) ++seg;
        return seg;
    }

    SymMat mean_of(double h, const QuadratureOptions& opts, bool invert) const {
        require(std::isfinite(h) && h > 0, "layer thickness must be positive");
        if (kind_ == Kind::PiecewiseConstant) {
            double zmax = grid_.back();
            require(h <= zmax * (1.0 + 1e-12),
                    "layer thickness exceeds the profile table domain");
            // Exact segment-overlap sum; no quadrature error on constant segments.
            SymMat acc(values_.front().dim());
            for (size_t k = 0; k < values_.size(); ++k) {
                double overlap = std::min(h, grid_[k + 1]) - std::min(h, grid_[k]);
                if (overlap <= 0) continue;
                const SymMat& m = invert ? values_[k].inverse().mat() : values_[k].mat();
                acc = acc + m * overlap;
            }
            return acc * (1.0 / h);
        }
        int dim;
        if (kind_ == Kind::PiecewiseLinear) {
            double zmax = grid_.back();
            require(h <= zmax * (1.0 + 1e-12),
                    "layer thickness exceeds the profile table domain");
            dim = values_.front().dim();
        } else {
            dim = fn_(h / 2).dim();
        }
        auto integrand = [&](double z) -> SymMat {
            ConductivityTensor s = evaluate(std::min(z, h));
            return invert ? s.inverse().mat() : s.mat();
        };
        SymMat integral = integrate_matrix(integrand, 0.0, h, dim, grid_, opts);
        return integral * (1.0 / h);
    }

    Kind kind_ = Kind::Callable;
    std::function<ConductivityTensor(double)> fn_;
    std::vector<double> grid_;
    std::vector<ConductivityTensor> values_;
};

struct ShiftOptions {
    bool check_continuity = true;   // verify two-sided samples satisfy interface continuity
    double continuity_tol = 1e-6;   // relative; solver-sampled fields carry discretization error
    QuadratureOptions quadrature{};  // through-thickness integrals of graded profiles
};

/// Result of a first-order correction: the energy-form value
/// E0 . (delta sigma*) E0 for the applied field the input fields belong to.
struct DeltaSigmaResult {
    double value = 0.0;
    std::optional<SymMat> tensor;       // filled when assembled from several applied fields
    std::optional<Vec> applied_field;   // E0, when the caller tracks it
    double max_thickness_gradient = 0.0;  // diagnostic: slow-variation assumption on h
};

namespace detail {

inline void check_patch_continuity(const InterfacePatch& p, double rel_tol, size_t index) {
    const Vec& n = p.unit_normal();
    auto em = decompose_field(p.minus->E, n);
    auto ep = decompose_field(p.plus->E, n);
    auto jm = decompose_field(p.minus->J, n);
    auto jp = decompose_field(p.plus->J, n);
    double e_scale = std::max({p.minus->E.norm(), p.plus->E.norm(), 1e-300});
    double j_scale = std::max({p.minus->J.norm(), p.plus->J.norm(), 1e-300});
    bool ok = (ep.tangential - em.tangential).norm() <= rel_tol * e_scale &&
              (jp.normal - jm.normal).norm() <= rel_tol * j_scale;
    require(ok, "patch " + std::to_string(index) +
                    ": two-sided fields violate interface continuity beyond tolerance");
}

inline const TangentialNormal& checked_tn(const InterfacePatch& p, size_t index) {
    require(p.tn.has_value(),
            "patch " + std::to_string(index) + ": interface field components missing");
    require(p.tn->side.has_value(),
            "patch " + std::to_string(index) + ": sampled side not declared");
    const Vec& n = p.unit_normal();
    const Vec& et = p.tn->E_tangential;
    const Vec& jn = p.tn->J_normal;
    require(std::abs(et.dot(n)) <= 1e-12 * std::max(et.norm(), 1.0),
            "patch " + std::to_string(index) + ": E_t is not tangential");
    Vec jn_off = jn - n * jn.dot(n);
    require(jn_off.norm() <= 1e-12 * std::max(jn.norm(), 1.0),
            "patch " + std::to_string(index) + ": J_n is not parallel to the normal");
    return *p.tn;
}

inline double checked_thickness(const InterfacePatch& p, size_t index) {
    require(std::isfinite(p.thickness) && p.thickness >= 0,
            "patch " + std::to_string(index) + ": thickness must be nonnegative");
    return p.thickness;
}

}  // namespace detail

/// First-order change of the effective energy when the interface is shifted
/// along its normal by the given signed per-patch distances; a positive shift
/// grows the plus phase. Uses raw two-sided field samples:
/// per patch, shift * (E_minus . J_plus - E_plus . J_minus), integrated over
/// the interface and divided by the cell volume.
inline DeltaSigmaResult interface_shift_delta(const InterfaceMesh& mesh,
                                              const std::vector<double>& shifts,
                                              const ShiftOptions& opts = {}) {
    require(shifts.size() == mesh.size(), "need exactly one shift per patch");
    KahanSum acc;
    double max_grad = 0;
    const auto& patches = mesh.patches();
    for (size_t i = 0; i < patches.size(); ++i) {
        const InterfacePatch& p = patches[i];
        require(std::isfinite(shifts[i]), "shifts must be finite");
        require(p.minus.has_value() && p.plus.has_value(),
                "patch " + std::to_string(i) + ": interface shift needs both-side fields");
        if (opts.check_continuity) detail::check_patch_continuity(p, opts.continuity_tol, i);
        double bilinear = p.minus->E.dot(p.plus->J) - p.plus->E.dot(p.minus->J);
        acc.add(p.area() * shifts[i] * bilinear);
        max_grad = std::max(max_grad, std::abs(p.thickness_gradient));
    }
    DeltaSigmaResult r;
    r.value = acc.value() / mesh.cell_volume();
    r.max_thickness_gradient = max_grad;
    return r;
}

/// Same, taking the shift of each patch from its shift_amplitude field.
inline DeltaSigmaResult interface_shift_delta(const InterfaceMesh& mesh,
                                              const ShiftOptions& opts = {}) {
    std::vector<double> shifts;
    shifts.reserve(mesh.size());
    for (const auto& p : mesh.patches()) shifts.push_back(p.shift_amplitude);
    return interface_shift_delta(mesh, shifts, opts);
}

namespace detail {

/// Shared quadrature loop of the one-sided (tangential/normal) forms:
/// per patch, h * (E_t . dS E_t - J_n . dR J_n).
template <typename DeltaMats>
DeltaSigmaResult tn_quadrature(const InterfaceMesh& mesh, DeltaMats&& delta_mats) {
    KahanSum acc;
    double max_grad = 0;
    const auto& patches = mesh.patches();
    for (size_t i = 0; i < patches.size(); ++i) {
        const InterfacePatch& p = patches[i];
        const TangentialNormal& tn = checked_tn(p, i);
        double h = checked_thickness(p, i);
        max_grad = std::max(max_grad, std::abs(p.thickness_gradient));
        if (h == 0) continue;
        const auto& [dS, dR] = delta_mats(h);
        acc.add(p.area() * h *
                (quadratic_form(dS, tn.E_tangential) - quadratic_form(dR, tn.J_normal)));
    }
    DeltaSigmaResult r;
    r.value = acc.value() / mesh.cell_volume();
    r.max_thickness_gradient = max_grad;
    return r;
}

}  // namespace detail

/// One-sided form of the interface-shift formula, using the components that
/// are continuous across a perfect interface (so either side's samples give
/// the same value): per patch, with h the patch thickness playing the role of
/// the shift distance, h * ((sigma+ - sigma-) E_t . E_t
///                          - ((sigma+)^-1 - (sigma-)^-1) J_n . J_n).
inline DeltaSigmaResult interface_shift_delta_tn(const InterfaceMesh& mesh,
                                                 const ConductivityTensor& sigma_plus,
                                                 const ConductivityTensor& sigma_minus,
                                                 const ShiftOptions& = {}) {
    require(sigma_plus.dim() == mesh.dim() && sigma_minus.dim() == mesh.dim(),
            "tensor dimension does not match mesh");
    const std::pair<SymMat, SymMat> mats{
        sigma_plus.mat() - sigma_minus.mat(),
        sigma_plus.inverse().mat() - sigma_minus.inverse().mat()};
    return detail::tn_quadrature(mesh, [&](double) -> const std::pair<SymMat, SymMat>& {
        return mats;
    });
}

/// Sum of simultaneous shifts of several interfaces of the same cell.
inline DeltaSigmaResult multi_interface_shift(const std::vector<InterfaceMesh>& meshes,
                                              const std::vector<std::vector<double>>& shifts,
                                              const ShiftOptions& opts = {}) {
    require(meshes.size() == shifts.size(), "need one shift list per interface");
    DeltaSigmaResult total;
    KahanSum acc;
    for (size_t m = 0; m < meshes.size(); ++m) {
        DeltaSigmaResult r = interface_shift_delta(meshes[m], shifts[m], opts);
        acc.add(r.value);
        total.max_thickness_gradient =
            std::max(total.max_thickness_gradient, r.max_thickness_gradient);
    }
    total.value = acc.value();
    return total;
}

/// First-order correction for a thin layer of conductivity sigma2 inserted at
/// the interface, replacing material of the bulk phase sigma1 over the local
/// thickness h; the unperturbed fields are sampled on the sigma1 side. The
/// correction per patch is
///   h * ((sigma2 - sigma1) E_t . E_t - ((sigma2)^-1 - (sigma1)^-1) J_n . J_n),
/// positive when the inserted layer conducts better than what it replaces.
inline DeltaSigmaResult single_interphase_delta(const InterfaceMesh& mesh,
                                                const ConductivityTensor& sigma1,
                                                const ConductivityTensor& sigma2,
                                                const ShiftOptions& = {}) {
    require(sigma1.dim() == mesh.dim() && sigma2.dim() == mesh.dim(),
            "tensor dimension does not match mesh");
    const std::pair<SymMat, SymMat> mats{
        sigma2.mat() - sigma1.mat(),
        sigma2.inverse().mat() - sigma1.inverse().mat()};
    return detail::tn_quadrature(mesh, [&](double) -> const std::pair<SymMat, SymMat>& {
        return mats;
    });
}

/// Stack version: several layers inserted simultaneously, with fractions of
/// the local thickness. Only the stack's mean conductivity and mean
/// resistivity enter.
inline DeltaSigmaResult multi_interphase_delta(const InterfaceMesh& mesh,
                                               const ConductivityTensor& sigma1,
                                               const InterphaseStack& stack,
                                               const ShiftOptions& = {}) {
    require(sigma1.dim() == mesh.dim(), "tensor dimension does not match mesh");
    require(stack.dim() == mesh.dim(), "stack dimension does not match mesh");
    const std::pair<SymMat, SymMat> mats{
        stack.mean_sigma().mat() - sigma1.mat(),
        stack.mean_inverse().mat() - sigma1.inverse().mat()};
    return detail::tn_quadrature(mesh, [&](double) -> const std::pair<SymMat, SymMat>& {
        return mats;
    });
}

/// Graded version: the layer's conductivity varies through the thickness; the
/// stack means become through-thickness averages of sigma(z) and sigma(z)^-1,
/// computed by adaptive quadrature (exact for piecewise-constant tables).
inline DeltaSigmaResult graded_interphase_delta(const InterfaceMesh& mesh,
                                                const ConductivityTensor& sigma1,
                                                const GradedProfile& profile,
                                                const ShiftOptions& opts = {}) {
    require(sigma1.dim() == mesh.dim(), "tensor dimension does not match mesh");
    std::map<double, std::pair<SymMat, SymMat>> cache;
    return detail::tn_quadrature(mesh, [&](double h) -> const std::pair<SymMat, SymMat>& {
        auto it = cache.find(h);
        if (it == cache.end()) {
            std::pair<SymMat, SymMat> mats{
                profile.mean_sigma(h, opts.quadrature) - sigma1.mat(),
                profile.mean_inverse(h, opts.quadrature) - sigma1.inverse().mat()};
            it = cache.emplace(h, std::move(mats)).first;
        }
        return it->second;
    });
}

/// Applied fields that determine a symmetric d x d tensor from quadratic-form
/// values: the unit basis vectors followed by their pairwise sums.
inline std::vector<Vec> canonical_applied_fields(int dim) {
    require(dim >= 1 && dim <= 3, "dimension must be 1..3");
    std::vector<Vec> fields;
    for (int i = 0; i < dim; ++i) {
        Vec e(dim);
        e[i] = 1.0;
        fields.push_back(e);
    }
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            Vec e(dim);
            e[i] = 1.0;
            e[j] = 1.0;
            fields.push_back(e);
        }
    return fields;
}

/// Recover the symmetric tensor delta sigma* from quadratic-form values
/// Q(E0) = E0 . (delta sigma*) E0 evaluated at the given applied fields.
/// The fields must determine all d(d+1)/2 independent entries; the canonical
/// set does. Solved in least-squares sense so extra consistent fields are
/// allowed.
inline SymMat assemble_delta_tensor(const std::function<double(const Vec&)>& evaluator,
                                    const std::vector<Vec>& applied_fields) {
    require(!applied_fields.empty(), "assemble_delta_tensor: no applied fields");
    const int d = applied_fields.front().dim();
    const int m = d * (d + 1) / 2;
    const int n = static_cast<int>(applied_fields.size());
    require(n >= m, "assemble_delta_tensor: not enough applied fields for the dimension");

    // Unknown ordering: diagonal entries first, then upper off-diagonals.
    std::vector<std::array<int, 2>> idx;
    for (int i = 0; i < d; ++i) idx.push_back({i, i});
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) idx.push_back({i, j});

    std::vector<double> A(static_cast<size_t>(n) * m), b(n);
    for (int r = 0; r < n; ++r) {
        const Vec& v = applied_fields[r];
        require(v.dim() == d, "assemble_delta_tensor: mixed field dimensions");
        for (int c = 0; c < m; ++c) {
            auto [i, j] = idx[c];
            A[r * m + c] = (i == j) ? v[i] * v[i] : 2.0 * v[i] * v[j];
        }
        b[r] = evaluator(v);
    }

    // Normal equations, solved by Gaussian elimination with partial pivoting.
    std::vector<double> N(static_cast<size_t>(m) * m, 0.0), rhs(m, 0.0);
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < m; ++i) {
            rhs[i] += A[r * m + i] * b[r];
            for (int j = 0; j < m; ++j) N[i * m + j] += A[r * m + i] * A[r * m + j];
        }
    }
    double scale = 0;
    for (double v : N) scale = std::max(scale, std::abs(v));
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(N[r * m + col]) > std::abs(N[piv * m + col])) piv = r;
        if (std::abs(N[piv * m + col]) <= 1e-10 * std::max(scale, 1e-300))
            throw std::invalid_argument(
                "assemble_delta_tensor: applied fields are rank deficient");
        if (piv != col) {
            for (int j = 0; j < m; ++j) std::swap(N[piv * m + j], N[col * m + j]);
            std::swap(rhs[piv], rhs[col]);
        }
        for (int r = col + 1; r < m; ++r) {
            double f = N[r * m + col] / N[col * m + col];
            for (int j = col; j < m; ++j) N[r * m + j] -= f * N[col * m + j];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(m);
    for (int r = m - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int j = r + 1; j < m; ++j) s -= N[r * m + j] * x[j];
        x[r] = s / N[r * m + r];
    }

    SymMat result(d);
    for (int c = 0; c < m; ++c) result.set(idx[c][0], idx[c][1], x[c]);
    return result;
}

}  // namespace interphase
