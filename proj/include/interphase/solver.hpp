#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "interphase/mesh.hpp"
#include "interphase/tensor.hpp"
#include "interphase/util.hpp"

namespace interphase {

/// A periodic rectangular cell discretized into voxels, each assigned a phase
/// from a shared table of conductivity tensors. Axis order is (x, y[, z]) with
/// row-major storage, last axis fastest; unused axes have extent 1.
class PeriodicCell {
  public:
    PeriodicCell(int dim, std::array<int, 3> shape, std::array<double, 3> lengths,
                 std::vector<std::uint32_t> phase_map,
                 std::vector<ConductivityTensor> phase_table)
        : dim_(dim),
          shape_(shape),
          lengths_(lengths),
          map_(std::move(phase_map)),
          table_(std::move(phase_table)) {
        require(dim == 2 || dim == 3, "cell dimension must be 2 or 3");
        std::size_t nvox = 1;
        for (int a = 0; a < 3; ++a) {
            if (a < dim) {
                require(shape_[a] >= 4, "grid must have at least 4 points per axis");
                require(std::isfinite(lengths_[a]) && lengths_[a] > 0,
                        "cell lengths must be positive");
            } else {
                require(shape_[a] == 1 && lengths_[a] == 1.0,
                        "unused axes must have extent 1 and length 1");
            }
            nvox *= static_cast<std::size_t>(shape_[a]);
        }
        require(map_.size() == nvox, "phase map size does not match the grid");
        require(!table_.empty(), "phase table must be nonempty");
        for (const auto& t : table_)
            require(t.dim() == dim, "phase tensors must match the cell dimension");
        for (std::uint32_t p : map_)
            require(p < table_.size(), "phase map refers to a missing table entry");
    }

    int dim() const { return dim_; }
    const std::array<int, 3>& shape() const { return shape_; }
    const std::array<double, 3>& lengths() const { return lengths_; }
    const std::vector<std::uint32_t>& phase_map() const { return map_; }
    const std::vector<ConductivityTensor>& phase_table() const { return table_; }

    std::size_t n_voxels() const { return map_.size(); }
    double spacing(int axis) const { return lengths_[axis] / shape_[axis]; }
    double volume() const {
        double v = 1;
        for (int a = 0; a < dim_; ++a) v *= lengths_[a];
        return v;
    }
    std::size_t index(int i, int j, int k = 0) const {
        return (static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k;
    }
    const ConductivityTensor& sigma_at(std::size_t voxel) const { return table_[map_[voxel]]; }

    /// Fraction of cell volume carrying the given phase index.
    double phase_fraction(std::uint32_t phase) const {
        std::size_t count = 0;
        for (std::uint32_t p : map_)
            if (p == phase) ++count;
        return static_cast<double>(count) / static_cast<double>(map_.size());
    }

  private:
    int dim_;
    std::array<int, 3> shape_;
    std::array<double, 3> lengths_;
    std::vector<std::uint32_t> map_;
    std::vector<ConductivityTensor> table_;
};

struct SolveOptions {
    double tolerance = 1e-8;      // on the normalized discrete divergence of J
    int max_iterations = 20000;
    double reference_conductivity = 0;  // 0 = automatic: mid-range of phase eigenvalues
};

/// Fields on the period cell for one applied field: fluctuation potential,
/// total field E with <E> = E0, current J = sigma E, and the reached residual.
/// Vector grids are stored voxel-major with the dim components interleaved.
struct PeriodicCellSolution {
    int dim = 0;
    std::array<int, 3> shape{1, 1, 1};
    std::array<double, 3> lengths{1, 1, 1};
    std::vector<double> potential;  // n_voxels entries; E = E0 + forward-difference gradient
    std::vector<double> E;          // n_voxels * dim entries
    std::vector<double> J;          // n_voxels * dim entries
    Vec applied_field;
    Vec mean_current;  // <J>, one column of the effective tensor
    double residual = 0;
    std::vector<double> residual_history;

    std::size_t n_voxels() const { return potential.size(); }
    Vec E_at(std::size_t voxel) const { return extract(E, voxel); }
    Vec J_at(std::size_t voxel) const { return extract(J, voxel); }

  private:
    Vec extract(const std::vector<double>& grid, std::size_t voxel) const {
        Vec v(dim);
        for (int c = 0; c < dim; ++c) v[c] = grid[voxel * dim + c];
        return v;
    }
};

namespace detail {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

/// In-place complex FFT workspace for one grid shape. Plan creation is
/// serialized (FFTW planning is not thread-safe); execution is reentrant.
class SpectralWorkspace {
  public:
    SpectralWorkspace(int rank, const std::array<int, 3>& shape) {
        n_ = 1;
        std::array<int, 3> dims{};
        for (int a = 0; a < rank; ++a) {
            dims[a] = shape[a];
            n_ *= static_cast<std::size_t>(shape[a]);
        }
        buf_.resize(n_);
        auto* raw = reinterpret_cast<fftw_complex*>(buf_.data());
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fwd_ = fftw_plan_dft(rank, dims.data(), raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft(rank, dims.data(), raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~SpectralWorkspace() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    std::size_t size() const { return n_; }
    std::complex<double>* data() { return buf_.data(); }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }  // unnormalized; divide by size()

  private:
    std::size_t n_;
    std::vector<std::complex<double>> buf_;
    fftw_plan fwd_, bwd_;
};

/// Forward-difference modified wavenumber k_m = (exp(i*w_m*dx) - 1)/dx per
/// axis; its conjugate is the matching backward-difference symbol, so the
/// discrete divergence of J uses conj(k).
inline std::vector<std::complex<double>> modified_wavenumbers(int n, double dx) {
    std::vector<std::complex<double>> k(n);
    for (int m = 0; m < n; ++m) {
        int f = (m <= n / 2) ? m : m - n;
        double phase = 2.0 * M_PI * f / n;
        k[m] = (std::complex<double>(std::cos(phase), std::sin(phase)) - 1.0) / dx;
    }
    return k;
}

}  // namespace detail

/// Solve the periodic conduction problem on the cell for the applied field E0
/// by fixed-point iteration on the homogeneous-reference form: the correction
/// field is obtained spectrally from the polarization tau = (sigma - s0 I) E
/// through the discrete (forward-difference) Green operator. Convergence is
/// declared when the normalized discrete divergence of J drops below the
/// tolerance; non-convergence throws SolverError with the residual history.
inline PeriodicCellSolution solve_periodic(const PeriodicCell& cell, const Vec& E0,
                                           const SolveOptions& opts = {}) {
    require(E0.dim() == cell.dim(), "applied field dimension does not match cell");
    require(opts.tolerance > 0, "solver tolerance must be positive");
    const int d = cell.dim();
    const std::size_t nvox = cell.n_voxels();

    double s0 = opts.reference_conductivity;
    if (s0 == 0) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0;
        for (const auto& t : cell.phase_table()) {
            auto ev = t.eigenvalues();
            lo = std::min(lo, ev[0]);
            hi = std::max(hi, ev[d - 1]);
        }
        s0 = 0.5 * (lo + hi);
    }
    require(s0 > 0, "reference conductivity must be positive");

    std::array<std::vector<std::complex<double>>, 3> k;
    for (int a = 0; a < d; ++a)
        k[a] = detail::modified_wavenumbers(cell.shape()[a], cell.spacing(a));

    detail::SpectralWorkspace ws(d, cell.shape());
    std::vector<std::complex<double>> uhat(nvox), divhat(nvox);
    std::array<std::vector<std::complex<double>>, 3> tauhat;
    for (int c = 0; c < d; ++c) tauhat[c].resize(nvox);

    std::vector<double> Efield(nvox * d), Jfield(nvox * d);
    for (std::size_t v = 0; v < nvox; ++v)
        for (int c = 0; c < d; ++c) Efield[v * d + c] = E0[c];

    const auto& shape = cell.shape();
    double lmin = cell.lengths()[0];
    for (int a = 1; a < d; ++a) lmin = std::min(lmin, cell.lengths()[a]);
    const double div_scale = 2.0 * M_PI / lmin;

    auto spectral_index_loop = [&](auto&& fn) {
        std::size_t v = 0;
        for (int i = 0; i < shape[0]; ++i)
            for (int j = 0; j < shape[1]; ++j)
                for (int kk = 0; kk < shape[2]; ++kk, ++v) fn(v, i, j, kk);
    };

    std::vector<double> history;
    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        // tau = (sigma - s0 I) E, transformed component by component
        for (int c = 0; c < d; ++c) {
            for (std::size_t v = 0; v < nvox; ++v) {
                const ConductivityTensor& s = cell.sigma_at(v);
                double t = -s0 * Efield[v * d + c];
                for (int cc = 0; cc < d; ++cc) t += s(c, cc) * Efield[v * d + cc];
                ws.data()[v] = t;
            }
            ws.forward();
            std::copy(ws.data(), ws.data() + nvox, tauhat[c].begin());
        }

        // potential update: uhat = conj(k) . tauhat / (s0 |k|^2)
        spectral_index_loop([&](std::size_t v, int i, int j, int kk) {
            std::complex<double> kc[3] = {k[0][i], d > 1 ? k[1][j] : 0.0,
                                          d > 2 ? k[2][kk] : 0.0};
            double k2 = 0;
            std::complex<double> num = 0;
            for (int c = 0; c < d; ++c) {
                k2 += std::norm(kc[c]);
                num += std::conj(kc[c]) * tauhat[c][v];
            }
            uhat[v] = (k2 == 0) ? 0.0 : num / (s0 * k2);
        });

        // E_new = E0 - gradient of u (spectrally: -k uhat), then J = sigma E
        for (int c = 0; c < d; ++c) {
            spectral_index_loop([&](std::size_t v, int i, int j, int kk) {
                std::complex<double> kc = c == 0 ? k[0][i] : (c == 1 ? k[1][j] : k[2][kk]);
                ws.data()[v] = kc * uhat[v];
            });
            ws.backward();
            for (std::size_t v = 0; v < nvox; ++v)
                Efield[v * d + c] = E0[c] - ws.data()[v].real() / static_cast<double>(nvox);
        }
        for (std::size_t v = 0; v < nvox; ++v) {
            const ConductivityTensor& s = cell.sigma_at(v);
            for (int c = 0; c < d; ++c) {
                double t = 0;
                for (int cc = 0; cc < d; ++cc) t += s(c, cc) * Efield[v * d + cc];
                Jfield[v * d + c] = t;
            }
        }

        // residual: rms of the discrete divergence of J over rms(J), made
        // dimensionless with the smallest fundamental wavenumber
        std::fill(divhat.begin(), divhat.end(), std::complex<double>(0, 0));
        for (int c = 0; c < d; ++c) {
            for (std::size_t v = 0; v < nvox; ++v) ws.data()[v] = Jfield[v * d + c];
            ws.forward();
            spectral_index_loop([&](std::size_t v, int i, int j, int kk) {
                std::complex<double> kc = c == 0 ? k[0][i] : (c == 1 ? k[1][j] : k[2][kk]);
                divhat[v] += std::conj(kc) * ws.data()[v];
            });
        }
        double div2 = 0, j2 = 0;
        for (std::size_t v = 0; v < nvox; ++v) div2 += std::norm(divhat[v]);
        for (double x : Jfield) j2 += x * x;
        double rms_div = std::sqrt(div2) / static_cast<double>(nvox);
        double rms_j = std::sqrt(j2 / static_cast<double>(nvox));
        residual = (rms_j == 0) ? 0.0 : rms_div / (rms_j * div_scale);
        history.push_back(residual);
        if (residual <= opts.tolerance) break;
    }
    if (residual > opts.tolerance)
        throw SolverError("periodic solver did not reach the requested residual", history);

    PeriodicCellSolution sol;
    sol.dim = d;
    sol.shape = cell.shape();
    sol.lengths = cell.lengths();
    sol.applied_field = E0;
    sol.E = std::move(Efield);
    sol.J = std::move(Jfield);
    sol.residual = residual;
    sol.residual_history = std::move(history);

    // fluctuation potential (E = E0 + forward-difference gradient of it)
    std::copy(uhat.begin(), uhat.end(), ws.data());
    ws.backward();
    sol.potential.resize(nvox);
    for (std::size_t v = 0; v < nvox; ++v)
        sol.potential[v] = -ws.data()[v].real() / static_cast<double>(nvox);

    Vec meanJ(d);
    for (int c = 0; c < d; ++c) {
        KahanSum acc;
        for (std::size_t v = 0; v < nvox; ++v) acc.add(sol.J[v * d + c]);
        meanJ[c] = acc.value() / static_cast<double>(nvox);
    }
    sol.mean_current = meanJ;
    return sol;
}

/// Effective conductivity tensor of the cell: solve once per unit applied
/// field, collect the mean-current columns, and symmetrize.
inline SymMat effective_tensor(const PeriodicCell& cell, const SolveOptions& opts = {}) {
    const int d = cell.dim();
    std::vector<Vec> columns;
    for (int a = 0; a < d; ++a) {
        Vec e(d);
        e[a] = 1.0;
        columns.push_back(solve_periodic(cell, e, opts).mean_current);
    }
    SymMat result(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) result.set(i, j, 0.5 * (columns[j][i] + columns[i][j]));
    return result;
}

/// Volume average of the energy density E . sigma E; equals E0 . sigma* E0 up
/// to the solver residual.
inline double mean_energy_density(const PeriodicCell& cell, const PeriodicCellSolution& sol) {
    require(sol.n_voxels() == cell.n_voxels(), "solution does not belong to this cell");
    KahanSum acc;
    for (std::size_t v = 0; v < cell.n_voxels(); ++v) {
        double e = 0;
        for (int c = 0; c < sol.dim; ++c)
            e += sol.E[v * sol.dim + c] * sol.J[v * sol.dim + c];
        acc.add(e);
    }
    return acc.value() / static_cast<double>(cell.n_voxels());
}

namespace detail {

/// Periodic multilinear interpolation of one component of a voxel-center grid.
inline double interpolate_component(const PeriodicCellSolution& sol,
                                    const std::vector<double>& grid, int comp, int stride,
                                    const Vec& q) {
    const int d = sol.dim;
    std::array<int, 3> base{};
    std::array<double, 3> frac{};
    for (int a = 0; a < d; ++a) {
        double dx = sol.lengths[a] / sol.shape[a];
        double g = q[a] / dx - 0.5;
        double fl = std::floor(g);
        base[a] = static_cast<int>(fl);
        frac[a] = g - fl;
    }
    double acc = 0;
    for (int corner = 0; corner < (1 << d); ++corner) {
        double w = 1;
        std::array<int, 3> idx{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            int bit = (corner >> a) & 1;
            w *= bit ? frac[a] : 1.0 - frac[a];
            int ia = (base[a] + bit) % sol.shape[a];
            if (ia < 0) ia += sol.shape[a];
            idx[a] = ia;
        }
        std::size_t v =
            (static_cast<std::size_t>(idx[0]) * sol.shape[1] + idx[1]) * sol.shape[2] + idx[2];
        acc += w * grid[v * stride + comp];
    }
    return acc;
}

inline Vec interpolate_vector(const PeriodicCellSolution& sol, const std::vector<double>& grid,
                              const Vec& q) {
    Vec r(sol.dim);
    for (int c = 0; c < sol.dim; ++c)
        r[c] = interpolate_component(sol, grid, c, sol.dim, q);
    return r;
}

}  // namespace detail

/// Attach one-sided field samples to every patch of the mesh: fields are
/// interpolated at position -/+ offset * (grid spacing) * normal for the
/// plus/minus side respectively (the normal points out of the plus side),
/// then split into the interface-adapted components. Both the raw samples and
/// the tangential/normal components are attached; the components carry the
/// declared side.
inline InterfaceMesh sample_interface_fields(const PeriodicCellSolution& sol,
                                             InterfaceMesh mesh, Side side,
                                             double offset_cells = 1.5) {
    require(mesh.dim() == sol.dim, "mesh dimension does not match solution");
    require(offset_cells >= 1.0, "sampling offset must be at least one grid cell");
    double step = 0;
    for (int a = 0; a < sol.dim; ++a)
        step = std::max(step, sol.lengths[a] / sol.shape[a]);
    step *= offset_cells;
    for (auto& patch : mesh.patches()) {
        for (int a = 0; a < sol.dim; ++a) {
            double x = patch.point()[a];
            require(x >= -1e-12 && x <= sol.lengths[a] * (1 + 1e-12),
                    "patch position lies outside the period cell");
        }
        double sgn = (side == Side::Plus) ? -1.0 : 1.0;
        Vec q = patch.point() + patch.unit_normal() * (sgn * step);
        for (int a = 0; a < sol.dim; ++a) {  // wrap into the periodic cell
            double L = sol.lengths[a];
            q[a] = q[a] - L * std::floor(q[a] / L);
        }
        SideFields f{detail::interpolate_vector(sol, sol.E, q),
                     detail::interpolate_vector(sol, sol.J, q)};
        auto es = decompose_field(f.E, patch.unit_normal());
        auto js = decompose_field(f.J, patch.unit_normal());
        if (side == Side::Plus)
            patch.plus = f;
        else
            patch.minus = f;
        patch.tn = TangentialNormal{es.tangential, js.normal, side};
    }
    return mesh;
}

/// Central-difference sensitivity of the effective tensor with respect to a
/// geometry parameter: an independent oracle for the interface-shift formula.
inline SymMat finite_difference_sensitivity(
    const std::function<PeriodicCell(double)>& cell_family, double eta, double d_eta,
    const SolveOptions& opts = {}) {
    require(std::isfinite(eta) && std::isfinite(d_eta) && d_eta > 0,
            "finite difference needs a positive step");
    SymMat plus = effective_tensor(cell_family(eta + d_eta), opts);
    SymMat minus = effective_tensor(cell_family(eta - d_eta), opts);
    return (plus - minus) * (1.0 / (2.0 * d_eta));
}

// ---------------------------------------------------------------------------
// Cell builders
// ---------------------------------------------------------------------------

inline PeriodicCell uniform_cell(int dim, int n, const ConductivityTensor& sigma,
                                 double length = 1.0) {
    std::array<int, 3> shape{1, 1, 1};
    std::array<double, 3> lengths{1, 1, 1};
    std::size_t nvox = 1;
    for (int a = 0; a < dim; ++a) {
        shape[a] = n;
        lengths[a] = length;
        nvox *= static_cast<std::size_t>(n);
    }
    return PeriodicCell(dim, shape, lengths, std::vector<std::uint32_t>(nvox, 0), {sigma});
}

/// Layers normal to the given axis, phase k filling the slab between the
/// cumulative fractions; voxel phase is decided at the voxel center.
inline PeriodicCell laminate_cell(int dim, int n, int axis,
                                  const std::vector<double>& fractions,
                                  const std::vector<ConductivityTensor>& phases,
                                  double length = 1.0) {
    require(axis >= 0 && axis < dim, "laminate axis outside cell dimension");
    require(fractions.size() == phases.size() && !phases.empty(),
            "laminate needs matching fraction and phase lists");
    KahanSum fsum;
    for (double f : fractions) {
        require(f >= 0, "laminate fractions must be nonnegative");
        fsum.add(f);
    }
    require(std::abs(fsum.value() - 1.0) <= 1e-12, "laminate fractions must sum to 1");
    std::array<int, 3> shape{1, 1, 1};
    std::array<double, 3> lengths{1, 1, 1};
    std::size_t nvox = 1;
    for (int a = 0; a < dim; ++a) {
        shape[a] = n;
        lengths[a] = length;
        nvox *= static_cast<std::size_t>(n);
    }
    std::vector<double> cuts;
    KahanSum run;
    for (double f : fractions) {
        run.add(f);
        cuts.push_back(run.value());
    }
    cuts.back() = 1.0;
    std::vector<std::uint32_t> map(nvox);
    std::size_t v = 0;
    for (int i = 0; i < shape[0]; ++i)
        for (int j = 0; j < shape[1]; ++j)
            for (int kk = 0; kk < shape[2]; ++kk, ++v) {
                int along = axis == 0 ? i : (axis == 1 ? j : kk);
                double t = (along + 0.5) / n;
                std::uint32_t phase = 0;
                while (phase + 1 < cuts.size() && t >= cuts[phase]) ++phase;
                map[v] = phase;
            }
    return PeriodicCell(dim, shape, lengths, std::move(map), phases);
}

/// 2D four-quadrant checkerboard of two phases.
inline PeriodicCell checkerboard_cell(int n, const ConductivityTensor& a,
                                      const ConductivityTensor& b, double length = 1.0) {
    require(n % 2 == 0, "checkerboard grid must be even");
    std::vector<std::uint32_t> map(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            bool first = (i < n / 2) == (j < n / 2);
            map[static_cast<std::size_t>(i) * n + j] = first ? 1 : 0;
        }
    return PeriodicCell(2, {n, n, 1}, {length, length, 1.0}, std::move(map), {a, b});
}

/// 2D circular inclusion in a matrix. With smoothed = false (the default used
/// for oracle comparisons) each voxel takes the phase at its center; with
/// smoothed = true, boundary voxels get a dedicated mixed tensor weighted by
/// the in-circle area fraction estimated from an 8x8 subsample, which makes
/// the effective value differentiable in the radius.
inline PeriodicCell circular_inclusion_cell(int n, double radius,
                                            const ConductivityTensor& inclusion,
                                            const ConductivityTensor& matrix,
                                            bool smoothed = false, double length = 1.0,
                                            double center_x = 0.5, double center_y = 0.5) {
    require(radius > 0 && radius < 0.5 * length, "inclusion radius must fit inside the cell");
    const double cx = center_x * length, cy = center_y * length;
    const double dx = length / n;
    std::vector<ConductivityTensor> table{matrix, inclusion};
    std::map<int, std::uint32_t> mixed_index;  // subsample count -> table slot
    std::vector<std::uint32_t> map(static_cast<std::size_t>(n) * n);
    const int ss = 8;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x = (i + 0.5) * dx, y = (j + 0.5) * dx;
            std::uint32_t phase;
            if (!smoothed) {
                double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                phase = (r2 <= radius * radius) ? 1u : 0u;
            } else {
                int inside = 0;
                for (int si = 0; si < ss; ++si)
                    for (int sj = 0; sj < ss; ++sj) {
                        double sx = (i + (si + 0.5) / ss) * dx;
                        double sy = (j + (sj + 0.5) / ss) * dx;
                        double r2 = (sx - cx) * (sx - cx) + (sy - cy) * (sy - cy);
                        if (r2 <= radius * radius) ++inside;
                    }
                if (inside == 0) {
                    phase = 0;
                } else if (inside == ss * ss) {
                    phase = 1;
                } else {
                    auto it = mixed_index.find(inside);
                    if (it == mixed_index.end()) {
                        double f = static_cast<double>(inside) / (ss * ss);
                        SymMat mix = inclusion.mat() * f + matrix.mat() * (1.0 - f);
                        table.push_back(ConductivityTensor(mix));
                        it = mixed_index
                                 .emplace(inside, static_cast<std::uint32_t>(table.size() - 1))
                                 .first;
                    }
                    phase = it->second;
                }
            }
            map[static_cast<std::size_t>(i) * n + j] = phase;
        }
    return PeriodicCell(2, {n, n, 1}, {length, length, 1.0}, std::move(map),
                        std::move(table));
}

}  // namespace interphase
