#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <span>

#include "interphase/util.hpp"

namespace interphase {

/// Small dense vector for field quantities; dimension 2 or 3 at runtime.
class Vec {
public:
    Vec() : dim_(0), c_{0, 0, 0} {}
    explicit Vec(int dim) : dim_(dim), c_{0, 0, 0} {
        require(dim >= 1 && dim <= 3, "Vec: dimension must be 1..3");
    }
    Vec(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())), c_{0, 0, 0} {
        require(dim_ >= 1 && dim_ <= 3, "Vec: dimension must be 1..3");
        int i = 0;
        for (double x : xs) c_[i++] = x;
        check_finite();
    }
    Vec(int dim, std::span<const double> xs) : dim_(dim), c_{0, 0, 0} {
        require(dim >= 1 && dim <= 3 && static_cast<int>(xs.size()) == dim,
                "Vec: dimension/span mismatch");
        for (int i = 0; i < dim; ++i) c_[i] = xs[i];
        check_finite();
    }

    static Vec zero(int dim) { return Vec(dim); }

    int dim() const { return dim_; }
    double operator[](int i) const { return c_[i]; }
    double& operator[](int i) { return c_[i]; }

    double dot(const Vec& o) const {
        require(dim_ == o.dim_, "Vec::dot: dimension mismatch");
        double s = 0;
        for (int i = 0; i < dim_; ++i) s += c_[i] * o.c_[i];
        return s;
    }
    double norm() const { return std::sqrt(dot(*this)); }

    Vec operator+(const Vec& o) const {
        require(dim_ == o.dim_, "Vec: dimension mismatch");
        Vec r(dim_);
        for (int i = 0; i < dim_; ++i) r.c_[i] = c_[i] + o.c_[i];
        return r;
    }
    Vec operator-(const Vec& o) const {
        require(dim_ == o.dim_, "Vec: dimension mismatch");
        Vec r(dim_);
        for (int i = 0; i < dim_; ++i) r.c_[i] = c_[i] - o.c_[i];
        return r;
    }
    Vec operator*(double s) const {
        Vec r(dim_);
        for (int i = 0; i < dim_; ++i) r.c_[i] = c_[i] * s;
        return r;
    }
    friend Vec operator*(double s, const Vec& v) { return v * s; }

private:
    void check_finite() const {
        for (int i = 0; i < dim_; ++i)
            require(std::isfinite(c_[i]), "Vec: entries must be finite");
    }
    int dim_;
    std::array<double, 3> c_;
};

/// Plain symmetric d x d matrix (no definiteness requirement); the result type
/// of tensor arithmetic such as differences of conductivities.
class SymMat {
public:
    SymMat() : dim_(0), a_{} {}
    explicit SymMat(int dim) : dim_(dim), a_{} {
        require(dim >= 1 && dim <= 3, "SymMat: dimension must be 1..3");
    }

    int dim() const { return dim_; }
    double operator()(int i, int j) const { return a_[i * dim_ + j]; }
    void set(int i, int j, double v) {
        a_[i * dim_ + j] = v;
        a_[j * dim_ + i] = v;
    }

    Vec apply(const Vec& v) const {
        require(v.dim() == dim_, "SymMat::apply: dimension mismatch");
        Vec r(dim_);
        for (int i = 0; i < dim_; ++i) {
            double s = 0;
            for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }

    SymMat operator+(const SymMat& o) const { return combined(o, 1.0); }
    SymMat operator-(const SymMat& o) const { return combined(o, -1.0); }
    SymMat operator*(double s) const {
        SymMat r(dim_);
        for (int i = 0; i < dim_ * dim_; ++i) r.a_[i] = a_[i] * s;
        return r;
    }
    friend SymMat operator*(double s, const SymMat& m) { return m * s; }

    double max_abs() const {
        double m = 0;
        for (int i = 0; i < dim_ * dim_; ++i) m = std::max(m, std::abs(a_[i]));
        return m;
    }

    static SymMat identity(int dim) {
        SymMat r(dim);
        for (int i = 0; i < dim; ++i) r.set(i, i, 1.0);
        return r;
    }

private:
    SymMat combined(const SymMat& o, double sign) const {
        require(dim_ == o.dim_, "SymMat: dimension mismatch");
        SymMat r(dim_);
        for (int i = 0; i < dim_ * dim_; ++i) r.a_[i] = a_[i] + sign * o.a_[i];
        return r;
    }
    int dim_;
    std::array<double, 9> a_;
};

namespace detail {

/// Eigenvalues of a symmetric 2x2 or 3x3 matrix, ascending.
inline std::array<double, 3> sym_eigenvalues(const SymMat& m) {
    const int d = m.dim();
    if (d == 1) return {m(0, 0), m(0, 0), m(0, 0)};
    if (d == 2) {
        double a = m(0, 0), b = m(0, 1), c = m(1, 1);
        double mean = 0.5 * (a + c);
        double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        return {mean - disc, mean + disc, mean + disc};
    }
    double a00 = m(0, 0), a11 = m(1, 1), a22 = m(2, 2);
    double a01 = m(0, 1), a02 = m(0, 2), a12 = m(1, 2);
    double p1 = a01 * a01 + a02 * a02 + a12 * a12;
    if (p1 == 0.0) {
        std::array<double, 3> ev{a00, a11, a22};
        if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
        if (ev[1] > ev[2]) std::swap(ev[1], ev[2]);
        if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
        return ev;
    }
    double q = (a00 + a11 + a22) / 3.0;
    double p2 = (a00 - q) * (a00 - q) + (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    double b00 = (a00 - q) / p, b11 = (a11 - q) / p, b22 = (a22 - q) / p;
    double b01 = a01 / p, b02 = a02 / p, b12 = a12 / p;
    double detB = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                  b02 * (b01 * b12 - b11 * b02);
    double r = std::clamp(detB / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double e1 = q + 2.0 * p * std::cos(phi);
    double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    double e2 = 3.0 * q - e1 - e3;
    return {e3, e2, e1};
}

}  // namespace detail

/// Symmetric positive-definite conductivity tensor. Symmetry is exact as
/// stored (mirrored from the upper triangle); definiteness is checked at
/// construction: smallest eigenvalue > 1e-12 * largest.
class ConductivityTensor {
public:
    ConductivityTensor(int dim, std::span<const double> row_major) : m_(dim) {
        require(static_cast<int>(row_major.size()) == dim * dim,
                "ConductivityTensor: expected dim*dim row-major entries");
        double scale = 0;
        for (double v : row_major) {
            require(std::isfinite(v), "ConductivityTensor: entries must be finite");
            scale = std::max(scale, std::abs(v));
        }
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                double upper = row_major[i * dim + j], lower = row_major[j * dim + i];
                require(std::abs(upper - lower) <= 1e-12 * std::max(scale, 1e-300),
                        "ConductivityTensor: input matrix is not symmetric");
                m_.set(i, j, 0.5 * (upper + lower));
            }
        validate_spd();
    }
    explicit ConductivityTensor(const SymMat& m) : m_(m) { validate_spd(); }

    int dim() const { return m_.dim(); }
    double operator()(int i, int j) const { return m_(i, j); }
    const SymMat& mat() const { return m_; }

    Vec apply(const Vec& v) const { return m_.apply(v); }

    ConductivityTensor inverse() const {
        const int d = dim();
        SymMat inv(d);
        if (d == 1) {
            inv.set(0, 0, 1.0 / m_(0, 0));
        } else if (d == 2) {
            double a = m_(0, 0), b = m_(0, 1), c = m_(1, 1);
            double det = a * c - b * b;
            inv.set(0, 0, c / det);
            inv.set(0, 1, -b / det);
            inv.set(1, 1, a / det);
        } else {
            double a = m_(0, 0), b = m_(0, 1), c = m_(0, 2);
            double e = m_(1, 1), f = m_(1, 2), g = m_(2, 2);
            double det = a * (e * g - f * f) - b * (b * g - f * c) + c * (b * f - e * c);
            inv.set(0, 0, (e * g - f * f) / det);
            inv.set(0, 1, (c * f - b * g) / det);
            inv.set(0, 2, (b * f - c * e) / det);
            inv.set(1, 1, (a * g - c * c) / det);
            inv.set(1, 2, (b * c - a * f) / det);
            inv.set(2, 2, (a * e - b * b) / det);
        }
        return ConductivityTensor(inv);
    }

    std::array<double, 3> eigenvalues() const { return detail::sym_eigenvalues(m_); }

private:
    void validate_spd() const {
        auto ev = eigenvalues();
        double lo = ev[0], hi = ev[dim() - 1];
        require(hi > 0 && lo > 1e-12 * hi,
                "ConductivityTensor: matrix is not symmetric positive definite");
    }
    SymMat m_;
};

/// Isotropic tensor value * I. Rejects nonpositive conductivity.
inline ConductivityTensor make_isotropic(double value, int dim) {
    require(std::isfinite(value) && value > 0, "make_isotropic: nonpositive conductivity");
    require(dim >= 1 && dim <= 3, "make_isotropic: dimension must be 1..3");
    SymMat m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, value);
    return ConductivityTensor(m);
}

struct FieldSplit {
    Vec tangential;
    Vec normal;
};

/// Split a field into components normal and tangential to a unit vector.
inline FieldSplit decompose_field(const Vec& field, const Vec& unit_normal) {
    require(field.dim() == unit_normal.dim(), "decompose_field: dimension mismatch");
    require(std::abs(unit_normal.norm() - 1.0) <= 1e-12,
            "decompose_field: normal must have unit length");
    Vec n = unit_normal;
    Vec normal = n * field.dot(n);
    return {field - normal, normal};
}

inline double quadratic_form(const SymMat& m, const Vec& v) {
    require(m.dim() == v.dim(), "quadratic_form: dimension mismatch");
    return v.dot(m.apply(v));
}

inline double quadratic_form(const ConductivityTensor& t, const Vec& v) {
    return quadratic_form(t.mat(), v);
}

}  // namespace interphase
