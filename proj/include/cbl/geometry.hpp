#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbl {

// Factor dimension n of the chart ([-3,3]^n_s x [-d,L+d]_t x [-e,e]^n_u).
// Everything is sized at runtime; kMaxDim bounds the stack storage.
inline constexpr int kMaxDim = 4;

struct Vec {
    int n = 1;
    std::array<double, kMaxDim> c{};

    Vec() = default;
    explicit Vec(int dim) : n(dim) { assert(dim >= 0 && dim <= kMaxDim); }
    Vec(int dim, double fill) : n(dim) {
        assert(dim >= 0 && dim <= kMaxDim);
        for (int i = 0; i < n; ++i) c[i] = fill;
    }
    Vec(std::initializer_list<double> v) : n(static_cast<int>(v.size())) {
        assert(n <= kMaxDim);
        int i = 0;
        for (double x : v) c[i++] = x;
    }

    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) c[i] += o.c[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n; ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec& operator*=(double a) {
        for (int i = 0; i < n; ++i) c[i] *= a;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double a, Vec v) { return v *= a; }
    friend Vec operator*(Vec v, double a) { return v *= a; }

    double dot(const Vec& o) const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += c[i] * o.c[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    double norm_inf() const {
        double m = 0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(c[i]));
        return m;
    }

    static Vec zero(int dim) { return Vec(dim); }
    // e1-aligned vector (1,0,...,0) scaled by a; the distinguished 1_s direction.
    static Vec basis_one(int dim, double a = 1.0) {
        Vec v(dim);
        if (dim > 0) v.c[0] = a;
        return v;
    }
    static Vec ones(int dim, double a = 1.0) { return Vec(dim, a); }
};

// Point (s, t, u) in the standard contact chart.
struct ChartPoint {
    Vec s;
    double t = 0;
    Vec u;

    ChartPoint() = default;
    ChartPoint(Vec s_, double t_, Vec u_) : s(s_), t(t_), u(u_) {}
    int dim_n() const { return s.n; }

    friend ChartPoint operator-(const ChartPoint& a, const ChartPoint& b) {
        return {a.s - b.s, a.t - b.t, a.u - b.u};
    }
    double norm() const { return std::sqrt(s.norm2() + t * t + u.norm2()); }
};

inline double dist(const ChartPoint& a, const ChartPoint& b) { return (a - b).norm(); }

// Tangent vector (ds, dt, du) at a chart point; norm is Euclidean on the
// concatenation, which is the metric g used throughout.
struct Tangent {
    Vec ds;
    double dt = 0;
    Vec du;

    Tangent() = default;
    Tangent(Vec ds_, double dt_, Vec du_) : ds(ds_), dt(dt_), du(du_) {}
    int dim_n() const { return ds.n; }

    Tangent& operator+=(const Tangent& o) {
        ds += o.ds;
        dt += o.dt;
        du += o.du;
        return *this;
    }
    Tangent& operator-=(const Tangent& o) {
        ds -= o.ds;
        dt -= o.dt;
        du -= o.du;
        return *this;
    }
    Tangent& operator*=(double a) {
        ds *= a;
        dt *= a;
        du *= a;
        return *this;
    }
    friend Tangent operator+(Tangent a, const Tangent& b) { return a += b; }
    friend Tangent operator-(Tangent a, const Tangent& b) { return a -= b; }
    friend Tangent operator*(double a, Tangent v) { return v *= a; }

    double norm2() const { return ds.norm2() + dt * dt + du.norm2(); }
    double norm() const { return std::sqrt(norm2()); }

    static Tangent zero(int n) { return {Vec(n), 0.0, Vec(n)}; }
    static Tangent d_t(int n) { return {Vec(n), 1.0, Vec(n)}; }
    static Tangent d_s(int n, int i) {
        Tangent v = zero(n);
        v.ds[i] = 1.0;
        return v;
    }
    static Tangent d_u(int n, int i) {
        Tangent v = zero(n);
        v.du[i] = 1.0;
        return v;
    }
};

// Flattened coordinate order (s_0..s_{n-1}, t, u_0..u_{n-1}).
inline int flat_dim(int n) { return 2 * n + 1; }

inline void flatten(const Tangent& v, double* out) {
    int n = v.dim_n();
    for (int i = 0; i < n; ++i) out[i] = v.ds[i];
    out[n] = v.dt;
    for (int i = 0; i < n; ++i) out[n + 1 + i] = v.du[i];
}

inline Tangent unflatten(int n, const double* in) {
    Tangent v = Tangent::zero(n);
    for (int i = 0; i < n; ++i) v.ds[i] = in[i];
    v.dt = in[n];
    for (int i = 0; i < n; ++i) v.du[i] = in[n + 1 + i];
    return v;
}

// Small dense matrix acting on flattened tangents (dim <= 2*kMaxDim+1).
struct Mat {
    int dim = 0;
    std::array<double, (2 * kMaxDim + 1) * (2 * kMaxDim + 1)> a{};

    Mat() = default;
    explicit Mat(int d) : dim(d) { assert(d <= 2 * kMaxDim + 1); }

    double& at(int i, int j) { return a[i * dim + j]; }
    double at(int i, int j) const { return a[i * dim + j]; }

    static Mat identity(int d) {
        Mat m(d);
        for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
        return m;
    }
    static Mat diagonal(int d, const double* diag) {
        Mat m(d);
        for (int i = 0; i < d; ++i) m.at(i, i) = diag[i];
        return m;
    }

    friend Mat operator*(const Mat& x, const Mat& y) {
        assert(x.dim == y.dim);
        Mat r(x.dim);
        for (int i = 0; i < x.dim; ++i)
            for (int k = 0; k < x.dim; ++k) {
                double xik = x.at(i, k);
                if (xik == 0.0) continue;
                for (int j = 0; j < x.dim; ++j) r.at(i, j) += xik * y.at(k, j);
            }
        return r;
    }

    Tangent apply(const Tangent& v) const {
        int n = v.dim_n();
        assert(dim == flat_dim(n));
        double in[2 * kMaxDim + 1], out[2 * kMaxDim + 1];
        flatten(v, in);
        for (int i = 0; i < dim; ++i) {
            double s = 0;
            for (int j = 0; j < dim; ++j) s += at(i, j) * in[j];
            out[i] = s;
        }
        return unflatten(n, out);
    }
};

// Gaussian elimination with partial pivoting; returns false if singular.
inline bool solve_linear(int dim, std::vector<double> m, std::vector<double> rhs,
                         std::vector<double>& out) {
    out.assign(dim, 0.0);
    for (int col = 0; col < dim; ++col) {
        int piv = col;
        for (int r = col + 1; r < dim; ++r)
            if (std::fabs(m[r * dim + col]) > std::fabs(m[piv * dim + col])) piv = r;
        if (std::fabs(m[piv * dim + col]) < 1e-300) return false;
        if (piv != col) {
            for (int j = 0; j < dim; ++j) std::swap(m[col * dim + j], m[piv * dim + j]);
            std::swap(rhs[col], rhs[piv]);
        }
        double d = m[col * dim + col];
        for (int r = col + 1; r < dim; ++r) {
            double f = m[r * dim + col] / d;
            if (f == 0.0) continue;
            for (int j = col; j < dim; ++j) m[r * dim + j] -= f * m[col * dim + j];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = dim - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int j = r + 1; j < dim; ++j) s -= m[r * dim + j] * out[j];
        out[r] = s / m[r * dim + r];
    }
    return true;
}

// Least squares via normal equations (rows >= dim, small systems only).
inline bool solve_least_squares(int rows, int dim, const std::vector<double>& m,
                                const std::vector<double>& rhs, std::vector<double>& out) {
    std::vector<double> ata(dim * dim, 0.0), atb(dim, 0.0);
    for (int r = 0; r < rows; ++r) {
        for (int i = 0; i < dim; ++i) {
            atb[i] += m[r * dim + i] * rhs[r];
            for (int j = 0; j < dim; ++j) ata[i * dim + j] += m[r * dim + i] * m[r * dim + j];
        }
    }
    return solve_linear(dim, ata, atb, out);
}

}  // namespace cbl
