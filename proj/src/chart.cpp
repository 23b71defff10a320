#include "cbl/chart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cbl {

void ChartParams::validate() const {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("chart.n must be in [1, 4]");
    if (!(L > 0.0 && L < 1.0))
        throw std::invalid_argument("chart.L must be in (0, 1): the profile slope bound |h'| < 1/L "
                                    "must admit h' = 1 near t = 0");
    if (!(delta > 0.0)) throw std::invalid_argument("chart.delta must be positive");
    if (!(eps_u > 0.0)) throw std::invalid_argument("chart.eps_u must be positive");
    if (!(s_halfwidth > 0.0)) throw std::invalid_argument("chart.s_halfwidth must be positive");
}

bool in_chart(const ChartParams& cp, const ChartPoint& p, double slack) {
    if (p.t < cp.t_min() - slack || p.t > cp.t_max() + slack) return false;
    for (int i = 0; i < p.s.n; ++i)
        if (std::fabs(p.s[i]) > cp.s_halfwidth + slack) return false;
    for (int i = 0; i < p.u.n; ++i)
        if (std::fabs(p.u[i]) > cp.eps_u + slack) return false;
    return true;
}

double alpha_eval(const ChartPoint& p, const Tangent& v) { return v.dt - p.s.dot(v.du); }

double dalpha_eval(const ChartPoint&, const Tangent& v, const Tangent& w) {
    return v.du.dot(w.ds) - w.du.dot(v.ds);
}

Tangent reeb_field(const ChartPoint& p) { return Tangent::d_t(p.dim_n()); }

double contact_volume(const ChartPoint& p) {
    // alpha ^ (dalpha)^n evaluated on the coordinate frame by the permutation
    // expansion with normalization 1 / (2^n n!). For the standard alpha this
    // equals 1 at every point; zero would mean the contact condition fails.
    int n = p.dim_n();
    int d = flat_dim(n);
    std::vector<Tangent> frame;
    for (int i = 0; i < n; ++i) frame.push_back(Tangent::d_s(n, i));
    frame.push_back(Tangent::d_t(n));
    for (int i = 0; i < n; ++i) frame.push_back(Tangent::d_u(n, i));

    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    double total = 0;
    // Iterate permutations with sign tracking via sorting parity.
    std::sort(idx.begin(), idx.end());
    do {
        int sign = 1;
        {
            std::vector<int> tmp = idx;
            for (int i = 0; i < d; ++i)
                while (tmp[i] != i) {
                    std::swap(tmp[i], tmp[tmp[i]]);
                    sign = -sign;
                }
        }
        double term = alpha_eval(p, frame[idx[0]]);
        for (int k = 0; k < n && term != 0.0; ++k)
            term *= dalpha_eval(p, frame[idx[1 + 2 * k]], frame[idx[2 + 2 * k]]);
        total += sign * term;
    } while (std::next_permutation(idx.begin(), idx.end()));
    double norm = std::tgamma(n + 1) * std::pow(2.0, n);
    return total / norm;
}

Mat fd_jacobian(const std::function<ChartPoint(const ChartPoint&)>& f, const ChartPoint& p,
                double rel_step, bool richardson) {
    int n = p.dim_n();
    int d = flat_dim(n);

    auto column = [&](int j, double h) {
        ChartPoint pp = p, pm = p;
        double* coord_p = nullptr;
        double* coord_m = nullptr;
        if (j < n) {
            coord_p = &pp.s[j];
            coord_m = &pm.s[j];
        } else if (j == n) {
            coord_p = &pp.t;
            coord_m = &pm.t;
        } else {
            coord_p = &pp.u[j - n - 1];
            coord_m = &pm.u[j - n - 1];
        }
        *coord_p += h;
        *coord_m -= h;
        ChartPoint fp = f(pp), fm = f(pm);
        ChartPoint diff = fp - fm;
        Tangent col{(1.0 / (2 * h)) * diff.s, diff.t / (2 * h), (1.0 / (2 * h)) * diff.u};
        return col;
    };

    Mat jac(d);
    for (int j = 0; j < d; ++j) {
        double base = 1.0;
        if (j < n)
            base = std::max(1.0, std::fabs(p.s[j]));
        else if (j == n)
            base = std::max(1.0, std::fabs(p.t));
        else
            base = std::max(1.0, std::fabs(p.u[j - n - 1]));
        double h = rel_step * base;
        Tangent col = column(j, h);
        if (richardson) {
            Tangent col2 = column(j, h / 2);
            col = (1.0 / 3.0) * (4.0 * col2 - col);
        }
        double out[2 * kMaxDim + 1];
        flatten(col, out);
        for (int i = 0; i < d; ++i) jac.at(i, j) = out[i];
    }
    return jac;
}

namespace {

StrictContactResult pullback_residual(const PointMap& map, const ChartParams& cp,
                                      const std::vector<std::pair<ChartPoint, Tangent>>& samples,
                                      double tol, bool kernel_only) {
    StrictContactResult res;
    res.max_residual = 0.0;
    int k = 0;
    for (const auto& [p, v_raw] : samples) {
        ChartPoint q = map.f(p);
        if (!in_chart(cp, q, 1e-9)) {
            std::ostringstream os;
            os << "verify_strict_contact: image of sample " << k << " at (t=" << p.t
               << ") left the chart (image t=" << q.t << ")";
            throw std::domain_error(os.str());
        }
        Tangent v = v_raw;
        if (kernel_only) {
            v = project_to_kernel(p, v);
            double nrm = v.norm();
            if (nrm < 1e-12) {
                ++k;
                continue;
            }
            v *= 1.0 / nrm;
        }
        Mat j = map.jacobian(p);
        Tangent pushed = j.apply(v);
        double r = kernel_only ? std::fabs(alpha_eval(q, pushed))
                               : std::fabs(alpha_eval(q, pushed) - alpha_eval(p, v));
        if (r > res.max_residual) {
            res.max_residual = r;
            res.witness_point = p;
            res.witness_vector = v;
        }
        ++k;
    }
    res.ok = res.max_residual <= tol;
    return res;
}

}  // namespace

StrictContactResult verify_strict_contact(const PointMap& map, const ChartParams& cp,
                                          const std::vector<std::pair<ChartPoint, Tangent>>& samples,
                                          double tol) {
    return pullback_residual(map, cp, samples, tol, false);
}

StrictContactResult kernel_preservation_residual(const PointMap& map, const ChartParams& cp,
                                                 const std::vector<std::pair<ChartPoint, Tangent>>& samples,
                                                 double tol) {
    return pullback_residual(map, cp, samples, tol, true);
}

Tangent project_to_kernel(const ChartPoint& p, Tangent v) {
    // ker alpha_p = {v : v.dt = <s, v.du>}; fix dt, keep (ds, du).
    v.dt = p.s.dot(v.du);
    return v;
}

ScalarField ScalarField::with_fd_gradient(std::function<double(const ChartPoint&)> value, int n,
                                          double rel_step) {
    ScalarField f;
    f.value = value;
    f.gradient = [value, n, rel_step](const ChartPoint& p) {
        Tangent g = Tangent::zero(n);
        auto diff = [&](auto setter) {
            ChartPoint pp = p, pm = p;
            setter(pp, rel_step);
            setter(pm, -rel_step);
            return (value(pp) - value(pm)) / (2 * rel_step);
        };
        for (int i = 0; i < n; ++i)
            g.ds[i] = diff([i](ChartPoint& q, double h) { q.s[i] += h; });
        g.dt = diff([](ChartPoint& q, double h) { q.t += h; });
        for (int i = 0; i < n; ++i)
            g.du[i] = diff([i](ChartPoint& q, double h) { q.u[i] += h; });
        return g;
    };
    return f;
}

Tangent contact_vector_field(const ScalarField& H, const ChartPoint& p) {
    int n = p.dim_n();
    int d = flat_dim(n);
    double h = H.value(p);
    Tangent dh = H.gradient(p);
    double dh_reeb = dh.dt;  // dH(R) with R = d_t

    // Basis of ker alpha at p: d_{s_i} and d_{u_i} + s_i d_t.
    std::vector<Tangent> kernel_basis;
    for (int i = 0; i < n; ++i) kernel_basis.push_back(Tangent::d_s(n, i));
    for (int i = 0; i < n; ++i) {
        Tangent w = Tangent::d_u(n, i);
        w.dt = p.s[i];
        kernel_basis.push_back(w);
    }

    std::vector<double> m(d * d, 0.0), rhs(d, 0.0), sol;
    std::vector<Tangent> unit;
    for (int j = 0; j < d; ++j) {
        double e[2 * kMaxDim + 1] = {0};
        e[j] = 1.0;
        unit.push_back(unflatten(n, e));
    }
    // Row 0: alpha(V) = H.
    for (int j = 0; j < d; ++j) m[0 * d + j] = alpha_eval(p, unit[j]);
    rhs[0] = h;
    // Rows 1..2n: dalpha(V, w_k) + dH(w_k) - dH(R) alpha(w_k) = 0.
    for (int k = 0; k < 2 * n; ++k) {
        const Tangent& w = kernel_basis[k];
        for (int j = 0; j < d; ++j) m[(k + 1) * d + j] = dalpha_eval(p, unit[j], w);
        double dh_w = dh.ds.dot(w.ds) + dh.dt * w.dt + dh.du.dot(w.du);
        rhs[k + 1] = -(dh_w - dh_reeb * alpha_eval(p, w));
    }
    if (!solve_linear(d, m, rhs, sol))
        throw std::runtime_error("contact_vector_field: singular system (internal error)");
    return unflatten(n, sol.data());
}

double contact_vector_field_residual(const ScalarField& H, const ChartPoint& p, const Tangent& V) {
    int n = p.dim_n();
    double h = H.value(p);
    Tangent dh = H.gradient(p);
    double r = std::fabs(alpha_eval(p, V) - h);
    std::vector<Tangent> kernel_basis;
    for (int i = 0; i < n; ++i) kernel_basis.push_back(Tangent::d_s(n, i));
    for (int i = 0; i < n; ++i) {
        Tangent w = Tangent::d_u(n, i);
        w.dt = p.s[i];
        kernel_basis.push_back(w);
    }
    for (const Tangent& w : kernel_basis) {
        double dh_w = dh.ds.dot(w.ds) + dh.dt * w.dt + dh.du.dot(w.du);
        double term = dalpha_eval(p, V, w) + dh_w - dh.dt * alpha_eval(p, w);
        r = std::max(r, std::fabs(term));
    }
    return r;
}

ChartPoint sample_chart_point(const ChartParams& cp, Rng& rng, double shrink) {
    ChartPoint p;
    double mid = 0.5 * (cp.t_min() + cp.t_max());
    double half = 0.5 * (cp.t_max() - cp.t_min()) * shrink;
    p.s = rng.uniform_vec(cp.n, -cp.s_halfwidth * shrink, cp.s_halfwidth * shrink);
    p.t = rng.uniform(mid - half, mid + half);
    p.u = rng.uniform_vec(cp.n, -cp.eps_u * shrink, cp.eps_u * shrink);
    return p;
}

Tangent sample_unit_tangent(int n, Rng& rng) {
    Tangent v = Tangent::zero(n);
    double nrm = 0;
    do {
        v.ds = rng.uniform_vec(n, -1, 1);
        v.dt = rng.uniform(-1, 1);
        v.du = rng.uniform_vec(n, -1, 1);
        nrm = v.norm();
    } while (nrm < 1e-3);
    v *= 1.0 / nrm;
    return v;
}

}  // namespace cbl
