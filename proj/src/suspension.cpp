#include "cbl/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbl {

namespace {

ChartPoint to_chart(int n, const std::vector<double>& y) {
    ChartPoint p;
    p.s = Vec(n);
    p.u = Vec(n);
    for (int i = 0; i < n; ++i) p.s[i] = y[i];
    p.t = y[n];
    for (int i = 0; i < n; ++i) p.u[i] = y[n + 1 + i];
    return p;
}

std::vector<double> from_chart(const ChartPoint& p) {
    int n = p.dim_n();
    std::vector<double> y(flat_dim(n));
    for (int i = 0; i < n; ++i) y[i] = p.s[i];
    y[n] = p.t;
    for (int i = 0; i < n; ++i) y[n + 1 + i] = p.u[i];
    return y;
}

Tangent to_tangent(int n, const std::vector<double>& v) {
    Tangent w = Tangent::zero(n);
    for (int i = 0; i < n; ++i) w.ds[i] = v[i];
    w.dt = v[n];
    for (int i = 0; i < n; ++i) w.du[i] = v[n + 1 + i];
    return w;
}

}  // namespace

ContactSystem ContactSystem::circle(double rho) {
    ContactSystem sys;
    sys.dim = 1;
    sys.name = "circle-rotation";
    sys.alpha = [](const std::vector<double>&, const std::vector<double>& v) { return v[0]; };
    sys.dalpha = [](const std::vector<double>&, const std::vector<double>&,
                    const std::vector<double>&) { return 0.0; };
    sys.map = [rho](const std::vector<double>& y) {
        double t = std::fmod(y[0] + rho, 1.0);
        if (t < 0) t += 1.0;
        return std::vector<double>{t};
    };
    sys.in_domain = [](const std::vector<double>&) { return true; };
    sys.diff = [](const std::vector<double>& a, const std::vector<double>& b) {
        double d = std::fmod(a[0] - b[0], 1.0);
        if (d > 0.5) d -= 1.0;
        if (d < -0.5) d += 1.0;
        return std::vector<double>{d};
    };
    return sys;
}

namespace {

ContactSystem chart_common(const Model& model, std::string name) {
    int n = model.chart().n;
    ContactSystem sys;
    sys.dim = flat_dim(n);
    sys.name = std::move(name);
    sys.alpha = [n](const std::vector<double>& y, const std::vector<double>& v) {
        return alpha_eval(to_chart(n, y), to_tangent(n, v));
    };
    sys.dalpha = [n](const std::vector<double>& y, const std::vector<double>& v,
                     const std::vector<double>& w) {
        return dalpha_eval(to_chart(n, y), to_tangent(n, v), to_tangent(n, w));
    };
    ChartParams cp = model.chart();
    sys.in_domain = [cp, n](const std::vector<double>& y) { return in_chart(cp, to_chart(n, y)); };
    sys.diff = [](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> d(a.size());
        for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        return d;
    };
    return sys;
}

}  // namespace

ContactSystem ContactSystem::chart_base(const Model& model) {
    ContactSystem sys = chart_common(model, "chart-base");
    int n = model.chart().n;
    double lambda = model.params().lambda;
    sys.map = [n, lambda](const std::vector<double>& y) {
        ChartPoint p = to_chart(n, y);
        return from_chart({lambda * p.s, p.t, (1.0 / lambda) * p.u});
    };
    return sys;
}

ContactSystem ContactSystem::chart_psi(const Model& model, double r) {
    ContactSystem sys = chart_common(model, "chart-psi");
    int n = model.chart().n;
    const Model* m = &model;
    sys.map = [n, m, r](const std::vector<double>& y) {
        return from_chart(m->chart_step(r, to_chart(n, y)));
    };
    return sys;
}

ContactSystem ContactSystem::identity_of(ContactSystem base) {
    base.name += "-identity";
    base.map = [](const std::vector<double>& y) { return y; };
    return base;
}

double DeformationH::dt(double t, const std::vector<double>& y, double h) const {
    if (grad_t) return grad_t(t, y);
    return (value(t + h, y) - value(t - h, y)) / (2 * h);
}

std::vector<double> DeformationH::dy(double t, const std::vector<double>& y, double h) const {
    if (grad_y) return grad_y(t, y);
    std::vector<double> g(y.size());
    std::vector<double> yy = y;
    for (size_t i = 0; i < y.size(); ++i) {
        yy[i] = y[i] + h;
        double up = value(t, yy);
        yy[i] = y[i] - h;
        double dn = value(t, yy);
        yy[i] = y[i];
        g[i] = (up - dn) / (2 * h);
    }
    return g;
}

double DeformationH::c2_norm(const std::vector<std::vector<double>>& samples) const {
    double sup = 0;
    const double h = 1e-4;
    for (const auto& s : samples) {
        double t = s[0];
        std::vector<double> y(s.begin() + 1, s.end());
        sup = std::max(sup, std::fabs(value(t, y)));
        sup = std::max(sup, std::fabs(dt(t, y, h)));
        for (double g : dy(t, y, h)) sup = std::max(sup, std::fabs(g));
        // second differences
        sup = std::max(sup, std::fabs(value(t + h, y) - 2 * value(t, y) + value(t - h, y)) / (h * h));
        std::vector<double> yy = y;
        for (size_t i = 0; i < y.size(); ++i) {
            yy[i] = y[i] + h;
            double up = value(t, yy);
            yy[i] = y[i] - h;
            double dn = value(t, yy);
            yy[i] = y[i];
            sup = std::max(sup, std::fabs(up - 2 * value(t, y) + dn) / (h * h));
        }
    }
    return sup;
}

DeformationH DeformationH::zero() {
    return {[](double, const std::vector<double>&) { return 0.0; }};
}

DeformationH DeformationH::scaled(const DeformationH& f, double tau) {
    DeformationH out;
    auto v = f.value;
    out.value = [v, tau](double t, const std::vector<double>& y) { return tau * v(t, y); };
    if (f.grad_t) {
        auto g = f.grad_t;
        out.grad_t = [g, tau](double t, const std::vector<double>& y) { return tau * g(t, y); };
    }
    if (f.grad_y) {
        auto g = f.grad_y;
        out.grad_y = [g, tau](double t, const std::vector<double>& y) {
            std::vector<double> gg = g(t, y);
            for (double& x : gg) x *= tau;
            return gg;
        };
    }
    return out;
}

double SuspensionSpace::verify_base(const std::vector<std::vector<double>>& samples) const {
    // Ker-alpha preservation of the base map, via finite-difference pushforward.
    double worst = 0;
    const double h = 1e-6;
    for (const auto& y : samples) {
        if (!base_.in_domain(y)) continue;
        std::vector<double> fy = base_.map(y);
        // Build kernel vectors: coordinate directions corrected along an
        // anchor direction with alpha != 0.
        int anchor = -1;
        double best = 0;
        for (int i = 0; i < base_.dim; ++i) {
            std::vector<double> e(base_.dim, 0.0);
            e[i] = 1.0;
            double a = base_.alpha(y, e);
            if (std::fabs(a) > best) {
                best = std::fabs(a);
                anchor = i;
            }
        }
        if (anchor < 0) continue;
        std::vector<double> ea(base_.dim, 0.0);
        ea[anchor] = 1.0;
        double aa = base_.alpha(y, ea);
        for (int i = 0; i < base_.dim; ++i) {
            if (i == anchor) continue;
            std::vector<double> v(base_.dim, 0.0);
            v[i] = 1.0;
            double av = base_.alpha(y, v);
            for (int k = 0; k < base_.dim; ++k) v[k] -= (av / aa) * ea[k];
            // pushforward by a full-vector central difference: f(y+hv) - f(y-hv)
            std::vector<double> push(base_.dim, 0.0);
            std::vector<double> yp = y, ym = y;
            for (int q = 0; q < base_.dim; ++q) {
                yp[q] += h * v[q];
                ym[q] -= h * v[q];
            }
            std::vector<double> fp = base_.map(yp), fm = base_.map(ym);
            for (int q = 0; q < base_.dim; ++q) push[q] = (fp[q] - fm[q]) / (2 * h);
            double nrm = 0;
            for (double x : v) nrm += x * x;
            nrm = std::sqrt(nrm);
            if (nrm < 1e-12) continue;
            for (double& x : push) x /= nrm;
            worst = std::max(worst, std::fabs(base_.alpha(fy, push)));
        }
    }
    return worst;
}

double SuspensionSpace::gluing_residual(const DeformationH& H,
                                        const std::vector<std::vector<double>>& samples) const {
    double worst = 0;
    for (const auto& y : samples) {
        if (!base_.in_domain(y)) continue;
        worst = std::max(worst, std::fabs(H.value(1.0, y) - H.value(0.0, base_.map(y))));
    }
    return worst;
}

std::vector<double> SuspensionSpace::characteristic_field(const DeformationH& H, double t,
                                                          const std::vector<double>& y,
                                                          double* residual) const {
    const int dy = base_.dim;
    const int dim = dy + 1;  // (t, y)
    // Basis vectors e_0 = d_t, e_{1+i} = d_{y_i}.
    auto nu_H = [&](const std::vector<double>& v) {
        std::vector<double> vy(v.begin() + 1, v.end());
        return H.value(t, y) * v[0] + base_.alpha(y, vy);
    };
    auto dnu_H = [&](const std::vector<double>& v, const std::vector<double>& w) {
        // d(H dt)(v, w) + d nu(v, w) = dH(v) dt(w) - dH(w) dt(v) + dalpha(v_y, w_y)
        std::vector<double> vy(v.begin() + 1, v.end()), wy(w.begin() + 1, w.end());
        double Ht = H.dt(t, y);
        std::vector<double> Hy = H.dy(t, y);
        auto dH = [&](const std::vector<double>& z) {
            double s = Ht * z[0];
            for (int i = 0; i < dy; ++i) s += Hy[i] * z[1 + i];
            return s;
        };
        return dH(v) * w[0] - dH(w) * v[0] + base_.dalpha(y, vy, wy);
    };

    std::vector<std::vector<double>> basis;
    for (int i = 0; i < dim; ++i) {
        std::vector<double> e(dim, 0.0);
        e[i] = 1.0;
        basis.push_back(e);
    }
    // eta_H basis: project each e onto ker nu_H against the anchor direction.
    int anchor = 0;
    double best = 0;
    for (int i = 0; i < dim; ++i) {
        double a = std::fabs(nu_H(basis[i]));
        if (a > best) {
            best = a;
            anchor = i;
        }
    }
    if (best < 1e-12)
        throw std::runtime_error("characteristic_field: degenerate distribution (nu_H vanishes on the frame)");
    std::vector<std::vector<double>> eta;
    double na = nu_H(basis[anchor]);
    for (int i = 0; i < dim; ++i) {
        if (i == anchor) continue;
        std::vector<double> w = basis[i];
        double c = nu_H(basis[i]) / na;
        for (int q = 0; q < dim; ++q) w[q] -= c * basis[anchor][q];
        eta.push_back(w);
    }

    // Rows: dt(Z) = 1; nu_H(Z) = 0; dnu_H(Z, w_k) = 0.
    int rows = 2 + static_cast<int>(eta.size());
    std::vector<double> m(rows * dim, 0.0), rhs(rows, 0.0), sol;
    m[0 * dim + 0] = 1.0;
    rhs[0] = 1.0;
    for (int j = 0; j < dim; ++j) m[1 * dim + j] = nu_H(basis[j]);
    rhs[1] = 0.0;
    for (size_t k = 0; k < eta.size(); ++k)
        for (int j = 0; j < dim; ++j) m[(2 + k) * dim + j] = dnu_H(basis[j], eta[k]);
    if (!solve_least_squares(rows, dim, m, rhs, sol))
        throw std::runtime_error("characteristic_field: singular system");
    if (residual) {
        double worst = 0;
        for (int rr = 0; rr < rows; ++rr) {
            double s = -rhs[rr];
            for (int j = 0; j < dim; ++j) s += m[rr * dim + j] * sol[j];
            worst = std::max(worst, std::fabs(s));
        }
        *residual = worst;
    }
    return sol;
}

std::vector<double> SuspensionSpace::return_map(const DeformationH& H, const std::vector<double>& y0,
                                                double step) const {
    const int dy = base_.dim;
    std::vector<double> y = y0;
    double t = 0;
    auto vel = [&](double tt, const std::vector<double>& yy) {
        std::vector<double> z = characteristic_field(H, tt, yy);
        std::vector<double> v(dy);
        for (int i = 0; i < dy; ++i) v[i] = z[1 + i] / z[0];  // reparametrize by t
        return v;
    };
    long steps = static_cast<long>(std::llround(1.0 / step));
    double h = 1.0 / steps;
    for (long k = 0; k < steps; ++k) {
        if (!base_.in_domain(y))
            throw std::runtime_error("return_map: integration left the modeled neighborhood");
        std::vector<double> k1 = vel(t, y), tmp(dy), k2, k3, k4;
        for (int i = 0; i < dy; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        k2 = vel(t + 0.5 * h, tmp);
        for (int i = 0; i < dy; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        k3 = vel(t + 0.5 * h, tmp);
        for (int i = 0; i < dy; ++i) tmp[i] = y[i] + h * k3[i];
        k4 = vel(t + h, tmp);
        for (int i = 0; i < dy; ++i) y[i] += (h / 6) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t += h;
    }
    // Glue (1, y) ~ (0, map(y)).
    return base_.map(y);
}

SuspensionSpace::ScalingResult SuspensionSpace::c1_distance_scaling(
    const DeformationH& H0, const std::vector<double>& taus,
    const std::vector<std::vector<double>>& samples, double step) const {
    const int dy = base_.dim;
    std::vector<std::vector<double>> c2_samples;
    for (const auto& y : samples) {
        std::vector<double> s{0.5};
        s.insert(s.end(), y.begin(), y.end());
        c2_samples.push_back(s);
    }
    double h0_c2 = H0.c2_norm(c2_samples);

    ScalingResult out;
    const double fd = 1e-5;
    auto c1_dist = [&](const DeformationH& H) {
        double worst = 0;
        for (const auto& y : samples) {
            std::vector<double> a = return_map(H, y, step);
            std::vector<double> b = base_.map(y);
            std::vector<double> ab = base_.diff(a, b);
            double d2 = 0;
            for (int i = 0; i < dy; ++i) d2 += ab[i] * ab[i];
            double d = std::sqrt(d2);
            // Jacobian discrepancy, Frobenius norm of the difference (an upper
            // bound for the operator norm up to sqrt(dim)); differences are
            // taken with the topology-aware diff so circle seams do not alias.
            double jf = 0;
            for (int j = 0; j < dy; ++j) {
                std::vector<double> yp = y, ym = y;
                yp[j] += fd;
                ym[j] -= fd;
                std::vector<double> da = base_.diff(return_map(H, yp, step), return_map(H, ym, step));
                std::vector<double> db = base_.diff(base_.map(yp), base_.map(ym));
                for (int i = 0; i < dy; ++i) {
                    double ja = da[i] / (2 * fd);
                    double jb = db[i] / (2 * fd);
                    jf += (ja - jb) * (ja - jb);
                }
            }
            worst = std::max(worst, d + std::sqrt(jf));
        }
        return worst;
    };

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    for (double tau : taus) {
        double x = tau * h0_c2;
        double d = c1_dist(DeformationH::scaled(H0, tau));
        out.taus.push_back(tau);
        out.dists.push_back(d);
        sx += x;
        sy += d;
        sxx += x * x;
        sxy += x * d;
        syy += d * d;
        ++n;
    }
    double denom = n * sxx - sx * sx;
    out.slope = (denom != 0) ? (n * sxy - sx * sy) / denom : 0;
    double ss_tot = syy - sy * sy / n;
    double intercept = (sy - out.slope * sx) / n;
    double ss_res = 0;
    for (int i = 0; i < n; ++i) {
        double x = out.taus[i] * h0_c2;
        double e = out.dists[i] - (out.slope * x + intercept);
        ss_res += e * e;
    }
    out.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

double SuspensionSpace::return_map_kernel_residual(const DeformationH& H,
                                                   const std::vector<std::vector<double>>& samples,
                                                   double step) const {
    // Same construction as verify_base but with the computed return map.
    ContactSystem wrapped = base_;
    const SuspensionSpace* self = this;
    auto Hcopy = H;
    wrapped.map = [self, Hcopy, step](const std::vector<double>& y) {
        return self->return_map(Hcopy, y, step);
    };
    SuspensionSpace tmp(wrapped);
    return tmp.verify_base(samples);
}

BridgeResult suspension_transitivity_bridge(const SuspensionSpace& susp, const DeformationH& H,
                                            const BoxPartition& part, int samples_per_cell,
                                            std::uint64_t seed, long horizon, double step) {
    SampledMap map = [&](const std::vector<double>& y) -> std::optional<std::vector<double>> {
        if (!susp.base().in_domain(y)) return std::nullopt;
        try {
            return susp.return_map(H, y, step);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    TransitionGraph g = build_transition_graph(map, part, samples_per_cell, seed);
    BridgeResult out;
    TransitivityResult tr = is_transitive(g);
    out.transitive = tr.verdict;
    MixingResult mx = is_mixing(g, horizon);
    out.mixing = mx.verdict;
    out.note = tr.note + "; " + mx.note;
    return out;
}

}  // namespace cbl
