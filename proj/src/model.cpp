#include "cbl/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cbl {

void ModelParams::validate(const ChartParams& cp) const {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("model.lambda must be in (0,1)");
    if (!(mu > 1.0) || mu * lambda > 1.0 + 1e-12)
        throw std::invalid_argument("model.mu must satisfy 1 < mu <= 1/lambda");
    if (N < 1) throw std::invalid_argument("model.N must be >= 1");
    if (m < 2) throw std::invalid_argument("model.m must be >= 2");
    if (k0 < 1) throw std::invalid_argument("model.k0 must be >= 1");
    if (x_u.n != cp.n) throw std::invalid_argument("model.x_u dimension must match chart.n");
    if (x_u.norm() > cp.eps_u / 2 + 1e-12)
        throw std::invalid_argument("model.x_u must satisfy |x_u| <= eps_u/2");
    if (!(r_max > 0.0)) throw std::invalid_argument("model.r_max must be positive");
    if (!(w_s > 0 && w_t > 0 && w_u > 0)) throw std::invalid_argument("model window halfwidths must be positive");
}

const char* to_string(RegionTag t) {
    switch (t) {
        case RegionTag::Chart: return "chart";
        case RegionTag::ReturnWindow: return "return-window";
        case RegionTag::Outside: return "outside";
    }
    return "?";
}

Model::Model(const ChartParams& cp, const ModelParams& mp, BlendKind blend)
    : chart_(cp), params_(mp), flow_(cp) {
    flow_.profile.blend = blend;
    cp.validate();
    mp.validate(cp);
}

ChartPoint Model::point_Q() const { return {Vec(chart_.n), 0.0, Vec(chart_.n)}; }
ChartPoint Model::point_P() const { return {Vec(chart_.n), chart_.L, Vec(chart_.n)}; }
ChartPoint Model::point_a() const { return {Vec::basis_one(chart_.n), 0.0, Vec(chart_.n)}; }
ChartPoint Model::point_b(double tau) const { return {Vec::basis_one(chart_.n), tau, Vec(chart_.n)}; }
ChartPoint Model::window_center() const { return {Vec(chart_.n), chart_.L, params_.x_u}; }

ChartPoint Model::phi_base(const ChartPoint& p) const {
    return {params_.lambda * p.s, p.t, (1.0 / params_.lambda) * p.u};
}
ChartPoint Model::phi_base_inv(const ChartPoint& p) const {
    return {(1.0 / params_.lambda) * p.s, p.t, params_.lambda * p.u};
}

Mat Model::phi_base_jacobian() const {
    int n = chart_.n;
    Mat j(flat_dim(n));
    for (int i = 0; i < n; ++i) {
        j.at(i, i) = params_.lambda;
        j.at(n + 1 + i, n + 1 + i) = 1.0 / params_.lambda;
    }
    j.at(n, n) = 1.0;
    return j;
}

PointMap Model::phi_base_map() const {
    Mat j = phi_base_jacobian();
    return {[this](const ChartPoint& p) { return phi_base(p); },
            [j](const ChartPoint&) { return j; }};
}

PointMap Model::t_translation(double c) const {
    int d = flat_dim(chart_.n);
    return {[c](const ChartPoint& p) { return ChartPoint{p.s, p.t + c, p.u}; },
            [d](const ChartPoint&) { return Mat::identity(d); }};
}

PointMap Model::u_translation(const Vec& c) const {
    int d = flat_dim(chart_.n);
    return {[c](const ChartPoint& p) { return ChartPoint{p.s, p.t, p.u + c}; },
            [d](const ChartPoint&) { return Mat::identity(d); }};
}

PointMap Model::hyperbolic_power(int k) const {
    int n = chart_.n;
    double lk = std::pow(params_.lambda, k);
    Mat j(flat_dim(n));
    for (int i = 0; i < n; ++i) {
        j.at(i, i) = lk;
        j.at(n + 1 + i, n + 1 + i) = 1.0 / lk;
    }
    j.at(n, n) = 1.0;
    return {[lk](const ChartPoint& p) { return ChartPoint{lk * p.s, p.t, (1.0 / lk) * p.u}; },
            [j](const ChartPoint&) { return j; }};
}

PointMap Model::s_shear(const Vec& c) const {
    int n = chart_.n;
    Mat j = Mat::identity(flat_dim(n));
    for (int i = 0; i < n; ++i) j.at(n, n + 1 + i) = c[i];  // dt' = dt + <c, du>
    return {[c](const ChartPoint& p) { return ChartPoint{p.s + c, p.t + c.dot(p.u), p.u}; },
            [j](const ChartPoint&) { return j; }};
}

ChartPoint Model::return_chi_raw(const ChartPoint& p) const {
    int n = chart_.n;
    double lk = std::pow(params_.lambda, params_.k0);
    Vec u1 = p.u - params_.x_u;
    Vec u2 = (1.0 / lk) * u1;
    Vec ones = Vec::basis_one(n);
    return {lk * p.s + ones, (p.t - chart_.L) + ones.dot(u2), u2};
}

ChartPoint Model::return_chi_raw_inv(const ChartPoint& p) const {
    int n = chart_.n;
    double lk = std::pow(params_.lambda, params_.k0);
    Vec ones = Vec::basis_one(n);
    Vec u2 = p.u;
    Vec u1 = lk * u2;
    return {(1.0 / lk) * (p.s - ones), p.t - ones.dot(u2) + chart_.L, u1 + params_.x_u};
}

ChartPoint Model::return_chi(const ChartPoint& p) const {
    if (!in_window(p)) {
        std::ostringstream os;
        os << "return_map_chi: point (t=" << p.t << ") is not in the return window W";
        throw std::domain_error(os.str());
    }
    return return_chi_raw(p);
}

Mat Model::return_chi_jacobian() const {
    int n = chart_.n;
    double lk = std::pow(params_.lambda, params_.k0);
    Mat j(flat_dim(n));
    for (int i = 0; i < n; ++i) {
        j.at(i, i) = lk;
        j.at(n + 1 + i, n + 1 + i) = 1.0 / lk;
    }
    j.at(n, n) = 1.0;
    Vec ones = Vec::basis_one(n);
    for (int i = 0; i < n; ++i) j.at(n, n + 1 + i) = ones[i] / lk;  // through the shear
    return j;
}

PointMap Model::return_chi_map() const {
    Mat j = return_chi_jacobian();
    return {[this](const ChartPoint& p) { return return_chi_raw(p); },
            [j](const ChartPoint&) { return j; }};
}

bool Model::in_window(const ChartPoint& p) const {
    if (std::fabs(p.t - chart_.L) > params_.w_t) return false;
    for (int i = 0; i < p.s.n; ++i)
        if (std::fabs(p.s[i]) > params_.w_s) return false;
    for (int i = 0; i < p.u.n; ++i)
        if (std::fabs(p.u[i] - params_.x_u[i]) > params_.w_u) return false;
    return in_chart(chart_, p);
}

ChartPoint Model::macro_step(double r, const ChartPoint& p) const {
    double block = params_.N * params_.m * r;
    ChartPoint q = flow_.phi_H(block, p);
    q = return_chi_raw(q);
    q.t += r;  // Reeb translation Phi^R_r
    return q;
}

Mat Model::macro_jacobian(double r, const ChartPoint& p) const {
    double block = params_.N * params_.m * r;
    Mat j1 = flow_.phi_H_jacobian(block, p);
    Mat j2 = return_chi_jacobian();
    return j2 * j1;  // Reeb translation has identity differential
}

std::optional<ChartPoint> Model::macro_source(double r, const ChartPoint& p) const {
    double block = params_.N * params_.m * r;
    ChartPoint q = p;
    q.t -= r;
    q = return_chi_raw_inv(q);
    ChartPoint w;
    try {
        w = flow_.phi_H(-block, q);
    } catch (const FlowRangeError&) {
        return std::nullopt;
    }
    if (!in_window(w)) return std::nullopt;
    return w;
}

ChartPoint Model::chart_step(double r, const ChartPoint& p) const {
    return flow_.phi_H(r, phi_base(p));
}

ChartPoint Model::chart_step_back(double r, const ChartPoint& p) const {
    return phi_base_inv(flow_.phi_H(-r, p));
}

Mat Model::chart_step_jacobian(double r, const ChartPoint& p) const {
    Mat jb = phi_base_jacobian();
    Mat jf = flow_.phi_H_jacobian(r, phi_base(p));
    return jf * jb;
}

Model::StepResult Model::psi_step(double r, const ChartPoint& p) const {
    if (in_window(p)) {
        ChartPoint q = macro_step(r, p);
        RegionTag tag = in_chart(chart_, q) ? RegionTag::ReturnWindow : RegionTag::Outside;
        return {q, tag, params_.N * params_.m};
    }
    if (!in_chart(chart_, p)) return {p, RegionTag::Outside, 0};
    ChartPoint base = phi_base(p);
    if (!in_chart(chart_, base)) return {base, RegionTag::Outside, 1};
    ChartPoint q;
    try {
        q = flow_.phi_H(r, base);
    } catch (const FlowRangeError&) {
        return {base, RegionTag::Outside, 1};
    }
    if (!in_chart(chart_, q)) return {q, RegionTag::Outside, 1};
    return {q, RegionTag::Chart, 1};
}

std::optional<Model::StepResult> Model::psi_step_back(double r, const ChartPoint& p) const {
    // Backward rule: undo a macro step if p is in the macro image, else undo a
    // chart step. Returns nullopt when the preimage leaves the chart.
    if (auto w = macro_source(r, p)) return StepResult{*w, RegionTag::ReturnWindow, params_.N * params_.m};
    ChartPoint q;
    try {
        q = chart_step_back(r, p);
    } catch (const FlowRangeError&) {
        return std::nullopt;
    }
    if (!in_chart(chart_, q)) return std::nullopt;
    return StepResult{q, RegionTag::Chart, 1};
}

std::pair<ChartPoint, RegionTag> Model::psi_r(const ChartPoint& p, double r) const {
    if (r < 0 || r > params_.r_max + 1e-12)
        throw std::domain_error("psi_r: r must lie in [0, r_max]");
    StepResult s = psi_step(r, p);
    return {s.point, s.tag};
}

HybridOrbit Model::iterate(double r, const ChartPoint& p, long units) const {
    HybridOrbit orbit;
    orbit.nodes.push_back({p, in_window(p) ? RegionTag::ReturnWindow : RegionTag::Chart, 0});
    long done = 0;
    ChartPoint cur = p;
    bool backward = units < 0;
    long total = backward ? -units : units;
    while (done < total) {
        if (backward) {
            auto s = psi_step_back(r, cur);
            if (!s) {
                orbit.escaped = true;
                orbit.nodes.push_back({cur, RegionTag::Outside, done});
                break;
            }
            cur = s->point;
            done += s->units;
            orbit.nodes.push_back({cur, s->tag, done});
        } else {
            StepResult s = psi_step(r, cur);
            cur = s.point;
            done += std::max(s.units, 1);
            orbit.nodes.push_back({cur, s.tag, done});
            if (s.tag == RegionTag::Outside) {
                orbit.escaped = true;
                break;
            }
        }
    }
    return orbit;
}

Mat Model::jacobian_chain(double r, const ChartPoint& p, long units) const {
    int d = flat_dim(chart_.n);
    Mat acc = Mat::identity(d);
    ChartPoint cur = p;
    long done = 0;
    while (done < units) {
        if (in_window(cur)) {
            acc = macro_jacobian(r, cur) * acc;
            cur = macro_step(r, cur);
            done += params_.N * params_.m;
        } else {
            acc = chart_step_jacobian(r, cur) * acc;
            cur = chart_step(r, cur);
            done += 1;
        }
        if (!in_chart(chart_, cur) && !in_window(cur))
            throw std::domain_error("jacobian_chain: orbit left the chart before the requested horizon");
    }
    return acc;
}

Model::ManifoldDescription Model::invariant_manifold(ManifoldId which, double r, int samples,
                                                     int steps, Rng& rng) const {
    ManifoldDescription md;
    md.id = which;
    int n = chart_.n;
    double L = chart_.L;
    double worst = 0;
    auto forward_tail = [&](ChartPoint x, const ChartPoint& target) {
        for (int k = 0; k < steps; ++k) {
            StepResult s = psi_step(r, x);
            if (s.tag == RegionTag::Outside) return 1e30;
            x = s.point;
        }
        return dist(x, target);
    };
    auto backward_tail = [&](ChartPoint x, const ChartPoint& target) {
        for (int k = 0; k < steps; ++k) {
            auto s = psi_step_back(r, x);
            if (!s) return 1e30;
            x = s->point;
        }
        return dist(x, target);
    };
    switch (which) {
        case ManifoldId::Ws_Q: {
            md.analytic = "{ t = 0, u = 0, |s| <= 3 }";
            for (int k = 0; k < samples; ++k) {
                ChartPoint x{rng.uniform_vec(n, -chart_.s_halfwidth, chart_.s_halfwidth), 0.0, Vec(n)};
                worst = std::max(worst, forward_tail(x, point_Q()));
            }
            break;
        }
        case ManifoldId::Wu_Q: {
            md.analytic = "{ s = 0, t in [-eps, L), u free }";
            for (int k = 0; k < samples; ++k) {
                ChartPoint x{Vec(n), rng.uniform(0.0, L * 0.9), rng.uniform_vec(n, -chart_.eps_u / 2, chart_.eps_u / 2)};
                worst = std::max(worst, backward_tail(x, point_Q()));
            }
            break;
        }
        case ManifoldId::Ws_P: {
            md.analytic = "{ t in (0, L+eps], u = 0 }";
            for (int k = 0; k < samples; ++k) {
                ChartPoint x{rng.uniform_vec(n, -chart_.s_halfwidth, chart_.s_halfwidth),
                             rng.uniform(L * 0.1, chart_.t_max()), Vec(n)};
                worst = std::max(worst, forward_tail(x, point_P()));
            }
            break;
        }
        case ManifoldId::Wu_P: {
            md.analytic = "{ s = 0, t = L, |u| <= delta }";
            for (int k = 0; k < samples; ++k) {
                ChartPoint x{Vec(n), L, rng.uniform_vec(n, -chart_.eps_u / 2, chart_.eps_u / 2)};
                worst = std::max(worst, backward_tail(x, point_P()));
            }
            break;
        }
    }
    md.certificate_residual = worst;
    md.certified = worst < 1e-2;
    return md;
}

std::vector<double> Model::fixed_point_spectrum(double r, bool at_P) const {
    // D(Psi_r) is diagonal at Q and P: (lambda f_r(t*), psi'_r(t*), 1/lambda)
    // with t* = 0 or L; f_r(0) = e^-r, psi'_r(0) = e^r, f_r(L) = e^r, psi'_r(L) = e^-r.
    std::vector<double> eig;
    double t0 = at_P ? chart_.L : 0.0;
    FlowVal fv = flow_.flow(r, t0);
    for (int i = 0; i < chart_.n; ++i) eig.push_back(params_.lambda * fv.f);
    eig.push_back(fv.dpsi_dt);
    for (int i = 0; i < chart_.n; ++i) eig.push_back(1.0 / params_.lambda);
    return eig;
}

Model::Heteroclinic Model::heteroclinic_point(double r, double delta) const {
    if (delta < 0 || delta > 2 * r) throw std::domain_error("heteroclinic_points: delta must lie in [0, 2r]");
    Heteroclinic h;
    h.point = point_b(r - delta);
    double block = params_.N * params_.m * r;
    // The leaf's window crossing sits at the exact Phi^H_{-Nmr} preimage of
    // t = L - delta (which can dip below the pure upper range for large delta).
    double t_w;
    try {
        t_w = flow_.psi_flow(-block, chart_.L - delta);
    } catch (const FlowRangeError&) {
        h.certified = false;
        h.residual = 1e30;
        return h;
    }
    ChartPoint w{Vec(chart_.n), t_w, params_.x_u};
    if (!in_window(w)) {
        h.certified = false;
        h.residual = 1e30;
        return h;
    }
    ChartPoint image = macro_step(r, w);
    h.residual = dist(image, h.point);
    h.certified = h.residual <= 1e-9;
    return h;
}

}  // namespace cbl
