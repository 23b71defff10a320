#include "cbl/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbl {

namespace {

// Quadratic blend in scaled coordinates x = 6(t - L/2)/L in [-1, 1]:
//   h = L/3 + (L/12)(1 - x^2).
// Quartic alternative: h = L/3 + (L/12)(1 - x^2)(1 + beta (1 - x^2)).
constexpr double kQuarticBeta = 0.2;

}  // namespace

double ProfileH::h(double t) const {
    if (t <= L / 3) return t;
    if (t >= 2 * L / 3) return L - t;
    double x = 6 * (t - L / 2) / L;
    double q = 1 - x * x;
    if (blend == BlendKind::Quadratic) return L / 3 + (L / 12) * q;
    return L / 3 + (L / 12) * q * (1 + kQuarticBeta * q);
}

double ProfileH::hp(double t) const {
    if (t <= L / 3) return 1.0;
    if (t >= 2 * L / 3) return -1.0;
    double x = 6 * (t - L / 2) / L;
    if (blend == BlendKind::Quadratic) return -x;
    return -x * (1 + 2 * kQuarticBeta * (1 - x * x));
}

double ProfileH::hpp(double t) const {
    if (t < L / 3 || t > 2 * L / 3) return 0.0;
    double x = 6 * (t - L / 2) / L;
    if (blend == BlendKind::Quadratic) return -6 / L;
    return -(6 / L) * (1 + 2 * kQuarticBeta - 6 * kQuarticBeta * x * x);
}

namespace {

struct Seg {
    FlowVal val;
    double time;       // signed time actually advanced
    bool hit_boundary; // stopped at a junction
    double boundary_t; // exact junction value if hit_boundary
};

FlowVal compose(const FlowVal& a, const FlowVal& b) {
    // a first (from t0), then b (evaluated at a.psi).
    FlowVal r;
    r.psi = b.psi;
    r.f = a.f * b.f;
    r.dpsi_dt = b.dpsi_dt * a.dpsi_dt;
    r.df_dt = a.df_dt * b.f + a.f * b.df_dt * a.dpsi_dt;
    return r;
}

// h = t branch: psi = t e^rho, f = e^-rho.
FlowVal low_val(double t, double rho) {
    FlowVal v;
    v.psi = t * std::exp(rho);
    v.f = std::exp(-rho);
    v.dpsi_dt = std::exp(rho);
    v.df_dt = 0;
    return v;
}

// h = L - t branch: L - psi = (L - t) e^-rho, f = e^rho.
FlowVal up_val(double L, double t, double rho) {
    FlowVal v;
    v.psi = L - (L - t) * std::exp(-rho);
    v.f = std::exp(rho);
    v.dpsi_dt = std::exp(-rho);
    v.df_dt = 0;
    return v;
}

// Middle branch (quadratic blend): tau = t - L/2 = A tanh(theta),
// theta = k rho + theta0, A = L sqrt(5)/6, k = sqrt(5)/2.
FlowVal mid_val(double L, double t, double rho) {
    double A = L * std::sqrt(5.0) / 6.0;
    double k = std::sqrt(5.0) / 2.0;
    double tau0 = t - L / 2;
    double ratio = std::clamp(tau0 / A, -1.0 + 1e-16, 1.0 - 1e-16);
    double theta0 = std::atanh(ratio);
    double theta = k * rho + theta0;
    double g = std::cosh(theta) / std::cosh(theta0);
    FlowVal v;
    v.psi = L / 2 + A * std::tanh(theta);
    v.f = g * g;
    v.dpsi_dt = 1.0 / v.f;
    v.df_dt = (2.0 / A) * g * std::sinh(k * rho);
    return v;
}

enum class Range { Low, Mid, Up };

Range classify(double L, double t, bool forward) {
    double j1 = L / 3, j2 = 2 * L / 3;
    if (t < j1) return Range::Low;
    if (t > j2) return Range::Up;
    if (t == j1) return forward ? Range::Mid : Range::Low;
    if (t == j2) return forward ? Range::Up : Range::Mid;
    return Range::Mid;
}

}  // namespace

FlowVal flow_closed(const ProfileH& prof, double r, double t0, double delta) {
    const double L = prof.L;
    const double j1 = L / 3, j2 = 2 * L / 3;
    const double inf = std::numeric_limits<double>::infinity();

    if (t0 < -delta || t0 > L + delta) throw FlowRangeError(0.0);

    FlowVal total;  // identity
    total.psi = t0;
    double t = t0;
    double remaining = r;
    double elapsed = 0;

    for (int guard = 0; guard < 8 && remaining != 0.0; ++guard) {
        bool forward = remaining > 0;
        Range range = classify(L, t, forward);
        double exit_time = inf;  // unsigned time to segment boundary in flow direction
        bool exit_is_junction = true;
        double junction_t = 0;

        if (range == Range::Low) {
            if (forward) {
                if (t > 0) {
                    exit_time = std::log(j1 / t);
                    junction_t = j1;
                } else if (t < 0) {
                    exit_time = std::log(delta / (-t));
                    exit_is_junction = false;
                }
            } else {
                // backward: |t| decays toward the fixed point 0, never exits
            }
        } else if (range == Range::Up) {
            double zeta = L - t;
            if (!forward) {
                if (zeta > 0) {
                    exit_time = std::log((L / 3) / zeta);
                    junction_t = j2;
                } else if (zeta < 0) {
                    exit_time = std::log(delta / (-zeta));
                    exit_is_junction = false;
                }
            }
            // forward: |L - t| decays toward the fixed point L, never exits
        } else {
            double A = L * std::sqrt(5.0) / 6.0;
            double k = std::sqrt(5.0) / 2.0;
            double theta0 = std::atanh(std::clamp((t - L / 2) / A, -1.0 + 1e-16, 1.0 - 1e-16));
            double theta_hi = std::atanh(1.0 / std::sqrt(5.0));
            if (forward) {
                exit_time = (theta_hi - theta0) / k;
                junction_t = j2;
            } else {
                exit_time = (theta0 + theta_hi) / k;
                junction_t = j1;
            }
        }

        double avail = std::fabs(remaining);
        if (exit_time >= avail) {
            FlowVal seg;
            if (range == Range::Low)
                seg = low_val(t, remaining);
            else if (range == Range::Up)
                seg = up_val(L, t, remaining);
            else
                seg = mid_val(L, t, remaining);
            total = compose(total, seg);
            return total;
        }
        if (!exit_is_junction) throw FlowRangeError(elapsed + (forward ? exit_time : -exit_time));

        double signed_seg = forward ? exit_time : -exit_time;
        FlowVal seg;
        if (range == Range::Low)
            seg = low_val(t, signed_seg);
        else if (range == Range::Up)
            seg = up_val(L, t, signed_seg);
        else
            seg = mid_val(L, t, signed_seg);
        seg.psi = junction_t;  // land exactly on the junction
        total = compose(total, seg);
        t = junction_t;
        remaining -= signed_seg;
        elapsed += signed_seg;
    }
    if (remaining != 0.0) throw std::logic_error("flow_closed: segment stitching did not terminate");
    return total;
}

FlowVal flow_rk4(const ProfileH& prof, double r, double t0, double delta, double step) {
    const double L = prof.L;
    if (t0 < -delta || t0 > L + delta) throw FlowRangeError(0.0);
    // State y = (psi, log f, dpsi, g = df/dt).
    double y[4] = {t0, 0.0, 1.0, 0.0};
    auto deriv = [&](const double* s, double* d) {
        double psi = s[0];
        double f = std::exp(s[1]);
        d[0] = prof.h(psi);
        d[1] = -prof.hp(psi);
        d[2] = prof.hp(psi) * s[2];
        d[3] = -prof.hpp(psi) * s[2] * f - prof.hp(psi) * s[3];
    };
    double dir = (r >= 0) ? 1.0 : -1.0;
    double total = std::fabs(r);
    double done = 0;
    while (done < total) {
        double h = std::min(step, total - done);
        double hs = dir * h;
        double k1[4], k2[4], k3[4], k4[4], tmp[4];
        deriv(y, k1);
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * hs * k1[i];
        deriv(tmp, k2);
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * hs * k2[i];
        deriv(tmp, k3);
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + hs * k3[i];
        deriv(tmp, k4);
        for (int i = 0; i < 4; ++i) y[i] += (hs / 6.0) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        done += h;
        if (y[0] < -delta - 1e-12 || y[0] > L + delta + 1e-12) throw FlowRangeError(dir * done);
    }
    FlowVal v;
    v.psi = y[0];
    v.f = std::exp(y[1]);
    v.dpsi_dt = y[2];
    v.df_dt = y[3];
    return v;
}

Mat HamiltonianFlow::phi_H_jacobian(double r, const ChartPoint& p) const {
    int n = p.dim_n();
    int d = flat_dim(n);
    FlowVal fv = flow(r, p.t);
    Mat j(d);
    for (int i = 0; i < n; ++i) {
        j.at(i, i) = fv.f;           // ds'_i/ds_i
        j.at(i, n) = fv.df_dt * p.s[i];  // ds'_i/dt
        j.at(n + 1 + i, n + 1 + i) = 1.0;  // du'/du
    }
    j.at(n, n) = fv.dpsi_dt;
    return j;
}

}  // namespace cbl
