#pragma once

#include <stdexcept>

#include "cbl/chart.hpp"
#include "cbl/geometry.hpp"

namespace cbl {

// Thrown when a t-axis trajectory leaves [-delta, L+delta].
struct FlowRangeError : std::runtime_error {
    double exit_time;
    explicit FlowRangeError(double when)
        : std::runtime_error("t-axis trajectory left the chart range"), exit_time(when) {}
};

enum class BlendKind {
    Quadratic,  // h = L/3 + (t-L/3)(2L/3-t)/(L/3) on the middle third
    Quartic,    // alternative C1 blend used to probe blend-insensitivity
};

// Profile h of the perturbation Hamiltonian H(s,t,u) = h(t):
//   h(t) = t for t <= L/3, h(t) = L - t for t >= 2L/3,
//   h > 0 and |h'| < 1/L on (0, L).
struct ProfileH {
    double L = 0.5;
    BlendKind blend = BlendKind::Quadratic;

    double h(double t) const;
    double hp(double t) const;   // dh/dt (continuous; the blends are C^1)
    double hpp(double t) const;  // d2h/dt2, piecewise (a.e.)
};

// The t-axis flow psi and cocycle f of eq. d(psi)/dr = h(psi), d(f)/dr = -h'(psi) f,
// together with their exact t-derivatives. dpsi_dt * f == 1 identically.
struct FlowVal {
    double psi = 0;      // psi_r(t0)
    double f = 1;        // f_r(t0) = exp(-int_0^r h'(psi_rho(t0)) d rho)
    double dpsi_dt = 1;  // d(psi_r)/dt at t0  (= 1/f)
    double df_dt = 0;    // d(f_r)/dt at t0
};

// Closed-form evaluation (exponential end ranges, tanh middle range for the
// quadratic blend), stitched exactly at the junctions. Supports r of any sign.
// Throws FlowRangeError if the trajectory exits [-delta, L+delta].
FlowVal flow_closed(const ProfileH& prof, double r, double t0, double delta);

// Fixed-step RK4 of the same ODEs (log f is integrated); the step-halving
// oracle for flow_closed and the only route for the quartic blend.
FlowVal flow_rk4(const ProfileH& prof, double r, double t0, double delta, double step);

// Public flow API bound to a chart (default step 1e-4 * L for the oracle).
struct HamiltonianFlow {
    ChartParams chart;
    ProfileH profile;

    HamiltonianFlow() = default;
    explicit HamiltonianFlow(const ChartParams& cp) : chart(cp) { profile.L = cp.L; }

    double h_eval(double t) const { return profile.h(t); }
    double h_prime(double t) const { return profile.hp(t); }

    FlowVal flow(double r, double t0) const {
        if (profile.blend == BlendKind::Quadratic) return flow_closed(profile, r, t0, chart.delta);
        return flow_rk4(profile, r, t0, chart.delta, 1e-4 * profile.L);
    }
    double psi_flow(double r, double t0) const { return flow(r, t0).psi; }
    double f_factor(double r, double t0) const { return flow(r, t0).f; }

    // Phi^H_r(s,t,u) = (f_r(t) s, psi_r(t), u).
    ChartPoint phi_H(double r, const ChartPoint& p) const {
        FlowVal fv = flow(r, p.t);
        return {fv.f * p.s, fv.psi, p.u};
    }
    // Exact differential of phi_H at p.
    Mat phi_H_jacobian(double r, const ChartPoint& p) const;

    PointMap as_map(double r) const {
        return {[*this, r](const ChartPoint& p) { return phi_H(r, p); },
                [*this, r](const ChartPoint& p) { return phi_H_jacobian(r, p); }};
    }

    // Generator of the flow: h(t) d_t - h'(t) sum_i s_i d_{s_i}.
    Tangent generator(const ChartPoint& p) const {
        Tangent v = Tangent::zero(p.dim_n());
        v.dt = profile.h(p.t);
        v.ds = (-profile.hp(p.t)) * p.s;
        return v;
    }
};

}  // namespace cbl
