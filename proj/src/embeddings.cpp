#include "cbl/embeddings.hpp"

#include <cmath>

#include "cbl/rng.hpp"

namespace cbl {

PullbackResidual disk_neighborhood_identity(double a, long n_samples, std::uint64_t seed) {
    PullbackResidual out{"disk-neighborhood", 0.0, n_samples};
    Rng rng(seed);
    const double two_pi_a = 2 * M_PI * a;
    for (long k = 0; k < n_samples; ++k) {
        double s = -two_pi_a * rng.uniform(0.05, 0.95);
        double vs = rng.uniform(-1, 1), vt = rng.uniform(-1, 1), vx = rng.uniform(-1, 1);
        // iota(s, t, x) = (r, theta, x) with r = sqrt(-s / 2 pi a), theta = 2 pi t.
        double r = std::sqrt(-s / two_pi_a);
        double dr = -vs / (2 * two_pi_a * r);
        double dtheta = 2 * M_PI * vt;
        double dx = vx;
        (void)dr;  // the target form has no dr component
        double target = -a * r * r * dtheta + dx;  // (-a r^2 dtheta + beta)(D iota v)
        double source = s * vt + vx;               // (s dt + beta)(v)
        out.residual = std::max(out.residual, std::fabs(target - source));
    }
    return out;
}

std::vector<PullbackResidual> cosphere_chain_identity(double a, long n_samples, std::uint64_t seed) {
    std::vector<PullbackResidual> out;
    Rng rng(seed);

    // Stage 1: jmath(s, t, x) = (rho, t, x), rho = -log(-s);
    // jmath^*(dt + e^rho beta) = -s^{-1} (-s dt + beta).
    {
        PullbackResidual st{"jmath", 0.0, n_samples};
        for (long k = 0; k < n_samples; ++k) {
            double s = -rng.uniform(0.05, 3.0);
            double vt = rng.uniform(-1, 1), vx = rng.uniform(-1, 1);
            double lhs = vt + std::exp(-std::log(-s)) * vx;
            double rhs = (-1.0 / s) * (-s * vt + vx);
            st.residual = std::max(st.residual, std::fabs(lhs - rhs));
        }
        out.push_back(st);
    }

    // Primitive tau(s, t) = ((t - t0) s + s0 t)/2 of lambda + s dt; only its
    // partials enter the pullbacks (beta has constant coefficients).
    const double s0 = -2 * std::sqrt(a), t0 = 0.3;
    auto tau_s = [&](double, double t) { return 0.5 * (t - t0); };
    auto tau_t = [&](double s, double) { return 0.5 * (s + s0); };

    // Stage 2: Psi(s, t, x) = (s, t, x + tau(s, t));
    // Psi^*(-s dt + beta) = lambda + beta, lambda = ((t-t0) ds - (s-s0) dt)/2.
    {
        PullbackResidual st{"reeb-twist", 0.0, n_samples};
        for (long k = 0; k < n_samples; ++k) {
            double s = s0 + rng.uniform(-1, 1), t = t0 + rng.uniform(-1, 1);
            double vs = rng.uniform(-1, 1), vt = rng.uniform(-1, 1), vx = rng.uniform(-1, 1);
            double dxp = vx + tau_s(s, t) * vs + tau_t(s, t) * vt;
            double lhs = -s * vt + dxp;
            double rhs = 0.5 * ((t - t0) * vs - (s - s0) * vt) + vx;
            st.residual = std::max(st.residual, std::fabs(lhs - rhs));
        }
        out.push_back(st);
    }

    // Stage 3: composite with the polar map phi(r, theta) = (c r cos + s0, c r sin + t0),
    // c = sqrt(a); (Psi o Phi)^*(-s dt + beta) = -(a/2) r^2 dtheta + beta.
    {
        PullbackResidual st{"composite", 0.0, n_samples};
        double c = std::sqrt(a);
        for (long k = 0; k < n_samples; ++k) {
            double r = rng.uniform(0.05, 1.0), th = rng.uniform(0.0, 2 * M_PI);
            double vr = rng.uniform(-1, 1), vth = rng.uniform(-1, 1), vx = rng.uniform(-1, 1);
            double s = c * r * std::cos(th) + s0;
            double t = c * r * std::sin(th) + t0;
            double ds = c * std::cos(th) * vr - c * r * std::sin(th) * vth;
            double dt = c * std::sin(th) * vr + c * r * std::cos(th) * vth;
            double dxp = vx + tau_s(s, t) * ds + tau_t(s, t) * dt;
            double lhs = -s * dt + dxp;
            double rhs = -(a / 2) * r * r * vth + vx;
            st.residual = std::max(st.residual, std::fabs(lhs - rhs));
        }
        out.push_back(st);
    }
    return out;
}

}  // namespace cbl
