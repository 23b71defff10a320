#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cbl {

// Numerical verification of the explicit coordinate-change and pullback
// identities for neighborhoods of suspensions, instantiated with the circle as
// the base manifold (all maps in closed form).

struct PullbackResidual {
    std::string stage;
    double residual = 0;
    long samples = 0;
};

// iota(s, t, x) = ((-s / 2 pi a)^{1/2}, 2 pi t, x) pulls -a r^2 d theta + beta
// back to s dt + beta on (-2 pi a, 0)_s x (R/Z)_t x circle.
PullbackResidual disk_neighborhood_identity(double a, long n_samples, std::uint64_t seed);

// The three stages of the cosphere-neighborhood chain with base X = circle:
//   1. jmath: (s,t,x) -> (rho = -log(-s), t, x), pulling dt + e^rho beta back
//      to -s^{-1} (-s dt + beta);
//   2. Reeb twist Psi(s,t,x) = (s, t, Phi^R(tau(s,t), x)) with
//      tau = ((t - t0) s + s0 t)/2, pulling -s dt + beta back to lambda + beta,
//      lambda = ((t - t0) ds - (s - s0) dt)/2;
//   3. polar map phi(r, theta) = (sqrt(a) r cos + s0, sqrt(a) r sin + t0) x id,
//      making the composite pullback equal -(a/2) r^2 d theta + beta.
std::vector<PullbackResidual> cosphere_chain_identity(double a, long n_samples, std::uint64_t seed);

}  // namespace cbl
