#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cbl/geometry.hpp"
#include "cbl/model.hpp"

namespace cbl {

// Coordinate sub-bundle selector for metric cones.
struct Axes {
    bool s = false;
    bool t = false;
    bool u = false;

    static Axes s_only() { return {true, false, false}; }
    static Axes t_only() { return {false, true, false}; }
    static Axes u_only() { return {false, false, true}; }
    static Axes tu() { return {false, true, true}; }
};

// Metric cone K_eps(E) = { v : |v - pi_E v| <= eps |pi_E v| } around a
// coordinate sub-bundle E. Width 0 selects the bundle itself.
struct ConeField {
    Axes base;
    double width = 0.25;

    Tangent project(const Tangent& v) const;  // orthogonal projection to the base
    double off_ratio(const Tangent& v) const; // |v - pi v| / |pi v| (inf if pi v = 0)
    bool contains(const Tangent& v) const;
};

// Fiberwise sum of two cones over complementary bases:
// membership = decomposable as a sum of members.
struct SumCone {
    ConeField first;   // e.g. K^{us}_eps: base u, off-axes s
    ConeField second;  // e.g. K^{cs}_delta: base t, off-axes s
    bool contains(const Tangent& v) const;
};

bool cone_contains(const ConeField& c, const Tangent& v);
bool cone_contains(const SumCone& c, const Tangent& v);

// Deterministic rays on the cone boundary (|off| = eps |base|) plus the base
// axes; rays_per_point directions for n = 1, Fibonacci-style for higher n.
std::vector<Tangent> cone_boundary_rays(const ConeField& c, int n, int rays_per_point);

struct ContractionResult {
    bool ok = false;
    double margin = 0;  // min over rays of (eps - achieved off-ratio)
    ChartPoint witness_point;
    Tangent witness_ray;
};

// True iff every pushed-forward boundary ray lies in the cone interior.
ContractionResult check_contraction(const std::function<Mat(const ChartPoint&)>& jac,
                                    const ConeField& cone, const std::vector<ChartPoint>& points,
                                    int rays_per_point);

struct DilationEstimate {
    double lambda_hat = 0;  // measured infimum of |Jv|/|v| over sampled cone vectors
    long sample_count = 0;
    ChartPoint witness_point;
    Tangent witness_vector;
};

DilationEstimate dilation_constant(const std::function<Mat(const ChartPoint&)>& jac,
                                   const ConeField& cone, const std::vector<ChartPoint>& points,
                                   int rays_per_point);

// Stretching criterion: mu^2 > 1 + eps^2, nu > 1 > eta, and
// eta / (1 - mu^-1) < delta < sqrt(nu^2 - 1).
bool check_stretching_criterion(double mu, double eps, double nu, double eta, double delta);

struct CenterDrift {
    double nu = 0;           // dt-component of the pushed Reeb vector
    double eta = 0;          // |ds-component| / nu
    double du_residual = 0;  // |du-component| (model violation above 1e-9)
};

// Push R = d_t along a forward hybrid orbit of `units` units by chained
// differentials. Throws std::runtime_error if the du part exceeds 1e-9.
CenterDrift estimate_center_drift(const Model& model, double r, const ChartPoint& start, long units);

}  // namespace cbl
