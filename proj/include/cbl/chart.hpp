#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbl/geometry.hpp"
#include "cbl/rng.hpp"

namespace cbl {

// Parameters of the standard chart [-s_halfwidth, s_halfwidth]^n_s x
// [-delta, L+delta]_t x [-eps_u, eps_u]^n_u with contact form
// alpha = dt - sum_i s_i du_i.
struct ChartParams {
    int n = 1;
    double L = 0.5;
    double delta = 0.05;
    double eps_u = 0.2;
    double s_halfwidth = 3.0;

    void validate() const;

    double t_min() const { return -delta; }
    double t_max() const { return L + delta; }
};

bool in_chart(const ChartParams& cp, const ChartPoint& p, double slack = 0.0);

// alpha_p(v) = v.dt - sum_i p.s_i * v.du_i
double alpha_eval(const ChartPoint& p, const Tangent& v);

// d(alpha) = sum_i du_i ^ ds_i (constant coefficients).
double dalpha_eval(const ChartPoint& p, const Tangent& v, const Tangent& w);

// Reeb field of alpha: d_t at every point.
Tangent reeb_field(const ChartPoint& p);

// alpha ^ (dalpha)^n evaluated on the coordinate frame at p (nonzero iff the
// contact condition holds there).
double contact_volume(const ChartPoint& p);

// A map of the chart together with its differential.
struct PointMap {
    std::function<ChartPoint(const ChartPoint&)> f;
    std::function<Mat(const ChartPoint&)> jacobian;

    ChartPoint operator()(const ChartPoint& p) const { return f(p); }
};

// Central finite-difference Jacobian (relative step), with an optional
// Richardson pass combining steps h and h/2.
Mat fd_jacobian(const std::function<ChartPoint(const ChartPoint&)>& f, const ChartPoint& p,
                double rel_step = 1e-6, bool richardson = false);

struct StrictContactResult {
    bool ok = false;
    double max_residual = 0.0;
    ChartPoint witness_point;
    Tangent witness_vector;
};

// Residual of F^*alpha = alpha over samples: max |alpha_{F(p)}(DF v) - alpha_p(v)|.
// Throws std::domain_error naming the sample if an image leaves the chart.
StrictContactResult verify_strict_contact(const PointMap& map, const ChartParams& cp,
                                          const std::vector<std::pair<ChartPoint, Tangent>>& samples,
                                          double tol);

// Residual of kernel preservation: max |alpha_{F(p)}(DF v)| over unit v in ker alpha_p.
StrictContactResult kernel_preservation_residual(const PointMap& map, const ChartParams& cp,
                                                 const std::vector<std::pair<ChartPoint, Tangent>>& samples,
                                                 double tol);

// Projects v to ker alpha_p (adjusts dt to match sum s_i v.du_i).
Tangent project_to_kernel(const ChartPoint& p, Tangent v);

// Scalar field H with first partials, as needed by the Hamiltonian solver.
struct ScalarField {
    std::function<double(const ChartPoint&)> value;
    // gradient packed as a Tangent: (dH/ds, dH/dt, dH/du).
    std::function<Tangent(const ChartPoint&)> gradient;

    static ScalarField with_fd_gradient(std::function<double(const ChartPoint&)> value, int n,
                                        double rel_step = 1e-6);
};

// Solves the (2n+1)-dimensional linear system
//   alpha(V) = H(p),   (i_V dalpha + dH - dH(R) alpha)|_{ker alpha} = 0
// for the contact Hamiltonian vector field at p. Throws std::runtime_error on a
// singular system (cannot occur for the standard alpha).
Tangent contact_vector_field(const ScalarField& H, const ChartPoint& p);

// Residuals of the two defining equations for a candidate field (for oracles).
double contact_vector_field_residual(const ScalarField& H, const ChartPoint& p, const Tangent& V);

// Sampling helpers.
ChartPoint sample_chart_point(const ChartParams& cp, Rng& rng, double shrink = 1.0);
Tangent sample_unit_tangent(int n, Rng& rng);

}  // namespace cbl
