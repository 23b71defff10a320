#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbl/chart.hpp"
#include "cbl/profile.hpp"

namespace cbl {

// Parameters of the synthetic partially hyperbolic model.
struct ModelParams {
    double lambda = 0.5;  // per-step s-contraction of the base map
    int N = 1;            // iterate count of the cone lemma
    double mu = 2.0;      // dilation constant (default 1/lambda)
    int k0 = 6;           // hyperbolic power inside the return map
    int m = 2;            // return-map step count (>= 2)
    Vec x_u{0.05};        // u-coordinate of the heteroclinic preimage (0_s, L, x_u)
    double r_max = 0.1;

    // Return window W = {|s|_inf <= w_s, |t - L| <= w_t, |u - x_u|_inf <= w_u}.
    // w_t must cover 2 r_max e^{N m r_max} (the heteroclinic delta-range) and
    // (r + t(Q_r)) e^{N m r} (the blender A' component) across the sweeps.
    double w_s = 0.02;
    double w_t = 0.26;
    double w_u = 0.02;

    void validate(const ChartParams& cp) const;
};

enum class RegionTag { Chart, ReturnWindow, Outside };

const char* to_string(RegionTag t);

struct OrbitNode {
    ChartPoint point;
    RegionTag tag = RegionTag::Chart;
    long step_index = 0;  // time units consumed before this node
};

// Orbit under the hybrid rule; terminates with Outside if the point leaves the
// chart away from W.
struct HybridOrbit {
    std::vector<OrbitNode> nodes;
    bool escaped = false;

    const ChartPoint& back_point() const { return nodes.back().point; }
};

class Model {
  public:
    Model(const ChartParams& cp, const ModelParams& mp, BlendKind blend = BlendKind::Quadratic);

    const ChartParams& chart() const { return chart_; }
    const ModelParams& params() const { return params_; }
    const HamiltonianFlow& flow() const { return flow_; }

    // Named points of the construction.
    ChartPoint point_Q() const;                 // (0_s, 0, 0_u)
    ChartPoint point_P() const;                 // (0_s, L, 0_u)
    ChartPoint point_a() const;                 // (1_s, 0, 0_u)
    ChartPoint point_b(double tau) const;       // (1_s, tau, 0_u)
    ChartPoint window_center() const;           // (0_s, L, x_u)

    // Base map Phi(s,t,u) = (lambda s, t, u/lambda) and its inverse.
    ChartPoint phi_base(const ChartPoint& p) const;
    ChartPoint phi_base_inv(const ChartPoint& p) const;
    Mat phi_base_jacobian() const;
    PointMap phi_base_map() const;

    // Strictly contact affine factors of the return map.
    PointMap t_translation(double c) const;
    PointMap u_translation(const Vec& c) const;
    PointMap hyperbolic_power(int k) const;
    PointMap s_shear(const Vec& c) const;  // (s + c, t + <c, u>, u)

    // Return map R_chi = G_{1_s} o H_lambda^{k0} o T_u(-x_u) o T_t(-L).
    // The checked version requires p in W; raw applies the affine formula.
    ChartPoint return_chi(const ChartPoint& p) const;
    ChartPoint return_chi_raw(const ChartPoint& p) const;
    ChartPoint return_chi_raw_inv(const ChartPoint& p) const;
    Mat return_chi_jacobian() const;
    PointMap return_chi_map() const;  // raw formula (domain handled by caller)

    bool in_window(const ChartPoint& p) const;

    // Macro step of N*m units applied on W:
    //   Psi_r^{Nm}|_W = Phi^R_r o R_chi o Phi^H_{N m r}.
    ChartPoint macro_step(double r, const ChartPoint& p) const;
    Mat macro_jacobian(double r, const ChartPoint& p) const;
    // Inverse macro; empty if the source is not in W (point not in macro image).
    std::optional<ChartPoint> macro_source(double r, const ChartPoint& p) const;

    // One unit of the hybrid dynamics from p: either the chart rule
    // Phi^H_r o Phi (1 unit) or, from W, the macro step (N*m units).
    // Returns the image, region tag of the *source* rule, and units consumed;
    // tag Outside means the image left chart + window.
    struct StepResult {
        ChartPoint point;
        RegionTag tag;
        int units;
    };
    StepResult psi_step(double r, const ChartPoint& p) const;
    std::optional<StepResult> psi_step_back(double r, const ChartPoint& p) const;

    // One application of Psi_r with its region tag.
    std::pair<ChartPoint, RegionTag> psi_r(const ChartPoint& p, double r) const;

    // Iterate the hybrid rule for exactly `units` time units (forward) or
    // |units| backward when units < 0. Orbit stops early when Outside.
    HybridOrbit iterate(double r, const ChartPoint& p, long units) const;

    // Chain of differentials along a forward hybrid orbit of `units` units.
    // Returns identity-sized matrix product D(Psi_r^units) at p.
    Mat jacobian_chain(double r, const ChartPoint& p, long units) const;

    // Jacobian of one forward chart step at p (no window logic).
    Mat chart_step_jacobian(double r, const ChartPoint& p) const;
    ChartPoint chart_step(double r, const ChartPoint& p) const;
    ChartPoint chart_step_back(double r, const ChartPoint& p) const;

    // Analytic local invariant manifolds of Lemma-style descriptions.
    enum class ManifoldId { Ws_Q, Wu_Q, Ws_P, Wu_P };
    struct ManifoldDescription {
        ManifoldId id;
        std::string analytic;  // human-readable set description
        // Sampled certificate: max distance of the orbit tail to the fixed point
        // after `steps` iterations of the appropriate (forward/backward) map.
        double certificate_residual = 0;
        bool certified = false;
    };
    ManifoldDescription invariant_manifold(ManifoldId which, double r, int samples, int steps,
                                           Rng& rng) const;

    // Eigenvalues of D(Psi_r) at Q and P (diagonal in the model).
    std::vector<double> fixed_point_spectrum(double r, bool at_P) const;

    // Heteroclinic point (1_s, r - delta, 0_u) of the Reeb segment [b_-r, b_r],
    // with a certificate that the macro connects it to (0_s, L - delta e^{Nmr}, x_u).
    struct Heteroclinic {
        ChartPoint point;
        bool certified;       // macro source lies in W and maps onto the point
        double residual;      // |macro(source) - point|
    };
    Heteroclinic heteroclinic_point(double r, double delta) const;

  private:
    ChartParams chart_;
    ModelParams params_;
    HamiltonianFlow flow_;
};

}  // namespace cbl
