#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbl/model.hpp"
#include "cbl/transitivity.hpp"

namespace cbl {

// A contact manifold Y with form alpha and a self-map preserving ker alpha,
// in flat coordinates (generic dimension).
struct ContactSystem {
    int dim = 1;
    std::string name;
    std::function<double(const std::vector<double>&, const std::vector<double>&)> alpha;
    std::function<double(const std::vector<double>&, const std::vector<double>&,
                         const std::vector<double>&)>
        dalpha;
    std::function<std::vector<double>(const std::vector<double>&)> map;
    std::function<bool(const std::vector<double>&)> in_domain;
    // Topology-aware difference a - b (shortest representative on circles).
    std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)> diff;

    // Circle with alpha = d theta and rotation by rho (theta in R/Z).
    static ContactSystem circle(double rho);
    // The standard chart with the strict base map of the model.
    static ContactSystem chart_base(const Model& model);
    // The standard chart with the perturbed family member Psi_r (chart rule).
    static ContactSystem chart_psi(const Model& model, double r);
    // Identity map over an arbitrary base system.
    static ContactSystem identity_of(ContactSystem base);
};

// Deformation Hamiltonian on the suspension, H(t, y) with first partials
// (analytic when supplied, central differences otherwise).
struct DeformationH {
    std::function<double(double, const std::vector<double>&)> value;
    std::function<double(double, const std::vector<double>&)> grad_t;               // optional
    std::function<std::vector<double>(double, const std::vector<double>&)> grad_y;  // optional

    double dt(double t, const std::vector<double>& y, double h = 1e-6) const;
    std::vector<double> dy(double t, const std::vector<double>& y, double h = 1e-6) const;
    // Sampled sup of |H|, |dH|, |d2H| (finite differences) -- a C2 estimate.
    double c2_norm(const std::vector<std::vector<double>>& samples) const;

    static DeformationH zero();
    static DeformationH scaled(const DeformationH& f, double tau);
};

// Mapping torus of the base system with framing theta = dt and nu induced by alpha.
class SuspensionSpace {
  public:
    explicit SuspensionSpace(ContactSystem base) : base_(std::move(base)) {}
    const ContactSystem& base() const { return base_; }

    // Residual of ker-alpha preservation of the base map over samples.
    double verify_base(const std::vector<std::vector<double>>& samples) const;
    // Periodicity of a function under the gluing (t, y) ~ (t - 1, map(y)).
    double gluing_residual(const DeformationH& H, const std::vector<std::vector<double>>& samples) const;

    // Characteristic field Z of nu_H = H dt + nu with framing dt:
    //   nu_H(Z) = 0, (i_Z d nu_H)|_{eta_H} = 0, dt(Z) = 1.
    // Returns (Z_t, Z_y...) and writes the system residual if asked.
    std::vector<double> characteristic_field(const DeformationH& H, double t,
                                             const std::vector<double>& y,
                                             double* residual = nullptr) const;

    // Return map on Y: integrate Z from {0} x Y to {1} x Y and glue.
    std::vector<double> return_map(const DeformationH& H, const std::vector<double>& y,
                                   double step = 1e-3) const;

    struct ScalingResult {
        double slope = 0;
        double r2 = 0;
        std::vector<double> taus, dists;
    };
    // Sampled C1 distance between return_map(tau H0) and the base map, as a
    // function of tau * |H0|_C2; linear regression slope and R^2.
    ScalingResult c1_distance_scaling(const DeformationH& H0, const std::vector<double>& taus,
                                      const std::vector<std::vector<double>>& samples,
                                      double step = 1e-3) const;

    // Ker-alpha preservation residual of the computed return map.
    double return_map_kernel_residual(const DeformationH& H,
                                      const std::vector<std::vector<double>>& samples,
                                      double step = 1e-3) const;

  private:
    ContactSystem base_;
};

struct BridgeResult {
    TVerdict transitive = TVerdict::Inconclusive;
    TVerdict mixing = TVerdict::Inconclusive;
    std::string note;
};

// Feed the suspension's return map to the transitivity detector over the given
// partition of the base domain (the suspension flow is transitive iff the
// return map is transitive on the sampled partition).
BridgeResult suspension_transitivity_bridge(const SuspensionSpace& susp, const DeformationH& H,
                                            const BoxPartition& part, int samples_per_cell,
                                            std::uint64_t seed, long horizon, double step = 1e-3);

}  // namespace cbl
