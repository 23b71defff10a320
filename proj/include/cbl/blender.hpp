#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbl/cones.hpp"
#include "cbl/model.hpp"
#include "cbl/rng.hpp"

namespace cbl {

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct AxiomReport {
    std::string name;
    Verdict verdict = Verdict::Inconclusive;
    double margin = 0;
    std::string witness;
    long sample_count = 0;
    double r = 0;
};

// Blender box B_r(Q) = D^n_s(2) x D^1_t(t(Q_r)) x D^n_u(l mu^{-m_r}).
struct BlenderBox {
    double s_radius = 2.0;
    double t_radius = 0;
    double u_radius = 0;
    double r = 0;
    long m_r = 0;
    double l = 0;

    bool contains(const ChartPoint& p, double slack = 0.0) const {
        return p.s.norm() <= s_radius + slack && std::fabs(p.t) <= t_radius + slack &&
               p.u.norm() <= u_radius + slack;
    }
    // Distances to the distinguished faces (in the face-normal coordinate).
    double dist_left(const ChartPoint& p) const { return p.t + t_radius; }
    double dist_right(const ChartPoint& p) const { return t_radius - p.t; }
    double dist_stable(const ChartPoint& p) const { return s_radius - p.s.norm(); }
    double dist_unstable(const ChartPoint& p) const { return u_radius - p.u.norm(); }
};

// Vertical disk as a sampled Lipschitz graph u -> (s, t) over the u-fiber
// (n = 1 grids). The box fiber is ~ l mu^{-m_r} wide (1e-28 at r = 0.05), far
// below the resolution of the absolute (s, t) coordinates, so the graph is
// stored as a center point plus fiber-scale offsets; offsets evolve by the
// exact-in-u / first-order-in-(s,t) differential, with linearization error
// O(u_radius^2), dozens of orders below every stated tolerance.
// The Lipschitz certificate is computed on the Reeb-adapted graph
// u -> (s, tau), tau = t - <s, u> (leaves are Legendrian: dt = <s, du> along
// them, so the adapted graph is the one with slope < 2 eps).
struct VerticalDisk {
    double center_s = 0, center_t = 0;  // the u = 0 point of the graph
    std::vector<double> u_nodes;        // fiber coordinates, uniform over +-u_radius
    std::vector<double> off_s, off_t;   // graph offsets relative to the center
    double lipschitz = 0;               // certified constant of the adapted graph

    int size() const { return static_cast<int>(u_nodes.size()); }
    ChartPoint point(int i) const {
        return {Vec{center_s + off_s[i]}, center_t + off_t[i], Vec{u_nodes[i]}};
    }
    ChartPoint center() const { return {Vec{center_s}, center_t, Vec{0.0}}; }
    double tau(int i) const {
        return (center_t + off_t[i]) - (center_s + off_s[i]) * u_nodes[i];
    }
    void certify();           // recompute lipschitz from the samples
    bool right_of_W() const;  // all tau > 0 (right of W^s_loc(Q) in B)
};

class BlenderVerifier {
  public:
    BlenderVerifier(const Model& model, double cone_eps = 0.25);

    const Model& model() const { return model_; }
    double cone_eps() const { return cone_eps_; }
    double calibrated_l() const { return l_; }

    // P_r = (0, L-r, 0), Q_r = (0, r(1 - e^{-8Nr}), 0).
    std::pair<ChartPoint, ChartPoint> special_points(double r) const;
    double t_Qr(double r) const;

    // Unique integer with Psi^{N m_r}(Q_r) in the Reeb interval
    // [Psi^{5N}(P_r), Psi^{6N}(P_r)], computed on the t-axis flow.
    long compute_m_r(double r) const;
    // Same integer from the fixed-step RK4 oracle (for step-halving checks).
    long compute_m_r_rk4(double r, double step) const;

    BlenderBox build_box(double r) const;

    AxiomReport verify_axiom_a(double r, int cells = 32) const;
    AxiomReport verify_axiom_b(double r, int cells = 32) const;
    AxiomReport verify_axiom_c(double r) const;
    AxiomReport verify_axiom_d(double r) const;
    AxiomReport verify_axiom_e(double r, const std::vector<VerticalDisk>& disks) const;
    AxiomReport verify_axiom_f(double r, int grid = 65, int n_disks = 16, std::uint64_t seed = 7) const;

    // Axiom-a/b sample sets (image points inside the box) for reuse.
    struct IntersectionSamples {
        std::vector<ChartPoint> members;          // points of B ∩ Psi^{NK}(B)
        std::vector<ChartPoint> preimages;        // their Psi^{-NK} preimages in B
        std::vector<ChartPoint> component;        // flood-fill component of the anchor
        double max_s = 0, max_t = -1e300, min_t = 1e300, max_u = 0;
    };
    IntersectionSamples axiom_a_samples(double r, int cells) const;
    IntersectionSamples axiom_b_samples(double r, int cells) const;

    enum class Branch { Short, Long };
    struct DiskIteration {
        VerticalDisk disk;
        Branch branch;
        bool ok = false;
        std::string note;
    };
    // One application of the axiom-F dichotomy to a vertical disk right of W.
    DiskIteration iterate_disk(const VerticalDisk& d, double r, int grid = 65) const;

    struct DistinctiveReport {
        int disks = 0, iterations = 0;
        int survived = 0;
        double max_center_drift = 0;
        Verdict verdict = Verdict::Inconclusive;
        std::string witness;
    };
    DistinctiveReport distinctive_property_test(double r, int n_disks, int n_iter,
                                                std::uint64_t seed, int grid = 65) const;

    // Random vertical disk right of W inside the box (for axioms E/F and the
    // distinctive test).
    VerticalDisk random_disk(double r, Rng& rng, int grid = 65) const;
    // The unstable disk through the heteroclinic point a (Lemma-style D_Q seed).
    VerticalDisk disk_through_a(double r, int grid = 65) const;

  private:
    // l calibration: 3x the max u-leaf distance from R_chi-images of u-disks in
    // W to the heteroclinic point a.
    double calibrate_l() const;
    // t-axis flow of one N-block (N chart steps of time r each).
    double t_block(double r, double t, int blocks = 1) const;

    const Model& model_;
    double cone_eps_;
    double l_;
};

}  // namespace cbl
