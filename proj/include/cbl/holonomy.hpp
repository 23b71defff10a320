#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbl/model.hpp"

namespace cbl {

// Sampled unstable-leaf disk through a base point: graph u -> (s, t) over
// [-radius, radius] around the base point's u-coordinate (n = 1).
struct LeafDisk {
    ChartPoint base;
    std::vector<double> u_nodes;
    std::vector<double> s_vals;
    std::vector<double> t_vals;
    int depth = 0;
    double convergence = 0;  // discrepancy between depth and depth+1

    ChartPoint point(int i) const { return {Vec{s_vals[i]}, t_vals[i], Vec{u_nodes[i]}}; }
    int size() const { return static_cast<int>(u_nodes.size()); }
    // Linear evaluation of the graph at a u-value inside the sampled range.
    ChartPoint at(double u) const;
};

struct HolonomyResult {
    ChartPoint image;
    double path_length = 0;
    int depth = 0;
};

class Holonomy {
  public:
    explicit Holonomy(const Model& model, int leaf_depth = 40) : model_(model), depth_(leaf_depth) {}

    // Unstable leaf through p: pull a flat u-disk back along the orbit, push it
    // forward depth steps; certified by depth vs depth+1 agreement.
    // Throws std::runtime_error if the backward orbit escapes.
    LeafDisk unstable_leaf(const ChartPoint& p, double radius, double r, int depth = -1) const;

    // Leaf graph value of leaf(p) at the single fiber coordinate u (cheaper
    // than a whole disk; exact in u).
    ChartPoint leaf_point(const ChartPoint& p, double u, double r, int depth = -1) const;

    // Holonomy along the unstable foliation from the source slab
    // D^n_s(2 mu^{-m_r}) x [L-2r, L]_t x 0_u to the target slab {u = 0} near a:
    // slide along the leaf to the return window, cross by the block step.
    HolonomyResult holonomy_map(const ChartPoint& x, double r) const;

    // min over pairs of log dist(Hol x, Hol y) / log dist(x, y), dist < 1.
    double estimate_holder(const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
                           double r) const;

  private:
    const Model& model_;
    int depth_;
};

}  // namespace cbl
