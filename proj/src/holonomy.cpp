#include "cbl/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cbl {

ChartPoint LeafDisk::at(double u) const {
    if (u <= u_nodes.front()) return point(0);
    if (u >= u_nodes.back()) return point(size() - 1);
    size_t hi = std::upper_bound(u_nodes.begin(), u_nodes.end(), u) - u_nodes.begin();
    size_t lo = hi - 1;
    double w = (u - u_nodes[lo]) / (u_nodes[hi] - u_nodes[lo]);
    return {Vec{(1 - w) * s_vals[lo] + w * s_vals[hi]},
            (1 - w) * t_vals[lo] + w * t_vals[hi], Vec{u}};
}

namespace {

struct Pullback {
    ChartPoint endpoint;
    double offset_scale = 1.0;  // u-offset contraction along the backward orbit
    long units = 0;
};

// Backward orbit of `units` time units with the cumulative u-offset scale
// (chart step: lambda; block step: lambda^{k0}).
Pullback pull_back(const Model& model, const ChartPoint& p, double r, long units) {
    Pullback pb;
    pb.endpoint = p;
    const ModelParams& mp = model.params();
    while (pb.units < units) {
        auto s = model.psi_step_back(r, pb.endpoint);
        if (!s) throw std::runtime_error("unstable_leaf: backward orbit escaped the chart; leaf unavailable at this depth");
        pb.endpoint = s->point;
        pb.units += s->units;
        pb.offset_scale *= (s->tag == RegionTag::ReturnWindow) ? std::pow(mp.lambda, mp.k0)
                                                               : std::pow(mp.lambda, s->units);
    }
    return pb;
}

// Push the flat-disk point at fiber offset back to the leaf level of p.
std::optional<ChartPoint> push_forward(const Model& model, const Pullback& pb, double r,
                                       double fiber_offset) {
    ChartPoint q = pb.endpoint;
    q.u[0] += pb.offset_scale * fiber_offset;
    ChartPoint cur = q;
    long done = 0;
    while (done < pb.units) {
        Model::StepResult s = model.psi_step(r, cur);
        if (s.tag == RegionTag::Outside) return std::nullopt;
        cur = s.point;
        done += s.units;
    }
    if (done != pb.units) return std::nullopt;
    return cur;
}

}  // namespace

ChartPoint Holonomy::leaf_point(const ChartPoint& p, double u, double r, int depth) const {
    if (model_.chart().n != 1) throw std::runtime_error("holonomy module: n = 1 only");
    if (depth < 0) depth = depth_;
    Pullback pb = pull_back(model_, p, r, depth);
    auto img = push_forward(model_, pb, r, u - p.u[0]);
    if (!img) throw std::runtime_error("leaf_point: forward push escaped the chart");
    return *img;
}

LeafDisk Holonomy::unstable_leaf(const ChartPoint& p, double radius, double r, int depth) const {
    if (model_.chart().n != 1) throw std::runtime_error("holonomy module: n = 1 only");
    if (depth < 0) depth = depth_;
    const int kGrid = 65;
    Pullback pb = pull_back(model_, p, r, depth);
    Pullback pb1 = pull_back(model_, p, r, depth + 1);
    LeafDisk disk;
    disk.base = p;
    disk.depth = depth;
    disk.convergence = 0;
    for (int i = 0; i < kGrid; ++i) {
        double offset = -radius + 2 * radius * i / (kGrid - 1);
        auto a = push_forward(model_, pb, r, offset);
        auto b = push_forward(model_, pb1, r, offset);
        if (!a || !b) continue;  // leaf does not extend here within the model
        disk.u_nodes.push_back(a->u[0]);
        disk.s_vals.push_back(a->s[0]);
        disk.t_vals.push_back(a->t);
        disk.convergence = std::max(disk.convergence, dist(*a, *b));
    }
    if (disk.u_nodes.empty()) throw std::runtime_error("unstable_leaf: empty leaf disk");
    return disk;
}

HolonomyResult Holonomy::holonomy_map(const ChartPoint& x, double r) const {
    if (model_.chart().n != 1) throw std::runtime_error("holonomy module: n = 1 only");
    const ChartParams& cp = model_.chart();
    const ModelParams& mp = model_.params();
    if (x.t < cp.L - 2 * r - 1e-9 || x.t > cp.L + 1e-9)
        throw std::domain_error("holonomy_map: source t must lie in [L - 2r, L]");
    if (x.u.norm() > 1e-9)
        throw std::domain_error("holonomy_map: source must lie on the {u = 0} transversal");

    // Slide down Nm units so the leaf's window crossing is the block step.
    ChartPoint q = x;
    long nm = static_cast<long>(mp.N) * mp.m;
    for (long k = 0; k < nm; ++k) {
        try {
            q = model_.chart_step_back(r, q);
        } catch (const FlowRangeError&) {
            throw std::runtime_error("holonomy_map: backward slide escaped the chart");
        }
    }
    ChartPoint w = leaf_point(q, mp.x_u[0], r, depth_);
    if (!model_.in_window(w))
        throw std::runtime_error("holonomy_map: leaf does not reach the return window "
                                 "(enlarge model.w_t or reduce delta)");
    ChartPoint y = model_.macro_step(r, w);
    HolonomyResult res;
    res.image = y;
    res.depth = depth_;
    res.path_length = std::fabs(mp.x_u[0]) + dist(y, model_.point_a());
    return res;
}

double Holonomy::estimate_holder(const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
                                 double r) const {
    double kappa = std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : pairs) {
        double d = dist(x, y);
        if (d < 1e-15 || d >= 1.0) continue;  // degenerate or out of the Hoelder window
        ChartPoint hx = holonomy_map(x, r).image;
        ChartPoint hy = holonomy_map(y, r).image;
        double dh = dist(hx, hy);
        if (dh < 1e-300) continue;
        kappa = std::min(kappa, std::log(dh) / std::log(d));
    }
    if (!std::isfinite(kappa)) throw std::runtime_error("estimate_holder: no usable pairs");
    return kappa;
}

}  // namespace cbl
