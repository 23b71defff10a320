#include "cbl/cones.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbl {

Tangent ConeField::project(const Tangent& v) const {
    Tangent p = Tangent::zero(v.dim_n());
    if (base.s) p.ds = v.ds;
    if (base.t) p.dt = v.dt;
    if (base.u) p.du = v.du;
    return p;
}

double ConeField::off_ratio(const Tangent& v) const {
    Tangent p = project(v);
    Tangent off = v - p;
    double bn = p.norm(), on = off.norm();
    if (bn == 0.0) return on == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return on / bn;
}

bool ConeField::contains(const Tangent& v) const {
    Tangent p = project(v);
    Tangent off = v - p;
    return off.norm() <= width * p.norm() + 1e-15;
}

bool SumCone::contains(const Tangent& v) const {
    // Decompose v = v1 + v2 with v1 in span(first axes + shared off-axes) etc.
    // For the cones used here (complementary bases, shared off-part in ds) the
    // feasibility is a Minkowski-sum test: the off-component must split as
    // x + y with |x| <= w1 |base1(v)| and |y| <= w2 |base2(v)|; since the base
    // parts of v are forced (complementary), the least-squares split succeeds
    // iff |off| <= w1 |b1| + w2 |b2|.
    Tangent b1 = first.project(v);
    Tangent b2 = second.project(v);
    Tangent off = v - b1 - b2;
    double allowance = first.width * b1.norm() + second.width * b2.norm();
    return off.norm() <= allowance + 1e-15;
}

bool cone_contains(const ConeField& c, const Tangent& v) { return c.contains(v); }
bool cone_contains(const SumCone& c, const Tangent& v) { return c.contains(v); }

namespace {

// Unit directions within the selected axes (deterministic).
std::vector<Tangent> axis_directions(Axes ax, int n, int count) {
    std::vector<Tangent> dirs;
    int dims = (ax.s ? n : 0) + (ax.t ? 1 : 0) + (ax.u ? n : 0);
    auto assemble = [&](const std::vector<double>& w) {
        Tangent v = Tangent::zero(n);
        int k = 0;
        if (ax.s)
            for (int i = 0; i < n; ++i) v.ds[i] = w[k++];
        if (ax.t) v.dt = w[k++];
        if (ax.u)
            for (int i = 0; i < n; ++i) v.du[i] = w[k++];
        return v;
    };
    if (dims == 1) {
        dirs.push_back(assemble({1.0}));
        dirs.push_back(assemble({-1.0}));
        return dirs;
    }
    if (dims == 2) {
        for (int k = 0; k < count; ++k) {
            double a = 2 * M_PI * k / count;
            dirs.push_back(assemble({std::cos(a), std::sin(a)}));
        }
        return dirs;
    }
    // Fibonacci-sphere style for 3+ dimensions: golden-angle spirals on the
    // first three coordinates, remaining coordinates cycled through signs.
    double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
        std::vector<double> w(dims, 0.0);
        double z = 1.0 - 2.0 * (k + 0.5) / count;
        double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        double a = golden * k;
        w[0] = rad * std::cos(a);
        w[1] = rad * std::sin(a);
        w[2] = z;
        for (int j = 3; j < dims; ++j) w[j] = ((k >> (j - 3)) & 1) ? 0.3 : -0.3;
        double nn = 0;
        for (double x : w) nn += x * x;
        nn = std::sqrt(nn);
        for (double& x : w) x /= nn;
        dirs.push_back(assemble(w));
    }
    return dirs;
}

}  // namespace

std::vector<Tangent> cone_boundary_rays(const ConeField& c, int n, int rays_per_point) {
    Axes off_axes{!c.base.s, !c.base.t, !c.base.u};
    std::vector<Tangent> base_dirs = axis_directions(c.base, n, std::max(2, rays_per_point / 8));
    std::vector<Tangent> rays;
    if (c.width <= 0.0) return base_dirs;  // the bundle itself
    std::vector<Tangent> off_dirs = axis_directions(off_axes, n, std::max(2, rays_per_point / 4));
    for (const Tangent& b : base_dirs)
        for (const Tangent& o : off_dirs) {
            Tangent v = b + c.width * o;
            v *= 1.0 / v.norm();
            rays.push_back(v);
        }
    return rays;
}

ContractionResult check_contraction(const std::function<Mat(const ChartPoint&)>& jac,
                                    const ConeField& cone, const std::vector<ChartPoint>& points,
                                    int rays_per_point) {
    ContractionResult res;
    res.margin = std::numeric_limits<double>::infinity();
    int n = points.empty() ? 1 : points.front().dim_n();
    std::vector<Tangent> rays = cone_boundary_rays(cone, n, rays_per_point);
    for (const ChartPoint& p : points) {
        Mat j = jac(p);
        for (const Tangent& v : rays) {
            Tangent w = j.apply(v);
            double ratio = cone.off_ratio(w);
            double margin = cone.width - ratio;
            if (margin < res.margin) {
                res.margin = margin;
                res.witness_point = p;
                res.witness_ray = v;
            }
        }
    }
    res.ok = res.margin > 0;
    return res;
}

DilationEstimate dilation_constant(const std::function<Mat(const ChartPoint&)>& jac,
                                   const ConeField& cone, const std::vector<ChartPoint>& points,
                                   int rays_per_point) {
    DilationEstimate est;
    est.lambda_hat = std::numeric_limits<double>::infinity();
    int n = points.empty() ? 1 : points.front().dim_n();
    std::vector<Tangent> rays = cone_boundary_rays(cone, n, rays_per_point);
    // Include the base axes: for diagonal maps the infimum sits either on the
    // boundary or on the core bundle.
    for (const Tangent& b : axis_directions(cone.base, n, std::max(2, rays_per_point / 8)))
        rays.push_back(b);
    for (const ChartPoint& p : points) {
        Mat j = jac(p);
        for (const Tangent& v : rays) {
            Tangent w = j.apply(v);
            double g = w.norm() / v.norm();
            ++est.sample_count;
            if (g < est.lambda_hat) {
                est.lambda_hat = g;
                est.witness_point = p;
                est.witness_vector = v;
            }
        }
    }
    return est;
}

bool check_stretching_criterion(double mu, double eps, double nu, double eta, double delta) {
    if (!(mu > 0 && eps > 0 && nu > 0 && eta >= 0 && delta > 0)) return false;
    if (!(mu * mu > 1 + eps * eps)) return false;
    if (!(nu > 1 && 1 > eta)) return false;
    double lo = eta / (1 - 1 / mu);
    if (!(lo < delta)) return false;
    double hi2 = nu * nu - 1;
    return delta < std::sqrt(hi2);
}

CenterDrift estimate_center_drift(const Model& model, double r, const ChartPoint& start, long units) {
    Mat chain = model.jacobian_chain(r, start, units);
    Tangent pushed = chain.apply(Tangent::d_t(start.dim_n()));
    CenterDrift d;
    d.nu = pushed.dt;
    d.du_residual = pushed.du.norm();
    d.eta = (d.nu != 0.0) ? pushed.ds.norm() / std::fabs(d.nu) : std::numeric_limits<double>::infinity();
    if (d.du_residual > 1e-9)
        throw std::runtime_error("estimate_center_drift: du-component of the pushed Reeb vector "
                                 "exceeds 1e-9 (model violation)");
    return d;
}

}  // namespace cbl
