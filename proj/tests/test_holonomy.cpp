#include "doctest.h"

#include <cmath>

#include "cbl/holonomy.hpp"

using namespace cbl;

namespace {

const double kL = 0.5;

Model& shared_model() {
    static Model m(ChartParams{}, ModelParams{});
    return m;
}

}  // namespace

TEST_CASE("leaves through {s = 0} are the flat u-planes") {
    Holonomy hol(shared_model());
    for (double t : {0.1 * kL, 0.55 * kL, 0.9 * kL}) {
        ChartPoint p{Vec{0.0}, t, Vec{0.0}};
        LeafDisk leaf = hol.unstable_leaf(p, 0.01, 0.05, 25);
        for (int i = 0; i < leaf.size(); ++i) {
            CHECK(std::fabs(leaf.s_vals[i]) < 1e-14);
            CHECK(leaf.t_vals[i] == doctest::Approx(t).epsilon(1e-13));
        }
        CHECK(leaf.convergence < 1e-12);
    }
}

TEST_CASE("leaf depth convergence is controlled by the contraction rate") {
    Holonomy hol(shared_model());
    ChartPoint p{Vec{1e-8}, 0.6 * kL, Vec{0.0}};
    double prev = 1e300;
    for (int depth : {8, 12, 16}) {
        LeafDisk leaf = hol.unstable_leaf(p, 0.01, 0.05, depth);
        CHECK(leaf.convergence <= std::pow(2.0, -depth) * 2.0);
        CHECK(leaf.convergence <= prev + 1e-18);
        prev = leaf.convergence;
    }
}

TEST_CASE("leaf evaluation at a fiber coordinate is exact in u") {
    Holonomy hol(shared_model());
    ChartPoint p{Vec{0.0}, 0.8 * kL, Vec{0.0}};
    double target = shared_model().params().x_u[0];
    ChartPoint on_leaf = hol.leaf_point(p, target, 0.05, 30);
    CHECK(on_leaf.u[0] == target);  // bit-exact: the u-dynamics is affine
    CHECK(std::fabs(on_leaf.s[0]) < 1e-14);
    CHECK(on_leaf.t == doctest::Approx(p.t).epsilon(1e-13));
}

TEST_CASE("holonomy identity Hol(0, L - delta, 0) = (1, r - delta, 0)") {
    Model& model = shared_model();
    Holonomy hol(model);
    for (double r : {0.02, 0.05}) {
        for (double frac : {0.0, 0.5, 1.0}) {
            double delta = frac * 2 * r;
            ChartPoint x{Vec{0.0}, kL - delta, Vec{0.0}};
            HolonomyResult res = hol.holonomy_map(x, r);
            CHECK(dist(res.image, model.point_b(r - delta)) < 1e-4);
            CHECK(std::fabs(res.image.u[0]) < 1e-12);
            CHECK(res.path_length > 0);
        }
    }
}

TEST_CASE("holonomy s-compression matches the return-map scale") {
    // |s(Hol x)| <= lambda^{k0} e^{Nmr} |s(leaf at window)| -- tiny relative to
    // the source s, matching the mu^{-kappa m_r} structure.
    Model& model = shared_model();
    Holonomy hol(model);
    double r = 0.05;
    double s0 = 4e-28;  // the holonomy source slab has s-radius 2 mu^{-m_r}
    ChartPoint x{Vec{s0}, kL - r, Vec{0.0}};
    HolonomyResult res = hol.holonomy_map(x, r);
    CHECK(std::fabs(res.image.s[0] - 1.0) < s0);
    // t-coordinate law |t(Hol x) - (r + t(x) - L)| small.
    CHECK(res.image.t == doctest::Approx(r + x.t - kL).epsilon(1e-6));
}

TEST_CASE("holonomy domain preconditions") {
    Holonomy hol(shared_model());
    ChartPoint bad{Vec{0.0}, 0.1, Vec{0.0}};  // t far below L - 2r
    CHECK_THROWS_AS(hol.holonomy_map(bad, 0.05), std::domain_error);
    ChartPoint off{Vec{0.0}, kL, Vec{0.01}};  // off the transversal
    CHECK_THROWS_AS(hol.holonomy_map(off, 0.05), std::domain_error);
}

TEST_CASE("holder exponent estimate lies in (0, 1]") {
    Model& model = shared_model();
    Holonomy hol(model);
    Rng rng(3);
    double r = 0.05;
    std::vector<std::pair<ChartPoint, ChartPoint>> pairs;
    for (int k = 0; k < 300; ++k) {
        double t1 = kL - rng.uniform(0.0, 2 * r), t2 = kL - rng.uniform(0.0, 2 * r);
        pairs.emplace_back(ChartPoint{Vec{0.0}, t1, Vec{0.0}}, ChartPoint{Vec{0.0}, t2, Vec{0.0}});
    }
    double kappa = hol.estimate_holder(pairs, r);
    CHECK(kappa > 0.0);
    CHECK(kappa <= 1.0 + 1e-9);
    CHECK(kappa == doctest::Approx(1.0).epsilon(1e-3));  // flat-region pairs

    // Stability: halving pair separations does not decrease kappa materially.
    std::vector<std::pair<ChartPoint, ChartPoint>> close_pairs;
    for (auto& [a, b] : pairs) {
        ChartPoint mid{Vec{0.0}, 0.5 * (a.t + b.t), Vec{0.0}};
        ChartPoint half{Vec{0.0}, mid.t + 0.5 * (b.t - mid.t), Vec{0.0}};
        close_pairs.emplace_back(mid, half);
    }
    double kappa2 = hol.estimate_holder(close_pairs, r);
    CHECK(kappa2 >= kappa - 1e-3);
}

TEST_CASE("leaf equivariance under the chart step") {
    Model& model = shared_model();
    Holonomy hol(model);
    double r = 0.05;
    ChartPoint p{Vec{1e-10}, 0.3 * kL, Vec{0.0}};
    LeafDisk leaf = hol.unstable_leaf(p, 0.004, r, 25);
    ChartPoint q = model.chart_step(r, p);
    LeafDisk leaf_q = hol.unstable_leaf(q, 0.009, r, 25);
    for (int i = 0; i < leaf.size(); i += 4) {
        ChartPoint img = model.chart_step(r, leaf.point(i));
        ChartPoint expect = leaf_q.at(img.u[0]);
        CHECK(std::fabs(expect.s[0] - img.s[0]) + std::fabs(expect.t - img.t) < 1e-8);
    }
}

TEST_CASE("holonomy composition through different pullback depths") {
    Model& model = shared_model();
    Holonomy shallow(model, 35), deep(model, 55);
    double r = 0.05;
    for (double frac : {0.2, 0.8}) {
        ChartPoint x{Vec{0.0}, kL - frac * 2 * r, Vec{0.0}};
        CHECK(dist(shallow.holonomy_map(x, r).image, deep.holonomy_map(x, r).image) < 1e-6);
    }
}
