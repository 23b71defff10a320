#include "doctest.h"

#include <cmath>

#include "cbl/blender.hpp"

using namespace cbl;

namespace {

const double kL = 0.5;

Model& shared_model() {
    static Model m(ChartParams{}, ModelParams{});
    return m;
}

BlenderVerifier& shared_verifier() {
    static BlenderVerifier bv(shared_model());
    return bv;
}

}  // namespace

TEST_CASE("special points P_r and Q_r") {
    BlenderVerifier& bv = shared_verifier();
    auto [Pr, Qr] = bv.special_points(0.1);
    CHECK(Pr.t == doctest::Approx(kL - 0.1));
    CHECK(Qr.t == doctest::Approx(0.1 * (1 - std::exp(-0.8))).epsilon(1e-14));
    // r -> 0: both converge to P and Q.
    auto [Pr0, Qr0] = bv.special_points(1e-9);
    CHECK(Pr0.t == doctest::Approx(kL).epsilon(1e-8));
    CHECK(std::fabs(Qr0.t) < 1e-14);
}

TEST_CASE("m_r fixtures, growth bound, monotonicity, and the RK4 oracle") {
    BlenderVerifier& bv = shared_verifier();
    // Frozen integers from the step-halving RK4 oracle (defaults L = 1/2, N = 1).
    struct Fixture {
        double r;
        long m_r;
    };
    const Fixture fixtures[] = {{0.1, 30}, {0.05, 93}, {0.02, 356}, {0.01, 911}};
    long prev = 0;
    for (const auto& fx : fixtures) {
        long mr = bv.compute_m_r(fx.r);
        CHECK(mr == fx.m_r);
        CHECK(mr == bv.compute_m_r_rk4(fx.r, 1e-5));
        CHECK(mr == bv.compute_m_r_rk4(fx.r, 5e-6));
        CHECK(mr >= 0.5 * (-std::log(fx.r)) / fx.r);
        CHECK(mr > prev);
        prev = mr;
    }
}

TEST_CASE("m_r membership in the defining Reeb interval") {
    BlenderVerifier& bv = shared_verifier();
    const Model& model = shared_model();
    for (double r : {0.1, 0.05}) {
        long mr = bv.compute_m_r(r);
        double t = bv.t_Qr(r);
        t = model.flow().psi_flow(mr * r, t);  // N = 1
        double lo = kL - r * std::exp(-5 * r), hi = kL - r * std::exp(-6 * r);
        CHECK(t >= lo);
        CHECK(t <= hi);
    }
}

TEST_CASE("blender box geometry") {
    BlenderVerifier& bv = shared_verifier();
    for (double r : {0.1, 0.05}) {
        BlenderBox box = bv.build_box(r);
        CHECK(box.s_radius == 2.0);
        CHECK(box.t_radius == doctest::Approx(bv.t_Qr(r)));
        CHECK(box.u_radius == doctest::Approx(bv.calibrated_l() * std::pow(2.0, -double(box.m_r))));
        CHECK(box.u_radius <= 0.2);
        CHECK(box.contains(shared_model().point_Q()));
        CHECK(box.contains(shared_model().point_a()));
    }
}

TEST_CASE("axiom A: intersection component avoids the listed faces") {
    BlenderVerifier& bv = shared_verifier();
    AxiomReport rep = bv.verify_axiom_a(0.05, 24);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.margin > 0);
    // Sharper interior bound: |s(z)| < 2/mu over the intersection.
    auto samples = bv.axiom_a_samples(0.05, 24);
    double smax = 0;
    for (const auto& z : samples.members) smax = std::max(smax, z.s.norm());
    CHECK(smax < 2.0 / 2.0);
}

TEST_CASE("axiom B: the a-component avoids the right, stable and u faces") {
    BlenderVerifier& bv = shared_verifier();
    AxiomReport rep = bv.verify_axiom_b(0.05, 24);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.margin > 0);
    auto samples = bv.axiom_b_samples(0.05, 24);
    CHECK(!samples.component.empty());
    CHECK(samples.max_s < 1e-6);  // |s - 1| tiny on the a-component
}

TEST_CASE("axiom C: cone contraction and bundle dilation over the box") {
    BlenderVerifier& bv = shared_verifier();
    AxiomReport rep = bv.verify_axiom_c(0.05);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.margin > 0);
}

TEST_CASE("axiom D: summed cone is contracted and uniformly dilated") {
    BlenderVerifier& bv = shared_verifier();
    AxiomReport rep = bv.verify_axiom_d(0.05);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.margin > 0);
}

TEST_CASE("axiom E: vertical disks right of W clear the left face by r^3") {
    BlenderVerifier& bv = shared_verifier();
    double r = 0.05;
    Rng rng(5);
    std::vector<VerticalDisk> disks;
    for (int k = 0; k < 16; ++k) disks.push_back(bv.random_disk(r, rng));
    AxiomReport rep = bv.verify_axiom_e(r, disks);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.margin > 0);

    // A disk through W (tau center 0) is rejected by precondition.
    VerticalDisk flat = disks.front();
    flat.center_t = 0.0;
    for (int i = 0; i < flat.size(); ++i)
        flat.off_t[i] = (flat.center_s + flat.off_s[i]) * flat.u_nodes[i];
    flat.certify();
    std::vector<VerticalDisk> bad{flat};
    CHECK_THROWS_AS(bv.verify_axiom_e(r, bad), std::invalid_argument);
}

TEST_CASE("iterate_disk: branch dichotomy and clearances") {
    BlenderVerifier& bv = shared_verifier();
    const Model& model = shared_model();
    double r = 0.05;
    BlenderBox box = bv.build_box(r);
    double threshold = std::exp(-3 * r) * box.t_radius;

    // Short branch: t-center grows by exactly e^{Nr}.
    Rng rng(7);
    VerticalDisk d;
    for (int k = 0; k < 200; ++k) {
        d = bv.random_disk(r, rng);
        if (d.center().t < threshold) break;
    }
    REQUIRE(d.center().t < threshold);
    auto it = bv.iterate_disk(d, r);
    CHECK(it.ok);
    CHECK(it.branch == BlenderVerifier::Branch::Short);
    CHECK(it.disk.center().t == doctest::Approx(std::exp(r) * d.center().t).epsilon(1e-9));
    CHECK(it.disk.lipschitz <= 0.5);

    // Long branch: center lands right of W with distance > r^3 and the
    // heteroclinic leaf disk takes it at the first iterate.
    VerticalDisk dq = bv.disk_through_a(r);
    CHECK(dq.right_of_W());
    CHECK(dq.center().t >= threshold);
    auto itl = bv.iterate_disk(dq, r);
    CHECK(itl.ok);
    CHECK(itl.branch == BlenderVerifier::Branch::Long);
    double dw = 1e300;
    for (int i = 0; i < itl.disk.size(); ++i) {
        ChartPoint p = itl.disk.point(i);
        dw = std::min(dw, std::sqrt(p.t * p.t + p.u.norm2()));
    }
    CHECK(dw > r * r * r);
    CHECK(itl.disk.center().t > 0.5 * r * r);  // the landing sits above r^2/2
    (void)model;
}

TEST_CASE("axiom F over random disks") {
    BlenderVerifier& bv = shared_verifier();
    AxiomReport rep = bv.verify_axiom_f(0.05, 65, 8, 99);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.margin > 0);
}

TEST_CASE("distinctive property: seeded disks survive iterations at both grids") {
    BlenderVerifier& bv = shared_verifier();
    auto rep = bv.distinctive_property_test(0.05, 10, 8, 1234, 65);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.survived == rep.disks);
    auto rep2 = bv.distinctive_property_test(0.05, 10, 8, 1234, 129);
    CHECK(rep2.verdict == rep.verdict);
    CHECK(rep2.survived == rep.survived);
}

TEST_CASE("vertical disk certificates use the Reeb-adapted graph") {
    BlenderVerifier& bv = shared_verifier();
    double r = 0.05;
    VerticalDisk dq = bv.disk_through_a(r);
    // In raw (s, t)-coordinates the heteroclinic leaf has slope ~ |s| = 1; the
    // adapted tau-graph certificate stays below 2 eps = 1/2.
    double raw_slope = 0;
    for (int i = 0; i + 1 < dq.size(); ++i) {
        double du = dq.u_nodes[i + 1] - dq.u_nodes[i];
        raw_slope = std::max(raw_slope, std::fabs((dq.off_t[i + 1] - dq.off_t[i]) / du));
    }
    CHECK(raw_slope > 0.9);
    CHECK(dq.lipschitz <= 0.5);
}

TEST_CASE("m_r is insensitive to the middle-range blend choice") {
    // Only the middle-band transit time depends on the blend; the quartic
    // alternative shifts it by a fraction of a block, so the return integers
    // stay within a few units of the quadratic ones.
    ChartParams cp;
    Model quad_model(cp, ModelParams{});
    BlenderVerifier quad(quad_model);
    Model quart_model(cp, ModelParams{}, BlendKind::Quartic);
    BlenderVerifier quart(quart_model);
    for (double r : {0.1, 0.05}) {
        long a = quad.compute_m_r(r);
        long b = quart.compute_m_r(r);
        CHECK(std::labs(a - b) <= 3);
    }
}

TEST_CASE("build_box reports fiber underflow for very small r") {
    BlenderVerifier& bv = shared_verifier();
    // m_r grows ~ -log(r)/r, so mu^{-m_r} underflows well before r = 1e-3.
    CHECK_THROWS_AS(bv.build_box(1e-3), std::runtime_error);
}
