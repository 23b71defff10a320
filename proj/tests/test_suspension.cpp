#include "doctest.h"

#include <cmath>

#include "cbl/suspension.hpp"

using namespace cbl;

namespace {

Model& shared_model() {
    static Model m(ChartParams{}, ModelParams{});
    return m;
}

std::vector<double> pack(const ChartPoint& p) {
    return {p.s[0], p.t, p.u[0]};
}

}  // namespace

TEST_CASE("characteristic field of the undeformed identity suspension is d_t") {
    SuspensionSpace susp(ContactSystem::identity_of(ContactSystem::chart_base(shared_model())));
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        ChartPoint p = sample_chart_point(shared_model().chart(), rng, 0.8);
        double residual = 0;
        std::vector<double> z = susp.characteristic_field(DeformationH::zero(), 0.3, pack(p), &residual);
        CHECK(residual < 1e-12);
        CHECK(z[0] == doctest::Approx(1.0));
        for (size_t i = 1; i < z.size(); ++i) CHECK(std::fabs(z[i]) < 1e-12);
    }
}

TEST_CASE("characteristic field reproduces d_t + V_H for deformations by -H") {
    SuspensionSpace susp(ContactSystem::identity_of(ContactSystem::chart_base(shared_model())));
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1);
        DeformationH H{[a, b, c](double, const std::vector<double>& y) {
            return 0.3 * (a * std::sin(y[0]) + b * y[1] + c * y[2] * y[0]);
        }};
        DeformationH negH = DeformationH::scaled(H, -1.0);
        for (int k = 0; k < 20; ++k) {
            ChartPoint p = sample_chart_point(shared_model().chart(), rng, 0.8);
            double residual = 0;
            std::vector<double> z = susp.characteristic_field(negH, 0.2, pack(p), &residual);
            CHECK(residual < 1e-9);
            ScalarField Hf = ScalarField::with_fd_gradient(
                [&](const ChartPoint& q) { return H.value(0.2, pack(q)); }, 1, 1e-6);
            Tangent vh = contact_vector_field(Hf, p);
            CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(z[1] == doctest::Approx(vh.ds[0]).epsilon(1e-8));
            CHECK(z[2] == doctest::Approx(vh.dt).epsilon(1e-8));
            CHECK(z[3] == doctest::Approx(vh.du[0]).epsilon(1e-8));
        }
    }
}

TEST_CASE("characteristic field on the circle suspension passes residual checks") {
    SuspensionSpace susp(ContactSystem::circle(0.3));
    Rng rng(11);
    for (int k = 0; k < 40; ++k) {
        DeformationH H{[w = rng.uniform(0.5, 2.0)](double t, const std::vector<double>& y) {
            return 0.2 * std::sin(2 * M_PI * (y[0] + t)) * std::cos(2 * M_PI * w * t);
        }};
        double residual = 0;
        std::vector<double> z =
            susp.characteristic_field(H, rng.uniform(0, 1), {rng.uniform(0, 1)}, &residual);
        CHECK(residual < 1e-9);
        CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("return map of H = 0 is the base map") {
    Model& model = shared_model();
    SuspensionSpace susp(ContactSystem::chart_base(model));
    Rng rng(13);
    for (int k = 0; k < 20; ++k) {
        ChartPoint p = sample_chart_point(model.chart(), rng, 0.45);
        std::vector<double> img = susp.return_map(DeformationH::zero(), pack(p), 1e-2);
        ChartPoint want = model.phi_base(p);
        CHECK(img[0] == doctest::Approx(want.s[0]).epsilon(1e-10));
        CHECK(img[1] == doctest::Approx(want.t).epsilon(1e-10));
        CHECK(img[2] == doctest::Approx(want.u[0]).epsilon(1e-10));
    }
}

TEST_CASE("identity-suspension return map is the time-1 Hamiltonian flow") {
    // Deforming by -H gives Z = d_t + V_H, so the return map equals the time-1
    // flow of the contact vector field of H; cross-check by direct RK4 of V_H.
    Model& model = shared_model();
    SuspensionSpace susp(ContactSystem::identity_of(ContactSystem::chart_base(model)));
    DeformationH H{[](double, const std::vector<double>& y) {
        return 0.05 * std::sin(y[0]) + 0.03 * y[2];
    }};
    DeformationH negH = DeformationH::scaled(H, -1.0);
    Rng rng(17);
    for (int k = 0; k < 10; ++k) {
        ChartPoint p = sample_chart_point(model.chart(), rng, 0.4);
        std::vector<double> img = susp.return_map(negH, pack(p), 1e-3);
        // Direct integration of V_H.
        ChartPoint y = p;
        const int steps = 1000;
        ScalarField Hf = ScalarField::with_fd_gradient(
            [&](const ChartPoint& q) { return H.value(0.0, pack(q)); }, 1, 1e-6);
        for (int s = 0; s < steps; ++s) {
            double h = 1.0 / steps;
            auto f = [&](const ChartPoint& q) { return contact_vector_field(Hf, q); };
            Tangent k1 = f(y);
            ChartPoint y2{y.s + 0.5 * h * k1.ds, y.t + 0.5 * h * k1.dt, y.u + 0.5 * h * k1.du};
            Tangent k2 = f(y2);
            ChartPoint y3{y.s + 0.5 * h * k2.ds, y.t + 0.5 * h * k2.dt, y.u + 0.5 * h * k2.du};
            Tangent k3 = f(y3);
            ChartPoint y4{y.s + h * k3.ds, y.t + h * k3.dt, y.u + h * k3.du};
            Tangent k4 = f(y4);
            y.s += (h / 6) * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
            y.t += (h / 6) * (k1.dt + 2 * k2.dt + 2 * k3.dt + k4.dt);
            y.u += (h / 6) * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
        }
        CHECK(img[0] == doctest::Approx(y.s[0]).epsilon(1e-7));
        CHECK(img[1] == doctest::Approx(y.t).epsilon(1e-7));
        CHECK(img[2] == doctest::Approx(y.u[0]).epsilon(1e-7));
    }
}

TEST_CASE("perturbed circle rotation glues consistently") {
    SuspensionSpace susp(ContactSystem::circle(0.5));
    DeformationH H{[](double, const std::vector<double>& y) {
        return 0.05 * std::sin(2 * M_PI * y[0]);
    }};
    // Gluing residual of a (t-independent) Hamiltonian under (t,y) ~ (t-1, map y):
    // H must be map-invariant to glue exactly; measure the defect honestly.
    std::vector<std::vector<double>> samples;
    Rng rng(19);
    for (int k = 0; k < 50; ++k) samples.push_back({rng.uniform(0, 1)});
    double glue = susp.gluing_residual(H, samples);
    CHECK(glue < 0.11);  // |sin(x) - sin(x + pi)| bounded by 2*0.05
    // An invariant Hamiltonian glues to machine precision.
    DeformationH inv{[](double, const std::vector<double>& y) {
        return 0.05 * std::sin(4 * M_PI * y[0]);
    }};
    CHECK(susp.gluing_residual(inv, samples) < 1e-12);
    // Return map composed with the gluing stays consistent: two turns equal
    // the square of one turn for the invariant Hamiltonian.
    std::vector<double> one = susp.return_map(inv, {0.2}, 1e-3);
    std::vector<double> two = susp.return_map(inv, one, 1e-3);
    std::vector<double> direct = susp.return_map(inv, {0.2}, 5e-4);
    CHECK(std::fabs(susp.return_map(inv, direct, 5e-4)[0] - two[0]) < 1e-8);
}

TEST_CASE("return maps preserve ker alpha") {
    Model& model = shared_model();
    SuspensionSpace susp(ContactSystem::identity_of(ContactSystem::chart_base(model)));
    DeformationH H{[](double, const std::vector<double>& y) {
        return 0.1 * std::sin(y[0]) + 0.05 * y[1];
    }};
    Rng rng(23);
    std::vector<std::vector<double>> samples;
    for (int k = 0; k < 30; ++k) samples.push_back(pack(sample_chart_point(model.chart(), rng, 0.4)));
    CHECK(susp.return_map_kernel_residual(H, samples, 2e-3) < 1e-7);
}

TEST_CASE("c1 distance scales linearly in tau |H0|_C2") {
    SuspensionSpace susp(ContactSystem::circle(0.37));
    DeformationH H0{[](double, const std::vector<double>& y) {
        return 0.4 * std::sin(2 * M_PI * y[0]);
    }};
    Rng rng(29);
    std::vector<std::vector<double>> samples;
    for (int k = 0; k < 25; ++k) samples.push_back({rng.uniform(0, 1)});
    auto sc = susp.c1_distance_scaling(H0, {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}, samples, 2e-3);
    CHECK(sc.r2 >= 0.99);
    CHECK(sc.slope > 0);
    // tau = 0 gives distance 0; doubling H0 doubles d at small tau within 10%.
    auto d0 = susp.c1_distance_scaling(H0, {1e-3}, samples, 2e-3);
    auto d2 = susp.c1_distance_scaling(DeformationH::scaled(H0, 2.0), {1e-3}, samples, 2e-3);
    CHECK(d2.dists[0] == doctest::Approx(2 * d0.dists[0]).epsilon(0.1));
}

TEST_CASE("transitivity bridge: identity no, golden rotation yes/non-mixing") {
    BoxPartition part = BoxPartition::interval(0, 1, 64, true);
    SuspensionSpace ident(ContactSystem::identity_of(ContactSystem::circle(0.0)));
    BridgeResult b1 = suspension_transitivity_bridge(ident, DeformationH::zero(), part, 8, 1, 256, 1e-2);
    CHECK(b1.transitive == TVerdict::No);

    double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    SuspensionSpace rot(ContactSystem::circle(golden));
    BridgeResult b2 = suspension_transitivity_bridge(rot, DeformationH::zero(), part, 8, 1, 32, 1e-2);
    CHECK(b2.transitive == TVerdict::Yes);
    CHECK(b2.mixing == TVerdict::No);
}

TEST_CASE("chart-model bridge reports an honest verdict") {
    Model& model = shared_model();
    SuspensionSpace susp(ContactSystem::chart_psi(model, 0.05));
    BoxPartition part{{-1.0, 0.0, -0.1}, {1.0, 0.5, 0.1}, {6, 6, 6}, {false, false, false}};
    BridgeResult b = suspension_transitivity_bridge(susp, DeformationH::zero(), part, 3, 1, 48, 5e-2);
    // The hybrid chart model is an open system: most cells leak, so the graph
    // verdict cannot be a certified yes.
    CHECK(b.transitive != TVerdict::Yes);
}

TEST_CASE("base-map kernel check distinguishes the strict base from Psi_r") {
    Model& model = shared_model();
    Rng rng(31);
    std::vector<std::vector<double>> samples;
    for (int k = 0; k < 200; ++k) samples.push_back(pack(sample_chart_point(model.chart(), rng, 0.8)));
    SuspensionSpace strict(ContactSystem::chart_base(model));
    CHECK(strict.verify_base(samples) < 1e-8);
    SuspensionSpace perturbed(ContactSystem::chart_psi(model, 0.05));
    CHECK(perturbed.verify_base(samples) > 1e-4);  // the pinned flow is not contact
}
