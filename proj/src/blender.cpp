#include "cbl/blender.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cbl {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

void VerticalDisk::certify() {
    lipschitz = 0;
    for (int i = 0; i + 1 < size(); ++i) {
        double du = u_nodes[i + 1] - u_nodes[i];
        if (du == 0) continue;
        double ds = (off_s[i + 1] - off_s[i]) / du;
        // tau offsets at fiber precision: off_t - center_s u - off_s u.
        double tau_hi = off_t[i + 1] - center_s * u_nodes[i + 1] - off_s[i + 1] * u_nodes[i + 1];
        double tau_lo = off_t[i] - center_s * u_nodes[i] - off_s[i] * u_nodes[i];
        double dtau = (tau_hi - tau_lo) / du;
        lipschitz = std::max(lipschitz, std::sqrt(ds * ds + dtau * dtau));
    }
}

bool VerticalDisk::right_of_W() const {
    for (int i = 0; i < size(); ++i)
        if (tau(i) <= 0) return false;
    return true;
}

BlenderVerifier::BlenderVerifier(const Model& model, double cone_eps)
    : model_(model), cone_eps_(cone_eps), l_(calibrate_l()) {}

double BlenderVerifier::calibrate_l() const {
    // Max u-leaf distance from R_chi-images of u-disks in W to a, measured as
    // polyline length along the image curve; l = 3x the maximum.
    const ModelParams& mp = model_.params();
    int n = model_.chart().n;
    if (n != 1) {
        // Image of the fiber is {(1_s + 0, <1,u''>, u'')}; the leaf distance is
        // |u''| sqrt(2) along the first coordinate and |u''| elsewhere.
        double umax = std::pow(mp.lambda, -mp.k0) * mp.w_u * std::sqrt(static_cast<double>(n));
        return 3.0 * umax * std::sqrt(2.0);
    }
    const int kGrid = 129;
    ChartPoint a = model_.point_a();
    double best = 0;
    for (int i = 0; i < kGrid; ++i) {
        double ups = -mp.w_u + 2 * mp.w_u * i / (kGrid - 1);
        ChartPoint w = model_.window_center();
        w.u[0] += ups;
        ChartPoint img = model_.return_chi_raw(w);
        // The image curve is affine in ups, so chord length equals arc length.
        best = std::max(best, dist(img, a));
    }
    return 3.0 * best;
}

std::pair<ChartPoint, ChartPoint> BlenderVerifier::special_points(double r) const {
    int n = model_.chart().n;
    double L = model_.chart().L;
    ChartPoint Pr{Vec(n), L - r, Vec(n)};
    ChartPoint Qr{Vec(n), t_Qr(r), Vec(n)};
    return {Pr, Qr};
}

double BlenderVerifier::t_Qr(double r) const {
    return r * (1.0 - std::exp(-8.0 * model_.params().N * r));
}

double BlenderVerifier::t_block(double r, double t, int blocks) const {
    return model_.flow().psi_flow(model_.params().N * r * blocks, t);
}

long BlenderVerifier::compute_m_r(double r) const {
    const int N = model_.params().N;
    double L = model_.chart().L;
    double lo = L - r * std::exp(-5.0 * N * r);  // t(Psi^{5N} P_r)
    double hi = L - r * std::exp(-6.0 * N * r);  // t(Psi^{6N} P_r)
    double t = t_Qr(r);
    long cap = static_cast<long>(60.0 * std::max(1.0, -std::log(r)) / (N * r)) + 100;
    for (long j = 1; j <= cap; ++j) {
        t = t_block(r, t);
        if (t >= lo) {
            if (t <= hi + 1e-12) return j;
            throw std::runtime_error("compute_m_r: t-axis orbit skipped the Reeb interval (inconclusive)");
        }
    }
    throw std::runtime_error("compute_m_r: no convergence within the iteration cap (inconclusive)");
}

long BlenderVerifier::compute_m_r_rk4(double r, double step) const {
    const int N = model_.params().N;
    double L = model_.chart().L;
    double lo = L - r * std::exp(-5.0 * N * r);
    double hi = L - r * std::exp(-6.0 * N * r);
    double t = t_Qr(r);
    long cap = static_cast<long>(60.0 * std::max(1.0, -std::log(r)) / (N * r)) + 100;
    const ProfileH& prof = model_.flow().profile;
    double delta = model_.chart().delta;
    for (long j = 1; j <= cap; ++j) {
        t = flow_rk4(prof, N * r, t, delta, step).psi;
        if (t >= lo) {
            if (t <= hi + 1e-12) return j;
            throw std::runtime_error("compute_m_r_rk4: orbit skipped the Reeb interval");
        }
    }
    throw std::runtime_error("compute_m_r_rk4: no convergence within the iteration cap");
}

BlenderBox BlenderVerifier::build_box(double r) const {
    BlenderBox box;
    box.r = r;
    box.m_r = compute_m_r(r);
    box.l = l_;
    box.s_radius = 2.0;
    box.t_radius = t_Qr(r);
    box.u_radius = l_ * std::pow(model_.params().mu, -static_cast<double>(box.m_r));
    if (box.u_radius > model_.chart().eps_u)
        throw std::runtime_error("build_box: u-radius exceeds eps_u; shrink r_max");
    if (box.u_radius == 0.0)
        throw std::runtime_error("build_box: u-radius underflowed; r too small for double precision");
    return box;
}

namespace {

struct GridSpec {
    int cells;           // per-axis cell count
    double s_rad, t_rad, u_rad;

    ChartPoint center(int n, int is, int it, int iu) const {
        auto coord = [&](int i, double rad) { return -rad + (2 * rad) * (i + 0.5) / cells; };
        ChartPoint p{Vec(n), coord(it, t_rad), Vec(n)};
        p.s[0] = coord(is, s_rad);
        p.u[0] = coord(iu, u_rad);
        return p;
    }
    int index(int is, int it, int iu) const { return (is * cells + it) * cells + iu; }
};

// Flood fill over a boolean cell grid (6-connectivity).
std::vector<char> flood_component(const GridSpec& g, const std::vector<char>& member, int start) {
    std::vector<char> comp(member.size(), 0);
    if (start < 0 || !member[start]) return comp;
    std::deque<int> queue{start};
    comp[start] = 1;
    auto decode = [&](int idx, int& is, int& it, int& iu) {
        iu = idx % g.cells;
        it = (idx / g.cells) % g.cells;
        is = idx / (g.cells * g.cells);
    };
    while (!queue.empty()) {
        int idx = queue.front();
        queue.pop_front();
        int is, it, iu;
        decode(idx, is, it, iu);
        const int d[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
        for (auto& dd : d) {
            int js = is + dd[0], jt = it + dd[1], ju = iu + dd[2];
            if (js < 0 || jt < 0 || ju < 0 || js >= g.cells || jt >= g.cells || ju >= g.cells) continue;
            int jdx = g.index(js, jt, ju);
            if (member[jdx] && !comp[jdx]) {
                comp[jdx] = 1;
                queue.push_back(jdx);
            }
        }
    }
    return comp;
}

}  // namespace

BlenderVerifier::IntersectionSamples BlenderVerifier::axiom_a_samples(double r, int cells) const {
    if (model_.chart().n != 1)
        throw std::runtime_error("axiom grids are implemented for n = 1");
    BlenderBox box = build_box(r);
    const int N = model_.params().N;
    GridSpec g{cells, box.s_radius, box.t_radius, box.u_radius};

    IntersectionSamples out;
    std::vector<char> member(cells * cells * cells, 0);
    std::vector<ChartPoint> pre(cells * cells * cells);
    for (int is = 0; is < cells; ++is)
        for (int it = 0; it < cells; ++it)
            for (int iu = 0; iu < cells; ++iu) {
                ChartPoint z = g.center(1, is, it, iu);
                ChartPoint back = z;
                bool ok = true;
                try {
                    for (int k = 0; k < N; ++k) back = model_.chart_step_back(r, back);
                } catch (const FlowRangeError&) {
                    ok = false;
                }
                if (ok && in_chart(model_.chart(), back) && box.contains(back)) {
                    int idx = g.index(is, it, iu);
                    member[idx] = 1;
                    pre[idx] = back;
                }
            }
    // Component containing Q = origin.
    int mid = cells / 2;
    int start = g.index(mid, mid, mid);
    if (!member[start]) start = -1;
    std::vector<char> comp = flood_component(g, member, start);
    for (int is = 0; is < cells; ++is)
        for (int it = 0; it < cells; ++it)
            for (int iu = 0; iu < cells; ++iu) {
                int idx = g.index(is, it, iu);
                if (!member[idx]) continue;
                ChartPoint z = g.center(1, is, it, iu);
                out.members.push_back(z);
                out.preimages.push_back(pre[idx]);
                if (comp[idx]) {
                    out.component.push_back(z);
                    out.max_s = std::max(out.max_s, z.s.norm());
                    out.max_t = std::max(out.max_t, z.t);
                    out.min_t = std::min(out.min_t, z.t);
                    out.max_u = std::max(out.max_u, z.u.norm());
                }
            }
    return out;
}

AxiomReport BlenderVerifier::verify_axiom_a(double r, int cells) const {
    AxiomReport rep;
    rep.name = "axiom-a";
    rep.r = r;
    BlenderBox box = build_box(r);
    const int N = model_.params().N;
    IntersectionSamples samples = axiom_a_samples(r, cells);
    rep.sample_count = static_cast<long>(samples.members.size());
    if (samples.component.empty()) {
        rep.verdict = Verdict::Inconclusive;
        rep.witness = "no component containing Q at this grid resolution; refine the grid";
        return rep;
    }
    // Margins: component vs d^s B; members' preimages vs d^c B and d^u B
    // (z in Psi^N(dB) iff Psi^-N z in dB).
    double margin_s = box.s_radius;
    double margin_c = box.t_radius;
    double margin_u = box.u_radius;
    for (size_t i = 0; i < samples.members.size(); ++i) {
        const ChartPoint& z = samples.members[i];
        const ChartPoint& p = samples.preimages[i];
        margin_s = std::min(margin_s, box.s_radius - z.s.norm());
        margin_c = std::min(margin_c, box.t_radius - std::fabs(p.t));
        margin_u = std::min(margin_u, box.u_radius - p.u.norm());
    }
    rep.margin = std::min({margin_s, margin_c, margin_u});
    // Sharper interior bound: |s(z)| < 2/mu over the intersection.
    double smax = 0;
    for (const ChartPoint& z : samples.members) smax = std::max(smax, z.s.norm());
    double s_bound = 2.0 / model_.params().mu;
    std::ostringstream os;
    os << "max|s|=" << smax << " (bound 2/mu=" << s_bound << "), margins s/c/u=" << margin_s << "/"
       << margin_c << "/" << margin_u << ", N=" << N;
    rep.witness = os.str();
    rep.verdict = (rep.margin > 0 && smax < s_bound) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

BlenderVerifier::IntersectionSamples BlenderVerifier::axiom_b_samples(double r, int cells) const {
    if (model_.chart().n != 1)
        throw std::runtime_error("axiom grids are implemented for n = 1");
    BlenderBox box = build_box(r);
    const ModelParams& mp = model_.params();
    const long total_units = static_cast<long>(mp.N) * box.m_r;
    const double lam = mp.lambda;

    IntersectionSamples out;
    // Forward sampling of the capture bands: the fiber sources returning to
    // final u-coordinate u_t sit at u0 = lam^j (x_u + lam^{k0+k} u_t) with
    // j = N m_r - N m - k. The in-band offsets (lam^{j+k0+k} u_t ~ 1e-58) are
    // below the resolution of u0, so each (s0, t0, band) center runs the honest
    // hybrid orbit and the fiber rides the chained differential, which is
    // exact in u (all u-maps are affine with power-of-two factors).
    const int s_grid = 7, t_grid = 17;
    const int u_grid = std::max(9, cells / 2) | 1;
    for (int k = 0; k <= 12; ++k) {
        long j = total_units - static_cast<long>(mp.N) * mp.m - k;
        if (j < 1) continue;
        double band_center = std::pow(lam, static_cast<double>(j)) * mp.x_u[0];
        if (band_center > box.u_radius || band_center <= 0) continue;
        double shrink = std::pow(lam, static_cast<double>(j + mp.k0 + k));
        for (int a = 0; a < s_grid; ++a)
            for (int b = 0; b < t_grid; ++b) {
                double s0 = -box.s_radius + 2 * box.s_radius * (a + 0.5) / s_grid;
                double t0 = -box.t_radius + 2 * box.t_radius * (b + 0.5) / t_grid;
                ChartPoint x0{Vec{s0}, t0, Vec{band_center}};
                if (!box.contains(x0)) continue;
                HybridOrbit orb = model_.iterate(r, x0, total_units);
                if (orb.escaped || orb.nodes.back().step_index != total_units) continue;
                const ChartPoint& zc = orb.back_point();
                if (std::fabs(zc.u[0]) > 1e-9 * box.u_radius) continue;
                if (!box.contains(zc, box.u_radius)) continue;
                Mat jac = model_.jacobian_chain(r, x0, total_units);
                for (int c = 0; c < u_grid; ++c) {
                    double ut = -box.u_radius + 2 * box.u_radius * c / (u_grid - 1);
                    Tangent img = jac.apply(Tangent{Vec{0.0}, 0.0, Vec{shrink * ut}});
                    ChartPoint z{Vec{zc.s[0] + img.ds[0]}, zc.t + img.dt, Vec{ut}};
                    if (!box.contains(z)) continue;
                    ChartPoint pre = x0;
                    pre.u[0] = band_center + shrink * ut;
                    out.members.push_back(z);
                    out.preimages.push_back(pre);
                }
            }
    }
    // Anchor: the exact heteroclinic orbit through a.
    {
        HybridOrbit back = model_.iterate(r, model_.point_a(), -total_units);
        if (!back.escaped && back.nodes.back().step_index == total_units &&
            box.contains(back.back_point())) {
            out.members.push_back(model_.point_a());
            out.preimages.push_back(back.back_point());
        }
    }
    if (out.members.empty()) return out;

    // Component containing a, via flood fill on (s, t, u) bins.
    GridSpec g{64, box.s_radius, box.t_radius, box.u_radius};
    auto bin_of = [&](const ChartPoint& z) {
        auto clampi = [&](double x, double rad) {
            int i = static_cast<int>((x + rad) / (2 * rad) * g.cells);
            return std::clamp(i, 0, g.cells - 1);
        };
        return g.index(clampi(z.s[0], box.s_radius), clampi(z.t, box.t_radius),
                       clampi(z.u[0], box.u_radius));
    };
    std::vector<char> member_bins(g.cells * g.cells * g.cells, 0);
    for (const ChartPoint& z : out.members) member_bins[bin_of(z)] = 1;
    int a_bin = bin_of(model_.point_a());
    std::vector<char> comp = flood_component(g, member_bins, member_bins[a_bin] ? a_bin : -1);
    for (const ChartPoint& z : out.members) {
        if (!comp[bin_of(z)]) continue;
        out.component.push_back(z);
        out.max_s = std::max(out.max_s, std::fabs(z.s[0] - 1.0));  // distance to 1_s here
        out.max_t = std::max(out.max_t, z.t);
        out.min_t = std::min(out.min_t, z.t);
        out.max_u = std::max(out.max_u, z.u.norm());
    }
    return out;
}

AxiomReport BlenderVerifier::verify_axiom_b(double r, int cells) const {
    AxiomReport rep;
    rep.name = "axiom-b";
    rep.r = r;
    BlenderBox box = build_box(r);
    IntersectionSamples samples = axiom_b_samples(r, cells);
    rep.sample_count = static_cast<long>(samples.members.size());
    if (samples.component.empty()) {
        rep.verdict = Verdict::Inconclusive;
        rep.witness = "no component containing a; refine the grid or enlarge model.w_t";
        return rep;
    }
    double lamN = std::pow(model_.params().lambda, model_.params().N);
    double margin_r = box.t_radius - samples.max_t;                    // vs d^r B
    double margin_s = box.s_radius - (1.0 + samples.max_s);            // vs d^s B (|s| <= 1 + max|s-1|)
    double margin_u = box.u_radius - lamN * samples.max_u;             // vs Psi^N(d^u B)
    rep.margin = std::min({margin_r, margin_s, margin_u});
    // Implied Hoelder-type exponent from |s - 1| <= mu^{-kappa m_r}.
    double kappa_hat = 0;
    if (samples.max_s > 0 && samples.max_s < 1)
        kappa_hat = -std::log(samples.max_s) / (std::log(model_.params().mu) * box.m_r);
    std::ostringstream os;
    os << "component size=" << samples.component.size() << ", max|s-1|=" << samples.max_s
       << " (kappa_hat=" << kappa_hat << "), t-range=[" << samples.min_t << "," << samples.max_t
       << "], margins r/s/u=" << margin_r << "/" << margin_s << "/" << margin_u;
    rep.witness = os.str();
    rep.verdict = (rep.margin > 0 && samples.max_s < 1.0) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

AxiomReport BlenderVerifier::verify_axiom_c(double r) const {
    AxiomReport rep;
    rep.name = "axiom-c";
    rep.r = r;
    BlenderBox box = build_box(r);
    const ModelParams& mp = model_.params();
    int n = model_.chart().n;

    std::vector<ChartPoint> points;
    const int G = 5;
    for (int a = 0; a < G; ++a)
        for (int b = 0; b < G; ++b)
            for (int c = 0; c < G; ++c) {
                ChartPoint p{Vec(n), -box.t_radius + 2 * box.t_radius * (b + 0.5) / G, Vec(n)};
                p.s[0] = -box.s_radius + 2 * box.s_radius * (a + 0.5) / G;
                p.u[0] = -box.u_radius + 2 * box.u_radius * (c + 0.5) / G;
                points.push_back(p);
            }

    auto fwd_jac = [&](const ChartPoint& p) {
        Mat acc = Mat::identity(flat_dim(n));
        ChartPoint cur = p;
        for (int k = 0; k < mp.N; ++k) {
            acc = model_.chart_step_jacobian(r, cur) * acc;
            cur = model_.chart_step(r, cur);
        }
        return acc;
    };
    auto bwd_jac = [&](const ChartPoint& p) {
        // D(Psi^-1) = D(Phi^-1) * D(Phi^H_{-r}); iterate N times.
        Mat acc = Mat::identity(flat_dim(n));
        ChartPoint cur = p;
        Mat base_inv(flat_dim(n));
        for (int i = 0; i < n; ++i) {
            base_inv.at(i, i) = 1.0 / mp.lambda;
            base_inv.at(n + 1 + i, n + 1 + i) = mp.lambda;
        }
        base_inv.at(n, n) = 1.0;
        for (int k = 0; k < mp.N; ++k) {
            Mat jf = model_.flow().phi_H_jacobian(-r, cur);
            acc = base_inv * jf * acc;
            cur = model_.chart_step_back(r, cur);
        }
        return acc;
    };

    ConeField ku{Axes::u_only(), cone_eps_};
    ConeField ks{Axes::s_only(), cone_eps_};
    ConeField ku_core{Axes::u_only(), 0.0};
    ConeField ks_core{Axes::s_only(), 0.0};

    ContractionResult cu = check_contraction(fwd_jac, ku, points, 64);
    ContractionResult cs = check_contraction(bwd_jac, ks, points, 64);
    DilationEstimate du = dilation_constant(fwd_jac, ku_core, points, 64);
    DilationEstimate ds = dilation_constant(bwd_jac, ks_core, points, 64);
    double mu_need = mp.mu * (1.0 - 1e-6);

    rep.sample_count = du.sample_count + ds.sample_count;
    rep.margin = std::min({cu.margin, cs.margin, du.lambda_hat - mu_need, ds.lambda_hat - mu_need});
    std::ostringstream os;
    os << "K^u contraction margin=" << cu.margin << ", K^s (inverse) margin=" << cs.margin
       << ", dilation(E^u)=" << du.lambda_hat << ", dilation(E^s, inverse)=" << ds.lambda_hat
       << " (need >= " << mu_need << ")";
    rep.witness = os.str();
    rep.verdict = rep.margin > 0 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

AxiomReport BlenderVerifier::verify_axiom_d(double r) const {
    AxiomReport rep;
    rep.name = "axiom-d";
    rep.r = r;
    BlenderBox box = build_box(r);
    const ModelParams& mp = model_.params();
    int n = model_.chart().n;
    const long block_units = static_cast<long>(mp.N) * box.m_r;

    // Part 1 samples: Psi^{-N}(A) from the axiom-a component.
    IntersectionSamples a_samples = axiom_a_samples(r, 16);
    std::vector<ChartPoint> part1;
    for (const ChartPoint& z : a_samples.component) {
        ChartPoint back = z;
        bool ok = true;
        try {
            for (int k = 0; k < mp.N; ++k) back = model_.chart_step_back(r, back);
        } catch (const FlowRangeError&) {
            ok = false;
        }
        if (ok) part1.push_back(back);
        if (part1.size() >= 64) break;
    }
    // Part 2 sources: preimages of the A' component (axiom-b bands).
    IntersectionSamples b_samples = axiom_b_samples(r, 16);
    std::vector<ChartPoint> part2;
    for (size_t i = 0; i < b_samples.members.size() && part2.size() < 32; ++i) {
        if (std::fabs(b_samples.members[i].s[0] - 1.0) < 0.5) part2.push_back(b_samples.preimages[i]);
    }
    if (part1.empty() || part2.empty()) {
        rep.verdict = Verdict::Inconclusive;
        rep.witness = "missing A or A' samples";
        return rep;
    }

    // Measured center behavior.
    double nu1_err = 0;  // | TPsi^N R - e^{Nr} R | over part 1el
    double eNr = std::exp(mp.N * r);
    for (const ChartPoint& x : part1) {
        Mat j = model_.jacobian_chain(r, x, mp.N);
        Tangent v = j.apply(Tangent::d_t(n));
        Tangent want = Tangent::zero(n);
        want.dt = eNr;
        nu1_err = std::max(nu1_err, (v - want).norm());
    }
    double nu_min = std::numeric_limits<double>::infinity(), eta_max = 0;
    for (const ChartPoint& x : part2) {
        CenterDrift d = estimate_center_drift(model_, r, x, block_units);
        nu_min = std::min(nu_min, d.nu);
        eta_max = std::max(eta_max, d.eta);
    }

    // Stretching window and the summed cone.
    double delta_lo = eta_max / (1.0 - 1.0 / mp.mu);
    double delta_hi = std::sqrt(std::min(eNr * eNr, nu_min * nu_min) - 1.0);
    if (!(delta_lo < delta_hi)) {
        rep.verdict = Verdict::Fail;
        std::ostringstream os;
        os << "empty delta window: eta=" << eta_max << ", nu_min=" << nu_min;
        rep.witness = os.str();
        return rep;
    }
    double delta = delta_lo + 0.5 * (delta_hi - delta_lo);
    if (!check_stretching_criterion(mp.mu, cone_eps_, std::min(eNr, nu_min), eta_max, delta)) {
        rep.verdict = Verdict::Fail;
        rep.witness = "stretching criterion rejected the measured constants";
        return rep;
    }

    SumCone kcu{ConeField{Axes::u_only(), cone_eps_}, ConeField{Axes::t_only(), delta}};
    // Boundary-ish rays of the summed cone.
    std::vector<Tangent> rays;
    for (int i = 0; i <= 8; ++i) {
        double w = i / 8.0;
        for (double su : {-1.0, 1.0})
            for (double st : {-1.0, 1.0})
                for (double off : {-1.0, 1.0}) {
                    Tangent v = Tangent::zero(n);
                    v.du[0] = su * w;
                    v.dt = st * (1.0 - w);
                    v.ds[0] = off * (cone_eps_ * w + delta * (1.0 - w));
                    double nn = v.norm();
                    if (nn > 1e-12) {
                        v *= 1.0 / nn;
                        rays.push_back(v);
                    }
                }
    }
    auto check_cone = [&](const std::vector<ChartPoint>& pts, long units, double& margin,
                          double& dil) {
        margin = std::numeric_limits<double>::infinity();
        dil = std::numeric_limits<double>::infinity();
        for (const ChartPoint& x : pts) {
            Mat j = model_.jacobian_chain(r, x, units);
            for (const Tangent& v : rays) {
                Tangent w = j.apply(v);
                // Interior membership margin of the summed cone.
                Tangent b1 = kcu.first.project(w);
                Tangent b2 = kcu.second.project(w);
                Tangent off = w - b1 - b2;
                double allowance = kcu.first.width * b1.norm() + kcu.second.width * b2.norm();
                margin = std::min(margin, (allowance - off.norm()) / std::max(w.norm(), 1e-300));
                dil = std::min(dil, w.norm() / v.norm());
            }
        }
    };
    double m1, d1, m2, d2;
    check_cone(part1, mp.N, m1, d1);
    check_cone(part2, block_units, m2, d2);

    rep.sample_count = static_cast<long>((part1.size() + part2.size()) * rays.size());
    rep.margin = std::min({m1, m2, d1 - 1.0, d2 - 1.0});
    std::ostringstream os;
    os << "delta=" << delta << " in (" << delta_lo << "," << delta_hi << "), nu_min=" << nu_min
       << ", eta=" << eta_max << ", part1 |TPsi^N R - e^{Nr}R|=" << nu1_err
       << ", K^cu margins N/block=" << m1 << "/" << m2 << ", dilations=" << d1 << "/" << d2;
    rep.witness = os.str();
    rep.verdict = (rep.margin > 0 && nu1_err <= 1e-8) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

AxiomReport BlenderVerifier::verify_axiom_e(double r, const std::vector<VerticalDisk>& disks) const {
    AxiomReport rep;
    rep.name = "axiom-e";
    rep.r = r;
    BlenderBox box = build_box(r);
    double min_dist = std::numeric_limits<double>::infinity();
    for (const VerticalDisk& d : disks) {
        if (d.lipschitz > 2 * cone_eps_)
            throw std::invalid_argument("verify_axiom_e: disk fails the 2*eps Lipschitz bound (not vertical)");
        if (!d.right_of_W())
            throw std::invalid_argument("verify_axiom_e: disk is not right of W");
        for (int i = 0; i < d.size(); ++i)
            min_dist = std::min(min_dist, box.dist_left(d.point(i)));
    }
    rep.sample_count = static_cast<long>(disks.size());
    rep.margin = min_dist - r * r * r;
    std::ostringstream os;
    os << "min dist to d^l=" << min_dist << " vs r^3=" << r * r * r;
    rep.witness = os.str();
    rep.verdict = rep.margin > 0 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

VerticalDisk BlenderVerifier::random_disk(double r, Rng& rng, int grid) const {
    if (model_.chart().n != 1) throw std::runtime_error("vertical disks are implemented for n = 1");
    BlenderBox box = build_box(r);
    VerticalDisk d;
    double tau0 = rng.uniform(0.05, 0.95) * box.t_radius;
    double s0 = rng.uniform(-1.0, 1.0);
    double slope_s = rng.uniform(-0.1, 0.1);
    double slope_tau = rng.uniform(-0.8, 0.8) * cone_eps_;
    d.center_s = s0;
    d.center_t = tau0;  // tau = t at u = 0
    for (int i = 0; i < grid; ++i) {
        double u = -box.u_radius + 2 * box.u_radius * i / (grid - 1);
        double ds = slope_s * u;
        d.u_nodes.push_back(u);
        d.off_s.push_back(ds);
        // t = tau + s u with tau(u) = tau0 + slope_tau u.
        d.off_t.push_back(slope_tau * u + (s0 + ds) * u);
    }
    d.certify();
    return d;
}

VerticalDisk BlenderVerifier::disk_through_a(double r, int grid) const {
    // Heteroclinic unstable-leaf disk (the macro image of a W-fiber, hence a
    // leaf of W^u(P)'s saturation) centered at tau = e^{-1.5 N r} t(Q_r): right
    // of W and above the short/long threshold e^{-3 N r} t(Q_r) for every r,
    // so the first iterate takes the long branch.
    if (model_.chart().n != 1) throw std::runtime_error("vertical disks are implemented for n = 1");
    BlenderBox box = build_box(r);
    const ModelParams& mp = model_.params();
    double block = mp.N * mp.m * r;
    double tau_target = std::exp(-1.5 * mp.N * r) * t_Qr(r);
    double zeta_w = (r - tau_target) * std::exp(block);
    VerticalDisk d;
    ChartPoint w{Vec{0.0}, model_.chart().L - zeta_w, Vec{mp.x_u[0]}};
    ChartPoint c = model_.macro_step(r, w);
    d.center_s = c.s[0];
    d.center_t = c.t;
    // Macro differential on the fiber: u'' spans the target node exactly and
    // shears t by <1_s, u''>.
    for (int i = 0; i < grid; ++i) {
        double ut = -box.u_radius + 2 * box.u_radius * i / (grid - 1);
        d.u_nodes.push_back(ut);
        d.off_s.push_back(0.0);
        d.off_t.push_back(ut);
    }
    d.certify();
    return d;
}

namespace {

// Piecewise-linear evaluation of the offset graph at a fiber coordinate.
void offset_eval(const VerticalDisk& d, double u, double& os, double& ot) {
    const auto& un = d.u_nodes;
    if (u <= un.front()) {
        os = d.off_s.front();
        ot = d.off_t.front();
        return;
    }
    if (u >= un.back()) {
        os = d.off_s.back();
        ot = d.off_t.back();
        return;
    }
    size_t hi = std::upper_bound(un.begin(), un.end(), u) - un.begin();
    size_t lo = hi - 1;
    double w = (u - un[lo]) / (un[hi] - un[lo]);
    os = (1 - w) * d.off_s[lo] + w * d.off_s[hi];
    ot = (1 - w) * d.off_t[lo] + w * d.off_t[hi];
}

}  // namespace

BlenderVerifier::DiskIteration BlenderVerifier::iterate_disk(const VerticalDisk& d, double r,
                                                             int grid) const {
    if (model_.chart().n != 1) throw std::runtime_error("vertical disks are implemented for n = 1");
    DiskIteration out;
    BlenderBox box = build_box(r);
    const ModelParams& mp = model_.params();
    if (d.lipschitz > 2 * cone_eps_) {
        out.ok = false;
        out.note = "input disk fails the 2*eps Lipschitz certificate";
        return out;
    }
    if (!d.right_of_W()) {
        out.ok = false;
        out.note = "input disk is not right of W";
        return out;
    }

    double threshold = std::exp(-3.0 * mp.N * r) * t_Qr(r);
    const double lam = mp.lambda;

    auto finalize = [&](VerticalDisk& nd, bool long_branch) {
        nd.certify();
        bool inbox = box.contains(nd.center(), 1e-12);
        for (int i = 0; i < nd.size() && inbox; ++i)
            if (!box.contains(nd.point(i), 1e-12)) inbox = false;
        double clearance = std::numeric_limits<double>::infinity();
        for (int i = 0; i < nd.size(); ++i) {
            const ChartPoint p = nd.point(i);
            clearance = std::min(clearance, long_branch
                                                ? std::sqrt(nd.tau(i) * nd.tau(i) + p.u.norm2())
                                                : box.dist_right(p));
        }
        bool ok = inbox && nd.right_of_W() && nd.lipschitz <= 2 * cone_eps_ &&
                  clearance > r * r * r;
        if (!ok) {
            std::ostringstream os;
            os << (long_branch ? "long" : "short") << " branch: inbox=" << inbox
               << " lip=" << nd.lipschitz << " clearance=" << clearance;
            out.note = os.str();
        }
        return ok;
    };

    if (d.center_t < threshold) {
        // Short branch: one N-block of chart steps; the center moves by the
        // nonlinear map, offsets by its differential.
        out.branch = Branch::Short;
        ChartPoint c = d.center();
        Mat jac = Mat::identity(flat_dim(1));
        for (int k = 0; k < mp.N; ++k) {
            jac = model_.chart_step_jacobian(r, c) * jac;
            c = model_.chart_step(r, c);
        }
        VerticalDisk nd;
        nd.center_s = c.s[0];
        nd.center_t = c.t;
        double lamN = std::pow(lam, mp.N);
        for (int i = 0; i < grid; ++i) {
            double ut = -box.u_radius + 2 * box.u_radius * i / (grid - 1);
            double u_src = lamN * ut;
            double os, ot;
            offset_eval(d, u_src, os, ot);
            Tangent delta{Vec{os}, ot, Vec{u_src}};
            Tangent img = jac.apply(delta);
            nd.u_nodes.push_back(ut);
            nd.off_s.push_back(img.ds[0]);
            nd.off_t.push_back(img.dt);
        }
        out.ok = finalize(nd, false);
        out.disk = nd;
        return out;
    }

    // Long branch: locate the capture band whose full N m_r hybrid image lands
    // in the box fiber; the band center runs the honest hybrid orbit and the
    // band's fiber structure rides the chained differential (exact in u).
    out.branch = Branch::Long;
    const long total_units = static_cast<long>(mp.N) * box.m_r;
    std::string attempts;
    for (int k = 0; k <= 12; ++k) {
        long j = total_units - static_cast<long>(mp.N) * mp.m - k;
        if (j < 1) continue;
        double band_u = std::pow(lam, static_cast<double>(j)) * mp.x_u[0];
        if (band_u > box.u_radius || band_u < d.u_nodes.front()) continue;
        double os0, ot0;
        offset_eval(d, band_u, os0, ot0);
        ChartPoint seed{Vec{d.center_s + os0}, d.center_t + ot0, Vec{band_u}};
        HybridOrbit orb = model_.iterate(r, seed, total_units);
        if (orb.escaped || orb.nodes.back().step_index != total_units) {
            attempts += " k=" + std::to_string(k) + ":escape";
            continue;
        }
        int window_steps = 0;
        for (const auto& node : orb.nodes)
            if (node.tag == RegionTag::ReturnWindow) ++window_steps;
        if (window_steps != 1) {
            attempts += " k=" + std::to_string(k) + ":window" + std::to_string(window_steps);
            continue;
        }
        const ChartPoint& zc = orb.back_point();
        if (std::fabs(zc.u[0]) > 1e-9 * box.u_radius) {
            attempts += " k=" + std::to_string(k) + ":center-u";
            continue;
        }
        Mat jac = model_.jacobian_chain(r, seed, total_units);
        // Fiber: source offsets delta_u with image u exactly u_t.
        double shrink = std::pow(lam, static_cast<double>(j + mp.k0 + k));
        double slope_s = 0, slope_t = 0;
        {  // source graph slopes at the band (for the tiny in-band variation)
            double h = box.u_radius * 1e-3;
            double osp, otp, osm, otm;
            offset_eval(d, band_u + h, osp, otp);
            offset_eval(d, band_u - h, osm, otm);
            slope_s = (osp - osm) / (2 * h);
            slope_t = (otp - otm) / (2 * h);
        }
        VerticalDisk nd;
        nd.center_s = zc.s[0];
        nd.center_t = zc.t;
        for (int i = 0; i < grid; ++i) {
            double ut = -box.u_radius + 2 * box.u_radius * i / (grid - 1);
            double du_src = shrink * ut;
            Tangent delta{Vec{slope_s * du_src}, slope_t * du_src, Vec{du_src}};
            Tangent img = jac.apply(delta);
            nd.u_nodes.push_back(ut);
            nd.off_s.push_back(img.ds[0]);
            nd.off_t.push_back(img.dt);
        }
        if (finalize(nd, true)) {
            out.disk = nd;
            out.ok = true;
            return out;
        }
        attempts += " k=" + std::to_string(k) + ":{" + out.note + "}";
    }
    out.ok = false;
    out.note = "long branch: no capture band landed a vertical disk in the box;" + attempts;
    return out;
}

AxiomReport BlenderVerifier::verify_axiom_f(double r, int grid, int n_disks, std::uint64_t seed) const {
    AxiomReport rep;
    rep.name = "axiom-f";
    rep.r = r;
    BlenderBox box = build_box(r);
    Rng rng = Rng::derive(seed, 0xF);
    double min_margin = std::numeric_limits<double>::infinity();
    int shorts = 0, longs = 0;
    for (int i = 0; i < n_disks; ++i) {
        VerticalDisk d = random_disk(r, rng, grid);
        DiskIteration it = iterate_disk(d, r, grid);
        if (!it.ok) {
            rep.verdict = Verdict::Fail;
            rep.witness = "disk " + std::to_string(i) + ": " + it.note;
            return rep;
        }
        if (it.branch == Branch::Short) {
            ++shorts;
            double dist_r = std::numeric_limits<double>::infinity();
            for (int k = 0; k < it.disk.size(); ++k)
                dist_r = std::min(dist_r, box.dist_right(it.disk.point(k)));
            min_margin = std::min(min_margin, dist_r - r * r * r);
        } else {
            ++longs;
            double dist_w = std::numeric_limits<double>::infinity();
            for (int k = 0; k < it.disk.size(); ++k) {
                const ChartPoint p = it.disk.point(k);
                dist_w = std::min(dist_w, std::sqrt(p.t * p.t + p.u.norm2()));
            }
            min_margin = std::min(min_margin, dist_w - r * r * r);
        }
    }
    // Include the heteroclinic leaf disk; it must take the long branch.
    VerticalDisk dq = disk_through_a(r, grid);
    DiskIteration it = iterate_disk(dq, r, grid);
    if (!it.ok || it.branch != Branch::Long) {
        rep.verdict = Verdict::Fail;
        rep.witness = "heteroclinic disk failed the long branch: " + it.note;
        return rep;
    }
    rep.sample_count = n_disks + 1;
    rep.margin = min_margin;
    std::ostringstream os;
    os << "short/long=" << shorts << "/" << longs + 1 << ", min clearance margin=" << min_margin;
    rep.witness = os.str();
    rep.verdict = min_margin > 0 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

BlenderVerifier::DistinctiveReport BlenderVerifier::distinctive_property_test(
    double r, int n_disks, int n_iter, std::uint64_t seed, int grid) const {
    DistinctiveReport rep;
    rep.disks = n_disks;
    rep.iterations = n_iter;
    BlenderBox box = build_box(r);
    double box_diam = std::sqrt(4 * box.s_radius * box.s_radius + 4 * box.t_radius * box.t_radius +
                                4 * box.u_radius * box.u_radius);
    Rng rng = Rng::derive(seed, 0xD15C);
    for (int i = 0; i < n_disks; ++i) {
        VerticalDisk d = random_disk(r, rng, grid);
        bool alive = true;
        for (int k = 0; k < n_iter && alive; ++k) {
            ChartPoint prev = d.center();
            DiskIteration it = iterate_disk(d, r, grid);
            if (!it.ok) {
                alive = false;
                rep.witness = "disk " + std::to_string(i) + " died at iteration " +
                              std::to_string(k) + ": " + it.note;
                break;
            }
            d = it.disk;
            ChartPoint cur = d.center();
            double drift = std::sqrt(std::pow(cur.s[0] - prev.s[0], 2) + std::pow(cur.t - prev.t, 2));
            rep.max_center_drift = std::max(rep.max_center_drift, drift);
            if (drift > box_diam) {
                alive = false;
                rep.witness = "disk " + std::to_string(i) + " drifted beyond the box diameter";
            }
        }
        if (alive) ++rep.survived;
    }
    rep.verdict = (rep.survived == rep.disks) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

}  // namespace cbl
