#include "cbl/transitivity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stack>
#include <stdexcept>

namespace cbl {

const char* to_string(TVerdict v) {
    switch (v) {
        case TVerdict::Yes: return "yes";
        case TVerdict::No: return "no";
        case TVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

long BoxPartition::cell_count() const {
    long c = 1;
    for (int r : res) c *= r;
    return c;
}

long BoxPartition::cell_of(const std::vector<double>& x) const {
    long idx = 0;
    for (int d = 0; d < dims(); ++d) {
        double span = hi[d] - lo[d];
        double v = x[d];
        if (periodic[d]) {
            v = std::fmod(v - lo[d], span);
            if (v < 0) v += span;
            v += lo[d];
        } else if (v < lo[d] || v >= hi[d]) {
            // allow the closed upper face
            if (!(v == hi[d])) return -1;
            v = hi[d] - 1e-12 * span;
        }
        int i = static_cast<int>((v - lo[d]) / span * res[d]);
        i = std::clamp(i, 0, res[d] - 1);
        idx = idx * res[d] + i;
    }
    return idx;
}

std::vector<double> BoxPartition::cell_corner(long idx) const {
    std::vector<double> c(dims());
    for (int d = dims() - 1; d >= 0; --d) {
        int i = static_cast<int>(idx % res[d]);
        idx /= res[d];
        c[d] = lo[d] + (hi[d] - lo[d]) * i / res[d];
    }
    return c;
}

std::vector<double> BoxPartition::cell_size() const {
    std::vector<double> s(dims());
    for (int d = 0; d < dims(); ++d) s[d] = (hi[d] - lo[d]) / res[d];
    return s;
}

BoxPartition BoxPartition::interval(double a, double b, int cells, bool wrap) {
    return {{a}, {b}, {cells}, {wrap}};
}

BoxPartition BoxPartition::square(double a, double b, int cells, bool wrap) {
    return {{a, a}, {b, b}, {cells, cells}, {wrap, wrap}};
}

bool TransitionGraph::any_escape() const {
    for (int e : escapes)
        if (e > 0) return true;
    return false;
}

TransitionGraph build_transition_graph(const SampledMap& map, const BoxPartition& part,
                                       int samples_per_cell, std::uint64_t seed) {
    TransitionGraph g;
    g.n_cells = part.cell_count();
    g.adj.assign(g.n_cells, {});
    g.escapes.assign(g.n_cells, 0);
    g.exterior.assign(g.n_cells, 0);
    g.seed = seed;
    g.samples_per_cell = samples_per_cell;
    std::vector<double> size = part.cell_size();
    for (long c = 0; c < g.n_cells; ++c) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(c));
        std::vector<double> corner = part.cell_corner(c);
        for (int k = 0; k < samples_per_cell; ++k) {
            std::vector<double> x(part.dims());
            for (int d = 0; d < part.dims(); ++d) x[d] = corner[d] + size[d] * rng.uniform();
            auto y = map(x);
            long target = y ? part.cell_of(*y) : -1;
            if (target < 0) {
                ++g.escapes[c];
            } else {
                g.adj[c].push_back(static_cast<int>(target));
            }
        }
        auto& a = g.adj[c];
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        if (g.escapes[c] == samples_per_cell) g.exterior[c] = 1;
    }
    return g;
}

void export_graph(const TransitionGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_graph: cannot open " + path);
    for (long i = 0; i < g.n_cells; ++i) {
        out << i << ":";
        for (int j : g.adj[i]) out << " " << j;
        if (g.exterior[i]) out << " #exterior";
        out << "\n";
    }
}

namespace {

// Certified out-edges: none when the cell has escaping samples.
std::vector<std::vector<int>> certified_adj(const TransitionGraph& g) {
    std::vector<std::vector<int>> adj(g.n_cells);
    for (long i = 0; i < g.n_cells; ++i)
        if (g.escapes[i] == 0) adj[i] = g.adj[i];
    return adj;
}

// Iterative Tarjan SCC; returns component id per node (-1 for skipped nodes).
std::vector<int> strongly_connected_components(const std::vector<std::vector<int>>& adj,
                                               const std::vector<char>& skip, int& n_comp) {
    int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::stack<int> stk;
    int counter = 0;
    n_comp = 0;
    struct Frame {
        int v;
        size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (skip[root] || index[root] != -1) continue;
        std::stack<Frame> call;
        call.push({root, 0});
        index[root] = low[root] = counter++;
        stk.push(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.top();
            if (f.child < adj[f.v].size()) {
                int w = adj[f.v][f.child++];
                if (skip[w]) continue;
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stk.push(w);
                    on_stack[w] = 1;
                    call.push({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    while (true) {
                        int w = stk.top();
                        stk.pop();
                        on_stack[w] = 0;
                        comp[w] = n_comp;
                        if (w == f.v) break;
                    }
                    ++n_comp;
                }
                int v = f.v;
                call.pop();
                if (!call.empty()) low[call.top().v] = std::min(low[call.top().v], low[v]);
            }
        }
    }
    return comp;
}

std::vector<char> reachable_from(const std::vector<std::vector<int>>& adj, int start,
                                 const std::vector<char>& skip) {
    std::vector<char> seen(adj.size(), 0);
    std::stack<int> stk;
    stk.push(start);
    seen[start] = 1;
    while (!stk.empty()) {
        int v = stk.top();
        stk.pop();
        for (int w : adj[v])
            if (!skip[w] && !seen[w]) {
                seen[w] = 1;
                stk.push(w);
            }
    }
    return seen;
}

}  // namespace

TransitivityResult is_transitive(const TransitionGraph& g) {
    TransitivityResult res;
    std::vector<char> skip(g.exterior.begin(), g.exterior.end());
    long active = 0;
    for (long i = 0; i < g.n_cells; ++i)
        if (!skip[i]) ++active;
    if (active == 0) {
        res.verdict = TVerdict::Inconclusive;
        res.note = "all cells exterior";
        return res;
    }
    auto adj = certified_adj(g);
    int n_comp = 0;
    std::vector<int> comp = strongly_connected_components(adj, skip, n_comp);
    if (n_comp == 1) {
        res.verdict = TVerdict::Yes;
        res.note = "strongly connected on " + std::to_string(active) + " cells";
        return res;
    }
    if (!g.any_escape()) {
        // Look for a mutually unreachable pair among component representatives.
        std::vector<int> rep(n_comp, -1);
        for (long i = 0; i < g.n_cells; ++i)
            if (!skip[i] && rep[comp[i]] == -1) rep[comp[i]] = static_cast<int>(i);
        for (int a = 0; a < n_comp; ++a) {
            std::vector<char> ra = reachable_from(adj, rep[a], skip);
            for (int b = a + 1; b < n_comp; ++b) {
                if (ra[rep[b]]) continue;
                std::vector<char> rb = reachable_from(adj, rep[b], skip);
                if (!rb[rep[a]]) {
                    res.verdict = TVerdict::No;
                    res.witness_a = rep[a];
                    res.witness_b = rep[b];
                    res.note = "mutually unreachable cells with all samples retained";
                    return res;
                }
            }
        }
    }
    res.verdict = TVerdict::Inconclusive;
    res.note = std::to_string(n_comp) + " components" + (g.any_escape() ? " with escapes" : "");
    return res;
}

namespace {

// Dense boolean matrix with bitset rows over the active (non-exterior) cells.
struct BoolMat {
    int n = 0, words = 0;
    std::vector<std::uint64_t> bits;

    explicit BoolMat(int n_) : n(n_), words((n_ + 63) / 64), bits(static_cast<size_t>(n_) * words, 0) {}
    void set(int i, int j) { bits[static_cast<size_t>(i) * words + j / 64] |= (1ull << (j % 64)); }
    const std::uint64_t* row(int i) const { return &bits[static_cast<size_t>(i) * words]; }
    std::uint64_t* row(int i) { return &bits[static_cast<size_t>(i) * words]; }

    bool all_positive() const {
        for (int i = 0; i < n; ++i) {
            const std::uint64_t* r = row(i);
            for (int w = 0; w < words; ++w) {
                std::uint64_t want = (w == words - 1 && n % 64) ? ((1ull << (n % 64)) - 1) : ~0ull;
                if ((r[w] & want) != want) return false;
            }
        }
        return true;
    }

    // this * other (boolean).
    BoolMat multiply(const BoolMat& other) const {
        BoolMat out(n);
        for (int i = 0; i < n; ++i) {
            const std::uint64_t* r = row(i);
            std::uint64_t* o = out.row(i);
            for (int w = 0; w < words; ++w) {
                std::uint64_t bitsw = r[w];
                while (bitsw) {
                    int j = w * 64 + __builtin_ctzll(bitsw);
                    bitsw &= bitsw - 1;
                    const std::uint64_t* rj = other.row(j);
                    for (int k = 0; k < words; ++k) o[k] |= rj[k];
                }
            }
        }
        return out;
    }
};

}  // namespace

MixingResult is_mixing(const TransitionGraph& g, long horizon) {
    MixingResult res;
    TransitivityResult tr = is_transitive(g);
    if (tr.verdict != TVerdict::Yes) {
        res.verdict = TVerdict::No;
        res.note = "not strongly connected (" + tr.note + ")";
        return res;
    }
    std::vector<char> skip(g.exterior.begin(), g.exterior.end());
    auto adj = certified_adj(g);

    // Graph period via BFS layering: gcd over edges of (level(u) + 1 - level(v)).
    int root = 0;
    while (root < g.n_cells && skip[root]) ++root;
    std::vector<long> level(g.n_cells, -1);
    std::vector<int> queue{root};
    level[root] = 0;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int v = queue[qi];
        for (int w : adj[v])
            if (!skip[w] && level[w] == -1) {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
    }
    long period = 0;
    for (long v = 0; v < g.n_cells; ++v) {
        if (skip[v]) continue;
        for (int w : adj[v]) period = std::gcd(period, level[v] + 1 - level[w]);
    }
    period = std::labs(period);
    res.period = static_cast<int>(period);
    if (period > 1) {
        res.verdict = TVerdict::No;
        res.note = "graph period " + std::to_string(period);
        return res;
    }

    // Power positivity at powers of two up to the horizon.
    std::vector<int> dense_id(g.n_cells, -1);
    int active = 0;
    for (long i = 0; i < g.n_cells; ++i)
        if (!skip[i]) dense_id[i] = active++;
    BoolMat A(active);
    for (long i = 0; i < g.n_cells; ++i) {
        if (skip[i]) continue;
        for (int j : adj[i])
            if (!skip[j]) A.set(dense_id[i], dense_id[j]);
    }
    long T = 1;
    BoolMat P = A;
    while (true) {
        if (P.all_positive()) {
            res.verdict = TVerdict::Yes;
            res.positive_at = T;
            res.note = "A^T positive at T = " + std::to_string(T) +
                       " (stays positive for larger T since the graph is strongly connected)";
            return res;
        }
        if (2 * T > horizon) break;
        P = P.multiply(P);
        T *= 2;
    }
    res.verdict = TVerdict::No;
    res.note = "powers never positive within horizon " + std::to_string(horizon);
    return res;
}

std::optional<DividingWitness> dividing_obstruction(
    const FlowField& field, const std::function<double(const std::vector<double>&)>& gamma_fn,
    const std::vector<std::vector<double>>& samples, double t_horizon, double dt,
    std::vector<std::vector<double>>* violator) {
    DividingWitness wit;
    wit.t_horizon = t_horizon;
    auto rk4_step = [&](std::vector<double> x, double h) {
        size_t d = x.size();
        std::vector<double> k1 = field(x), k2(d), k3(d), k4(d), tmp(d);
        for (size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        k2 = field(tmp);
        for (size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        k3 = field(tmp);
        for (size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * k3[i];
        k4 = field(tmp);
        for (size_t i = 0; i < d; ++i) x[i] += (h / 6) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        return x;
    };

    std::vector<std::vector<double>> crossing_points;
    for (const auto& seed : samples) {
        std::vector<double> x = seed;
        std::vector<std::vector<double>> orbit{x};
        int crossings = 0;
        double prev = gamma_fn(x);
        long steps = static_cast<long>(t_horizon / dt);
        std::vector<double> cross_at;
        for (long k = 0; k < steps; ++k) {
            x = rk4_step(x, dt);
            orbit.push_back(x);
            double cur = gamma_fn(x);
            if (prev != 0 && cur != 0 && ((prev < 0) != (cur < 0))) {
                ++crossings;
                cross_at = x;
            }
            prev = cur;
        }
        if (crossings > 1) {
            if (violator) *violator = orbit;
            return std::nullopt;
        }
        wit.crossings.push_back(crossings);
        wit.max_crossings = std::max(wit.max_crossings, crossings);
        if (crossings == 1) crossing_points.push_back(cross_at);
    }
    // Two disjoint patches of Gamma from the recorded crossings (split at the
    // median of the first coordinate that varies).
    if (crossing_points.size() >= 2) {
        size_t d = crossing_points.front().size();
        size_t axis = 0;
        double best_spread = -1;
        for (size_t a = 0; a < d; ++a) {
            double mn = 1e300, mx = -1e300;
            for (auto& c : crossing_points) {
                mn = std::min(mn, c[a]);
                mx = std::max(mx, c[a]);
            }
            if (mx - mn > best_spread) {
                best_spread = mx - mn;
                axis = a;
            }
        }
        std::vector<double> vals;
        for (auto& c : crossing_points) vals.push_back(c[axis]);
        std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
        double median = vals[vals.size() / 2];
        for (auto& c : crossing_points)
            (c[axis] < median ? wit.patch_a : wit.patch_b).push_back(c);
    }
    return wit;
}

}  // namespace cbl
