#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbl/rng.hpp"

namespace cbl {

// Verdicts of the sampled detectors; always statements about the sampled
// partition, never about the smooth system.
enum class TVerdict { Yes, No, Inconclusive };
const char* to_string(TVerdict v);

// Axis-aligned box partition of a rectangle in R^d, optionally periodic per axis.
struct BoxPartition {
    std::vector<double> lo, hi;
    std::vector<int> res;
    std::vector<bool> periodic;

    int dims() const { return static_cast<int>(lo.size()); }
    long cell_count() const;
    // Cell index of a point, or -1 if outside (non-periodic axes only).
    long cell_of(const std::vector<double>& x) const;
    std::vector<double> cell_corner(long idx) const;
    std::vector<double> cell_size() const;

    static BoxPartition interval(double a, double b, int cells, bool wrap);
    static BoxPartition square(double a, double b, int cells, bool wrap);
};

struct TransitionGraph {
    long n_cells = 0;
    std::vector<std::vector<int>> adj;   // sorted, deduplicated successor lists
    std::vector<int> escapes;            // escaping samples per cell
    std::vector<char> exterior;          // all samples escaped
    std::uint64_t seed = 0;
    int samples_per_cell = 0;

    bool any_escape() const;
};

using SampledMap = std::function<std::optional<std::vector<double>>(const std::vector<double>&)>;

TransitionGraph build_transition_graph(const SampledMap& map, const BoxPartition& part,
                                       int samples_per_cell, std::uint64_t seed);

// Plain adjacency-list text export: one line "i: j k l" per cell.
void export_graph(const TransitionGraph& g, const std::string& path);

struct TransitivityResult {
    TVerdict verdict = TVerdict::Inconclusive;
    long witness_a = -1, witness_b = -1;  // mutually unreachable pair for "no"
    std::string note;
};

// Yes iff the graph restricted to non-exterior cells is strongly connected;
// no iff two cells are mutually unreachable with all samples retained.
TransitivityResult is_transitive(const TransitionGraph& g);

struct MixingResult {
    TVerdict verdict = TVerdict::Inconclusive;
    int period = 0;       // detected graph period (0 = not computed)
    long positive_at = -1;  // first checked power with A^T all-positive
    std::string note;
};

// Strong connectivity + aperiodicity, confirmed by boolean power positivity at
// powers of two up to the horizon; "no positivity within horizon" is a no.
MixingResult is_mixing(const TransitionGraph& g, long horizon);

// Flow map for the dividing-set obstruction: integrates a vector field.
using FlowField = std::function<std::vector<double>(const std::vector<double>&)>;

struct DividingWitness {
    std::vector<std::vector<double>> patch_a, patch_b;  // seeds of U and V on Gamma
    std::vector<int> crossings;                         // per sampled orbit
    int max_crossings = 0;
    double t_horizon = 0;
};

// If every sampled orbit crosses {gamma = 0} at most once (monotonically),
// returns the witness; otherwise nullopt (with the violating orbit recorded
// via `violator`).
std::optional<DividingWitness> dividing_obstruction(
    const FlowField& field, const std::function<double(const std::vector<double>&)>& gamma_fn,
    const std::vector<std::vector<double>>& samples, double t_horizon, double dt,
    std::vector<std::vector<double>>* violator = nullptr);

}  // namespace cbl
