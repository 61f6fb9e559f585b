#pragma once

#include <vector>

#include "kramers/core.hpp"
#include "kramers/critical.hpp"
#include "kramers/domain.hpp"
#include "kramers/field.hpp"
#include "kramers/grid.hpp"

namespace kramers {

// Grid graph carrying the degenerate path metric: edge weight is the
// trapezoid line integral of |grad f| along the straight edge.
struct AgmonGraph {
    int dim = 1;
    std::vector<Pt> xs;
    std::vector<double> fvals;
    std::vector<double> gnorm;  // |grad f| at each node
    // adjacency in CSR layout; every edge appears in both directions
    std::vector<int> offsets;
    std::vector<int> targets;
    std::vector<double> weights;

    int size() const { return (int)xs.size(); }
};

// use_diagonals adds the 2D diagonal neighbors (ignored in 1D)
AgmonGraph agmon_graph(const ScalarField& f, const Grid& grid,
                       bool use_diagonals);

// single run of multi-source Dijkstra; unreachable nodes hold +infinity
std::vector<double> agmon_distance_field(const AgmonGraph& g,
                                         const std::vector<int>& sources);

double agmon_distance(const AgmonGraph& g, const std::vector<int>& sources,
                      const std::vector<int>& targets);

// all-pairs reference; quadratic memory, test-scale graphs only
std::vector<std::vector<double>> agmon_all_pairs(const AgmonGraph& g);

// rounds every weight to an integer multiple of quantum so that path sums
// are exact in double arithmetic (test helper for the all-pairs comparison)
void snap_weights(AgmonGraph& g, double quantum);

int nearest_node(const AgmonGraph& g, const Pt& x);

struct AgmonConditionResult {
    bool ok = false;
    double lhs = 0.0;  // Agmon distance from the inner boundary to the minima
    double rhs = 0.0;  // max over saddle-minus-minimum value gaps
    bool heuristic = false;  // critical structure was degenerate
    std::vector<Pt> minima;
    std::vector<Pt> saddles;
};

// evaluates lhs > rhs + margin on a grid of the inner domain at spacing dx
AgmonConditionResult check_agmon_condition(const ScalarField& f,
                                           const DomainPair& pair, double dx,
                                           double margin = 0.0);

}  // namespace kramers
