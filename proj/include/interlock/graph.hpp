#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "interlock/dyad_matrix.hpp"
#include "interlock/ingest.hpp"

namespace interlock {

struct Edge {
    std::uint32_t a = 0;  // node indices, a < b
    std::uint32_t b = 0;
    int weight = 0;       // number of shared directors
};

// Interlock network for one year: nodes are corporations, an edge exists
// when two boards share at least one director.
struct YearNetwork {
    int year = 0;
    std::vector<std::string> nodes;                     // index -> corporation ID, sorted
    std::vector<Edge> edges;                            // sorted by (a, b)
    std::vector<std::vector<std::uint32_t>> adjacency;  // sorted neighbor lists
    std::vector<int> interlocker_counts;                // distinct shared directors per node

    std::size_t size() const { return nodes.size(); }
    std::optional<std::uint32_t> index_of(const std::string& corp) const;
};

namespace graph {

YearNetwork build_network(const YearDataset& dataset);

// Unweighted shortest-path hop counts by BFS from every node. Diagonal 0,
// disconnected pairs hold the infinity sentinel.
DyadMatrix all_pairs_distances(const YearNetwork& net);

// D = 1/d off-diagonal, 0 where d is infinite; diagonal pinned to 1 and
// never read by any dyadic statistic.
DyadMatrix proximity_matrix(const DyadMatrix& distances);

// Per-node mean of the proximity row excluding the diagonal.
std::vector<double> centrality(const DyadMatrix& proximity);

int interlocker_count(const YearNetwork& net, std::uint32_t node);

struct NetworkSummary {
    int year = 0;
    std::size_t corporations = 0;
    std::size_t links = 0;
    double median_board_size = 0.0;
    double isolated_fraction = 0.0;
    std::optional<double> single_director_link_fraction;  // absent without links
    std::optional<double> cross_sector_link_fraction;     // absent without links
    std::optional<double> mean_finite_distance;           // over connected pairs only
    std::optional<double> positive_return_fraction;       // absent without price data
};

NetworkSummary network_summary(const YearNetwork& net, const DyadMatrix& distances,
                               const YearDataset& dataset);

// corp_a,corp_b,shared_directors rows in edge order.
void write_edges(std::ostream& out, const YearNetwork& net);

}  // namespace graph

}  // namespace interlock
