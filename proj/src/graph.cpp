#include "interlock/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "interlock/csv.hpp"

namespace interlock {

std::optional<std::uint32_t> YearNetwork::index_of(const std::string& corp) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), corp);
    if (it == nodes.end() || *it != corp) return std::nullopt;
    return std::uint32_t(it - nodes.begin());
}

namespace graph {

YearNetwork build_network(const YearDataset& dataset) {
    if (dataset.boards.empty()) throw Error("cannot build a network without board records");

    YearNetwork net;
    net.year = dataset.year;
    net.nodes.reserve(dataset.boards.size());
    for (const auto& board : dataset.boards) net.nodes.push_back(board.corporation);

    std::map<std::string, std::vector<std::uint32_t>> boards_of_director;
    for (std::uint32_t i = 0; i < net.nodes.size(); ++i)
        for (const auto& director : dataset.boards[i].directors)
            boards_of_director[director].push_back(i);

    net.interlocker_counts.assign(net.size(), 0);
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> weights;
    for (const auto& [director, members] : boards_of_director) {
        (void)director;
        if (members.size() < 2) continue;
        for (std::uint32_t i : members) ++net.interlocker_counts[i];
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b)
                ++weights[{members[a], members[b]}];
    }

    net.edges.reserve(weights.size());
    net.adjacency.assign(net.size(), {});
    for (const auto& [pair, weight] : weights) {
        net.edges.push_back({pair.first, pair.second, weight});
        net.adjacency[pair.first].push_back(pair.second);
        net.adjacency[pair.second].push_back(pair.first);
    }
    for (auto& neighbors : net.adjacency) std::sort(neighbors.begin(), neighbors.end());
    return net;
}

DyadMatrix all_pairs_distances(const YearNetwork& net) {
    const std::size_t n = net.size();
    DyadMatrix dist(net.nodes, 0.0);
    const double inf = DyadMatrix::infinite_distance();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dist.set(i, j, inf);

    std::vector<std::int32_t> hops(n);
    std::vector<std::uint32_t> queue(n);
    for (std::uint32_t source = 0; source < n; ++source) {
        std::fill(hops.begin(), hops.end(), -1);
        hops[source] = 0;
        std::size_t head = 0, tail = 0;
        queue[tail++] = source;
        while (head < tail) {
            std::uint32_t u = queue[head++];
            for (std::uint32_t v : net.adjacency[u]) {
                if (hops[v] >= 0) continue;
                hops[v] = hops[u] + 1;
                queue[tail++] = v;
            }
        }
        for (std::uint32_t j = source + 1; j < n; ++j)
            if (hops[j] > 0) dist.set(source, j, double(hops[j]));
    }
    return dist;
}

DyadMatrix proximity_matrix(const DyadMatrix& distances) {
    const std::size_t n = distances.size();
    DyadMatrix proximity(distances.ids(), 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = distances(i, j);
            proximity.set(i, j, std::isinf(d) ? 0.0 : 1.0 / d);
        }
    return proximity;
}

std::vector<double> centrality(const DyadMatrix& proximity) {
    const std::size_t n = proximity.size();
    if (n < 2) throw Error("centrality needs at least two corporations");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum += proximity(i, j);
        out[i] = sum / double(n - 1);
    }
    return out;
}

int interlocker_count(const YearNetwork& net, std::uint32_t node) {
    return net.interlocker_counts.at(node);
}

NetworkSummary network_summary(const YearNetwork& net, const DyadMatrix& distances,
                               const YearDataset& dataset) {
    NetworkSummary summary;
    summary.year = net.year;
    summary.corporations = net.size();
    summary.links = net.edges.size();

    std::vector<std::size_t> sizes;
    sizes.reserve(dataset.boards.size());
    for (const auto& board : dataset.boards) sizes.push_back(board.board_size());
    std::sort(sizes.begin(), sizes.end());
    if (!sizes.empty()) {
        std::size_t m = sizes.size();
        summary.median_board_size =
            m % 2 ? double(sizes[m / 2]) : (double(sizes[m / 2 - 1]) + double(sizes[m / 2])) / 2.0;
    }

    std::size_t isolated = 0;
    for (const auto& neighbors : net.adjacency)
        if (neighbors.empty()) ++isolated;
    summary.isolated_fraction = net.size() ? double(isolated) / double(net.size()) : 0.0;

    if (!net.edges.empty()) {
        std::size_t single = 0, cross = 0;
        for (const auto& edge : net.edges) {
            if (edge.weight == 1) ++single;
            const auto& sa = dataset.meta.at(net.nodes[edge.a]).sector;
            const auto& sb = dataset.meta.at(net.nodes[edge.b]).sector;
            if (sa != sb) ++cross;
        }
        summary.single_director_link_fraction = double(single) / double(net.edges.size());
        summary.cross_sector_link_fraction = double(cross) / double(net.edges.size());
    }

    double finite_sum = 0.0;
    std::size_t finite_pairs = 0;
    for (std::size_t i = 0; i < distances.size(); ++i)
        for (std::size_t j = i + 1; j < distances.size(); ++j) {
            double d = distances(i, j);
            if (!std::isinf(d)) {
                finite_sum += d;
                ++finite_pairs;
            }
        }
    if (finite_pairs) summary.mean_finite_distance = finite_sum / double(finite_pairs);

    std::size_t priced = 0, positive = 0;
    for (const auto& [corp, meta] : dataset.meta) {
        (void)corp;
        auto it = dataset.prices.find(meta.ticker);
        if (it == dataset.prices.end() || it->second.observations.size() < 2) continue;
        ++priced;
        if (it->second.observations.back().close > it->second.observations.front().close)
            ++positive;
    }
    if (priced) summary.positive_return_fraction = double(positive) / double(priced);

    return summary;
}

void write_edges(std::ostream& out, const YearNetwork& net) {
    CsvWriter writer(out);
    writer.write_row({"corp_a", "corp_b", "shared_directors"});
    for (const Edge& e : net.edges)
        writer.write_row({net.nodes[e.a], net.nodes[e.b], std::to_string(e.weight)});
}

}  // namespace graph

}  // namespace interlock
