#include "interlock/controls.hpp"

#include <cmath>

namespace interlock {

std::vector<std::pair<std::string, const DyadMatrix*>> ControlSet::available() const {
    std::vector<std::pair<std::string, const DyadMatrix*>> out;
    if (sector) out.emplace_back("sector", &*sector);
    if (price) out.emplace_back("price", &*price);
    if (board_size) out.emplace_back("board_size", &*board_size);
    if (expertise) out.emplace_back("expertise", &*expertise);
    if (geography) out.emplace_back("geography", &*geography);
    return out;
}

std::vector<std::pair<std::string, const DyadMatrix*>> ControlSet::usable() const {
    auto out = available();
    std::erase_if(out, [&](const auto& entry) {
        for (const auto& name : degenerate)
            if (name == entry.first) return true;
        return false;
    });
    return out;
}

namespace controls {

DyadMatrix sector_matrix(const std::vector<std::string>& ids,
                         const std::vector<std::string>& sectors) {
    if (ids.size() != sectors.size()) throw Error("sector matrix: id and sector counts differ");
    DyadMatrix f(ids, 1.0);
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            f.set(i, j, sectors[i] == sectors[j] ? 1.0 : 0.0);
    return f;
}

namespace {

NormalizedResult normalize_gaps(DyadMatrix gaps) {
    const std::size_t n = gaps.size();
    double kmin = std::numeric_limits<double>::infinity();
    double kmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double k = gaps(i, j);
            kmin = std::min(kmin, k);
            kmax = std::max(kmax, k);
        }
    NormalizedResult result{DyadMatrix(gaps.ids(), 1.0), false};
    if (n < 2 || kmax == kmin) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) result.matrix.set(i, j, 1.0);
        result.degenerate = true;
        return result;
    }
    const double span = kmax - kmin;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            result.matrix.set(i, j, (kmax - gaps(i, j)) / span);
    return result;
}

}  // namespace

NormalizedResult normalized_inverse_diff(const std::vector<std::string>& ids,
                                         const std::vector<double>& values) {
    if (ids.size() != values.size())
        throw Error("normalized proximity: id and value counts differ");
    DyadMatrix gaps(ids, 0.0);
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            gaps.set(i, j, std::abs(values[i] - values[j]));
    return normalize_gaps(std::move(gaps));
}

NormalizedResult normalized_from_gaps(const DyadMatrix& gaps) { return normalize_gaps(gaps); }

double geo_distance_km(double lat_a, double lon_a, double lat_b, double lon_b) {
    constexpr double kEarthRadiusKm = 6371.0;
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
    double phi_a = lat_a * kDegToRad;
    double phi_b = lat_b * kDegToRad;
    double dphi = (lat_b - lat_a) * kDegToRad;
    double dlambda = (lon_b - lon_a) * kDegToRad;
    double s = std::sin(dphi / 2);
    double t = std::sin(dlambda / 2);
    double h = s * s + std::cos(phi_a) * std::cos(phi_b) * t * t;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

ControlSet build_controls(const std::vector<NodeAttributes>& nodes, Findings* audit) {
    ControlSet set;
    set.ids.reserve(nodes.size());
    std::vector<std::string> sectors;
    std::vector<double> prices, boards, experts;
    bool all_coords = !nodes.empty();
    for (const auto& node : nodes) {
        set.ids.push_back(node.id);
        sectors.push_back(node.sector);
        prices.push_back(node.mean_log_price);
        boards.push_back(node.board_size);
        experts.push_back(node.expert_fraction);
        if (!node.latitude || !node.longitude) all_coords = false;
    }

    set.sector = sector_matrix(set.ids, sectors);

    auto add = [&](const char* name, NormalizedResult result, std::optional<DyadMatrix>& slot) {
        if (result.degenerate) {
            set.degenerate.push_back(name);
            if (audit)
                audit->push_back({Finding::Severity::warning, name,
                                  "no variation across dyads, control set to all ones and "
                                  "dropped from partial correlations"});
        }
        slot = std::move(result.matrix);
    };
    add("price", normalized_inverse_diff(set.ids, prices), set.price);
    add("board_size", normalized_inverse_diff(set.ids, boards), set.board_size);
    add("expertise", normalized_inverse_diff(set.ids, experts), set.expertise);

    if (all_coords) {
        DyadMatrix gaps(set.ids, 0.0);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t j = i + 1; j < nodes.size(); ++j)
                gaps.set(i, j, geo_distance_km(*nodes[i].latitude, *nodes[i].longitude,
                                               *nodes[j].latitude, *nodes[j].longitude));
        add("geography", normalize_gaps(std::move(gaps)), set.geography);
    } else if (audit) {
        audit->push_back({Finding::Severity::warning, "geography",
                          "coordinates missing for at least one corporation, control dropped"});
    }

    // The sector indicator degenerates when every dyad agrees (one sector
    // shared by all, or no sector shared by any pair).
    auto upper = set.sector->upper_values();
    bool sector_varies = false;
    for (std::size_t k = 1; k < upper.size() && !sector_varies; ++k)
        if (upper[k] != upper[0]) sector_varies = true;
    if (!sector_varies && !upper.empty()) {
        set.degenerate.insert(set.degenerate.begin(), "sector");
        if (audit)
            audit->push_back({Finding::Severity::warning, "sector",
                              "no variation across dyads, control dropped from partial "
                              "correlations"});
    }
    return set;
}

}  // namespace controls

}  // namespace interlock
