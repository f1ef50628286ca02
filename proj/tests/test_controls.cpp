#include <cmath>

#include "doctest.h"
#include "interlock/controls.hpp"
#include "interlock/rng.hpp"

using namespace interlock;

namespace {

std::vector<std::string> names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("C" + std::to_string(i));
    return out;
}

}  // namespace

TEST_CASE("sector matrix is a same-sector indicator") {
    auto m = controls::sector_matrix(names(3), {"technology", "financial", "technology"});
    CHECK(m(0, 1) == 0.0);
    CHECK(m(0, 2) == 1.0);
    CHECK(m(1, 2) == 0.0);

    auto all = controls::sector_matrix(names(3), {"services", "services", "services"});
    CHECK(all(0, 1) == 1.0);
    CHECK(all(0, 2) == 1.0);
    CHECK(all(1, 2) == 1.0);
}

TEST_CASE("normalized inverse diff maps closest to one farthest to zero") {
    auto r = controls::normalized_inverse_diff(names(3), {0.0, 1.0, 2.0});
    CHECK_FALSE(r.degenerate);
    CHECK(r.matrix(0, 1) == 1.0);  // gap 1 = min gap
    CHECK(r.matrix(1, 2) == 1.0);
    CHECK(r.matrix(0, 2) == 0.0);  // gap 2 = max gap
}

TEST_CASE("equal values collapse to the all-ones degenerate matrix") {
    auto r = controls::normalized_inverse_diff(names(4), {5.0, 5.0, 5.0, 5.0});
    CHECK(r.degenerate);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) CHECK(r.matrix(i, j) == 1.0);
}

TEST_CASE("two corporations give the single dyad proximity one") {
    auto r = controls::normalized_inverse_diff(names(2), {1.0, 9.0});
    CHECK(r.degenerate);
    CHECK(r.matrix(0, 1) == 1.0);
}

TEST_CASE("proximity is monotone in the raw gap") {
    Rng rng(42);
    std::vector<double> values;
    for (int i = 0; i < 12; ++i) values.push_back(rng.uniform(0.0, 10.0));
    auto r = controls::normalized_inverse_diff(names(12), values);
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = i + 1; j < 12; ++j)
            for (std::size_t k = 0; k < 12; ++k)
                for (std::size_t l = k + 1; l < 12; ++l) {
                    double gap_ij = std::abs(values[i] - values[j]);
                    double gap_kl = std::abs(values[k] - values[l]);
                    if (gap_ij < gap_kl) CHECK(r.matrix(i, j) >= r.matrix(k, l));
                }
}

TEST_CASE("shifting all values leaves the matrix unchanged") {
    std::vector<double> values = {1.0, 4.0, 2.5, 7.0};
    auto a = controls::normalized_inverse_diff(names(4), values);
    for (auto& v : values) v += 100.0;
    auto b = controls::normalized_inverse_diff(names(4), values);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) CHECK(a.matrix(i, j) == b.matrix(i, j));
}

TEST_CASE("distinct gaps pin exactly one dyad at each extreme") {
    std::vector<double> values = {0.0, 1.0, 3.0, 7.0};
    auto r = controls::normalized_inverse_diff(names(4), values);
    int ones = 0, zeros = 0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            if (r.matrix(i, j) == 1.0) ++ones;
            if (r.matrix(i, j) == 0.0) ++zeros;
        }
    CHECK(ones == 1);
    CHECK(zeros == 1);
}

TEST_CASE("haversine reference distances") {
    CHECK(controls::geo_distance_km(37.0, -122.0, 37.0, -122.0) == 0.0);
    // pole to equator quarter circle
    CHECK(controls::geo_distance_km(90.0, 0.0, 0.0, 0.0) ==
          doctest::Approx(10007.543398).epsilon(1e-6));
    // antipodal points
    CHECK(controls::geo_distance_km(0.0, 0.0, 0.0, 180.0) ==
          doctest::Approx(20015.086796).epsilon(1e-6));
}

TEST_CASE("build controls covers the five matrices") {
    std::vector<NodeAttributes> nodes;
    const char* sectors[] = {"technology", "financial", "technology"};
    for (int i = 0; i < 3; ++i) {
        NodeAttributes n;
        n.id = "C" + std::to_string(i);
        n.sector = sectors[i];
        n.mean_log_price = 4.0 + i;
        n.board_size = 8.0 + i;
        n.expert_fraction = 0.1 * i;
        n.latitude = 30.0 + i;
        n.longitude = -100.0 + i;
        nodes.push_back(std::move(n));
    }
    auto cs = controls::build_controls(nodes);
    CHECK(cs.sector.has_value());
    CHECK(cs.price.has_value());
    CHECK(cs.board_size.has_value());
    CHECK(cs.expertise.has_value());
    CHECK(cs.geography.has_value());
    CHECK(cs.degenerate.empty());
    CHECK(cs.available().size() == 5);
    CHECK(cs.usable().size() == 5);

    // per-dyad oracle on the price control
    std::vector<double> prices = {4.0, 5.0, 6.0};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            double gap = std::abs(prices[i] - prices[j]);
            double want = (2.0 - gap) / (2.0 - 1.0);
            CHECK((*cs.price)(i, j) == doctest::Approx(want));
        }
}

TEST_CASE("missing coordinates drop geography with a warning") {
    std::vector<NodeAttributes> nodes(3);
    for (int i = 0; i < 3; ++i) {
        nodes[i].id = "C" + std::to_string(i);
        nodes[i].sector = "technology";
        nodes[i].mean_log_price = 4.0 + i;
        nodes[i].board_size = 9.0;
        nodes[i].expert_fraction = 0.2;
        if (i != 1) {
            nodes[i].latitude = 30.0 + i;
            nodes[i].longitude = -100.0;
        }
    }
    Findings audit;
    auto cs = controls::build_controls(nodes, &audit);
    CHECK_FALSE(cs.geography.has_value());
    bool warned = false;
    for (const auto& f : audit)
        if (f.severity == Finding::Severity::warning &&
            f.where.find("geography") != std::string::npos)
            warned = true;
    CHECK(warned);
    // all boards identical => board control degenerate, excluded from usable()
    bool board_degenerate = false;
    for (const auto& name : cs.degenerate)
        if (name == "board_size") board_degenerate = true;
    CHECK(board_degenerate);
    CHECK(cs.usable().size() < cs.available().size());
}

TEST_CASE("degenerate sector control is flagged when all sectors match") {
    std::vector<NodeAttributes> nodes(3);
    for (int i = 0; i < 3; ++i) {
        nodes[i].id = "C" + std::to_string(i);
        nodes[i].sector = "services";
        nodes[i].mean_log_price = 4.0 + i;
        nodes[i].board_size = 8.0 + i;
        nodes[i].expert_fraction = 0.1 * i;
    }
    auto cs = controls::build_controls(nodes);
    REQUIRE(cs.sector.has_value());
    bool flagged = false;
    for (const auto& name : cs.degenerate)
        if (name == "sector") flagged = true;
    CHECK(flagged);
    for (const auto& [name, matrix] : cs.usable()) CHECK(name != "sector");
}

TEST_CASE("geography control matches a haversine oracle") {
    Rng rng(88);
    std::vector<NodeAttributes> nodes(6);
    std::vector<std::pair<double, double>> coords;
    for (int i = 0; i < 6; ++i) {
        nodes[i].id = "C" + std::to_string(i);
        nodes[i].sector = "energy";
        nodes[i].mean_log_price = rng.uniform(3.0, 6.0);
        nodes[i].board_size = double(6 + int(rng.below(7)));
        nodes[i].expert_fraction = rng.uniform(0.0, 1.0);
        double lat = rng.uniform(25.0, 49.0), lon = rng.uniform(-124.0, -67.0);
        nodes[i].latitude = lat;
        nodes[i].longitude = lon;
        coords.push_back({lat, lon});
    }
    auto cs = controls::build_controls(nodes);
    REQUIRE(cs.geography.has_value());
    double mx = -1e300, mn = 1e300;
    std::vector<double> gaps;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) {
            double d = controls::geo_distance_km(coords[i].first, coords[i].second,
                                                 coords[j].first, coords[j].second);
            gaps.push_back(d);
            mx = std::max(mx, d);
            mn = std::min(mn, d);
        }
    std::size_t k = 0;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) {
            double want = (mx - gaps[k++]) / (mx - mn);
            CHECK((*cs.geography)(i, j) == doctest::Approx(want).epsilon(1e-12));
        }
}
