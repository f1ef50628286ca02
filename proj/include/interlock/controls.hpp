#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "interlock/common.hpp"
#include "interlock/dyad_matrix.hpp"

namespace interlock {

// Per-corporation inputs for the control matrices, aligned with the node
// order of the year's proximity and similarity matrices.
struct NodeAttributes {
    std::string id;
    std::string sector;
    double mean_log_price = 0.0;
    double board_size = 0.0;
    double expert_fraction = 0.0;
    std::optional<double> latitude;
    std::optional<double> longitude;
};

// The five control proximity matrices. `geography` is absent when any node
// lacks coordinates; degenerate matrices (no variation, set to all ones)
// are listed by name and skipped by the partial Mantel.
struct ControlSet {
    std::vector<std::string> ids;
    std::optional<DyadMatrix> sector;
    std::optional<DyadMatrix> price;
    std::optional<DyadMatrix> board_size;
    std::optional<DyadMatrix> expertise;
    std::optional<DyadMatrix> geography;
    std::vector<std::string> degenerate;

    // Present matrices in canonical order.
    std::vector<std::pair<std::string, const DyadMatrix*>> available() const;
    // Present matrices that still vary across dyads.
    std::vector<std::pair<std::string, const DyadMatrix*>> usable() const;
};

namespace controls {

DyadMatrix sector_matrix(const std::vector<std::string>& ids,
                         const std::vector<std::string>& sectors);

struct NormalizedResult {
    DyadMatrix matrix;
    bool degenerate = false;
};

// Maps pairwise gaps k_ij = |v_i - v_j| onto [0, 1] so the closest dyad
// scores 1 and the farthest 0; no variation at all collapses to all ones.
NormalizedResult normalized_inverse_diff(const std::vector<std::string>& ids,
                                         const std::vector<double>& values);

// Same mapping applied to an externally computed gap matrix (geography).
NormalizedResult normalized_from_gaps(const DyadMatrix& gaps);

// Great-circle distance on a spherical Earth, radius 6371 km.
double geo_distance_km(double lat_a, double lon_a, double lat_b, double lon_b);

ControlSet build_controls(const std::vector<NodeAttributes>& nodes, Findings* audit = nullptr);

}  // namespace controls

}  // namespace interlock
