#pragma once

// Abelian integrals by term-wise integration of the pole-orbit series, and
// boundary-circle periods by trapezoidal quadrature.

#include <optional>
#include <span>
#include <vector>

#include "schottky/series.hpp"

namespace schottky {

/// Polyline in the closed fundamental domain; no segment enters an open disk.
class IntegrationPath {
public:
    /// Validates every segment against the disks of `group` (InvalidArgument).
    IntegrationPath(const SchottkyGroup& group, std::vector<Complex> waypoints);

    const std::vector<Complex>& waypoints() const { return waypoints_; }
    Complex from() const { return waypoints_.front(); }
    Complex to() const { return waypoints_.back(); }
    IntegrationPath reversed() const;

private:
    IntegrationPath() = default;
    std::vector<Complex> waypoints_;
};

/// min over disks of (distance from the segment to the centre) - radius.
double segment_clearance(const SchottkyGroup& group, Complex p, Complex q);

/// Straight segment when it stays outside every open disk; otherwise the
/// shortest route through a visibility graph on polygons circumscribing the
/// disks inflated by 10%. Throws PathPlanning, with the disk geometry in the
/// message, when no route exists.
IntegrationPath plan_path(const SchottkyGroup& group, Complex from, Complex to);

/// Term-wise closed-form integral: for every pole pair, log((x - a)/(x - b))
/// between consecutive waypoints, continued along the path. A segment is
/// halved until every per-factor argument change is below pi/2
/// (BranchTracking after 48 halvings).
Complex integrate(const Differential& d, const IntegrationPath& path);

/// Integral over the image m(gamma): the same primitives evaluated along gamma
/// with poles pulled back by m^-1, so branches follow m(gamma) exactly.
Complex integrate_image(const Differential& d, const MoebiusMap& m, const IntegrationPath& path);

struct APeriods {
    std::vector<Complex> values;  // one per boundary circle dD_k
    int nodes = 0;                // final node count per circle
    double last_change = 0.0;     // relative change at the final doubling
    bool converged = true;
    std::vector<std::pair<int, double>> history;  // (nodes, relative change)
};

/// Trapezoidal contour integrals of d over every dD_k in the global
/// orientation. With auto_double, N doubles until the relative change drops
/// below the tolerance or max_nodes is reached (converged = false).
APeriods a_periods(const Differential& d, const QuadratureOptions& opts = {});

struct PeriodMatrix {
    int genus = 0;
    std::vector<Complex> entries;  // row-major b_{js}
    int max_word_len = 0;
    double tail_estimate = 0.0;
    Complex base_point{0.0};

    Complex operator()(int j, int s) const {
        return entries[static_cast<std::size_t>(j * genus + s)];
    }
    double symmetry_residual() const;
};

/// Point in the interior of the fundamental domain above all disks.
Complex default_base_point(const SchottkyGroup& group);

/// dzeta_1..dzeta_g, built concurrently (results independent of threads).
std::vector<Differential> holomorphic_basis(const SchottkyGroup& group, const Truncation& trunc,
                                            int normalization_nodes = 256, int threads = 1);

/// Integral of d from z0 to S_s z0: z0 -> p on dD'_s -> S_s p (planned in
/// the fundamental domain), then back along S_s of the first leg.
Complex b_period(const Differential& d, int s, Complex base_point);

/// b_{js} = b_period(dzeta_j, s, z0).
PeriodMatrix period_matrix(const SchottkyGroup& group, std::span<const Differential> basis,
                           std::optional<Complex> base_point = std::nullopt, int threads = 1);

}  // namespace schottky
