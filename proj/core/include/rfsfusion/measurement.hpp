#pragma once

#include <Eigen/Dense>

#include <vector>

namespace rfs {

/// Axis-aligned rectangular surveillance region.
struct Region {
    Eigen::Vector2d lo{0.0, 0.0};
    Eigen::Vector2d hi{0.0, 0.0};

    [[nodiscard]] double area() const {
        return (hi.x() - lo.x()) * (hi.y() - lo.y());
    }
    [[nodiscard]] bool contains(const Eigen::Vector2d& p) const {
        return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
    }
};

/// One sensor scan: the set of 2-D point measurements at a time step.
struct MeasurementScan {
    int step = 0;
    std::vector<Eigen::Vector2d> points;
};

} // namespace rfs
