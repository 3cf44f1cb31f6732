#pragma once

#include <Eigen/Core>

namespace invrig {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;

/// Activation weights, one per blendshape.
using WeightVector = Eigen::VectorXd;

/// A vertex cloud stored as a flat (x0, y0, z0, x1, ...) vector of length 3n.
/// Coordinates are in centimeters. Construction rejects non-finite entries.
class Mesh {
 public:
  Mesh() = default;
  explicit Mesh(Vector coords);

  static Mesh zeros(Index vertex_count);

  Index vertex_count() const { return coords_.size() / 3; }
  Index size() const { return coords_.size(); }
  const Vector& coords() const { return coords_; }

  Eigen::Vector3d vertex(Index v) const { return coords_.segment<3>(3 * v); }

  friend bool operator==(const Mesh& a, const Mesh& b) {
    return a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
  }

 private:
  Vector coords_;
};

}  // namespace invrig
