#include "invrig/mesh.hpp"

#include <fmt/format.h>

#include "invrig/errors.hpp"

namespace invrig {

Mesh::Mesh(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() % 3 != 0) {
    throw ContractError(
        fmt::format("mesh length {} is not a multiple of 3", coords_.size()));
  }
  if (!coords_.allFinite()) {
    throw ContractError("mesh contains non-finite coordinates");
  }
}

Mesh Mesh::zeros(Index vertex_count) {
  if (vertex_count < 0) throw ContractError("negative vertex count");
  return Mesh(Vector::Zero(3 * vertex_count));
}

}  // namespace invrig
