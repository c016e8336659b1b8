#include "fracprox/block_vector.hpp"

#include "fracprox/error.hpp"

#include <cmath>
#include <string>

namespace fracprox {

BlockVector::BlockVector(std::vector<Vector> blocks)
    : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) total_dim_ += static_cast<std::size_t>(b.size());
}

BlockVector BlockVector::zeros(const std::vector<std::size_t>& dims) {
  std::vector<Vector> blocks;
  blocks.reserve(dims.size());
  for (auto d : dims) blocks.push_back(Vector::Zero(static_cast<Eigen::Index>(d)));
  return BlockVector(std::move(blocks));
}

BlockVector BlockVector::unflatten(const Vector& flat,
                                   const std::vector<std::size_t>& dims) {
  std::size_t total = 0;
  for (auto d : dims) total += d;
  if (total != static_cast<std::size_t>(flat.size())) {
    throw Error(ErrorCode::DimensionMismatch,
                "flat vector has " + std::to_string(flat.size()) +
                    " entries, layout needs " + std::to_string(total));
  }
  std::vector<Vector> blocks;
  blocks.reserve(dims.size());
  Eigen::Index offset = 0;
  for (auto d : dims) {
    const auto n = static_cast<Eigen::Index>(d);
    blocks.push_back(flat.segment(offset, n));
    offset += n;
  }
  return BlockVector(std::move(blocks));
}

std::vector<std::size_t> BlockVector::dims() const {
  std::vector<std::size_t> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(static_cast<std::size_t>(b.size()));
  return out;
}

void BlockVector::set_block(std::size_t i, const Vector& value) {
  if (blocks_.at(i).size() != value.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "block size " + std::to_string(value.size()) + " != " +
                    std::to_string(blocks_[i].size()),
                static_cast<int>(i));
  }
  blocks_[i] = value;
}

Vector BlockVector::flatten() const {
  Vector out(static_cast<Eigen::Index>(total_dim_));
  Eigen::Index offset = 0;
  for (const auto& b : blocks_) {
    out.segment(offset, b.size()) = b;
    offset += b.size();
  }
  return out;
}

bool BlockVector::all_finite() const {
  for (const auto& b : blocks_)
    if (!b.allFinite()) return false;
  return true;
}

bool BlockVector::same_layout(const BlockVector& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].size() != other.blocks_[i].size()) return false;
  return true;
}

double BlockVector::squared_distance(const BlockVector& other) const {
  if (!same_layout(other)) {
    throw Error(ErrorCode::DimensionMismatch, "block layouts differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    acc += (blocks_[i] - other.blocks_[i]).squaredNorm();
  return acc;
}

double BlockVector::distance(const BlockVector& other) const {
  return std::sqrt(squared_distance(other));
}

}  // namespace fracprox
