#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace fracprox {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Partitioned decision variable x = (x_1, ..., x_m). The block layout is
/// fixed at construction; block contents may be overwritten in place but
/// never resized.
class BlockVector {
 public:
  BlockVector() = default;
  explicit BlockVector(std::vector<Vector> blocks);

  /// All-zero vector with the given block dimensions.
  static BlockVector zeros(const std::vector<std::size_t>& dims);
  /// Inverse of flatten(); throws DimensionMismatch if sizes disagree.
  static BlockVector unflatten(const Vector& flat,
                               const std::vector<std::size_t>& dims);

  std::size_t num_blocks() const { return blocks_.size(); }
  std::size_t total_dim() const { return total_dim_; }
  std::vector<std::size_t> dims() const;

  const Vector& block(std::size_t i) const { return blocks_.at(i); }
  /// Replaces block i; throws DimensionMismatch if the size changes.
  void set_block(std::size_t i, const Vector& value);

  Vector flatten() const;
  bool all_finite() const;

  double squared_distance(const BlockVector& other) const;
  double distance(const BlockVector& other) const;

  bool same_layout(const BlockVector& other) const;

 private:
  std::vector<Vector> blocks_;
  std::size_t total_dim_ = 0;
};

}  // namespace fracprox
