#pragma once

// Contiguous vector partitioned into blocks. The layout is immutable and
// shared; block views are spans into one flat buffer so that whole-vector
// and per-block arithmetic never copy.

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sfw {

class BlockLayout {
 public:
  explicit BlockLayout(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw std::invalid_argument("BlockLayout: needs at least one block");
    offsets_.reserve(sizes_.size());
    for (int s : sizes_) {
      if (s <= 0) throw std::invalid_argument("BlockLayout: block sizes must be positive");
      offsets_.push_back(total_);
      total_ += s;
    }
  }

  static std::shared_ptr<const BlockLayout> make(std::vector<int> sizes) {
    return std::make_shared<const BlockLayout>(std::move(sizes));
  }

  // m blocks of equal size l.
  static std::shared_ptr<const BlockLayout> uniform(int block_size, int num_blocks) {
    return make(std::vector<int>(static_cast<std::size_t>(num_blocks), block_size));
  }

  int num_blocks() const { return static_cast<int>(sizes_.size()); }
  int total() const { return total_; }
  int size(int i) const { check(i); return sizes_[static_cast<std::size_t>(i)]; }
  int offset(int i) const { check(i); return offsets_[static_cast<std::size_t>(i)]; }

  friend bool operator==(const BlockLayout& a, const BlockLayout& b) {
    return a.sizes_ == b.sizes_;
  }

 private:
  void check(int i) const {
    if (i < 0 || i >= num_blocks()) throw std::out_of_range("BlockLayout: block index");
  }

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
};

using LayoutPtr = std::shared_ptr<const BlockLayout>;

inline bool same_layout(const LayoutPtr& a, const LayoutPtr& b) {
  return a == b || (a && b && *a == *b);
}

class BlockVector {
 public:
  BlockVector() = default;

  explicit BlockVector(LayoutPtr layout, double fill = 0.0)
      : layout_(std::move(layout)),
        data_(layout_ ? static_cast<std::size_t>(layout_->total()) : 0, fill) {}

  BlockVector(LayoutPtr layout, std::vector<double> data)
      : layout_(std::move(layout)), data_(std::move(data)) {
    if (!layout_ || static_cast<int>(data_.size()) != layout_->total())
      throw std::invalid_argument("BlockVector: data length does not match layout");
  }

  const LayoutPtr& layout() const { return layout_; }
  int size() const { return static_cast<int>(data_.size()); }
  int num_blocks() const { return layout_ ? layout_->num_blocks() : 0; }

  std::span<double> block(int i) {
    return {data_.data() + layout_->offset(i), static_cast<std::size_t>(layout_->size(i))};
  }
  std::span<const double> block(int i) const {
    return {data_.data() + layout_->offset(i), static_cast<std::size_t>(layout_->size(i))};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double& operator[](int j) { return data_[static_cast<std::size_t>(j)]; }
  double operator[](int j) const { return data_[static_cast<std::size_t>(j)]; }

  friend bool operator==(const BlockVector& a, const BlockVector& b) {
    return same_layout(a.layout_, b.layout_) && a.data_ == b.data_;
  }

 private:
  LayoutPtr layout_;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double dot(const BlockVector& u, const BlockVector& v) {
  if (!same_layout(u.layout(), v.layout()))
    throw std::invalid_argument("dot: layout mismatch");
  return dot(std::span<const double>(u.data()), std::span<const double>(v.data()));
}

inline double block_dot(const BlockVector& u, const BlockVector& v, int i) {
  if (!same_layout(u.layout(), v.layout()))
    throw std::invalid_argument("block_dot: layout mismatch");
  return dot(u.block(i), v.block(i));
}

inline double norm2(const BlockVector& v) {
  return norm2(std::span<const double>(v.data()));
}

// Concatenates per-block slices back into one vector; the inverse of reading
// the block views of a vector with the same layout.
inline BlockVector assemble(LayoutPtr layout, const std::vector<std::vector<double>>& blocks) {
  if (!layout || static_cast<int>(blocks.size()) != layout->num_blocks())
    throw std::invalid_argument("assemble: block count does not match layout");
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(layout->total()));
  for (int i = 0; i < layout->num_blocks(); ++i) {
    if (static_cast<int>(blocks[static_cast<std::size_t>(i)].size()) != layout->size(i))
      throw std::invalid_argument("assemble: block length does not match layout");
    const auto& blk = blocks[static_cast<std::size_t>(i)];
    data.insert(data.end(), blk.begin(), blk.end());
  }
  return BlockVector(std::move(layout), std::move(data));
}

}  // namespace sfw
