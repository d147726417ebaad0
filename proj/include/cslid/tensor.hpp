// cslid/tensor.hpp -- dense row-major tensor over a scalar type.
#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cslid {

using Index = std::int64_t;

template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<Index> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<std::size_t>(numel_of(shape_)), T(0));
  }
  Tensor(std::vector<Index> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<Index>(data_.size()) != numel_of(shape_))
      throw std::invalid_argument("tensor: shape/data size mismatch");
  }

  static Tensor vector(std::vector<T> data) {
    Index n = static_cast<Index>(data.size());
    return Tensor({n}, std::move(data));
  }

  const std::vector<Index>& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index numel() const { return static_cast<Index>(data_.size()); }
  Index dim(std::size_t i) const { return shape_.at(i); }
  Index rows() const { return shape_.at(0); }
  Index cols() const { return shape_.at(1); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](Index i) { return data_[static_cast<std::size_t>(i)]; }
  const T& operator[](Index i) const { return data_[static_cast<std::size_t>(i)]; }

  T& operator()(Index r, Index c) {
    assert(rank() == 2);
    return data_[static_cast<std::size_t>(r * shape_[1] + c)];
  }
  const T& operator()(Index r, Index c) const {
    assert(rank() == 2);
    return data_[static_cast<std::size_t>(r * shape_[1] + c)];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  bool all_finite() const {
    for (const T& v : data_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape_);
    for (Index i = 0; i < numel(); ++i) out[i] = static_cast<U>(data_[static_cast<std::size_t>(i)]);
    return out;
  }

  static Index numel_of(const std::vector<Index>& shape) {
    Index n = 1;
    for (Index d : shape) {
      if (d < 0) throw std::invalid_argument("tensor: negative dimension");
      n *= d;
    }
    return n;
  }

 private:
  std::vector<Index> shape_;
  std::vector<T> data_;
};

// In-place axpy over whole tensors: dst += scale * src.
template <typename T>
void axpy(Tensor<T>& dst, const Tensor<T>& src, T scale = T(1)) {
  assert(dst.same_shape(src));
  for (Index i = 0; i < dst.numel(); ++i) dst[i] += scale * src[i];
}

template <typename T>
double squared_norm(const Tensor<T>& t) {
  double s = 0;
  for (Index i = 0; i < t.numel(); ++i) s += double(t[i]) * double(t[i]);
  return s;
}

}  // namespace cslid
