#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "styler/error.hpp"

namespace styler {

// Dense row-major tensor of rank 1..4. Value semantics throughout; all
// diffusion state and model weights are TensorT<float>, the double
// instantiation exists for finite-difference shadow evaluation in tests.
template <typename T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<int> s) : shape(std::move(s)) {
    data.assign(size_t(numel()), T(0));
  }

  static TensorT zeros(std::vector<int> s) { return TensorT(std::move(s)); }

  static TensorT full(std::vector<int> s, T v) {
    TensorT t(std::move(s));
    for (auto& x : t.data) x = v;
    return t;
  }

  int64_t numel() const {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return shape.empty() ? 0 : n;
  }

  int rank() const { return int(shape.size()); }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }

  T& at(int i) { return data[size_t(i)]; }
  T at(int i) const { return data[size_t(i)]; }
  T& at(int i, int j) { return data[size_t(i) * shape[1] + j]; }
  T at(int i, int j) const { return data[size_t(i) * shape[1] + j]; }
  T& at(int i, int j, int k) {
    return data[(size_t(i) * shape[1] + j) * shape[2] + k];
  }
  T at(int i, int j, int k) const {
    return data[(size_t(i) * shape[1] + j) * shape[2] + k];
  }
  T& at(int i, int j, int k, int l) {
    return data[((size_t(i) * shape[1] + j) * shape[2] + k) * shape[3] + l];
  }
  T at(int i, int j, int k, int l) const {
    return data[((size_t(i) * shape[1] + j) * shape[2] + k) * shape[3] + l];
  }

  bool all_finite() const {
    for (T v : data) {
      if (!std::isfinite(double(v))) return false;
    }
    return true;
  }

  bool bit_equal(const TensorT& o) const {
    if (shape != o.shape) return false;
    for (size_t i = 0; i < data.size(); ++i) {
      if (data[i] != o.data[i]) return false;
      // distinguish -0 from +0 and treat NaN != NaN as inequality
      if (std::signbit(double(data[i])) != std::signbit(double(o.data[i]))) return false;
    }
    return true;
  }

  template <typename U>
  TensorT<U> cast() const {
    TensorT<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = U(data[i]);
    return out;
  }
};

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

template <typename T>
T max_abs_diff(const TensorT<T>& a, const TensorT<T>& b) {
  require(a.shape == b.shape, ErrorKind::kShape, "max_abs_diff: shape mismatch");
  T m = T(0);
  for (size_t i = 0; i < a.data.size(); ++i) {
    T d = std::abs(a.data[i] - b.data[i]);
    if (d > m) m = d;
  }
  return m;
}

template <typename T>
T mean_abs_diff(const TensorT<T>& a, const TensorT<T>& b) {
  require(a.shape == b.shape, ErrorKind::kShape, "mean_abs_diff: shape mismatch");
  if (a.data.empty()) return T(0);
  double s = 0;
  for (size_t i = 0; i < a.data.size(); ++i) s += std::abs(double(a.data[i]) - double(b.data[i]));
  return T(s / double(a.data.size()));
}

}  // namespace styler
