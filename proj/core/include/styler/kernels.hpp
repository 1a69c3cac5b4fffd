#pragma once

#include <cmath>

#include "styler/tensor.hpp"

namespace styler::kernels {

// C = op(A) * op(B) for 2-D tensors; op transposes when the flag is set.
template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b, bool ta, bool tb) {
  require(a.rank() == 2 && b.rank() == 2, ErrorKind::kShape, "matmul expects 2-D tensors");
  int m = ta ? a.shape[1] : a.shape[0];
  int k = ta ? a.shape[0] : a.shape[1];
  int kb = tb ? b.shape[1] : b.shape[0];
  int n = tb ? b.shape[0] : b.shape[1];
  require(k == kb, ErrorKind::kShape, "matmul: inner dimensions disagree");

  TensorT<T> c({m, n});
  if (!ta && !tb) {
    for (int i = 0; i < m; ++i) {
      for (int p = 0; p < k; ++p) {
        T av = a.at(i, p);
        const T* brow = &b.data[size_t(p) * n];
        T* crow = &c.data[size_t(i) * n];
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  } else if (!ta && tb) {
    for (int i = 0; i < m; ++i) {
      const T* arow = &a.data[size_t(i) * k];
      for (int j = 0; j < n; ++j) {
        const T* brow = &b.data[size_t(j) * k];
        T acc = T(0);
        for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
        c.at(i, j) = acc;
      }
    }
  } else if (ta && !tb) {
    for (int p = 0; p < k; ++p) {
      const T* arow = &a.data[size_t(p) * m];
      const T* brow = &b.data[size_t(p) * n];
      for (int i = 0; i < m; ++i) {
        T av = arow[i];
        T* crow = &c.data[size_t(i) * n];
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  } else {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        T acc = T(0);
        for (int p = 0; p < k; ++p) acc += a.at(p, i) * b.at(j, p);
        c.at(i, j) = acc;
      }
    }
  }
  return c;
}

// Batched matmul over the leading dimension of 3-D tensors.
template <typename T>
TensorT<T> bmm(const TensorT<T>& a, const TensorT<T>& b, bool ta, bool tb) {
  require(a.rank() == 3 && b.rank() == 3 && a.shape[0] == b.shape[0], ErrorKind::kShape,
          "bmm expects 3-D tensors with matching batch");
  int batch = a.shape[0];
  int m = ta ? a.shape[2] : a.shape[1];
  int k = ta ? a.shape[1] : a.shape[2];
  int kb = tb ? b.shape[2] : b.shape[1];
  int n = tb ? b.shape[1] : b.shape[2];
  require(k == kb, ErrorKind::kShape, "bmm: inner dimensions disagree");

  TensorT<T> c({batch, m, n});
  for (int h = 0; h < batch; ++h) {
    TensorT<T> as({ta ? k : m, ta ? m : k});
    TensorT<T> bs({tb ? n : k, tb ? k : n});
    std::copy(a.data.begin() + size_t(h) * as.numel(),
              a.data.begin() + size_t(h + 1) * as.numel(), as.data.begin());
    std::copy(b.data.begin() + size_t(h) * bs.numel(),
              b.data.begin() + size_t(h + 1) * bs.numel(), bs.data.begin());
    TensorT<T> cs = matmul(as, bs, ta, tb);
    std::copy(cs.data.begin(), cs.data.end(), c.data.begin() + size_t(h) * cs.numel());
  }
  return c;
}

// Row-wise softmax over the last dimension, max-subtracted.
template <typename T>
TensorT<T> softmax_lastdim(const TensorT<T>& x) {
  int d = x.shape.back();
  int64_t rows = x.numel() / d;
  TensorT<T> y = x;
  for (int64_t r = 0; r < rows; ++r) {
    T* row = &y.data[size_t(r) * d];
    T mx = row[0];
    for (int i = 1; i < d; ++i) mx = std::max(mx, row[i]);
    T sum = T(0);
    for (int i = 0; i < d; ++i) {
      row[i] = std::exp(row[i] - mx);
      sum += row[i];
    }
    for (int i = 0; i < d; ++i) row[i] /= sum;
  }
  return y;
}

template <typename T>
TensorT<T> scale(const TensorT<T>& x, T s) {
  TensorT<T> y = x;
  for (auto& v : y.data) v *= s;
  return y;
}

// (N, H*dh) -> (H, N, dh)
template <typename T>
TensorT<T> split_heads(const TensorT<T>& x, int heads) {
  require(x.rank() == 2 && x.shape[1] % heads == 0, ErrorKind::kShape, "split_heads: bad shape");
  int n = x.shape[0];
  int dh = x.shape[1] / heads;
  TensorT<T> y({heads, n, dh});
  for (int h = 0; h < heads; ++h)
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < dh; ++d) y.at(h, i, d) = x.at(i, h * dh + d);
  return y;
}

// (H, N, dh) -> (N, H*dh)
template <typename T>
TensorT<T> merge_heads(const TensorT<T>& x) {
  require(x.rank() == 3, ErrorKind::kShape, "merge_heads: bad shape");
  int heads = x.shape[0], n = x.shape[1], dh = x.shape[2];
  TensorT<T> y({n, heads * dh});
  for (int h = 0; h < heads; ++h)
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < dh; ++d) y.at(i, h * dh + d) = x.at(h, i, d);
  return y;
}

}  // namespace styler::kernels
