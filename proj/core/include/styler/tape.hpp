#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "styler/kernels.hpp"
#include "styler/tensor.hpp"

namespace styler {

// Reverse-mode tape over TensorT<T>. One tape is built per forward pass;
// training calls backward(), inference just reads node values. Hooks may
// mutate node values in place (val_mut) for capture-free attention/feature
// override, which is only legal on tapes that never run backward.
template <typename T>
class TapeT {
 public:
  using Id = int;

  Id leaf(TensorT<T> v, bool needs_grad = false) {
    return push(std::move(v), needs_grad, {}, nullptr);
  }

  const TensorT<T>& val(Id id) const { return nodes_[size_t(id)].value; }
  TensorT<T>& val_mut(Id id) { return nodes_[size_t(id)].value; }
  bool needs_grad(Id id) const { return nodes_[size_t(id)].needs_grad; }

  TensorT<T>& grad(Id id) {
    Node& n = nodes_[size_t(id)];
    if (n.grad.data.empty()) n.grad = TensorT<T>::zeros(n.value.shape);
    return n.grad;
  }
  bool has_grad(Id id) const { return !nodes_[size_t(id)].grad.data.empty(); }

  // ---- ops ----

  Id add(Id a, Id b) {
    require(val(a).shape == val(b).shape, ErrorKind::kShape, "tape add: shape mismatch");
    TensorT<T> out = val(a);
    const auto& bv = val(b);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += bv.data[i];
    return push(std::move(out), needs_grad(a) || needs_grad(b), {a, b}, [](TapeT& t, Node& n) {
      t.accumulate(n.parents[0], n.grad);
      t.accumulate(n.parents[1], n.grad);
    });
  }

  Id scale(Id a, T s) {
    TensorT<T> out = kernels::scale(val(a), s);
    return push(std::move(out), needs_grad(a), {a}, [s](TapeT& t, Node& n) {
      t.accumulate_scaled(n.parents[0], n.grad, s);
    });
  }

  Id matmul(Id a, Id b, bool ta = false, bool tb = false) {
    TensorT<T> out = kernels::matmul(val(a), val(b), ta, tb);
    return push(std::move(out), needs_grad(a) || needs_grad(b), {a, b},
                [ta, tb](TapeT& t, Node& n) {
                  const auto& g = n.grad;
                  const auto& av = t.val(n.parents[0]);
                  const auto& bv = t.val(n.parents[1]);
                  if (t.needs_grad(n.parents[0])) {
                    TensorT<T> da = !ta ? kernels::matmul(g, bv, false, !tb)
                                        : (!tb ? kernels::matmul(bv, g, false, true)
                                               : kernels::matmul(bv, g, true, true));
                    t.accumulate(n.parents[0], da);
                  }
                  if (t.needs_grad(n.parents[1])) {
                    TensorT<T> db = !tb ? kernels::matmul(av, g, !ta, false)
                                        : (!ta ? kernels::matmul(g, av, true, false)
                                               : kernels::matmul(g, av, true, true));
                    t.accumulate(n.parents[1], db);
                  }
                });
  }

  Id bmm(Id a, Id b, bool tb = false) {
    TensorT<T> out = kernels::bmm(val(a), val(b), false, tb);
    return push(std::move(out), needs_grad(a) || needs_grad(b), {a, b},
                [tb](TapeT& t, Node& n) {
                  const auto& g = n.grad;
                  const auto& av = t.val(n.parents[0]);
                  const auto& bv = t.val(n.parents[1]);
                  if (t.needs_grad(n.parents[0])) {
                    t.accumulate(n.parents[0], kernels::bmm(g, bv, false, !tb));
                  }
                  if (t.needs_grad(n.parents[1])) {
                    TensorT<T> db = !tb ? kernels::bmm(av, g, true, false)
                                        : kernels::bmm(g, av, true, false);
                    t.accumulate(n.parents[1], db);
                  }
                });
  }

  // x: (H,W,Cin), w: (3,3,Cin,Cout), bias: (Cout); stride 1, zero padding 1.
  Id conv3x3(Id x, Id w, Id bias) {
    const auto& xv = val(x);
    const auto& wv = val(w);
    const auto& bv = val(bias);
    require(xv.rank() == 3 && wv.rank() == 4 && wv.shape[0] == 3 && wv.shape[1] == 3 &&
                wv.shape[2] == xv.shape[2] && bv.shape == std::vector<int>{wv.shape[3]},
            ErrorKind::kShape, "conv3x3: bad shapes");
    int hgt = xv.shape[0], wid = xv.shape[1], cin = xv.shape[2], cout = wv.shape[3];
    TensorT<T> out({hgt, wid, cout});
    for (int y = 0; y < hgt; ++y) {
      for (int xx = 0; xx < wid; ++xx) {
        T* orow = &out.data[(size_t(y) * wid + xx) * cout];
        for (int co = 0; co < cout; ++co) orow[co] = bv.data[size_t(co)];
        for (int ky = 0; ky < 3; ++ky) {
          int sy = y + ky - 1;
          if (sy < 0 || sy >= hgt) continue;
          for (int kx = 0; kx < 3; ++kx) {
            int sx = xx + kx - 1;
            if (sx < 0 || sx >= wid) continue;
            const T* xrow = &xv.data[(size_t(sy) * wid + sx) * cin];
            const T* wrow = &wv.data[((size_t(ky) * 3 + kx) * cin) * cout];
            for (int ci = 0; ci < cin; ++ci) {
              T xvv = xrow[ci];
              const T* wr = wrow + size_t(ci) * cout;
              for (int co = 0; co < cout; ++co) orow[co] += xvv * wr[co];
            }
          }
        }
      }
    }
    return push(std::move(out), needs_grad(x) || needs_grad(w) || needs_grad(bias),
                {x, w, bias}, [](TapeT& t, Node& n) { t.conv3x3_backward(n); });
  }

  Id avgpool2(Id x) {
    const auto& xv = val(x);
    require(xv.rank() == 3 && xv.shape[0] % 2 == 0 && xv.shape[1] % 2 == 0, ErrorKind::kShape,
            "avgpool2: bad shape");
    int h = xv.shape[0] / 2, w = xv.shape[1] / 2, c = xv.shape[2];
    TensorT<T> out({h, w, c});
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx)
        for (int ch = 0; ch < c; ++ch)
          out.at(y, xx, ch) =
              (xv.at(2 * y, 2 * xx, ch) + xv.at(2 * y, 2 * xx + 1, ch) +
               xv.at(2 * y + 1, 2 * xx, ch) + xv.at(2 * y + 1, 2 * xx + 1, ch)) *
              T(0.25);
    return push(std::move(out), needs_grad(x), {x}, [](TapeT& t, Node& n) {
      if (!t.needs_grad(n.parents[0])) return;
      auto& dx = t.grad(n.parents[0]);
      const auto& g = n.grad;
      int h = g.shape[0], w = g.shape[1], c = g.shape[2];
      for (int y = 0; y < h; ++y)
        for (int xx = 0; xx < w; ++xx)
          for (int ch = 0; ch < c; ++ch) {
            T v = g.at(y, xx, ch) * T(0.25);
            dx.at(2 * y, 2 * xx, ch) += v;
            dx.at(2 * y, 2 * xx + 1, ch) += v;
            dx.at(2 * y + 1, 2 * xx, ch) += v;
            dx.at(2 * y + 1, 2 * xx + 1, ch) += v;
          }
    });
  }

  Id upsample2(Id x) {
    const auto& xv = val(x);
    require(xv.rank() == 3, ErrorKind::kShape, "upsample2: bad shape");
    int h = xv.shape[0] * 2, w = xv.shape[1] * 2, c = xv.shape[2];
    TensorT<T> out({h, w, c});
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx)
        for (int ch = 0; ch < c; ++ch) out.at(y, xx, ch) = xv.at(y / 2, xx / 2, ch);
    return push(std::move(out), needs_grad(x), {x}, [](TapeT& t, Node& n) {
      if (!t.needs_grad(n.parents[0])) return;
      auto& dx = t.grad(n.parents[0]);
      const auto& g = n.grad;
      for (int y = 0; y < g.shape[0]; ++y)
        for (int xx = 0; xx < g.shape[1]; ++xx)
          for (int ch = 0; ch < g.shape[2]; ++ch)
            dx.at(y / 2, xx / 2, ch) += g.at(y, xx, ch);
    });
  }

  // Normalizes over the last dimension; gamma/beta are (D).
  Id layernorm_lastdim(Id x, Id gamma, Id beta) {
    const auto& xv = val(x);
    const auto& gv = val(gamma);
    const auto& bv = val(beta);
    int d = xv.shape.back();
    require(gv.shape == std::vector<int>{d} && bv.shape == std::vector<int>{d},
            ErrorKind::kShape, "layernorm: gamma/beta must be (D)");
    int64_t rows = xv.numel() / d;
    TensorT<T> out = xv;
    TensorT<T> xhat = xv;
    TensorT<T> inv_std({int(rows)});
    const T eps = T(1e-5);
    for (int64_t r = 0; r < rows; ++r) {
      const T* row = &xv.data[size_t(r) * d];
      T mu = T(0);
      for (int i = 0; i < d; ++i) mu += row[i];
      mu /= T(d);
      T var = T(0);
      for (int i = 0; i < d; ++i) var += (row[i] - mu) * (row[i] - mu);
      var /= T(d);
      T is = T(1) / std::sqrt(var + eps);
      inv_std.data[size_t(r)] = is;
      for (int i = 0; i < d; ++i) {
        T xh = (row[i] - mu) * is;
        xhat.data[size_t(r) * d + i] = xh;
        out.data[size_t(r) * d + i] = xh * gv.data[size_t(i)] + bv.data[size_t(i)];
      }
    }
    return push(std::move(out), needs_grad(x) || needs_grad(gamma) || needs_grad(beta),
                {x, gamma, beta},
                [xhat = std::move(xhat), inv_std = std::move(inv_std)](TapeT& t, Node& n) {
                  t.layernorm_backward(n, xhat, inv_std);
                });
  }

  Id silu(Id x) {
    const auto& xv = val(x);
    TensorT<T> out = xv;
    TensorT<T> sig = xv;
    for (size_t i = 0; i < out.data.size(); ++i) {
      T s = T(1) / (T(1) + std::exp(-xv.data[i]));
      sig.data[i] = s;
      out.data[i] = xv.data[i] * s;
    }
    return push(std::move(out), needs_grad(x), {x},
                [sig = std::move(sig)](TapeT& t, Node& n) {
                  if (!t.needs_grad(n.parents[0])) return;
                  auto& dx = t.grad(n.parents[0]);
                  const auto& xv = t.val(n.parents[0]);
                  for (size_t i = 0; i < dx.data.size(); ++i) {
                    T s = sig.data[i];
                    dx.data[i] += n.grad.data[i] * s * (T(1) + xv.data[i] * (T(1) - s));
                  }
                });
  }

  Id softmax_lastdim(Id x) {
    TensorT<T> out = kernels::softmax_lastdim(val(x));
    return push(std::move(out), needs_grad(x), {x}, [](TapeT& t, Node& n) {
      if (!t.needs_grad(n.parents[0])) return;
      auto& dx = t.grad(n.parents[0]);
      const auto& y = n.value;
      const auto& dy = n.grad;
      int d = y.shape.back();
      int64_t rows = y.numel() / d;
      for (int64_t r = 0; r < rows; ++r) {
        const T* yr = &y.data[size_t(r) * d];
        const T* gr = &dy.data[size_t(r) * d];
        T dot = T(0);
        for (int i = 0; i < d; ++i) dot += yr[i] * gr[i];
        T* dr = &dx.data[size_t(r) * d];
        for (int i = 0; i < d; ++i) dr[i] += yr[i] * (gr[i] - dot);
      }
    });
  }

  // Broadcast-add a (D) vector over the last dimension.
  Id add_vec_lastdim(Id x, Id v) {
    const auto& xv = val(x);
    const auto& vv = val(v);
    int d = xv.shape.back();
    require(vv.shape == std::vector<int>{d}, ErrorKind::kShape, "add_vec: bad vector shape");
    TensorT<T> out = xv;
    int64_t rows = xv.numel() / d;
    for (int64_t r = 0; r < rows; ++r)
      for (int i = 0; i < d; ++i) out.data[size_t(r) * d + i] += vv.data[size_t(i)];
    return push(std::move(out), needs_grad(x) || needs_grad(v), {x, v}, [](TapeT& t, Node& n) {
      if (t.needs_grad(n.parents[0])) t.accumulate(n.parents[0], n.grad);
      if (t.needs_grad(n.parents[1])) {
        auto& dv = t.grad(n.parents[1]);
        int d = int(dv.data.size());
        int64_t rows = n.grad.numel() / d;
        for (int64_t r = 0; r < rows; ++r)
          for (int i = 0; i < d; ++i) dv.data[size_t(i)] += n.grad.data[size_t(r) * d + i];
      }
    });
  }

  Id concat_lastdim(Id a, Id b) {
    const auto& av = val(a);
    const auto& bv = val(b);
    require(av.rank() == bv.rank(), ErrorKind::kShape, "concat: rank mismatch");
    for (int i = 0; i + 1 < av.rank(); ++i)
      require(av.shape[i] == bv.shape[i], ErrorKind::kShape, "concat: leading dims mismatch");
    int da = av.shape.back(), db = bv.shape.back();
    std::vector<int> shape = av.shape;
    shape.back() = da + db;
    TensorT<T> out(shape);
    int64_t rows = av.numel() / da;
    for (int64_t r = 0; r < rows; ++r) {
      for (int i = 0; i < da; ++i)
        out.data[size_t(r) * (da + db) + i] = av.data[size_t(r) * da + i];
      for (int i = 0; i < db; ++i)
        out.data[size_t(r) * (da + db) + da + i] = bv.data[size_t(r) * db + i];
    }
    return push(std::move(out), needs_grad(a) || needs_grad(b), {a, b},
                [da, db](TapeT& t, Node& n) {
                  int64_t rows = n.grad.numel() / (da + db);
                  if (t.needs_grad(n.parents[0])) {
                    auto& ga = t.grad(n.parents[0]);
                    for (int64_t r = 0; r < rows; ++r)
                      for (int i = 0; i < da; ++i)
                        ga.data[size_t(r) * da + i] += n.grad.data[size_t(r) * (da + db) + i];
                  }
                  if (t.needs_grad(n.parents[1])) {
                    auto& gb = t.grad(n.parents[1]);
                    for (int64_t r = 0; r < rows; ++r)
                      for (int i = 0; i < db; ++i)
                        gb.data[size_t(r) * db + i] +=
                            n.grad.data[size_t(r) * (da + db) + da + i];
                  }
                });
  }

  Id reshape(Id x, std::vector<int> shape) {
    TensorT<T> out = val(x);
    int64_t n = 1;
    for (int d : shape) n *= d;
    require(n == out.numel(), ErrorKind::kShape, "reshape: element count mismatch");
    out.shape = std::move(shape);
    return push(std::move(out), needs_grad(x), {x}, [](TapeT& t, Node& n) {
      if (!t.needs_grad(n.parents[0])) return;
      auto& dx = t.grad(n.parents[0]);
      for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] += n.grad.data[i];
    });
  }

  Id split_heads(Id x, int heads) {
    TensorT<T> out = kernels::split_heads(val(x), heads);
    return push(std::move(out), needs_grad(x), {x}, [heads](TapeT& t, Node& n) {
      if (!t.needs_grad(n.parents[0])) return;
      auto& dx = t.grad(n.parents[0]);
      const auto& g = n.grad;
      int nn = g.shape[1], dh = g.shape[2];
      for (int h = 0; h < heads; ++h)
        for (int i = 0; i < nn; ++i)
          for (int d = 0; d < dh; ++d) dx.at(i, h * dh + d) += g.at(h, i, d);
    });
  }

  Id merge_heads(Id x) {
    const auto& xv = val(x);
    int heads = xv.shape[0];
    TensorT<T> out = kernels::merge_heads(xv);
    return push(std::move(out), needs_grad(x), {x}, [heads](TapeT& t, Node& n) {
      if (!t.needs_grad(n.parents[0])) return;
      auto& dx = t.grad(n.parents[0]);
      const auto& g = n.grad;
      int nn = g.shape[0], dh = g.shape[1] / heads;
      for (int h = 0; h < heads; ++h)
        for (int i = 0; i < nn; ++i)
          for (int d = 0; d < dh; ++d) dx.at(h, i, d) += g.at(i, h * dh + d);
    });
  }

  Id gather_rows(Id table, std::vector<int> indices) {
    const auto& tv = val(table);
    require(tv.rank() == 2, ErrorKind::kShape, "gather_rows: table must be 2-D");
    int d = tv.shape[1];
    TensorT<T> out({int(indices.size()), d});
    for (size_t i = 0; i < indices.size(); ++i) {
      require(indices[i] >= 0 && indices[i] < tv.shape[0], ErrorKind::kConfig,
              "gather_rows: index out of range");
      for (int j = 0; j < d; ++j) out.at(int(i), j) = tv.at(indices[i], j);
    }
    return push(std::move(out), needs_grad(table), {table},
                [indices = std::move(indices)](TapeT& t, Node& n) {
                  if (!t.needs_grad(n.parents[0])) return;
                  auto& dt = t.grad(n.parents[0]);
                  int d = dt.shape[1];
                  for (size_t i = 0; i < indices.size(); ++i)
                    for (int j = 0; j < d; ++j)
                      dt.at(indices[i], j) += n.grad.at(int(i), j);
                });
  }

  // Mean squared error against a constant target; returns a {1} scalar node.
  Id mse(Id pred, const TensorT<T>& target) {
    const auto& pv = val(pred);
    require(pv.shape == target.shape, ErrorKind::kShape, "mse: shape mismatch");
    double acc = 0;
    for (size_t i = 0; i < pv.data.size(); ++i) {
      double dlt = double(pv.data[i]) - double(target.data[i]);
      acc += dlt * dlt;
    }
    TensorT<T> out({1});
    out.data[0] = T(acc / double(pv.numel()));
    return push(std::move(out), needs_grad(pred), {pred},
                [target](TapeT& t, Node& n) {
                  if (!t.needs_grad(n.parents[0])) return;
                  auto& dp = t.grad(n.parents[0]);
                  const auto& pv = t.val(n.parents[0]);
                  T g = n.grad.data[0];
                  T inv_n = T(2) / T(pv.numel());
                  for (size_t i = 0; i < dp.data.size(); ++i)
                    dp.data[i] += g * inv_n * (pv.data[i] - target.data[i]);
                });
  }

  void backward(Id root) {
    grad(root) = TensorT<T>::full(val(root).shape, T(1));
    for (int i = root; i >= 0; --i) {
      Node& n = nodes_[size_t(i)];
      if (n.backward && !n.grad.data.empty() && n.needs_grad) n.backward(*this, n);
    }
  }

  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    TensorT<T> value;
    TensorT<T> grad;
    std::vector<Id> parents;
    std::function<void(TapeT&, Node&)> backward;
    bool needs_grad = false;
  };

  Id push(TensorT<T> value, bool needs, std::vector<Id> parents,
          std::function<void(TapeT&, Node&)> bwd) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs;
    n.parents = std::move(parents);
    n.backward = std::move(bwd);
    nodes_.push_back(std::move(n));
    return Id(nodes_.size()) - 1;
  }

  void accumulate(Id id, const TensorT<T>& g) {
    if (!needs_grad(id)) return;
    auto& dst = grad(id);
    for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i];
  }

  void accumulate_scaled(Id id, const TensorT<T>& g, T s) {
    if (!needs_grad(id)) return;
    auto& dst = grad(id);
    for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += s * g.data[i];
  }

  void conv3x3_backward(Node& n) {
    Id x = n.parents[0], w = n.parents[1], bias = n.parents[2];
    const auto& xv = val(x);
    const auto& wv = val(w);
    const auto& g = n.grad;
    int hgt = xv.shape[0], wid = xv.shape[1], cin = xv.shape[2], cout = wv.shape[3];
    if (needs_grad(bias)) {
      auto& db = grad(bias);
      for (int y = 0; y < hgt; ++y)
        for (int xx = 0; xx < wid; ++xx)
          for (int co = 0; co < cout; ++co) db.data[size_t(co)] += g.at(y, xx, co);
    }
    bool want_x = needs_grad(x);
    bool want_w = needs_grad(w);
    if (!want_x && !want_w) return;
    auto* dx = want_x ? &grad(x) : nullptr;
    auto* dw = want_w ? &grad(w) : nullptr;
    for (int y = 0; y < hgt; ++y) {
      for (int xx = 0; xx < wid; ++xx) {
        const T* grow = &g.data[(size_t(y) * wid + xx) * cout];
        for (int ky = 0; ky < 3; ++ky) {
          int sy = y + ky - 1;
          if (sy < 0 || sy >= hgt) continue;
          for (int kx = 0; kx < 3; ++kx) {
            int sx = xx + kx - 1;
            if (sx < 0 || sx >= wid) continue;
            const T* xrow = &xv.data[(size_t(sy) * wid + sx) * cin];
            for (int ci = 0; ci < cin; ++ci) {
              const T* wr = &wv.data[(((size_t(ky) * 3 + kx) * cin) + ci) * cout];
              if (want_x) {
                T acc = T(0);
                for (int co = 0; co < cout; ++co) acc += grow[co] * wr[co];
                dx->data[(size_t(sy) * wid + sx) * cin + ci] += acc;
              }
              if (want_w) {
                T xvv = xrow[ci];
                T* dwr = &dw->data[(((size_t(ky) * 3 + kx) * cin) + ci) * cout];
                for (int co = 0; co < cout; ++co) dwr[co] += xvv * grow[co];
              }
            }
          }
        }
      }
    }
  }

  void layernorm_backward(Node& n, const TensorT<T>& xhat, const TensorT<T>& inv_std) {
    Id x = n.parents[0], gamma = n.parents[1], beta = n.parents[2];
    const auto& gv = val(gamma);
    const auto& dy = n.grad;
    int d = dy.shape.back();
    int64_t rows = dy.numel() / d;
    if (needs_grad(gamma)) {
      auto& dg = grad(gamma);
      for (int64_t r = 0; r < rows; ++r)
        for (int i = 0; i < d; ++i)
          dg.data[size_t(i)] += dy.data[size_t(r) * d + i] * xhat.data[size_t(r) * d + i];
    }
    if (needs_grad(beta)) {
      auto& db = grad(beta);
      for (int64_t r = 0; r < rows; ++r)
        for (int i = 0; i < d; ++i) db.data[size_t(i)] += dy.data[size_t(r) * d + i];
    }
    if (needs_grad(x)) {
      auto& dx = grad(x);
      for (int64_t r = 0; r < rows; ++r) {
        T mean_dxhat = T(0), mean_dxhat_xhat = T(0);
        for (int i = 0; i < d; ++i) {
          T dxh = dy.data[size_t(r) * d + i] * gv.data[size_t(i)];
          mean_dxhat += dxh;
          mean_dxhat_xhat += dxh * xhat.data[size_t(r) * d + i];
        }
        mean_dxhat /= T(d);
        mean_dxhat_xhat /= T(d);
        T is = inv_std.data[size_t(r)];
        for (int i = 0; i < d; ++i) {
          T dxh = dy.data[size_t(r) * d + i] * gv.data[size_t(i)];
          dx.data[size_t(r) * d + i] +=
              (dxh - mean_dxhat - xhat.data[size_t(r) * d + i] * mean_dxhat_xhat) * is;
        }
      }
    }
  }

  std::vector<Node> nodes_;
};

using Tape = TapeT<float>;

}  // namespace styler
