// cslid/graph.hpp -- dynamic reverse-mode autodiff tape over Tensor ops.
//
// A Graph records one forward pass; backward() replays the tape in reverse
// and accumulates exact gradients into the sinks registered via param().
// Graphs are cheap to build and are meant to be constructed per item and per
// pass; a graph is never shared between threads.
#pragma once

#include <cmath>
#include <functional>
#include <deque>
#include <utility>
#include <vector>

#include "cslid/tensor.hpp"
#include "cslid/util.hpp"

namespace cslid {

struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

enum class GradMode { train, inference };

template <typename T>
class Graph {
 public:
  // Inference graphs skip all gradient bookkeeping.
  explicit Graph(GradMode mode = GradMode::train)
      : grad_enabled_(mode == GradMode::train) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  std::size_t size() const { return nodes_.size(); }

  Var constant(Tensor<T> value) { return make_node(std::move(value), false, nullptr); }

  // Leaf over externally owned storage. After backward(), the leaf gradient
  // is added into *sink (when sink is non-null and gradients are enabled).
  Var param(const Tensor<T>& value, Tensor<T>* sink) {
    Var v = make_node(value, grad_enabled_, nullptr);
    if (grad_enabled_ && sink != nullptr) sinks_.emplace_back(v, sink);
    return v;
  }

  const Tensor<T>& value(Var v) const { return node(v).value; }
  const Tensor<T>& grad(Var v) const { return node(v).grad; }

  // --- elementwise and shape ops ---------------------------------------

  Var add(Var a, Var b) {
    const Tensor<T>&va = value(a), &vb = value(b);
    if (!va.same_shape(vb)) throw NumericError("add: shape mismatch");
    Tensor<T> out = va;
    axpy(out, vb);
    return make_op(std::move(out), {a, b}, [this, a, b](const Tensor<T>& dy) {
      accumulate(a, dy);
      accumulate(b, dy);
    });
  }

  Var scale(Var a, T factor) {
    Tensor<T> out = value(a);
    for (Index i = 0; i < out.numel(); ++i) out[i] *= factor;
    return make_op(std::move(out), {a}, [this, a, factor](const Tensor<T>& dy) {
      Tensor<T>& da = grad_ref(a);
      for (Index i = 0; i < dy.numel(); ++i) da[i] += factor * dy[i];
    });
  }

  Var emul(Var a, Var b) {
    const Tensor<T>&va = value(a), &vb = value(b);
    if (!va.same_shape(vb)) throw NumericError("emul: shape mismatch");
    Tensor<T> out = va;
    for (Index i = 0; i < out.numel(); ++i) out[i] *= vb[i];
    return make_op(std::move(out), {a, b}, [this, a, b](const Tensor<T>& dy) {
      const Tensor<T>&va = value(a), &vb = value(b);
      if (needs_grad(a)) {
        Tensor<T>& da = grad_ref(a);
        for (Index i = 0; i < dy.numel(); ++i) da[i] += vb[i] * dy[i];
      }
      if (needs_grad(b)) {
        Tensor<T>& db = grad_ref(b);
        for (Index i = 0; i < dy.numel(); ++i) db[i] += va[i] * dy[i];
      }
    });
  }

  Var sigmoid(Var a) {
    Tensor<T> out = value(a);
    for (Index i = 0; i < out.numel(); ++i) out[i] = T(1) / (T(1) + std::exp(-out[i]));
    return unary_from_output(a, std::move(out),
                             [](T y) { return y * (T(1) - y); });
  }

  Var tanh(Var a) {
    Tensor<T> out = value(a);
    for (Index i = 0; i < out.numel(); ++i) out[i] = std::tanh(out[i]);
    return unary_from_output(a, std::move(out), [](T y) { return T(1) - y * y; });
  }

  Var concat(Var a, Var b) {
    const Tensor<T>&va = value(a), &vb = value(b);
    Tensor<T> out({va.numel() + vb.numel()});
    for (Index i = 0; i < va.numel(); ++i) out[i] = va[i];
    for (Index i = 0; i < vb.numel(); ++i) out[va.numel() + i] = vb[i];
    return make_op(std::move(out), {a, b}, [this, a, b](const Tensor<T>& dy) {
      Index na = value(a).numel();
      if (needs_grad(a)) {
        Tensor<T>& da = grad_ref(a);
        for (Index i = 0; i < na; ++i) da[i] += dy[i];
      }
      if (needs_grad(b)) {
        Tensor<T>& db = grad_ref(b);
        for (Index i = 0; i < value(b).numel(); ++i) db[i] += dy[na + i];
      }
    });
  }

  Var slice(Var a, Index start, Index len) {
    const Tensor<T>& va = value(a);
    if (start < 0 || start + len > va.numel()) throw NumericError("slice: out of range");
    Tensor<T> out({len});
    for (Index i = 0; i < len; ++i) out[i] = va[start + i];
    return make_op(std::move(out), {a}, [this, a, start, len](const Tensor<T>& dy) {
      Tensor<T>& da = grad_ref(a);
      for (Index i = 0; i < len; ++i) da[start + i] += dy[i];
    });
  }

  // Row of a rank-2 node (embedding lookup).
  Var row(Var m, Index r) {
    const Tensor<T>& vm = value(m);
    if (vm.rank() != 2 || r < 0 || r >= vm.rows()) throw NumericError("row: out of range");
    Index cols = vm.cols();
    Tensor<T> out({cols});
    for (Index i = 0; i < cols; ++i) out[i] = vm(r, i);
    return make_op(std::move(out), {m}, [this, m, r, cols](const Tensor<T>& dy) {
      Tensor<T>& dm = grad_ref(m);
      for (Index i = 0; i < cols; ++i) dm[r * cols + i] += dy[i];
    });
  }

  Var stack_rows(const std::vector<Var>& rows) {
    if (rows.empty()) throw NumericError("stack_rows: empty");
    Index cols = value(rows[0]).numel();
    Tensor<T> out({static_cast<Index>(rows.size()), cols});
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Tensor<T>& v = value(rows[r]);
      if (v.numel() != cols) throw NumericError("stack_rows: ragged rows");
      for (Index i = 0; i < cols; ++i) out[static_cast<Index>(r) * cols + i] = v[i];
    }
    auto rows_copy = rows;
    return make_op(std::move(out), rows, [this, rows_copy, cols](const Tensor<T>& dy) {
      for (std::size_t r = 0; r < rows_copy.size(); ++r) {
        if (!needs_grad(rows_copy[r])) continue;
        Tensor<T>& dr = grad_ref(rows_copy[r]);
        for (Index i = 0; i < cols; ++i) dr[i] += dy[static_cast<Index>(r) * cols + i];
      }
    });
  }

  // --- linear algebra ----------------------------------------------------

  // (m x n) matrix times length-n vector.
  Var matvec(Var w, Var x) {
    const Tensor<T>&vw = value(w), &vx = value(x);
    if (vw.rank() != 2 || vw.cols() != vx.numel()) throw NumericError("matvec: shape mismatch");
    Index m = vw.rows(), n = vw.cols();
    Tensor<T> out({m});
    const T* wd = vw.data();
    const T* xd = vx.data();
    for (Index r = 0; r < m; ++r) {
      T acc = 0;
      const T* wr = wd + r * n;
      for (Index c = 0; c < n; ++c) acc += wr[c] * xd[c];
      out[r] = acc;
    }
    return make_op(std::move(out), {w, x}, [this, w, x, m, n](const Tensor<T>& dy) {
      const Tensor<T>&vw = value(w), &vx = value(x);
      if (needs_grad(w)) {
        Tensor<T>& dw = grad_ref(w);
        for (Index r = 0; r < m; ++r) {
          T g = dy[r];
          if (g == T(0)) continue;
          T* dwr = dw.data() + r * n;
          const T* xd = vx.data();
          for (Index c = 0; c < n; ++c) dwr[c] += g * xd[c];
        }
      }
      if (needs_grad(x)) {
        Tensor<T>& dx = grad_ref(x);
        const T* wd = vw.data();
        for (Index r = 0; r < m; ++r) {
          T g = dy[r];
          if (g == T(0)) continue;
          const T* wr = wd + r * n;
          for (Index c = 0; c < n; ++c) dx[c] += g * wr[c];
        }
      }
    });
  }

  // Length-u vector times (u x n) matrix.
  Var vecmat(Var a, Var m) {
    const Tensor<T>&va = value(a), &vm = value(m);
    if (vm.rank() != 2 || vm.rows() != va.numel()) throw NumericError("vecmat: shape mismatch");
    Index u = vm.rows(), n = vm.cols();
    Tensor<T> out({n});
    for (Index r = 0; r < u; ++r) {
      T av = va[r];
      if (av == T(0)) continue;
      const T* mr = vm.data() + r * n;
      for (Index c = 0; c < n; ++c) out[c] += av * mr[c];
    }
    return make_op(std::move(out), {a, m}, [this, a, m, u, n](const Tensor<T>& dy) {
      const Tensor<T>&va = value(a), &vm = value(m);
      if (needs_grad(a)) {
        Tensor<T>& da = grad_ref(a);
        for (Index r = 0; r < u; ++r) {
          const T* mr = vm.data() + r * n;
          T acc = 0;
          for (Index c = 0; c < n; ++c) acc += mr[c] * dy[c];
          da[r] += acc;
        }
      }
      if (needs_grad(m)) {
        Tensor<T>& dm = grad_ref(m);
        for (Index r = 0; r < u; ++r) {
          T av = va[r];
          if (av == T(0)) continue;
          T* dmr = dm.data() + r * n;
          for (Index c = 0; c < n; ++c) dmr[c] += av * dy[c];
        }
      }
    });
  }

  // (m x k) times (k x n).
  Var matmul(Var a, Var b) {
    const Tensor<T>&va = value(a), &vb = value(b);
    if (va.rank() != 2 || vb.rank() != 2 || va.cols() != vb.rows())
      throw NumericError("matmul: shape mismatch");
    Index m = va.rows(), k = va.cols(), n = vb.cols();
    Tensor<T> out({m, n});
    for (Index i = 0; i < m; ++i)
      for (Index p = 0; p < k; ++p) {
        T av = va(i, p);
        if (av == T(0)) continue;
        const T* br = vb.data() + p * n;
        T* orow = out.data() + i * n;
        for (Index j = 0; j < n; ++j) orow[j] += av * br[j];
      }
    return make_op(std::move(out), {a, b}, [this, a, b, m, k, n](const Tensor<T>& dy) {
      const Tensor<T>&va = value(a), &vb = value(b);
      if (needs_grad(a)) {
        Tensor<T>& da = grad_ref(a);
        for (Index i = 0; i < m; ++i)
          for (Index p = 0; p < k; ++p) {
            const T* br = vb.data() + p * n;
            const T* dr = dy.data() + i * n;
            T acc = 0;
            for (Index j = 0; j < n; ++j) acc += br[j] * dr[j];
            da[i * k + p] += acc;
          }
      }
      if (needs_grad(b)) {
        Tensor<T>& db = grad_ref(b);
        for (Index i = 0; i < m; ++i)
          for (Index p = 0; p < k; ++p) {
            T av = va(i, p);
            if (av == T(0)) continue;
            T* dbr = db.data() + p * n;
            const T* dr = dy.data() + i * n;
            for (Index j = 0; j < n; ++j) dbr[j] += av * dr[j];
          }
      }
    });
  }

  // --- probability and losses --------------------------------------------

  Var softmax(Var a) {
    const Tensor<T>& va = value(a);
    if (va.numel() == 0) throw NumericError("softmax: empty input");
    Tensor<T> out = va;
    T mx = out[0];
    for (Index i = 1; i < out.numel(); ++i) mx = std::max(mx, out[i]);
    T sum = 0;
    for (Index i = 0; i < out.numel(); ++i) {
      out[i] = std::exp(out[i] - mx);
      sum += out[i];
    }
    for (Index i = 0; i < out.numel(); ++i) out[i] /= sum;
    Var v = make_op(std::move(out), {a}, nullptr);
    if (needs_grad(v))
      node(v).backward = [this, a, v](const Tensor<T>& dy) {
        const Tensor<T>& y = value(v);
        T dot = 0;
        for (Index i = 0; i < y.numel(); ++i) dot += y[i] * dy[i];
        Tensor<T>& da = grad_ref(a);
        for (Index i = 0; i < y.numel(); ++i) da[i] += y[i] * (dy[i] - dot);
      };
    return v;
  }

  // -log(probs[target]); expects a probability vector.
  Var cross_entropy(Var probs, Index target) {
    const Tensor<T>& p = value(probs);
    if (target < 0 || target >= p.numel()) throw NumericError("cross_entropy: bad target");
    Tensor<T> out({1});
    out[0] = -std::log(std::max(p[target], std::numeric_limits<T>::min()));
    return make_op(std::move(out), {probs}, [this, probs, target](const Tensor<T>& dy) {
      const Tensor<T>& p = value(probs);
      Tensor<T>& dp = grad_ref(probs);
      dp[target] += dy[0] * (-T(1) / std::max(p[target], std::numeric_limits<T>::min()));
    });
  }

  // Fused, numerically stable -log softmax(logits)[target].
  Var cross_entropy_logits(Var logits, Index target) {
    const Tensor<T>& v = value(logits);
    if (v.numel() == 0) throw NumericError("cross_entropy_logits: empty input");
    if (target < 0 || target >= v.numel()) throw NumericError("cross_entropy_logits: bad target");
    T mx = v[0];
    for (Index i = 1; i < v.numel(); ++i) mx = std::max(mx, v[i]);
    T lse = 0;
    for (Index i = 0; i < v.numel(); ++i) lse += std::exp(v[i] - mx);
    lse = std::log(lse) + mx;
    Tensor<T> out({1});
    out[0] = lse - v[target];
    return make_op(std::move(out), {logits}, [this, logits, target, lse](const Tensor<T>& dy) {
      const Tensor<T>& v = value(logits);
      Tensor<T>& dl = grad_ref(logits);
      for (Index i = 0; i < v.numel(); ++i) {
        T softmax_i = std::exp(v[i] - lse);
        dl[i] += dy[0] * (softmax_i - (i == target ? T(1) : T(0)));
      }
    });
  }

  Var add_n(const std::vector<Var>& terms) {
    if (terms.empty()) throw NumericError("add_n: empty");
    Tensor<T> out = value(terms[0]);
    for (std::size_t i = 1; i < terms.size(); ++i) axpy(out, value(terms[i]));
    auto terms_copy = terms;
    return make_op(std::move(out), terms, [this, terms_copy](const Tensor<T>& dy) {
      for (Var t : terms_copy)
        if (needs_grad(t)) accumulate(t, dy);
    });
  }

  // Extension point for ops with bespoke backward rules (e.g. sequence
  // losses). parents are recorded for needs_grad propagation; backward
  // receives the upstream gradient of the new node.
  Var make_custom(Tensor<T> value, const std::vector<Var>& parents,
                  std::function<void(Graph&, const Tensor<T>&)> backward) {
    bool ng = false;
    for (Var p : parents) ng = ng || needs_grad(p);
    Var v = make_node(std::move(value), ng, nullptr);
    if (grad_enabled_ && ng && backward) {
      auto fn = std::move(backward);
      node(v).backward = [this, fn](const Tensor<T>& dy) { fn(*this, dy); };
    }
    return v;
  }

  bool needs_grad(Var v) const { return grad_enabled_ && node(v).needs_grad; }

  Tensor<T>& grad_ref(Var v) {
    Node& n = node(v);
    if (n.grad.numel() == 0) n.grad = Tensor<T>(n.value.shape());
    return n.grad;
  }

  // Reverse sweep from a scalar loss. Flushes parameter gradients into their
  // sinks. One backward per graph.
  void backward(Var loss) {
    if (!grad_enabled_) throw NumericError("backward on an inference graph");
    if (!loss.valid() || nodes_.empty()) throw NumericError("backward called before forward");
    if (value(loss).numel() != 1) throw NumericError("backward: loss must be scalar");
    if (backward_done_) throw NumericError("backward already run for this graph");
    backward_done_ = true;
    grad_ref(loss)[0] = T(1);
    for (std::int32_t id = loss.id; id >= 0; --id) {
      Node& n = nodes_[static_cast<std::size_t>(id)];
      if (!n.needs_grad || n.grad.numel() == 0 || !n.backward) continue;
      n.backward(n.grad);
    }
    for (auto& [v, sink] : sinks_) {
      if (node(v).grad.numel() != 0) axpy(*sink, node(v).grad);
    }
  }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool needs_grad = false;
    std::function<void(const Tensor<T>&)> backward;
  };

  Node& node(Var v) { return nodes_.at(static_cast<std::size_t>(v.id)); }
  const Node& node(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)); }

  Var make_node(Tensor<T> value, bool needs_grad,
                std::function<void(const Tensor<T>&)> backward) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad && grad_enabled_;
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
  }

  Var make_op(Tensor<T> value, const std::vector<Var>& parents,
              std::function<void(const Tensor<T>&)> backward) {
    bool ng = false;
    for (Var p : parents) ng = ng || needs_grad(p);
    return make_node(std::move(value), ng, ng ? std::move(backward) : nullptr);
  }

  template <typename DerivFromOutput>
  Var unary_from_output(Var a, Tensor<T> out, DerivFromOutput deriv) {
    Var v = make_op(std::move(out), {a}, nullptr);
    if (needs_grad(v))
      node(v).backward = [this, a, v, deriv](const Tensor<T>& dy) {
        const Tensor<T>& y = value(v);
        Tensor<T>& da = grad_ref(a);
        for (Index i = 0; i < y.numel(); ++i) da[i] += deriv(y[i]) * dy[i];
      };
    return v;
  }

  void accumulate(Var v, const Tensor<T>& dy) {
    if (!needs_grad(v)) return;
    axpy(grad_ref(v), dy);
  }

  std::deque<Node> nodes_;
  std::vector<std::pair<Var, Tensor<T>*>> sinks_;
  bool grad_enabled_ = true;
  bool backward_done_ = false;
};

}  // namespace cslid
