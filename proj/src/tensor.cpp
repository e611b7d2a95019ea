#include "rgnn/tensor.hpp"
#include <memory>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rgnn {

Tensor Tensor::zeros(std::size_t rows, std::size_t cols) {
    Tensor t;
    t.shape = {rows, cols};
    t.values.assign(rows * cols, 0.0);
    return t;
}

Tensor Tensor::vec(std::size_t n) {
    Tensor t;
    t.shape = {n};
    t.values.assign(n, 0.0);
    return t;
}

Tensor Tensor::scalar(double v) {
    Tensor t;
    t.shape = {1, 1};
    t.values.assign(1, v);
    return t;
}

std::size_t Tensor::rows() const {
    return shape.size() == 2 ? shape[0] : (shape.empty() ? 0 : 1);
}

std::size_t Tensor::cols() const {
    if (shape.size() == 2) return shape[1];
    return shape.empty() ? 0 : shape[0];
}

double& Tensor::at(std::size_t r, std::size_t c) {
    return values[r * cols() + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
    return values[r * cols() + c];
}

void Tensor::ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
}

void Tensor::zero_grad() {
    grad.assign(values.size(), 0.0);
}

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw Error("Rng::below(0)");
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

int ParameterSet::add(const std::string& name, Tensor init) {
    if (index_.count(name))
        throw Error("duplicate parameter name: " + name);
    Param p;
    p.name = name;
    p.value = std::move(init);
    p.value.ensure_grad();
    p.adam_m = Tensor::zeros(p.value.rows(), p.value.cols());
    p.adam_v = Tensor::zeros(p.value.rows(), p.value.cols());
    p.adam_m.shape = p.value.shape;
    p.adam_v.shape = p.value.shape;
    int index = static_cast<int>(params_.size());
    index_.emplace(name, index);
    params_.push_back(std::move(p));
    return index;
}

int ParameterSet::index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

std::size_t ParameterSet::value_count() const {
    std::size_t n = 0;
    for (const Param& p : params_) n += p.value.size();
    return n;
}

void ParameterSet::zero_grad() {
    for (Param& p : params_) p.value.zero_grad();
}

void ParameterSet::adam_step(double lr, double beta1, double beta2, double eps) {
    ++step_count_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count_));
    for (Param& p : params_) {
        if (p.value.grad.size() != p.value.values.size())
            throw ShapeMismatchError("missing gradient for parameter " + p.name);
        for (std::size_t i = 0; i < p.value.values.size(); ++i) {
            const double g = p.value.grad[i];
            double& m = p.adam_m.values[i];
            double& v = p.adam_v.values[i];
            m = beta1 * m + (1.0 - beta1) * g;
            v = beta2 * v + (1.0 - beta2) * g * g;
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            p.value.values[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

void ParameterSet::reset_optimizer() {
    step_count_ = 0;
    for (Param& p : params_) {
        p.adam_m.values.assign(p.adam_m.values.size(), 0.0);
        p.adam_v.values.assign(p.adam_v.values.size(), 0.0);
    }
}

GradSink::GradSink(const ParameterSet& params) {
    grads.resize(static_cast<std::size_t>(params.size()));
    for (int i = 0; i < params.size(); ++i)
        grads[static_cast<std::size_t>(i)].assign(params.at(i).value.size(), 0.0);
}

void GradSink::clear() {
    for (auto& g : grads) g.assign(g.size(), 0.0);
}

void GradSink::accumulate(const GradSink& other) {
    for (std::size_t i = 0; i < grads.size(); ++i)
        for (std::size_t j = 0; j < grads[i].size(); ++j)
            grads[i][j] += other.grads[i][j];
}

void GradSink::add_into(ParameterSet& params) const {
    for (int i = 0; i < params.size(); ++i) {
        auto& dst = params.at(i).value.grad;
        const auto& src = grads[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
}

Tape::Id Tape::push(Tensor t, std::function<void()> back) {
    nodes_.push_back(Node{std::move(t), grad_ ? std::move(back) : nullptr});
    return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::leaf(Tensor value) {
    return push(std::move(value), nullptr);
}

Tape::Id Tape::param(const ParameterSet& params, int param_index,
                     GradSink* sink) {
    const Tensor& value = params.at(param_index).value;
    Tensor copy;
    copy.shape = value.shape;
    copy.values = value.values;
    Id id = push(std::move(copy), nullptr);
    if (grad_) {
        if (sink == nullptr)
            throw Error("gradient-enabled tape needs a GradSink for parameters");
        auto* self = this;
        nodes_.back().back = [self, id, sink, param_index]() {
            const Tensor& node = self->val(id);
            auto& dst = sink->grads[static_cast<std::size_t>(param_index)];
            for (std::size_t i = 0; i < node.grad.size(); ++i)
                dst[i] += node.grad[i];
        };
    }
    return id;
}

Tape::Id Tape::zeros(std::size_t rows, std::size_t cols) {
    return leaf(Tensor::zeros(rows, cols));
}

Tape::Id Tape::linear(Id x, Id w, Id b) {
    const Tensor& xv = val(x);
    const Tensor& wv = val(w);
    const Tensor& bv = val(b);
    const std::size_t n = xv.rows(), a = xv.cols();
    const std::size_t wr = wv.rows(), wc = wv.cols();
    if (a != wr || bv.size() != wc)
        throw ShapeMismatchError("linear: x " + std::to_string(n) + "x" +
                                 std::to_string(a) + ", w " + std::to_string(wr) +
                                 "x" + std::to_string(wc) + ", b " +
                                 std::to_string(bv.size()));
    Tensor out = Tensor::zeros(n, wc);
    for (std::size_t r = 0; r < n; ++r) {
        double* orow = &out.values[r * wc];
        for (std::size_t c = 0; c < wc; ++c) orow[c] = bv.values[c];
        const double* xrow = &xv.values[r * a];
        for (std::size_t k = 0; k < a; ++k) {
            const double xv_k = xrow[k];
            const double* wrow = &wv.values[k * wc];
            for (std::size_t c = 0; c < wc; ++c) orow[c] += xv_k * wrow[c];
        }
    }
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        nodes_.back().back = [self, id, x, w, b, n, a, wc]() {
            const Tensor& o = self->val(id);
            Tensor& xt = self->mut(x);
            Tensor& wt = self->mut(w);
            Tensor& bt = self->mut(b);
            xt.ensure_grad();
            wt.ensure_grad();
            bt.ensure_grad();
            for (std::size_t r = 0; r < n; ++r) {
                const double* og = &o.grad[r * wc];
                const double* xrow = &xt.values[r * a];
                double* xg = &xt.grad[r * a];
                for (std::size_t k = 0; k < a; ++k) {
                    const double* wrow = &wt.values[k * wc];
                    double* wg = &wt.grad[k * wc];
                    double acc = 0.0;
                    const double xv_k = xrow[k];
                    for (std::size_t c = 0; c < wc; ++c) {
                        acc += og[c] * wrow[c];
                        wg[c] += xv_k * og[c];
                    }
                    xg[k] += acc;
                }
                for (std::size_t c = 0; c < wc; ++c) bt.grad[c] += og[c];
            }
        };
    }
    return id;
}

namespace {

double softplus_value(double x) {
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

double sigmoid_value(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

double mish_value(double x) {
    return x * std::tanh(softplus_value(x));
}

Tape::Id Tape::mish(Id x) {
    const Tensor& xv = val(x);
    Tensor out;
    out.shape = xv.shape;
    out.values.resize(xv.values.size());
    for (std::size_t i = 0; i < xv.values.size(); ++i)
        out.values[i] = mish_value(xv.values[i]);
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        nodes_.back().back = [self, id, x]() {
            const Tensor& o = self->val(id);
            Tensor& xt = self->mut(x);
            xt.ensure_grad();
            for (std::size_t i = 0; i < xt.values.size(); ++i) {
                const double v = xt.values[i];
                const double th = std::tanh(softplus_value(v));
                const double d = th + v * (1.0 - th * th) * sigmoid_value(v);
                xt.grad[i] += o.grad[i] * d;
            }
        };
    }
    return id;
}

Tape::Id Tape::add(Id a, Id b) {
    const Tensor& av = val(a);
    const Tensor& bv = val(b);
    if (av.shape != bv.shape) throw ShapeMismatchError("add: shape mismatch");
    Tensor out;
    out.shape = av.shape;
    out.values.resize(av.values.size());
    for (std::size_t i = 0; i < av.values.size(); ++i)
        out.values[i] = av.values[i] + bv.values[i];
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        nodes_.back().back = [self, id, a, b]() {
            const Tensor& o = self->val(id);
            Tensor& at = self->mut(a);
            Tensor& bt = self->mut(b);
            at.ensure_grad();
            bt.ensure_grad();
            for (std::size_t i = 0; i < o.grad.size(); ++i) {
                at.grad[i] += o.grad[i];
                bt.grad[i] += o.grad[i];
            }
        };
    }
    return id;
}

Tape::Id Tape::concat_cols(Id a, Id b) {
    const Tensor& av = val(a);
    const Tensor& bv = val(b);
    if (av.rows() != bv.rows())
        throw ShapeMismatchError("concat_cols: row mismatch");
    const std::size_t n = av.rows(), ca = av.cols(), cb = bv.cols();
    Tensor out = Tensor::zeros(n, ca + cb);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < ca; ++c) out.at(r, c) = av.at(r, c);
        for (std::size_t c = 0; c < cb; ++c) out.at(r, ca + c) = bv.at(r, c);
    }
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        nodes_.back().back = [self, id, a, b, n, ca, cb]() {
            const Tensor& o = self->val(id);
            Tensor& at = self->mut(a);
            Tensor& bt = self->mut(b);
            at.ensure_grad();
            bt.ensure_grad();
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < ca; ++c)
                    at.grad[r * ca + c] += o.grad[r * (ca + cb) + c];
                for (std::size_t c = 0; c < cb; ++c)
                    bt.grad[r * cb + c] += o.grad[r * (ca + cb) + ca + c];
            }
        };
    }
    return id;
}

Tape::Id Tape::gather_concat(Id table, std::vector<int> nodes, int group) {
    const Tensor& tv = val(table);
    if (group <= 0 || nodes.size() % static_cast<std::size_t>(group) != 0)
        throw ShapeMismatchError("gather_concat: bad grouping");
    const std::size_t k = tv.cols();
    const std::size_t rows = nodes.size() / static_cast<std::size_t>(group);
    for (int node : nodes)
        if (node < 0 || static_cast<std::size_t>(node) >= tv.rows())
            throw UniverseMismatchError("gather_concat: node out of range");
    Tensor out = Tensor::zeros(rows, static_cast<std::size_t>(group) * k);
    for (std::size_t r = 0; r < rows; ++r)
        for (int j = 0; j < group; ++j) {
            const int node = nodes[r * static_cast<std::size_t>(group) +
                                   static_cast<std::size_t>(j)];
            const double* src = &tv.values[static_cast<std::size_t>(node) * k];
            double* dst = &out.values[r * static_cast<std::size_t>(group) * k +
                                      static_cast<std::size_t>(j) * k];
            std::copy(src, src + k, dst);
        }
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        auto idx = std::make_shared<std::vector<int>>(std::move(nodes));
        nodes_.back().back = [self, id, table, idx, group, k, rows]() {
            const Tensor& o = self->val(id);
            Tensor& tt = self->mut(table);
            tt.ensure_grad();
            for (std::size_t r = 0; r < rows; ++r)
                for (int j = 0; j < group; ++j) {
                    const int node = (*idx)[r * static_cast<std::size_t>(group) +
                                            static_cast<std::size_t>(j)];
                    double* dst = &tt.grad[static_cast<std::size_t>(node) * k];
                    const double* src =
                        &o.grad[r * static_cast<std::size_t>(group) * k +
                                static_cast<std::size_t>(j) * k];
                    for (std::size_t c = 0; c < k; ++c) dst[c] += src[c];
                }
        };
    }
    return id;
}

Tape::Id Tape::rows_to_messages(Id x, int parts) {
    const Tensor& xv = val(x);
    if (parts <= 0 || xv.cols() % static_cast<std::size_t>(parts) != 0)
        throw ShapeMismatchError("rows_to_messages: bad split");
    const std::size_t k = xv.cols() / static_cast<std::size_t>(parts);
    const std::size_t n = xv.rows();
    Tensor out = Tensor::zeros(n * static_cast<std::size_t>(parts), k);
    for (std::size_t r = 0; r < n; ++r)
        for (int j = 0; j < parts; ++j) {
            const double* src = &xv.values[r * xv.cols() +
                                           static_cast<std::size_t>(j) * k];
            double* dst = &out.values[(r * static_cast<std::size_t>(parts) +
                                       static_cast<std::size_t>(j)) * k];
            std::copy(src, src + k, dst);
        }
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        nodes_.back().back = [self, id, x, parts, k, n]() {
            const Tensor& o = self->val(id);
            Tensor& xt = self->mut(x);
            xt.ensure_grad();
            for (std::size_t r = 0; r < n; ++r)
                for (int j = 0; j < parts; ++j) {
                    double* dst = &xt.grad[r * xt.cols() +
                                           static_cast<std::size_t>(j) * k];
                    const double* src =
                        &o.grad[(r * static_cast<std::size_t>(parts) +
                                 static_cast<std::size_t>(j)) * k];
                    for (std::size_t c = 0; c < k; ++c) dst[c] += src[c];
                }
        };
    }
    return id;
}

Tape::Id Tape::concat_rows(const std::vector<Id>& blocks) {
    if (blocks.empty()) throw ShapeMismatchError("concat_rows: empty");
    const std::size_t k = val(blocks[0]).cols();
    std::size_t total = 0;
    for (Id b : blocks) {
        if (val(b).cols() != k)
            throw ShapeMismatchError("concat_rows: column mismatch");
        total += val(b).rows();
    }
    Tensor out = Tensor::zeros(total, k);
    std::size_t row = 0;
    for (Id b : blocks) {
        const Tensor& bv = val(b);
        std::copy(bv.values.begin(), bv.values.end(), &out.values[row * k]);
        row += bv.rows();
    }
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        auto ids = std::make_shared<std::vector<Id>>(blocks);
        nodes_.back().back = [self, id, ids, k]() {
            const Tensor& o = self->val(id);
            std::size_t row = 0;
            for (Id b : *ids) {
                Tensor& bt = self->mut(b);
                bt.ensure_grad();
                for (std::size_t i = 0; i < bt.grad.size(); ++i)
                    bt.grad[i] += o.grad[row * k + i];
                row += bt.rows();
            }
        };
    }
    return id;
}

namespace {

// Sorted stabilized log-sum-exp of the values gathered in `buf`.
double sorted_logsumexp(std::vector<double>& buf) {
    std::sort(buf.begin(), buf.end());
    const double m = buf.back();
    double sum = 0.0;
    for (double v : buf) sum += std::exp(v - m);
    return m + std::log(sum);
}

}  // namespace

Tape::Id Tape::aggregate_smoothmax(Id messages, std::vector<int> target_node,
                                   int num_nodes) {
    const Tensor& mv = val(messages);
    if (target_node.size() != mv.rows())
        throw ShapeMismatchError("aggregate_smoothmax: target count mismatch");
    const std::size_t k = mv.cols();
    for (int t : target_node)
        if (t < 0 || t >= num_nodes)
            throw UniverseMismatchError("aggregate_smoothmax: bad target node");

    std::vector<std::vector<int>> rows_of(static_cast<std::size_t>(num_nodes));
    for (std::size_t r = 0; r < target_node.size(); ++r)
        rows_of[static_cast<std::size_t>(target_node[r])].push_back(
            static_cast<int>(r));

    Tensor out = Tensor::zeros(static_cast<std::size_t>(num_nodes), k);
    std::vector<double> buf;
    for (int n = 0; n < num_nodes; ++n) {
        const auto& rows = rows_of[static_cast<std::size_t>(n)];
        if (rows.empty()) continue;
        for (std::size_t c = 0; c < k; ++c) {
            buf.clear();
            for (int r : rows)
                buf.push_back(mv.values[static_cast<std::size_t>(r) * k + c]);
            out.values[static_cast<std::size_t>(n) * k + c] =
                sorted_logsumexp(buf);
        }
    }
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        auto targets = std::make_shared<std::vector<int>>(std::move(target_node));
        nodes_.back().back = [self, id, messages, targets, k]() {
            const Tensor& o = self->val(id);
            Tensor& mt = self->mut(messages);
            mt.ensure_grad();
            for (std::size_t r = 0; r < targets->size(); ++r) {
                const std::size_t n = static_cast<std::size_t>((*targets)[r]);
                for (std::size_t c = 0; c < k; ++c) {
                    const double y = o.values[n * k + c];
                    const double x = mt.values[r * k + c];
                    mt.grad[r * k + c] += o.grad[n * k + c] * std::exp(x - y);
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::sum_rows_sorted(Id x, std::vector<int> rows) {
    const Tensor& xv = val(x);
    const std::size_t k = xv.cols();
    for (int r : rows)
        if (r < 0 || static_cast<std::size_t>(r) >= xv.rows())
            throw UniverseMismatchError("sum_rows_sorted: row out of range");
    Tensor out = Tensor::zeros(1, k);
    std::vector<double> buf;
    for (std::size_t c = 0; c < k; ++c) {
        buf.clear();
        for (int r : rows)
            buf.push_back(xv.values[static_cast<std::size_t>(r) * k + c]);
        std::sort(buf.begin(), buf.end());
        double sum = 0.0;
        for (double v : buf) sum += v;
        out.values[c] = sum;
    }
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        auto idx = std::make_shared<std::vector<int>>(std::move(rows));
        nodes_.back().back = [self, id, x, idx, k]() {
            const Tensor& o = self->val(id);
            Tensor& xt = self->mut(x);
            xt.ensure_grad();
            for (int r : *idx)
                for (std::size_t c = 0; c < k; ++c)
                    xt.grad[static_cast<std::size_t>(r) * k + c] += o.grad[c];
        };
    }
    return id;
}

Tape::Id Tape::mark_embeddings(int num_nodes, int dim, std::vector<Id> vectors,
                               std::vector<std::vector<int>> marks) {
    if (marks.size() != static_cast<std::size_t>(num_nodes))
        throw ShapeMismatchError("mark_embeddings: mark count mismatch");
    for (Id v : vectors)
        if (val(v).size() != static_cast<std::size_t>(dim))
            throw ShapeMismatchError("mark_embeddings: vector size mismatch");
    Tensor out = Tensor::zeros(static_cast<std::size_t>(num_nodes),
                               static_cast<std::size_t>(dim));
    for (int n = 0; n < num_nodes; ++n)
        for (int v : marks[static_cast<std::size_t>(n)]) {
            const Tensor& vec = val(vectors[static_cast<std::size_t>(v)]);
            for (int c = 0; c < dim; ++c)
                out.values[static_cast<std::size_t>(n) * dim + c] +=
                    vec.values[static_cast<std::size_t>(c)];
        }
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        auto vecs = std::make_shared<std::vector<Id>>(std::move(vectors));
        auto mk = std::make_shared<std::vector<std::vector<int>>>(std::move(marks));
        nodes_.back().back = [self, id, vecs, mk, dim]() {
            const Tensor& o = self->val(id);
            for (std::size_t n = 0; n < mk->size(); ++n)
                for (int v : (*mk)[n]) {
                    Tensor& vt = self->mut((*vecs)[static_cast<std::size_t>(v)]);
                    vt.ensure_grad();
                    for (int c = 0; c < dim; ++c)
                        vt.grad[static_cast<std::size_t>(c)] +=
                            o.grad[n * static_cast<std::size_t>(dim) +
                                   static_cast<std::size_t>(c)];
                }
        };
    }
    return id;
}

Tape::Id Tape::abs_diff(Id scalar_node, double target) {
    const Tensor& sv = val(scalar_node);
    if (sv.size() != 1) throw ShapeMismatchError("abs_diff: not a scalar");
    const double diff = sv.values[0] - target;
    Id id = push(Tensor::scalar(std::fabs(diff)), nullptr);
    if (grad_) {
        auto* self = this;
        nodes_.back().back = [self, id, scalar_node, diff]() {
            const Tensor& o = self->val(id);
            Tensor& st = self->mut(scalar_node);
            st.ensure_grad();
            const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
            st.grad[0] += o.grad[0] * sign;
        };
    }
    return id;
}

Tape::Id Tape::scale(Id x, double factor) {
    const Tensor& xv = val(x);
    Tensor out;
    out.shape = xv.shape;
    out.values.resize(xv.values.size());
    for (std::size_t i = 0; i < xv.values.size(); ++i)
        out.values[i] = xv.values[i] * factor;
    Id id = push(std::move(out), nullptr);
    if (grad_) {
        auto* self = this;
        nodes_.back().back = [self, id, x, factor]() {
            const Tensor& o = self->val(id);
            Tensor& xt = self->mut(x);
            xt.ensure_grad();
            for (std::size_t i = 0; i < o.grad.size(); ++i)
                xt.grad[i] += o.grad[i] * factor;
        };
    }
    return id;
}

void Tape::backward(Id root, double seed) {
    if (!grad_) throw Error("backward on a gradient-disabled tape");
    Tensor& r = mut(root);
    r.ensure_grad();
    if (r.grad.size() != 1)
        throw ShapeMismatchError("backward root must be a scalar");
    r.grad[0] += seed;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        Node& node = nodes_[i];
        if (node.back && !node.t.grad.empty()) node.back();
    }
}

double Tape::scalar_value(Id id) const {
    const Tensor& t = val(id);
    if (t.size() != 1) throw ShapeMismatchError("not a scalar node");
    return t.values[0];
}

Tensor smoothmax(const Tensor& rows) {
    const std::size_t k = rows.cols();
    Tensor out = Tensor::zeros(1, k);
    if (rows.rows() == 0) return out;
    std::vector<double> buf;
    for (std::size_t c = 0; c < k; ++c) {
        buf.clear();
        for (std::size_t r = 0; r < rows.rows(); ++r)
            buf.push_back(rows.at(r, c));
        out.values[c] = sorted_logsumexp(buf);
    }
    return out;
}

double grad_check(
    const std::function<Tape::Id(Tape&, const ParameterSet&, GradSink*)>& build_loss,
    ParameterSet& params, double step, int samples, std::uint64_t seed) {
    GradSink sink(params);
    {
        Tape tape(true);
        Tape::Id loss = build_loss(tape, params, &sink);
        tape.backward(loss);
    }
    auto eval = [&]() {
        Tape tape(false);
        return tape.scalar_value(build_loss(tape, params, nullptr));
    };

    Rng rng(seed);
    // Flat list of (param, offset) coordinates.
    std::vector<std::pair<int, std::size_t>> coords;
    for (int p = 0; p < params.size(); ++p)
        for (std::size_t i = 0; i < params.at(p).value.size(); ++i)
            coords.emplace_back(p, i);
    if (coords.empty()) return 0.0;

    double worst = 0.0;
    const int count = std::min<int>(samples, static_cast<int>(coords.size()));
    rng.shuffle(coords);
    for (int s = 0; s < count; ++s) {
        auto [p, i] = coords[static_cast<std::size_t>(s)];
        double& theta = params.at(p).value.values[i];
        const double saved = theta;
        theta = saved + step;
        const double up = eval();
        theta = saved - step;
        const double down = eval();
        theta = saved;
        const double fd = (up - down) / (2.0 * step);
        const double ad = sink.grads[static_cast<std::size_t>(p)][i];
        const double denom = std::max({std::fabs(fd), std::fabs(ad), 1e-3});
        worst = std::max(worst, std::fabs(fd - ad) / denom);
    }
    return worst;
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    Tensor t = Tensor::zeros(fan_in, fan_out);
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : t.values) v = rng.uniform(-limit, limit);
    return t;
}

std::string format_double17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace rgnn
