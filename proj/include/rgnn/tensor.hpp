#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rgnn/core.hpp"

namespace rgnn {

// Dense row-major tensor of 64-bit reals, at most two dimensions.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;
    std::vector<double> grad;  // optional; same length as values when present

    Tensor() = default;
    static Tensor zeros(std::size_t rows, std::size_t cols);
    static Tensor vec(std::size_t n);
    static Tensor scalar(double v);

    std::size_t rows() const;
    std::size_t cols() const;
    std::size_t size() const { return values.size(); }
    double& at(std::size_t r, std::size_t c);
    double at(std::size_t r, std::size_t c) const;
    void ensure_grad();
    void zero_grad();
};

// Deterministic RNG with portable derived draws (mt19937_64 sequence is
// pinned by the standard; the distributions here avoid the
// implementation-defined std:: ones).
struct Rng {
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    std::uint64_t next() { return gen(); }
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);
    std::uint64_t below(std::uint64_t n);   // [0, n), unbiased
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }
    std::mt19937_64 gen;
};

// Named parameter tensors with their Adam moment buffers.
class ParameterSet {
public:
    struct Param {
        std::string name;
        Tensor value;  // gradient accumulates in value.grad
        Tensor adam_m;
        Tensor adam_v;
    };

    int add(const std::string& name, Tensor init);
    int index_of(const std::string& name) const;  // -1 when absent
    Param& at(int index) { return params_[static_cast<std::size_t>(index)]; }
    const Param& at(int index) const { return params_[static_cast<std::size_t>(index)]; }
    int size() const { return static_cast<int>(params_.size()); }
    std::size_t value_count() const;
    void zero_grad();
    void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999,
                   double eps = 1e-8);
    std::int64_t steps() const { return step_count_; }
    void reset_optimizer();

private:
    std::vector<Param> params_;
    std::map<std::string, int> index_;
    std::int64_t step_count_ = 0;
};

// Per-evaluation gradient buffer, one slot per parameter. Results are folded
// into the ParameterSet in parameter order, so batch gradients do not depend
// on evaluation interleaving.
struct GradSink {
    explicit GradSink(const ParameterSet& params);
    std::vector<std::vector<double>> grads;
    void clear();
    void accumulate(const GradSink& other);
    void add_into(ParameterSet& params) const;
};

// Reverse-mode computation tape. Nodes only reference earlier nodes, so the
// backward sweep is a reverse scan. A tape is single-threaded; independent
// tapes may run concurrently over one read-only ParameterSet.
class Tape {
public:
    using Id = std::int32_t;

    explicit Tape(bool grad_enabled = true) : grad_(grad_enabled) {}
    bool grad_enabled() const { return grad_; }

    Id leaf(Tensor value);
    Id param(const ParameterSet& params, int param_index, GradSink* sink);
    Id zeros(std::size_t rows, std::size_t cols);

    // y = x * w + b, with x: n x a, w: a x b, b: 1 x b broadcast over rows.
    Id linear(Id x, Id w, Id b);
    Id mish(Id x);
    Id add(Id a, Id b);
    Id concat_cols(Id a, Id b);
    // out[r][j*k + c] = table[nodes[r*group + j]][c]
    Id gather_concat(Id table, std::vector<int> nodes, int group);
    // n x (parts*k)  ->  (n*parts) x k, row r*parts+j = part j of row r
    Id rows_to_messages(Id x, int parts);
    Id concat_rows(const std::vector<Id>& blocks);
    // Componentwise log-sum-exp of the messages addressed to each node.
    // Values are sorted before reduction, so the result depends only on the
    // multiset of messages per node. Nodes with no message get zeros.
    Id aggregate_smoothmax(Id messages, std::vector<int> target_node,
                           int num_nodes);
    // Componentwise sorted sum of the selected rows -> 1 x k.
    Id sum_rows_sorted(Id x, std::vector<int> rows);
    // out (num_nodes x dim); row n = sum of vectors[i] over i in marks[n].
    Id mark_embeddings(int num_nodes, int dim, std::vector<Id> vectors,
                       std::vector<std::vector<int>> marks);
    Id abs_diff(Id scalar_node, double target);
    Id scale(Id x, double factor);

    void backward(Id root, double seed = 1.0);

    const Tensor& val(Id id) const { return nodes_[static_cast<std::size_t>(id)].t; }
    double scalar_value(Id id) const;
    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Tensor t;
        std::function<void()> back;  // empty for leaves
    };
    std::vector<Node> nodes_;
    bool grad_;

    Id push(Tensor t, std::function<void()> back);
    Tensor& mut(Id id) { return nodes_[static_cast<std::size_t>(id)].t; }
};

// Standalone componentwise smooth maximum (log-sum-exp), n x k -> 1 x k.
// An empty input yields the zero vector.
Tensor smoothmax(const Tensor& rows);

double mish_value(double x);

// Compares reverse-mode gradients against central finite differences at
// `samples` randomly chosen parameter coordinates and reports the largest
// relative error, |ad - fd| / max(|ad|, |fd|, 1e-3).
double grad_check(
    const std::function<Tape::Id(Tape&, const ParameterSet&, GradSink*)>& build_loss,
    ParameterSet& params, double step, int samples, std::uint64_t seed);

// Glorot-uniform weight tensor; biases are zero-initialized elsewhere.
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

std::string format_double17(double v);

}  // namespace rgnn
