#pragma once
#include <cstdint>
#include <vector>

#include "egad/tensor.hpp"

// Define-by-run reverse-mode autodiff over dense matrices. A Graph is
// rebuilt every training step and owned by one thread. Node ids are
// creation order, which is a topological order, so backward is a single
// reverse sweep. Gradients accumulate: running backward twice without a
// fresh graph doubles them. Every forward primitive checks its output for
// NaN/Inf and throws NumericalError instead of propagating silently.

namespace egad {

class Graph;

struct Var {
    Graph* g = nullptr;
    int id = -1;
    bool valid() const { return g != nullptr && id >= 0; }
    const Tensor& value() const;
    const Tensor& grad() const; // empty tensor if nothing accumulated
};

class Graph {
public:
    Graph();
    ~Graph();
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Var input(Tensor v, bool requires_grad);
    Var constant(Tensor v) { return input(std::move(v), false); }

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b); // elementwise
    Var scale(Var a, double c);
    Var exp(Var a);
    Var log(Var a);
    Var neg(Var a);
    Var matmul(Var a, Var b);
    Var transpose(Var a);
    Var row_sum(Var a);  // [n,m] -> [n,1]
    Var col_sum(Var a);  // [n,m] -> [1,m]
    Var sum_all(Var a);  // -> [1,1]
    Var mean_all(Var a); // -> [1,1]
    Var softmax_rows(Var a, double temperature = 1.0);
    Var log_softmax_rows(Var a);
    Var row_scale(Var a, std::vector<double> s); // row i scaled by s[i], s constant
    Var add_rowvec(Var a, Var b);                // [n,m] + [1,m] broadcast
    Var layer_norm(Var x, Var gain, Var bias, double eps);
    Var gelu(Var a);
    Var relu(Var a);
    Var masked_fill_causal(Var a, double value); // entries j > i replaced by value
    Var gather_rows(Var m, std::vector<int> idx); // embedding lookup
    Var slice_rows(Var a, int r0, int r1);
    Var slice_cols(Var a, int c0, int c1);       // split along last axis
    Var concat_cols(const std::vector<Var>& parts);

    // reverse sweep from a scalar root; seed is the incoming gradient
    void backward(Var root, double seed = 1.0);

    const Tensor& value(int id) const;
    const Tensor& grad(int id) const;
    bool requires_grad(int id) const;
    size_t node_count() const;

private:
    struct Node;
    std::vector<Node> nodes_;
    int push(Node n, const char* opname);
    void check(Var v) const;
};

} // namespace egad
