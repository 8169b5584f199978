#include "egad/autodiff.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "egad/kernels.hpp"

namespace egad {

namespace {

enum class Op : uint8_t {
    Input, Add, Sub, Mul, Scale, Exp, Log, Neg,
    MatMul, Transpose, RowSum, ColSum, SumAll, MeanAll,
    Softmax, LogSoftmax, RowScale, AddRowVec,
    LayerNorm, Gelu, Relu, MaskedFillCausal,
    GatherRows, SliceRows, SliceCols, ConcatCols,
};

// accumulate delta into possibly-unallocated gradient
void accum(Tensor& g, const Tensor& delta) {
    if (g.size() == 0) {
        g = delta;
        return;
    }
    for (size_t i = 0; i < g.size(); ++i) g.data[i] += delta.data[i];
}

void ensure_zeros(Tensor& g, int rows, int cols) {
    if (g.size() == 0) g = Tensor(rows, cols);
}

} // namespace

struct Graph::Node {
    Op op = Op::Input;
    int a = -1, b = -1, c = -1;
    std::vector<int> many;
    Tensor value;
    Tensor grad;
    bool rg = false;
    double scalar = 0.0;       // Scale factor / mask fill / eps / softmax temperature
    std::vector<double> rowv;  // RowScale factors
    std::vector<int> idx;      // GatherRows indices
    int i0 = 0, i1 = 0;        // slice bounds
    Tensor saved_a, saved_b;   // layer_norm mean / invstd
};

Graph::Graph() { nodes_.reserve(256); }
Graph::~Graph() = default;

const Tensor& Var::value() const { return g->value(id); }
const Tensor& Var::grad() const { return g->grad(id); }

void Graph::check(Var v) const {
    if (v.g != this || v.id < 0 || size_t(v.id) >= nodes_.size())
        throw UsageError("autodiff: Var does not belong to this graph");
}

int Graph::push(Node n, const char* opname) {
    if (!n.value.all_finite())
        throw NumericalError(std::string("non-finite value produced by ") + opname);
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
}

Var Graph::input(Tensor v, bool requires_grad) {
    Node n;
    n.op = Op::Input;
    n.value = std::move(v);
    n.rg = requires_grad;
    return {this, push(std::move(n), "input")};
}

#define BINARY_COMMON(A, B)       \
    check(A);                     \
    check(B);                     \
    Node n;                       \
    n.a = (A).id;                 \
    n.b = (B).id;                 \
    n.rg = nodes_[(A).id].rg || nodes_[(B).id].rg

#define UNARY_COMMON(A)  \
    check(A);            \
    Node n;              \
    n.a = (A).id;        \
    n.rg = nodes_[(A).id].rg

Var Graph::add(Var a, Var b) {
    BINARY_COMMON(a, b);
    n.op = Op::Add;
    n.value = kernels::add(nodes_[a.id].value, nodes_[b.id].value);
    return {this, push(std::move(n), "add")};
}

Var Graph::sub(Var a, Var b) {
    BINARY_COMMON(a, b);
    n.op = Op::Sub;
    n.value = kernels::sub(nodes_[a.id].value, nodes_[b.id].value);
    return {this, push(std::move(n), "sub")};
}

Var Graph::mul(Var a, Var b) {
    BINARY_COMMON(a, b);
    n.op = Op::Mul;
    n.value = kernels::mul(nodes_[a.id].value, nodes_[b.id].value);
    return {this, push(std::move(n), "mul")};
}

Var Graph::scale(Var a, double c) {
    UNARY_COMMON(a);
    n.op = Op::Scale;
    n.scalar = c;
    n.value = kernels::scale(nodes_[a.id].value, c);
    return {this, push(std::move(n), "scale")};
}

Var Graph::exp(Var a) {
    UNARY_COMMON(a);
    n.op = Op::Exp;
    n.value = kernels::exp(nodes_[a.id].value);
    return {this, push(std::move(n), "exp")};
}

Var Graph::log(Var a) {
    UNARY_COMMON(a);
    n.op = Op::Log;
    n.value = kernels::log(nodes_[a.id].value);
    return {this, push(std::move(n), "log")};
}

Var Graph::neg(Var a) {
    UNARY_COMMON(a);
    n.op = Op::Neg;
    n.value = kernels::neg(nodes_[a.id].value);
    return {this, push(std::move(n), "neg")};
}

Var Graph::matmul(Var a, Var b) {
    BINARY_COMMON(a, b);
    n.op = Op::MatMul;
    n.value = kernels::matmul(nodes_[a.id].value, nodes_[b.id].value);
    return {this, push(std::move(n), "matmul")};
}

Var Graph::transpose(Var a) {
    UNARY_COMMON(a);
    n.op = Op::Transpose;
    n.value = kernels::transpose(nodes_[a.id].value);
    return {this, push(std::move(n), "transpose")};
}

Var Graph::row_sum(Var a) {
    UNARY_COMMON(a);
    n.op = Op::RowSum;
    n.value = kernels::row_sum(nodes_[a.id].value);
    return {this, push(std::move(n), "row_sum")};
}

Var Graph::col_sum(Var a) {
    UNARY_COMMON(a);
    n.op = Op::ColSum;
    n.value = kernels::col_sum(nodes_[a.id].value);
    return {this, push(std::move(n), "col_sum")};
}

Var Graph::sum_all(Var a) {
    UNARY_COMMON(a);
    n.op = Op::SumAll;
    const Tensor& av = nodes_[a.id].value;
    Tensor out(1, 1);
    double s = 0.0;
    for (double v : av.data) s += v;
    out.at(0, 0) = s;
    n.value = std::move(out);
    return {this, push(std::move(n), "sum_all")};
}

Var Graph::mean_all(Var a) {
    UNARY_COMMON(a);
    n.op = Op::MeanAll;
    const Tensor& av = nodes_[a.id].value;
    if (av.size() == 0) throw DimensionError("mean_all: empty tensor");
    Tensor out(1, 1);
    double s = 0.0;
    for (double v : av.data) s += v;
    out.at(0, 0) = s / double(av.size());
    n.value = std::move(out);
    return {this, push(std::move(n), "mean_all")};
}

Var Graph::softmax_rows(Var a, double temperature) {
    UNARY_COMMON(a);
    n.op = Op::Softmax;
    n.scalar = temperature;
    n.value = kernels::softmax_rows(nodes_[a.id].value, temperature);
    return {this, push(std::move(n), "softmax_rows")};
}

Var Graph::log_softmax_rows(Var a) {
    UNARY_COMMON(a);
    n.op = Op::LogSoftmax;
    n.value = kernels::log_softmax_rows(nodes_[a.id].value);
    return {this, push(std::move(n), "log_softmax_rows")};
}

Var Graph::row_scale(Var a, std::vector<double> s) {
    UNARY_COMMON(a);
    n.op = Op::RowScale;
    n.value = kernels::row_scale(nodes_[a.id].value, s);
    n.rowv = std::move(s);
    return {this, push(std::move(n), "row_scale")};
}

Var Graph::add_rowvec(Var a, Var b) {
    BINARY_COMMON(a, b);
    n.op = Op::AddRowVec;
    n.value = kernels::add_rowvec(nodes_[a.id].value, nodes_[b.id].value);
    return {this, push(std::move(n), "add_rowvec")};
}

Var Graph::layer_norm(Var x, Var gain, Var bias, double eps) {
    check(x);
    check(gain);
    check(bias);
    Node n;
    n.op = Op::LayerNorm;
    n.a = x.id;
    n.b = gain.id;
    n.c = bias.id;
    n.rg = nodes_[x.id].rg || nodes_[gain.id].rg || nodes_[bias.id].rg;
    n.scalar = eps;
    n.value = kernels::layer_norm_rows(nodes_[x.id].value, nodes_[gain.id].value,
                                       nodes_[bias.id].value, eps, &n.saved_a, &n.saved_b);
    return {this, push(std::move(n), "layer_norm")};
}

Var Graph::gelu(Var a) {
    UNARY_COMMON(a);
    n.op = Op::Gelu;
    n.value = kernels::gelu(nodes_[a.id].value);
    return {this, push(std::move(n), "gelu")};
}

Var Graph::relu(Var a) {
    UNARY_COMMON(a);
    n.op = Op::Relu;
    n.value = kernels::relu(nodes_[a.id].value);
    return {this, push(std::move(n), "relu")};
}

Var Graph::masked_fill_causal(Var a, double value) {
    UNARY_COMMON(a);
    n.op = Op::MaskedFillCausal;
    n.scalar = value;
    n.value = kernels::masked_fill_causal(nodes_[a.id].value, value);
    return {this, push(std::move(n), "masked_fill_causal")};
}

Var Graph::gather_rows(Var m, std::vector<int> idx) {
    UNARY_COMMON(m);
    n.op = Op::GatherRows;
    n.value = kernels::gather_rows(nodes_[m.id].value, idx);
    n.idx = std::move(idx);
    return {this, push(std::move(n), "gather_rows")};
}

Var Graph::slice_rows(Var a, int r0, int r1) {
    UNARY_COMMON(a);
    n.op = Op::SliceRows;
    n.i0 = r0;
    n.i1 = r1;
    n.value = kernels::slice_rows(nodes_[a.id].value, r0, r1);
    return {this, push(std::move(n), "slice_rows")};
}

Var Graph::slice_cols(Var a, int c0, int c1) {
    UNARY_COMMON(a);
    n.op = Op::SliceCols;
    n.i0 = c0;
    n.i1 = c1;
    n.value = kernels::slice_cols(nodes_[a.id].value, c0, c1);
    return {this, push(std::move(n), "slice_cols")};
}

Var Graph::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw DimensionError("concat_cols: no inputs");
    Node n;
    n.op = Op::ConcatCols;
    std::vector<const Tensor*> ptrs;
    for (Var p : parts) {
        check(p);
        n.many.push_back(p.id);
        n.rg = n.rg || nodes_[p.id].rg;
        ptrs.push_back(&nodes_[p.id].value);
    }
    n.value = kernels::concat_cols(ptrs);
    return {this, push(std::move(n), "concat_cols")};
}

const Tensor& Graph::value(int id) const { return nodes_.at(id).value; }

const Tensor& Graph::grad(int id) const {
    static const Tensor empty;
    const Node& n = nodes_.at(id);
    return n.grad.size() ? n.grad : empty;
}

bool Graph::requires_grad(int id) const { return nodes_.at(id).rg; }

size_t Graph::node_count() const { return nodes_.size(); }

void Graph::backward(Var root, double seed) {
    check(root);
    Node& r = nodes_[root.id];
    if (r.value.rows != 1 || r.value.cols != 1)
        throw UsageError("backward: root must be a 1x1 scalar, got " + r.value.shape_str());
    if (!r.rg) return; // nothing depends on any trainable input
    ensure_zeros(r.grad, 1, 1);
    r.grad.at(0, 0) += seed;

    for (int id = root.id; id >= 0; --id) {
        Node& n = nodes_[id];
        if (!n.rg || n.grad.size() == 0) continue;
        const Tensor& g = n.grad;
        switch (n.op) {
            case Op::Input:
                break;
            case Op::Add: {
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, g);
                if (nodes_[n.b].rg) accum(nodes_[n.b].grad, g);
                break;
            }
            case Op::Sub: {
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, g);
                if (nodes_[n.b].rg) accum(nodes_[n.b].grad, kernels::neg(g));
                break;
            }
            case Op::Mul: {
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, kernels::mul(g, nodes_[n.b].value));
                if (nodes_[n.b].rg) accum(nodes_[n.b].grad, kernels::mul(g, nodes_[n.a].value));
                break;
            }
            case Op::Scale: {
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, kernels::scale(g, n.scalar));
                break;
            }
            case Op::Exp: {
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, kernels::mul(g, n.value));
                break;
            }
            case Op::Log: {
                if (nodes_[n.a].rg) {
                    const Tensor& av = nodes_[n.a].value;
                    Tensor d(g.rows, g.cols);
                    for (size_t i = 0; i < g.size(); ++i) d.data[i] = g.data[i] / av.data[i];
                    accum(nodes_[n.a].grad, d);
                }
                break;
            }
            case Op::Neg: {
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, kernels::neg(g));
                break;
            }
            case Op::MatMul: {
                if (nodes_[n.a].rg)
                    accum(nodes_[n.a].grad, kernels::matmul_bt(g, nodes_[n.b].value));
                if (nodes_[n.b].rg)
                    accum(nodes_[n.b].grad, kernels::matmul_at(nodes_[n.a].value, g));
                break;
            }
            case Op::Transpose: {
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, kernels::transpose(g));
                break;
            }
            case Op::RowSum: {
                if (nodes_[n.a].rg) {
                    const Tensor& av = nodes_[n.a].value;
                    Tensor d(av.rows, av.cols);
                    for (int i = 0; i < av.rows; ++i) {
                        const double gi = g.at(i, 0);
                        double* di = d.row_ptr(i);
                        for (int j = 0; j < av.cols; ++j) di[j] = gi;
                    }
                    accum(nodes_[n.a].grad, d);
                }
                break;
            }
            case Op::ColSum: {
                if (nodes_[n.a].rg) {
                    const Tensor& av = nodes_[n.a].value;
                    Tensor d(av.rows, av.cols);
                    for (int i = 0; i < av.rows; ++i)
                        for (int j = 0; j < av.cols; ++j) d.at(i, j) = g.at(0, j);
                    accum(nodes_[n.a].grad, d);
                }
                break;
            }
            case Op::SumAll: {
                if (nodes_[n.a].rg) {
                    const Tensor& av = nodes_[n.a].value;
                    Tensor d(av.rows, av.cols, g.at(0, 0));
                    accum(nodes_[n.a].grad, d);
                }
                break;
            }
            case Op::MeanAll: {
                if (nodes_[n.a].rg) {
                    const Tensor& av = nodes_[n.a].value;
                    Tensor d(av.rows, av.cols, g.at(0, 0) / double(av.size()));
                    accum(nodes_[n.a].grad, d);
                }
                break;
            }
            case Op::Softmax: {
                // y = softmax(x/T); dx = (1/T) * (dy - rowdot(dy, y)) .* y
                if (nodes_[n.a].rg) {
                    const Tensor& y = n.value;
                    Tensor d(y.rows, y.cols);
                    const double invT = 1.0 / n.scalar;
                    for (int i = 0; i < y.rows; ++i) {
                        const double* yi = y.row_ptr(i);
                        const double* gi = g.row_ptr(i);
                        double dot = 0.0;
                        for (int j = 0; j < y.cols; ++j) dot += gi[j] * yi[j];
                        double* di = d.row_ptr(i);
                        for (int j = 0; j < y.cols; ++j) di[j] = invT * (gi[j] - dot) * yi[j];
                    }
                    accum(nodes_[n.a].grad, d);
                }
                break;
            }
            case Op::LogSoftmax: {
                // y = log softmax(x); dx = dy - exp(y) * rowsum(dy)
                if (nodes_[n.a].rg) {
                    const Tensor& y = n.value;
                    Tensor d(y.rows, y.cols);
                    for (int i = 0; i < y.rows; ++i) {
                        const double* yi = y.row_ptr(i);
                        const double* gi = g.row_ptr(i);
                        double s = 0.0;
                        for (int j = 0; j < y.cols; ++j) s += gi[j];
                        double* di = d.row_ptr(i);
                        for (int j = 0; j < y.cols; ++j) di[j] = gi[j] - std::exp(yi[j]) * s;
                    }
                    accum(nodes_[n.a].grad, d);
                }
                break;
            }
            case Op::RowScale: {
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, kernels::row_scale(g, n.rowv));
                break;
            }
            case Op::AddRowVec: {
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, g);
                if (nodes_[n.b].rg) accum(nodes_[n.b].grad, kernels::col_sum(g));
                break;
            }
            case Op::LayerNorm: {
                const Tensor& x = nodes_[n.a].value;
                const Tensor& gain = nodes_[n.b].value;
                const Tensor& mean = n.saved_a;
                const Tensor& invstd = n.saved_b;
                const int m = x.cols;
                Tensor dx(x.rows, x.cols);
                Tensor dgain(1, m), dbias(1, m);
                for (int i = 0; i < x.rows; ++i) {
                    const double mu = mean.at(i, 0);
                    const double is = invstd.at(i, 0);
                    const double* xi = x.row_ptr(i);
                    const double* gi = g.row_ptr(i);
                    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
                    for (int j = 0; j < m; ++j) {
                        const double xhat = (xi[j] - mu) * is;
                        const double dxhat = gi[j] * gain.at(0, j);
                        dgain.at(0, j) += gi[j] * xhat;
                        dbias.at(0, j) += gi[j];
                        mean_dxhat += dxhat;
                        mean_dxhat_xhat += dxhat * xhat;
                    }
                    mean_dxhat /= m;
                    mean_dxhat_xhat /= m;
                    double* di = dx.row_ptr(i);
                    for (int j = 0; j < m; ++j) {
                        const double xhat = (xi[j] - mu) * is;
                        const double dxhat = gi[j] * gain.at(0, j);
                        di[j] = is * (dxhat - mean_dxhat - xhat * mean_dxhat_xhat);
                    }
                }
                if (nodes_[n.a].rg) accum(nodes_[n.a].grad, dx);
                if (nodes_[n.b].rg) accum(nodes_[n.b].grad, dgain);
                if (nodes_[n.c].rg) accum(nodes_[n.c].grad, dbias);
                break;
            }
            case Op::Gelu: {
                if (nodes_[n.a].rg)
                    accum(nodes_[n.a].grad, kernels::mul(g, kernels::gelu_grad(nodes_[n.a].value)));
                break;
            }
            case Op::Relu: {
                if (nodes_[n.a].rg)
                    accum(nodes_[n.a].grad, kernels::mul(g, kernels::relu_grad(nodes_[n.a].value)));
                break;
            }
            case Op::MaskedFillCausal: {
                // filled entries carry no gradient
                if (nodes_[n.a].rg) {
                    Tensor d = g;
                    for (int i = 0; i < d.rows; ++i) {
                        double* di = d.row_ptr(i);
                        for (int j = i + 1; j < d.cols; ++j) di[j] = 0.0;
                    }
                    accum(nodes_[n.a].grad, d);
                }
                break;
            }
            case Op::GatherRows: {
                if (nodes_[n.a].rg) {
                    const Tensor& av = nodes_[n.a].value;
                    Node& src = nodes_[n.a];
                    ensure_zeros(src.grad, av.rows, av.cols);
                    for (size_t r = 0; r < n.idx.size(); ++r) {
                        double* dst = src.grad.row_ptr(n.idx[r]);
                        const double* gr = g.row_ptr(int(r));
                        for (int j = 0; j < av.cols; ++j) dst[j] += gr[j];
                    }
                }
                break;
            }
            case Op::SliceRows: {
                if (nodes_[n.a].rg) {
                    const Tensor& av = nodes_[n.a].value;
                    Node& src = nodes_[n.a];
                    ensure_zeros(src.grad, av.rows, av.cols);
                    for (int i = n.i0; i < n.i1; ++i) {
                        double* dst = src.grad.row_ptr(i);
                        const double* gr = g.row_ptr(i - n.i0);
                        for (int j = 0; j < av.cols; ++j) dst[j] += gr[j];
                    }
                }
                break;
            }
            case Op::SliceCols: {
                if (nodes_[n.a].rg) {
                    const Tensor& av = nodes_[n.a].value;
                    Node& src = nodes_[n.a];
                    ensure_zeros(src.grad, av.rows, av.cols);
                    for (int i = 0; i < av.rows; ++i) {
                        double* dst = src.grad.row_ptr(i);
                        const double* gr = g.row_ptr(i);
                        for (int j = n.i0; j < n.i1; ++j) dst[j] += gr[j - n.i0];
                    }
                }
                break;
            }
            case Op::ConcatCols: {
                int off = 0;
                for (int pid : n.many) {
                    const Tensor& pv = nodes_[pid].value;
                    if (nodes_[pid].rg) {
                        Tensor d(pv.rows, pv.cols);
                        for (int i = 0; i < pv.rows; ++i) {
                            const double* gr = g.row_ptr(i) + off;
                            double* di = d.row_ptr(i);
                            for (int j = 0; j < pv.cols; ++j) di[j] = gr[j];
                        }
                        accum(nodes_[pid].grad, d);
                    }
                    off += pv.cols;
                }
                break;
            }
        }
    }
}

} // namespace egad
