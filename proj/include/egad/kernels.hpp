#pragma once
#include <vector>

#include "egad/tensor.hpp"

// Dense kernels. egad::kernels is the production set: row-parallel with
// OpenMP, each output row computed by exactly one thread in a fixed
// arithmetic order, so results are bitwise identical for any thread count.
// egad::serial_ref holds plain textbook loops kept for testing and for the
// kernel_bench comparison target.

namespace egad::kernels {

Tensor matmul(const Tensor& a, const Tensor& b);           // [m,k]x[k,n] -> [m,n]
Tensor matmul_at(const Tensor& a, const Tensor& y);        // a^T y: [m,k],[m,n] -> [k,n]
Tensor matmul_bt(const Tensor& x, const Tensor& y);        // x y^T: [m,n],[k,n] -> [m,k]

Tensor softmax_rows(const Tensor& z, double temperature = 1.0);
Tensor log_softmax_rows(const Tensor& z);

// y = gain * (x - mean)/sqrt(var + eps) + bias, per row; biased variance.
// mean/invstd outputs are n x 1, used by the backward pass.
Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps, Tensor* mean_out = nullptr, Tensor* invstd_out = nullptr);

Tensor gelu(const Tensor& x);
Tensor gelu_grad(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor relu_grad(const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor neg(const Tensor& a);

Tensor row_sum(const Tensor& a);   // [n,m] -> [n,1]
Tensor col_sum(const Tensor& a);   // [n,m] -> [1,m]
Tensor transpose(const Tensor& a);

// entries with column index > row index replaced by value (causal mask)
Tensor masked_fill_causal(const Tensor& a, double value);

Tensor row_scale(const Tensor& a, const std::vector<double>& s); // row i * s[i]
Tensor add_rowvec(const Tensor& a, const Tensor& b);             // [n,m] + [1,m]

Tensor gather_rows(const Tensor& m, const std::vector<int>& idx);
Tensor slice_rows(const Tensor& a, int r0, int r1);
Tensor slice_cols(const Tensor& a, int c0, int c1);
Tensor concat_cols(const std::vector<const Tensor*>& parts);

} // namespace egad::kernels

namespace egad::serial_ref {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_at(const Tensor& a, const Tensor& y);
Tensor matmul_bt(const Tensor& x, const Tensor& y);
Tensor softmax_rows(const Tensor& z, double temperature = 1.0);
Tensor log_softmax_rows(const Tensor& z);
Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps, Tensor* mean_out = nullptr, Tensor* invstd_out = nullptr);
Tensor gelu(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor row_sum(const Tensor& a);
Tensor transpose(const Tensor& a);

} // namespace egad::serial_ref
