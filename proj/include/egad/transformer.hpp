#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "egad/autodiff.hpp"
#include "egad/tensor.hpp"

// Decoder-only transformer used as both teacher and student. Post-norm
// blocks: y = LN(x + Attn(x)); z = LN(y + FFN(y)). Learned additive
// positional embeddings, causal masking via masked fill, no final norm.
// Exposes per-block hidden states and post-softmax attention maps.

namespace egad {

struct ModelConfig {
    int vocab_size = 0;
    int d_model = 128;
    int n_layers = 4;
    int n_heads = 4;
    int d_ff = 0; // 0 means 4 * d_model
    int max_seq_len = 64;
    uint64_t seed = 0;
    std::string activation = "gelu"; // or "relu"

    int ff() const { return d_ff > 0 ? d_ff : 4 * d_model; }
    int head_dim() const { return d_model / n_heads; }
    void validate() const;
};

// 0-indexed into the hidden/attention lists
int midpoint_layer(const ModelConfig& config);

// trace with plain tensors (teacher-side use, diagnostics, tests)
struct ForwardTrace {
    Tensor logits;                               // [seq, vocab]
    std::vector<Tensor> hidden;                  // n_layers x [seq, d_model]
    std::vector<std::vector<Tensor>> attention;  // n_layers x heads x [seq, seq]
};

// trace with graph nodes (student-side use during training)
struct TraceVars {
    Var logits;
    std::vector<Var> hidden;
    std::vector<std::vector<Var>> attention;
};

struct Model {
    ModelConfig cfg;
    std::map<std::string, Tensor> params; // ordered: deterministic iteration

    static Model init(const ModelConfig& config);
    int64_t param_count() const;
    static int64_t expected_param_count(const ModelConfig& config);
};

// builds the forward pass on g; if param_vars is non-null the parameters are
// registered with requires_grad and their node handles are returned by name
TraceVars forward(Graph& g, const Model& m, const std::vector<int>& tokens,
                  std::map<std::string, Var>* param_vars = nullptr);

ForwardTrace forward_trace(const Model& m, const std::vector<int>& tokens);

constexpr double kLayerNormEps = 1e-5;
constexpr double kMaskFill = -1e30;

} // namespace egad
