#pragma once
#include <string>
#include <vector>

#include "egad/autodiff.hpp"
#include "egad/tensor.hpp"

// Distillation loss terms. Scalar forms are the spec'd per-token
// operations; the *_vec builders register the same math on an autodiff
// graph for training. Teacher-side quantities are always plain constants.

namespace egad {

// KL(p_t || p_s) over probability rows; +inf when p_t has mass where p_s
// has none (distinct infinite-loss signal, not an exception)
double kl_divergence(const std::vector<double>& p_t, const std::vector<double>& p_s);

// KL(softmax(z_t/T) || softmax(z_s/T)) from logit rows
double tempered_kl(const std::vector<double>& z_t, const std::vector<double>& z_s,
                   double temperature);

// ||phi_t - phi_s * proj||^2 / d_teacher for one token
double feature_loss(const std::vector<double>& phi_t, const std::vector<double>& phi_s,
                    const Tensor& proj);

// squared L2 of the head-averaged attention rows for token i, divided by seq
double attention_loss(const std::vector<Tensor>& attn_t_heads,
                      const std::vector<Tensor>& attn_s_heads, int token);

// gated per-token combination
double token_loss(double kl_i, double feat_i, double attn_i, bool deep, double lambda);

// sum_i w_i * L_i, divided by count when reduction == "mean"
double egad_total(const std::vector<double>& weights, const std::vector<double>& token_losses,
                  const std::string& reduction = "mean");

struct LossBreakdown {
    std::vector<double> per_token_kl;
    std::vector<double> per_token_feat; // zero where mask is false
    std::vector<double> per_token_attn; // zero where mask is false
    std::vector<double> per_token_total;
    double weighted_total = 0.0;
};

// ===== graph builders =====

// teacher probabilities at per-token temperatures, plain tensor [n,V]
Tensor teacher_tempered_probs(const Tensor& teacher_logits, const std::vector<double>& temps);

// per-token tempered KL column [n,1] as a graph node; teacher side constant.
// compensate_t2 multiplies token i by T_i^2 (classical KD rescale, off by default).
Var tempered_kl_vec(Graph& g, Var student_logits, const Tensor& teacher_logits,
                    const std::vector<double>& temps, bool compensate_t2 = false);

// per-token feature loss column [k,1] for the gathered deep tokens
Var feature_loss_vec(Graph& g, Var phi_s_deep, Var proj, const Tensor& phi_t_deep);

// per-token attention loss column [k,1]; rows are head-averaged attention
// rows of the deep tokens; seq is the full row length (key positions)
Var attention_loss_vec(Graph& g, Var attn_s_rows_deep, const Tensor& attn_t_rows_deep, int seq);

// head-averaged attention map as a graph node
Var head_average(Graph& g, const std::vector<Var>& heads);

} // namespace egad
