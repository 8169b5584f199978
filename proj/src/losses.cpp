#include "egad/losses.hpp"

#include <cmath>
#include <limits>

#include "egad/kernels.hpp"

namespace egad {

double kl_divergence(const std::vector<double>& p_t, const std::vector<double>& p_s) {
    if (p_t.size() != p_s.size()) throw DimensionError("kl_divergence: length mismatch");
    double kl = 0.0;
    for (size_t i = 0; i < p_t.size(); ++i) {
        if (p_t[i] == 0.0) continue; // 0 ln 0 = 0
        if (p_s[i] <= 0.0) return std::numeric_limits<double>::infinity();
        kl += p_t[i] * (std::log(p_t[i]) - std::log(p_s[i]));
    }
    return kl;
}

static std::vector<double> softmax_vec(const std::vector<double>& z, double t) {
    Tensor row(1, int(z.size()));
    for (size_t i = 0; i < z.size(); ++i) row.data[i] = z[i];
    Tensor p = kernels::softmax_rows(row, t);
    return p.data;
}

double tempered_kl(const std::vector<double>& z_t, const std::vector<double>& z_s,
                   double temperature) {
    if (temperature <= 0.0) throw DomainError("tempered_kl: temperature must be > 0");
    if (z_t.size() != z_s.size()) throw DimensionError("tempered_kl: length mismatch");
    return kl_divergence(softmax_vec(z_t, temperature), softmax_vec(z_s, temperature));
}

double feature_loss(const std::vector<double>& phi_t, const std::vector<double>& phi_s,
                    const Tensor& proj) {
    if (int(phi_s.size()) != proj.rows || int(phi_t.size()) != proj.cols)
        throw DimensionError("feature_loss: projection is " + proj.shape_str() +
                             ", phi_s " + std::to_string(phi_s.size()) +
                             ", phi_t " + std::to_string(phi_t.size()));
    double acc = 0.0;
    for (int j = 0; j < proj.cols; ++j) {
        double pj = 0.0;
        for (int i = 0; i < proj.rows; ++i) pj += phi_s[i] * proj.at(i, j);
        const double d = phi_t[j] - pj;
        acc += d * d;
    }
    return acc / double(proj.cols);
}

static std::vector<double> head_avg_row(const std::vector<Tensor>& heads, int token) {
    if (heads.empty()) throw InputError("attention_loss: no heads");
    const int seq = heads[0].cols;
    std::vector<double> avg(seq, 0.0);
    for (const Tensor& h : heads) {
        if (h.cols != seq) throw InputError("attention_loss: head width mismatch");
        const double* r = h.row_ptr(token);
        for (int j = 0; j < seq; ++j) avg[j] += r[j];
    }
    for (double& v : avg) v /= double(heads.size());
    return avg;
}

double attention_loss(const std::vector<Tensor>& attn_t_heads,
                      const std::vector<Tensor>& attn_s_heads, int token) {
    const std::vector<double> rt = head_avg_row(attn_t_heads, token);
    const std::vector<double> rs = head_avg_row(attn_s_heads, token);
    if (rt.size() != rs.size())
        throw InputError("attention_loss: sequence length mismatch " +
                         std::to_string(rt.size()) + " vs " + std::to_string(rs.size()));
    double acc = 0.0;
    for (size_t j = 0; j < rt.size(); ++j) {
        const double d = rt[j] - rs[j];
        acc += d * d;
    }
    return acc / double(rt.size());
}

double token_loss(double kl_i, double feat_i, double attn_i, bool deep, double lambda) {
    return deep ? kl_i + lambda * (feat_i + attn_i) : kl_i;
}

double egad_total(const std::vector<double>& weights, const std::vector<double>& token_losses,
                  const std::string& reduction) {
    if (weights.size() != token_losses.size())
        throw InputError("egad_total: length mismatch");
    if (reduction != "mean" && reduction != "sum")
        throw ConfigError("egad_total: reduction must be mean or sum, got " + reduction);
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) acc += weights[i] * token_losses[i];
    if (reduction == "mean" && !weights.empty()) acc /= double(weights.size());
    return acc;
}

// ===== graph builders =====

Tensor teacher_tempered_probs(const Tensor& teacher_logits, const std::vector<double>& temps) {
    if (int(temps.size()) != teacher_logits.rows)
        throw DimensionError("teacher_tempered_probs: temperature count != rows");
    std::vector<double> inv(temps.size());
    for (size_t i = 0; i < temps.size(); ++i) {
        if (temps[i] <= 0.0) throw DomainError("teacher_tempered_probs: temperature must be > 0");
        inv[i] = 1.0 / temps[i];
    }
    return kernels::softmax_rows(kernels::row_scale(teacher_logits, inv), 1.0);
}

Var tempered_kl_vec(Graph& g, Var student_logits, const Tensor& teacher_logits,
                    const std::vector<double>& temps, bool compensate_t2) {
    const Tensor& zs = student_logits.value();
    if (!zs.same_shape(teacher_logits))
        throw DimensionError("tempered_kl_vec: logits shape mismatch");
    std::vector<double> inv(temps.size());
    for (size_t i = 0; i < temps.size(); ++i) {
        if (temps[i] <= 0.0) throw DomainError("tempered_kl_vec: temperature must be > 0");
        inv[i] = 1.0 / temps[i];
    }
    const Tensor pt = teacher_tempered_probs(teacher_logits, temps);

    // -sum_v p_t ln p_t per row, the constant part of the KL
    Tensor neg_ent(teacher_logits.rows, 1);
    for (int i = 0; i < pt.rows; ++i) {
        double s = 0.0;
        const double* p = pt.row_ptr(i);
        for (int j = 0; j < pt.cols; ++j)
            if (p[j] > 0.0) s += p[j] * std::log(p[j]);
        neg_ent.at(i, 0) = s;
    }

    Var lsm = g.log_softmax_rows(g.row_scale(student_logits, inv));
    Var cross = g.neg(g.row_sum(g.mul(g.constant(pt), lsm))); // -sum p_t ln p_s
    Var kl = g.add(cross, g.constant(std::move(neg_ent)));
    if (compensate_t2) {
        std::vector<double> t2(temps.size());
        for (size_t i = 0; i < temps.size(); ++i) t2[i] = temps[i] * temps[i];
        kl = g.row_scale(kl, t2);
    }
    return kl;
}

Var feature_loss_vec(Graph& g, Var phi_s_deep, Var proj, const Tensor& phi_t_deep) {
    const Tensor& ps = phi_s_deep.value();
    const Tensor& pj = proj.value();
    if (ps.cols != pj.rows || phi_t_deep.cols != pj.cols || phi_t_deep.rows != ps.rows)
        throw DimensionError("feature_loss_vec: shapes " + ps.shape_str() + " " +
                             pj.shape_str() + " " + phi_t_deep.shape_str());
    Var diff = g.sub(g.constant(phi_t_deep), g.matmul(phi_s_deep, proj));
    return g.scale(g.row_sum(g.mul(diff, diff)), 1.0 / double(pj.cols));
}

Var attention_loss_vec(Graph& g, Var attn_s_rows_deep, const Tensor& attn_t_rows_deep, int seq) {
    const Tensor& as = attn_s_rows_deep.value();
    if (as.rows != attn_t_rows_deep.rows || as.cols != attn_t_rows_deep.cols)
        throw InputError("attention_loss_vec: sequence length mismatch " + as.shape_str() +
                         " vs " + attn_t_rows_deep.shape_str());
    Var diff = g.sub(g.constant(attn_t_rows_deep), attn_s_rows_deep);
    return g.scale(g.row_sum(g.mul(diff, diff)), 1.0 / double(seq));
}

Var head_average(Graph& g, const std::vector<Var>& heads) {
    if (heads.empty()) throw InputError("head_average: no heads");
    Var acc = heads[0];
    for (size_t h = 1; h < heads.size(); ++h) acc = g.add(acc, heads[h]);
    return g.scale(acc, 1.0 / double(heads.size()));
}

} // namespace egad
