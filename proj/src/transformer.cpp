#include "egad/transformer.hpp"

#include <cmath>

#include "egad/rng.hpp"

namespace egad {

void ModelConfig::validate() const {
    if (vocab_size < 2) throw ConfigError("model config: vocab_size must be >= 2");
    if (n_layers < 1) throw ConfigError("model config: n_layers must be >= 1");
    if (max_seq_len < 2) throw ConfigError("model config: max_seq_len must be >= 2");
    if (d_model < 1 || n_heads < 1) throw ConfigError("model config: d_model/n_heads must be >= 1");
    if (d_model % n_heads != 0)
        throw ConfigError("model config: d_model " + std::to_string(d_model) +
                          " not divisible by n_heads " + std::to_string(n_heads));
    if (activation != "gelu" && activation != "relu")
        throw ConfigError("model config: activation must be gelu or relu, got " + activation);
}

int midpoint_layer(const ModelConfig& config) { return config.n_layers / 2; }

static Tensor randn(Rng& rng, int r, int c, double sd) {
    Tensor t(r, c);
    for (double& v : t.data) v = rng.normal(0.0, sd);
    return t;
}

Model Model::init(const ModelConfig& config) {
    config.validate();
    Model m;
    m.cfg = config;
    Rng rng(config.seed);
    const int d = config.d_model, v = config.vocab_size, ff = config.ff();
    const double sd = 0.02;

    // fixed draw order for reproducibility: embeddings, then per layer the
    // projection matrices, then the output head; gains/biases are constant
    m.params["tok_emb"] = randn(rng, v, d, sd);
    m.params["pos_emb"] = randn(rng, config.max_seq_len, d, sd);
    for (int l = 0; l < config.n_layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        m.params[p + "attn.wq"] = randn(rng, d, d, sd);
        m.params[p + "attn.wk"] = randn(rng, d, d, sd);
        m.params[p + "attn.wv"] = randn(rng, d, d, sd);
        m.params[p + "attn.wo"] = randn(rng, d, d, sd);
        m.params[p + "ffn.w1"] = randn(rng, d, ff, sd);
        m.params[p + "ffn.w2"] = randn(rng, ff, d, sd);
        m.params[p + "attn.bq"] = Tensor(1, d);
        m.params[p + "attn.bk"] = Tensor(1, d);
        m.params[p + "attn.bv"] = Tensor(1, d);
        m.params[p + "attn.bo"] = Tensor(1, d);
        m.params[p + "ffn.b1"] = Tensor(1, ff);
        m.params[p + "ffn.b2"] = Tensor(1, d);
        m.params[p + "ln1.gain"] = Tensor(1, d, 1.0);
        m.params[p + "ln1.bias"] = Tensor(1, d);
        m.params[p + "ln2.gain"] = Tensor(1, d, 1.0);
        m.params[p + "ln2.bias"] = Tensor(1, d);
    }
    m.params["out.w"] = randn(rng, d, v, sd);
    m.params["out.b"] = Tensor(1, v);
    return m;
}

int64_t Model::param_count() const {
    int64_t n = 0;
    for (const auto& [name, t] : params) n += int64_t(t.size());
    return n;
}

int64_t Model::expected_param_count(const ModelConfig& c) {
    const int64_t d = c.d_model, v = c.vocab_size, ff = c.ff(), s = c.max_seq_len;
    const int64_t attn = 4 * (d * d + d);
    const int64_t ffn = d * ff + ff + ff * d + d;
    const int64_t norms = 4 * d;
    return v * d + s * d + c.n_layers * (attn + ffn + norms) + (d * v + v);
}

TraceVars forward(Graph& g, const Model& m, const std::vector<int>& tokens,
                  std::map<std::string, Var>* param_vars) {
    const ModelConfig& cfg = m.cfg;
    const int n = int(tokens.size());
    if (n < 1) throw InputError("forward: empty token sequence");
    if (n > cfg.max_seq_len)
        throw InputError("forward: sequence length " + std::to_string(n) +
                         " exceeds max_seq_len " + std::to_string(cfg.max_seq_len));
    for (int t : tokens)
        if (t < 0 || t >= cfg.vocab_size)
            throw InputError("forward: token id " + std::to_string(t) + " out of range");

    const bool rg = param_vars != nullptr;
    std::map<std::string, Var> pv;
    for (const auto& [name, tensor] : m.params) pv[name] = g.input(tensor, rg);
    if (param_vars) *param_vars = pv;

    const int heads = cfg.n_heads, hd = cfg.head_dim();
    const double att_scale = 1.0 / std::sqrt(double(hd));

    TraceVars tr;
    Var x = g.add(g.gather_rows(pv["tok_emb"], tokens), g.slice_rows(pv["pos_emb"], 0, n));

    for (int l = 0; l < cfg.n_layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        // attention sublayer
        Var q = g.add_rowvec(g.matmul(x, pv[p + "attn.wq"]), pv[p + "attn.bq"]);
        Var k = g.add_rowvec(g.matmul(x, pv[p + "attn.wk"]), pv[p + "attn.bk"]);
        Var v = g.add_rowvec(g.matmul(x, pv[p + "attn.wv"]), pv[p + "attn.bv"]);
        std::vector<Var> ctx_heads, attn_heads;
        for (int h = 0; h < heads; ++h) {
            Var qh = g.slice_cols(q, h * hd, (h + 1) * hd);
            Var kh = g.slice_cols(k, h * hd, (h + 1) * hd);
            Var vh = g.slice_cols(v, h * hd, (h + 1) * hd);
            Var scores = g.scale(g.matmul(qh, g.transpose(kh)), att_scale);
            Var probs = g.softmax_rows(g.masked_fill_causal(scores, kMaskFill));
            attn_heads.push_back(probs);
            ctx_heads.push_back(g.matmul(probs, vh));
        }
        Var ctx = heads == 1 ? ctx_heads[0] : g.concat_cols(ctx_heads);
        Var attn_out = g.add_rowvec(g.matmul(ctx, pv[p + "attn.wo"]), pv[p + "attn.bo"]);
        Var x1 = g.layer_norm(g.add(x, attn_out), pv[p + "ln1.gain"], pv[p + "ln1.bias"],
                              kLayerNormEps);
        // feed-forward sublayer
        Var h1 = g.add_rowvec(g.matmul(x1, pv[p + "ffn.w1"]), pv[p + "ffn.b1"]);
        Var act = cfg.activation == "relu" ? g.relu(h1) : g.gelu(h1);
        Var h2 = g.add_rowvec(g.matmul(act, pv[p + "ffn.w2"]), pv[p + "ffn.b2"]);
        Var x2 = g.layer_norm(g.add(x1, h2), pv[p + "ln2.gain"], pv[p + "ln2.bias"],
                              kLayerNormEps);
        tr.hidden.push_back(x2);
        tr.attention.push_back(std::move(attn_heads));
        x = x2;
    }

    tr.logits = g.add_rowvec(g.matmul(x, pv["out.w"]), pv["out.b"]);
    return tr;
}

ForwardTrace forward_trace(const Model& m, const std::vector<int>& tokens) {
    Graph g;
    TraceVars tv = forward(g, m, tokens, nullptr);
    ForwardTrace ft;
    ft.logits = tv.logits.value();
    for (const Var& h : tv.hidden) ft.hidden.push_back(h.value());
    for (const auto& layer : tv.attention) {
        std::vector<Tensor> heads;
        for (const Var& a : layer) heads.push_back(a.value());
        ft.attention.push_back(std::move(heads));
    }
    return ft;
}

} // namespace egad
