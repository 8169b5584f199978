#include "egad/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace egad::oracle {

double neumaier_sum(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> softmax_row(const std::vector<double>& z, double temperature) {
    if (temperature <= 0.0) throw std::runtime_error("oracle softmax: temperature <= 0");
    std::vector<double> scaled(z.size());
    for (size_t i = 0; i < z.size(); ++i) scaled[i] = z[i] / temperature;
    double mx = scaled[0];
    for (double v : scaled) mx = std::max(mx, v);
    std::vector<double> e(z.size());
    for (size_t i = 0; i < z.size(); ++i) e[i] = std::exp(scaled[i] - mx);
    double denom = neumaier_sum(e);
    for (double& v : e) v /= denom;
    return e;
}

double entropy_row(const std::vector<double>& p) {
    std::vector<double> terms;
    terms.reserve(p.size());
    for (double v : p) {
        if (v < 0.0) throw std::runtime_error("oracle entropy: negative probability");
        if (v > 0.0) terms.push_back(-v * std::log(v));
    }
    return neumaier_sum(terms);
}

double kl_row(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::runtime_error("oracle kl: length mismatch");
    std::vector<double> terms;
    terms.reserve(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        terms.push_back(p[i] * (std::log(p[i]) - std::log(q[i])));
    }
    return neumaier_sum(terms);
}

std::pair<double, double> reference_entropy_kl(const std::vector<double>& p_t,
                                               const std::vector<double>& p_s) {
    return {entropy_row(p_t), kl_row(p_t, p_s)};
}

std::pair<double, double> reference_entropy_kl_logits(const std::vector<double>& z_t,
                                                      const std::vector<double>& z_s,
                                                      double temperature) {
    double h = entropy_row(softmax_row(z_t, 1.0));
    double kl = kl_row(softmax_row(z_t, temperature), softmax_row(z_s, temperature));
    return {h, kl};
}

double reference_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::runtime_error("oracle quantile: empty input");
    // insertion sort ascending
    for (size_t i = 1; i < values.size(); ++i) {
        double key = values[i];
        size_t j = i;
        while (j > 0 && values[j - 1] > key) {
            values[j] = values[j - 1];
            --j;
        }
        values[j] = key;
    }
    const double r = q * double(values.size());
    const double nearest = std::round(r);
    size_t idx = std::abs(r - nearest) < 1e-9 ? size_t(nearest) : size_t(std::floor(r));
    if (idx >= values.size()) idx = values.size() - 1;
    return values[idx];
}

double reference_curriculum_weight(double entropy, bool early) {
    return early ? sigmoid(1.0 - entropy) : sigmoid(entropy);
}

double reference_temperature(double entropy, double t_min, double t_max) {
    return t_min + (t_max - t_min) * sigmoid(entropy);
}

std::vector<double> finite_difference_grad(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h) {
    if (h <= 0.0) throw std::runtime_error("oracle fd: step must be > 0");
    std::vector<double> g(x.size());
    for (size_t j = 0; j < x.size(); ++j) {
        const double orig = x[j];
        x[j] = orig + h;
        const double fp = f(x);
        x[j] = orig - h;
        const double fm = f(x);
        x[j] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("oracle fd: non-finite evaluation");
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

std::vector<double> reference_adamw(double w0, const std::vector<double>& grads,
                                    const AdamWConfig& cfg) {
    std::vector<double> traj;
    traj.reserve(grads.size());
    double w = w0, m = 0.0, v = 0.0;
    for (size_t t = 1; t <= grads.size(); ++t) {
        const double g = grads[t - 1];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
        const double mhat = m / (1.0 - std::pow(cfg.beta1, double(t)));
        const double vhat = v / (1.0 - std::pow(cfg.beta2, double(t)));
        w = w - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps) - cfg.lr * cfg.weight_decay * w;
        traj.push_back(w);
    }
    return traj;
}

double reference_pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::runtime_error("oracle pearson: need two equal-length samples");
    const double n = double(a.size());
    const double ma = neumaier_sum(a) / n;
    const double mb = neumaier_sum(b) / n;
    std::vector<double> cov, va, vb;
    cov.reserve(a.size());
    va.reserve(a.size());
    vb.reserve(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        cov.push_back((a[i] - ma) * (b[i] - mb));
        va.push_back((a[i] - ma) * (a[i] - ma));
        vb.push_back((b[i] - mb) * (b[i] - mb));
    }
    const double denom = std::sqrt(neumaier_sum(va)) * std::sqrt(neumaier_sum(vb));
    if (denom == 0.0) throw std::runtime_error("oracle pearson: constant input");
    return neumaier_sum(cov) / denom;
}

double reference_grad_variance(const std::vector<std::vector<double>>& grads) {
    if (grads.empty()) throw std::runtime_error("oracle grad variance: empty");
    const size_t dim = grads[0].size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& g : grads) {
        if (g.size() != dim) throw std::runtime_error("oracle grad variance: shape mismatch");
        for (size_t j = 0; j < dim; ++j) mean[j] += g[j];
    }
    for (double& v : mean) v /= double(grads.size());
    std::vector<double> sq;
    sq.reserve(grads.size() * dim);
    for (const auto& g : grads)
        for (size_t j = 0; j < dim; ++j) sq.push_back((g[j] - mean[j]) * (g[j] - mean[j]));
    return neumaier_sum(sq) / double(grads.size());
}

} // namespace egad::oracle
