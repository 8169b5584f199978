#include "egad/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "egad/kernels.hpp"

namespace egad {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<double> token_entropy(const Tensor& probs) {
    std::vector<double> h(probs.rows);
    for (int i = 0; i < probs.rows; ++i) {
        const double* p = probs.row_ptr(i);
        double sum = 0.0, ent = 0.0;
        for (int j = 0; j < probs.cols; ++j) {
            if (p[j] < 0.0)
                throw InputError("token_entropy: negative probability in row " + std::to_string(i));
            sum += p[j];
            if (p[j] > 0.0) ent -= p[j] * std::log(p[j]);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw InputError("token_entropy: row " + std::to_string(i) +
                             " sums to " + std::to_string(sum) + ", not 1");
        h[i] = ent;
    }
    return h;
}

std::vector<double> token_entropy_from_logits(const Tensor& logits) {
    std::vector<double> h(logits.rows);
    for (int i = 0; i < logits.rows; ++i) {
        const double* z = logits.row_ptr(i);
        double mx = z[0];
        for (int j = 1; j < logits.cols; ++j) mx = std::max(mx, z[j]);
        // H = ln Z - (1/Z) sum e_j * (z_j - mx) with e_j = exp(z_j - mx)
        double zsum = 0.0, wsum = 0.0;
        for (int j = 0; j < logits.cols; ++j) {
            const double e = std::exp(z[j] - mx);
            zsum += e;
            wsum += e * (z[j] - mx);
        }
        h[i] = std::log(zsum) - wsum / zsum;
    }
    return h;
}

std::vector<double> curriculum_weights(const std::vector<double>& entropies,
                                       const CurriculumClock& clock) {
    std::vector<double> w(entropies.size());
    const bool early = clock.early();
    for (size_t i = 0; i < entropies.size(); ++i)
        w[i] = early ? sigmoid(1.0 - entropies[i]) : sigmoid(entropies[i]);
    return w;
}

std::vector<double> adaptive_temperatures(const std::vector<double>& entropies,
                                          const TemperatureBounds& bounds) {
    bounds.validate();
    std::vector<double> t(entropies.size());
    for (size_t i = 0; i < entropies.size(); ++i)
        t[i] = bounds.t_min + (bounds.t_max - bounds.t_min) * sigmoid(entropies[i]);
    return t;
}

size_t quantile_rank(double q, size_t n) {
    const double r = q * double(n);
    const double nearest = std::round(r);
    size_t idx = std::abs(r - nearest) < 1e-9 ? size_t(nearest) : size_t(std::floor(r));
    if (idx >= n) idx = n - 1;
    return idx;
}

double entropy_threshold(const std::vector<double>& entropies, double q) {
    if (entropies.empty()) throw InputError("entropy_threshold: empty input");
    if (q < 0.0 || q >= 1.0 + 1e-12)
        throw ConfigError("entropy_threshold: quantile must be in [0,1), got " + std::to_string(q));
    std::vector<double> v = entropies;
    const size_t idx = quantile_rank(q, v.size());
    std::nth_element(v.begin(), v.begin() + idx, v.end());
    return v[idx];
}

std::vector<bool> deep_path_mask(const std::vector<double>& entropies, double threshold) {
    std::vector<bool> mask(entropies.size());
    for (size_t i = 0; i < entropies.size(); ++i) mask[i] = entropies[i] >= threshold;
    return mask;
}

EntropyProfile build_entropy_profile(const std::vector<double>& entropies,
                                     const CurriculumClock& clock,
                                     const TemperatureBounds& bounds, double q) {
    EntropyProfile p;
    p.entropies = entropies;
    p.weights = curriculum_weights(entropies, clock);
    p.temperatures = adaptive_temperatures(entropies, bounds);
    p.threshold = entropy_threshold(entropies, q);
    p.deep_mask = deep_path_mask(entropies, p.threshold);
    return p;
}

} // namespace egad
