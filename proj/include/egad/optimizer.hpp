#pragma once
#include <cstdint>
#include <map>
#include <string>

#include "egad/tensor.hpp"

// AdamW with decoupled weight decay:
//   theta <- theta - lr * mhat / (sqrt(vhat) + eps) - lr * wd * theta
// Moments are bias-corrected. Parameters are keyed by name; iteration over
// the ordered maps keeps updates deterministic.

namespace egad {

struct AdamWSettings {
    double learning_rate = 5e-6;
    double weight_decay = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class AdamW {
public:
    explicit AdamW(AdamWSettings s) : s_(s) {}

    // applies one update to every parameter that has a gradient entry;
    // missing gradients are treated as zero (moments still decay)
    void step(std::map<std::string, Tensor>& params,
              const std::map<std::string, Tensor>& grads);

    int64_t step_count() const { return t_; }
    const std::map<std::string, Tensor>& first_moments() const { return m_; }
    const std::map<std::string, Tensor>& second_moments() const { return v_; }

    // checkpoint restore
    void restore(int64_t t, std::map<std::string, Tensor> m, std::map<std::string, Tensor> v);

private:
    AdamWSettings s_;
    int64_t t_ = 0;
    std::map<std::string, Tensor> m_, v_;
};

} // namespace egad
