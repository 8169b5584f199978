#pragma once
#include <cstdint>
#include <vector>

#include "egad/tensor.hpp"

// Teacher-entropy signal and everything derived from it: curriculum
// weights, adaptive temperatures, the per-batch threshold and deep-path
// mask. All outputs are detached constants with respect to the student.

namespace egad {

struct CurriculumClock {
    int64_t step = 0;        // current optimizer step t
    int64_t switch_step = 1; // t0
    bool early() const { return step < switch_step; }
};

struct TemperatureBounds {
    double t_min = 1.0;
    double t_max = 5.0;
    void validate() const {
        if (t_min <= 0.0 || t_max <= 0.0 || t_min > t_max)
            throw ConfigError("temperature bounds: need 0 < t_min <= t_max, got t_min=" +
                              std::to_string(t_min) + " t_max=" + std::to_string(t_max));
    }
};

struct EntropyProfile {
    std::vector<double> entropies;    // nats, in [0, ln V]
    std::vector<double> weights;      // (0,1)
    std::vector<double> temperatures; // [t_min, t_max]
    std::vector<bool> deep_mask;      // entropy >= threshold
    double threshold = 0.0;
};

// numerically stable logistic function
double sigmoid(double x);

// H = -sum p ln p per row; rows must be near-normalized (1e-9)
std::vector<double> token_entropy(const Tensor& probs);

// entropies straight from a logits matrix (softmax at T=1 internally)
std::vector<double> token_entropy_from_logits(const Tensor& logits);

// w_i = sigmoid(1 - H_i) early, sigmoid(H_i) late
std::vector<double> curriculum_weights(const std::vector<double>& entropies,
                                       const CurriculumClock& clock);

// T_i = t_min + (t_max - t_min) * sigmoid(H_i)
std::vector<double> adaptive_temperatures(const std::vector<double>& entropies,
                                          const TemperatureBounds& bounds);

// ascending-sort element at the snapped floor(q*N) rank
double entropy_threshold(const std::vector<double>& entropies, double q);

std::vector<bool> deep_path_mask(const std::vector<double>& entropies, double threshold);

// shared snapped floor rank: round when q*n is within 1e-9 of an integer
size_t quantile_rank(double q, size_t n);

EntropyProfile build_entropy_profile(const std::vector<double>& entropies,
                                     const CurriculumClock& clock,
                                     const TemperatureBounds& bounds, double q);

} // namespace egad
