#pragma once
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

// Independent brute-force reference implementations used to validate the
// fast paths. Deliberately shares no code with the rest of the library:
// compensated (Neumaier) summation instead of plain accumulation, an
// insertion sort instead of nth_element, its own sigmoid/softmax.

namespace egad::oracle {

// compensated summation; relative error <= 1e-15 on rows up to length 1e5
double neumaier_sum(const std::vector<double>& xs);

double sigmoid(double x);

std::vector<double> softmax_row(const std::vector<double>& z, double temperature);

// H = -sum p ln p, nats, 0*ln0 = 0
double entropy_row(const std::vector<double>& p);

// KL(p||q) = sum p (ln p - ln q); +inf on support violation (p>0, q=0)
double kl_row(const std::vector<double>& p, const std::vector<double>& q);

// (entropy of p_t, KL(p_t||p_s)) from probability rows
std::pair<double, double> reference_entropy_kl(const std::vector<double>& p_t,
                                               const std::vector<double>& p_s);

// (entropy of softmax(z_t, 1), KL(softmax(z_t/T)||softmax(z_s/T))) from logit rows
std::pair<double, double> reference_entropy_kl_logits(const std::vector<double>& z_t,
                                                      const std::vector<double>& z_s,
                                                      double temperature);

// full insertion sort ascending, pick the snapped floor(q*N) index.
// The snap rule (round when q*N is within 1e-9 of an integer) is duplicated
// from the fast path on purpose; both sides must cut at the same rank.
double reference_quantile(std::vector<double> values, double q);

// w_i(t): sigmoid(1 - H) early, sigmoid(H) late
double reference_curriculum_weight(double entropy, bool early);

// T_i = t_min + (t_max - t_min) * sigmoid(H)
double reference_temperature(double entropy, double t_min, double t_max);

// central differences (f(x+h e_j) - f(x-h e_j)) / 2h
std::vector<double> finite_difference_grad(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h);

struct AdamWConfig {
    double lr = 5e-6;
    double weight_decay = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// literal recurrence on a scalar parameter; returns the value after each step
std::vector<double> reference_adamw(double w0, const std::vector<double>& grads,
                                    const AdamWConfig& cfg);

double reference_pearson(const std::vector<double>& a, const std::vector<double>& b);

// (1/N) sum ||g_i - gbar||^2
double reference_grad_variance(const std::vector<std::vector<double>>& grads);

} // namespace egad::oracle
