#include "egad/optimizer.hpp"

#include <cmath>

namespace egad {

void AdamW::step(std::map<std::string, Tensor>& params,
                 const std::map<std::string, Tensor>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(s_.beta1, double(t_));
    const double bc2 = 1.0 - std::pow(s_.beta2, double(t_));
    for (auto& [name, theta] : params) {
        Tensor& m = m_[name];
        Tensor& v = v_[name];
        if (m.size() == 0) m = Tensor(theta.rows, theta.cols);
        if (v.size() == 0) v = Tensor(theta.rows, theta.cols);
        if (!theta.same_shape(m) || !theta.same_shape(v))
            throw DimensionError("adamw: moment shape mismatch for " + name);
        auto it = grads.find(name);
        const Tensor* g = it != grads.end() ? &it->second : nullptr;
        if (g && !g->same_shape(theta))
            throw DimensionError("adamw: gradient shape mismatch for " + name);
        for (size_t i = 0; i < theta.data.size(); ++i) {
            const double gi = g ? g->data[i] : 0.0;
            m.data[i] = s_.beta1 * m.data[i] + (1.0 - s_.beta1) * gi;
            v.data[i] = s_.beta2 * v.data[i] + (1.0 - s_.beta2) * gi * gi;
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            theta.data[i] -= s_.learning_rate * mhat / (std::sqrt(vhat) + s_.eps) +
                             s_.learning_rate * s_.weight_decay * theta.data[i];
        }
        if (!theta.all_finite())
            throw NumericalError("adamw: non-finite parameter after update of " + name);
    }
}

void AdamW::restore(int64_t t, std::map<std::string, Tensor> m, std::map<std::string, Tensor> v) {
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
}

} // namespace egad
