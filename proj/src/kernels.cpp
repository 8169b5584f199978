#include "egad/kernels.hpp"

#include <cmath>
#include <cstring>

namespace egad::kernels {

// ===== matrix products =====

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols != b.rows)
        throw DimensionError("matmul: inner dimensions " + a.shape_str() + " vs " + b.shape_str());
    Tensor c(a.rows, b.cols);
    const int m = a.rows, k = a.cols, n = b.cols;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        double* ci = c.row_ptr(i);
        const double* ai = a.row_ptr(i);
        for (int l = 0; l < k; ++l) {
            const double av = ai[l];
            const double* bl = b.row_ptr(l);
            for (int j = 0; j < n; ++j) ci[j] += av * bl[j];
        }
    }
    return c;
}

Tensor matmul_at(const Tensor& a, const Tensor& y) {
    if (a.rows != y.rows)
        throw DimensionError("matmul_at: row counts " + a.shape_str() + " vs " + y.shape_str());
    Tensor c(a.cols, y.cols);
    const int m = a.rows, k = a.cols, n = y.cols;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < k; ++i) {
        double* ci = c.row_ptr(i);
        for (int l = 0; l < m; ++l) {
            const double av = a.at(l, i);
            const double* yl = y.row_ptr(l);
            for (int j = 0; j < n; ++j) ci[j] += av * yl[j];
        }
    }
    return c;
}

Tensor matmul_bt(const Tensor& x, const Tensor& y) {
    if (x.cols != y.cols)
        throw DimensionError("matmul_bt: col counts " + x.shape_str() + " vs " + y.shape_str());
    Tensor c(x.rows, y.rows);
    const int m = x.rows, n = x.cols, k = y.rows;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        const double* xi = x.row_ptr(i);
        double* ci = c.row_ptr(i);
        for (int j = 0; j < k; ++j) {
            const double* yj = y.row_ptr(j);
            double s = 0.0;
            for (int l = 0; l < n; ++l) s += xi[l] * yj[l];
            ci[j] = s;
        }
    }
    return c;
}

// ===== softmax family =====

Tensor softmax_rows(const Tensor& z, double temperature) {
    if (temperature <= 0.0) throw DomainError("softmax_rows: temperature must be > 0");
    Tensor p(z.rows, z.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < z.rows; ++i) {
        const double* zi = z.row_ptr(i);
        double* pi = p.row_ptr(i);
        double mx = zi[0] / temperature;
        for (int j = 1; j < z.cols; ++j) mx = std::max(mx, zi[j] / temperature);
        double sum = 0.0;
        for (int j = 0; j < z.cols; ++j) {
            pi[j] = std::exp(zi[j] / temperature - mx);
            sum += pi[j];
        }
        for (int j = 0; j < z.cols; ++j) pi[j] /= sum;
    }
    return p;
}

Tensor log_softmax_rows(const Tensor& z) {
    Tensor p(z.rows, z.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < z.rows; ++i) {
        const double* zi = z.row_ptr(i);
        double* pi = p.row_ptr(i);
        double mx = zi[0];
        for (int j = 1; j < z.cols; ++j) mx = std::max(mx, zi[j]);
        double sum = 0.0;
        for (int j = 0; j < z.cols; ++j) sum += std::exp(zi[j] - mx);
        const double lse = mx + std::log(sum);
        for (int j = 0; j < z.cols; ++j) pi[j] = zi[j] - lse;
    }
    return p;
}

// ===== layer norm =====

Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps, Tensor* mean_out, Tensor* invstd_out) {
    if (gain.rows != 1 || gain.cols != x.cols || bias.rows != 1 || bias.cols != x.cols)
        throw DimensionError("layer_norm_rows: gain/bias must be 1x" + std::to_string(x.cols));
    Tensor y(x.rows, x.cols);
    Tensor mean(x.rows, 1), invstd(x.rows, 1);
    const int m = x.cols;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < x.rows; ++i) {
        const double* xi = x.row_ptr(i);
        double* yi = y.row_ptr(i);
        double mu = 0.0;
        for (int j = 0; j < m; ++j) mu += xi[j];
        mu /= m;
        double var = 0.0;
        for (int j = 0; j < m; ++j) {
            const double d = xi[j] - mu;
            var += d * d;
        }
        var /= m;
        const double is = 1.0 / std::sqrt(var + eps);
        mean.at(i, 0) = mu;
        invstd.at(i, 0) = is;
        for (int j = 0; j < m; ++j)
            yi[j] = gain.at(0, j) * ((xi[j] - mu) * is) + bias.at(0, j);
    }
    if (mean_out) *mean_out = std::move(mean);
    if (invstd_out) *invstd_out = std::move(invstd);
    return y;
}

// ===== activations =====

static inline double gelu_one(double v) {
    return 0.5 * v * (1.0 + std::erf(v * 0.7071067811865475244));
}

static inline double gelu_grad_one(double v) {
    const double inv_sqrt2pi = 0.3989422804014326779;
    return 0.5 * (1.0 + std::erf(v * 0.7071067811865475244)) +
           v * inv_sqrt2pi * std::exp(-0.5 * v * v);
}

Tensor gelu(const Tensor& x) {
    Tensor y(x.rows, x.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) y.at(i, j) = gelu_one(x.at(i, j));
    return y;
}

Tensor gelu_grad(const Tensor& x) {
    Tensor y(x.rows, x.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) y.at(i, j) = gelu_grad_one(x.at(i, j));
    return y;
}

Tensor relu(const Tensor& x) {
    Tensor y(x.rows, x.cols);
    for (size_t i = 0; i < x.size(); ++i) y.data[i] = x.data[i] > 0.0 ? x.data[i] : 0.0;
    return y;
}

Tensor relu_grad(const Tensor& x) {
    Tensor y(x.rows, x.cols);
    for (size_t i = 0; i < x.size(); ++i) y.data[i] = x.data[i] > 0.0 ? 1.0 : 0.0;
    return y;
}

// ===== elementwise =====

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor c(a.rows, a.cols);
    for (size_t i = 0; i < a.size(); ++i) c.data[i] = a.data[i] + b.data[i];
    return c;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor c(a.rows, a.cols);
    for (size_t i = 0; i < a.size(); ++i) c.data[i] = a.data[i] - b.data[i];
    return c;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor c(a.rows, a.cols);
    for (size_t i = 0; i < a.size(); ++i) c.data[i] = a.data[i] * b.data[i];
    return c;
}

Tensor scale(const Tensor& a, double c) {
    Tensor y(a.rows, a.cols);
    for (size_t i = 0; i < a.size(); ++i) y.data[i] = a.data[i] * c;
    return y;
}

Tensor exp(const Tensor& a) {
    Tensor y(a.rows, a.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) y.at(i, j) = std::exp(a.at(i, j));
    return y;
}

Tensor log(const Tensor& a) {
    Tensor y(a.rows, a.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) y.at(i, j) = std::log(a.at(i, j));
    return y;
}

Tensor neg(const Tensor& a) {
    Tensor y(a.rows, a.cols);
    for (size_t i = 0; i < a.size(); ++i) y.data[i] = -a.data[i];
    return y;
}

// ===== reductions and reshapes =====

Tensor row_sum(const Tensor& a) {
    Tensor y(a.rows, 1);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row_ptr(i);
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += ai[j];
        y.at(i, 0) = s;
    }
    return y;
}

Tensor col_sum(const Tensor& a) {
    Tensor y(1, a.cols);
    // fixed order: accumulate rows top to bottom
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row_ptr(i);
        for (int j = 0; j < a.cols; ++j) y.data[j] += ai[j];
    }
    return y;
}

Tensor transpose(const Tensor& a) {
    Tensor y(a.cols, a.rows);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.cols; ++i)
        for (int j = 0; j < a.rows; ++j) y.at(i, j) = a.at(j, i);
    return y;
}

Tensor masked_fill_causal(const Tensor& a, double value) {
    Tensor y = a;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i) {
        double* yi = y.row_ptr(i);
        for (int j = i + 1; j < a.cols; ++j) yi[j] = value;
    }
    return y;
}

Tensor row_scale(const Tensor& a, const std::vector<double>& s) {
    if (int(s.size()) != a.rows) throw DimensionError("row_scale: factor count != rows");
    Tensor y(a.rows, a.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i) {
        const double f = s[i];
        const double* ai = a.row_ptr(i);
        double* yi = y.row_ptr(i);
        for (int j = 0; j < a.cols; ++j) yi[j] = ai[j] * f;
    }
    return y;
}

Tensor add_rowvec(const Tensor& a, const Tensor& b) {
    if (b.rows != 1 || b.cols != a.cols)
        throw DimensionError("add_rowvec: bias must be 1x" + std::to_string(a.cols));
    Tensor y(a.rows, a.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row_ptr(i);
        double* yi = y.row_ptr(i);
        for (int j = 0; j < a.cols; ++j) yi[j] = ai[j] + b.data[j];
    }
    return y;
}

Tensor gather_rows(const Tensor& m, const std::vector<int>& idx) {
    Tensor y(int(idx.size()), m.cols);
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= m.rows) throw InputError("gather_rows: index out of range");
        std::memcpy(y.row_ptr(int(i)), m.row_ptr(idx[i]), sizeof(double) * m.cols);
    }
    return y;
}

Tensor slice_rows(const Tensor& a, int r0, int r1) {
    if (r0 < 0 || r1 > a.rows || r0 > r1) throw DimensionError("slice_rows: bad range");
    Tensor y(r1 - r0, a.cols);
    std::memcpy(y.data.data(), a.row_ptr(r0), sizeof(double) * y.size());
    return y;
}

Tensor slice_cols(const Tensor& a, int c0, int c1) {
    if (c0 < 0 || c1 > a.cols || c0 > c1) throw DimensionError("slice_cols: bad range");
    Tensor y(a.rows, c1 - c0);
    for (int i = 0; i < a.rows; ++i)
        std::memcpy(y.row_ptr(i), a.row_ptr(i) + c0, sizeof(double) * (c1 - c0));
    return y;
}

Tensor concat_cols(const std::vector<const Tensor*>& parts) {
    if (parts.empty()) throw DimensionError("concat_cols: no inputs");
    int rows = parts[0]->rows, cols = 0;
    for (const Tensor* p : parts) {
        if (p->rows != rows) throw DimensionError("concat_cols: row mismatch");
        cols += p->cols;
    }
    Tensor y(rows, cols);
    for (int i = 0; i < rows; ++i) {
        double* yi = y.row_ptr(i);
        for (const Tensor* p : parts) {
            std::memcpy(yi, p->row_ptr(i), sizeof(double) * p->cols);
            yi += p->cols;
        }
    }
    return y;
}

} // namespace egad::kernels

// ===== serial reference implementations (testing / benchmark baseline) =====

namespace egad::serial_ref {

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols != b.rows) throw DimensionError("serial matmul: inner dimensions");
    Tensor c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.cols; ++j) {
            double s = 0.0;
            for (int l = 0; l < a.cols; ++l) s += a.at(i, l) * b.at(l, j);
            c.at(i, j) = s;
        }
    return c;
}

Tensor matmul_at(const Tensor& a, const Tensor& y) {
    if (a.rows != y.rows) throw DimensionError("serial matmul_at: row counts");
    Tensor c(a.cols, y.cols);
    for (int i = 0; i < a.cols; ++i)
        for (int j = 0; j < y.cols; ++j) {
            double s = 0.0;
            for (int l = 0; l < a.rows; ++l) s += a.at(l, i) * y.at(l, j);
            c.at(i, j) = s;
        }
    return c;
}

Tensor matmul_bt(const Tensor& x, const Tensor& y) {
    if (x.cols != y.cols) throw DimensionError("serial matmul_bt: col counts");
    Tensor c(x.rows, y.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < y.rows; ++j) {
            double s = 0.0;
            for (int l = 0; l < x.cols; ++l) s += x.at(i, l) * y.at(j, l);
            c.at(i, j) = s;
        }
    return c;
}

Tensor softmax_rows(const Tensor& z, double temperature) {
    if (temperature <= 0.0) throw DomainError("serial softmax_rows: temperature must be > 0");
    Tensor p(z.rows, z.cols);
    for (int i = 0; i < z.rows; ++i) {
        double mx = z.at(i, 0) / temperature;
        for (int j = 1; j < z.cols; ++j) mx = std::max(mx, z.at(i, j) / temperature);
        double sum = 0.0;
        for (int j = 0; j < z.cols; ++j) {
            p.at(i, j) = std::exp(z.at(i, j) / temperature - mx);
            sum += p.at(i, j);
        }
        for (int j = 0; j < z.cols; ++j) p.at(i, j) /= sum;
    }
    return p;
}

Tensor log_softmax_rows(const Tensor& z) {
    Tensor p(z.rows, z.cols);
    for (int i = 0; i < z.rows; ++i) {
        double mx = z.at(i, 0);
        for (int j = 1; j < z.cols; ++j) mx = std::max(mx, z.at(i, j));
        double sum = 0.0;
        for (int j = 0; j < z.cols; ++j) sum += std::exp(z.at(i, j) - mx);
        for (int j = 0; j < z.cols; ++j) p.at(i, j) = z.at(i, j) - (mx + std::log(sum));
    }
    return p;
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps, Tensor* mean_out, Tensor* invstd_out) {
    Tensor y(x.rows, x.cols);
    Tensor mean(x.rows, 1), invstd(x.rows, 1);
    for (int i = 0; i < x.rows; ++i) {
        double mu = 0.0;
        for (int j = 0; j < x.cols; ++j) mu += x.at(i, j);
        mu /= x.cols;
        double var = 0.0;
        for (int j = 0; j < x.cols; ++j) {
            double d = x.at(i, j) - mu;
            var += d * d;
        }
        var /= x.cols;
        double is = 1.0 / std::sqrt(var + eps);
        mean.at(i, 0) = mu;
        invstd.at(i, 0) = is;
        for (int j = 0; j < x.cols; ++j)
            y.at(i, j) = gain.at(0, j) * ((x.at(i, j) - mu) * is) + bias.at(0, j);
    }
    if (mean_out) *mean_out = std::move(mean);
    if (invstd_out) *invstd_out = std::move(invstd);
    return y;
}

Tensor gelu(const Tensor& x) {
    Tensor y(x.rows, x.cols);
    for (size_t i = 0; i < x.size(); ++i)
        y.data[i] = 0.5 * x.data[i] * (1.0 + std::erf(x.data[i] * 0.7071067811865475244));
    return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "serial add");
    Tensor c(a.rows, a.cols);
    for (size_t i = 0; i < a.size(); ++i) c.data[i] = a.data[i] + b.data[i];
    return c;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "serial mul");
    Tensor c(a.rows, a.cols);
    for (size_t i = 0; i < a.size(); ++i) c.data[i] = a.data[i] * b.data[i];
    return c;
}

Tensor row_sum(const Tensor& a) {
    Tensor y(a.rows, 1);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a.at(i, j);
        y.at(i, 0) = s;
    }
    return y;
}

Tensor transpose(const Tensor& a) {
    Tensor y(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) y.at(j, i) = a.at(i, j);
    return y;
}

} // namespace egad::serial_ref
