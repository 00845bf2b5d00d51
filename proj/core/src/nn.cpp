#include "reflectgan/nn.hpp"

#include <cmath>

#include "reflectgan/errors.hpp"

namespace rg::nn {

std::string Matrix::shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

namespace {

void require_cols(const Matrix& x, std::size_t want, const char* who) {
    if (x.cols != want)
        throw ShapeError(std::string(who) + ": expected " + std::to_string(want) +
                         " columns, got " + x.shape_str());
}

void require_shape(const Matrix& a, const Matrix& b, const char* who) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(who) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
}

}  // namespace

void Layer::zero_grads() {
    std::vector<ParamRef> refs;
    collect_params(refs);
    for (auto& p : refs) *p.grad = 0.0;
}

// --- LinearLayer ---

LinearLayer::LinearLayer(std::size_t in_dim, std::size_t out_dim, Init init, Rng& rng)
    : weight(out_dim, in_dim),
      grad_weight(out_dim, in_dim),
      bias(out_dim, 0.0),
      grad_bias(out_dim, 0.0) {
    if (in_dim == 0 || out_dim == 0) throw ShapeError("linear: zero dimension");
    double limit = 0.0;
    switch (init) {
        case Init::zero:
            break;
        case Init::kaiming_uniform:
            limit = std::sqrt(6.0 / static_cast<double>(in_dim));
            break;
        case Init::xavier_uniform:
            limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
            break;
    }
    if (limit > 0.0)
        for (double& w : weight.data) w = rng.uniform(-limit, limit);
}

Matrix LinearLayer::forward(const Matrix& x) {
    require_cols(x, in_dim(), "linear forward");
    input_ = x;
    Matrix y(x.rows, out_dim());
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* xr = x.row(r);
        double* yr = y.row(r);
        for (std::size_t o = 0; o < out_dim(); ++o) {
            const double* wo = weight.row(o);
            double acc = bias[o];
            for (std::size_t i = 0; i < in_dim(); ++i) acc += xr[i] * wo[i];
            yr[o] = acc;
        }
    }
    return y;
}

Matrix LinearLayer::backward(const Matrix& upstream, bool accumulate_param_grads) {
    require_cols(upstream, out_dim(), "linear backward");
    if (upstream.rows != input_.rows)
        throw ShapeError("linear backward: batch mismatch " + upstream.shape_str() + " vs " +
                         input_.shape_str());
    Matrix dx(input_.rows, in_dim());
    for (std::size_t r = 0; r < upstream.rows; ++r) {
        const double* ur = upstream.row(r);
        const double* xr = input_.row(r);
        double* dxr = dx.row(r);
        for (std::size_t o = 0; o < out_dim(); ++o) {
            const double g = ur[o];
            if (g == 0.0) continue;
            const double* wo = weight.row(o);
            for (std::size_t i = 0; i < in_dim(); ++i) dxr[i] += g * wo[i];
            if (accumulate_param_grads) {
                double* dwo = grad_weight.row(o);
                for (std::size_t i = 0; i < in_dim(); ++i) dwo[i] += g * xr[i];
                grad_bias[o] += g;
            }
        }
    }
    return dx;
}

void LinearLayer::collect_params(std::vector<ParamRef>& out) {
    for (std::size_t i = 0; i < weight.data.size(); ++i)
        out.push_back({&weight.data[i], &grad_weight.data[i]});
    for (std::size_t i = 0; i < bias.size(); ++i) out.push_back({&bias[i], &grad_bias[i]});
}

// --- BatchNormLayer ---

BatchNormLayer::BatchNormLayer(std::size_t features)
    : gamma(features, 1.0),
      beta(features, 0.0),
      grad_gamma(features, 0.0),
      grad_beta(features, 0.0),
      running_mean(features, 0.0),
      running_var(features, 1.0) {
    if (features == 0) throw ShapeError("batchnorm: zero features");
}

Matrix BatchNormLayer::forward(const Matrix& x) {
    require_cols(x, features(), "batchnorm forward");
    const std::size_t n = x.rows, c = x.cols;
    forward_mode_ = mode_;
    Matrix y(n, c);
    xhat_ = Matrix(n, c);
    inv_std_.assign(c, 0.0);

    if (mode_ == Mode::training) {
        if (n < 2) throw ShapeError("batchnorm: training-mode batch of " + std::to_string(n));
        for (std::size_t j = 0; j < c; ++j) {
            double mean = 0.0;
            for (std::size_t r = 0; r < n; ++r) mean += x.at(r, j);
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double d = x.at(r, j) - mean;
                var += d * d;
            }
            var /= static_cast<double>(n);  // population variance
            const double inv = 1.0 / std::sqrt(var + eps);
            inv_std_[j] = inv;
            for (std::size_t r = 0; r < n; ++r) {
                const double xh = (x.at(r, j) - mean) * inv;
                xhat_.at(r, j) = xh;
                y.at(r, j) = gamma[j] * xh + beta[j];
            }
            running_mean[j] = (1.0 - momentum) * running_mean[j] + momentum * mean;
            running_var[j] = (1.0 - momentum) * running_var[j] + momentum * var;
        }
    } else {
        for (std::size_t j = 0; j < c; ++j) {
            const double inv = 1.0 / std::sqrt(running_var[j] + eps);
            inv_std_[j] = inv;
            for (std::size_t r = 0; r < n; ++r) {
                const double xh = (x.at(r, j) - running_mean[j]) * inv;
                xhat_.at(r, j) = xh;
                y.at(r, j) = gamma[j] * xh + beta[j];
            }
        }
    }
    return y;
}

Matrix BatchNormLayer::backward(const Matrix& upstream, bool accumulate_param_grads) {
    require_shape(upstream, xhat_, "batchnorm backward");
    const std::size_t n = upstream.rows, c = upstream.cols;
    Matrix dx(n, c);
    for (std::size_t j = 0; j < c; ++j) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            sum_dy += upstream.at(r, j);
            sum_dy_xhat += upstream.at(r, j) * xhat_.at(r, j);
        }
        if (accumulate_param_grads) {
            grad_gamma[j] += sum_dy_xhat;
            grad_beta[j] += sum_dy;
        }
        if (forward_mode_ == Mode::training) {
            // Batch statistics depend on x, so the mean/variance paths
            // contribute to the input gradient.
            const double inv_n = 1.0 / static_cast<double>(n);
            for (std::size_t r = 0; r < n; ++r) {
                const double dxhat = upstream.at(r, j) * gamma[j];
                dx.at(r, j) = inv_std_[j] *
                              (dxhat - inv_n * gamma[j] * sum_dy -
                               inv_n * gamma[j] * sum_dy_xhat * xhat_.at(r, j));
            }
        } else {
            for (std::size_t r = 0; r < n; ++r)
                dx.at(r, j) = upstream.at(r, j) * gamma[j] * inv_std_[j];
        }
    }
    return dx;
}

void BatchNormLayer::collect_params(std::vector<ParamRef>& out) {
    for (std::size_t i = 0; i < gamma.size(); ++i) out.push_back({&gamma[i], &grad_gamma[i]});
    for (std::size_t i = 0; i < beta.size(); ++i) out.push_back({&beta[i], &grad_beta[i]});
}

// --- ActivationLayer ---

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::leaky_relu: return "leaky_relu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    return "?";
}

ActivationLayer::ActivationLayer(Activation kind, double leaky_slope)
    : kind_(kind), slope_(leaky_slope) {}

Matrix ActivationLayer::forward(const Matrix& x) {
    input_ = x;
    Matrix y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double v = x.data[i];
        switch (kind_) {
            case Activation::relu: y.data[i] = v > 0.0 ? v : 0.0; break;
            case Activation::leaky_relu: y.data[i] = v >= 0.0 ? v : slope_ * v; break;
            case Activation::tanh: y.data[i] = std::tanh(v); break;
            case Activation::sigmoid: y.data[i] = 1.0 / (1.0 + std::exp(-v)); break;
        }
    }
    output_ = y;
    return y;
}

Matrix ActivationLayer::backward(const Matrix& upstream, bool) {
    require_shape(upstream, input_, "activation backward");
    Matrix dx(upstream.rows, upstream.cols);
    for (std::size_t i = 0; i < upstream.data.size(); ++i) {
        double d = 0.0;
        switch (kind_) {
            // relu/leaky derivative at exactly 0 takes the positive-side slope
            case Activation::relu: d = input_.data[i] >= 0.0 ? 1.0 : 0.0; break;
            case Activation::leaky_relu: d = input_.data[i] >= 0.0 ? 1.0 : slope_; break;
            case Activation::tanh: d = 1.0 - output_.data[i] * output_.data[i]; break;
            case Activation::sigmoid: d = output_.data[i] * (1.0 - output_.data[i]); break;
        }
        dx.data[i] = upstream.data[i] * d;
    }
    return dx;
}

// --- DropoutLayer ---

DropoutLayer::DropoutLayer(double p, Rng& rng) : p_(p), rng_(&rng) {
    if (p < 0.0 || p >= 1.0) throw ConfigError("dropout: p must lie in [0,1)");
}

Matrix DropoutLayer::forward(const Matrix& x) {
    if (mode_ == Mode::inference || p_ == 0.0) {
        mask_ = Matrix(x.rows, x.cols, 1.0);
        return x;
    }
    if (!frozen_ || !mask_.same_shape(x)) {
        mask_ = Matrix(x.rows, x.cols);
        for (double& m : mask_.data) m = rng_->uniform() < p_ ? 0.0 : 1.0;
    }
    const double scale = 1.0 / (1.0 - p_);
    Matrix y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] * mask_.data[i] * scale;
    return y;
}

Matrix DropoutLayer::backward(const Matrix& upstream, bool) {
    require_shape(upstream, mask_, "dropout backward");
    if (mode_ == Mode::inference || p_ == 0.0) return upstream;
    const double scale = 1.0 / (1.0 - p_);
    Matrix dx(upstream.rows, upstream.cols);
    for (std::size_t i = 0; i < upstream.data.size(); ++i)
        dx.data[i] = upstream.data[i] * mask_.data[i] * scale;
    return dx;
}

// --- Sequential ---

Matrix Sequential::forward(const Matrix& x) {
    Matrix cur = x;
    for (auto& l : layers) cur = l->forward(cur);
    return cur;
}

Matrix Sequential::backward(const Matrix& upstream, bool accumulate_param_grads) {
    Matrix cur = upstream;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
        cur = (*it)->backward(cur, accumulate_param_grads);
    return cur;
}

void Sequential::collect_params(std::vector<ParamRef>& out) {
    for (auto& l : layers) l->collect_params(out);
}

void Sequential::set_mode(Mode m) {
    mode_ = m;
    for (auto& l : layers) l->set_mode(m);
}

// --- losses ---

LossResult bce_loss(const Matrix& scores, const Matrix& targets) {
    if (!scores.same_shape(targets))
        throw ShapeError("bce_loss: shape mismatch " + scores.shape_str() + " vs " +
                         targets.shape_str());
    constexpr double lo = 1e-7, hi = 1.0 - 1e-7;
    const double n = static_cast<double>(scores.data.size());
    LossResult out;
    out.grad = Matrix(scores.rows, scores.cols);
    double acc = 0.0;
    for (std::size_t i = 0; i < scores.data.size(); ++i) {
        const double s = std::min(hi, std::max(lo, scores.data[i]));
        const double t = targets.data[i];
        acc += t * std::log(s) + (1.0 - t) * std::log(1.0 - s);
        out.grad.data[i] = (s - t) / (s * (1.0 - s) * n);
    }
    out.value = -acc / n;
    return out;
}

LossResult mse_loss(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target))
        throw ShapeError("mse_loss: shape mismatch " + pred.shape_str() + " vs " +
                         target.shape_str());
    const double n = static_cast<double>(pred.data.size());
    LossResult out;
    out.grad = Matrix(pred.rows, pred.cols);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        acc += d * d;
        out.grad.data[i] = 2.0 * d / n;
    }
    out.value = acc / n;
    return out;
}

// --- Adam ---

Adam::Adam(std::vector<ParamRef> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)),
      m_(params_.size(), 0.0),
      v_(params_.size(), 0.0),
      lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const double g = *params_[i].grad;
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        *params_[i].value -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

void Adam::zero_grads() {
    for (auto& p : params_) *p.grad = 0.0;
}

}  // namespace rg::nn
