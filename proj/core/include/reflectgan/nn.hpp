#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "reflectgan/rng.hpp"

namespace rg::nn {

// Dense row-major matrix of doubles. Rows index batch elements throughout.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    void zero() { std::fill(data.begin(), data.end(), 0.0); }
    std::string shape_str() const;
};

enum class Mode { training, inference };

// One scalar parameter coordinate: its value and gradient slot. Optimizers
// and the gradient checker operate on flat lists of these; pointers must stay
// valid for the layer's lifetime (layers never reallocate their storage).
struct ParamRef {
    double* value = nullptr;
    double* grad = nullptr;
};

class Layer {
  public:
    virtual ~Layer() = default;
    virtual Matrix forward(const Matrix& x) = 0;
    // Propagates the upstream gradient to the input. Parameter gradients are
    // accumulated unless accumulate_param_grads is false (used when a frozen
    // net only relays gradients, e.g. the discriminator during a generator
    // step).
    virtual Matrix backward(const Matrix& upstream, bool accumulate_param_grads = true) = 0;
    virtual void collect_params(std::vector<ParamRef>& out) = 0;
    virtual void set_mode(Mode m) { mode_ = m; }
    Mode mode() const { return mode_; }
    void zero_grads();

  protected:
    Mode mode_ = Mode::training;
};

enum class Init { zero, kaiming_uniform, xavier_uniform };

// y = x Wᵀ + b, weight stored out×in.
class LinearLayer : public Layer {
  public:
    LinearLayer(std::size_t in_dim, std::size_t out_dim, Init init, Rng& rng);

    Matrix forward(const Matrix& x) override;
    Matrix backward(const Matrix& upstream, bool accumulate_param_grads = true) override;
    void collect_params(std::vector<ParamRef>& out) override;

    std::size_t in_dim() const { return weight.cols; }
    std::size_t out_dim() const { return weight.rows; }

    Matrix weight, grad_weight;
    std::vector<double> bias, grad_bias;

  private:
    Matrix input_;  // cached for backward
};

class BatchNormLayer : public Layer {
  public:
    explicit BatchNormLayer(std::size_t features);

    Matrix forward(const Matrix& x) override;
    Matrix backward(const Matrix& upstream, bool accumulate_param_grads = true) override;
    void collect_params(std::vector<ParamRef>& out) override;

    std::size_t features() const { return gamma.size(); }

    std::vector<double> gamma, beta, grad_gamma, grad_beta;
    std::vector<double> running_mean, running_var;
    double eps = 1e-5;
    double momentum = 0.1;

  private:
    // caches from the last forward
    Matrix xhat_;
    std::vector<double> inv_std_;
    Mode forward_mode_ = Mode::training;
};

enum class Activation { relu, leaky_relu, tanh, sigmoid };

const char* activation_name(Activation a);

class ActivationLayer : public Layer {
  public:
    explicit ActivationLayer(Activation kind, double leaky_slope = 0.2);

    Matrix forward(const Matrix& x) override;
    Matrix backward(const Matrix& upstream, bool accumulate_param_grads = true) override;
    void collect_params(std::vector<ParamRef>&) override {}

    Activation kind() const { return kind_; }

  private:
    Activation kind_;
    double slope_;
    Matrix input_, output_;
};

// Inverted dropout: training zeroes each element with probability p and
// scales survivors by 1/(1-p); inference is the identity. The mask can be
// frozen so repeated forwards see the same network (gradient checking).
class DropoutLayer : public Layer {
  public:
    DropoutLayer(double p, Rng& rng);

    Matrix forward(const Matrix& x) override;
    Matrix backward(const Matrix& upstream, bool accumulate_param_grads = true) override;
    void collect_params(std::vector<ParamRef>&) override {}

    void freeze_mask(bool frozen) { frozen_ = frozen; }
    const Matrix& mask() const { return mask_; }
    double p() const { return p_; }

  private:
    double p_;
    Rng* rng_;
    bool frozen_ = false;
    Matrix mask_;  // 1 for kept elements, 0 for dropped
};

// Runs layers in order; owns them.
class Sequential : public Layer {
  public:
    Matrix forward(const Matrix& x) override;
    Matrix backward(const Matrix& upstream, bool accumulate_param_grads = true) override;
    void collect_params(std::vector<ParamRef>& out) override;
    void set_mode(Mode m) override;

    template <typename T, typename... Args>
    T* emplace(Args&&... args) {
        auto layer = std::make_unique<T>(std::forward<Args>(args)...);
        T* raw = layer.get();
        layers.push_back(std::move(layer));
        return raw;
    }

    std::vector<std::unique_ptr<Layer>> layers;
};

struct LossResult {
    double value = 0;
    Matrix grad;  // d loss / d predictions
};

// Mean binary cross-entropy over all elements; scores are clamped to
// [1e-7, 1-1e-7] before the logs and the gradient uses the clamped value.
LossResult bce_loss(const Matrix& scores, const Matrix& targets);

// Mean squared error over all elements.
LossResult mse_loss(const Matrix& pred, const Matrix& target);

class Adam {
  public:
    Adam(std::vector<ParamRef> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8);

    void step();  // consumes the gradients currently in the ParamRefs
    void zero_grads();
    std::size_t step_count() const { return t_; }

  private:
    std::vector<ParamRef> params_;
    std::vector<double> m_, v_;
    double lr_, beta1_, beta2_, eps_;
    std::size_t t_ = 0;
};

// --- gradient checking ---

// A differentiable scalar probe: `loss` runs a clean forward pass and returns
// the objective; `compute_grads` zeroes gradients and runs forward+backward so
// that every coordinate's grad slot is filled. Coordinates may point at
// parameters or at input-matrix entries.
struct GradProbe {
    std::function<double()> loss;
    std::function<void()> compute_grads;
    std::vector<ParamRef> coords;
};

struct GradCheckResult {
    double max_rel_error = 0;
    std::size_t n_coords = 0;
    std::size_t worst_coord = 0;
};

// Central finite differences over every coordinate. The error at one
// coordinate is |a-n| when max(|a|,|n|) < 1e-4, else |a-n|/max(|a|,|n|).
GradCheckResult grad_check(const GradProbe& probe, double h = 1e-5);

}  // namespace rg::nn
