#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "reflectgan/dataset.hpp"
#include "reflectgan/nn.hpp"
#include "reflectgan/spectral.hpp"

namespace rg::gan {

// y = skip(x) + ReLU(BN(lin2(ReLU(BN(lin1(x)))))). The skip is the identity
// when in/out dims match, otherwise a learned linear projection.
class ResidualBlock : public nn::Layer {
  public:
    ResidualBlock(std::size_t in_dim, std::size_t out_dim, Rng& rng);

    nn::Matrix forward(const nn::Matrix& x) override;
    nn::Matrix backward(const nn::Matrix& upstream, bool accumulate_param_grads = true) override;
    void collect_params(std::vector<nn::ParamRef>& out) override;
    void set_mode(nn::Mode m) override;

    std::size_t in_dim() const { return lin1->in_dim(); }
    std::size_t out_dim() const { return lin2->out_dim(); }
    bool has_projection() const { return projection != nullptr; }

    std::unique_ptr<nn::LinearLayer> lin1, lin2, projection;  // projection may be null
    std::unique_ptr<nn::BatchNormLayer> bn1, bn2;
    std::unique_ptr<nn::ActivationLayer> act1, act2;
};

// Conditional generator: n_bands -> 64 (Linear+BN+ReLU), residual blocks over
// the width chain, then a tanh head back to n_bands. Inputs and outputs live
// in [-1, 1].
class GeneratorNet {
  public:
    static constexpr std::size_t kStageWidth = 64;

    GeneratorNet(std::size_t n_bands, std::uint64_t seed,
                 std::vector<std::size_t> block_widths = {128, 64, 64, 32});

    nn::Matrix forward(const nn::Matrix& veg_norm);
    nn::Matrix backward(const nn::Matrix& upstream);
    void set_mode(nn::Mode m);
    nn::Mode mode() const { return stack_.mode(); }
    void zero_grads() { stack_.zero_grads(); }
    std::vector<nn::ParamRef> params();

    std::size_t n_bands() const { return n_bands_; }
    const std::vector<std::size_t>& block_widths() const { return block_widths_; }

    // Parameter-bearing layers in architectural order, for serialization.
    std::vector<nn::Layer*> param_layers();

  private:
    std::size_t n_bands_;
    std::vector<std::size_t> block_widths_;
    std::unique_ptr<Rng> rng_;
    nn::Sequential stack_;
};

// Conditioned discriminator over the concatenation [veg_norm | bare_norm].
class DiscriminatorNet {
  public:
    DiscriminatorNet(std::size_t n_bands, std::uint64_t seed);

    // x has 2*n_bands columns: [veg | bare].
    nn::Matrix forward(const nn::Matrix& concat_input);
    nn::Matrix score(const nn::Matrix& veg_norm, const nn::Matrix& bare_norm);
    nn::Matrix backward(const nn::Matrix& upstream, bool accumulate_param_grads = true);
    void set_mode(nn::Mode m);
    nn::Mode mode() const { return stack_.mode(); }
    void zero_grads() { stack_.zero_grads(); }
    std::vector<nn::ParamRef> params();
    void freeze_dropout(bool frozen);

    std::size_t n_bands() const { return n_bands_; }
    std::vector<nn::Layer*> param_layers();

  private:
    std::size_t n_bands_;
    std::unique_ptr<Rng> rng_;       // weight init
    std::unique_ptr<Rng> drop_rng_;  // dropout masks
    nn::Sequential stack_;
};

nn::Matrix concat_columns(const nn::Matrix& a, const nn::Matrix& b);

struct GanTrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    std::uint64_t seed = 42;
    double l1_weight = 0.0;
    std::size_t d_steps_per_g_step = 1;

    void validate() const;
};

struct GanLossReport {
    std::size_t epoch = 0;  // 1-based
    double loss_d_real = 0, loss_d_fake = 0, loss_d = 0, loss_g = 0;
    double d_real_mean = 0, d_fake_mean = 0;
};

struct DLossResult {
    double loss_d_real = 0, loss_d_fake = 0, loss_d = 0;
};

// loss_d_real = -mean log(real); loss_d_fake = -mean log(1-fake); sum.
DLossResult d_loss(const nn::Matrix& real_scores, const nn::Matrix& fake_scores);

// Adversarial generator loss -mean log(fake).
double g_loss(const nn::Matrix& fake_scores);

struct TrainedGan {
    std::unique_ptr<GeneratorNet> generator;
    std::unique_ptr<DiscriminatorNet> discriminator;
    std::vector<GanLossReport> history;
};

// Alternating adversarial training over normalized spectra. Per batch: one or
// more discriminator steps on real (veg, bare) vs fake (veg, G(veg)) rows with
// the generator's parameters untouched, then one generator step back through a
// frozen-gradient discriminator. Trailing samples that do not fill a batch are
// skipped that epoch. Both nets end in inference mode.
TrainedGan train(const std::vector<data::PairedRecord>& pairs, const GanTrainConfig& cfg);

// denormalize(G(normalize(bands))) per sample; generator must be in inference
// mode so single samples are valid.
std::vector<spectral::BandVector> reconstruct(GeneratorNet& g,
                                              const std::vector<spectral::BandVector>& samples);

void save_weights(GeneratorNet& net, const std::string& path);
void save_weights(DiscriminatorNet& net, const std::string& path);
std::unique_ptr<GeneratorNet> load_generator(const std::string& path);
std::unique_ptr<DiscriminatorNet> load_discriminator(const std::string& path);

void write_loss_csv(const std::string& path, const std::vector<GanLossReport>& history);

}  // namespace rg::gan
