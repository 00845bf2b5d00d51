#include "reflectgan/gan.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "reflectgan/csv.hpp"
#include "reflectgan/errors.hpp"

namespace rg::gan {

namespace {

nn::Matrix ones_like(const nn::Matrix& m) { return nn::Matrix(m.rows, m.cols, 1.0); }
nn::Matrix zeros_like(const nn::Matrix& m) { return nn::Matrix(m.rows, m.cols, 0.0); }

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace

// --- ResidualBlock ---

ResidualBlock::ResidualBlock(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
    lin1 = std::make_unique<nn::LinearLayer>(in_dim, out_dim, nn::Init::kaiming_uniform, rng);
    bn1 = std::make_unique<nn::BatchNormLayer>(out_dim);
    act1 = std::make_unique<nn::ActivationLayer>(nn::Activation::relu);
    lin2 = std::make_unique<nn::LinearLayer>(out_dim, out_dim, nn::Init::kaiming_uniform, rng);
    bn2 = std::make_unique<nn::BatchNormLayer>(out_dim);
    act2 = std::make_unique<nn::ActivationLayer>(nn::Activation::relu);
    if (in_dim != out_dim)
        projection =
            std::make_unique<nn::LinearLayer>(in_dim, out_dim, nn::Init::kaiming_uniform, rng);
}

nn::Matrix ResidualBlock::forward(const nn::Matrix& x) {
    nn::Matrix main = act2->forward(bn2->forward(lin2->forward(
        act1->forward(bn1->forward(lin1->forward(x))))));
    nn::Matrix skip = projection ? projection->forward(x) : x;
    for (std::size_t i = 0; i < main.data.size(); ++i) main.data[i] += skip.data[i];
    return main;
}

nn::Matrix ResidualBlock::backward(const nn::Matrix& upstream, bool accumulate_param_grads) {
    nn::Matrix d = act2->backward(upstream, accumulate_param_grads);
    d = bn2->backward(d, accumulate_param_grads);
    d = lin2->backward(d, accumulate_param_grads);
    d = act1->backward(d, accumulate_param_grads);
    d = bn1->backward(d, accumulate_param_grads);
    d = lin1->backward(d, accumulate_param_grads);
    nn::Matrix d_skip =
        projection ? projection->backward(upstream, accumulate_param_grads) : upstream;
    for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] += d_skip.data[i];
    return d;
}

void ResidualBlock::collect_params(std::vector<nn::ParamRef>& out) {
    lin1->collect_params(out);
    bn1->collect_params(out);
    lin2->collect_params(out);
    bn2->collect_params(out);
    if (projection) projection->collect_params(out);
}

void ResidualBlock::set_mode(nn::Mode m) {
    mode_ = m;
    lin1->set_mode(m);
    bn1->set_mode(m);
    act1->set_mode(m);
    lin2->set_mode(m);
    bn2->set_mode(m);
    act2->set_mode(m);
    if (projection) projection->set_mode(m);
}

// --- GeneratorNet ---

GeneratorNet::GeneratorNet(std::size_t n_bands, std::uint64_t seed,
                           std::vector<std::size_t> block_widths)
    : n_bands_(n_bands), block_widths_(std::move(block_widths)) {
    if (n_bands_ == 0) throw ConfigError("generator: n_bands must be positive");
    if (block_widths_.empty()) throw ConfigError("generator: need at least one block");
    for (std::size_t w : block_widths_)
        if (w == 0) throw ConfigError("generator: zero block width");
    rng_ = std::make_unique<Rng>(Rng::substream(seed, "g-init"));

    stack_.emplace<nn::LinearLayer>(n_bands_, kStageWidth, nn::Init::kaiming_uniform, *rng_);
    stack_.emplace<nn::BatchNormLayer>(kStageWidth);
    stack_.emplace<nn::ActivationLayer>(nn::Activation::relu);
    std::size_t cur = kStageWidth;
    for (std::size_t w : block_widths_) {
        stack_.emplace<ResidualBlock>(cur, w, *rng_);
        cur = w;
    }
    stack_.emplace<nn::LinearLayer>(cur, n_bands_, nn::Init::xavier_uniform, *rng_);
    stack_.emplace<nn::ActivationLayer>(nn::Activation::tanh);
}

nn::Matrix GeneratorNet::forward(const nn::Matrix& veg_norm) {
    return stack_.forward(veg_norm);
}

nn::Matrix GeneratorNet::backward(const nn::Matrix& upstream) {
    return stack_.backward(upstream, true);
}

void GeneratorNet::set_mode(nn::Mode m) { stack_.set_mode(m); }

std::vector<nn::ParamRef> GeneratorNet::params() {
    std::vector<nn::ParamRef> out;
    stack_.collect_params(out);
    return out;
}

std::vector<nn::Layer*> GeneratorNet::param_layers() {
    std::vector<nn::Layer*> out;
    out.push_back(stack_.layers[0].get());  // input linear
    out.push_back(stack_.layers[1].get());  // input BN
    for (std::size_t b = 0; b < block_widths_.size(); ++b) {
        auto* block = static_cast<ResidualBlock*>(stack_.layers[3 + b].get());
        out.push_back(block->lin1.get());
        out.push_back(block->bn1.get());
        out.push_back(block->lin2.get());
        out.push_back(block->bn2.get());
        if (block->projection) out.push_back(block->projection.get());
    }
    out.push_back(stack_.layers[3 + block_widths_.size()].get());  // output linear
    return out;
}

// --- DiscriminatorNet ---

DiscriminatorNet::DiscriminatorNet(std::size_t n_bands, std::uint64_t seed) : n_bands_(n_bands) {
    if (n_bands_ == 0) throw ConfigError("discriminator: n_bands must be positive");
    rng_ = std::make_unique<Rng>(Rng::substream(seed, "d-init"));
    drop_rng_ = std::make_unique<Rng>(Rng::substream(seed, "d-dropout"));

    stack_.emplace<nn::LinearLayer>(2 * n_bands_, 64, nn::Init::kaiming_uniform, *rng_);
    stack_.emplace<nn::ActivationLayer>(nn::Activation::leaky_relu, 0.2);
    stack_.emplace<nn::DropoutLayer>(0.3, *drop_rng_);
    stack_.emplace<nn::BatchNormLayer>(64);
    stack_.emplace<nn::LinearLayer>(64, 128, nn::Init::kaiming_uniform, *rng_);
    stack_.emplace<nn::ActivationLayer>(nn::Activation::leaky_relu, 0.2);
    stack_.emplace<nn::DropoutLayer>(0.3, *drop_rng_);
    stack_.emplace<nn::LinearLayer>(128, 64, nn::Init::kaiming_uniform, *rng_);
    stack_.emplace<nn::ActivationLayer>(nn::Activation::leaky_relu, 0.2);
    stack_.emplace<nn::DropoutLayer>(0.3, *drop_rng_);
    stack_.emplace<nn::LinearLayer>(64, 1, nn::Init::xavier_uniform, *rng_);
    stack_.emplace<nn::ActivationLayer>(nn::Activation::sigmoid);
}

nn::Matrix DiscriminatorNet::forward(const nn::Matrix& concat_input) {
    if (concat_input.cols != 2 * n_bands_)
        throw ShapeError("discriminator: expected " + std::to_string(2 * n_bands_) +
                         " columns, got " + concat_input.shape_str());
    return stack_.forward(concat_input);
}

nn::Matrix DiscriminatorNet::score(const nn::Matrix& veg_norm, const nn::Matrix& bare_norm) {
    return forward(concat_columns(veg_norm, bare_norm));
}

nn::Matrix DiscriminatorNet::backward(const nn::Matrix& upstream, bool accumulate_param_grads) {
    return stack_.backward(upstream, accumulate_param_grads);
}

void DiscriminatorNet::set_mode(nn::Mode m) { stack_.set_mode(m); }

std::vector<nn::ParamRef> DiscriminatorNet::params() {
    std::vector<nn::ParamRef> out;
    stack_.collect_params(out);
    return out;
}

void DiscriminatorNet::freeze_dropout(bool frozen) {
    for (auto& l : stack_.layers)
        if (auto* d = dynamic_cast<nn::DropoutLayer*>(l.get())) d->freeze_mask(frozen);
}

std::vector<nn::Layer*> DiscriminatorNet::param_layers() {
    return {stack_.layers[0].get(), stack_.layers[3].get(), stack_.layers[4].get(),
            stack_.layers[7].get(), stack_.layers[10].get()};
}

nn::Matrix concat_columns(const nn::Matrix& a, const nn::Matrix& b) {
    if (a.rows != b.rows)
        throw ShapeError("concat: row mismatch " + a.shape_str() + " vs " + b.shape_str());
    nn::Matrix out(a.rows, a.cols + b.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        double* dst = out.row(r);
        const double* ar = a.row(r);
        const double* br = b.row(r);
        for (std::size_t c = 0; c < a.cols; ++c) dst[c] = ar[c];
        for (std::size_t c = 0; c < b.cols; ++c) dst[a.cols + c] = br[c];
    }
    return out;
}

// --- config & losses ---

void GanTrainConfig::validate() const {
    if (batch_size < 2) throw ConfigError("gan: batch_size must be at least 2");
    if (!(lr > 0)) throw ConfigError("gan: lr must be positive");
    if (!(beta1 > 0) || beta1 >= 1 || !(beta2 > 0) || beta2 >= 1)
        throw ConfigError("gan: betas must lie in (0,1)");
    if (l1_weight < 0) throw ConfigError("gan: l1_weight must be >= 0");
    if (d_steps_per_g_step == 0) throw ConfigError("gan: d_steps_per_g_step must be positive");
}

DLossResult d_loss(const nn::Matrix& real_scores, const nn::Matrix& fake_scores) {
    DLossResult out;
    out.loss_d_real = nn::bce_loss(real_scores, ones_like(real_scores)).value;
    out.loss_d_fake = nn::bce_loss(fake_scores, zeros_like(fake_scores)).value;
    out.loss_d = out.loss_d_real + out.loss_d_fake;
    return out;
}

double g_loss(const nn::Matrix& fake_scores) {
    return nn::bce_loss(fake_scores, ones_like(fake_scores)).value;
}

// --- training ---

TrainedGan train(const std::vector<data::PairedRecord>& pairs, const GanTrainConfig& cfg) {
    cfg.validate();
    if (pairs.size() < cfg.batch_size)
        throw ConfigError("gan: need at least batch_size (" + std::to_string(cfg.batch_size) +
                          ") pairs, got " + std::to_string(pairs.size()));
    const std::size_t n_bands = pairs[0].veg.n_bands();
    for (const auto& p : pairs) {
        p.veg.validate(n_bands);
        p.bare_target.validate(n_bands);
    }

    TrainedGan out;
    out.generator = std::make_unique<GeneratorNet>(n_bands, cfg.seed);
    out.discriminator = std::make_unique<DiscriminatorNet>(n_bands, cfg.seed);
    GeneratorNet& G = *out.generator;
    DiscriminatorNet& D = *out.discriminator;
    G.set_mode(nn::Mode::training);
    D.set_mode(nn::Mode::training);

    nn::Adam adam_g(G.params(), cfg.lr, cfg.beta1, cfg.beta2);
    nn::Adam adam_d(D.params(), cfg.lr, cfg.beta1, cfg.beta2);

    const std::size_t n = pairs.size();
    nn::Matrix veg_all(n, n_bands), bare_all(n, n_bands);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t b = 0; b < n_bands; ++b) {
            veg_all.at(i, b) = 2.0 * clamp01(pairs[i].veg.values[b]) - 1.0;
            bare_all.at(i, b) = 2.0 * clamp01(pairs[i].bare_target.values[b]) - 1.0;
        }

    Rng shuffle_rng = Rng::substream(cfg.seed, "gan-shuffle");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    const std::size_t n_batches = n / cfg.batch_size;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double sum_ldr = 0, sum_ldf = 0, sum_lg = 0;
        double sum_real_score = 0, sum_fake_score = 0;
        std::size_t n_d = 0, n_scores = 0;

        for (std::size_t batch = 0; batch < n_batches; ++batch) {
            nn::Matrix veg_b(cfg.batch_size, n_bands), bare_b(cfg.batch_size, n_bands);
            for (std::size_t i = 0; i < cfg.batch_size; ++i) {
                const std::size_t src = order[batch * cfg.batch_size + i];
                for (std::size_t b = 0; b < n_bands; ++b) {
                    veg_b.at(i, b) = veg_all.at(src, b);
                    bare_b.at(i, b) = bare_all.at(src, b);
                }
            }

            // Generator forward once per batch; the discriminator steps treat
            // the result as a constant and the generator step backpropagates
            // through the caches of this same forward pass.
            nn::Matrix fake = G.forward(veg_b);

            for (std::size_t ds = 0; ds < cfg.d_steps_per_g_step; ++ds) {
                D.zero_grads();
                nn::Matrix real_scores = D.forward(concat_columns(veg_b, bare_b));
                nn::LossResult real_loss = nn::bce_loss(real_scores, ones_like(real_scores));
                D.backward(real_loss.grad);
                nn::Matrix fake_scores = D.forward(concat_columns(veg_b, fake));
                nn::LossResult fake_loss = nn::bce_loss(fake_scores, zeros_like(fake_scores));
                D.backward(fake_loss.grad);
                adam_d.step();

                if (!std::isfinite(real_loss.value) || !std::isfinite(fake_loss.value))
                    throw NumericError("gan: non-finite discriminator loss at epoch " +
                                       std::to_string(epoch) + ", batch " +
                                       std::to_string(batch));
                sum_ldr += real_loss.value;
                sum_ldf += fake_loss.value;
                ++n_d;
                for (double s : real_scores.data) sum_real_score += s;
                for (double s : fake_scores.data) sum_fake_score += s;
                n_scores += real_scores.data.size();
            }

            G.zero_grads();
            nn::Matrix fake_scores_g = D.forward(concat_columns(veg_b, fake));
            nn::LossResult adv = nn::bce_loss(fake_scores_g, ones_like(fake_scores_g));
            nn::Matrix d_input_grad = D.backward(adv.grad, /*accumulate_param_grads=*/false);
            nn::Matrix d_fake(cfg.batch_size, n_bands);
            for (std::size_t r = 0; r < cfg.batch_size; ++r)
                for (std::size_t c = 0; c < n_bands; ++c)
                    d_fake.at(r, c) = d_input_grad.at(r, n_bands + c);

            double total_g = adv.value;
            if (cfg.l1_weight > 0) {
                const double inv = 1.0 / static_cast<double>(fake.data.size());
                double l1 = 0;
                for (std::size_t i = 0; i < fake.data.size(); ++i) {
                    const double diff = fake.data[i] - bare_b.data[i];
                    l1 += std::fabs(diff);
                    d_fake.data[i] += cfg.l1_weight * inv * (diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0));
                }
                total_g += cfg.l1_weight * l1 * inv;
            }
            G.backward(d_fake);
            adam_g.step();

            if (!std::isfinite(total_g))
                throw NumericError("gan: non-finite generator loss at epoch " +
                                   std::to_string(epoch) + ", batch " + std::to_string(batch));
            sum_lg += total_g;
        }

        GanLossReport rep;
        rep.epoch = epoch;
        rep.loss_d_real = n_d ? sum_ldr / static_cast<double>(n_d) : 0.0;
        rep.loss_d_fake = n_d ? sum_ldf / static_cast<double>(n_d) : 0.0;
        rep.loss_d = rep.loss_d_real + rep.loss_d_fake;
        rep.loss_g = n_batches ? sum_lg / static_cast<double>(n_batches) : 0.0;
        rep.d_real_mean = n_scores ? sum_real_score / static_cast<double>(n_scores) : 0.0;
        rep.d_fake_mean = n_scores ? sum_fake_score / static_cast<double>(n_scores) : 0.0;
        out.history.push_back(rep);
    }

    G.set_mode(nn::Mode::inference);
    D.set_mode(nn::Mode::inference);
    return out;
}

std::vector<spectral::BandVector> reconstruct(GeneratorNet& g,
                                              const std::vector<spectral::BandVector>& samples) {
    if (g.mode() != nn::Mode::inference)
        throw ConfigError("reconstruct: generator must be in inference mode");
    std::vector<spectral::BandVector> out;
    if (samples.empty()) return out;
    const std::size_t n_bands = g.n_bands();
    nn::Matrix x(samples.size(), n_bands);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].validate(n_bands);
        for (std::size_t b = 0; b < n_bands; ++b)
            x.at(i, b) = 2.0 * clamp01(samples[i].values[b]) - 1.0;
    }
    nn::Matrix y = g.forward(x);
    out.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out[i].values.resize(n_bands);
        for (std::size_t b = 0; b < n_bands; ++b) out[i].values[b] = (y.at(i, b) + 1.0) / 2.0;
    }
    return out;
}

// --- serialization ---

namespace {

void append_values(std::string& out, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += csv::fmt17(v[i]);
    }
    out += '\n';
}

std::vector<double> parse_values(const std::string& line, std::size_t expect,
                                 const std::string& ctx) {
    std::vector<double> out;
    out.reserve(expect);
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(csv::parse_double(tok, ctx));
    if (out.size() != expect)
        throw ConfigError(ctx + ": expected " + std::to_string(expect) + " values, got " +
                          std::to_string(out.size()));
    return out;
}

std::string serialize_layers(const std::vector<nn::Layer*>& layers) {
    std::string out;
    for (nn::Layer* l : layers) {
        if (auto* lin = dynamic_cast<nn::LinearLayer*>(l)) {
            out += "linear " + std::to_string(lin->out_dim()) + " " +
                   std::to_string(lin->in_dim()) + "\n";
            append_values(out, lin->weight.data);
            append_values(out, lin->bias);
        } else if (auto* bn = dynamic_cast<nn::BatchNormLayer*>(l)) {
            out += "batchnorm " + std::to_string(bn->features()) + "\n";
            append_values(out, bn->gamma);
            append_values(out, bn->beta);
            append_values(out, bn->running_mean);
            append_values(out, bn->running_var);
        } else {
            throw ConfigError("save_weights: unserializable layer");
        }
    }
    return out;
}

void deserialize_layers(const std::vector<std::string>& lines, std::size_t& pos,
                        const std::vector<nn::Layer*>& layers, const std::string& path) {
    auto next = [&]() -> const std::string& {
        if (pos >= lines.size()) throw ConfigError(path + ": truncated weights file");
        return lines[pos++];
    };
    for (nn::Layer* l : layers) {
        const std::string& head = next();
        std::istringstream hs(head);
        std::string kind;
        std::size_t a = 0, b = 0;
        hs >> kind >> a;
        if (auto* lin = dynamic_cast<nn::LinearLayer*>(l)) {
            hs >> b;
            if (kind != "linear" || a != lin->out_dim() || b != lin->in_dim())
                throw ConfigError(path + ": layer mismatch, expected linear " +
                                  std::to_string(lin->out_dim()) + " " +
                                  std::to_string(lin->in_dim()) + ", got '" + head + "'");
            lin->weight.data = parse_values(next(), lin->weight.data.size(), path);
            lin->bias = parse_values(next(), lin->bias.size(), path);
        } else if (auto* bn = dynamic_cast<nn::BatchNormLayer*>(l)) {
            if (kind != "batchnorm" || a != bn->features())
                throw ConfigError(path + ": layer mismatch, expected batchnorm " +
                                  std::to_string(bn->features()) + ", got '" + head + "'");
            bn->gamma = parse_values(next(), bn->features(), path);
            bn->beta = parse_values(next(), bn->features(), path);
            bn->running_mean = parse_values(next(), bn->features(), path);
            bn->running_var = parse_values(next(), bn->features(), path);
        } else {
            throw ConfigError(path + ": unserializable layer");
        }
    }
}

struct WeightsHeader {
    std::string role;
    std::size_t n_bands = 0;
    nn::Mode mode = nn::Mode::training;
    std::vector<std::size_t> blocks;
    std::size_t body_start = 0;
};

WeightsHeader parse_header(const std::vector<std::string>& lines, const std::string& path,
                           const std::string& want_role) {
    if (lines.empty()) throw ConfigError(path + ": empty weights file");
    std::istringstream hs(lines[0]);
    std::string magic, version;
    WeightsHeader h;
    hs >> magic >> version >> h.role >> h.n_bands;
    if (magic != "reflectgan-weights")
        throw ConfigError(path + ": not a weights file (bad magic '" + magic + "')");
    if (version != "v1") throw ConfigError(path + ": unsupported version '" + version + "'");
    if (h.role != want_role)
        throw ConfigError(path + ": role is '" + h.role + "', expected '" + want_role + "'");
    if (h.n_bands == 0) throw ConfigError(path + ": bad n_bands");
    std::size_t pos = 1;
    if (pos >= lines.size()) throw ConfigError(path + ": truncated weights file");
    {
        std::istringstream ms(lines[pos]);
        std::string key, value;
        ms >> key >> value;
        if (key != "mode" || (value != "training" && value != "inference"))
            throw ConfigError(path + ": expected mode line, got '" + lines[pos] + "'");
        h.mode = value == "training" ? nn::Mode::training : nn::Mode::inference;
        ++pos;
    }
    if (want_role == "generator") {
        if (pos >= lines.size()) throw ConfigError(path + ": truncated weights file");
        std::istringstream bs(lines[pos]);
        std::string key;
        bs >> key;
        if (key != "blocks") throw ConfigError(path + ": expected blocks line");
        std::size_t w;
        while (bs >> w) h.blocks.push_back(w);
        if (h.blocks.empty()) throw ConfigError(path + ": empty blocks line");
        ++pos;
    }
    h.body_start = pos;
    return h;
}

std::string mode_name(nn::Mode m) { return m == nn::Mode::training ? "training" : "inference"; }

}  // namespace

void save_weights(GeneratorNet& net, const std::string& path) {
    std::string out = "reflectgan-weights v1 generator " + std::to_string(net.n_bands()) + "\n";
    out += "mode " + mode_name(net.mode()) + "\n";
    out += "blocks";
    for (std::size_t w : net.block_widths()) out += " " + std::to_string(w);
    out += "\n";
    out += serialize_layers(net.param_layers());
    csv::write_file(path, out);
}

void save_weights(DiscriminatorNet& net, const std::string& path) {
    std::string out =
        "reflectgan-weights v1 discriminator " + std::to_string(net.n_bands()) + "\n";
    out += "mode " + mode_name(net.mode()) + "\n";
    out += serialize_layers(net.param_layers());
    csv::write_file(path, out);
}

std::unique_ptr<GeneratorNet> load_generator(const std::string& path) {
    auto lines = csv::read_lines(path);
    WeightsHeader h = parse_header(lines, path, "generator");
    auto net = std::make_unique<GeneratorNet>(h.n_bands, /*seed=*/0, h.blocks);
    std::size_t pos = h.body_start;
    deserialize_layers(lines, pos, net->param_layers(), path);
    net->set_mode(h.mode);
    return net;
}

std::unique_ptr<DiscriminatorNet> load_discriminator(const std::string& path) {
    auto lines = csv::read_lines(path);
    WeightsHeader h = parse_header(lines, path, "discriminator");
    auto net = std::make_unique<DiscriminatorNet>(h.n_bands, /*seed=*/0);
    std::size_t pos = h.body_start;
    deserialize_layers(lines, pos, net->param_layers(), path);
    net->set_mode(h.mode);
    return net;
}

void write_loss_csv(const std::string& path, const std::vector<GanLossReport>& history) {
    std::string out = "epoch,loss_d_real,loss_d_fake,loss_d,loss_g,d_real_mean,d_fake_mean\n";
    for (const auto& r : history) {
        out += std::to_string(r.epoch) + "," + csv::fmt17(r.loss_d_real) + "," +
               csv::fmt17(r.loss_d_fake) + "," + csv::fmt17(r.loss_d) + "," +
               csv::fmt17(r.loss_g) + "," + csv::fmt17(r.d_real_mean) + "," +
               csv::fmt17(r.d_fake_mean) + "\n";
    }
    csv::write_file(path, out);
}

}  // namespace rg::gan
