#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "reflectgan/dataset.hpp"
#include "reflectgan/evaluation.hpp"
#include "reflectgan/gan.hpp"

namespace rg::pipeline {

// Everything a command needs, populated from a flat key=value config file plus
// CLI overrides. Relative artifact paths are resolved against out_dir so one
// directory holds a whole run.
struct RunConfig {
    std::uint64_t seed = 42;
    std::size_t n_bands = 7;
    double ndvi_threshold = 0.2;
    double test_fraction = 0.2;
    std::size_t k_folds = 5;

    std::string out_dir = ".";
    std::string samples_path = "samples.csv";
    std::string truth_path = "truth.csv";
    std::string paired_path = "paired.csv";
    std::string generator_path = "generator.weights";
    std::string discriminator_path = "discriminator.weights";
    std::string loss_path = "gan_loss.csv";
    std::string reconstructed_path = "reconstructed.csv";
    std::string report_path = "report.csv";
    std::string pearson_path = "pearson.csv";
    std::string endmembers_path;  // empty: estimate from the training split
    std::string tct_path;         // empty: built-in Landsat-8 coefficients

    std::size_t pairing_k = 3;
    double pairing_max_radius = std::numeric_limits<double>::infinity();
    double endmember_ndvi_hi = 0.7;
    double sma_f_floor = 0.05;

    gan::GanTrainConfig gan;
    bool gan_use_split = true;   // train only on pairs fully inside the train split
    bool gan_seed_set = false;   // explicit gan.seed given; else follows `seed`
    data::SynthConfig synth;
    bool synth_seed_set = false;

    std::string soc_input_kind = "bare_plus_reconstructed";
    bool soc_with_features = false;
    std::string scenarios = "all";  // or ';'-separated kind/bands|features/model

    gan::GanTrainConfig effective_gan() const;
    data::SynthConfig effective_synth() const;
    std::string resolve(const std::string& path) const;
    void validate() const;
};

// One `key=value` assignment; unknown keys and malformed values throw
// ConfigError naming the key.
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);
// `key=value` as a single token (the CLI --set form).
void apply_override(RunConfig& cfg, const std::string& assignment);

// Lines of `key=value`; blank lines and `#` comments ignored.
RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);

// Every key with its effective value, sorted, one per line.
std::string render_config(const RunConfig& cfg);

// "all" -> the full 70-cell grid; otherwise ';'-separated cell names like
// `bare_only/bands/lr` or `reconstructed_only/features/rforest`.
std::vector<eval::ScenarioSpec> parse_scenarios(const std::string& text);

// --- commands ---

struct SynthSummary {
    std::size_t n_samples = 0;
    std::string samples_path, truth_path;
};
SynthSummary cmd_synth(const RunConfig& cfg, std::ostream& out);

struct PairSummary {
    std::size_t n_bare = 0, n_vegetated = 0, n_pairs = 0, n_dropped = 0;
    std::string paired_path;
};
PairSummary cmd_pair(const RunConfig& cfg, std::ostream& out);

struct TrainGanSummary {
    std::size_t n_pairs_total = 0, n_pairs_used = 0, epochs = 0;
    double final_loss_d = 0, final_loss_g = 0;
    std::string generator_path, discriminator_path;
};
TrainGanSummary cmd_train_gan(const RunConfig& cfg, std::ostream& out);

struct ReconstructSummary {
    std::size_t n_rows = 0, n_reconstructed = 0;
    std::string output_path;
};
ReconstructSummary cmd_reconstruct(const RunConfig& cfg, std::ostream& out);

eval::EvalReport cmd_evaluate(const RunConfig& cfg, std::ostream& out);

struct SocCvRow {
    std::string model;
    std::string fold;  // "1".."k" or "mean"
    double r2 = 0, rmse = 0, rpd = 0;
    std::size_t n_val = 0;
};
struct TrainSocSummary {
    std::vector<SocCvRow> rows;
    std::vector<std::string> model_paths;
};
TrainSocSummary cmd_train_soc(const RunConfig& cfg, std::ostream& out);

// Spectral fidelity of each correction method against the synthetic ground
// truth, over test-split vegetated samples: per-band RMSE plus the band mean.
struct BaselineRow {
    std::string method;  // vegetated, vi_corrected, sma_corrected, reconstructed
    std::vector<double> band_rmse;
    double mean_rmse = 0;
};
struct CompareSummary {
    std::vector<BaselineRow> rows;
    std::size_t n_samples = 0;  // test-split vegetated samples scored
};
CompareSummary cmd_compare_baselines(const RunConfig& cfg, std::ostream& out);

struct GradCheckRow {
    std::string component;
    double max_error = 0;
    std::size_t n_coords = 0;
};
struct GradCheckTable {
    std::vector<GradCheckRow> rows;
    bool all_pass = false;
    double threshold = 1e-4;
};
// Finite-difference check of every differentiable component at probe scale.
GradCheckTable run_grad_checks(std::uint64_t seed = 42);
GradCheckTable cmd_grad_check(std::ostream& out);

// Train-split id sidecar written next to the generator weights; evaluate
// refuses to run without it.
void write_train_ids(const std::string& path, const std::vector<std::string>& ids);
std::vector<std::string> read_train_ids(const std::string& path);

// `sample_id,lon,lat,soc_g_kg,b1..bN,reconstructed` with flag 0/1.
struct ReconstructedRow {
    data::SoilSample sample;
    bool reconstructed = false;
};
void write_reconstructed_csv(const std::string& path, const std::vector<ReconstructedRow>& rows,
                             std::size_t n_bands);
std::vector<ReconstructedRow> read_reconstructed_csv(const std::string& path,
                                                     std::size_t n_bands);

}  // namespace rg::pipeline
