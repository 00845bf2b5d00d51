#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reflectgan/baselines.hpp"
#include "reflectgan/dataset.hpp"
#include "reflectgan/gan.hpp"
#include "reflectgan/regressors.hpp"
#include "reflectgan/spectral.hpp"

namespace rg::eval {

// --- metrics ---

// 1 - sum((y-yhat)^2) / sum((y-ybar)^2). May be negative. Needs n >= 2 and a
// non-constant y_true (constant -> DegenerateInput).
double r2(const std::vector<double>& y_true, const std::vector<double>& y_est);

// sqrt(mean squared error), 1/N convention.
double rmse(const std::vector<double>& y_true, const std::vector<double>& y_est);

// Population (1/N) standard deviation.
double population_std(const std::vector<double>& y);

struct Rpd {
    double value = 0;
    bool infinite = false;  // rmse was exactly zero
};

// Ratio of performance to deviation: population std of y_true over rmse.
// Computed as exactly std/rmse so rpd*rmse recovers the std.
Rpd rpd(const std::vector<double>& y_true, const std::vector<double>& y_est);

// Product-moment correlation; n >= 3, both inputs non-constant
// (zero variance -> DegenerateInput).
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// --- scenario matrix ---

enum class InputKind {
    bare_only,
    vegetated_only,
    bare_plus_raw_veg,
    reconstructed_only,
    bare_plus_reconstructed,
    vi_corrected,
    sma_corrected,
};
inline constexpr std::size_t kNumInputKinds = 7;

const char* input_kind_name(InputKind k);
InputKind input_kind_from_name(const std::string& name);

struct ScenarioSpec {
    InputKind input_kind = InputKind::bare_only;
    bool with_features = false;
    soc::FitSpec::Kind model = soc::FitSpec::Kind::lr;
};

// Full grid: 7 input kinds x {raw bands, with features} x 5 models = 70 cells,
// in that nesting order.
std::vector<ScenarioSpec> default_scenarios();

struct ScenarioRow {
    ScenarioSpec spec;
    double r2 = 0;
    double rmse = 0;
    Rpd rpd;
    std::size_t n_test = 0;
};

// Per-band correlation between reflectance (under this input kind's
// transformation) and SOC over the kind's full population. NaN marks a band
// whose variance vanished.
struct PearsonRow {
    InputKind input_kind = InputKind::bare_only;
    std::vector<double> corr;
};

struct EvalReport {
    std::vector<ScenarioRow> rows;
    std::vector<PearsonRow> pearson;
};

// Everything a scenario run needs. The id lists say which samples each
// upstream artifact was fitted on; the runner refuses to score if any test
// sample appears in one of them.
struct EvalInputs {
    const std::vector<data::SoilSample>* samples = nullptr;
    const data::DatasetSplit* split = nullptr;
    spectral::BandRoleMap roles = spectral::BandRoleMap::landsat8();
    spectral::TasseledCapCoefficients tct = spectral::TasseledCapCoefficients::landsat8();
    double ndvi_threshold = 0.2;

    gan::GeneratorNet* generator = nullptr;            // reconstructed kinds
    const baselines::EndmemberSet* endmembers = nullptr;  // sma_corrected
    const baselines::ViCorrection* vi = nullptr;          // vi_corrected
    double sma_f_floor = 0.05;

    std::vector<std::string> gan_train_ids;
    std::vector<std::string> endmember_fit_ids;
    std::vector<std::string> vi_fit_ids;

    std::uint64_t seed = 42;
};

// Fits and scores every cell. Per-cell model seeds derive from
// seed ^ fnv1a("input_kind/features/model") so cells are independent and
// reruns are bit-identical. Row order follows `specs`.
EvalReport run_scenarios(const std::vector<ScenarioSpec>& specs, const EvalInputs& in);

// One input kind materialized as a model-ready dataset: global sample indices
// (ascending), one feature row per index, and the SOC targets. Applies the
// same transformations and leakage guard as run_scenarios.
struct KindDataset {
    std::vector<std::size_t> population;
    soc::FeatureMatrix features;
    std::vector<double> targets;
};

KindDataset assemble_input(InputKind kind, bool with_features, const EvalInputs& in);

// `scenario,with_features,model,r2,rmse,rpd,n_test`; infinite RPD prints inf.
void write_report_csv(const std::string& path, const EvalReport& report);
// `input_kind,b1..bN`.
void write_pearson_csv(const std::string& path, const EvalReport& report, std::size_t n_bands);

}  // namespace rg::eval
