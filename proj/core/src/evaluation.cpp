#include "reflectgan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "reflectgan/csv.hpp"
#include "reflectgan/errors.hpp"
#include "reflectgan/rng.hpp"

namespace rg::eval {

namespace {

void check_lengths(const char* who, const std::vector<double>& a, const std::vector<double>& b,
                   std::size_t min_n) {
    if (a.size() != b.size())
        throw ConfigError(std::string(who) + ": length mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
    if (a.size() < min_n)
        throw ConfigError(std::string(who) + ": need at least " + std::to_string(min_n) +
                          " values, got " + std::to_string(a.size()));
}

bool is_constant(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
}

}  // namespace

double r2(const std::vector<double>& y_true, const std::vector<double>& y_est) {
    check_lengths("r2", y_true, y_est, 2);
    if (is_constant(y_true)) throw DegenerateInput("r2: constant y_true has no variance");
    const double n = static_cast<double>(y_true.size());
    double mean = 0;
    for (double v : y_true) mean += v;
    mean /= n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double dr = y_true[i] - y_est[i];
        const double dt = y_true[i] - mean;
        ss_res += dr * dr;
        ss_tot += dt * dt;
    }
    return 1.0 - ss_res / ss_tot;
}

double rmse(const std::vector<double>& y_true, const std::vector<double>& y_est) {
    check_lengths("rmse", y_true, y_est, 1);
    double acc = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double d = y_true[i] - y_est[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(y_true.size()));
}

double population_std(const std::vector<double>& y) {
    if (y.empty()) throw ConfigError("population_std: empty input");
    double mean = 0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double acc = 0;
    for (double v : y) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(y.size()));
}

Rpd rpd(const std::vector<double>& y_true, const std::vector<double>& y_est) {
    check_lengths("rpd", y_true, y_est, 2);
    const double e = rmse(y_true, y_est);
    if (e == 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {population_std(y_true) / e, false};
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    check_lengths("pearson", x, y, 3);
    if (is_constant(x) || is_constant(y))
        throw DegenerateInput("pearson: zero-variance input");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson: zero-variance input");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

const char* input_kind_name(InputKind k) {
    switch (k) {
        case InputKind::bare_only: return "bare_only";
        case InputKind::vegetated_only: return "vegetated_only";
        case InputKind::bare_plus_raw_veg: return "bare_plus_raw_veg";
        case InputKind::reconstructed_only: return "reconstructed_only";
        case InputKind::bare_plus_reconstructed: return "bare_plus_reconstructed";
        case InputKind::vi_corrected: return "vi_corrected";
        case InputKind::sma_corrected: return "sma_corrected";
    }
    return "?";
}

InputKind input_kind_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kNumInputKinds; ++i) {
        const auto k = static_cast<InputKind>(i);
        if (name == input_kind_name(k)) return k;
    }
    throw ConfigError("unknown input kind '" + name + "'");
}

std::vector<ScenarioSpec> default_scenarios() {
    static constexpr soc::FitSpec::Kind kModels[] = {
        soc::FitSpec::Kind::lr, soc::FitSpec::Kind::knn, soc::FitSpec::Kind::dtree,
        soc::FitSpec::Kind::rforest, soc::FitSpec::Kind::mlp};
    std::vector<ScenarioSpec> out;
    out.reserve(kNumInputKinds * 2 * 5);
    for (std::size_t ki = 0; ki < kNumInputKinds; ++ki)
        for (bool wf : {false, true})
            for (soc::FitSpec::Kind m : kModels)
                out.push_back({static_cast<InputKind>(ki), wf, m});
    return out;
}

namespace {

struct KindData {
    std::vector<std::size_t> population;  // global sample indices, ascending
    std::vector<spectral::BandVector> bands;
    std::vector<double> soc;
};

std::string cell_name(const ScenarioSpec& s) {
    return std::string(input_kind_name(s.input_kind)) + "/" +
           (s.with_features ? "features" : "bands") + "/" + soc::kind_name(s.model);
}

class ScenarioRunner {
  public:
    explicit ScenarioRunner(const EvalInputs& in) : in_(in) {
        if (!in_.samples || !in_.split) throw ConfigError("run_scenarios: missing samples or split");
        if (in_.samples->empty()) throw ConfigError("run_scenarios: no samples");
        const std::size_t n = in_.samples->size();
        for (std::size_t i : in_.split->train_indices)
            if (i >= n) throw ConfigError("run_scenarios: split train index out of range");
        for (std::size_t i : in_.split->test_indices)
            if (i >= n) throw ConfigError("run_scenarios: split test index out of range");
        membership_.assign(n, 0);
        for (std::size_t i : in_.split->train_indices) membership_[i] = 1;
        for (std::size_t i : in_.split->test_indices) membership_[i] = 2;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = (*in_.samples)[i];
            if (s.ndvi > in_.ndvi_threshold)
                veg_idx_.push_back(i);
            else
                bare_idx_.push_back(i);
        }
        enforce_leakage_guard();
    }

    KindDataset dataset(InputKind k, bool with_features) {
        const KindData& kd = kind_data(k);
        const soc::FeatureMatrix& fm = features(k, with_features);
        const std::vector<char>* bad = with_features ? degenerate_rows(k) : nullptr;
        std::vector<std::size_t> keep;
        keep.reserve(kd.population.size());
        for (std::size_t r = 0; r < kd.population.size(); ++r)
            if (!bad || !(*bad)[r]) keep.push_back(r);
        KindDataset out;
        out.features.feature_names = fm.feature_names;
        out.features.x = nn::Matrix(keep.size(), fm.x.cols);
        out.population.reserve(keep.size());
        out.targets.reserve(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i) {
            out.population.push_back(kd.population[keep[i]]);
            out.targets.push_back(kd.soc[keep[i]]);
            std::copy(fm.x.row(keep[i]), fm.x.row(keep[i]) + fm.x.cols, out.features.x.row(i));
        }
        return out;
    }

    EvalReport run(const std::vector<ScenarioSpec>& specs) {
        EvalReport report;
        for (const auto& spec : specs) report.rows.push_back(run_cell(spec));
        // Correlation table: one row per referenced kind, enum order.
        bool used[kNumInputKinds] = {};
        for (const auto& spec : specs) used[static_cast<std::size_t>(spec.input_kind)] = true;
        for (std::size_t ki = 0; ki < kNumInputKinds; ++ki)
            if (used[ki]) report.pearson.push_back(pearson_row(static_cast<InputKind>(ki)));
        return report;
    }

  private:
    void enforce_leakage_guard() {
        struct Source {
            const std::vector<std::string>* ids;
            const char* what;
        };
        const Source sources[] = {{&in_.gan_train_ids, "generator training"},
                                  {&in_.endmember_fit_ids, "endmember estimation"},
                                  {&in_.vi_fit_ids, "index-regression fitting"}};
        std::unordered_set<std::string> fitted;
        std::unordered_map<std::string, const char*> origin;
        for (const auto& src : sources)
            for (const auto& id : *src.ids)
                if (fitted.insert(id).second) origin[id] = src.what;
        if (fitted.empty()) return;
        for (std::size_t i : in_.split->test_indices) {
            const auto& id = (*in_.samples)[i].id;
            const auto it = fitted.find(id);
            if (it != fitted.end())
                throw ConfigError("leakage guard: test sample '" + id + "' was used in " +
                                  origin[id]);
        }
    }

    const KindData& kind_data(InputKind k) {
        auto it = kind_cache_.find(k);
        if (it != kind_cache_.end()) return it->second;
        KindData kd;
        switch (k) {
            case InputKind::bare_only:
                kd.population = bare_idx_;
                for (std::size_t i : kd.population) kd.bands.push_back((*in_.samples)[i].bands);
                break;
            case InputKind::vegetated_only:
                kd.population = veg_idx_;
                for (std::size_t i : kd.population) kd.bands.push_back((*in_.samples)[i].bands);
                break;
            case InputKind::bare_plus_raw_veg:
                kd.population.resize(in_.samples->size());
                for (std::size_t i = 0; i < kd.population.size(); ++i) kd.population[i] = i;
                for (std::size_t i : kd.population) kd.bands.push_back((*in_.samples)[i].bands);
                break;
            case InputKind::reconstructed_only:
                kd.population = veg_idx_;
                kd.bands = reconstructed();
                break;
            case InputKind::bare_plus_reconstructed: {
                kd.population.resize(in_.samples->size());
                for (std::size_t i = 0; i < kd.population.size(); ++i) kd.population[i] = i;
                const auto& recon = reconstructed();
                std::size_t vi = 0;
                for (std::size_t i : kd.population) {
                    if (vi < veg_idx_.size() && veg_idx_[vi] == i)
                        kd.bands.push_back(recon[vi++]);
                    else
                        kd.bands.push_back((*in_.samples)[i].bands);
                }
                break;
            }
            case InputKind::vi_corrected:
                if (!in_.vi)
                    throw ConfigError("scenario vi_corrected: no fitted index regression supplied");
                kd.population = veg_idx_;
                for (std::size_t i : kd.population)
                    kd.bands.push_back(in_.vi->apply((*in_.samples)[i].bands, in_.roles));
                break;
            case InputKind::sma_corrected:
                if (!in_.endmembers)
                    throw ConfigError("scenario sma_corrected: no endmember set supplied");
                kd.population = veg_idx_;
                for (std::size_t i : kd.population)
                    kd.bands.push_back(baselines::sma_correct((*in_.samples)[i].bands,
                                                              *in_.endmembers, in_.sma_f_floor)
                                           .bare_est);
                break;
        }
        for (std::size_t i : kd.population) kd.soc.push_back((*in_.samples)[i].soc);
        return kind_cache_.emplace(k, std::move(kd)).first->second;
    }

    const std::vector<spectral::BandVector>& reconstructed() {
        if (!recon_.empty() || veg_idx_.empty()) return recon_;
        if (!in_.generator)
            throw ConfigError("reconstructed scenario: no trained generator supplied");
        std::vector<spectral::BandVector> veg;
        veg.reserve(veg_idx_.size());
        for (std::size_t i : veg_idx_) veg.push_back((*in_.samples)[i].bands);
        in_.generator->set_mode(nn::Mode::inference);
        recon_ = gan::reconstruct(*in_.generator, veg);
        return recon_;
    }

    const soc::FeatureMatrix& features(InputKind k, bool with_features) {
        const auto key = std::make_pair(k, with_features);
        auto it = feature_cache_.find(key);
        if (it != feature_cache_.end()) return it->second;
        const KindData& kd = kind_data(k);
        const std::size_t n_bands = (*in_.samples)[0].bands.n_bands();
        soc::FeatureMatrix fm;
        if (with_features) {
            auto& bad = degenerate_[k];
            bad.assign(kd.bands.size(), 0);
            fm.feature_names = spectral::augmented_feature_names(n_bands);
            fm.x = nn::Matrix(kd.bands.size(), fm.feature_names.size());
            for (std::size_t r = 0; r < kd.bands.size(); ++r) {
                try {
                    const auto feats = spectral::augment_features(kd.bands[r], in_.roles, in_.tct);
                    std::copy(feats.begin(), feats.end(), fm.x.row(r));
                } catch (const DegenerateInput&) {
                    // Corrected spectra can clamp a band pair to zero, voiding a
                    // ratio index; such rows are dropped from feature-based cells.
                    bad[r] = 1;
                    std::fill(fm.x.row(r), fm.x.row(r) + fm.x.cols,
                              std::numeric_limits<double>::quiet_NaN());
                }
            }
        } else {
            for (std::size_t b = 0; b < n_bands; ++b)
                fm.feature_names.push_back("b" + std::to_string(b + 1));
            fm.x = nn::Matrix(kd.bands.size(), n_bands);
            for (std::size_t r = 0; r < kd.bands.size(); ++r)
                std::copy(kd.bands[r].values.begin(), kd.bands[r].values.end(), fm.x.row(r));
        }
        return feature_cache_.emplace(key, std::move(fm)).first->second;
    }

    ScenarioRow run_cell(const ScenarioSpec& spec) {
        const KindData& kd = kind_data(spec.input_kind);
        const soc::FeatureMatrix& fm = features(spec.input_kind, spec.with_features);
        const std::vector<char>* bad =
            spec.with_features ? degenerate_rows(spec.input_kind) : nullptr;
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t r = 0; r < kd.population.size(); ++r) {
            if (bad && (*bad)[r]) continue;
            if (membership_[kd.population[r]] == 1)
                train_rows.push_back(r);
            else if (membership_[kd.population[r]] == 2)
                test_rows.push_back(r);
        }
        const std::string name = cell_name(spec);
        if (train_rows.size() < 2 || test_rows.size() < 2)
            throw DegenerateInput("scenario " + name + ": train/test subset too small (" +
                                  std::to_string(train_rows.size()) + "/" +
                                  std::to_string(test_rows.size()) + ")");

        auto subset = [&](const std::vector<std::size_t>& rows) {
            soc::FeatureMatrix out;
            out.feature_names = fm.feature_names;
            out.x = nn::Matrix(rows.size(), fm.x.cols);
            for (std::size_t i = 0; i < rows.size(); ++i)
                std::copy(fm.x.row(rows[i]), fm.x.row(rows[i]) + fm.x.cols, out.x.row(i));
            return out;
        };
        const soc::FeatureMatrix x_train = subset(train_rows);
        const soc::FeatureMatrix x_test = subset(test_rows);
        std::vector<double> y_train, y_test;
        for (std::size_t r : train_rows) y_train.push_back(kd.soc[r]);
        for (std::size_t r : test_rows) y_test.push_back(kd.soc[r]);

        soc::FitSpec fs;
        fs.kind = spec.model;
        fs.seed = in_.seed ^ fnv1a(name);
        auto model = soc::make_regressor(fs);
        model->fit(x_train, y_train);
        const std::vector<double> pred = model->predict(x_test);

        ScenarioRow row;
        row.spec = spec;
        row.r2 = r2(y_test, pred);
        row.rmse = rmse(y_test, pred);
        row.rpd = rpd(y_test, pred);
        row.n_test = test_rows.size();
        return row;
    }

    PearsonRow pearson_row(InputKind k) {
        const KindData& kd = kind_data(k);
        const std::size_t n_bands = kd.bands.empty() ? 0 : kd.bands[0].n_bands();
        PearsonRow row;
        row.input_kind = k;
        row.corr.assign(n_bands, std::numeric_limits<double>::quiet_NaN());
        if (kd.population.size() < 3) return row;
        std::vector<double> col(kd.population.size());
        for (std::size_t b = 0; b < n_bands; ++b) {
            for (std::size_t r = 0; r < kd.bands.size(); ++r) col[r] = kd.bands[r][b];
            try {
                row.corr[b] = pearson(col, kd.soc);
            } catch (const DegenerateInput&) {
                // flat band or flat targets: leave NaN
            }
        }
        return row;
    }

    const std::vector<char>* degenerate_rows(InputKind k) const {
        const auto it = degenerate_.find(k);
        return it == degenerate_.end() ? nullptr : &it->second;
    }

    const EvalInputs& in_;
    std::vector<int> membership_;  // 0 none, 1 train, 2 test
    std::vector<std::size_t> veg_idx_, bare_idx_;
    std::vector<spectral::BandVector> recon_;
    std::map<InputKind, KindData> kind_cache_;
    std::map<std::pair<InputKind, bool>, soc::FeatureMatrix> feature_cache_;
    std::map<InputKind, std::vector<char>> degenerate_;
};

}  // namespace

EvalReport run_scenarios(const std::vector<ScenarioSpec>& specs, const EvalInputs& in) {
    ScenarioRunner runner(in);
    return runner.run(specs);
}

KindDataset assemble_input(InputKind kind, bool with_features, const EvalInputs& in) {
    ScenarioRunner runner(in);
    return runner.dataset(kind, with_features);
}

void write_report_csv(const std::string& path, const EvalReport& report) {
    std::string out = "scenario,with_features,model,r2,rmse,rpd,n_test\n";
    for (const auto& row : report.rows) {
        out += std::string(input_kind_name(row.spec.input_kind)) + ",";
        out += row.spec.with_features ? "1," : "0,";
        out += std::string(soc::kind_name(row.spec.model)) + ",";
        out += csv::fmt17(row.r2) + "," + csv::fmt17(row.rmse) + ",";
        out += (row.rpd.infinite ? std::string("inf") : csv::fmt17(row.rpd.value)) + ",";
        out += std::to_string(row.n_test) + "\n";
    }
    csv::write_file(path, out);
}

void write_pearson_csv(const std::string& path, const EvalReport& report, std::size_t n_bands) {
    std::string out = "input_kind";
    for (std::size_t b = 1; b <= n_bands; ++b) out += ",b" + std::to_string(b);
    out += "\n";
    for (const auto& row : report.pearson) {
        out += input_kind_name(row.input_kind);
        for (std::size_t b = 0; b < n_bands; ++b)
            out += "," + (b < row.corr.size() ? csv::fmt17(row.corr[b]) : std::string("nan"));
        out += "\n";
    }
    csv::write_file(path, out);
}

}  // namespace rg::eval
