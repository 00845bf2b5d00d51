#include "reflectgan/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "reflectgan/baselines.hpp"
#include "reflectgan/csv.hpp"
#include "reflectgan/errors.hpp"
#include "reflectgan/rng.hpp"

namespace rg::pipeline {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    std::size_t pos = 0;
    try {
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse unsigned integer '" + v + "'");
    }
}

double parse_dbl(const std::string& v, const std::string& key) {
    return csv::parse_double(v, "config key '" + key + "'");
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct KeyDef {
    const char* key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeyDef>& key_defs() {
    using C = RunConfig;
    using S = const std::string&;
    static const std::vector<KeyDef> defs = {
        {"seed", [](C& c, S v) { c.seed = parse_u64(v, "seed"); },
         [](const C& c) { return std::to_string(c.seed); }},
        {"n_bands", [](C& c, S v) { c.n_bands = parse_u64(v, "n_bands"); },
         [](const C& c) { return std::to_string(c.n_bands); }},
        {"ndvi_threshold", [](C& c, S v) { c.ndvi_threshold = parse_dbl(v, "ndvi_threshold"); },
         [](const C& c) { return csv::fmt17(c.ndvi_threshold); }},
        {"test_fraction", [](C& c, S v) { c.test_fraction = parse_dbl(v, "test_fraction"); },
         [](const C& c) { return csv::fmt17(c.test_fraction); }},
        {"k_folds", [](C& c, S v) { c.k_folds = parse_u64(v, "k_folds"); },
         [](const C& c) { return std::to_string(c.k_folds); }},
        {"paths.out_dir", [](C& c, S v) { c.out_dir = v; },
         [](const C& c) { return c.out_dir; }},
        {"paths.samples", [](C& c, S v) { c.samples_path = v; },
         [](const C& c) { return c.samples_path; }},
        {"paths.truth", [](C& c, S v) { c.truth_path = v; },
         [](const C& c) { return c.truth_path; }},
        {"paths.paired", [](C& c, S v) { c.paired_path = v; },
         [](const C& c) { return c.paired_path; }},
        {"paths.generator", [](C& c, S v) { c.generator_path = v; },
         [](const C& c) { return c.generator_path; }},
        {"paths.discriminator", [](C& c, S v) { c.discriminator_path = v; },
         [](const C& c) { return c.discriminator_path; }},
        {"paths.loss", [](C& c, S v) { c.loss_path = v; },
         [](const C& c) { return c.loss_path; }},
        {"paths.reconstructed", [](C& c, S v) { c.reconstructed_path = v; },
         [](const C& c) { return c.reconstructed_path; }},
        {"paths.report", [](C& c, S v) { c.report_path = v; },
         [](const C& c) { return c.report_path; }},
        {"paths.pearson", [](C& c, S v) { c.pearson_path = v; },
         [](const C& c) { return c.pearson_path; }},
        {"paths.endmembers", [](C& c, S v) { c.endmembers_path = v; },
         [](const C& c) { return c.endmembers_path; }},
        {"paths.tct", [](C& c, S v) { c.tct_path = v; },
         [](const C& c) { return c.tct_path; }},
        {"pairing.k", [](C& c, S v) { c.pairing_k = parse_u64(v, "pairing.k"); },
         [](const C& c) { return std::to_string(c.pairing_k); }},
        {"pairing.max_radius",
         [](C& c, S v) { c.pairing_max_radius = parse_dbl(v, "pairing.max_radius"); },
         [](const C& c) { return csv::fmt17(c.pairing_max_radius); }},
        {"endmembers.ndvi_hi",
         [](C& c, S v) { c.endmember_ndvi_hi = parse_dbl(v, "endmembers.ndvi_hi"); },
         [](const C& c) { return csv::fmt17(c.endmember_ndvi_hi); }},
        {"sma.f_floor", [](C& c, S v) { c.sma_f_floor = parse_dbl(v, "sma.f_floor"); },
         [](const C& c) { return csv::fmt17(c.sma_f_floor); }},
        {"gan.epochs", [](C& c, S v) { c.gan.epochs = parse_u64(v, "gan.epochs"); },
         [](const C& c) { return std::to_string(c.gan.epochs); }},
        {"gan.batch_size", [](C& c, S v) { c.gan.batch_size = parse_u64(v, "gan.batch_size"); },
         [](const C& c) { return std::to_string(c.gan.batch_size); }},
        {"gan.lr", [](C& c, S v) { c.gan.lr = parse_dbl(v, "gan.lr"); },
         [](const C& c) { return csv::fmt17(c.gan.lr); }},
        {"gan.beta1", [](C& c, S v) { c.gan.beta1 = parse_dbl(v, "gan.beta1"); },
         [](const C& c) { return csv::fmt17(c.gan.beta1); }},
        {"gan.beta2", [](C& c, S v) { c.gan.beta2 = parse_dbl(v, "gan.beta2"); },
         [](const C& c) { return csv::fmt17(c.gan.beta2); }},
        {"gan.l1_weight", [](C& c, S v) { c.gan.l1_weight = parse_dbl(v, "gan.l1_weight"); },
         [](const C& c) { return csv::fmt17(c.gan.l1_weight); }},
        {"gan.d_steps",
         [](C& c, S v) { c.gan.d_steps_per_g_step = parse_u64(v, "gan.d_steps"); },
         [](const C& c) { return std::to_string(c.gan.d_steps_per_g_step); }},
        {"gan.use_split", [](C& c, S v) { c.gan_use_split = parse_bool(v, "gan.use_split"); },
         [](const C& c) { return bool_str(c.gan_use_split); }},
        {"gan.seed",
         [](C& c, S v) {
             c.gan.seed = parse_u64(v, "gan.seed");
             c.gan_seed_set = true;
         },
         [](const C& c) { return std::to_string(c.effective_gan().seed); }},
        {"synth.n_samples",
         [](C& c, S v) { c.synth.n_samples = parse_u64(v, "synth.n_samples"); },
         [](const C& c) { return std::to_string(c.synth.n_samples); }},
        {"synth.soc_min", [](C& c, S v) { c.synth.soc_min = parse_dbl(v, "synth.soc_min"); },
         [](const C& c) { return csv::fmt17(c.synth.soc_min); }},
        {"synth.soc_max", [](C& c, S v) { c.synth.soc_max = parse_dbl(v, "synth.soc_max"); },
         [](const C& c) { return csv::fmt17(c.synth.soc_max); }},
        {"synth.canopy_min",
         [](C& c, S v) { c.synth.canopy_min = parse_dbl(v, "synth.canopy_min"); },
         [](const C& c) { return csv::fmt17(c.synth.canopy_min); }},
        {"synth.canopy_max",
         [](C& c, S v) { c.synth.canopy_max = parse_dbl(v, "synth.canopy_max"); },
         [](const C& c) { return csv::fmt17(c.synth.canopy_max); }},
        {"synth.nonlinear_strength",
         [](C& c, S v) { c.synth.nonlinear_strength = parse_dbl(v, "synth.nonlinear_strength"); },
         [](const C& c) { return csv::fmt17(c.synth.nonlinear_strength); }},
        {"synth.noise_sigma",
         [](C& c, S v) { c.synth.noise_sigma = parse_dbl(v, "synth.noise_sigma"); },
         [](const C& c) { return csv::fmt17(c.synth.noise_sigma); }},
        {"synth.seed",
         [](C& c, S v) {
             c.synth.seed = parse_u64(v, "synth.seed");
             c.synth_seed_set = true;
         },
         [](const C& c) { return std::to_string(c.effective_synth().seed); }},
        {"soc.input_kind", [](C& c, S v) { c.soc_input_kind = v; },
         [](const C& c) { return c.soc_input_kind; }},
        {"soc.with_features",
         [](C& c, S v) { c.soc_with_features = parse_bool(v, "soc.with_features"); },
         [](const C& c) { return bool_str(c.soc_with_features); }},
        {"scenarios", [](C& c, S v) { c.scenarios = v; },
         [](const C& c) { return c.scenarios; }},
    };
    return defs;
}

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    // unwritable directories surface as IoError at the first file write
}

void echo_config(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    csv::write_file((std::filesystem::path(cfg.out_dir) / "effective_config.txt").string(),
                    render_config(cfg));
}

spectral::BandRoleMap roles_for(const RunConfig& cfg) {
    auto roles = spectral::BandRoleMap::landsat8();
    roles.validate(cfg.n_bands);
    return roles;
}

std::vector<data::SoilSample> load_samples_logged(const RunConfig& cfg, std::ostream& out) {
    const std::string path = cfg.resolve(cfg.samples_path);
    auto report = data::load_samples(path, cfg.n_bands, roles_for(cfg));
    out << "loaded " << report.samples.size() << " samples from " << path;
    if (!report.rejected.empty()) out << " (" << report.rejected.size() << " rows rejected)";
    if (report.clamped_values) out << " (" << report.clamped_values << " values clamped)";
    out << "\n";
    return std::move(report.samples);
}

}  // namespace

gan::GanTrainConfig RunConfig::effective_gan() const {
    gan::GanTrainConfig g = gan;
    if (!gan_seed_set) g.seed = seed;
    return g;
}

data::SynthConfig RunConfig::effective_synth() const {
    data::SynthConfig s = synth;
    if (!synth_seed_set) s.seed = seed;
    return s;
}

std::string RunConfig::resolve(const std::string& path) const {
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(out_dir) / p).string();
}

void RunConfig::validate() const {
    spectral::BandRoleMap::landsat8().validate(n_bands);
    if (!(std::isfinite(ndvi_threshold)) || ndvi_threshold < -1 || ndvi_threshold > 1)
        throw ConfigError("ndvi_threshold must lie in [-1, 1]");
    if (!(test_fraction > 0) || !(test_fraction < 1))
        throw ConfigError("test_fraction must lie in (0, 1)");
    if (k_folds == 0) throw ConfigError("k_folds must be positive");
    if (pairing_k == 0) throw ConfigError("pairing.k must be positive");
    if (std::isnan(pairing_max_radius) || pairing_max_radius < 0)
        throw ConfigError("pairing.max_radius must be non-negative");
    if (!(sma_f_floor > 0) || sma_f_floor > 1)
        throw ConfigError("sma.f_floor must lie in (0, 1]");
    if (out_dir.empty()) throw ConfigError("paths.out_dir must not be empty");
    effective_gan().validate();
}

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& def : key_defs()) {
        if (key == def.key) {
            def.set(cfg, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    apply_key_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::size_t line_no = 0;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value");
        try {
            apply_key_value(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    const auto lines = csv::read_lines(path);
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    return parse_config_text(text, path);
}

std::string render_config(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& def : key_defs()) kv.emplace_back(def.key, def.get(cfg));
    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::vector<eval::ScenarioSpec> parse_scenarios(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty() || t == "all") return eval::default_scenarios();
    std::vector<eval::ScenarioSpec> out;
    for (const auto& item : csv::split(t, ';')) {
        const std::string cell = trim(item);
        if (cell.empty()) continue;
        const auto parts = csv::split(cell, '/');
        if (parts.size() != 3)
            throw ConfigError("scenario '" + cell + "': expected kind/bands|features/model");
        eval::ScenarioSpec spec;
        spec.input_kind = eval::input_kind_from_name(trim(parts[0]));
        const std::string feat = trim(parts[1]);
        if (feat == "features")
            spec.with_features = true;
        else if (feat == "bands")
            spec.with_features = false;
        else
            throw ConfigError("scenario '" + cell + "': middle field must be bands or features");
        spec.model = soc::kind_from_name(trim(parts[2]));
        out.push_back(spec);
    }
    if (out.empty()) throw ConfigError("scenario list is empty");
    return out;
}

// --- train-id sidecar ---

void write_train_ids(const std::string& path, const std::vector<std::string>& ids) {
    std::string out = "reflectgan-train-ids v1\n";
    for (const auto& id : ids) out += id + "\n";
    csv::write_file(path, out);
}

std::vector<std::string> read_train_ids(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty() || lines[0] != "reflectgan-train-ids v1")
        throw ConfigError("train-id sidecar " + path + ": bad or missing header");
    std::vector<std::string> ids;
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (!lines[i].empty()) ids.push_back(lines[i]);
    return ids;
}

// --- reconstructed CSV ---

void write_reconstructed_csv(const std::string& path, const std::vector<ReconstructedRow>& rows,
                             std::size_t n_bands) {
    std::string out = "sample_id,lon,lat,soc_g_kg";
    for (std::size_t b = 1; b <= n_bands; ++b) out += ",b" + std::to_string(b);
    out += ",reconstructed\n";
    for (const auto& row : rows) {
        row.sample.bands.validate(n_bands);
        out += row.sample.id + "," + csv::fmt17(row.sample.lon) + "," +
               csv::fmt17(row.sample.lat) + "," + csv::fmt17(row.sample.soc);
        for (std::size_t b = 0; b < n_bands; ++b) out += "," + csv::fmt17(row.sample.bands[b]);
        out += row.reconstructed ? ",1\n" : ",0\n";
    }
    csv::write_file(path, out);
}

std::vector<ReconstructedRow> read_reconstructed_csv(const std::string& path,
                                                     std::size_t n_bands) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw ConfigError(path + ": empty file");
    std::string header = "sample_id,lon,lat,soc_g_kg";
    for (std::size_t b = 1; b <= n_bands; ++b) header += ",b" + std::to_string(b);
    header += ",reconstructed";
    if (lines[0] != header) throw ConfigError(path + ": unexpected header '" + lines[0] + "'");
    std::vector<ReconstructedRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != 5 + n_bands)
            throw ConfigError(path + ":" + std::to_string(i + 1) + ": expected " +
                              std::to_string(5 + n_bands) + " fields");
        ReconstructedRow row;
        const std::string ctx = path + ":" + std::to_string(i + 1);
        row.sample.id = f[0];
        row.sample.lon = csv::parse_double(f[1], ctx);
        row.sample.lat = csv::parse_double(f[2], ctx);
        row.sample.soc = csv::parse_double(f[3], ctx);
        std::vector<double> bands(n_bands);
        for (std::size_t b = 0; b < n_bands; ++b) bands[b] = csv::parse_double(f[4 + b], ctx);
        row.sample.bands = spectral::BandVector(std::move(bands));
        if (f[4 + n_bands] == "1")
            row.reconstructed = true;
        else if (f[4 + n_bands] == "0")
            row.reconstructed = false;
        else
            throw ConfigError(ctx + ": reconstructed flag must be 0 or 1");
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- commands ---

SynthSummary cmd_synth(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    if (cfg.n_bands != 7)
        throw ConfigError("the synthetic generator emits 7-band spectra; set n_bands=7");
    echo_config(cfg);
    const data::SynthConfig sc = cfg.effective_synth();
    sc.validate();
    const data::SynthResult res = data::synth_generate(sc);
    SynthSummary s;
    s.n_samples = res.samples.size();
    s.samples_path = cfg.resolve(cfg.samples_path);
    s.truth_path = cfg.resolve(cfg.truth_path);
    data::write_samples_csv(s.samples_path, res.samples, cfg.n_bands);
    data::write_truth_csv(s.truth_path, res.truth, cfg.n_bands);
    out << "synth: wrote " << s.n_samples << " samples to " << s.samples_path
        << ", ground truth to " << s.truth_path << "\n";
    return s;
}

PairSummary cmd_pair(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    echo_config(cfg);
    const auto samples = load_samples_logged(cfg, out);
    const data::NdviClasses classes = data::classify_by_ndvi(samples, cfg.ndvi_threshold);
    const data::PairingResult pairing =
        data::pair_samples(classes.vegetated, classes.bare, cfg.pairing_k,
                           cfg.pairing_max_radius);
    PairSummary s;
    s.n_bare = classes.bare.size();
    s.n_vegetated = classes.vegetated.size();
    s.n_pairs = pairing.pairs.size();
    s.n_dropped = pairing.dropped;
    s.paired_path = cfg.resolve(cfg.paired_path);
    data::write_paired_csv(s.paired_path, pairing.pairs, cfg.n_bands);
    out << "pair: bare=" << s.n_bare << " vegetated=" << s.n_vegetated
        << " paired=" << s.n_pairs << " dropped=" << s.n_dropped << " -> " << s.paired_path
        << "\n";
    return s;
}

TrainGanSummary cmd_train_gan(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    echo_config(cfg);
    std::vector<data::PairedRecord> pairs =
        data::read_paired_csv(cfg.resolve(cfg.paired_path), cfg.n_bands);
    TrainGanSummary s;
    s.n_pairs_total = pairs.size();

    std::vector<std::string> sidecar_ids;
    if (cfg.gan_use_split) {
        const auto samples = load_samples_logged(cfg, out);
        const data::DatasetSplit split =
            data::split(samples.size(), cfg.test_fraction, cfg.k_folds, cfg.seed);
        std::unordered_set<std::string> train_ids;
        for (std::size_t i : split.train_indices) {
            train_ids.insert(samples[i].id);
            sidecar_ids.push_back(samples[i].id);
        }
        std::unordered_map<std::string, const spectral::BandVector*> bands_by_id;
        for (const auto& s : samples) bands_by_id[s.id] = &s.bands;

        // Keep a pair when its vegetated sample is in the training split,
        // re-averaging the target over the in-split bare neighbors so held-out
        // bare spectra never reach the generator's fit.
        std::vector<data::PairedRecord> kept;
        for (auto& p : pairs) {
            if (!train_ids.count(p.veg_id)) continue;
            std::vector<std::string> bare_kept;
            for (const auto& bid : p.bare_ids)
                if (train_ids.count(bid)) bare_kept.push_back(bid);
            if (bare_kept.empty()) continue;
            if (bare_kept.size() != p.bare_ids.size()) {
                spectral::BandVector target;
                target.values.assign(cfg.n_bands, 0.0);
                for (const auto& bid : bare_kept) {
                    const auto it = bands_by_id.find(bid);
                    if (it == bands_by_id.end())
                        throw ConfigError("train-gan: paired bare id '" + bid +
                                          "' not present in the samples table");
                    for (std::size_t b = 0; b < cfg.n_bands; ++b)
                        target.values[b] += it->second->values[b];
                }
                for (double& v : target.values) v /= static_cast<double>(bare_kept.size());
                p.bare_target = std::move(target);
                p.bare_ids = std::move(bare_kept);
            }
            kept.push_back(std::move(p));
        }
        pairs = std::move(kept);
    } else {
        // No split: the fitting set is every sample the pairs touch.
        std::set<std::string> ids;
        for (const auto& p : pairs) {
            ids.insert(p.veg_id);
            ids.insert(p.bare_ids.begin(), p.bare_ids.end());
        }
        sidecar_ids.assign(ids.begin(), ids.end());
    }
    s.n_pairs_used = pairs.size();

    const gan::TrainedGan trained = gan::train(pairs, cfg.effective_gan());
    s.epochs = trained.history.size();
    if (!trained.history.empty()) {
        s.final_loss_d = trained.history.back().loss_d;
        s.final_loss_g = trained.history.back().loss_g;
    }
    s.generator_path = cfg.resolve(cfg.generator_path);
    s.discriminator_path = cfg.resolve(cfg.discriminator_path);
    gan::save_weights(*trained.generator, s.generator_path);
    gan::save_weights(*trained.discriminator, s.discriminator_path);
    write_train_ids(s.generator_path + ".train_ids", sidecar_ids);
    gan::write_loss_csv(cfg.resolve(cfg.loss_path), trained.history);
    out << "train-gan: " << s.n_pairs_used << "/" << s.n_pairs_total << " pairs, "
        << s.epochs << " epochs";
    if (!trained.history.empty())
        out << ", final loss_d=" << csv::fmt17(s.final_loss_d)
            << " loss_g=" << csv::fmt17(s.final_loss_g);
    out << " -> " << s.generator_path << "\n";
    return s;
}

ReconstructSummary cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    echo_config(cfg);
    auto generator = gan::load_generator(cfg.resolve(cfg.generator_path));
    if (generator->n_bands() != cfg.n_bands)
        throw ConfigError("generator weights expect " + std::to_string(generator->n_bands()) +
                          " bands but n_bands=" + std::to_string(cfg.n_bands));
    const auto samples = load_samples_logged(cfg, out);

    std::vector<std::size_t> veg_rows;
    std::vector<spectral::BandVector> veg_bands;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].ndvi > cfg.ndvi_threshold) {
            veg_rows.push_back(i);
            veg_bands.push_back(samples[i].bands);
        }
    generator->set_mode(nn::Mode::inference);
    const auto recon = gan::reconstruct(*generator, veg_bands);

    std::vector<ReconstructedRow> rows;
    rows.reserve(samples.size());
    std::size_t vi = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        ReconstructedRow row;
        row.sample = samples[i];
        if (vi < veg_rows.size() && veg_rows[vi] == i) {
            row.sample.bands = recon[vi];
            row.reconstructed = true;
            ++vi;
        }
        rows.push_back(std::move(row));
    }
    ReconstructSummary s;
    s.n_rows = rows.size();
    s.n_reconstructed = veg_rows.size();
    s.output_path = cfg.resolve(cfg.reconstructed_path);
    write_reconstructed_csv(s.output_path, rows, cfg.n_bands);
    out << "reconstruct: " << s.n_reconstructed << "/" << s.n_rows
        << " rows reconstructed -> " << s.output_path << "\n";
    return s;
}

namespace {

struct Needs {
    bool generator = false, endmembers = false, vi = false;
};

Needs needs_for(const std::vector<eval::ScenarioSpec>& specs) {
    Needs n;
    for (const auto& s : specs) {
        switch (s.input_kind) {
            case eval::InputKind::reconstructed_only:
            case eval::InputKind::bare_plus_reconstructed: n.generator = true; break;
            case eval::InputKind::sma_corrected: n.endmembers = true; break;
            case eval::InputKind::vi_corrected: n.vi = true; break;
            default: break;
        }
    }
    return n;
}

struct EvalArtifacts {
    std::vector<data::SoilSample> samples;
    data::DatasetSplit split;
    std::unique_ptr<gan::GeneratorNet> generator;
    baselines::EndmemberSet endmembers;
    bool have_endmembers = false;
    std::unique_ptr<baselines::ViCorrection> vi;
    std::vector<std::string> gan_ids, em_ids, vi_ids;
    spectral::TasseledCapCoefficients tct = spectral::TasseledCapCoefficients::landsat8();

    eval::EvalInputs inputs(const RunConfig& cfg) const {
        eval::EvalInputs in;
        in.samples = &samples;
        in.split = &split;
        in.roles = spectral::BandRoleMap::landsat8();
        in.tct = tct;
        in.ndvi_threshold = cfg.ndvi_threshold;
        in.generator = generator.get();
        in.endmembers = have_endmembers ? &endmembers : nullptr;
        in.vi = vi.get();
        in.sma_f_floor = cfg.sma_f_floor;
        in.gan_train_ids = gan_ids;
        in.endmember_fit_ids = em_ids;
        in.vi_fit_ids = vi_ids;
        in.seed = cfg.seed;
        return in;
    }
};

EvalArtifacts build_artifacts(const RunConfig& cfg, std::ostream& out, const Needs& needs) {
    EvalArtifacts art;
    art.samples = load_samples_logged(cfg, out);
    art.split = data::split(art.samples.size(), cfg.test_fraction, cfg.k_folds, cfg.seed);

    std::vector<data::SoilSample> train_samples;
    train_samples.reserve(art.split.train_indices.size());
    for (std::size_t i : art.split.train_indices) train_samples.push_back(art.samples[i]);

    if (needs.generator) {
        const std::string wpath = cfg.resolve(cfg.generator_path);
        art.generator = gan::load_generator(wpath);
        if (art.generator->n_bands() != cfg.n_bands)
            throw ConfigError("generator weights expect " +
                              std::to_string(art.generator->n_bands()) + " bands but n_bands=" +
                              std::to_string(cfg.n_bands));
        art.gan_ids = read_train_ids(wpath + ".train_ids");
    }
    if (needs.endmembers) {
        if (!cfg.endmembers_path.empty()) {
            art.endmembers =
                baselines::read_endmembers_csv(cfg.resolve(cfg.endmembers_path), cfg.n_bands);
        } else {
            const auto classes = data::classify_by_ndvi(train_samples, cfg.ndvi_threshold);
            art.endmembers = baselines::estimate_endmembers(classes.bare, classes.vegetated,
                                                            cfg.endmember_ndvi_hi);
            for (const auto& s : train_samples) art.em_ids.push_back(s.id);
        }
        art.have_endmembers = true;
    }
    if (needs.vi) {
        art.vi = std::make_unique<baselines::ViCorrection>(
            baselines::ViCorrection::fit(train_samples, spectral::BandRoleMap::landsat8()));
        for (const auto& s : train_samples) art.vi_ids.push_back(s.id);
    }
    if (!cfg.tct_path.empty())
        art.tct = spectral::TasseledCapCoefficients::from_csv(cfg.resolve(cfg.tct_path));
    return art;
}

}  // namespace

eval::EvalReport cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    echo_config(cfg);
    const auto specs = parse_scenarios(cfg.scenarios);
    const EvalArtifacts art = build_artifacts(cfg, out, needs_for(specs));
    const eval::EvalReport report = eval::run_scenarios(specs, art.inputs(cfg));

    const std::string report_path = cfg.resolve(cfg.report_path);
    const std::string pearson_path = cfg.resolve(cfg.pearson_path);
    eval::write_report_csv(report_path, report);
    eval::write_pearson_csv(pearson_path, report, cfg.n_bands);
    if (art.have_endmembers)
        baselines::write_endmembers_csv(
            (std::filesystem::path(cfg.out_dir) / "endmembers_used.csv").string(),
            art.endmembers);
    out << "evaluate: " << report.rows.size() << " scenario rows -> " << report_path << "; "
        << report.pearson.size() << " correlation rows -> " << pearson_path << "\n";
    return report;
}

TrainSocSummary cmd_train_soc(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    echo_config(cfg);
    const eval::InputKind kind = eval::input_kind_from_name(cfg.soc_input_kind);
    eval::ScenarioSpec probe;
    probe.input_kind = kind;
    const EvalArtifacts art = build_artifacts(cfg, out, needs_for({probe}));
    const eval::EvalInputs inputs = art.inputs(cfg);
    const eval::KindDataset kd = eval::assemble_input(kind, cfg.soc_with_features, inputs);

    // Map each global index to its fold (or train/test membership).
    std::vector<int> fold_of(art.samples.size(), -1);
    for (std::size_t f = 0; f < art.split.folds.size(); ++f)
        for (std::size_t i : art.split.folds[f]) fold_of[i] = static_cast<int>(f);
    std::vector<char> in_train(art.samples.size(), 0);
    for (std::size_t i : art.split.train_indices) in_train[i] = 1;

    auto subset = [&](const std::vector<std::size_t>& pos) {
        soc::FeatureMatrix fm;
        fm.feature_names = kd.features.feature_names;
        fm.x = nn::Matrix(pos.size(), kd.features.x.cols);
        std::vector<double> y(pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i) {
            std::copy(kd.features.x.row(pos[i]), kd.features.x.row(pos[i]) + kd.features.x.cols,
                      fm.x.row(i));
            y[i] = kd.targets[pos[i]];
        }
        return std::make_pair(std::move(fm), std::move(y));
    };

    static constexpr soc::FitSpec::Kind kModels[] = {
        soc::FitSpec::Kind::lr, soc::FitSpec::Kind::knn, soc::FitSpec::Kind::dtree,
        soc::FitSpec::Kind::rforest, soc::FitSpec::Kind::mlp};

    TrainSocSummary summary;
    const std::size_t n_folds = art.split.folds.size();
    for (const auto model : kModels) {
        const std::string mname = soc::kind_name(model);
        double sum_r2 = 0, sum_rmse = 0, sum_rpd = 0;
        std::size_t sum_n = 0;
        for (std::size_t f = 0; f < n_folds; ++f) {
            std::vector<std::size_t> tr_pos, val_pos;
            for (std::size_t p = 0; p < kd.population.size(); ++p) {
                const std::size_t g = kd.population[p];
                if (!in_train[g]) continue;
                if (fold_of[g] == static_cast<int>(f))
                    val_pos.push_back(p);
                else
                    tr_pos.push_back(p);
            }
            if (tr_pos.size() < 2 || val_pos.size() < 2)
                throw DegenerateInput("train-soc: fold " + std::to_string(f + 1) +
                                      " leaves too few samples");
            auto [xtr, ytr] = subset(tr_pos);
            auto [xval, yval] = subset(val_pos);
            soc::FitSpec fs;
            fs.kind = model;
            fs.seed = cfg.seed ^ fnv1a("soc/" + mname + "/fold" + std::to_string(f + 1));
            auto reg = soc::make_regressor(fs);
            reg->fit(xtr, ytr);
            const auto pred = reg->predict(xval);
            SocCvRow row;
            row.model = mname;
            row.fold = std::to_string(f + 1);
            row.r2 = eval::r2(yval, pred);
            row.rmse = eval::rmse(yval, pred);
            row.rpd = eval::rpd(yval, pred).value;
            row.n_val = val_pos.size();
            sum_r2 += row.r2;
            sum_rmse += row.rmse;
            sum_rpd += row.rpd;
            sum_n += row.n_val;
            summary.rows.push_back(std::move(row));
        }
        SocCvRow mean;
        mean.model = mname;
        mean.fold = "mean";
        mean.r2 = sum_r2 / static_cast<double>(n_folds);
        mean.rmse = sum_rmse / static_cast<double>(n_folds);
        mean.rpd = sum_rpd / static_cast<double>(n_folds);
        mean.n_val = sum_n;
        summary.rows.push_back(mean);

        // Final model on the whole training side, persisted for reuse.
        std::vector<std::size_t> train_pos;
        for (std::size_t p = 0; p < kd.population.size(); ++p)
            if (in_train[kd.population[p]]) train_pos.push_back(p);
        if (train_pos.size() < 2) throw DegenerateInput("train-soc: training subset too small");
        auto [xtr, ytr] = subset(train_pos);
        soc::FitSpec fs;
        fs.kind = model;
        fs.seed = cfg.seed ^ fnv1a("soc/" + mname + "/final");
        auto reg = soc::make_regressor(fs);
        reg->fit(xtr, ytr);
        const std::string mpath =
            (std::filesystem::path(cfg.out_dir) / ("soc_" + mname + ".model")).string();
        csv::write_file(mpath, reg->dump());
        summary.model_paths.push_back(mpath);
        out << "train-soc " << mname << ": cv r2=" << csv::fmt17(mean.r2)
            << " rmse=" << csv::fmt17(mean.rmse) << " rpd=" << csv::fmt17(mean.rpd) << "\n";
    }

    std::string csv_out = "model,fold,r2,rmse,rpd,n_val\n";
    for (const auto& row : summary.rows)
        csv_out += row.model + "," + row.fold + "," + csv::fmt17(row.r2) + "," +
                   csv::fmt17(row.rmse) + "," + csv::fmt17(row.rpd) + "," +
                   std::to_string(row.n_val) + "\n";
    csv::write_file((std::filesystem::path(cfg.out_dir) / "soc_cv.csv").string(), csv_out);
    return summary;
}

CompareSummary cmd_compare_baselines(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    echo_config(cfg);
    Needs needs;
    needs.generator = needs.endmembers = needs.vi = true;
    const EvalArtifacts art = build_artifacts(cfg, out, needs);
    const auto truth = data::read_truth_csv(cfg.resolve(cfg.truth_path), cfg.n_bands);

    std::vector<char> in_test(art.samples.size(), 0);
    for (std::size_t i : art.split.test_indices) in_test[i] = 1;
    std::vector<const data::SoilSample*> veg;
    for (std::size_t i = 0; i < art.samples.size(); ++i)
        if (in_test[i] && art.samples[i].ndvi > cfg.ndvi_threshold)
            veg.push_back(&art.samples[i]);
    if (veg.empty())
        throw DegenerateInput("compare-baselines: no vegetated samples in the test split");

    std::vector<spectral::BandVector> veg_bands, truth_bands;
    for (const auto* s : veg) {
        const auto it = truth.find(s->id);
        if (it == truth.end())
            throw ConfigError("compare-baselines: truth file has no entry for sample '" +
                              s->id + "'");
        veg_bands.push_back(s->bands);
        truth_bands.push_back(it->second);
    }

    art.generator->set_mode(nn::Mode::inference);
    const auto recon = gan::reconstruct(*art.generator, veg_bands);
    const auto roles = spectral::BandRoleMap::landsat8();

    auto rmse_row = [&](const std::string& method,
                        const std::vector<spectral::BandVector>& est) {
        BaselineRow row;
        row.method = method;
        row.band_rmse.assign(cfg.n_bands, 0.0);
        for (std::size_t i = 0; i < est.size(); ++i)
            for (std::size_t b = 0; b < cfg.n_bands; ++b) {
                const double d = est[i][b] - truth_bands[i][b];
                row.band_rmse[b] += d * d;
            }
        double mean = 0;
        for (std::size_t b = 0; b < cfg.n_bands; ++b) {
            row.band_rmse[b] = std::sqrt(row.band_rmse[b] / static_cast<double>(est.size()));
            mean += row.band_rmse[b];
        }
        row.mean_rmse = mean / static_cast<double>(cfg.n_bands);
        return row;
    };

    std::vector<spectral::BandVector> vi_bands, sma_bands;
    for (const auto& b : veg_bands) {
        vi_bands.push_back(art.vi->apply(b, roles));
        sma_bands.push_back(
            baselines::sma_correct(b, art.endmembers, cfg.sma_f_floor).bare_est);
    }

    CompareSummary s;
    s.n_samples = veg.size();
    s.rows.push_back(rmse_row("vegetated", veg_bands));
    s.rows.push_back(rmse_row("vi_corrected", vi_bands));
    s.rows.push_back(rmse_row("sma_corrected", sma_bands));
    s.rows.push_back(rmse_row("reconstructed", recon));

    std::string csv_out = "method";
    for (std::size_t b = 1; b <= cfg.n_bands; ++b) csv_out += ",b" + std::to_string(b);
    csv_out += ",mean\n";
    for (const auto& row : s.rows) {
        csv_out += row.method;
        for (double v : row.band_rmse) csv_out += "," + csv::fmt17(v);
        csv_out += "," + csv::fmt17(row.mean_rmse) + "\n";
    }
    csv::write_file((std::filesystem::path(cfg.out_dir) / "baseline_comparison.csv").string(),
                    csv_out);

    for (const auto& row : s.rows)
        out << "compare-baselines " << row.method
            << ": mean band rmse=" << csv::fmt17(row.mean_rmse) << " over " << s.n_samples
            << " test vegetated samples\n";
    return s;
}

// --- gradient-check suite ---

namespace {

nn::Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double amplitude) {
    nn::Matrix m(rows, cols);
    for (double& v : m.data) v = (rng.uniform() * 2.0 - 1.0) * amplitude;
    return m;
}

// Keep every entry at least `margin` away from zero so kinked activations
// (ReLU family) see a locally smooth function under finite differences.
void push_from_zero(nn::Matrix& m, double margin) {
    for (double& v : m.data)
        if (std::fabs(v) < margin) v = v < 0 ? v - margin : v + margin;
}

struct ProbeIo {
    nn::Matrix x, xgrad, target;
};

nn::GradProbe layer_probe(std::shared_ptr<nn::Layer> layer, std::shared_ptr<ProbeIo> io) {
    nn::GradProbe probe;
    probe.loss = [layer, io] {
        nn::Matrix y = layer->forward(io->x);
        return nn::mse_loss(y, io->target).value;
    };
    probe.compute_grads = [layer, io] {
        layer->zero_grads();
        io->xgrad.zero();
        nn::Matrix y = layer->forward(io->x);
        const nn::LossResult l = nn::mse_loss(y, io->target);
        const nn::Matrix dx = layer->backward(l.grad);
        std::copy(dx.data.begin(), dx.data.end(), io->xgrad.data.begin());
    };
    layer->collect_params(probe.coords);
    for (std::size_t i = 0; i < io->x.data.size(); ++i)
        probe.coords.push_back({&io->x.data[i], &io->xgrad.data[i]});
    return probe;
}

GradCheckRow run_one(const std::string& name, const nn::GradProbe& probe) {
    const nn::GradCheckResult res = nn::grad_check(probe);
    return {name, res.max_rel_error, res.n_coords};
}

}  // namespace

GradCheckTable run_grad_checks(std::uint64_t seed) {
    GradCheckTable table;
    Rng rng(seed ^ fnv1a("grad-check"));

    {
        auto io = std::make_shared<ProbeIo>();
        io->x = random_matrix(4, 5, rng, 0.9);
        io->xgrad = nn::Matrix(4, 5);
        io->target = random_matrix(4, 6, rng, 1.0);
        auto layer = std::make_shared<nn::LinearLayer>(5, 6, nn::Init::kaiming_uniform, rng);
        table.rows.push_back(run_one("linear", layer_probe(layer, io)));
    }
    {
        auto io = std::make_shared<ProbeIo>();
        io->x = random_matrix(5, 4, rng, 0.9);
        io->xgrad = nn::Matrix(5, 4);
        io->target = random_matrix(5, 4, rng, 1.0);
        auto layer = std::make_shared<nn::BatchNormLayer>(4);
        // exercise non-trivial affine parameters, not just the identity
        Rng prng(seed ^ fnv1a("grad-check/bn"));
        for (auto& g : layer->gamma) g = 0.5 + prng.uniform();
        for (auto& b : layer->beta) b = prng.uniform() - 0.5;
        table.rows.push_back(run_one("batchnorm", layer_probe(layer, io)));
    }
    const std::pair<const char*, nn::Activation> acts[] = {
        {"relu", nn::Activation::relu},
        {"leaky_relu", nn::Activation::leaky_relu},
        {"tanh", nn::Activation::tanh},
        {"sigmoid", nn::Activation::sigmoid},
    };
    for (const auto& [name, kind] : acts) {
        auto io = std::make_shared<ProbeIo>();
        io->x = random_matrix(4, 6, rng, 0.9);
        push_from_zero(io->x, 1e-3);
        io->xgrad = nn::Matrix(4, 6);
        io->target = random_matrix(4, 6, rng, 1.0);
        auto layer = std::make_shared<nn::ActivationLayer>(kind);
        table.rows.push_back(run_one(name, layer_probe(layer, io)));
    }
    {
        // BCE as a function of its scores, checked against the analytic grad.
        auto scores = std::make_shared<nn::Matrix>(random_matrix(4, 3, rng, 0.35));
        for (double& v : scores->data) v += 0.5;  // into (0.15, 0.85)
        auto grad = std::make_shared<nn::Matrix>(4, 3);
        auto targets = std::make_shared<nn::Matrix>(random_matrix(4, 3, rng, 0.5));
        for (double& v : targets->data) v += 0.5;
        nn::GradProbe probe;
        probe.loss = [=] { return nn::bce_loss(*scores, *targets).value; };
        probe.compute_grads = [=] {
            const nn::LossResult l = nn::bce_loss(*scores, *targets);
            std::copy(l.grad.data.begin(), l.grad.data.end(), grad->data.begin());
        };
        for (std::size_t i = 0; i < scores->data.size(); ++i)
            probe.coords.push_back({&scores->data[i], &grad->data[i]});
        table.rows.push_back(run_one("bce", probe));
    }
    {
        auto pred = std::make_shared<nn::Matrix>(random_matrix(4, 3, rng, 1.5));
        auto grad = std::make_shared<nn::Matrix>(4, 3);
        auto targets = std::make_shared<nn::Matrix>(random_matrix(4, 3, rng, 1.5));
        nn::GradProbe probe;
        probe.loss = [=] { return nn::mse_loss(*pred, *targets).value; };
        probe.compute_grads = [=] {
            const nn::LossResult l = nn::mse_loss(*pred, *targets);
            std::copy(l.grad.data.begin(), l.grad.data.end(), grad->data.begin());
        };
        for (std::size_t i = 0; i < pred->data.size(); ++i)
            probe.coords.push_back({&pred->data[i], &grad->data[i]});
        table.rows.push_back(run_one("mse", probe));
    }
    {
        auto io = std::make_shared<ProbeIo>();
        io->x = random_matrix(3, 6, rng, 0.9);
        io->xgrad = nn::Matrix(3, 6);
        io->target = random_matrix(3, 6, rng, 1.0);
        auto layer = std::make_shared<gan::ResidualBlock>(6, 6, rng);
        table.rows.push_back(run_one("residual_block", layer_probe(layer, io)));
    }
    {
        auto io = std::make_shared<ProbeIo>();
        io->x = random_matrix(3, 5, rng, 0.9);
        io->xgrad = nn::Matrix(3, 5);
        io->target = random_matrix(3, 9, rng, 1.0);
        auto layer = std::make_shared<gan::ResidualBlock>(5, 9, rng);
        table.rows.push_back(run_one("residual_block_projected", layer_probe(layer, io)));
    }
    {
        // Full generator at probe width: same layer chain and skip structure
        // as the production net, sized to keep finite differences fast.
        auto g = std::make_shared<gan::GeneratorNet>(5, seed ^ fnv1a("grad-check/gen"),
                                                     std::vector<std::size_t>{12, 10, 8, 6});
        auto io = std::make_shared<ProbeIo>();
        io->x = random_matrix(3, 5, rng, 0.9);
        io->xgrad = nn::Matrix(3, 5);
        io->target = random_matrix(3, 5, rng, 0.9);
        nn::GradProbe probe;
        probe.loss = [g, io] {
            nn::Matrix y = g->forward(io->x);
            return nn::mse_loss(y, io->target).value;
        };
        probe.compute_grads = [g, io] {
            g->zero_grads();
            io->xgrad.zero();
            nn::Matrix y = g->forward(io->x);
            const nn::LossResult l = nn::mse_loss(y, io->target);
            const nn::Matrix dx = g->backward(l.grad);
            std::copy(dx.data.begin(), dx.data.end(), io->xgrad.data.begin());
        };
        probe.coords = g->params();
        for (std::size_t i = 0; i < io->x.data.size(); ++i)
            probe.coords.push_back({&io->x.data[i], &io->xgrad.data[i]});
        table.rows.push_back(run_one("generator", probe));
    }
    {
        // Discriminator with its dropout mask frozen so every finite-difference
        // evaluation sees the same subnetwork.
        auto d = std::make_shared<gan::DiscriminatorNet>(3, seed ^ fnv1a("grad-check/disc"));
        d->freeze_dropout(true);
        auto io = std::make_shared<ProbeIo>();
        io->x = random_matrix(3, 6, rng, 0.9);
        io->xgrad = nn::Matrix(3, 6);
        io->target = random_matrix(3, 1, rng, 0.4);
        for (double& v : io->target.data) v += 0.5;
        nn::GradProbe probe;
        probe.loss = [d, io] {
            nn::Matrix y = d->forward(io->x);
            return nn::mse_loss(y, io->target).value;
        };
        probe.compute_grads = [d, io] {
            d->zero_grads();
            io->xgrad.zero();
            nn::Matrix y = d->forward(io->x);
            const nn::LossResult l = nn::mse_loss(y, io->target);
            const nn::Matrix dx = d->backward(l.grad);
            std::copy(dx.data.begin(), dx.data.end(), io->xgrad.data.begin());
        };
        probe.coords = d->params();
        for (std::size_t i = 0; i < io->x.data.size(); ++i)
            probe.coords.push_back({&io->x.data[i], &io->xgrad.data[i]});
        table.rows.push_back(run_one("discriminator", probe));
    }

    table.all_pass = true;
    for (const auto& row : table.rows)
        if (!(row.max_error < table.threshold)) table.all_pass = false;
    return table;
}

GradCheckTable cmd_grad_check(std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    GradCheckTable table = run_grad_checks();
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    for (const auto& row : table.rows) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-26s coords %6zu  max_err %.3e  %s\n",
                      row.component.c_str(), row.n_coords, row.max_error,
                      row.max_error < table.threshold ? "ok" : "FAIL");
        out << line;
    }
    out << "grad-check: " << (table.all_pass ? "all components below " : "FAILURES at ")
        << csv::fmt17(table.threshold) << " (" << elapsed << " ms)\n";
    return table;
}

}  // namespace rg::pipeline
