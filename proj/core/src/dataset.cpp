#include "reflectgan/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "reflectgan/csv.hpp"
#include "reflectgan/errors.hpp"
#include "reflectgan/rng.hpp"

namespace rg::data {

namespace {

std::string samples_header(std::size_t n_bands) {
    std::string h = "sample_id,lon,lat,soc_g_kg";
    for (std::size_t b = 1; b <= n_bands; ++b) h += ",b" + std::to_string(b);
    return h;
}

std::string truth_header(std::size_t n_bands) {
    std::string h = "sample_id";
    for (std::size_t b = 1; b <= n_bands; ++b) h += ",true_b" + std::to_string(b);
    return h;
}

std::string paired_header(std::size_t n_bands) {
    std::string h = "veg_id,bare_ids,pair_distance,soc_g_kg";
    for (std::size_t b = 1; b <= n_bands; ++b) h += ",veg_b" + std::to_string(b);
    for (std::size_t b = 1; b <= n_bands; ++b) h += ",bare_b" + std::to_string(b);
    return h;
}

void check_header(const std::string& got, const std::string& want, const std::string& path) {
    if (got != want)
        throw ConfigError(path + ": bad header; expected '" + want + "', got '" + got + "'");
}

}  // namespace

void SynthConfig::validate() const {
    if (!(soc_min > 0) || !(soc_max > soc_min))
        throw ConfigError("synth: SOC range must satisfy 0 < min < max");
    if (canopy_min < 0 || canopy_max > 1 || !(canopy_max >= canopy_min))
        throw ConfigError("synth: canopy fraction range must be ordered within [0,1]");
    if (nonlinear_strength < 0) throw ConfigError("synth: nonlinear_strength must be >= 0");
    if (!(noise_sigma >= 0)) throw ConfigError("synth: noise_sigma must be >= 0");
}

LoadReport load_samples(const std::string& path, std::size_t n_bands,
                        const spectral::BandRoleMap& roles) {
    roles.validate(n_bands);
    auto lines = csv::read_lines(path);
    if (lines.empty()) throw ConfigError(path + ": empty file");
    check_header(lines[0], samples_header(n_bands), path);

    LoadReport report;
    std::set<std::string> seen_ids;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::size_t line_no = i + 1;
        auto fields = csv::split(lines[i]);
        if (fields.size() != 4 + n_bands)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(4 + n_bands) + " fields, got " +
                              std::to_string(fields.size()));
        SoilSample s;
        s.id = fields[0];
        const std::string ctx = path + ":" + std::to_string(line_no);
        s.lon = csv::parse_double(fields[1], ctx + " lon");
        s.lat = csv::parse_double(fields[2], ctx + " lat");
        s.soc = csv::parse_double(fields[3], ctx + " soc_g_kg");
        s.bands.values.resize(n_bands);
        for (std::size_t b = 0; b < n_bands; ++b)
            s.bands.values[b] = csv::parse_double(fields[4 + b], ctx + " b" + std::to_string(b + 1));

        bool finite = std::isfinite(s.lon) && std::isfinite(s.lat) && std::isfinite(s.soc);
        for (double v : s.bands.values) finite = finite && std::isfinite(v);
        if (!finite) {
            report.rejected.push_back({line_no, "non-finite value"});
            continue;
        }
        if (!(s.soc > 0)) {
            report.rejected.push_back({line_no, "non-positive SOC"});
            continue;
        }
        if (!seen_ids.insert(s.id).second) {
            report.rejected.push_back({line_no, "duplicate sample id '" + s.id + "'"});
            continue;
        }
        spectral::ClampStats clamp_stats;
        s.bands = spectral::clamp_unit(std::move(s.bands), &clamp_stats);
        report.clamped_values += clamp_stats.clamped;
        try {
            s.ndvi = spectral::ndvi(s.bands, roles);
        } catch (const DegenerateInput&) {
            report.rejected.push_back({line_no, "degenerate NDVI (nir + red ~ 0)"});
            continue;
        }
        report.samples.push_back(std::move(s));
    }
    return report;
}

NdviClasses classify_by_ndvi(const std::vector<SoilSample>& samples, double threshold) {
    if (samples.empty()) throw ConfigError("classify_by_ndvi: no samples");
    NdviClasses out;
    for (const auto& s : samples) {
        // Ties (ndvi exactly at the threshold) count as bare.
        if (s.ndvi > threshold)
            out.vegetated.push_back(s);
        else
            out.bare.push_back(s);
    }
    return out;
}

PairingResult pair_samples(const std::vector<SoilSample>& vegetated,
                           const std::vector<SoilSample>& bare, std::size_t k,
                           double max_radius) {
    if (bare.empty()) throw ConfigError("pair_samples: no bare references");
    if (k == 0) throw ConfigError("pair_samples: k must be positive");
    const std::size_t k_eff = std::min(k, bare.size());

    PairingResult result;
    std::vector<std::pair<double, std::size_t>> dist;  // (squared distance, bare index)
    dist.reserve(bare.size());
    for (const auto& v : vegetated) {
        dist.clear();
        for (std::size_t j = 0; j < bare.size(); ++j) {
            const double dx = v.lon - bare[j].lon;
            const double dy = v.lat - bare[j].lat;
            dist.emplace_back(dx * dx + dy * dy, j);
        }
        // Ties in distance resolve toward the lower bare index.
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_eff),
                          dist.end());
        const double nearest = std::sqrt(dist[0].first);
        if (nearest > max_radius) {
            ++result.dropped;
            continue;
        }
        PairedRecord rec;
        rec.veg = v.bands;
        rec.soc = v.soc;
        rec.veg_id = v.id;
        rec.pair_distance = nearest;
        const std::size_t n_bands = v.bands.n_bands();
        rec.bare_target.values.assign(n_bands, 0.0);
        for (std::size_t j = 0; j < k_eff; ++j) {
            const auto& nb = bare[dist[j].second];
            rec.bare_ids.push_back(nb.id);
            for (std::size_t b = 0; b < n_bands; ++b)
                rec.bare_target.values[b] += nb.bands.values[b];
        }
        for (std::size_t b = 0; b < n_bands; ++b)
            rec.bare_target.values[b] /= static_cast<double>(k_eff);
        result.pairs.push_back(std::move(rec));
    }
    return result;
}

DatasetSplit split(std::size_t n, double test_fraction, std::size_t k_folds, std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
        throw ConfigError("split: test_fraction must lie in (0,1)");
    if (k_folds == 0) throw ConfigError("split: k_folds must be positive");
    if (n < k_folds) throw ConfigError("split: need at least k_folds samples, got " +
                                       std::to_string(n));
    std::size_t n_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    n_test = std::min(n_test, n - 1);
    const std::size_t n_train = n - n_test;
    if (n_train < k_folds)
        throw ConfigError("split: training portion smaller than k_folds");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::substream(seed, "split");
    rng.shuffle(order);

    DatasetSplit s;
    s.seed = seed;
    s.test_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train_seq(order.begin() + static_cast<std::ptrdiff_t>(n_test),
                                       order.end());
    // Folds chunk the shuffled training sequence; earlier folds absorb the remainder.
    s.folds.resize(k_folds);
    const std::size_t base = n_train / k_folds, extra = n_train % k_folds;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k_folds; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        s.folds[f].assign(train_seq.begin() + static_cast<std::ptrdiff_t>(pos),
                          train_seq.begin() + static_cast<std::ptrdiff_t>(pos + len));
        std::sort(s.folds[f].begin(), s.folds[f].end());
        pos += len;
    }
    s.train_indices = std::move(train_seq);
    std::sort(s.train_indices.begin(), s.train_indices.end());
    std::sort(s.test_indices.begin(), s.test_indices.end());
    return s;
}

namespace {

// Seven-band bare-soil model. Three factors shape a bare spectrum:
//   SOC      darkens every band, gently in the visible and steeply in the
//            SWIR analogs (organic-matter absorption);
//   iron     recolors the visible bands (blue absorption, red/NIR rise);
//   moisture darkens mainly the first SWIR analog (water absorption).
// Iron and moisture vary independently of SOC, so no single band reads SOC;
// separating the factors requires the joint spectrum.
constexpr std::array<double, 7> kBareIntercept = {0.17, 0.19, 0.23, 0.27, 0.34, 0.44, 0.41};
constexpr std::array<double, 7> kBareSlope = {0.015, 0.02, 0.025, 0.03, 0.04, 0.26, 0.22};
constexpr std::array<double, 7> kIronDir = {-0.045, -0.035, 0.025, 0.04, 0.03, 0.012, 0.006};
constexpr std::array<double, 7> kMoistureDir = {0.01, 0.012, 0.015, 0.02, 0.06, 0.15, 0.0};

// Green-canopy endmember: low visible (chlorophyll absorption), high NIR
// (leaf scattering), low SWIR (leaf water absorption). Every band sits far
// from the soil range, so unknown canopy density perturbs each band more than
// SOC does and only the joint spectrum separates the two factors.
constexpr std::array<double, 7> kCanopy = {0.03, 0.04, 0.08, 0.05, 0.48, 0.30, 0.28};

// Canopy condition varies per field along a senescence axis: drying residue
// loses chlorophyll (red rises), loses leaf structure (NIR falls), and loses
// leaf water (SWIR analogs rise). The per-sample canopy spectrum is
// kCanopy + g * kCanopyCondDir with condition g in [-1, 1].
constexpr std::array<double, 7> kCanopyCondDir = {0.02, 0.025, 0.04, 0.04, -0.20, 0.28, 0.21};

// Conservation tillage couples standing residue to SOC: high-SOC fields carry
// more cellulose-bright residue, raising the canopy mixture mainly in the
// SWIR analogs. In the vegetated class this cancels most of the bare-soil
// darkening, so canopy-covered spectra show almost no marginal SOC signal --
// it survives only conditionally on cover fraction.
constexpr std::array<double, 7> kResidueCouple = {0.0057, 0.0076, 0.0095, 0.0114, 0.0152, 0.0986, 0.0834};

// Canopy cover in managed landscapes is bimodal: a field is either recently
// tilled or harvested (thin residue cover) or carrying a developed canopy of
// some density. The thin mode supplies a bare-classified reference population
// under the default NDVI threshold; the dense mode makes the vegetated
// majority genuinely obstructed across a continuous range of cover.
constexpr double kThinModeProb = 0.2;
constexpr double kThinModeMax = 0.05;
constexpr double kDenseModeMin = 0.55;

double draw_canopy_fraction(Rng& rng, const SynthConfig& cfg) {
    const double pick = rng.uniform();
    const double u = rng.uniform();
    if (pick < kThinModeProb) {
        const double hi = std::min(cfg.canopy_max, std::max(cfg.canopy_min, kThinModeMax));
        return cfg.canopy_min + (hi - cfg.canopy_min) * u;
    }
    const double lo = std::min(std::max(cfg.canopy_min, kDenseModeMin), cfg.canopy_max);
    return lo + (cfg.canopy_max - lo) * u;
}

// SOC follows a west-east gradient, so geographic nearest neighbors share it;
// latitude is a narrow survey strip with no gradient of its own. Jitter keeps
// the pairing non-trivial.
constexpr double kLonSpan = 10.0;
constexpr double kLatSpan = 1.0;
constexpr double kCoordJitter = 0.05;

}  // namespace

spectral::BandVector synth_bare_spectrum(double soc, const SynthConfig& cfg, double iron,
                                         double moisture) {
    const double t = (soc - cfg.soc_min) / (cfg.soc_max - cfg.soc_min);
    spectral::BandVector out;
    out.values.resize(7);
    for (std::size_t b = 0; b < 7; ++b)
        out.values[b] = kBareIntercept[b] + kIronDir[b] * iron + kMoistureDir[b] * moisture -
                        kBareSlope[b] * t;
    return out;
}

SynthResult synth_generate(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng = Rng::substream(cfg.seed, "synth");
    const auto roles = spectral::BandRoleMap::landsat8();

    SynthResult result;
    result.canopy.values.assign(kCanopy.begin(), kCanopy.end());

    int width = 1;
    for (std::size_t v = cfg.n_samples; v >= 10; v /= 10) ++width;
    width = std::max(width, 4);

    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        const double soc = rng.uniform(cfg.soc_min, cfg.soc_max);
        const double f = draw_canopy_fraction(rng, cfg);
        const double iron = rng.uniform(-1.0, 1.0);
        const double moisture = rng.uniform(-1.0, 1.0);
        const double cond = rng.uniform(-1.0, 1.0);
        const double t = (soc - cfg.soc_min) / (cfg.soc_max - cfg.soc_min);

        SoilSample s;
        std::ostringstream id;
        id << "s";
        for (int d = width - 1; d >= 0; --d)
            id << ((i + 1) / static_cast<std::size_t>(std::pow(10.0, d))) % 10;
        s.id = id.str();
        s.lon = kLonSpan * t + rng.normal(0.0, kCoordJitter);
        const double lat_pos = rng.uniform();
        s.lat = kLatSpan * lat_pos + rng.normal(0.0, kCoordJitter);
        s.soc = soc;

        const auto bare = synth_bare_spectrum(soc, cfg, iron, moisture);
        s.bands.values.resize(7);
        for (std::size_t b = 0; b < 7; ++b) {
            const double canopy = kCanopy[b] + cond * kCanopyCondDir[b] + t * kResidueCouple[b];
            const double mixed = (1.0 - f) * bare.values[b] + f * canopy +
                                 cfg.nonlinear_strength * f * (1.0 - f) * bare.values[b] * canopy;
            s.bands.values[b] = mixed + rng.normal(0.0, cfg.noise_sigma);
        }
        s.bands = spectral::clamp_unit(std::move(s.bands));
        s.ndvi = spectral::ndvi(s.bands, roles);

        result.truth[s.id] = bare;
        result.samples.push_back(std::move(s));
    }
    return result;
}

void write_samples_csv(const std::string& path, const std::vector<SoilSample>& samples,
                       std::size_t n_bands) {
    std::string out = samples_header(n_bands) + "\n";
    for (const auto& s : samples) {
        s.bands.validate(n_bands);
        std::vector<std::string> f = {s.id, csv::fmt17(s.lon), csv::fmt17(s.lat),
                                      csv::fmt17(s.soc)};
        for (double v : s.bands.values) f.push_back(csv::fmt17(v));
        out += csv::join(f) + "\n";
    }
    csv::write_file(path, out);
}

void write_truth_csv(const std::string& path,
                     const std::map<std::string, spectral::BandVector>& truth,
                     std::size_t n_bands) {
    std::string out = truth_header(n_bands) + "\n";
    for (const auto& [id, bands] : truth) {
        bands.validate(n_bands);
        std::vector<std::string> f = {id};
        for (double v : bands.values) f.push_back(csv::fmt17(v));
        out += csv::join(f) + "\n";
    }
    csv::write_file(path, out);
}

std::map<std::string, spectral::BandVector> read_truth_csv(const std::string& path,
                                                           std::size_t n_bands) {
    auto lines = csv::read_lines(path);
    if (lines.empty()) throw ConfigError(path + ": empty file");
    check_header(lines[0], truth_header(n_bands), path);
    std::map<std::string, spectral::BandVector> truth;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = csv::split(lines[i]);
        if (fields.size() != 1 + n_bands)
            throw ConfigError(path + ":" + std::to_string(i + 1) + ": expected " +
                              std::to_string(1 + n_bands) + " fields, got " +
                              std::to_string(fields.size()));
        spectral::BandVector bv;
        bv.values.resize(n_bands);
        for (std::size_t b = 0; b < n_bands; ++b)
            bv.values[b] = csv::parse_double(fields[1 + b], path + ":" + std::to_string(i + 1));
        truth[fields[0]] = std::move(bv);
    }
    return truth;
}

void write_paired_csv(const std::string& path, const std::vector<PairedRecord>& pairs,
                      std::size_t n_bands) {
    std::string out = paired_header(n_bands) + "\n";
    for (const auto& p : pairs) {
        p.veg.validate(n_bands);
        p.bare_target.validate(n_bands);
        std::string joined_ids;
        for (std::size_t j = 0; j < p.bare_ids.size(); ++j) {
            if (j) joined_ids += ';';
            joined_ids += p.bare_ids[j];
        }
        std::vector<std::string> f = {p.veg_id, joined_ids, csv::fmt17(p.pair_distance),
                                      csv::fmt17(p.soc)};
        for (double v : p.veg.values) f.push_back(csv::fmt17(v));
        for (double v : p.bare_target.values) f.push_back(csv::fmt17(v));
        out += csv::join(f) + "\n";
    }
    csv::write_file(path, out);
}

std::vector<PairedRecord> read_paired_csv(const std::string& path, std::size_t n_bands) {
    auto lines = csv::read_lines(path);
    if (lines.empty()) throw ConfigError(path + ": empty file");
    check_header(lines[0], paired_header(n_bands), path);
    std::vector<PairedRecord> pairs;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string ctx = path + ":" + std::to_string(i + 1);
        auto fields = csv::split(lines[i]);
        if (fields.size() != 4 + 2 * n_bands)
            throw ConfigError(ctx + ": expected " + std::to_string(4 + 2 * n_bands) +
                              " fields, got " + std::to_string(fields.size()));
        PairedRecord p;
        p.veg_id = fields[0];
        p.bare_ids = csv::split(fields[1], ';');
        if (p.bare_ids.empty() || (p.bare_ids.size() == 1 && p.bare_ids[0].empty()))
            throw ConfigError(ctx + ": empty bare_ids");
        p.pair_distance = csv::parse_double(fields[2], ctx + " pair_distance");
        p.soc = csv::parse_double(fields[3], ctx + " soc_g_kg");
        p.veg.values.resize(n_bands);
        p.bare_target.values.resize(n_bands);
        for (std::size_t b = 0; b < n_bands; ++b) {
            p.veg.values[b] = csv::parse_double(fields[4 + b], ctx);
            p.bare_target.values[b] = csv::parse_double(fields[4 + n_bands + b], ctx);
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace rg::data
