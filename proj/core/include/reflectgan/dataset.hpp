#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "reflectgan/spectral.hpp"

namespace rg::data {

// One georeferenced topsoil sample. ndvi is cached from the bands at
// construction and stays consistent with spectral::ndvi.
struct SoilSample {
    std::string id;
    double lon = 0, lat = 0;
    double soc = 0;  // g/kg
    spectral::BandVector bands;
    double ndvi = 0;
};

// Supervised (vegetated input, bare target) pair. bare_target is the
// per-band mean of the contributing bare samples' bands; soc comes from the
// vegetated sample.
struct PairedRecord {
    spectral::BandVector veg;
    spectral::BandVector bare_target;
    double soc = 0;
    std::string veg_id;
    std::vector<std::string> bare_ids;
    double pair_distance = 0;  // degrees, to the single nearest bare sample
};

struct DatasetSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::vector<std::vector<std::size_t>> folds;  // partition of train_indices
    std::uint64_t seed = 0;
};

// Seeded mixed-pixel generator configuration. Canopy fraction f is drawn per
// sample within canopy_fraction_range; the vegetated spectrum is
//   (1-f)*bare + f*canopy + nonlinear_strength*f*(1-f)*(bare (.) canopy) + noise
// clamped to [0,1].
struct SynthConfig {
    std::size_t n_samples = 2000;
    double soc_min = 2.5, soc_max = 30.0;  // g/kg
    double canopy_min = 0.0, canopy_max = 0.9;
    double nonlinear_strength = 0.3;
    double noise_sigma = 0.008;  // reflectance units
    std::uint64_t seed = 42;

    void validate() const;
};

struct RowIssue {
    std::size_t line = 0;  // 1-based file line
    std::string reason;
};

struct LoadReport {
    std::vector<SoilSample> samples;
    std::vector<RowIssue> rejected;
    std::size_t clamped_values = 0;
};

// Reads the samples CSV (header `sample_id,lon,lat,soc_g_kg,b1..bN`).
// Malformed rows throw with the line number; rows violating sample
// invariants (non-positive SOC, non-finite values) are rejected and reported.
// Bands outside [0,1] are clamped and counted.
LoadReport load_samples(const std::string& path, std::size_t n_bands,
                        const spectral::BandRoleMap& roles);

struct NdviClasses {
    std::vector<SoilSample> bare;       // ndvi <= threshold (ties go to bare)
    std::vector<SoilSample> vegetated;  // ndvi >  threshold
};

NdviClasses classify_by_ndvi(const std::vector<SoilSample>& samples, double threshold = 0.2);

struct PairingResult {
    std::vector<PairedRecord> pairs;
    std::size_t dropped = 0;  // vegetated samples beyond max_radius
};

// For each vegetated sample: its k nearest bare samples by Euclidean distance
// in (lon, lat) degrees. Ties break toward the lower bare index. Vegetated
// samples whose nearest bare exceeds max_radius are dropped and counted.
PairingResult pair_samples(const std::vector<SoilSample>& vegetated,
                           const std::vector<SoilSample>& bare, std::size_t k = 3,
                           double max_radius = std::numeric_limits<double>::infinity());

// Deterministic shuffle under seed, holdout split, then a k-fold partition of
// the training portion.
DatasetSplit split(std::size_t n, double test_fraction = 0.2, std::size_t k_folds = 5,
                   std::uint64_t seed = 42);

struct SynthResult {
    std::vector<SoilSample> samples;
    // id -> noise-free bare spectrum for every generated sample.
    std::map<std::string, spectral::BandVector> truth;
    // Fixed canopy endmember used in the mixing model (for test oracles).
    spectral::BandVector canopy;
};

SynthResult synth_generate(const SynthConfig& cfg);

// Noise-free bare-soil spectrum: decreasing in SOC in every band (steepest in
// the SWIR analogs) at any fixed soil condition. `iron` and `moisture` in
// [-1,1] shift the spectrum along fixed SOC-independent directions (visible
// recoloring and SWIR darkening respectively). Exposed for test oracles.
spectral::BandVector synth_bare_spectrum(double soc, const SynthConfig& cfg, double iron = 0.0,
                                         double moisture = 0.0);

// --- CSV I/O (all values rendered with 17 significant digits) ---

void write_samples_csv(const std::string& path, const std::vector<SoilSample>& samples,
                       std::size_t n_bands);
void write_truth_csv(const std::string& path,
                     const std::map<std::string, spectral::BandVector>& truth,
                     std::size_t n_bands);
std::map<std::string, spectral::BandVector> read_truth_csv(const std::string& path,
                                                           std::size_t n_bands);
void write_paired_csv(const std::string& path, const std::vector<PairedRecord>& pairs,
                      std::size_t n_bands);
std::vector<PairedRecord> read_paired_csv(const std::string& path, std::size_t n_bands);

}  // namespace rg::data
