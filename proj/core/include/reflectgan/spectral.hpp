#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "reflectgan/errors.hpp"

namespace rg::spectral {

// Denominators (and the MSAVI radicand) smaller than this are refused rather
// than silently producing NaN/Inf.
inline constexpr double kDenomEps = 1e-12;

// One pixel's surface reflectance across N spectral bands, unit reflectance
// in [0, 1]. Default N = 7 (Landsat-8 B1..B7).
struct BandVector {
    std::vector<double> values;

    BandVector() = default;
    explicit BandVector(std::vector<double> v) : values(std::move(v)) {}

    std::size_t n_bands() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    // Throws ConfigError on non-finite entries or a band-count mismatch.
    void validate(std::size_t expected_bands) const;
};

// 0-based indices of the named bands within a BandVector.
// Default mapping: B1..B7 -> 0..6 (blue=B2, green=B3, red=B4, nir=B5,
// swir1=B6, swir2=B7). The coastal band participates only as a raw feature.
struct BandRoleMap {
    std::size_t coastal = 0;
    std::size_t blue = 1;
    std::size_t green = 2;
    std::size_t red = 3;
    std::size_t nir = 4;
    std::size_t swir1 = 5;
    std::size_t swir2 = 6;

    static BandRoleMap landsat8() { return BandRoleMap{}; }

    // All indices distinct and < n_bands.
    void validate(std::size_t n_bands) const;
};

// Derived features for one sample. Vegetation indices (rvi..msavi), soil
// indices (bi..dvi) and the three Tasseled Cap components.
struct IndexSet {
    double rvi = 0, ndvi = 0, gndvi = 0, evi = 0, savi = 0, msavi = 0;
    double bi = 0, si = 0, ci = 0, dsi = 0, dvi = 0;
    double tct_brightness = 0, tct_greenness = 0, tct_wetness = 0;
};

// 3x6 coefficient matrix over bands B2..B7 (blue..swir2), row order
// brightness / greenness / wetness.
struct TasseledCapCoefficients {
    std::array<std::array<double, 6>, 3> rows{};

    // Landsat-8 OLI reflectance coefficients.
    static TasseledCapCoefficients landsat8();
    // Plain CSV, 3 rows x 6 columns, no header.
    static TasseledCapCoefficients from_csv(const std::string& path);
    void to_csv(const std::string& path) const;
};

double ndvi(const BandVector& b, const BandRoleMap& roles);

// Fills rvi, ndvi, gndvi, evi, savi, msavi. Throws DegenerateInput naming the
// offending index when a denominator vanishes or the MSAVI radicand is
// negative.
void compute_vegetation_indices(const BandVector& b, const BandRoleMap& roles, IndexSet& out);

// Fills bi, si, ci, dsi, dvi.
void compute_soil_indices(const BandVector& b, const BandRoleMap& roles, IndexSet& out);

// Brightness/greenness/wetness: dot products of the coefficient rows with
// (blue, green, red, nir, swir1, swir2).
std::array<double, 3> tasseled_cap(const BandVector& b, const BandRoleMap& roles,
                                   const TasseledCapCoefficients& coeffs);

// [bands | rvi ndvi gndvi evi savi msavi | bi si ci dsi dvi | tct_b tct_g tct_w]
// Length n_bands + 14.
std::vector<double> augment_features(const BandVector& b, const BandRoleMap& roles,
                                     const TasseledCapCoefficients& coeffs);
std::vector<std::string> augmented_feature_names(std::size_t n_bands);

struct ClampStats {
    std::size_t clamped = 0;
};

// Clamp every band into [0, 1]; out-of-range values are counted, not fatal.
BandVector clamp_unit(BandVector b, ClampStats* stats = nullptr);

// Affine map [0,1] -> [-1,1] (v -> 2v - 1); inputs outside [0,1] are clamped
// first and counted.
BandVector normalize_reflectance(const BandVector& b, ClampStats* stats = nullptr);

// Exact inverse of normalize_reflectance on [-1, 1].
BandVector denormalize_reflectance(const BandVector& b);

}  // namespace rg::spectral
