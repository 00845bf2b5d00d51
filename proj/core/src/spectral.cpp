#include "reflectgan/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "reflectgan/csv.hpp"

namespace rg::spectral {

void BandVector::validate(std::size_t expected_bands) const {
    if (values.size() != expected_bands) {
        throw ConfigError("band vector has " + std::to_string(values.size()) +
                          " bands, expected " + std::to_string(expected_bands));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("band vector contains a non-finite value");
    }
}

void BandRoleMap::validate(std::size_t n_bands) const {
    const std::size_t idx[] = {coastal, blue, green, red, nir, swir1, swir2};
    std::set<std::size_t> seen;
    for (std::size_t i : idx) {
        if (i >= n_bands) {
            throw ConfigError("band role index " + std::to_string(i) + " out of range for " +
                              std::to_string(n_bands) + " bands");
        }
        if (!seen.insert(i).second) throw ConfigError("band role indices must be distinct");
    }
}

TasseledCapCoefficients TasseledCapCoefficients::landsat8() {
    TasseledCapCoefficients c;
    c.rows = {{{0.3029, 0.2786, 0.4733, 0.5599, 0.5080, 0.1872},
               {-0.2941, -0.2430, -0.5424, 0.7276, 0.0713, -0.1608},
               {0.1511, 0.1973, 0.3283, 0.3407, -0.7117, -0.4559}}};
    return c;
}

TasseledCapCoefficients TasseledCapCoefficients::from_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = csv::split(lines[i]);
        if (fields.size() != 6) {
            throw ConfigError("tasseled cap file " + path + " line " + std::to_string(i + 1) +
                              ": expected 6 columns, got " + std::to_string(fields.size()));
        }
        std::vector<double> row;
        for (const auto& f : fields) {
            row.push_back(csv::parse_double(f, path + " line " + std::to_string(i + 1)));
        }
        rows.push_back(row);
    }
    if (rows.size() != 3) {
        throw ConfigError("tasseled cap file " + path + ": expected 3 rows, got " +
                          std::to_string(rows.size()));
    }
    TasseledCapCoefficients c;
    for (int r = 0; r < 3; ++r) {
        for (int j = 0; j < 6; ++j) c.rows[r][j] = rows[r][j];
    }
    return c;
}

void TasseledCapCoefficients::to_csv(const std::string& path) const {
    std::string out;
    for (const auto& row : rows) {
        std::vector<std::string> fields;
        for (double v : row) fields.push_back(csv::fmt17(v));
        out += csv::join(fields) + "\n";
    }
    csv::write_file(path, out);
}

namespace {

double safe_div(double num, double den, const char* index_name) {
    if (std::abs(den) < kDenomEps) {
        throw DegenerateInput(std::string("degenerate denominator for ") + index_name);
    }
    return num / den;
}

}  // namespace

double ndvi(const BandVector& b, const BandRoleMap& roles) {
    const double nir = b[roles.nir];
    const double red = b[roles.red];
    return safe_div(nir - red, nir + red, "ndvi");
}

void compute_vegetation_indices(const BandVector& b, const BandRoleMap& roles, IndexSet& out) {
    const double blue = b[roles.blue];
    const double green = b[roles.green];
    const double red = b[roles.red];
    const double nir = b[roles.nir];

    out.ndvi = safe_div(nir - red, nir + red, "ndvi");
    out.rvi = safe_div(nir, red, "rvi");
    out.gndvi = safe_div(nir - green, nir + green, "gndvi");
    out.evi = 2.5 * safe_div(nir - red, nir + 6.0 * red - 7.5 * blue + 1.0, "evi");
    out.savi = 1.5 * safe_div(nir - red, nir + red + 0.5, "savi");
    const double radicand = (2.0 * nir + 1.0) * (2.0 * nir + 1.0) - 8.0 * (nir - red);
    if (radicand < -kDenomEps) throw DegenerateInput("negative radicand for msavi");
    out.msavi = (2.0 * nir + 1.0 - std::sqrt(std::max(radicand, 0.0))) / 2.0;
}

void compute_soil_indices(const BandVector& b, const BandRoleMap& roles, IndexSet& out) {
    const double blue = b[roles.blue];
    const double green = b[roles.green];
    const double red = b[roles.red];
    const double nir = b[roles.nir];
    const double swir1 = b[roles.swir1];

    out.bi = std::sqrt((red * red + green * green) / 2.0);
    const double si2 = blue * red;
    if (si2 < -kDenomEps) throw DegenerateInput("negative radicand for si");
    out.si = std::sqrt(std::max(si2, 0.0));
    out.ci = safe_div(red - green, red + green, "ci");
    out.dsi = safe_div(swir1, nir, "dsi");
    out.dvi = nir - red;
}

std::array<double, 3> tasseled_cap(const BandVector& b, const BandRoleMap& roles,
                                   const TasseledCapCoefficients& coeffs) {
    const double bands[6] = {b[roles.blue],  b[roles.green], b[roles.red],
                             b[roles.nir],   b[roles.swir1], b[roles.swir2]};
    std::array<double, 3> out{};
    for (int r = 0; r < 3; ++r) {
        double acc = 0.0;
        for (int j = 0; j < 6; ++j) acc += coeffs.rows[r][j] * bands[j];
        out[r] = acc;
    }
    return out;
}

std::vector<double> augment_features(const BandVector& b, const BandRoleMap& roles,
                                     const TasseledCapCoefficients& coeffs) {
    IndexSet idx;
    compute_vegetation_indices(b, roles, idx);
    compute_soil_indices(b, roles, idx);
    const auto tct = tasseled_cap(b, roles, coeffs);

    std::vector<double> out;
    out.reserve(b.n_bands() + 14);
    out.insert(out.end(), b.values.begin(), b.values.end());
    out.insert(out.end(), {idx.rvi, idx.ndvi, idx.gndvi, idx.evi, idx.savi, idx.msavi});
    out.insert(out.end(), {idx.bi, idx.si, idx.ci, idx.dsi, idx.dvi});
    out.insert(out.end(), {tct[0], tct[1], tct[2]});
    return out;
}

std::vector<std::string> augmented_feature_names(std::size_t n_bands) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n_bands; ++i) names.push_back("b" + std::to_string(i + 1));
    for (const char* n : {"rvi", "ndvi", "gndvi", "evi", "savi", "msavi", "bi", "si", "ci",
                          "dsi", "dvi", "tct_brightness", "tct_greenness", "tct_wetness"}) {
        names.push_back(n);
    }
    return names;
}

BandVector clamp_unit(BandVector b, ClampStats* stats) {
    for (double& v : b.values) {
        if (v < 0.0 || v > 1.0) {
            v = std::clamp(v, 0.0, 1.0);
            if (stats) ++stats->clamped;
        }
    }
    return b;
}

BandVector normalize_reflectance(const BandVector& b, ClampStats* stats) {
    BandVector out = clamp_unit(b, stats);
    for (double& v : out.values) v = 2.0 * v - 1.0;
    return out;
}

BandVector denormalize_reflectance(const BandVector& b) {
    BandVector out = b;
    for (double& v : out.values) v = (v + 1.0) / 2.0;
    return out;
}

}  // namespace rg::spectral
