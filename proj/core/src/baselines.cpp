#include "reflectgan/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "reflectgan/csv.hpp"
#include "reflectgan/errors.hpp"

namespace rg::baselines {

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

spectral::BandVector mean_bands(const std::vector<const data::SoilSample*>& group) {
    const std::size_t n_bands = group.front()->bands.n_bands();
    spectral::BandVector out;
    out.values.assign(n_bands, 0.0);
    for (const auto* s : group) {
        s->bands.validate(n_bands);
        for (std::size_t b = 0; b < n_bands; ++b) out.values[b] += s->bands.values[b];
    }
    for (double& v : out.values) v /= static_cast<double>(group.size());
    return out;
}

}  // namespace

void EndmemberSet::validate() const {
    if (soil.n_bands() == 0 || soil.n_bands() != vegetation.n_bands())
        throw ShapeError("endmembers: band count mismatch");
    double d2 = 0.0;
    for (std::size_t b = 0; b < soil.n_bands(); ++b) {
        if (soil.values[b] < 0 || soil.values[b] > 1 || vegetation.values[b] < 0 ||
            vegetation.values[b] > 1)
            throw ConfigError("endmembers: spectra must lie in [0,1]");
        const double d = soil.values[b] - vegetation.values[b];
        d2 += d * d;
    }
    if (std::sqrt(d2) <= 1e-6) throw DegenerateInput("endmembers: coincident soil/vegetation spectra");
}

EndmemberSet estimate_endmembers(const std::vector<data::SoilSample>& bare,
                                 const std::vector<data::SoilSample>& vegetated,
                                 double ndvi_hi) {
    if (bare.empty()) throw ConfigError("estimate_endmembers: no bare samples");
    EndmemberSet em;
    em.provenance = EndmemberProvenance::estimated_from_data;

    std::vector<const data::SoilSample*> group;
    for (const auto& s : bare) group.push_back(&s);
    em.soil = mean_bands(group);

    group.clear();
    for (const auto& s : vegetated)
        if (s.ndvi >= ndvi_hi) group.push_back(&s);
    if (group.empty()) {
        if (vegetated.empty())
            throw ConfigError("estimate_endmembers: no vegetated samples");
        const auto* best = &vegetated.front();
        for (const auto& s : vegetated)
            if (s.ndvi > best->ndvi) best = &s;
        group.push_back(best);
        em.vegetation_fallback = true;
    }
    em.vegetation = mean_bands(group);
    return em;
}

AbundanceEstimate sma_unmix(const spectral::BandVector& mixed, const EndmemberSet& em) {
    em.validate();
    const std::size_t n_bands = em.soil.n_bands();
    mixed.validate(n_bands);

    // mixed = f*soil + (1-f)*veg + r  =>  r = (mixed - veg) - f*(soil - veg);
    // the unconstrained optimum is the scalar projection, clipped to [0,1].
    double dd = 0.0, dr = 0.0;
    for (std::size_t b = 0; b < n_bands; ++b) {
        const double d = em.soil.values[b] - em.vegetation.values[b];
        const double r = mixed.values[b] - em.vegetation.values[b];
        dd += d * d;
        dr += d * r;
    }
    AbundanceEstimate est;
    est.f_soil = std::min(1.0, std::max(0.0, dr / dd));
    est.f_veg = 1.0 - est.f_soil;

    double resid2 = 0.0;
    for (std::size_t b = 0; b < n_bands; ++b) {
        const double fit = est.f_soil * em.soil.values[b] + est.f_veg * em.vegetation.values[b];
        const double r = mixed.values[b] - fit;
        resid2 += r * r;
    }
    est.residual_norm = std::sqrt(resid2);
    return est;
}

SmaCorrection sma_correct(const spectral::BandVector& mixed, const EndmemberSet& em,
                          double f_floor) {
    SmaCorrection out;
    out.abundance = sma_unmix(mixed, em);
    out.low_confidence = out.abundance.f_soil < f_floor;
    const double denom = std::max(out.abundance.f_soil, f_floor);
    const std::size_t n_bands = mixed.n_bands();
    out.bare_est.values.resize(n_bands);
    for (std::size_t b = 0; b < n_bands; ++b)
        out.bare_est.values[b] =
            clamp01((mixed.values[b] - out.abundance.f_veg * em.vegetation.values[b]) / denom);
    return out;
}

namespace {

// Solves the 3x3 system A x = b by Gaussian elimination with partial
// pivoting; a vanishing pivot signals an unidentifiable fit.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> A, std::array<double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
        if (std::fabs(A[pivot][col]) < 1e-12)
            throw ConfigError(
                "vi_correction: rank-deficient design (constant NDVI or SAVI across samples)");
        std::swap(A[col], A[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double m = A[r][col] / A[col][col];
            for (int c = col; c < 3; ++c) A[r][c] -= m * A[col][c];
            b[r] -= m * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < 3; ++c) acc -= A[r][c] * x[c];
        x[r] = acc / A[r][r];
    }
    return x;
}

}  // namespace

ViCorrection ViCorrection::fit(const std::vector<data::SoilSample>& samples,
                               const spectral::BandRoleMap& roles) {
    if (samples.size() < 10)
        throw ConfigError("vi_correction: need at least 10 samples, got " +
                          std::to_string(samples.size()));
    const std::size_t n = samples.size();
    const std::size_t n_bands = samples.front().bands.n_bands();
    roles.validate(n_bands);

    std::vector<double> ndvi(n), savi(n);
    for (std::size_t i = 0; i < n; ++i) {
        samples[i].bands.validate(n_bands);
        spectral::IndexSet vi;
        spectral::compute_vegetation_indices(samples[i].bands, roles, vi);
        ndvi[i] = vi.ndvi;
        savi[i] = vi.savi;
    }

    ViCorrection model;
    model.alpha_.resize(n_bands);
    model.beta_.resize(n_bands);
    model.gamma_.resize(n_bands);
    model.mean_ndvi_ = 0;
    model.mean_savi_ = 0;
    for (std::size_t i = 0; i < n; ++i) {
        model.mean_ndvi_ += ndvi[i];
        model.mean_savi_ += savi[i];
    }
    model.mean_ndvi_ /= static_cast<double>(n);
    model.mean_savi_ /= static_cast<double>(n);

    // Normal equations for band_j ~ 1 + ndvi + savi, shared across bands.
    std::array<std::array<double, 3>, 3> A{};
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = ndvi[i], x2 = savi[i];
        A[0][0] += 1.0;
        A[0][1] += x1;
        A[0][2] += x2;
        A[1][1] += x1 * x1;
        A[1][2] += x1 * x2;
        A[2][2] += x2 * x2;
    }
    A[1][0] = A[0][1];
    A[2][0] = A[0][2];
    A[2][1] = A[1][2];

    for (std::size_t b = 0; b < n_bands; ++b) {
        std::array<double, 3> rhs{};
        for (std::size_t i = 0; i < n; ++i) {
            const double y = samples[i].bands.values[b];
            rhs[0] += y;
            rhs[1] += ndvi[i] * y;
            rhs[2] += savi[i] * y;
        }
        const auto coef = solve3(A, rhs);
        model.alpha_[b] = coef[0];
        model.beta_[b] = coef[1];
        model.gamma_[b] = coef[2];
    }
    return model;
}

spectral::BandVector ViCorrection::apply(const spectral::BandVector& bands,
                                         const spectral::BandRoleMap& roles) const {
    bands.validate(n_bands());
    spectral::IndexSet vi;
    spectral::compute_vegetation_indices(bands, roles, vi);
    spectral::BandVector out;
    out.values.resize(n_bands());
    for (std::size_t b = 0; b < n_bands(); ++b)
        out.values[b] = bands.values[b] - beta_[b] * (vi.ndvi - mean_ndvi_) -
                        gamma_[b] * (vi.savi - mean_savi_);
    return out;
}

std::vector<spectral::BandVector> vi_correction(const std::vector<data::SoilSample>& samples,
                                                const spectral::BandRoleMap& roles) {
    const ViCorrection model = ViCorrection::fit(samples, roles);
    std::vector<spectral::BandVector> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(model.apply(s.bands, roles));
    return out;
}

void write_endmembers_csv(const std::string& path, const EndmemberSet& em) {
    const std::size_t n_bands = em.soil.n_bands();
    std::string header = "role";
    for (std::size_t b = 1; b <= n_bands; ++b) header += ",b" + std::to_string(b);
    std::string out = header + "\n";
    auto row = [&](const char* role, const spectral::BandVector& v) {
        out += role;
        for (double x : v.values) out += "," + csv::fmt17(x);
        out += "\n";
    };
    row("soil", em.soil);
    row("vegetation", em.vegetation);
    csv::write_file(path, out);
}

EndmemberSet read_endmembers_csv(const std::string& path, std::size_t n_bands) {
    auto lines = csv::read_lines(path);
    std::string header = "role";
    for (std::size_t b = 1; b <= n_bands; ++b) header += ",b" + std::to_string(b);
    if (lines.empty() || lines[0] != header)
        throw ConfigError(path + ": bad endmember header; expected '" + header + "'");
    EndmemberSet em;
    bool have_soil = false, have_veg = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = csv::split(lines[i]);
        if (fields.size() != 1 + n_bands)
            throw ConfigError(path + ":" + std::to_string(i + 1) + ": expected " +
                              std::to_string(1 + n_bands) + " fields");
        spectral::BandVector v;
        v.values.resize(n_bands);
        for (std::size_t b = 0; b < n_bands; ++b)
            v.values[b] = csv::parse_double(fields[1 + b], path + ":" + std::to_string(i + 1));
        if (fields[0] == "soil") {
            em.soil = std::move(v);
            have_soil = true;
        } else if (fields[0] == "vegetation") {
            em.vegetation = std::move(v);
            have_veg = true;
        } else {
            throw ConfigError(path + ":" + std::to_string(i + 1) + ": unknown role '" +
                              fields[0] + "'");
        }
    }
    if (!have_soil || !have_veg)
        throw ConfigError(path + ": endmember file must contain soil and vegetation rows");
    em.provenance = EndmemberProvenance::fixed;
    return em;
}

}  // namespace rg::baselines
