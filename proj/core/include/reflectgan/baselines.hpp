#pragma once

#include <string>
#include <vector>

#include "reflectgan/dataset.hpp"
#include "reflectgan/spectral.hpp"

namespace rg::baselines {

enum class EndmemberProvenance { fixed, estimated_from_data };

struct EndmemberSet {
    spectral::BandVector soil;
    spectral::BandVector vegetation;
    EndmemberProvenance provenance = EndmemberProvenance::fixed;
    // True when no sample reached the high-NDVI cutoff and the single
    // highest-NDVI sample stood in for the vegetation endmember.
    bool vegetation_fallback = false;

    void validate() const;  // spectra in [0,1], distinct
};

struct AbundanceEstimate {
    double f_soil = 0, f_veg = 0;  // f_soil + f_veg = 1 exactly
    double residual_norm = 0;
};

// soil = per-band mean of the bare samples; vegetation = per-band mean of the
// samples with ndvi >= ndvi_hi (falling back to the single highest-NDVI
// sample when none qualifies).
EndmemberSet estimate_endmembers(const std::vector<data::SoilSample>& bare,
                                 const std::vector<data::SoilSample>& vegetated,
                                 double ndvi_hi = 0.7);

// Two-endmember constrained least squares: minimize
// ||mixed - (f*soil + (1-f)*veg)|| over f in [0,1], closed form with the
// unconstrained optimum projected onto the interval.
AbundanceEstimate sma_unmix(const spectral::BandVector& mixed, const EndmemberSet& em);

struct SmaCorrection {
    spectral::BandVector bare_est;
    AbundanceEstimate abundance;
    bool low_confidence = false;  // f_soil fell below the floor
};

// bare_est = clamp01((mixed - f_veg*veg) / max(f_soil, f_floor)).
SmaCorrection sma_correct(const spectral::BandVector& mixed, const EndmemberSet& em,
                          double f_floor = 0.05);

// Per-band OLS of reflectance on [1, ndvi, savi]; correction subtracts the
// fitted vegetation effect re-centered at the fit population's means.
class ViCorrection {
  public:
    static ViCorrection fit(const std::vector<data::SoilSample>& samples,
                            const spectral::BandRoleMap& roles);

    spectral::BandVector apply(const spectral::BandVector& bands,
                               const spectral::BandRoleMap& roles) const;

    std::size_t n_bands() const { return beta_.size(); }
    const std::vector<double>& alpha() const { return alpha_; }
    const std::vector<double>& beta() const { return beta_; }
    const std::vector<double>& gamma() const { return gamma_; }
    double mean_ndvi() const { return mean_ndvi_; }
    double mean_savi() const { return mean_savi_; }

  private:
    std::vector<double> alpha_, beta_, gamma_;
    double mean_ndvi_ = 0, mean_savi_ = 0;
};

// Fit on the input set and correct every sample in place of its bands.
std::vector<spectral::BandVector> vi_correction(const std::vector<data::SoilSample>& samples,
                                                const spectral::BandRoleMap& roles);

void write_endmembers_csv(const std::string& path, const EndmemberSet& em);
EndmemberSet read_endmembers_csv(const std::string& path, std::size_t n_bands);

}  // namespace rg::baselines
