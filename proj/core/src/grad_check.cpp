#include <cmath>
#include <vector>

#include "reflectgan/errors.hpp"
#include "reflectgan/nn.hpp"

namespace rg::nn {

GradCheckResult grad_check(const GradProbe& probe, double h) {
    if (!probe.loss || !probe.compute_grads) throw ConfigError("grad_check: probe incomplete");
    probe.compute_grads();
    std::vector<double> analytic(probe.coords.size());
    for (std::size_t i = 0; i < probe.coords.size(); ++i) analytic[i] = *probe.coords[i].grad;

    GradCheckResult result;
    result.n_coords = probe.coords.size();
    for (std::size_t i = 0; i < probe.coords.size(); ++i) {
        double* v = probe.coords[i].value;
        const double saved = *v;
        *v = saved + h;
        const double up = probe.loss();
        *v = saved - h;
        const double down = probe.loss();
        *v = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic[i];
        const double scale = std::max(std::fabs(a), std::fabs(numeric));
        const double err = scale < 1e-4 ? std::fabs(a - numeric) : std::fabs(a - numeric) / scale;
        if (err > result.max_rel_error) {
            result.max_rel_error = err;
            result.worst_coord = i;
        }
    }
    return result;
}

}  // namespace rg::nn
