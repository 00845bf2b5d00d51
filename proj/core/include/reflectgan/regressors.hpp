#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "reflectgan/nn.hpp"

namespace rg::soc {

struct FeatureMatrix {
    nn::Matrix x;
    std::vector<std::string> feature_names;

    std::size_t rows() const { return x.rows; }
    std::size_t cols() const { return x.cols; }
    void validate() const;  // finite entries, names match columns
};

struct FitSpec {
    enum class Kind { lr, knn, dtree, rforest, mlp };

    Kind kind = Kind::lr;
    bool standardize = true;
    std::uint64_t seed = 42;

    // knn
    std::size_t k = 5;
    // dtree
    std::size_t max_depth = 0;  // 0 = unbounded
    std::size_t min_leaf = 1;
    // rforest
    std::size_t n_trees = 100;
    bool bootstrap = true;   // test hook: off makes one tree equal the plain tree
    std::size_t mtry = 0;    // 0 = max(1, cols/3); >= cols disables subsampling
    // mlp
    std::vector<std::size_t> hidden = {128, 64};
    double dropout = 0.3;
    std::size_t batch_size = 32;
    std::size_t epochs = 100;
    double learning_rate = 0.001;

    void validate() const;
};

const char* kind_name(FitSpec::Kind k);
FitSpec::Kind kind_from_name(const std::string& name);

class Regressor {
  public:
    virtual ~Regressor() = default;
    virtual void fit(const FeatureMatrix& X, const std::vector<double>& y) = 0;
    virtual std::vector<double> predict(const FeatureMatrix& X) const = 0;
    virtual std::string dump() const = 0;  // versioned text description
    virtual FitSpec::Kind kind() const = 0;
};

std::unique_ptr<Regressor> make_regressor(const FitSpec& spec);

}  // namespace rg::soc
