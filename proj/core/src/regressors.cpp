#include "reflectgan/regressors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reflectgan/csv.hpp"
#include "reflectgan/errors.hpp"

namespace rg::soc {

void FeatureMatrix::validate() const {
    if (feature_names.size() != x.cols)
        throw ConfigError("feature matrix: " + std::to_string(feature_names.size()) +
                          " names for " + std::to_string(x.cols) + " columns");
    for (double v : x.data)
        if (!std::isfinite(v)) throw ConfigError("feature matrix: non-finite entry");
}

void FitSpec::validate() const {
    if (k == 0) throw ConfigError("fit spec: k must be positive");
    if (n_trees == 0) throw ConfigError("fit spec: n_trees must be positive");
    if (min_leaf == 0) throw ConfigError("fit spec: min_leaf must be positive");
    if (dropout < 0 || dropout >= 1) throw ConfigError("fit spec: dropout must lie in [0,1)");
    if (batch_size == 0) throw ConfigError("fit spec: batch_size must be positive");
    if (!(learning_rate > 0)) throw ConfigError("fit spec: learning_rate must be positive");
    if (hidden.empty()) throw ConfigError("fit spec: mlp needs at least one hidden layer");
    for (std::size_t h : hidden)
        if (h == 0) throw ConfigError("fit spec: zero-width hidden layer");
}

const char* kind_name(FitSpec::Kind k) {
    switch (k) {
        case FitSpec::Kind::lr: return "lr";
        case FitSpec::Kind::knn: return "knn";
        case FitSpec::Kind::dtree: return "dtree";
        case FitSpec::Kind::rforest: return "rforest";
        case FitSpec::Kind::mlp: return "mlp";
    }
    return "?";
}

FitSpec::Kind kind_from_name(const std::string& name) {
    if (name == "lr") return FitSpec::Kind::lr;
    if (name == "knn") return FitSpec::Kind::knn;
    if (name == "dtree") return FitSpec::Kind::dtree;
    if (name == "rforest") return FitSpec::Kind::rforest;
    if (name == "mlp") return FitSpec::Kind::mlp;
    throw ConfigError("unknown model kind '" + name + "'");
}

namespace {

void check_xy(const FeatureMatrix& X, const std::vector<double>& y) {
    X.validate();
    if (X.rows() != y.size())
        throw ConfigError("fit: " + std::to_string(X.rows()) + " rows vs " +
                          std::to_string(y.size()) + " targets");
    if (X.rows() == 0) throw ConfigError("fit: empty training set");
    for (double v : y)
        if (!std::isfinite(v)) throw ConfigError("fit: non-finite target");
}

// Dense symmetric solve by Gaussian elimination with partial pivoting.
std::vector<double> gauss_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
        if (std::fabs(A[pivot][col]) < 1e-300)
            throw NumericError("linear solve: singular system");
        std::swap(A[col], A[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = A[r][col] / A[col][col];
            if (m == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r][c] -= m * A[col][c];
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= A[ri][c] * x[c];
        x[ri] = acc / A[ri][ri];
    }
    return x;
}

// --- linear regression ---

class LinearModel : public Regressor {
  public:
    explicit LinearModel(const FitSpec& spec) : spec_(spec) {}

    void fit(const FeatureMatrix& X, const std::vector<double>& y) override {
        check_xy(X, y);
        const std::size_t n = X.rows(), p = X.cols();
        names_ = X.feature_names;
        mean_.assign(p, 0.0);
        std_.assign(p, 0.0);
        kept_.clear();
        dropped_.clear();
        for (std::size_t j = 0; j < p; ++j) {
            double m = 0;
            for (std::size_t i = 0; i < n; ++i) m += X.x.at(i, j);
            m /= static_cast<double>(n);
            double v = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = X.x.at(i, j) - m;
                v += d * d;
            }
            v /= static_cast<double>(n);
            mean_[j] = m;
            std_[j] = std::sqrt(v);
            if (std_[j] > 1e-12)
                kept_.push_back(j);
            else
                dropped_.push_back(j);  // zero-variance feature carries no signal
        }

        const std::size_t q = kept_.size() + 1;  // intercept + kept features
        std::vector<std::vector<double>> G(q, std::vector<double>(q, 0.0));
        std::vector<double> rhs(q, 0.0);
        std::vector<double> z(q, 1.0);  // z[0] stays 1 (intercept column)
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t jj = 0; jj < kept_.size(); ++jj) {
                const std::size_t j = kept_[jj];
                z[jj + 1] = spec_.standardize ? (X.x.at(i, j) - mean_[j]) / std_[j]
                                              : X.x.at(i, j);
            }
            for (std::size_t a = 0; a < q; ++a) {
                rhs[a] += z[a] * y[i];
                for (std::size_t b = a; b < q; ++b) G[a][b] += z[a] * z[b];
            }
        }
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < a; ++b) G[a][b] = G[b][a];
        // Tiny ridge on the non-intercept diagonal keeps the solve
        // well-posed; effect is below reporting precision on sane inputs.
        for (std::size_t a = 1; a < q; ++a) G[a][a] += 1e-10;
        coef_ = gauss_solve(std::move(G), std::move(rhs));
    }

    std::vector<double> predict(const FeatureMatrix& X) const override {
        X.validate();
        if (X.cols() != mean_.size())
            throw ConfigError("lr predict: feature count mismatch");
        std::vector<double> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) {
            double acc = coef_[0];
            for (std::size_t jj = 0; jj < kept_.size(); ++jj) {
                const std::size_t j = kept_[jj];
                const double z = spec_.standardize ? (X.x.at(i, j) - mean_[j]) / std_[j]
                                                   : X.x.at(i, j);
                acc += coef_[jj + 1] * z;
            }
            out[i] = acc;
        }
        return out;
    }

    std::string dump() const override {
        std::string out = "reflectgan-model v1 lr\n";
        out += "features " + std::to_string(mean_.size()) + "\n";
        out += "dropped";
        for (std::size_t j : dropped_) out += " " + std::to_string(j);
        out += "\n";
        auto line = [&](const char* tag, const std::vector<double>& v) {
            out += tag;
            for (double x : v) out += " " + csv::fmt17(x);
            out += "\n";
        };
        line("mean", mean_);
        line("std", std_);
        line("coef", coef_);
        return out;
    }

    FitSpec::Kind kind() const override { return FitSpec::Kind::lr; }

  private:
    FitSpec spec_;
    std::vector<std::string> names_;
    std::vector<double> mean_, std_, coef_;
    std::vector<std::size_t> kept_, dropped_;
};

// --- k nearest neighbors ---

class KnnModel : public Regressor {
  public:
    explicit KnnModel(const FitSpec& spec) : k_(spec.k) {}

    void fit(const FeatureMatrix& X, const std::vector<double>& y) override {
        check_xy(X, y);
        if (k_ > X.rows())
            throw ConfigError("knn: k=" + std::to_string(k_) + " exceeds " +
                              std::to_string(X.rows()) + " training rows");
        train_ = X.x;
        y_ = y;
    }

    std::vector<double> predict(const FeatureMatrix& X) const override {
        X.validate();
        if (X.cols() != train_.cols) throw ConfigError("knn predict: feature count mismatch");
        std::vector<double> out(X.rows());
        std::vector<std::pair<double, std::size_t>> dist(train_.rows);
        for (std::size_t i = 0; i < X.rows(); ++i) {
            const double* q = X.x.row(i);
            for (std::size_t r = 0; r < train_.rows; ++r) {
                const double* t = train_.row(r);
                double d2 = 0;
                for (std::size_t c = 0; c < train_.cols; ++c) {
                    const double d = q[c] - t[c];
                    d2 += d * d;
                }
                dist[r] = {d2, r};  // equal distances favor the lower index
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_),
                              dist.end());
            double acc = 0;
            for (std::size_t j = 0; j < k_; ++j) acc += y_[dist[j].second];
            out[i] = acc / static_cast<double>(k_);
        }
        return out;
    }

    std::string dump() const override {
        std::string out = "reflectgan-model v1 knn\n";
        out += "k " + std::to_string(k_) + "\n";
        out += "rows " + std::to_string(train_.rows) + " cols " + std::to_string(train_.cols) +
               "\n";
        for (std::size_t r = 0; r < train_.rows; ++r) {
            for (std::size_t c = 0; c < train_.cols; ++c) {
                if (c) out += " ";
                out += csv::fmt17(train_.at(r, c));
            }
            out += " -> " + csv::fmt17(y_[r]) + "\n";
        }
        return out;
    }

    FitSpec::Kind kind() const override { return FitSpec::Kind::knn; }

  private:
    std::size_t k_;
    nn::Matrix train_;
    std::vector<double> y_;
};

// --- CART ---

struct TreeNode {
    bool is_leaf = true;
    double value = 0;       // leaf prediction
    std::size_t feature = 0;
    double threshold = 0;   // x <= threshold goes left
    std::size_t left = 0, right = 0;
};

struct CartParams {
    std::size_t max_depth = 0;  // 0 = unbounded
    std::size_t min_leaf = 1;
    std::size_t mtry = 0;  // 0 or >= cols: consider every feature
    Rng* rng = nullptr;    // required when subsampling features
};

class CartBuilder {
  public:
    CartBuilder(const nn::Matrix& X, const std::vector<double>& y, CartParams params)
        : X_(X), y_(y), p_(params) {}

    std::vector<TreeNode> build(std::vector<std::size_t> rows) {
        nodes_.clear();
        grow(std::move(rows), 1);
        return std::move(nodes_);
    }

  private:
    std::size_t grow(std::vector<std::size_t> rows, std::size_t depth) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();

        const double n = static_cast<double>(rows.size());
        double mean = 0;
        for (std::size_t r : rows) mean += y_[r];
        mean /= n;
        double sse = 0;
        for (std::size_t r : rows) {
            const double d = y_[r] - mean;
            sse += d * d;
        }
        nodes_[id].value = mean;

        const bool depth_ok = p_.max_depth == 0 || depth < p_.max_depth + 1;
        if (rows.size() < 2 * p_.min_leaf || rows.size() < 2 || sse <= 1e-12 || !depth_ok)
            return id;

        std::size_t best_feature = 0;
        double best_threshold = 0, best_gain = 0;
        bool found = false;

        for (std::size_t f : candidate_features()) {
            sorted_.clear();
            for (std::size_t r : rows) sorted_.emplace_back(X_.at(r, f), y_[r]);
            std::sort(sorted_.begin(), sorted_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double left_sum = 0, left_sq = 0;
            double total_sum = 0, total_sq = 0;
            for (const auto& [v, yy] : sorted_) {
                total_sum += yy;
                total_sq += yy * yy;
            }
            for (std::size_t i = 1; i < sorted_.size(); ++i) {
                left_sum += sorted_[i - 1].second;
                left_sq += sorted_[i - 1].second * sorted_[i - 1].second;
                if (sorted_[i].first <= sorted_[i - 1].first) continue;  // not distinct
                if (i < p_.min_leaf || sorted_.size() - i < p_.min_leaf) continue;
                const double nl = static_cast<double>(i);
                const double nr = static_cast<double>(sorted_.size() - i);
                const double right_sum = total_sum - left_sum;
                const double right_sq = total_sq - left_sq;
                const double sse_l = left_sq - left_sum * left_sum / nl;
                const double sse_r = right_sq - right_sum * right_sum / nr;
                const double gain = sse - sse_l - sse_r;
                // Strict > keeps the first candidate on ties: lowest feature
                // index first, then lowest threshold.
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = (sorted_[i - 1].first + sorted_[i].first) / 2.0;
                    found = true;
                }
            }
        }
        if (!found || best_gain <= 0) return id;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            if (X_.at(r, best_feature) <= best_threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        nodes_[id].is_leaf = false;
        nodes_[id].feature = best_feature;
        nodes_[id].threshold = best_threshold;
        const std::size_t l = grow(std::move(left_rows), depth + 1);
        nodes_[id].left = l;
        const std::size_t r = grow(std::move(right_rows), depth + 1);
        nodes_[id].right = r;
        return id;
    }

    std::vector<std::size_t> candidate_features() {
        const std::size_t cols = X_.cols;
        if (p_.mtry == 0 || p_.mtry >= cols) {
            std::vector<std::size_t> all(cols);
            std::iota(all.begin(), all.end(), std::size_t{0});
            return all;
        }
        // Partial Fisher-Yates draw of mtry distinct features, then sorted so
        // the tie rule (lowest feature first) is stable.
        std::vector<std::size_t> pool(cols);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < p_.mtry; ++i) {
            const std::size_t j = i + p_.rng->index(cols - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(p_.mtry);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    const nn::Matrix& X_;
    const std::vector<double>& y_;
    CartParams p_;
    std::vector<TreeNode> nodes_;
    std::vector<std::pair<double, double>> sorted_;
};

double tree_predict(const std::vector<TreeNode>& nodes, const double* row) {
    std::size_t id = 0;
    while (!nodes[id].is_leaf)
        id = row[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
    return nodes[id].value;
}

std::string tree_dump(const std::vector<TreeNode>& nodes, std::string& out) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& nd = nodes[i];
        if (nd.is_leaf)
            out += std::to_string(i) + " leaf " + csv::fmt17(nd.value) + "\n";
        else
            out += std::to_string(i) + " split " + std::to_string(nd.feature) + " " +
                   csv::fmt17(nd.threshold) + " " + std::to_string(nd.left) + " " +
                   std::to_string(nd.right) + "\n";
    }
    return out;
}

class DtreeModel : public Regressor {
  public:
    explicit DtreeModel(const FitSpec& spec) : spec_(spec) {}

    void fit(const FeatureMatrix& X, const std::vector<double>& y) override {
        check_xy(X, y);
        std::vector<std::size_t> rows(X.rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        CartBuilder builder(X.x, y, {spec_.max_depth, spec_.min_leaf, 0, nullptr});
        nodes_ = builder.build(std::move(rows));
        cols_ = X.cols();
    }

    std::vector<double> predict(const FeatureMatrix& X) const override {
        X.validate();
        if (X.cols() != cols_) throw ConfigError("dtree predict: feature count mismatch");
        std::vector<double> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) out[i] = tree_predict(nodes_, X.x.row(i));
        return out;
    }

    std::string dump() const override {
        std::string out = "reflectgan-model v1 dtree\n";
        out += "nodes " + std::to_string(nodes_.size()) + "\n";
        tree_dump(nodes_, out);
        return out;
    }

    FitSpec::Kind kind() const override { return FitSpec::Kind::dtree; }

  private:
    FitSpec spec_;
    std::vector<TreeNode> nodes_;
    std::size_t cols_ = 0;
};

// --- random forest ---

class ForestModel : public Regressor {
  public:
    explicit ForestModel(const FitSpec& spec) : spec_(spec) {}

    void fit(const FeatureMatrix& X, const std::vector<double>& y) override {
        check_xy(X, y);
        if (X.rows() < 2) throw ConfigError("rforest: need at least 2 rows");
        cols_ = X.cols();
        const std::size_t n = X.rows();
        const std::size_t mtry =
            spec_.mtry ? spec_.mtry : std::max<std::size_t>(1, cols_ / 3);
        trees_.clear();
        trees_.reserve(spec_.n_trees);
        for (std::size_t t = 0; t < spec_.n_trees; ++t) {
            Rng rng(spec_.seed + t);
            std::vector<std::size_t> rows;
            rows.reserve(n);
            if (spec_.bootstrap) {
                for (std::size_t i = 0; i < n; ++i) rows.push_back(rng.index(n));
            } else {
                rows.resize(n);
                std::iota(rows.begin(), rows.end(), std::size_t{0});
            }
            CartBuilder builder(X.x, y, {spec_.max_depth, spec_.min_leaf, mtry, &rng});
            trees_.push_back(builder.build(std::move(rows)));
        }
    }

    std::vector<double> predict(const FeatureMatrix& X) const override {
        X.validate();
        if (X.cols() != cols_) throw ConfigError("rforest predict: feature count mismatch");
        std::vector<double> out(X.rows(), 0.0);
        for (std::size_t i = 0; i < X.rows(); ++i) {
            double acc = 0;
            for (const auto& tree : trees_) acc += tree_predict(tree, X.x.row(i));
            out[i] = acc / static_cast<double>(trees_.size());
        }
        return out;
    }

    std::string dump() const override {
        std::string out = "reflectgan-model v1 rforest\n";
        out += "trees " + std::to_string(trees_.size()) + "\n";
        for (std::size_t t = 0; t < trees_.size(); ++t) {
            out += "tree " + std::to_string(t) + " nodes " + std::to_string(trees_[t].size()) +
                   "\n";
            tree_dump(trees_[t], out);
        }
        return out;
    }

    FitSpec::Kind kind() const override { return FitSpec::Kind::rforest; }

  private:
    FitSpec spec_;
    std::vector<std::vector<TreeNode>> trees_;
    std::size_t cols_ = 0;
};

// --- MLP ---

class MlpModel : public Regressor {
  public:
    explicit MlpModel(const FitSpec& spec) : spec_(spec) {}

    void fit(const FeatureMatrix& X, const std::vector<double>& y) override {
        check_xy(X, y);
        const std::size_t n = X.rows(), p = X.cols();
        cols_ = p;
        x_mean_.assign(p, 0.0);
        x_std_.assign(p, 1.0);
        y_mean_ = 0.0;
        y_std_ = 1.0;
        if (spec_.standardize) {
            for (std::size_t j = 0; j < p; ++j) {
                double m = 0;
                for (std::size_t i = 0; i < n; ++i) m += X.x.at(i, j);
                m /= static_cast<double>(n);
                double v = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = X.x.at(i, j) - m;
                    v += d * d;
                }
                x_mean_[j] = m;
                x_std_[j] = std::sqrt(v / static_cast<double>(n));
                if (x_std_[j] < 1e-12) x_std_[j] = 1.0;  // constant feature, leave centered
            }
            double m = 0;
            for (double v : y) m += v;
            m /= static_cast<double>(n);
            double vv = 0;
            for (double v : y) vv += (v - m) * (v - m);
            y_mean_ = m;
            y_std_ = std::sqrt(vv / static_cast<double>(n));
            if (y_std_ < 1e-12) y_std_ = 1.0;
        }

        init_rng_ = std::make_unique<Rng>(Rng::substream(spec_.seed, "mlp-init"));
        drop_rng_ = std::make_unique<Rng>(Rng::substream(spec_.seed, "mlp-dropout"));
        net_ = std::make_unique<nn::Sequential>();
        std::size_t cur = p;
        for (std::size_t h : spec_.hidden) {
            net_->emplace<nn::LinearLayer>(cur, h, nn::Init::kaiming_uniform, *init_rng_);
            net_->emplace<nn::ActivationLayer>(nn::Activation::relu);
            net_->emplace<nn::DropoutLayer>(spec_.dropout, *drop_rng_);
            cur = h;
        }
        net_->emplace<nn::LinearLayer>(cur, 1, nn::Init::xavier_uniform, *init_rng_);
        net_->set_mode(nn::Mode::training);

        nn::Adam adam(collect_params(), spec_.learning_rate);
        Rng shuffle_rng = Rng::substream(spec_.seed, "mlp-shuffle");
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});

        for (std::size_t epoch = 1; epoch <= spec_.epochs; ++epoch) {
            shuffle_rng.shuffle(order);
            for (std::size_t start = 0; start < n; start += spec_.batch_size) {
                const std::size_t bs = std::min(spec_.batch_size, n - start);
                nn::Matrix xb(bs, p), yb(bs, 1);
                for (std::size_t i = 0; i < bs; ++i) {
                    const std::size_t src = order[start + i];
                    for (std::size_t j = 0; j < p; ++j)
                        xb.at(i, j) = (X.x.at(src, j) - x_mean_[j]) / x_std_[j];
                    yb.at(i, 0) = (y[src] - y_mean_) / y_std_;
                }
                net_->zero_grads();
                nn::Matrix pred = net_->forward(xb);
                nn::LossResult loss = nn::mse_loss(pred, yb);
                if (!std::isfinite(loss.value))
                    throw NumericError("mlp: non-finite loss at epoch " + std::to_string(epoch) +
                                       ", batch " + std::to_string(start / spec_.batch_size));
                net_->backward(loss.grad);
                adam.step();
            }
        }
        net_->set_mode(nn::Mode::inference);
    }

    std::vector<double> predict(const FeatureMatrix& X) const override {
        X.validate();
        if (X.cols() != cols_) throw ConfigError("mlp predict: feature count mismatch");
        if (!net_) throw ConfigError("mlp predict: model not fitted");
        nn::Matrix xb(X.rows(), cols_);
        for (std::size_t i = 0; i < X.rows(); ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                xb.at(i, j) = (X.x.at(i, j) - x_mean_[j]) / x_std_[j];
        nn::Matrix pred = net_->forward(xb);
        std::vector<double> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) out[i] = pred.at(i, 0) * y_std_ + y_mean_;
        return out;
    }

    std::string dump() const override {
        std::string out = "reflectgan-model v1 mlp\n";
        out += "hidden";
        for (std::size_t h : spec_.hidden) out += " " + std::to_string(h);
        out += "\n";
        auto vec_line = [&](const char* tag, const std::vector<double>& v) {
            out += tag;
            for (double x : v) out += " " + csv::fmt17(x);
            out += "\n";
        };
        vec_line("x_mean", x_mean_);
        vec_line("x_std", x_std_);
        out += "y_mean " + csv::fmt17(y_mean_) + "\ny_std " + csv::fmt17(y_std_) + "\n";
        if (net_)
            for (const auto& l : net_->layers)
                if (auto* lin = dynamic_cast<nn::LinearLayer*>(l.get())) {
                    out += "linear " + std::to_string(lin->out_dim()) + " " +
                           std::to_string(lin->in_dim()) + "\n";
                    vec_line("w", lin->weight.data);
                    vec_line("b", lin->bias);
                }
        return out;
    }

    FitSpec::Kind kind() const override { return FitSpec::Kind::mlp; }

  private:
    std::vector<nn::ParamRef> collect_params() {
        std::vector<nn::ParamRef> out;
        net_->collect_params(out);
        return out;
    }

    FitSpec spec_;
    std::size_t cols_ = 0;
    std::vector<double> x_mean_, x_std_;
    double y_mean_ = 0, y_std_ = 1;
    std::unique_ptr<Rng> init_rng_, drop_rng_;
    mutable std::unique_ptr<nn::Sequential> net_;  // forward caches mutate
};

}  // namespace

std::unique_ptr<Regressor> make_regressor(const FitSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case FitSpec::Kind::lr: return std::make_unique<LinearModel>(spec);
        case FitSpec::Kind::knn: return std::make_unique<KnnModel>(spec);
        case FitSpec::Kind::dtree: return std::make_unique<DtreeModel>(spec);
        case FitSpec::Kind::rforest: return std::make_unique<ForestModel>(spec);
        case FitSpec::Kind::mlp: return std::make_unique<MlpModel>(spec);
    }
    throw ConfigError("unknown model kind");
}

}  // namespace rg::soc
