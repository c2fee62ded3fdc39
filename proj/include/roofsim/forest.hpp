#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace roofsim {

/// Row-major numeric design matrix with column names and row ids.
struct FeatureMatrix {
    std::vector<std::string> columns;
    std::vector<std::string> policy_ids;
    std::vector<double> values;  // rows x cols
    std::vector<double> target;  // empty when unlabeled

    std::size_t rows() const noexcept { return policy_ids.size(); }
    std::size_t cols() const noexcept { return columns.size(); }
    double at(std::size_t row, std::size_t col) const { return values[row * columns.size() + col]; }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * columns.size(), columns.size()};
    }
};

struct ForestParams {
    std::size_t n_trees = 300;
    std::optional<std::size_t> max_depth;  // unlimited when empty
    std::size_t min_leaf = 5;
    std::optional<std::size_t> mtry;       // ceil(p / 3) when empty
    bool bootstrap = true;
    std::uint64_t seed = 0;
    /// Fit on log1p(target) and back-transform predictions with expm1.
    bool log_target = false;

    std::size_t resolved_mtry(std::size_t p) const;
    void validate(std::size_t p) const;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    std::size_t samples = 0;
};

/// CART regression tree; rows with x <= threshold go left.
struct RegressionTree {
    std::vector<TreeNode> nodes;
    double predict(std::span<const double> row) const;
};

struct ForestModel {
    std::vector<std::string> columns;
    std::vector<RegressionTree> trees;
    bool log_target = false;

    nlohmann::ordered_json to_json() const;
};

/// Trains n_trees trees, tree t drawing its bootstrap sample and candidate
/// columns from stream "tree:<t>". Splits maximize the reduction in the sum of
/// squared errors; ties keep the lowest column, then the lowest threshold.
ForestModel fit_forest(const FeatureMatrix& train, const ForestParams& params, std::size_t threads = 0);

/// Mean of the tree predictions. Throws UsageError if the columns differ from training.
std::vector<double> predict_forest(const ForestModel& model, const FeatureMatrix& features, std::size_t threads = 0);

}  // namespace roofsim
