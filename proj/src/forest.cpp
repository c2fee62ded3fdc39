#include "roofsim/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "roofsim/error.hpp"
#include "roofsim/parallel.hpp"
#include "roofsim/rng.hpp"

namespace roofsim {

std::size_t ForestParams::resolved_mtry(std::size_t p) const { return mtry ? *mtry : (p + 2) / 3; }

void ForestParams::validate(std::size_t p) const {
    if (n_trees < 1) {
        throw ParameterError("n_trees must be at least 1");
    }
    if (min_leaf < 1) {
        throw ParameterError("min_leaf must be at least 1");
    }
    const auto m = resolved_mtry(p);
    if (m < 1 || m > p) {
        throw ParameterError("mtry must lie in [1, " + std::to_string(p) + "]");
    }
}

double RegressionTree::predict(std::span<const double> row) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& n = nodes[static_cast<std::size_t>(node)];
        node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

namespace {

struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t left_count = 0;
};

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& data, std::span<const double> target, const ForestParams& params, Rng& rng)
        : data_(data), target_(target), params_(params), rng_(rng), mtry_(params.resolved_mtry(data.cols())) {}

    RegressionTree build(std::vector<std::size_t> rows) {
        RegressionTree tree;
        nodes_ = &tree.nodes;
        grow(rows, 0, rows.size(), 0);
        return tree;
    }

private:
    int grow(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end, std::size_t depth) {
        const auto index = static_cast<int>(nodes_->size());
        nodes_->emplace_back();
        const std::size_t n = end - begin;
        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = begin; i < end; ++i) {
            const double y = target_[rows[i]];
            sum += y;
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        (*nodes_)[static_cast<std::size_t>(index)].value = sum / static_cast<double>(n);
        (*nodes_)[static_cast<std::size_t>(index)].samples = n;

        const bool depth_capped = params_.max_depth && depth >= *params_.max_depth;
        if (depth_capped || n < 2 * params_.min_leaf || lo == hi) {
            return index;
        }
        const Split split = best_split(rows, begin, end, sum);
        if (!split.found) {
            return index;
        }
        const auto feature = static_cast<std::size_t>(split.feature);
        const auto middle = std::stable_partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                                  rows.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
                                                      return data_.at(r, feature) <= split.threshold;
                                                  }) -
                            rows.begin();
        const int left = grow(rows, begin, static_cast<std::size_t>(middle), depth + 1);
        const int right = grow(rows, static_cast<std::size_t>(middle), end, depth + 1);
        auto& node = (*nodes_)[static_cast<std::size_t>(index)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return index;
    }

    std::vector<std::size_t> candidate_columns() {
        std::vector<std::size_t> columns(data_.cols());
        std::iota(columns.begin(), columns.end(), std::size_t{0});
        for (std::size_t i = 0; i < mtry_; ++i) {
            std::swap(columns[i], columns[i + rng_.below(columns.size() - i)]);
        }
        columns.resize(mtry_);
        std::sort(columns.begin(), columns.end());
        return columns;
    }

    Split best_split(const std::vector<std::size_t>& rows, std::size_t begin, std::size_t end, double sum) {
        const std::size_t n = end - begin;
        const double parent_score = sum * sum / static_cast<double>(n);
        Split best;
        std::vector<std::size_t> order(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                       rows.begin() + static_cast<std::ptrdiff_t>(end));
        for (std::size_t feature : candidate_columns()) {
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return data_.at(a, feature) < data_.at(b, feature); });
            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_sum += target_[order[i]];
                const std::size_t left_count = i + 1;
                const double x = data_.at(order[i], feature);
                const double x_next = data_.at(order[i + 1], feature);
                if (x == x_next || left_count < params_.min_leaf || n - left_count < params_.min_leaf) {
                    continue;
                }
                const double right_sum = sum - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(left_count) +
                                    right_sum * right_sum / static_cast<double>(n - left_count) - parent_score;
                // Strict comparison keeps the earliest column and the lowest threshold on ties.
                if (gain > 0.0 && (!best.found || gain > best.gain)) {
                    best.found = true;
                    best.feature = static_cast<int>(feature);
                    best.threshold = x + 0.5 * (x_next - x);
                    if (!(best.threshold < x_next)) {
                        best.threshold = x;
                    }
                    best.gain = gain;
                    best.left_count = left_count;
                }
            }
        }
        return best;
    }

    const FeatureMatrix& data_;
    std::span<const double> target_;
    const ForestParams& params_;
    Rng& rng_;
    std::size_t mtry_;
    std::vector<TreeNode>* nodes_ = nullptr;
};

}  // namespace

ForestModel fit_forest(const FeatureMatrix& train, const ForestParams& params, std::size_t threads) {
    if (train.cols() == 0) {
        throw UsageError("fit_forest: no feature columns");
    }
    if (train.target.size() != train.rows()) {
        throw UsageError("fit_forest: target length does not match rows");
    }
    params.validate(train.cols());
    if (train.rows() < 2 * params.min_leaf) {
        throw UsageError("fit_forest: need at least 2 * min_leaf training rows");
    }
    std::vector<double> target = train.target;
    for (double& y : target) {
        if (!(y >= 0.0) || !std::isfinite(y)) {
            throw UsageError("fit_forest: target must be finite and nonnegative");
        }
        if (params.log_target) {
            y = std::log1p(y);
        }
    }

    ForestModel model;
    model.columns = train.columns;
    model.log_target = params.log_target;
    model.trees.resize(params.n_trees);
    const std::size_t n = train.rows();
    parallel_for(
        params.n_trees,
        [&](std::size_t t) {
            Rng rng(params.seed, "tree:" + std::to_string(t));
            std::vector<std::size_t> rows(n);
            if (params.bootstrap) {
                for (auto& r : rows) {
                    r = rng.below(n);
                }
            } else {
                std::iota(rows.begin(), rows.end(), std::size_t{0});
            }
            TreeBuilder builder(train, target, params, rng);
            model.trees[t] = builder.build(std::move(rows));
        },
        threads);
    return model;
}

std::vector<double> predict_forest(const ForestModel& model, const FeatureMatrix& features, std::size_t threads) {
    if (features.columns != model.columns) {
        throw UsageError("predict_forest: feature columns do not match the trained model");
    }
    std::vector<double> out(features.rows());
    parallel_for(
        features.rows(),
        [&](std::size_t r) {
            const auto row = features.row(r);
            double total = 0.0;
            for (const auto& tree : model.trees) {
                total += tree.predict(row);
            }
            const double mean = total / static_cast<double>(model.trees.size());
            out[r] = model.log_target ? std::expm1(mean) : mean;
        },
        threads);
    return out;
}

nlohmann::ordered_json ForestModel::to_json() const {
    nlohmann::ordered_json j;
    j["columns"] = columns;
    j["log_target"] = log_target;
    auto& trees_json = j["trees"] = nlohmann::ordered_json::array();
    for (const auto& tree : trees) {
        auto nodes = nlohmann::ordered_json::array();
        for (const auto& node : tree.nodes) {
            nlohmann::ordered_json nj;
            if (node.feature >= 0) {
                nj["feature"] = columns[static_cast<std::size_t>(node.feature)];
                nj["threshold"] = node.threshold;
                nj["left"] = node.left;
                nj["right"] = node.right;
            } else {
                nj["value"] = node.value;
            }
            nj["samples"] = node.samples;
            nodes.push_back(std::move(nj));
        }
        trees_json.push_back(std::move(nodes));
    }
    return j;
}

}  // namespace roofsim
