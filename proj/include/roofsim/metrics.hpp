#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "roofsim/policy.hpp"

namespace roofsim {

/// How pairs with equal predictions are ordered before accumulating losses.
enum class TiePolicy {
    index,    // stable: ascending original position
    average,  // mean of the best-case and worst-case orderings within ties
};

std::string_view to_string(TiePolicy policy) noexcept;
TiePolicy tie_policy_from_string(std::string_view text);

struct GiniResult {
    double raw = 0.0;
    double perfect_raw = 0.0;
    double normalized = 0.0;
    std::size_t n = 0;
    TiePolicy tie_policy = TiePolicy::index;
};

/// Sort by descending prediction, accumulate C_k, return
/// (1/n) * sum_k C_k / Y - (n + 1) / (2n).
double raw_gini(std::span<const double> y, std::span<const double> y_hat, TiePolicy tie_policy = TiePolicy::index);

/// raw_gini(y, y_hat) / raw_gini(y, y). Throws UndefinedMetricError when y is
/// constant or sums to zero.
GiniResult normalized_gini(std::span<const double> y, std::span<const double> y_hat,
                           TiePolicy tie_policy = TiePolicy::index);

enum class CorrelationKind { pearson, spearman };

std::string_view to_string(CorrelationKind kind) noexcept;
CorrelationKind correlation_kind_from_string(std::string_view text);

/// Pearson correlation; throws UndefinedMetricError if either side is constant.
double pearson_correlation(std::span<const double> a, std::span<const double> b);
double spearman_correlation(std::span<const double> a, std::span<const double> b);

/// Correlation of the ordinal codes 0/1/2.
double ordinal_correlation(std::span<const RoofHealth> labels_a, std::span<const RoofHealth> labels_b,
                           CorrelationKind kind = CorrelationKind::pearson);

}  // namespace roofsim
