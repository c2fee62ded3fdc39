#include "roofsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "roofsim/error.hpp"

namespace roofsim {

std::string_view to_string(TiePolicy policy) noexcept { return policy == TiePolicy::index ? "index" : "average"; }

TiePolicy tie_policy_from_string(std::string_view text) {
    if (text == "index") {
        return TiePolicy::index;
    }
    if (text == "average") {
        return TiePolicy::average;
    }
    throw ConfigError("unknown tie policy '" + std::string(text) + "'");
}

std::string_view to_string(CorrelationKind kind) noexcept {
    return kind == CorrelationKind::pearson ? "pearson" : "spearman";
}

CorrelationKind correlation_kind_from_string(std::string_view text) {
    if (text == "pearson") {
        return CorrelationKind::pearson;
    }
    if (text == "spearman") {
        return CorrelationKind::spearman;
    }
    throw ConfigError("unknown correlation kind '" + std::string(text) + "'");
}

namespace {

void check_inputs(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size()) {
        throw UsageError("gini: y has " + std::to_string(y.size()) + " entries, y_hat has " +
                         std::to_string(y_hat.size()));
    }
    if (y.empty()) {
        throw UsageError("gini: empty input");
    }
    double total = 0.0;
    for (double v : y) {
        if (!std::isfinite(v) || v < 0.0) {
            throw UsageError("gini: y must be finite and nonnegative");
        }
        total += v;
    }
    for (double v : y_hat) {
        if (std::isnan(v)) {
            throw UsageError("gini: y_hat contains NaN");
        }
    }
    if (!(total > 0.0)) {
        throw UndefinedMetricError("gini: sum of y is zero");
    }
}

// Gini of y accumulated in the given order.
double gini_of_order(std::span<const double> y, const std::vector<std::size_t>& order) {
    const double n = static_cast<double>(y.size());
    const double total = std::accumulate(y.begin(), y.end(), 0.0);
    double cumulative = 0.0;
    double sum_of_shares = 0.0;
    for (std::size_t idx : order) {
        cumulative += y[idx];
        sum_of_shares += cumulative / total;
    }
    return sum_of_shares / n - (n + 1.0) / (2.0 * n);
}

// Descending by prediction; `tie_y` = +1 puts larger y first within ties,
// -1 smaller y first, 0 keeps the original positions.
std::vector<std::size_t> descending_order(std::span<const double> y, std::span<const double> y_hat, int tie_y) {
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (y_hat[a] != y_hat[b]) {
            return y_hat[a] > y_hat[b];
        }
        if (tie_y > 0) {
            return y[a] > y[b];
        }
        if (tie_y < 0) {
            return y[a] < y[b];
        }
        return false;
    });
    return order;
}

double raw_gini_unchecked(std::span<const double> y, std::span<const double> y_hat, TiePolicy tie_policy) {
    if (tie_policy == TiePolicy::index) {
        return gini_of_order(y, descending_order(y, y_hat, 0));
    }
    return 0.5 * (gini_of_order(y, descending_order(y, y_hat, +1)) + gini_of_order(y, descending_order(y, y_hat, -1)));
}

}  // namespace

double raw_gini(std::span<const double> y, std::span<const double> y_hat, TiePolicy tie_policy) {
    check_inputs(y, y_hat);
    return raw_gini_unchecked(y, y_hat, tie_policy);
}

GiniResult normalized_gini(std::span<const double> y, std::span<const double> y_hat, TiePolicy tie_policy) {
    check_inputs(y, y_hat);
    if (std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) {
        throw UndefinedMetricError("gini: y is constant, perfect Gini is zero");
    }
    GiniResult result;
    result.n = y.size();
    result.tie_policy = tie_policy;
    result.raw = raw_gini_unchecked(y, y_hat, tie_policy);
    // Equal y values give the same C_k in any order.
    result.perfect_raw = raw_gini_unchecked(y, y, TiePolicy::index);
    result.normalized = result.raw / result.perfect_raw;
    return result;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw UsageError("correlation: length mismatch");
    }
    if (a.size() < 2) {
        throw UndefinedMetricError("correlation: need at least two observations");
    }
    const double n = static_cast<double>(a.size());
    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double saa = 0.0;
    double sbb = 0.0;
    double sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw UndefinedMetricError("correlation: constant vector");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson_correlation(ra, rb);
}

double ordinal_correlation(std::span<const RoofHealth> labels_a, std::span<const RoofHealth> labels_b,
                           CorrelationKind kind) {
    if (labels_a.size() != labels_b.size()) {
        throw UsageError("ordinal_correlation: length mismatch");
    }
    std::vector<double> a(labels_a.size());
    std::vector<double> b(labels_b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = ordinal(labels_a[i]);
        b[i] = ordinal(labels_b[i]);
    }
    return kind == CorrelationKind::pearson ? pearson_correlation(a, b) : spearman_correlation(a, b);
}

}  // namespace roofsim
