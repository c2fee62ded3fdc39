#include <cmath>
#include <limits>

#include "roofsim/error.hpp"
#include "roofsim/roof_channel.hpp"

namespace roofsim {

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
    double d = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double diff = a[j] - b[j];
        d += diff * diff;
    }
    return d;
}

std::vector<double> kmeanspp_centers(std::span<const double> points, std::size_t n, std::size_t dim, std::size_t k,
                                     Rng& rng) {
    std::vector<double> centers;
    centers.reserve(k * dim);
    std::vector<double> mindist(n, std::numeric_limits<double>::infinity());

    std::size_t chosen = rng.below(n);
    for (std::size_t c = 0; c < k; ++c) {
        centers.insert(centers.end(), points.begin() + static_cast<std::ptrdiff_t>(chosen * dim),
                       points.begin() + static_cast<std::ptrdiff_t>((chosen + 1) * dim));
        if (c + 1 == k) {
            break;
        }
        const double* last = centers.data() + c * dim;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mindist[i] = std::min(mindist[i], squared_distance(points.data() + i * dim, last, dim));
            total += mindist[i];
        }
        if (total <= 0.0) {
            // Every point coincides with a chosen center; fall back to uniform picks.
            chosen = rng.below(n);
            continue;
        }
        const double target = rng.uniform() * total;
        double cumulative = 0.0;
        chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            cumulative += mindist[i];
            if (target < cumulative && mindist[i] > 0.0) {
                chosen = i;
                break;
            }
        }
    }
    return centers;
}

}  // namespace

KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k, std::uint64_t seed,
                    int max_iterations, double tolerance) {
    if (dim == 0 || points.size() % dim != 0) {
        throw UsageError("kmeans: point buffer is not a multiple of the dimension");
    }
    const std::size_t n = points.size() / dim;
    if (k == 0 || n < k) {
        throw UsageError("kmeans: " + std::to_string(n) + " points for " + std::to_string(k) + " clusters");
    }
    Rng rng(seed, "kmeans");
    KMeansResult result;
    result.centers = kmeanspp_centers(points, n, dim, k, rng);
    result.assignments.assign(n, 0);

    std::vector<double> sums(k * dim);
    std::vector<std::size_t> counts(k);
    for (int iter = 1; iter <= max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = squared_distance(points.data() + i * dim, result.centers.data() + c * dim, dim);
                if (d < best) {
                    best = d;
                    best_c = static_cast<int>(c);
                }
            }
            result.assignments[i] = best_c;
        }

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(result.assignments[i]);
            ++counts[c];
            for (std::size_t j = 0; j < dim; ++j) {
                sums[c * dim + j] += points[i * dim + j];
            }
        }
        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                continue;  // empty cluster keeps its center
            }
            double moved = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double updated = sums[c * dim + j] / static_cast<double>(counts[c]);
                const double diff = updated - result.centers[c * dim + j];
                moved += diff * diff;
                result.centers[c * dim + j] = updated;
            }
            movement += std::sqrt(moved);
        }
        result.iterations = iter;
        if (movement < tolerance) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace roofsim
