#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "roofsim/rng.hpp"

namespace roofsim {

struct LogNormal {
    double mu_log = 0.0;
    double sigma_log = 1.0;
};

struct Beta {
    double a = 1.0;
    double b = 1.0;
};

struct Categorical {
    std::vector<std::string> labels;
    std::vector<double> probs;
};

/// Size `r` and mean `mean`; variance is mean + mean^2 / r.
struct NegBinomial {
    double r = 1.0;
    double mean = 1.0;
};

struct GammaShapeScale {
    double k = 1.0;
    double theta = 1.0;
};

struct Normal {
    double mu = 0.0;
    double sigma = 1.0;
};

/// Credit-score law: pick a bucket by `bucket_probs`, then an integer
/// uniformly within the inclusive bounds of that bucket.
struct FicoBuckets {
    std::vector<std::pair<int, int>> bucket_bounds;
    std::vector<double> bucket_probs;

    static FicoBuckets defaults();
};

using DistributionParams = std::variant<LogNormal, Beta, Categorical, NegBinomial, GammaShapeScale, Normal, FicoBuckets>;

/// Throws ParameterError when the parameters violate the family's constraints.
void validate(const DistributionParams& params);
std::string describe(const DistributionParams& params);

/// Draws `n` values from the stream named by `seed`. Categorical draws are
/// returned as label indices.
std::vector<double> sample(const DistributionParams& params, const SeedSpec& seed, std::int64_t n);

// Single-draw primitives. They do not validate; callers validate once up front.
double draw_normal(Rng& rng, double mu, double sigma);
double draw_lognormal(Rng& rng, double mu_log, double sigma_log);
double draw_gamma(Rng& rng, double k, double theta);
double draw_beta(Rng& rng, double a, double b);
std::uint64_t draw_poisson(Rng& rng, double mean);
std::uint64_t draw_negbinomial(Rng& rng, double r, double mean);
std::size_t draw_categorical(Rng& rng, const std::vector<double>& probs);
int draw_fico(Rng& rng, const FicoBuckets& buckets);

/// One negative-binomial draw as Poisson(Gamma(shape = r, scale = mean / r)),
/// with parameter checks. mean == 0 returns 0.
std::uint64_t negbinomial_via_gamma_poisson(double r, double mean, const SeedSpec& seed);

}  // namespace roofsim
