#include "roofsim/distributions.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "roofsim/error.hpp"

namespace roofsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_probs(const std::vector<double>& probs, const char* what) {
    if (probs.empty()) {
        throw ParameterError(std::string(what) + ": probability list is empty");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ParameterError(std::string(what) + ": probabilities must be finite and nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": probabilities sum to " << total << ", expected 1";
        throw ParameterError(os.str());
    }
}

void check_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ParameterError(std::string(what) + " must be finite and strictly positive");
    }
}

void check_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw ParameterError(std::string(what) + " must be finite");
    }
}

// Transformed rejection with squeeze (Hormann 1993), for mean >= 10.
std::uint64_t poisson_ptrs(Rng& rng, double lam) {
    const double slam = std::sqrt(lam);
    const double loglam = std::log(lam);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform_open();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lam + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <= -lam + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

}  // namespace

FicoBuckets FicoBuckets::defaults() {
    return FicoBuckets{
        {{300, 579}, {580, 669}, {670, 739}, {740, 799}, {800, 850}},
        {0.16, 0.17, 0.21, 0.25, 0.21},
    };
}

void validate(const DistributionParams& params) {
    std::visit(overloaded{
                   [](const LogNormal& p) {
                       check_finite(p.mu_log, "LogNormal mu_log");
                       check_positive(p.sigma_log, "LogNormal sigma_log");
                   },
                   [](const Beta& p) {
                       check_positive(p.a, "Beta a");
                       check_positive(p.b, "Beta b");
                   },
                   [](const Categorical& p) {
                       if (p.labels.size() != p.probs.size()) {
                           throw ParameterError("Categorical: labels and probs differ in length");
                       }
                       check_probs(p.probs, "Categorical");
                   },
                   [](const NegBinomial& p) {
                       check_positive(p.r, "NegBinomial r");
                       check_positive(p.mean, "NegBinomial mean");
                   },
                   [](const GammaShapeScale& p) {
                       check_positive(p.k, "Gamma k");
                       check_positive(p.theta, "Gamma theta");
                   },
                   [](const Normal& p) {
                       check_finite(p.mu, "Normal mu");
                       if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) {
                           throw ParameterError("Normal sigma must be finite and nonnegative");
                       }
                   },
                   [](const FicoBuckets& p) {
                       if (p.bucket_bounds.size() != p.bucket_probs.size()) {
                           throw ParameterError("FicoBuckets: bounds and probs differ in length");
                       }
                       check_probs(p.bucket_probs, "FicoBuckets");
                       int previous_high = 299;
                       for (auto [lo, hi] : p.bucket_bounds) {
                           if (lo < 300 || hi > 850 || lo > hi) {
                               throw ParameterError("FicoBuckets: bucket outside [300, 850] or inverted");
                           }
                           if (lo <= previous_high) {
                               throw ParameterError("FicoBuckets: buckets must be disjoint and ascending");
                           }
                           previous_high = hi;
                       }
                   },
               },
               params);
}

std::string describe(const DistributionParams& params) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const LogNormal& p) { os << "LogNormal(" << p.mu_log << ", " << p.sigma_log << ")"; },
                   [&](const Beta& p) { os << "Beta(" << p.a << ", " << p.b << ")"; },
                   [&](const Categorical& p) { os << "Categorical(" << p.labels.size() << " labels)"; },
                   [&](const NegBinomial& p) { os << "NegBinomial(r=" << p.r << ", mean=" << p.mean << ")"; },
                   [&](const GammaShapeScale& p) { os << "Gamma(k=" << p.k << ", theta=" << p.theta << ")"; },
                   [&](const Normal& p) { os << "Normal(" << p.mu << ", " << p.sigma << ")"; },
                   [&](const FicoBuckets& p) { os << "FicoBuckets(" << p.bucket_bounds.size() << " buckets)"; },
               },
               params);
    return os.str();
}

double draw_normal(Rng& rng, double mu, double sigma) {
    if (sigma == 0.0) {
        return mu;
    }
    // Marsaglia polar method; the second variate is discarded so each draw
    // consumes a self-contained run of the stream.
    for (;;) {
        const double u = 2.0 * rng.uniform() - 1.0;
        const double v = 2.0 * rng.uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return mu + sigma * u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

double draw_lognormal(Rng& rng, double mu_log, double sigma_log) {
    return std::exp(draw_normal(rng, mu_log, sigma_log));
}

double draw_gamma(Rng& rng, double k, double theta) {
    if (k < 1.0) {
        // Boost: Gamma(k) = Gamma(k + 1) * U^(1/k).
        const double g = draw_gamma(rng, k + 1.0, 1.0);
        return theta * g * std::pow(rng.uniform_open(), 1.0 / k);
    }
    // Marsaglia & Tsang (2000).
    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = draw_normal(rng, 0.0, 1.0);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return theta * d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return theta * d * v;
        }
    }
}

double draw_beta(Rng& rng, double a, double b) {
    const double x = draw_gamma(rng, a, 1.0);
    const double y = draw_gamma(rng, b, 1.0);
    return x / (x + y);
}

std::uint64_t draw_poisson(Rng& rng, double mean) {
    if (mean <= 0.0) {
        return 0;
    }
    if (mean >= 10.0) {
        return poisson_ptrs(rng, mean);
    }
    // Multiplication of uniforms (Knuth).
    const double limit = std::exp(-mean);
    double product = rng.uniform_open();
    std::uint64_t count = 0;
    while (product > limit) {
        ++count;
        product *= rng.uniform_open();
    }
    return count;
}

std::uint64_t draw_negbinomial(Rng& rng, double r, double mean) {
    if (mean <= 0.0) {
        return 0;
    }
    return draw_poisson(rng, draw_gamma(rng, r, mean / r));
}

std::size_t draw_categorical(Rng& rng, const std::vector<double>& probs) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) {
            return i;
        }
    }
    // Rounding left u above the final partial sum: return the last positive-mass label.
    for (std::size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0.0) {
            return i;
        }
    }
    return probs.size() - 1;
}

int draw_fico(Rng& rng, const FicoBuckets& buckets) {
    const auto& [lo, hi] = buckets.bucket_bounds[draw_categorical(rng, buckets.bucket_probs)];
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

std::vector<double> sample(const DistributionParams& params, const SeedSpec& seed, std::int64_t n) {
    if (n < 0) {
        throw UsageError("sample count must be nonnegative, got " + std::to_string(n));
    }
    validate(params);
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        out.push_back(std::visit(
            overloaded{
                [&](const LogNormal& p) { return draw_lognormal(rng, p.mu_log, p.sigma_log); },
                [&](const Beta& p) { return draw_beta(rng, p.a, p.b); },
                [&](const Categorical& p) { return static_cast<double>(draw_categorical(rng, p.probs)); },
                [&](const NegBinomial& p) { return static_cast<double>(draw_negbinomial(rng, p.r, p.mean)); },
                [&](const GammaShapeScale& p) { return draw_gamma(rng, p.k, p.theta); },
                [&](const Normal& p) { return draw_normal(rng, p.mu, p.sigma); },
                [&](const FicoBuckets& p) { return static_cast<double>(draw_fico(rng, p)); },
            },
            params));
    }
    return out;
}

std::uint64_t negbinomial_via_gamma_poisson(double r, double mean, const SeedSpec& seed) {
    check_positive(r, "NegBinomial r");
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw ParameterError("NegBinomial mean must be finite and nonnegative");
    }
    Rng rng(seed);
    return draw_negbinomial(rng, r, mean);
}

}  // namespace roofsim
