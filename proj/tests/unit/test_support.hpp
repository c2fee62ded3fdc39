#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace roofsim::testing {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double mean_se = 0.0;
    double variance_se = 0.0;  // sqrt((m4 - s^4) / n), plug-in
};

inline Moments moments(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    Moments m;
    m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double d = v - m.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m.variance = m2 / (n - 1.0);
    m4 /= n;
    m.mean_se = std::sqrt(m.variance / n);
    m.variance_se = std::sqrt(std::max(0.0, m4 - (m2 / n) * (m2 / n)) / n);
    return m;
}

/// Two-pass Pearson correlation kept independent of the library implementation.
inline double reference_pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    const char* base = std::getenv("ROOFSIM_TEST_TMP");
    auto dir = std::filesystem::path(base ? base : std::filesystem::temp_directory_path().string()) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace roofsim::testing
