// Hot kernel: compiled with -O3 -fno-math-errno so both loops vectorize.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>

#include "villebet/mixture.hpp"

namespace villebet {

namespace {

// exp(x) for x <= 0, relative error ~2e-16. Returns exactly 0 below -708,
// where a term cannot change a sum that contains exp(0) = 1.
inline double exp_nonpositive(double x) {
    const bool underflow = x < -708.0;
    x = underflow ? -708.0 : x;
    // Round to nearest with the 1.5 * 2^52 shifter; stays branch-free so the loop vectorizes.
    constexpr double kShifter = 6755399441055744.0;
    const double shifted = x * 1.4426950408889634 + kShifter;
    const double k = shifted - kShifter;
    const double r = (x - k * 0.6931471805599453) - k * 2.3190468138462996e-17;
    double p = 1.0 / 6227020800.0;
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    // The low bits of `shifted` hold k >= -1022, so k + 1023 is a valid biased exponent.
    const double scale = std::bit_cast<double>((std::bit_cast<std::uint64_t>(shifted) + 1023) << 52);
    const double out = p * scale;
    return underflow ? 0.0 : out;
}

}  // namespace

LogWealth log_sum_exp(std::span<const double> a, std::span<const double> b) {
    const std::size_t size = a.size();
    const double* pa = a.data();
    const double* pb = b.data();
    constexpr std::size_t kLanes = 8;
    double lane_peak[kLanes];
    for (double& p : lane_peak) p = kMinusInf;
    std::size_t m = 0;
    for (; m + kLanes <= size; m += kLanes) {
        for (std::size_t j = 0; j < kLanes; ++j) {
            const double v = pa[m + j] + pb[m + j];
            lane_peak[j] = v > lane_peak[j] ? v : lane_peak[j];
        }
    }
    double peak = kMinusInf;
    for (; m < size; ++m) {
        const double v = pa[m] + pb[m];
        peak = v > peak ? v : peak;
    }
    for (double p : lane_peak) peak = p > peak ? p : peak;
    if (peak == kMinusInf) {
        return kMinusInf;
    }
    double partial[kLanes] = {};
    std::size_t k = 0;
    for (; k + kLanes <= size; k += kLanes) {
        for (std::size_t j = 0; j < kLanes; ++j) {
            partial[j] += exp_nonpositive(pa[k + j] + pb[k + j] - peak);
        }
    }
    double total = 0.0;
    for (; k < size; ++k) {
        total += exp_nonpositive(pa[k] + pb[k] - peak);
    }
    for (double p : partial) {
        total += p;
    }
    return peak + std::log(total);
}

LogWealth log_add_exp(LogWealth a, LogWealth b) noexcept {
    const double hi = a > b ? a : b;
    if (hi == kMinusInf) {
        return kMinusInf;
    }
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace villebet
