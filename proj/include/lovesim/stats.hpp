#pragma once

#include <cstdint>
#include <span>

namespace lovesim {

inline constexpr std::size_t kExactPermutationMaxFolds = 12;
inline constexpr std::size_t kPermutationResamples = 100000;
inline constexpr double kSignificanceLevel = 0.05;

// Two-sided paired permutation (sign-flip) test on fold-wise differences
// a[i] - b[i]. Enumerates all 2^n sign patterns when n <= 12, otherwise draws
// 100000 seeded patterns and returns (hits + 1) / (draws + 1). All-zero
// differences give 1.
double paired_permutation_test(std::span<const double> a, std::span<const double> b,
                               std::uint64_t seed = 0);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Two-sided Welch's unequal-variance t-test.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Two-sided exact binomial test of `wins` successes out of n against p = 0.5:
// 2 * min(P(X <= wins), P(X >= wins)), capped at 1.
double binomial_significance(std::size_t wins, std::size_t n);

}  // namespace lovesim
