#include "lovesim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "lovesim/error.hpp"
#include "lovesim/rng.hpp"

namespace lovesim {

double paired_permutation_test(std::span<const double> a, std::span<const double> b,
                               std::uint64_t seed) {
  if (a.size() != b.size()) throw ValidationError("permutation test: fold counts differ");
  if (a.size() < 2) throw ValidationError("permutation test: need at least two folds");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = a[i] - b[i];
    all_zero = all_zero && diff[i] == 0.0;
  }
  if (all_zero) return 1.0;

  double observed = 0.0;
  double scale = 0.0;
  for (double d : diff) {
    observed += d;
    scale += std::abs(d);
  }
  observed = std::abs(observed);
  // Sums that tie the observed one up to rounding count as extreme.
  const double tol = 1e-12 * scale;

  if (n <= kExactPermutationMaxFolds) {
    const std::uint64_t patterns = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1U) ? -diff[i] : diff[i];
      if (std::abs(s) >= observed - tol) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(patterns);
  }

  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::size_t r = 0; r < kPermutationResamples; ++r) {
    double s = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      s += (bits & 1U) ? -diff[i] : diff[i];
      bits >>= 1;
    }
    if (std::abs(s) >= observed - tol) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(kPermutationResamples + 1);
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ValidationError("welch: need at least two samples each");
  auto moments = [](std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::pair{m, ss / static_cast<double>(x.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double se2 = va / na + vb / nb;
  WelchResult r;
  if (se2 == 0.0) {
    r.p_value = ma == mb ? 1.0 : 0.0;
    r.t = ma == mb ? 0.0 : std::copysign(INFINITY, ma - mb);
    r.df = na + nb - 2.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 /
         ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
  boost::math::students_t_distribution<double> dist(r.df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

double binomial_significance(std::size_t wins, std::size_t n) {
  if (wins > n) throw ValidationError("binomial test: wins exceed trials");
  const double ln2n = static_cast<double>(n) * std::log(2.0);
  const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);
  auto pmf = [&](std::size_t k) {
    return std::exp(lg_n - std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(n - k) + 1.0) - ln2n);
  };
  double lower = 0.0;
  for (std::size_t k = 0; k <= wins; ++k) lower += pmf(k);
  double upper = 0.0;
  for (std::size_t k = wins; k <= n; ++k) upper += pmf(k);
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

}  // namespace lovesim
