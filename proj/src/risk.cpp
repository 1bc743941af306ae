#include "dks/risk.hpp"

#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dks {

namespace {

constexpr int kMaxRiskRange = 1'000'000;

double poisson_pmf(double mean, int x)
{
  if (x < 0)
    return 0.0;
  return boost::math::pdf(boost::math::poisson_distribution<double>(mean), x);
}

void check_n(std::size_t n)
{
  if (n < 1)
    throw std::invalid_argument("sample size must be at least 1");
}

// Per-target sums over the truncated kernel support restricted to y >= 0.
struct TargetSums
{
  double fx;       // f(x)
  double modal;    // K_{x,h}(x)
  double first;    // sum_y f(y) K(y)
  double second;   // sum_y f(y) K(y)^2
  double mass;     // sum_y K(y)
};

TargetSums target_sums(const KernelSpec& kernel,
                       double h,
                       const TruePmf& f,
                       int x,
                       double tail_eps)
{
  const SupportRange support = kernel_support(kernel, x, h, tail_eps);
  TargetSums s{ f.query(x), kernel_pmf(kernel, x, h, x), 0.0, 0.0, 0.0 };
  for (int y = std::max(support.lo, 0); y <= support.truncation_hi; ++y) {
    const double k = kernel_pmf(kernel, x, h, y);
    const double fy = f.query(y);
    s.first += fy * k;
    s.second += fy * k * k;
    s.mass += k;
  }
  return s;
}

double r_from_sums(const TargetSums& s, std::size_t n)
{
  const double inv_n = 1.0 / static_cast<double>(n);
  const double off_target = s.second - s.fx * s.modal * s.modal;
  // f(x) + sum_y {f(y) - f(x)} K(y)
  const double centred = s.fx + s.first - s.fx * s.mass;
  return inv_n * off_target - inv_n * centred * centred + inv_n * s.fx * s.fx;
}

} // namespace

TruePmf TruePmf::poisson(double mean)
{
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("Poisson mean must be positive");
  TruePmf f;
  f.kind_ = Kind::poisson;
  f.mean_ = mean;

  const boost::math::poisson_distribution<double> dist(mean);
  int x = static_cast<int>(std::floor(mean));
  while (boost::math::cdf(boost::math::complement(dist, x)) > kTailEps)
    ++x;
  while (x > 0 && boost::math::cdf(boost::math::complement(dist, x - 1)) <=
                    kTailEps)
    --x;
  f.cutoff_ = x;

  // Tabulate past the cutoff until the remaining tail is below double
  // resolution so that inversion sampling never runs off the table.
  int last = x;
  while (boost::math::cdf(boost::math::complement(dist, last)) > 1e-17)
    ++last;
  f.table_.reserve(static_cast<std::size_t>(last + 1));
  for (int k = 0; k <= last; ++k)
    f.table_.push_back(poisson_pmf(mean, k));
  f.cumulative_.resize(f.table_.size());
  std::partial_sum(f.table_.begin(), f.table_.end(), f.cumulative_.begin());
  return f;
}

TruePmf TruePmf::tabulated(std::vector<double> probabilities)
{
  if (probabilities.empty())
    throw std::invalid_argument("tabulated p.m.f. needs at least one entry");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("tabulated probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("tabulated probabilities must sum to 1");
  TruePmf f;
  f.kind_ = Kind::tabulated;
  while (probabilities.size() > 1 && probabilities.back() == 0.0)
    probabilities.pop_back();
  f.table_ = std::move(probabilities);
  f.cutoff_ = static_cast<int>(f.table_.size()) - 1;
  f.cumulative_.resize(f.table_.size());
  std::partial_sum(f.table_.begin(), f.table_.end(), f.cumulative_.begin());
  return f;
}

TruePmf TruePmf::point_mass(int atom)
{
  if (atom < 0)
    throw std::invalid_argument("point mass atom must be non-negative");
  std::vector<double> table(static_cast<std::size_t>(atom) + 1, 0.0);
  table.back() = 1.0;
  return tabulated(std::move(table));
}

double TruePmf::query(int x) const
{
  if (x < 0)
    return 0.0;
  if (static_cast<std::size_t>(x) < table_.size())
    return table_[static_cast<std::size_t>(x)];
  return kind_ == Kind::poisson ? poisson_pmf(mean_, x) : 0.0;
}

double TruePmf::cdf(int x) const
{
  if (x < 0)
    return 0.0;
  if (static_cast<std::size_t>(x) < cumulative_.size())
    return cumulative_[static_cast<std::size_t>(x)];
  return 1.0;
}

int TruePmf::quantile(double u) const
{
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end())
    return static_cast<int>(cumulative_.size()) - 1;
  return static_cast<int>(it - cumulative_.begin());
}

double TruePmf::sum_of_squares() const
{
  double s = 0.0;
  for (double p : table_)
    s += p * p;
  return s;
}

double expected_estimate(const KernelSpec& kernel,
                         double h,
                         const TruePmf& f,
                         int x,
                         double tail_eps)
{
  return target_sums(kernel, h, f, x, tail_eps).first;
}

double exact_bias(const KernelSpec& kernel,
                  double h,
                  const TruePmf& f,
                  int x,
                  double tail_eps)
{
  const TargetSums s = target_sums(kernel, h, f, x, tail_eps);
  return s.first - s.fx;
}

double q_term(const KernelSpec& kernel,
              double h,
              const TruePmf& f,
              int x,
              double tail_eps)
{
  const SupportRange support = kernel_support(kernel, x, h, tail_eps);
  double q = 0.0;
  for (int y = std::max(support.lo, 0); y <= support.truncation_hi; ++y)
    if (y != x)
      q += f.query(y) * kernel_pmf(kernel, x, h, y);
  return q;
}

double exact_variance(const KernelSpec& kernel,
                      double h,
                      const TruePmf& f,
                      std::size_t n,
                      int x,
                      double tail_eps)
{
  check_n(n);
  const TargetSums s = target_sums(kernel, h, f, x, tail_eps);
  return (s.second - s.first * s.first) / static_cast<double>(n);
}

double r_term(const KernelSpec& kernel,
              double h,
              const TruePmf& f,
              std::size_t n,
              int x,
              double tail_eps)
{
  check_n(n);
  return r_from_sums(target_sums(kernel, h, f, x, tail_eps), n);
}

int risk_upper_bound(const KernelSpec& kernel,
                     double h,
                     const TruePmf& f,
                     double tail_eps)
{
  int x = f.table_end();
  while (x < kMaxRiskRange &&
         expected_estimate(kernel, h, f, x + 1, tail_eps) > tail_eps)
    ++x;
  return x;
}

RiskBreakdown exact_mise(const KernelSpec& kernel,
                         double h,
                         const TruePmf& f,
                         std::size_t n,
                         double tail_eps)
{
  check_n(n);
  RiskBreakdown out;
  out.x_lo = 0;
  out.x_hi = risk_upper_bound(kernel, h, f, tail_eps);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int x = out.x_lo; x <= out.x_hi; ++x) {
    const TargetSums s = target_sums(kernel, h, f, x, tail_eps);
    const double bias = s.first - s.fx;
    const double var = (s.second - s.first * s.first) * inv_n;
    const double q = s.first - s.fx * s.modal;
    const double r = r_from_sums(s, n);
    out.bias.push_back(bias);
    out.variance.push_back(var);
    out.q_term.push_back(q);
    out.r_term.push_back(r);
    out.integrated_squared_bias += bias * bias;
    out.integrated_variance += var;
    const double lead = s.fx * (s.modal - 1.0);
    out.amise += lead * lead + inv_n * s.fx * (s.modal * s.modal - s.fx);
    out.bias_remainder += 2.0 * lead * q + q * q;
    out.variance_remainder += r;
  }
  out.mise = out.integrated_squared_bias + out.integrated_variance;
  return out;
}

AmiseTerms amise_terms(const KernelSpec& kernel,
                       double h,
                       const TruePmf& f,
                       std::size_t n)
{
  check_n(n);
  AmiseTerms terms{ 0.0, 0.0 };
  for (int x = 0; x <= f.table_end(); ++x) {
    const double fx = f.query(x);
    const double modal = modal_probability(kernel, x, h);
    terms.bias += fx * fx * (modal - 1.0) * (modal - 1.0);
    terms.variance += fx * (modal * modal - fx);
  }
  terms.variance /= static_cast<double>(n);
  return terms;
}

double amise(const KernelSpec& kernel,
             double h,
             const TruePmf& f,
             std::size_t n)
{
  const AmiseTerms t = amise_terms(kernel, h, f, n);
  return t.bias + t.variance;
}

double frequency_mise(const TruePmf& f, std::size_t n)
{
  check_n(n);
  return (1.0 - f.sum_of_squares()) / static_cast<double>(n);
}

double second_difference(const TruePmf& f, int x)
{
  return f.query(x + 1) - 2.0 * f.query(x) + f.query(x - 1);
}

double interpolate_pmf(const TruePmf& f, double t)
{
  if (t < 0.0)
    return 0.0;
  const double base = std::floor(t);
  const double w = t - base;
  const int k = static_cast<int>(base);
  return (1.0 - w) * f.query(k) + w * f.query(k + 1);
}

double bias_expansion(const KernelSpec& kernel,
                      double h,
                      const TruePmf& f,
                      int x)
{
  const double mean = kernel_mean(kernel, x, h);
  const double var = kernel_variance(kernel, x, h);
  return interpolate_pmf(f, mean) - f.query(x) +
         0.5 * var * second_difference(f, x);
}

double expected_normalization(const KernelSpec& kernel,
                              double h,
                              const TruePmf& f,
                              double tail_eps)
{
  const int hi = risk_upper_bound(kernel, h, f, tail_eps);
  double total = 1.0;
  for (int x = 0; x <= hi; ++x)
    total += exact_bias(kernel, h, f, x, tail_eps);
  return total;
}

} // namespace dks
