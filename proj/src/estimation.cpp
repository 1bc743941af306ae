#include "dks/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dks {

Sample Sample::from_values(std::span<const int> values)
{
  if (values.empty())
    throw std::invalid_argument("sample must contain at least one observation");
  Sample s;
  for (int v : values) {
    if (v < 0)
      throw std::invalid_argument("sample values must be non-negative, got " +
                                  std::to_string(v));
    ++s.counts_[v];
  }
  s.n_ = values.size();
  return s;
}

Sample Sample::from_counts(const std::map<int, std::size_t>& counts)
{
  Sample s;
  for (const auto& [value, count] : counts) {
    if (value < 0)
      throw std::invalid_argument("sample values must be non-negative, got " +
                                  std::to_string(value));
    if (count == 0)
      continue;
    s.counts_[value] = count;
    s.n_ += count;
  }
  if (s.n_ == 0)
    throw std::invalid_argument("sample must contain at least one observation");
  return s;
}

std::size_t Sample::count(int value) const
{
  const auto it = counts_.find(value);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<int> Sample::values() const
{
  std::vector<int> out;
  out.reserve(n_);
  for (const auto& [value, count] : counts_)
    out.insert(out.end(), count, value);
  return out;
}

EvalRange extended_range(const Sample& sample)
{
  const int hi = sample.max();
  return { 0,
           hi + static_cast<int>(std::ceil(3.0 * std::sqrt(hi + 1.0))) + 2 };
}

EvalRange observed_range(const Sample& sample)
{
  return { sample.min(), sample.max() };
}

EvalRange eval_range(const Sample& sample, RangePolicy policy)
{
  return policy == RangePolicy::observed ? observed_range(sample)
                                         : extended_range(sample);
}

double PmfEstimate::at(int x) const
{
  if (x < eval_lo || x > eval_hi)
    return 0.0;
  return values[static_cast<std::size_t>(x - eval_lo)];
}

double PmfEstimate::sum() const
{
  return std::accumulate(values.begin(), values.end(), 0.0);
}

namespace {

void check_range(EvalRange range)
{
  if (range.lo < 0)
    throw std::invalid_argument("evaluation range must lie in the non-negative "
                                "integers");
  if (range.lo > range.hi)
    throw std::invalid_argument("evaluation range is empty");
}

} // namespace

PmfEstimate frequency_estimate(const Sample& sample, EvalRange range)
{
  check_range(range);
  if (range.lo > sample.min() || range.hi < sample.max())
    throw std::invalid_argument(
      "evaluation range must cover every observed value");
  PmfEstimate est;
  est.eval_lo = range.lo;
  est.eval_hi = range.hi;
  est.values.assign(static_cast<std::size_t>(range.hi - range.lo + 1), 0.0);
  const double n = static_cast<double>(sample.size());
  for (const auto& [value, count] : sample.counts())
    est.values[static_cast<std::size_t>(value - range.lo)] = count / n;
  est.normalization_constant = 1.0;
  est.normalized = true;
  return est;
}

PmfEstimate kernel_estimate_raw(const Sample& sample,
                                const KernelSpec& kernel,
                                double h,
                                EvalRange range)
{
  check_range(range);
  check_kernel_args(kernel, range.lo, h);
  PmfEstimate est;
  est.eval_lo = range.lo;
  est.eval_hi = range.hi;
  est.values.reserve(static_cast<std::size_t>(range.hi - range.lo + 1));
  const double n = static_cast<double>(sample.size());
  for (int x = range.lo; x <= range.hi; ++x) {
    double acc = 0.0;
    for (const auto& [value, count] : sample.counts())
      acc += static_cast<double>(count) * kernel_pmf(kernel, x, h, value);
    est.values.push_back(acc / n);
  }
  est.normalization_constant = est.sum();
  est.normalized = false;
  return est;
}

PmfEstimate normalize_estimate(PmfEstimate raw)
{
  if (raw.normalized)
    throw std::invalid_argument("estimate is already normalized");
  const double c = raw.sum();
  if (!(c > 0.0))
    throw std::domain_error("cannot normalize an estimate with zero mass");
  for (double& v : raw.values)
    v /= c;
  raw.normalization_constant = c;
  raw.normalized = true;
  return raw;
}

double cv_score(const Sample& sample,
                const KernelSpec& kernel,
                double h,
                double tail_eps)
{
  const std::size_t n = sample.size();
  if (n < 2)
    throw std::invalid_argument(
      "cross-validation needs at least two observations");
  check_kernel_args(kernel, 0, h);
  if (!(tail_eps > 0.0 && tail_eps < 1.0))
    throw std::invalid_argument("tail_eps must lie in (0, 1)");

  const auto& counts = sample.counts();
  const double nd = static_cast<double>(n);

  double squares = 0.0;
  const int floor_hi = extended_range(sample).hi;
  for (int x = 0;; ++x) {
    double acc = 0.0;
    double largest = 0.0;
    for (const auto& [value, count] : counts) {
      const double k = kernel_pmf(kernel, x, h, value);
      acc += static_cast<double>(count) * k;
      largest = std::max(largest, k);
    }
    const double fx = acc / nd;
    squares += fx * fx;
    if (x >= floor_hi && largest < tail_eps)
      break;
  }

  double pairs = 0.0;
  for (const auto& [target, c_target] : counts) {
    for (const auto& [obs, c_obs] : counts) {
      const double k = kernel_pmf(kernel, target, h, obs);
      double mult = static_cast<double>(c_target) * static_cast<double>(c_obs);
      if (target == obs)
        mult -= static_cast<double>(c_target);
      pairs += mult * k;
    }
  }
  return squares - 2.0 * pairs / (nd * (nd - 1.0));
}

SearchConfig SearchConfig::defaults_for(const KernelSpec& kernel,
                                        const Sample& sample)
{
  SearchConfig config;
  switch (kernel.family()) {
    case KernelFamily::binomial:
      config.h_max = 1.0;
      break;
    case KernelFamily::poisson:
    case KernelFamily::negative_binomial:
      config.h_max = 5.0;
      break;
    case KernelFamily::triangular:
      config.h_max =
        std::clamp((sample.max() - sample.min()) / 2.0, 0.5, 10.0);
      break;
    case KernelFamily::dirac:
      break;
  }
  return config;
}

void SearchConfig::validate(const KernelSpec& kernel) const
{
  if (!(h_min > 0.0 && h_min < h_max) || !std::isfinite(h_max))
    throw std::invalid_argument("search domain needs 0 < h_min < h_max");
  if (kernel.family() == KernelFamily::binomial && h_max > 1.0)
    throw std::invalid_argument("binomial search domain must satisfy h_max <= 1");
  if (grid_points < 16)
    throw std::invalid_argument("search grid needs at least 16 points");
  if (refine_iterations < 0)
    throw std::invalid_argument("refine_iterations must be non-negative");
}

BandwidthSelection select_bandwidth(const Sample& sample,
                                    const KernelSpec& kernel,
                                    const SearchConfig& config,
                                    double tail_eps)
{
  BandwidthSelection result;
  if (kernel.family() == KernelFamily::dirac) {
    result.h_cv = 0.0;
    result.cv_min = cv_score(sample, kernel, 0.0, tail_eps);
    return result;
  }
  config.validate(kernel);

  const double log_lo = std::log(config.h_min);
  const double log_hi = std::log(config.h_max);
  auto to_h = [&](double log_h) {
    return std::clamp(std::exp(log_h), config.h_min, config.h_max);
  };
  auto evaluate = [&](double log_h) {
    const double h = to_h(log_h);
    const double score = cv_score(sample, kernel, h, tail_eps);
    result.cv_curve.push_back({ h, score });
    return score;
  };

  const int g = config.grid_points;
  const double step = (log_hi - log_lo) / (g - 1);
  std::vector<double> grid_scores;
  grid_scores.reserve(static_cast<std::size_t>(g));
  int best = 0;
  for (int k = 0; k < g; ++k) {
    const double log_h = k == g - 1 ? log_hi : log_lo + k * step;
    grid_scores.push_back(evaluate(log_h));
    if (grid_scores.back() < grid_scores[static_cast<std::size_t>(best)])
      best = k;
  }

  if (config.refine_iterations > 0) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = log_lo + std::max(best - 1, 0) * step;
    double b = best + 1 >= g - 1 ? log_hi : log_lo + (best + 1) * step;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = evaluate(c);
    double fd = evaluate(d);
    for (int it = 0; it < config.refine_iterations; ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = evaluate(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = evaluate(d);
      }
    }
  }

  std::stable_sort(
    result.cv_curve.begin(),
    result.cv_curve.end(),
    [](const CvPoint& l, const CvPoint& r) { return l.h < r.h; });
  const CvPoint* arg = &result.cv_curve.front();
  for (const CvPoint& p : result.cv_curve)
    if (p.score < arg->score)
      arg = &p;
  result.h_cv = arg->h;
  result.cv_min = arg->score;
  return result;
}

} // namespace dks
