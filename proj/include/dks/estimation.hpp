#pragma once

#include "dks/kernel.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace dks {

//! Multiset of non-negative integer observations, stored as value -> count.
class Sample
{
public:
  //! Throws std::invalid_argument on a negative value or an empty input.
  static Sample from_values(std::span<const int> values);
  //! Zero counts are dropped. Throws on negative values or a zero total.
  static Sample from_counts(const std::map<int, std::size_t>& counts);

  std::size_t size() const { return n_; }
  const std::map<int, std::size_t>& counts() const { return counts_; }
  std::size_t count(int value) const;
  int min() const { return counts_.begin()->first; }
  int max() const { return counts_.rbegin()->first; }
  //! Observations expanded back into a sorted list.
  std::vector<int> values() const;

  friend bool operator==(const Sample&, const Sample&) = default;

private:
  Sample() = default;

  std::map<int, std::size_t> counts_;
  std::size_t n_ = 0;
};

struct EvalRange
{
  int lo;
  int hi;
};

enum class RangePolicy
{
  extended, // [0, max + ceil(3 sqrt(max + 1)) + 2]
  observed  // [min, max]
};

EvalRange extended_range(const Sample& sample);
EvalRange observed_range(const Sample& sample);
EvalRange eval_range(const Sample& sample, RangePolicy policy);

//! Estimated mass on [eval_lo, eval_hi]; zero outside.
struct PmfEstimate
{
  int eval_lo = 0;
  int eval_hi = -1;
  std::vector<double> values;
  double normalization_constant = 1.0;
  bool normalized = false;

  double at(int x) const;
  double sum() const;
};

PmfEstimate frequency_estimate(const Sample& sample, EvalRange range);

//! f(x) = (1/n) sum_i K_{x,h}(X_i) on the evaluation range, unnormalized.
//! The normalization constant is the sum of the values over the range.
PmfEstimate kernel_estimate_raw(const Sample& sample,
                                const KernelSpec& kernel,
                                double h,
                                EvalRange range);

//! Divides by the normalization constant, which is kept for reporting.
PmfEstimate normalize_estimate(PmfEstimate raw);

//! Leave-one-out cross-validation criterion
//!   CV(h) = sum_x f(x)^2 - 2 / (n (n - 1)) sum_i sum_{j != i} K_{X_i,h}(X_j).
//! The x-sum starts at 0, covers at least the extended evaluation range and
//! stops once every kernel weight at the next target is below tail_eps.
double cv_score(const Sample& sample,
                const KernelSpec& kernel,
                double h,
                double tail_eps = kDefaultTailEps);

struct SearchConfig
{
  double h_min = 1e-4;
  double h_max = 1.0;
  int grid_points = 64;
  int refine_iterations = 40;

  //! Default search domain for the kernel. Binomial: [1e-4, 1];
  //! Poisson / negative binomial: [1e-4, 5]; triangular:
  //! [1e-4, clamp((max - min) / 2, 0.5, 10)].
  static SearchConfig defaults_for(const KernelSpec& kernel,
                                   const Sample& sample);

  void validate(const KernelSpec& kernel) const;
};

struct CvPoint
{
  double h;
  double score;
};

struct BandwidthSelection
{
  double h_cv = 0.0;
  double cv_min = 0.0;
  std::vector<CvPoint> cv_curve; // every evaluated point, sorted by h
};

//! Log-spaced grid scan followed by golden-section refinement (in log h)
//! inside the bracket of the grid minimum. Ties resolve to the smaller h.
//! The Dirac kernel has no bandwidth and returns h_cv = 0 with an empty curve.
BandwidthSelection select_bandwidth(const Sample& sample,
                                    const KernelSpec& kernel,
                                    const SearchConfig& config,
                                    double tail_eps = kDefaultTailEps);

} // namespace dks
