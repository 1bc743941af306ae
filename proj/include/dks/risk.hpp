#pragma once

#include "dks/kernel.hpp"

#include <cstddef>
#include <vector>

namespace dks {

//! Reference p.m.f. on the non-negative integers: either a Poisson law or a
//! table of probabilities starting at 0.
class TruePmf
{
public:
  enum class Kind
  {
    poisson,
    tabulated
  };

  /// Tail beyond cutoff() is at most this much.
  static constexpr double kTailEps = 1e-12;

  static TruePmf poisson(double mean);
  //! Probabilities for 0, 1, ..., size - 1. They must be non-negative and sum
  //! to 1 within 1e-9.
  static TruePmf tabulated(std::vector<double> probabilities);
  static TruePmf point_mass(int atom);

  Kind kind() const { return kind_; }
  double mean_parameter() const { return mean_; }

  double query(int x) const;
  //! Smallest x_max with P(X > x_max) <= kTailEps (last non-zero entry for
  //! tabulated laws).
  int cutoff() const { return cutoff_; }
  //! Last tabulated x; the Poisson tail beyond it is below 1e-17, so sums up
  //! to here are exact in double precision.
  int table_end() const { return static_cast<int>(table_.size()) - 1; }
  double cdf(int x) const;
  //! Smallest x with cdf(x) > u, u in [0, 1); never an x of zero mass.
  int quantile(double u) const;
  double sum_of_squares() const;

private:
  TruePmf() = default;

  Kind kind_ = Kind::tabulated;
  double mean_ = 0.0;
  int cutoff_ = 0;
  std::vector<double> table_; // probabilities on [0, table_.size())
  std::vector<double> cumulative_;
};

struct RiskBreakdown
{
  int x_lo = 0;
  int x_hi = -1;
  std::vector<double> bias;      // per x in [x_lo, x_hi]
  std::vector<double> variance;  // per x
  std::vector<double> q_term;    // Q_n(x; h)
  std::vector<double> r_term;    // R_n(x; h)
  double integrated_squared_bias = 0.0;
  double integrated_variance = 0.0;
  double mise = 0.0;
  double amise = 0.0;
  //! Exact contribution of the Q_n terms to the integrated squared bias,
  //! sum_x [2 f(x) (P(K=x) - 1) Q_n + Q_n^2], and of R_n to the integrated
  //! variance. With these, mise == amise + bias_remainder + variance_remainder.
  double bias_remainder = 0.0;
  double variance_remainder = 0.0;
};

//! E f(x) = sum_y f(y) K_{x,h}(y) over the truncated kernel support.
double expected_estimate(const KernelSpec& kernel,
                         double h,
                         const TruePmf& f,
                         int x,
                         double tail_eps = kDefaultTailEps);

double exact_bias(const KernelSpec& kernel,
                  double h,
                  const TruePmf& f,
                  int x,
                  double tail_eps = kDefaultTailEps);

//! Q_n(x; h) = sum_{y != x} f(y) K_{x,h}(y).
double q_term(const KernelSpec& kernel,
              double h,
              const TruePmf& f,
              int x,
              double tail_eps = kDefaultTailEps);

//! (1/n) [sum_y f(y) K^2 - (sum_y f(y) K)^2].
double exact_variance(const KernelSpec& kernel,
                      double h,
                      const TruePmf& f,
                      std::size_t n,
                      int x,
                      double tail_eps = kDefaultTailEps);

//! R_n(x; h) evaluated term by term from its defining display, so that
//! Var = (1/n) f(x) P(K=x)^2 - (1/n) f(x)^2 + R_n whenever the kernel's mass
//! on the non-negative integers is 1.
double r_term(const KernelSpec& kernel,
              double h,
              const TruePmf& f,
              std::size_t n,
              int x,
              double tail_eps = kDefaultTailEps);

//! Integration runs over [0, risk_upper_bound]: past f's tabulated range and
//! on while the expected estimate still exceeds tail_eps.
int risk_upper_bound(const KernelSpec& kernel,
                     double h,
                     const TruePmf& f,
                     double tail_eps = kDefaultTailEps);

RiskBreakdown exact_mise(const KernelSpec& kernel,
                         double h,
                         const TruePmf& f,
                         std::size_t n,
                         double tail_eps = kDefaultTailEps);

//! sum_x f^2 (P(K=x) - 1)^2 + (1/n) sum_x f (P(K=x)^2 - f).
double amise(const KernelSpec& kernel,
             double h,
             const TruePmf& f,
             std::size_t n);

struct AmiseTerms
{
  double bias;     // first (squared bias) sum
  double variance; // second (1/n) sum
};

AmiseTerms amise_terms(const KernelSpec& kernel,
                       double h,
                       const TruePmf& f,
                       std::size_t n);

//! (1/n) (1 - sum_x f(x)^2).
double frequency_mise(const TruePmf& f, std::size_t n);

//! Central second difference f(x+1) - 2 f(x) + f(x-1), with f(-1) = 0.
double second_difference(const TruePmf& f, int x);

//! f at a real point, linearly interpolated between neighbouring integers.
double interpolate_pmf(const TruePmf& f, double t);

//! Small-h bias approximation f(E K) - f(x) + Var(K) f''(x) / 2.
double bias_expansion(const KernelSpec& kernel,
                      double h,
                      const TruePmf& f,
                      int x);

//! E(C) = 1 + sum_x Bias(x).
double expected_normalization(const KernelSpec& kernel,
                              double h,
                              const TruePmf& f,
                              double tail_eps = kDefaultTailEps);

} // namespace dks
