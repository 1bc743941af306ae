#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace dks {

/// Tail mass tolerated beyond the truncation point of an infinite support.
inline constexpr double kDefaultTailEps = 1e-12;

enum class KernelFamily
{
  dirac,
  binomial,
  poisson,
  negative_binomial,
  triangular
};

//! Discrete kernel family plus its fixed shape parameters.
//!
//! The triangular arm `p` is only meaningful for the triangular family and is
//! rejected for every other family.
class KernelSpec
{
public:
  static KernelSpec dirac() { return KernelSpec(KernelFamily::dirac); }
  static KernelSpec binomial() { return KernelSpec(KernelFamily::binomial); }
  static KernelSpec poisson() { return KernelSpec(KernelFamily::poisson); }
  static KernelSpec negative_binomial()
  {
    return KernelSpec(KernelFamily::negative_binomial);
  }
  static KernelSpec triangular(int arm);

  //! Parses `dirac`, `binomial`, `poisson`, `negbin`, `triangular` or
  //! `triangular:P`. Throws std::invalid_argument on anything else.
  static KernelSpec parse(std::string_view text);

  KernelFamily family() const { return family_; }
  std::optional<int> triangular_arm() const { return arm_; }
  int arm() const;

  //! True for the binomial, Poisson and negative binomial kernels.
  bool is_standard() const;
  //! False only for the Poisson and negative binomial kernels.
  bool has_finite_support() const;

  std::string name() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

private:
  explicit KernelSpec(KernelFamily family, std::optional<int> arm = {})
    : family_(family)
    , arm_(arm)
  {}

  KernelFamily family_;
  std::optional<int> arm_;
};

struct SupportRange
{
  int lo;
  std::optional<int> hi; // empty for supports unbounded above
  int truncation_hi;
  double tail_mass_bound;
};

// Throws std::domain_error for h <= 0 (non-Dirac), h > 1 (binomial) or x < 0.
void check_kernel_args(const KernelSpec& kernel, int x, double h);

double kernel_pmf(const KernelSpec& kernel, int x, double h, int y);
double kernel_log_pmf(const KernelSpec& kernel, int x, double h, int y);

SupportRange kernel_support(const KernelSpec& kernel,
                            int x,
                            double h,
                            double tail_eps = kDefaultTailEps);

double modal_probability(const KernelSpec& kernel, int x, double h);

//! Limit of the modal probability as h -> 0. Equals 1 for the Dirac and
//! triangular kernels; for the standard kernels it is the modal probability
//! of the generating distribution with h = 0.
double modal_limit(const KernelSpec& kernel, int x);

double kernel_mean(const KernelSpec& kernel, int x, double h);
double kernel_variance(const KernelSpec& kernel, int x, double h);

/// Poisson-to-binomial ratio of modal limits, (x+1)^x e^{-x} / x!.
double ratio_r1(int x);
/// Negative-binomial-to-Poisson ratio of modal limits.
double ratio_r2(int x);

struct TriangularCoefficients
{
  double modal;    // A(p): modal probability ~ 1 - 2 h A(p)
  double variance; // V(p): variance ~ 2 h V(p)
};

TriangularCoefficients triangular_expansion_coeffs(int arm);

} // namespace dks
