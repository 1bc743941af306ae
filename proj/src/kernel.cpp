#include "dks/kernel.hpp"

#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dks {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_gamma(double v)
{
  return boost::math::lgamma(v);
}

// y * log(v) with the convention 0 * log(0) = 0.
double xlogy(double y, double v)
{
  if (y == 0.0)
    return 0.0;
  return y * std::log(v);
}

double triangular_denominator(int arm, double h)
{
  double sum = 0.0;
  for (int k = 1; k <= arm; ++k)
    sum += std::pow(static_cast<double>(k), h);
  return (2.0 * arm + 1.0) * std::pow(arm + 1.0, h) - 2.0 * sum;
}

// Log-p.m.f. without argument validation; h = 0 is allowed and gives the
// generating distribution at the limit bandwidth.
double log_pmf_unchecked(const KernelSpec& kernel, int x, double h, int y)
{
  const double xd = x;
  const double yd = y;
  switch (kernel.family()) {
    case KernelFamily::dirac:
      return y == x ? 0.0 : kNegInf;

    case KernelFamily::binomial: {
      const int trials = x + 1;
      if (y < 0 || y > trials)
        return kNegInf;
      const double p = (xd + h) / (xd + 1.0);
      const double q = (1.0 - h) / (xd + 1.0);
      return log_gamma(trials + 1.0) - log_gamma(yd + 1.0) -
             log_gamma(trials - yd + 1.0) + xlogy(yd, p) +
             xlogy(trials - yd, q);
    }

    case KernelFamily::poisson: {
      if (y < 0)
        return kNegInf;
      const double lambda = xd + h;
      return -lambda + xlogy(yd, lambda) - log_gamma(yd + 1.0);
    }

    case KernelFamily::negative_binomial: {
      if (y < 0)
        return kNegInf;
      const double r = xd + 1.0;
      const double denom = 2.0 * xd + 1.0 + h;
      const double p = r / denom;
      const double q = (xd + h) / denom;
      return log_gamma(yd + r) - log_gamma(r) - log_gamma(yd + 1.0) +
             r * std::log(p) + xlogy(yd, q);
    }

    case KernelFamily::triangular: {
      const int arm = kernel.arm();
      const int dist = std::abs(y - x);
      if (dist > arm)
        return kNegInf;
      const double num =
        std::pow(arm + 1.0, h) - std::pow(static_cast<double>(dist), h);
      return std::log(num / triangular_denominator(arm, h));
    }
  }
  return kNegInf;
}

double pmf_unchecked(const KernelSpec& kernel, int x, double h, int y)
{
  if (kernel.family() == KernelFamily::dirac)
    return y == x ? 1.0 : 0.0;
  if (kernel.family() == KernelFamily::triangular) {
    const int arm = kernel.arm();
    const int dist = std::abs(y - x);
    if (dist > arm)
      return 0.0;
    return (std::pow(arm + 1.0, h) - std::pow(static_cast<double>(dist), h)) /
           triangular_denominator(arm, h);
  }
  const double lp = log_pmf_unchecked(kernel, x, h, y);
  return lp == kNegInf ? 0.0 : std::exp(lp);
}

// Upper-tail probability P(K > k) of an infinite-support kernel.
double survival(const KernelSpec& kernel, int x, double h, int k)
{
  using boost::math::cdf;
  using boost::math::complement;
  if (k < 0)
    return 1.0;
  if (kernel.family() == KernelFamily::poisson) {
    const boost::math::poisson_distribution<double> dist(x + h);
    return cdf(complement(dist, static_cast<double>(k)));
  }
  const double r = x + 1.0;
  const boost::math::negative_binomial_distribution<double> dist(
    r, r / (2.0 * x + 1.0 + h));
  return cdf(complement(dist, static_cast<double>(k)));
}

} // namespace

KernelSpec KernelSpec::triangular(int arm)
{
  if (arm < 1)
    throw std::invalid_argument("triangular kernel arm must be >= 1, got " +
                                std::to_string(arm));
  return KernelSpec(KernelFamily::triangular, arm);
}

KernelSpec KernelSpec::parse(std::string_view text)
{
  if (text == "dirac")
    return dirac();
  if (text == "binomial")
    return binomial();
  if (text == "poisson")
    return poisson();
  if (text == "negbin" || text == "negative_binomial")
    return negative_binomial();
  if (text == "triangular")
    return triangular(1);
  constexpr std::string_view prefix = "triangular:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string arm_text(text.substr(prefix.size()));
    std::size_t used = 0;
    int arm = 0;
    try {
      arm = std::stoi(arm_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arm_text.size())
      throw std::invalid_argument("invalid triangular arm in '" +
                                  std::string(text) + "'");
    return triangular(arm);
  }
  throw std::invalid_argument(
    "unknown kernel '" + std::string(text) +
    "' (expected dirac, binomial, poisson, negbin, triangular[:P])");
}

int KernelSpec::arm() const
{
  if (!arm_)
    throw std::logic_error("kernel " + name() + " has no triangular arm");
  return *arm_;
}

bool KernelSpec::is_standard() const
{
  return family_ == KernelFamily::binomial ||
         family_ == KernelFamily::poisson ||
         family_ == KernelFamily::negative_binomial;
}

bool KernelSpec::has_finite_support() const
{
  return family_ != KernelFamily::poisson &&
         family_ != KernelFamily::negative_binomial;
}

std::string KernelSpec::name() const
{
  switch (family_) {
    case KernelFamily::dirac:
      return "dirac";
    case KernelFamily::binomial:
      return "binomial";
    case KernelFamily::poisson:
      return "poisson";
    case KernelFamily::negative_binomial:
      return "negbin";
    case KernelFamily::triangular:
      return "triangular:" + std::to_string(arm_.value_or(1));
  }
  return "unknown";
}

void check_kernel_args(const KernelSpec& kernel, int x, double h)
{
  if (x < 0)
    throw std::domain_error("kernel target must be non-negative, got " +
                            std::to_string(x));
  if (kernel.family() == KernelFamily::dirac)
    return;
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::domain_error("bandwidth must be positive and finite for the " +
                            kernel.name() + " kernel");
  if (kernel.family() == KernelFamily::binomial && h > 1.0)
    throw std::domain_error("binomial kernel bandwidth must lie in (0, 1]");
}

double kernel_pmf(const KernelSpec& kernel, int x, double h, int y)
{
  check_kernel_args(kernel, x, h);
  return pmf_unchecked(kernel, x, h, y);
}

double kernel_log_pmf(const KernelSpec& kernel, int x, double h, int y)
{
  check_kernel_args(kernel, x, h);
  return log_pmf_unchecked(kernel, x, h, y);
}

SupportRange kernel_support(const KernelSpec& kernel,
                            int x,
                            double h,
                            double tail_eps)
{
  check_kernel_args(kernel, x, h);
  if (!(tail_eps > 0.0 && tail_eps < 1.0))
    throw std::invalid_argument("tail_eps must lie in (0, 1)");

  switch (kernel.family()) {
    case KernelFamily::dirac:
      return { x, x, x, 0.0 };
    case KernelFamily::binomial:
      return { 0, x + 1, x + 1, 0.0 };
    case KernelFamily::triangular: {
      const int arm = kernel.arm();
      return { x - arm, x + arm, x + arm, 0.0 };
    }
    default:
      break;
  }

  const double start =
    kernel_mean(kernel, x, h) + 10.0 * std::sqrt(kernel_variance(kernel, x, h));
  int hi = static_cast<int>(std::ceil(start));
  while (survival(kernel, x, h, hi) > tail_eps)
    ++hi;
  while (hi > 0 && survival(kernel, x, h, hi - 1) <= tail_eps)
    --hi;
  return { 0, std::nullopt, hi, tail_eps };
}

double modal_probability(const KernelSpec& kernel, int x, double h)
{
  return kernel_pmf(kernel, x, h, x);
}

double modal_limit(const KernelSpec& kernel, int x)
{
  check_kernel_args(kernel, x, 1.0);
  if (!kernel.is_standard())
    return 1.0;
  return pmf_unchecked(kernel, x, 0.0, x);
}

double kernel_mean(const KernelSpec& kernel, int x, double h)
{
  check_kernel_args(kernel, x, h);
  if (kernel.is_standard())
    return x + h;
  return x;
}

double kernel_variance(const KernelSpec& kernel, int x, double h)
{
  check_kernel_args(kernel, x, h);
  const double xd = x;
  switch (kernel.family()) {
    case KernelFamily::dirac:
      return 0.0;
    case KernelFamily::binomial:
      return (xd + h) * (1.0 - h) / (xd + 1.0);
    case KernelFamily::poisson:
      return xd + h;
    case KernelFamily::negative_binomial:
      return (xd + h) * (2.0 * xd + 1.0 + h) / (xd + 1.0);
    case KernelFamily::triangular: {
      const int arm = kernel.arm();
      const double top = std::pow(arm + 1.0, h);
      double sum = 0.0;
      for (int k = 1; k <= arm; ++k) {
        const double kd = k;
        sum += kd * kd * (top - std::pow(kd, h));
      }
      return 2.0 * sum / triangular_denominator(arm, h);
    }
  }
  return 0.0;
}

double ratio_r1(int x)
{
  if (x < 0)
    throw std::domain_error("ratio_r1 requires x >= 0");
  const double xd = x;
  return std::exp(xlogy(xd, xd + 1.0) - xd - log_gamma(xd + 1.0));
}

double ratio_r2(int x)
{
  if (x < 0)
    throw std::domain_error("ratio_r2 requires x >= 0");
  const double log_nb =
    log_pmf_unchecked(KernelSpec::negative_binomial(), x, 0.0, x);
  const double log_poisson = log_pmf_unchecked(KernelSpec::poisson(), x, 0.0, x);
  return std::exp(log_nb - log_poisson);
}

TriangularCoefficients triangular_expansion_coeffs(int arm)
{
  if (arm < 1)
    throw std::domain_error("triangular arm must be >= 1");
  const double p = arm;
  double sum_log = 0.0;
  double sum_sq_log = 0.0;
  for (int k = 2; k <= arm; ++k) {
    const double lk = std::log(static_cast<double>(k));
    sum_log += lk;
    sum_sq_log += static_cast<double>(k) * k * lk;
  }
  const double log_top = std::log(p + 1.0);
  return { p * log_top - sum_log,
           p * (2.0 * p * p + 3.0 * p + 1.0) / 6.0 * log_top - sum_sq_log };
}

} // namespace dks
