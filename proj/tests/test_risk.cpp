#include "dks/risk.hpp"

#include "dks/estimation.hpp"
#include "dks/rng.hpp"
#include "dks/simulation.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace dks;

namespace {

const std::vector<KernelSpec> kStandard = { KernelSpec::binomial(),
                                            KernelSpec::poisson(),
                                            KernelSpec::negative_binomial() };

double poisson2(int y)
{
  return oracle::poisson_pmf(2.0, y);
}

} // namespace

TEST_CASE("TruePmf Poisson")
{
  const TruePmf f = TruePmf::poisson(2.0);
  CHECK(f.kind() == TruePmf::Kind::poisson);
  CHECK(f.mean_parameter() == 2.0);
  for (int x = 0; x <= 15; ++x)
    CHECK(f.query(x) == doctest::Approx(poisson2(x)).epsilon(1e-13));
  CHECK(f.query(-1) == 0.0);

  auto tail_above = [](int m) {
    double t = 0.0;
    for (int y = m + 1; y < m + 100; ++y)
      t += poisson2(y);
    return t;
  };
  CHECK(tail_above(f.cutoff()) <= TruePmf::kTailEps);
  CHECK(tail_above(f.cutoff() - 1) > TruePmf::kTailEps);

  double cum = 0.0;
  for (int x = 0; x <= 10; ++x) {
    cum += poisson2(x);
    CHECK(f.cdf(x) == doctest::Approx(cum).epsilon(1e-13));
  }
  CHECK(f.quantile(0.0) == 0);
  CHECK(f.quantile(f.cdf(2)) == 3);
  CHECK(f.quantile(std::nextafter(f.cdf(2), 0.0)) == 2);
  CHECK(f.quantile(0.999999) >= 9);

  // sum of squares of Poisson(mu) is exp(-2 mu) I_0(2 mu)
  CHECK(f.sum_of_squares() == doctest::Approx(std::exp(-4.0) * std::cyl_bessel_i(0.0, 4.0)).epsilon(1e-12));
  CHECK(f.sum_of_squares() == doctest::Approx(0.207002).epsilon(1e-6));
  CHECK_THROWS_AS(TruePmf::poisson(0.0), std::invalid_argument);
  CHECK_THROWS_AS(TruePmf::poisson(-1.0), std::invalid_argument);
}

TEST_CASE("TruePmf tabulated and point mass")
{
  const TruePmf t = TruePmf::tabulated({ 0.25, 0.5, 0.25, 0.0 });
  CHECK(t.kind() == TruePmf::Kind::tabulated);
  CHECK(t.cutoff() == 2);
  CHECK(t.query(1) == 0.5);
  CHECK(t.query(7) == 0.0);
  CHECK(t.quantile(0.3) == 1);
  CHECK(t.sum_of_squares() == doctest::Approx(0.375));
  CHECK_THROWS_AS(TruePmf::tabulated({}), std::invalid_argument);
  CHECK_THROWS_AS(TruePmf::tabulated({ 0.5, 0.4 }), std::invalid_argument);
  CHECK_THROWS_AS(TruePmf::tabulated({ 1.2, -0.2 }), std::invalid_argument);

  const TruePmf p = TruePmf::point_mass(3);
  CHECK(p.query(3) == 1.0);
  CHECK(p.quantile(0.0) == 3);
  CHECK(p.quantile(0.9) == 3);
  CHECK(frequency_mise(p, 10) == 0.0);
}

TEST_CASE("expected estimate and bias")
{
  const TruePmf f = TruePmf::poisson(2.0);
  CHECK(expected_estimate(KernelSpec::binomial(), 0.1, f, 0) ==
        doctest::Approx(0.9 * poisson2(0) + 0.1 * poisson2(1)).epsilon(1e-13));
  for (int x = 0; x <= 6; ++x) {
    CHECK(expected_estimate(KernelSpec::dirac(), 1.0, f, x) == doctest::Approx(f.query(x)));
    CHECK(exact_bias(KernelSpec::dirac(), 1.0, f, x) == doctest::Approx(0.0));
    CHECK(q_term(KernelSpec::dirac(), 1.0, f, x) == 0.0);
  }
  for (const KernelSpec& k : { KernelSpec::binomial(), KernelSpec::poisson(),
                               KernelSpec::negative_binomial(), KernelSpec::triangular(2) })
    for (int x = 0; x <= 10; ++x) {
      double want = 0.0;
      for (int y = 0; y <= 80; ++y)
        want += poisson2(y) * oracle::kernel(k, x, 0.2, y);
      CHECK(expected_estimate(k, 0.2, f, x) == doctest::Approx(want).epsilon(1e-11));
      CHECK(exact_bias(k, 0.2, f, x) ==
            doctest::Approx(want - poisson2(x)).epsilon(1e-10));
    }
}

TEST_CASE("bias and variance decompositions")
{
  const TruePmf f = TruePmf::poisson(2.0);
  for (const KernelSpec& k : kStandard)
    for (double h : { 0.05, 0.2 })
      for (std::size_t n : { 25u, 100u })
        for (int x = 0; x <= 10; ++x) {
          const double modal = modal_probability(k, x, h);
          const double fx = f.query(x);
          CHECK(std::abs(exact_bias(k, h, f, x) - (fx * (modal - 1) + q_term(k, h, f, x))) < 1e-12);
          const double nd = static_cast<double>(n);
          CHECK(std::abs(exact_variance(k, h, f, n, x) -
                         (fx * modal * modal / nd - fx * fx / nd + r_term(k, h, f, n, x))) < 1e-12);
        }
  // variance scales as 1/n
  for (const KernelSpec& k : kStandard)
    CHECK(exact_variance(k, 0.3, f, 100, 2) ==
          doctest::Approx(exact_variance(k, 0.3, f, 25, 2) / 4).epsilon(1e-13));
  // Dirac variance is the binomial-proportion variance
  for (int x = 0; x <= 5; ++x)
    CHECK(exact_variance(KernelSpec::dirac(), 1.0, f, 20, x) ==
          doctest::Approx(f.query(x) * (1 - f.query(x)) / 20).epsilon(1e-13));
}

TEST_CASE("exact variance against the single-observation formula")
{
  const TruePmf f = TruePmf::poisson(2.0);
  for (const KernelSpec& k : { KernelSpec::poisson(), KernelSpec::triangular(1) })
    for (int x = 0; x <= 8; ++x) {
      double m1 = 0.0, m2 = 0.0;
      for (int y = 0; y <= 80; ++y) {
        const double w = oracle::kernel(k, x, 0.4, y);
        m1 += poisson2(y) * w;
        m2 += poisson2(y) * w * w;
      }
      CHECK(exact_variance(k, 0.4, f, 30, x) == doctest::Approx((m2 - m1 * m1) / 30).epsilon(1e-10));
    }
}

TEST_CASE("MISE identities")
{
  const TruePmf f = TruePmf::poisson(2.0);
  for (const KernelSpec& k : kStandard)
    for (double h : { 0.05, 0.2 })
      for (std::size_t n : { 25u, 100u }) {
        const RiskBreakdown r = exact_mise(k, h, f, n);
        double isb = 0.0, iv = 0.0;
        for (std::size_t i = 0; i < r.bias.size(); ++i) {
          isb += r.bias[i] * r.bias[i];
          iv += r.variance[i];
        }
        CHECK(std::abs(r.integrated_squared_bias - isb) < 1e-12);
        CHECK(std::abs(r.integrated_variance - iv) < 1e-12);
        CHECK(std::abs(r.mise - (isb + iv)) < 1e-10);
        CHECK(std::abs(r.amise - amise(k, h, f, n)) < 1e-10);
        CHECK(std::abs(r.mise - (r.amise + r.bias_remainder + r.variance_remainder)) < 1e-10);
        const AmiseTerms t = amise_terms(k, h, f, n);
        CHECK(std::abs(t.bias + t.variance - r.amise) < 1e-12);
        CHECK(r.x_lo == 0);
        CHECK(r.x_hi >= f.cutoff());
      }
  for (std::size_t n : { 15u, 25u, 100u }) {
    CHECK(std::abs(exact_mise(KernelSpec::dirac(), 1.0, f, n).mise - frequency_mise(f, n)) < 1e-14);
    CHECK(std::abs(amise(KernelSpec::dirac(), 1.0, f, n) - frequency_mise(f, n)) < 1e-14);
  }
  CHECK(frequency_mise(f, 25) == doctest::Approx((1 - f.sum_of_squares()) / 25).epsilon(1e-14));
  CHECK(frequency_mise(f, 25) == doctest::Approx(0.0317).epsilon(1e-3));
}

TEST_CASE("exact risk agrees with Monte Carlo replicates")
{
  const TruePmf f = TruePmf::poisson(2.0);
  const KernelSpec k = KernelSpec::negative_binomial();
  const double h = 0.3;
  const std::size_t n = 10;
  const int reps = 20000;
  const EvalRange range{ 0, 40 };
  std::vector<double> sum(41, 0.0), sum_sq(41, 0.0);
  double sum_ise = 0.0;
  for (int r = 0; r < reps; ++r) {
    CounterRng rng = CounterRng::for_replicate(5, n, static_cast<std::uint64_t>(r));
    const PmfEstimate est = kernel_estimate_raw(sample_from_pmf(f, n, rng), k, h, range);
    for (int x = 0; x <= 40; ++x) {
      sum[static_cast<std::size_t>(x)] += est.at(x);
      sum_sq[static_cast<std::size_t>(x)] += est.at(x) * est.at(x);
    }
    sum_ise += ise(est, f);
  }
  for (int x = 0; x <= 6; ++x) {
    const double mean = sum[static_cast<std::size_t>(x)] / reps;
    const double var = sum_sq[static_cast<std::size_t>(x)] / reps - mean * mean;
    const double sd_mean = std::sqrt(var / reps);
    CHECK(std::abs(mean - expected_estimate(k, h, f, x)) < 4 * sd_mean);
    CHECK(var == doctest::Approx(exact_variance(k, h, f, n, x)).epsilon(0.05));
  }
  CHECK(sum_ise / reps == doctest::Approx(exact_mise(k, h, f, n).mise).epsilon(0.03));
}

TEST_CASE("rankings of the standard kernels at small h")
{
  const TruePmf f = TruePmf::poisson(2.0);
  const KernelSpec b = KernelSpec::binomial(), p = KernelSpec::poisson(),
                   nb = KernelSpec::negative_binomial();

  for (std::size_t n : { 25u, 100u })
    for (double h : { 0.01, 0.05, 0.1 }) {
      CHECK(amise(b, h, f, n) <= amise(p, h, f, n));
      CHECK(amise(p, h, f, n) <= amise(nb, h, f, n));
    }

  auto bias_sum = [&](const KernelSpec& k) {
    double s = 0.0;
    for (int x = 0; x <= 40; ++x)
      s += exact_bias(k, 0.05, f, x);
    return s;
  };
  CHECK(bias_sum(b) <= bias_sum(p));
  CHECK(bias_sum(p) <= bias_sum(nb));

  CHECK(exact_mise(b, 0.05, f, 1000).mise <= exact_mise(p, 0.05, f, 1000).mise);
  CHECK(exact_mise(p, 0.05, f, 1000).mise <= exact_mise(nb, 0.05, f, 1000).mise);

  CHECK(expected_normalization(b, 0.05, f) <= expected_normalization(p, 0.05, f));
  CHECK(expected_normalization(p, 0.05, f) <= expected_normalization(nb, 0.05, f));

  const AmiseTerms tb = amise_terms(b, 0.05, f, 100);
  const AmiseTerms tnb = amise_terms(nb, 0.05, f, 100);
  CHECK(tb.bias <= tnb.bias);
  CHECK(tb.variance >= tnb.variance);

  for (const KernelSpec& k : kStandard) {
    double q = 0.0;
    for (int x = 0; x <= 40; ++x)
      q += q_term(k, 1e-4, f, x);
    CHECK(q > 1e-3);
  }
}

TEST_CASE("second difference, interpolation and the bias expansion")
{
  const TruePmf f = TruePmf::poisson(2.0);
  CHECK(second_difference(f, 0) == doctest::Approx(poisson2(1) - 2 * poisson2(0)));
  CHECK(second_difference(f, 3) == doctest::Approx(poisson2(4) - 2 * poisson2(3) + poisson2(2)));
  CHECK(interpolate_pmf(f, 2.0) == doctest::Approx(poisson2(2)));
  CHECK(interpolate_pmf(f, 2.25) == doctest::Approx(0.75 * poisson2(2) + 0.25 * poisson2(3)));

  const KernelSpec b = KernelSpec::binomial();
  double prev = INFINITY;
  for (double h : { 0.2, 0.1, 0.05 }) {
    const double err = std::abs(exact_bias(b, h, f, 2) - bias_expansion(b, h, f, 2));
    CHECK(err < prev);
    prev = err;
  }
  const double eb = std::abs(bias_expansion(b, 0.05, f, 2));
  const double ep = std::abs(bias_expansion(KernelSpec::poisson(), 0.05, f, 2));
  const double enb = std::abs(bias_expansion(KernelSpec::negative_binomial(), 0.05, f, 2));
  CHECK(eb <= ep);
  CHECK(ep <= enb);

  // small-h limit: half the limiting variance times f''(x)
  for (const KernelSpec& k : kStandard)
    CHECK(bias_expansion(k, 1e-9, f, 3) ==
          doctest::Approx(0.5 * kernel_variance(k, 3, 1e-9) * second_difference(f, 3)).epsilon(1e-6));
}

TEST_CASE("expected normalization")
{
  const TruePmf f = TruePmf::poisson(2.0);
  CHECK(expected_normalization(KernelSpec::dirac(), 1.0, f) == doctest::Approx(1.0).epsilon(1e-12));
  for (const KernelSpec& k : kStandard) {
    double total = 0.0;
    for (int x = 0; x <= 60; ++x)
      total += exact_bias(k, 0.3, f, x);
    CHECK(expected_normalization(k, 0.3, f) == doctest::Approx(1.0 + total).epsilon(1e-10));
  }

  // Monte Carlo: mean observed C over 500 seeded samples of size 200
  for (const KernelSpec& k : kStandard) {
    const int reps = 500;
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      CounterRng rng = CounterRng::for_replicate(11, 200, static_cast<std::uint64_t>(r));
      const PmfEstimate est = kernel_estimate_raw(sample_from_pmf(f, 200, rng), k, 0.05, { 0, 60 });
      s += est.normalization_constant;
      s2 += est.normalization_constant * est.normalization_constant;
    }
    const double mean = s / reps;
    const double se = std::sqrt((s2 / reps - mean * mean) / reps);
    CHECK(std::abs(mean - expected_normalization(k, 0.05, f)) <= 3 * se + 1e-12);
  }
}
