#include "dks/estimation.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace dks;

namespace {

Sample safou()
{
  return Sample::from_counts({ { 30, 28 }, { 31, 21 }, { 32, 11 } });
}

std::vector<int> random_values(oracle::TestRng& rng, int n, int top)
{
  std::vector<int> xs;
  for (int i = 0; i < n; ++i)
    xs.push_back(rng.below(top + 1));
  return xs;
}

} // namespace

TEST_CASE("Sample construction")
{
  const std::vector<int> xs = { 3, 1, 3, 0, 3 };
  const Sample s = Sample::from_values(xs);
  CHECK(s.size() == 5);
  CHECK(s.count(3) == 3);
  CHECK(s.count(2) == 0);
  CHECK(s.min() == 0);
  CHECK(s.max() == 3);
  CHECK(s.values() == std::vector<int>{ 0, 1, 3, 3, 3 });
  CHECK(Sample::from_counts({ { 0, 1 }, { 1, 1 }, { 3, 3 }, { 7, 0 } }) == s);

  CHECK_THROWS_AS(Sample::from_values(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(Sample::from_values(std::vector<int>{ 1, -2 }), std::invalid_argument);
  CHECK_THROWS_AS(Sample::from_counts({ { 2, 0 } }), std::invalid_argument);
  CHECK_THROWS_AS(Sample::from_counts({ { -1, 3 } }), std::invalid_argument);
}

TEST_CASE("evaluation ranges")
{
  const Sample s = safou();
  CHECK(observed_range(s).lo == 30);
  CHECK(observed_range(s).hi == 32);
  // 32 + ceil(3 sqrt(33)) + 2 = 32 + 18 + 2
  CHECK(extended_range(s).lo == 0);
  CHECK(extended_range(s).hi == 52);
  CHECK(eval_range(s, RangePolicy::observed).lo == 30);
  CHECK(eval_range(s, RangePolicy::extended).hi == 52);
}

TEST_CASE("frequency estimate")
{
  const Sample s = safou();
  const PmfEstimate f = frequency_estimate(s, observed_range(s));
  CHECK(f.at(30) == doctest::Approx(28.0 / 60.0));
  CHECK(f.at(31) == doctest::Approx(21.0 / 60.0));
  CHECK(f.at(32) == doctest::Approx(11.0 / 60.0));
  CHECK(f.at(29) == 0.0);
  CHECK(f.normalized);
  CHECK(f.normalization_constant == 1.0);
  CHECK(f.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(frequency_estimate(s, { 31, 40 }), std::invalid_argument);
  CHECK_THROWS_AS(frequency_estimate(s, { -1, 40 }), std::invalid_argument);

  const PmfEstimate wide = frequency_estimate(s, extended_range(s));
  CHECK(wide.values.size() == 53);
  CHECK(wide.at(0) == 0.0);
}

TEST_CASE("raw kernel estimate is the average kernel weight")
{
  oracle::TestRng rng(7);
  for (const KernelSpec& k : { KernelSpec::binomial(), KernelSpec::poisson(),
                               KernelSpec::negative_binomial(), KernelSpec::triangular(2) }) {
    const std::vector<int> xs = random_values(rng, 12, 9);
    const Sample s = Sample::from_values(xs);
    const double h = 0.4;
    const PmfEstimate est = kernel_estimate_raw(s, k, h, extended_range(s));
    CHECK_FALSE(est.normalized);
    double total = 0.0;
    for (int x = est.eval_lo; x <= est.eval_hi; ++x) {
      double want = 0.0;
      for (int v : xs)
        want += oracle::kernel(k, x, h, v);
      want /= xs.size();
      CHECK(est.at(x) == doctest::Approx(want).epsilon(1e-12));
      total += want;
    }
    CHECK(est.normalization_constant == doctest::Approx(total).epsilon(1e-12));

    const PmfEstimate norm = normalize_estimate(est);
    CHECK(norm.normalized);
    CHECK(norm.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(norm.normalization_constant == doctest::Approx(total).epsilon(1e-12));
    for (int x = est.eval_lo; x <= est.eval_hi; ++x)
      CHECK(norm.at(x) * total == doctest::Approx(est.at(x)).epsilon(1e-12));
    CHECK_THROWS_AS(normalize_estimate(norm), std::invalid_argument);
  }
}

TEST_CASE("raw estimate argument checks")
{
  const Sample s = safou();
  CHECK_THROWS_AS(kernel_estimate_raw(s, KernelSpec::binomial(), 1.5, observed_range(s)),
                  std::domain_error);
  CHECK_THROWS_AS(kernel_estimate_raw(s, KernelSpec::poisson(), 0.0, observed_range(s)),
                  std::domain_error);
  CHECK_THROWS_AS(kernel_estimate_raw(s, KernelSpec::poisson(), 0.5, { 5, 4 }),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernel_estimate_raw(s, KernelSpec::poisson(), 0.5, { -2, 4 }),
                  std::invalid_argument);
}

TEST_CASE("Dirac kernel reproduces the frequency estimator")
{
  const Sample s = safou();
  const PmfEstimate raw = kernel_estimate_raw(s, KernelSpec::dirac(), 1.0, observed_range(s));
  const PmfEstimate freq = frequency_estimate(s, observed_range(s));
  for (int x = 30; x <= 32; ++x)
    CHECK(raw.at(x) == doctest::Approx(freq.at(x)).epsilon(1e-15));
}

TEST_CASE("cv_score agrees with the naive leave-one-out oracle")
{
  oracle::TestRng rng(20240611);
  const std::vector<KernelSpec> kernels = { KernelSpec::binomial(), KernelSpec::poisson(),
                                            KernelSpec::negative_binomial(),
                                            KernelSpec::triangular(1),
                                            KernelSpec::triangular(3) };
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + rng.below(29);
    const std::vector<int> xs = random_values(rng, n, 2 + rng.below(12));
    const Sample s = Sample::from_values(xs);
    const KernelSpec& k = kernels[static_cast<std::size_t>(trial) % kernels.size()];
    const double h_top = k.family() == KernelFamily::binomial ? 1.0 : 3.0;
    const double h = 0.001 + rng.unit() * (h_top - 0.001);
    CHECK(std::abs(cv_score(s, k, h) - oracle::naive_cv(xs, k, h)) < 1e-12);
  }
}

TEST_CASE("cv_score of the Dirac kernel")
{
  // sum of squared frequencies minus 2/(n(n-1)) times the number of tied pairs
  const std::vector<int> xs = { 1, 1, 2, 4, 4, 4 };
  const Sample s = Sample::from_values(xs);
  const double squares = (4.0 + 1.0 + 9.0) / 36.0;
  const double tied = 2.0 + 6.0;
  CHECK(cv_score(s, KernelSpec::dirac(), 0.0) ==
        doctest::Approx(squares - 2.0 * tied / 30.0).epsilon(1e-14));
  CHECK_THROWS_AS(cv_score(Sample::from_values(std::vector<int>{ 3 }), KernelSpec::poisson(), 0.5),
                  std::invalid_argument);
}

TEST_CASE("search domain defaults and validation")
{
  const Sample s = safou();
  CHECK(SearchConfig::defaults_for(KernelSpec::binomial(), s).h_max == 1.0);
  CHECK(SearchConfig::defaults_for(KernelSpec::poisson(), s).h_max == 5.0);
  CHECK(SearchConfig::defaults_for(KernelSpec::negative_binomial(), s).h_max == 5.0);
  CHECK(SearchConfig::defaults_for(KernelSpec::triangular(1), s).h_max == 1.0);
  const Sample wide = Sample::from_counts({ { 0, 1 }, { 40, 1 } });
  CHECK(SearchConfig::defaults_for(KernelSpec::triangular(1), wide).h_max == 10.0);
  const Sample single = Sample::from_counts({ { 4, 9 } });
  CHECK(SearchConfig::defaults_for(KernelSpec::triangular(1), single).h_max == 0.5);
  CHECK(SearchConfig::defaults_for(KernelSpec::poisson(), s).h_min == 1e-4);

  SearchConfig bad;
  bad.h_max = 2.0;
  CHECK_THROWS_AS(bad.validate(KernelSpec::binomial()), std::invalid_argument);
  CHECK_NOTHROW(bad.validate(KernelSpec::poisson()));
  bad.h_min = 3.0;
  CHECK_THROWS_AS(bad.validate(KernelSpec::poisson()), std::invalid_argument);
  SearchConfig coarse;
  coarse.grid_points = 4;
  CHECK_THROWS_AS(coarse.validate(KernelSpec::poisson()), std::invalid_argument);
}

TEST_CASE("select_bandwidth finds the minimum of the CV curve")
{
  oracle::TestRng rng(99);
  for (const KernelSpec& k : { KernelSpec::binomial(), KernelSpec::poisson(),
                               KernelSpec::negative_binomial(), KernelSpec::triangular(1) }) {
    const std::vector<int> xs = random_values(rng, 25, 6);
    const Sample s = Sample::from_values(xs);
    const SearchConfig cfg = SearchConfig::defaults_for(k, s);
    const BandwidthSelection sel = select_bandwidth(s, k, cfg);
    CHECK(sel.h_cv >= cfg.h_min);
    CHECK(sel.h_cv <= cfg.h_max);
    CHECK(sel.cv_min == doctest::Approx(cv_score(s, k, sel.h_cv)).epsilon(1e-14));
    CHECK(sel.cv_curve.size() ==
          static_cast<std::size_t>(cfg.grid_points + 2 + cfg.refine_iterations));
    for (std::size_t i = 1; i < sel.cv_curve.size(); ++i)
      CHECK(sel.cv_curve[i - 1].h <= sel.cv_curve[i].h);
    for (const CvPoint& p : sel.cv_curve)
      CHECK(sel.cv_min <= p.score);

    // a fine independent scan cannot beat the selection by more than rounding
    double scan_best = INFINITY;
    for (int i = 0; i <= 400; ++i) {
      const double h = cfg.h_min * std::pow(cfg.h_max / cfg.h_min, i / 400.0);
      scan_best = std::min(scan_best, oracle::naive_cv(xs, k, h));
    }
    CHECK(sel.cv_min <= scan_best + 1e-9);
  }
}

TEST_CASE("bandwidth ties resolve to the smaller h")
{
  // The selected point is the first minimum of the h-sorted curve.
  const Sample s = Sample::from_counts({ { 3, 4 }, { 4, 4 } });
  SearchConfig cfg;
  cfg.h_min = 0.5;
  cfg.h_max = 1.0;
  cfg.grid_points = 16;
  cfg.refine_iterations = 0;
  const BandwidthSelection sel = select_bandwidth(s, KernelSpec::binomial(), cfg);
  const CvPoint* first_min = &sel.cv_curve.front();
  for (const CvPoint& p : sel.cv_curve)
    if (p.score < first_min->score)
      first_min = &p;
  CHECK(sel.h_cv == first_min->h);
}

TEST_CASE("Dirac selection has no bandwidth")
{
  const Sample s = safou();
  const BandwidthSelection sel = select_bandwidth(s, KernelSpec::dirac(), SearchConfig{});
  CHECK(sel.h_cv == 0.0);
  CHECK(sel.cv_curve.empty());
  CHECK(sel.cv_min == doctest::Approx(cv_score(s, KernelSpec::dirac(), 0.0)));
}

TEST_CASE("published bandwidths of the triangular kernel are recovered")
{
  const Sample s = safou();
  const BandwidthSelection sel =
    select_bandwidth(s, KernelSpec::triangular(1),
                     SearchConfig::defaults_for(KernelSpec::triangular(1), s));
  CHECK(sel.h_cv == doctest::Approx(0.08).epsilon(0.01));
  const Sample hura = Sample::from_counts({ { 25, 5 }, { 26, 5 }, { 27, 7 }, { 28, 8 },
                                            { 29, 11 }, { 30, 2 }, { 31, 1 }, { 32, 4 },
                                            { 33, 4 }, { 34, 2 }, { 35, 2 } });
  const BandwidthSelection hsel =
    select_bandwidth(hura, KernelSpec::triangular(1),
                     SearchConfig::defaults_for(KernelSpec::triangular(1), hura));
  CHECK(hsel.h_cv == doctest::Approx(4.65).epsilon(0.01));
}
