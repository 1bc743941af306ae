#include "dks/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace dks {

namespace {

// Kernels of a study in report order: Dirac baseline first.
std::vector<KernelSpec> study_kernels(const SimulationConfig& config)
{
  std::vector<KernelSpec> out{ KernelSpec::dirac() };
  for (const KernelSpec& k : config.kernels)
    if (std::find(out.begin(), out.end(), k) == out.end())
      out.push_back(k);
  return out;
}

ReplicateResult replicate_on_sample(const Sample& sample,
                                    const KernelSpec& kernel,
                                    const SimulationConfig& config)
{
  ReplicateResult result;
  const PmfEstimate est = fit_estimate(sample, kernel, config, &result.h_cv);
  result.ise = ise(est, config.true_pmf);
  result.estimate_values.assign(static_cast<std::size_t>(est.eval_hi) + 1, 0.0);
  for (int x = est.eval_lo; x <= est.eval_hi; ++x)
    result.estimate_values[static_cast<std::size_t>(x)] = est.at(x);
  return result;
}

template<class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& body)
{
  threads = static_cast<unsigned>(
    std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
              failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace

void SimulationConfig::validate() const
{
  if (replicates < 1)
    throw std::invalid_argument("study needs at least one replicate");
  if (sample_sizes.empty())
    throw std::invalid_argument("study needs at least one sample size");
  for (std::size_t n : sample_sizes)
    if (n < 2)
      throw std::invalid_argument("sample sizes must be at least 2");
  if (search)
    for (const KernelSpec& k : kernels)
      if (k.family() != KernelFamily::dirac)
        search->validate(k);
  if (!(tail_eps > 0.0 && tail_eps < 1.0))
    throw std::invalid_argument("tail_eps must lie in (0, 1)");
}

Sample sample_from_pmf(const TruePmf& f, std::size_t n, CounterRng& rng)
{
  if (n < 1)
    throw std::invalid_argument("sample size must be at least 1");
  std::vector<int> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    values.push_back(f.quantile(rng.uniform()));
  return Sample::from_values(values);
}

double ise(const PmfEstimate& estimate, const TruePmf& reference)
{
  const int hi = std::max(estimate.eval_hi, reference.cutoff());
  double total = 0.0;
  for (int x = std::min(estimate.eval_lo, 0); x <= hi; ++x) {
    const double d = estimate.at(x) - reference.query(x);
    total += d * d;
  }
  return total;
}

double ise(const PmfEstimate& estimate, const PmfEstimate& reference)
{
  const int lo = std::min(estimate.eval_lo, reference.eval_lo);
  const int hi = std::max(estimate.eval_hi, reference.eval_hi);
  double total = 0.0;
  for (int x = lo; x <= hi; ++x) {
    const double d = estimate.at(x) - reference.at(x);
    total += d * d;
  }
  return total;
}

PmfEstimate fit_estimate(const Sample& sample,
                         const KernelSpec& kernel,
                         const SimulationConfig& config,
                         double* h_used)
{
  const EvalRange range = eval_range(sample, config.range);
  if (kernel.family() == KernelFamily::dirac) {
    if (h_used)
      *h_used = 0.0;
    return frequency_estimate(sample, range);
  }
  const SearchConfig search =
    config.search.value_or(SearchConfig::defaults_for(kernel, sample));
  const double h =
    select_bandwidth(sample, kernel, search, config.tail_eps).h_cv;
  if (h_used)
    *h_used = h;
  PmfEstimate est = kernel_estimate_raw(sample, kernel, h, range);
  if (config.normalize)
    est = normalize_estimate(std::move(est));
  return est;
}

ReplicateResult run_replicate(const SimulationConfig& config,
                              const KernelSpec& kernel,
                              std::size_t n,
                              std::size_t replicate_index)
{
  CounterRng rng = CounterRng::for_replicate(config.seed, n, replicate_index);
  const Sample sample = sample_from_pmf(config.true_pmf, n, rng);
  return replicate_on_sample(sample, kernel, config);
}

StudyCell aggregate_cell(const KernelSpec& kernel,
                         std::size_t n,
                         const std::vector<ReplicateResult>& replicates,
                         const TruePmf& truth)
{
  if (replicates.empty())
    throw std::invalid_argument("cannot aggregate an empty replicate set");
  StudyCell cell;
  cell.kernel = kernel;
  cell.n = n;
  const double r = static_cast<double>(replicates.size());

  std::size_t width = static_cast<std::size_t>(truth.cutoff()) + 1;
  for (const ReplicateResult& rep : replicates) {
    cell.h_values.push_back(rep.h_cv);
    cell.ise_values.push_back(rep.ise);
    width = std::max(width, rep.estimate_values.size());
  }

  auto value_at = [](const ReplicateResult& rep, std::size_t x) {
    return x < rep.estimate_values.size() ? rep.estimate_values[x] : 0.0;
  };
  for (std::size_t x = 0; x < width; ++x) {
    double mean = 0.0;
    for (const ReplicateResult& rep : replicates)
      mean += value_at(rep, x);
    mean /= r;
    double spread = 0.0;
    for (const ReplicateResult& rep : replicates) {
      const double d = value_at(rep, x) - mean;
      spread += d * d;
    }
    const double bias = mean - truth.query(static_cast<int>(x));
    cell.ibias += bias * bias;
    cell.ivar += spread / r;
  }

  for (double v : cell.ise_values)
    cell.mean_mise += v;
  cell.mean_mise /= r;
  for (double h : cell.h_values)
    cell.h_mean += h;
  cell.h_mean /= r;
  if (replicates.size() > 1) {
    double ss = 0.0;
    for (double h : cell.h_values)
      ss += (h - cell.h_mean) * (h - cell.h_mean);
    cell.h_sd = std::sqrt(ss / (r - 1.0));
  }
  return cell;
}

StudyReport run_study(const SimulationConfig& config)
{
  config.validate();
  const std::vector<KernelSpec> kernels = study_kernels(config);
  const unsigned threads = resolve_threads(config.threads);

  StudyReport report;
  report.seed = config.seed;
  report.replicates = config.replicates;
  report.normalize = config.normalize;

  // results[k][s] holds the replicates of kernel k at size index s
  std::vector<std::vector<std::vector<ReplicateResult>>> results(
    kernels.size(),
    std::vector<std::vector<ReplicateResult>>(config.sample_sizes.size()));

  for (std::size_t s = 0; s < config.sample_sizes.size(); ++s) {
    const std::size_t n = config.sample_sizes[s];
    for (auto& per_kernel : results)
      per_kernel[s].resize(config.replicates);
    parallel_for(config.replicates, threads, [&](std::size_t rep) {
      CounterRng rng = CounterRng::for_replicate(config.seed, n, rep);
      const Sample sample = sample_from_pmf(config.true_pmf, n, rng);
      for (std::size_t k = 0; k < kernels.size(); ++k)
        results[k][s][rep] = replicate_on_sample(sample, kernels[k], config);
    });
  }

  for (std::size_t k = 0; k < kernels.size(); ++k)
    for (std::size_t s = 0; s < config.sample_sizes.size(); ++s)
      report.cells.push_back(aggregate_cell(
        kernels[k], config.sample_sizes[s], results[k][s], config.true_pmf));
  return report;
}

const StudyCell* StudyReport::find(const KernelSpec& kernel, std::size_t n) const
{
  for (const StudyCell& c : cells)
    if (c.kernel == kernel && c.n == n)
      return &c;
  return nullptr;
}

unsigned resolve_threads(unsigned requested)
{
  unsigned count = requested;
  if (count == 0)
    count = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DKS_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1)
        count = std::min(count, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      // unparsable caps are ignored
    }
  }
  return std::max(1u, count);
}

} // namespace dks
