#pragma once

#include "dks/estimation.hpp"
#include "dks/kernel.hpp"
#include "dks/risk.hpp"
#include "dks/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace dks {

struct SimulationConfig
{
  TruePmf true_pmf = TruePmf::poisson(2.0);
  std::vector<std::size_t> sample_sizes{ 15, 25, 50, 75, 100 };
  std::size_t replicates = 250;
  //! A Dirac (frequency) baseline is always added when absent.
  std::vector<KernelSpec> kernels;
  std::uint64_t seed = 42;
  //! Overrides the per-kernel default search domain when set.
  std::optional<SearchConfig> search;
  bool normalize = true;
  RangePolicy range = RangePolicy::extended;
  double tail_eps = kDefaultTailEps;
  //! 0 means: DKS_THREADS if set, otherwise the hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

Sample sample_from_pmf(const TruePmf& f, std::size_t n, CounterRng& rng);

double ise(const PmfEstimate& estimate, const TruePmf& reference);
double ise(const PmfEstimate& estimate, const PmfEstimate& reference);

struct ReplicateResult
{
  double h_cv = 0.0;
  double ise = 0.0;
  //! Estimate on [0, values.size()), zero beyond.
  std::vector<double> estimate_values;
};

//! Estimate for one kernel on a given sample: CV-selected bandwidth (none for
//! Dirac), evaluation over the configured range, optional normalization.
PmfEstimate fit_estimate(const Sample& sample,
                         const KernelSpec& kernel,
                         const SimulationConfig& config,
                         double* h_used = nullptr);

//! The sample depends only on (seed, n, replicate_index), so every kernel at
//! the same cell sees the same data.
ReplicateResult run_replicate(const SimulationConfig& config,
                              const KernelSpec& kernel,
                              std::size_t n,
                              std::size_t replicate_index);

struct StudyCell
{
  KernelSpec kernel = KernelSpec::dirac();
  std::size_t n = 0;
  double mean_mise = 0.0;
  double ibias = 0.0;
  double ivar = 0.0;
  double h_mean = 0.0;
  double h_sd = 0.0;
  std::vector<double> h_values;
  std::vector<double> ise_values;
};

struct StudyReport
{
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  bool normalize = true;
  std::vector<StudyCell> cells; // kernel-major, sizes in config order

  const StudyCell* find(const KernelSpec& kernel, std::size_t n) const;
};

//! Aggregates replicate results of one (kernel, n) cell: mean ISE, squared
//! bias of the pointwise mean estimate, pointwise variance, bandwidth moments.
StudyCell aggregate_cell(const KernelSpec& kernel,
                         std::size_t n,
                         const std::vector<ReplicateResult>& replicates,
                         const TruePmf& truth);

StudyReport run_study(const SimulationConfig& config);

//! Worker count used for a config (always >= 1).
unsigned resolve_threads(unsigned requested);

} // namespace dks
