#pragma once

#include "dks/simulation.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dks {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Published reference values for the simulation and application tables.
namespace published {

inline constexpr std::size_t kSizes[] = { 15, 25, 50, 75, 100 };

// Table 1: mean ISE of the binomial kernel and frequency estimators,
// Poisson(5), n = 25 and 100.
inline constexpr std::size_t kTable1Sizes[] = { 25, 100 };
inline constexpr double kTable1Kernel[] = { 0.0099, 0.0023 };
inline constexpr double kTable1Frequency[] = { 0.0320, 0.0086 };

// Table 2: mean and sd of h_cv, Poisson(2); rows follow kSizes.
inline constexpr double kHMeanNegbin[] = { 0.55, 0.43, 0.31, 0.26, 0.23 };
inline constexpr double kHSdNegbin[] = { 0.301, 0.232, 0.149, 0.109, 0.086 };
inline constexpr double kHMeanPoisson[] = { 0.53, 0.33, 0.25, 0.21, 0.18 };
inline constexpr double kHSdPoisson[] = { 0.345, 0.217, 0.117, 0.080, 0.051 };
inline constexpr double kHMeanBinomial[] = { 0.40, 0.28, 0.17, 0.11, 0.09 };
inline constexpr double kHSdBinomial[] = { 0.360, 0.287, 0.175, 0.067, 0.032 };
inline constexpr double kHMeanTriangular[] = { 1.75, 1.89, 1.87, 1.81, 1.62 };
inline constexpr double kHSdTriangular[] = { 0.962, 1.074, 1.193, 1.264, 1.268 };

// Table 3 (values x 1e-3): MISE, integrated squared bias, integrated variance.
inline constexpr double kMiseDirac[] = { 52.8, 31.7, 15.8, 10.6, 7.9 };
inline constexpr double kIBiasNegbin[] = { 26.8, 24.5, 24.0, 24.2, 24.1 };
inline constexpr double kIVarNegbin[] = { 4.5, 3.1, 1.7, 1.2, 0.9 };
inline constexpr double kMiseNegbin[] = { 30.9, 27.5, 25.8, 25.5, 25.2 };
inline constexpr double kIBiasPoisson[] = { 18.5, 14.7, 13.2, 13.0, 12.9 };
inline constexpr double kIVarPoisson[] = { 4.8, 3.6, 2.0, 1.4, 1.4 };
inline constexpr double kMisePoisson[] = { 24.0, 18.0, 15.2, 14.4, 14.1 };
inline constexpr double kIBiasBinomial[] = { 14.3, 9.4, 4.0, 2.5, 2.4 };
inline constexpr double kIVarBinomial[] = { 18.3, 9.8, 4.3, 2.7, 2.1 };
inline constexpr double kMiseBinomial[] = { 32.7, 18.9, 7.9, 5.3, 4.5 };
inline constexpr double kIBiasTriangular[] = { 3.1, 2.4, 2.0, 1.9, 1.8 };
inline constexpr double kIVarTriangular[] = { 11.3, 7.7, 3.9, 2.8, 2.2 };
inline constexpr double kMiseTriangular[] = { 15.4, 9.7, 6.2, 4.8, 4.1 };

// Table 5: ISE and h_cv per dataset; kernel order negbin, poisson,
// binomial, triangular (p = 1).
inline constexpr double kSafouIse[] = { 0.0408, 0.0382, 0.0059, 0.0003 };
inline constexpr double kSafouH[] = { 0.05, 0.08, 0.004, 0.08 };
inline constexpr double kHuraIse[] = { 0.0305, 0.0261, 0.0104, 0.0112 };
inline constexpr double kHuraH[] = { 0.75, 0.87, 0.02, 4.65 };

} // namespace published

//! Negative binomial, Poisson, binomial and triangular (p = 1), the order of
//! the published tables.
std::vector<KernelSpec> table_kernels();

//! Poisson(5), n in {25, 100}, 250 replicates, binomial kernel vs Dirac.
SimulationConfig table1_config(std::uint64_t seed = kDefaultSeed);
//! Poisson(2), n in {15, 25, 50, 75, 100}, 250 replicates, all four kernels.
SimulationConfig table3_config(std::uint64_t seed = kDefaultSeed);

struct ReproRow
{
  std::string label;
  double published = 0.0;
  double computed = 0.0;
  std::string marker; // "*" flags the smallest ISE of a dataset

  double relative_error() const;
};

struct ReproTable
{
  int number = 0;
  std::string title;
  std::vector<ReproRow> rows;
  std::vector<std::string> notes;
};

ReproTable table1_rows(const StudyReport& report);
ReproTable table2_rows(const StudyReport& report);
ReproTable table3_rows(const StudyReport& report);

struct ApplicationFit
{
  std::string dataset;
  KernelSpec kernel = KernelSpec::dirac();
  double published_h = 0.0;
  double published_ise = 0.0;
  double ise_normalized = 0.0; // at published h, observed range
  double ise_raw = 0.0;        // at published h, observed range, no scaling
  double own_h = 0.0;          // CV-selected with the default search domain
  double own_ise = 0.0;        // normalized, observed range, at own_h
};

//! ISE of each kernel estimate against the empirical frequencies of the
//! builtin datasets.
std::vector<ApplicationFit> application_fits();
ReproTable table5_rows(const std::vector<ApplicationFit>& fits);

//! Runs the published protocol for table 1, 2, 3 or 5. replicates = 0 keeps
//! the published 250.
ReproTable reproduce_table(int table,
                           std::uint64_t seed = kDefaultSeed,
                           std::size_t replicates = 0);

void print_table(const ReproTable& table, std::ostream& out);

} // namespace dks
