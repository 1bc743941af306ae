#include "dks/reproduce.hpp"

#include "dks/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <span>
#include <stdexcept>

namespace dks {

namespace {

struct KernelColumns
{
  KernelSpec kernel;
  std::span<const double> h_mean;
  std::span<const double> h_sd;
  std::span<const double> ibias;
  std::span<const double> ivar;
  std::span<const double> mise;
};

std::vector<KernelColumns> table_columns()
{
  using namespace published;
  return {
    { KernelSpec::negative_binomial(), kHMeanNegbin, kHSdNegbin, kIBiasNegbin,
      kIVarNegbin, kMiseNegbin },
    { KernelSpec::poisson(), kHMeanPoisson, kHSdPoisson, kIBiasPoisson,
      kIVarPoisson, kMisePoisson },
    { KernelSpec::binomial(), kHMeanBinomial, kHSdBinomial, kIBiasBinomial,
      kIVarBinomial, kMiseBinomial },
    { KernelSpec::triangular(1), kHMeanTriangular, kHSdTriangular,
      kIBiasTriangular, kIVarTriangular, kMiseTriangular },
  };
}

const StudyCell& require(const StudyReport& report,
                         const KernelSpec& kernel,
                         std::size_t n)
{
  const StudyCell* cell = report.find(kernel, n);
  if (!cell)
    throw std::invalid_argument("report has no cell for " + kernel.name() +
                                " at n=" + std::to_string(n));
  return *cell;
}

std::string cell_label(std::size_t n, const KernelSpec& k, const char* what)
{
  return "n=" + std::to_string(n) + " " + k.name() + " " + what;
}

} // namespace

double ReproRow::relative_error() const
{
  if (published == 0.0)
    return computed == 0.0 ? 0.0 : INFINITY;
  return (computed - published) / published;
}

std::vector<KernelSpec> table_kernels()
{
  return { KernelSpec::negative_binomial(), KernelSpec::poisson(),
           KernelSpec::binomial(), KernelSpec::triangular(1) };
}

SimulationConfig table1_config(std::uint64_t seed)
{
  SimulationConfig config;
  config.true_pmf = TruePmf::poisson(5.0);
  config.sample_sizes = { 25, 100 };
  config.replicates = 250;
  config.kernels = { KernelSpec::binomial() };
  config.seed = seed;
  config.normalize = true;
  config.range = RangePolicy::observed;
  return config;
}

SimulationConfig table3_config(std::uint64_t seed)
{
  SimulationConfig config;
  config.true_pmf = TruePmf::poisson(2.0);
  config.sample_sizes.assign(std::begin(published::kSizes),
                             std::end(published::kSizes));
  config.replicates = 250;
  config.kernels = table_kernels();
  config.seed = seed;
  config.normalize = true;
  config.range = RangePolicy::observed;
  return config;
}

ReproTable table1_rows(const StudyReport& report)
{
  ReproTable t;
  t.number = 1;
  t.title = "Mean ISE, Poisson(5): binomial kernel vs frequency estimator";
  for (std::size_t i = 0; i < std::size(published::kTable1Sizes); ++i) {
    const std::size_t n = published::kTable1Sizes[i];
    t.rows.push_back({ cell_label(n, KernelSpec::binomial(), "mean ISE"),
                       published::kTable1Kernel[i],
                       require(report, KernelSpec::binomial(), n).mean_mise,
                       {} });
    t.rows.push_back({ cell_label(n, KernelSpec::dirac(), "mean ISE"),
                       published::kTable1Frequency[i],
                       require(report, KernelSpec::dirac(), n).mean_mise,
                       {} });
  }
  t.notes.push_back("seed " + std::to_string(report.seed) + ", " +
                    std::to_string(report.replicates) + " replicates");
  return t;
}

ReproTable table2_rows(const StudyReport& report)
{
  ReproTable t;
  t.number = 2;
  t.title = "Mean and sd of h_cv, Poisson(2)";
  for (const KernelColumns& col : table_columns()) {
    for (std::size_t i = 0; i < std::size(published::kSizes); ++i) {
      const std::size_t n = published::kSizes[i];
      const StudyCell& cell = require(report, col.kernel, n);
      t.rows.push_back(
        { cell_label(n, col.kernel, "h mean"), col.h_mean[i], cell.h_mean, {} });
      t.rows.push_back(
        { cell_label(n, col.kernel, "h sd"), col.h_sd[i], cell.h_sd, {} });
    }
  }
  t.notes.push_back("seed " + std::to_string(report.seed) + ", " +
                    std::to_string(report.replicates) + " replicates");
  return t;
}

ReproTable table3_rows(const StudyReport& report)
{
  ReproTable t;
  t.number = 3;
  t.title = "Mean MISE, IBias, IVar (x 1e-3), Poisson(2)";
  for (std::size_t i = 0; i < std::size(published::kSizes); ++i) {
    const std::size_t n = published::kSizes[i];
    t.rows.push_back({ cell_label(n, KernelSpec::dirac(), "MISE"),
                       published::kMiseDirac[i],
                       1e3 * require(report, KernelSpec::dirac(), n).mean_mise,
                       {} });
  }
  for (const KernelColumns& col : table_columns()) {
    for (std::size_t i = 0; i < std::size(published::kSizes); ++i) {
      const std::size_t n = published::kSizes[i];
      const StudyCell& cell = require(report, col.kernel, n);
      t.rows.push_back({ cell_label(n, col.kernel, "IBias"), col.ibias[i],
                         1e3 * cell.ibias, {} });
      t.rows.push_back({ cell_label(n, col.kernel, "IVar"), col.ivar[i],
                         1e3 * cell.ivar, {} });
      t.rows.push_back({ cell_label(n, col.kernel, "MISE"), col.mise[i],
                         1e3 * cell.mean_mise, {} });
    }
  }
  t.notes.push_back("seed " + std::to_string(report.seed) + ", " +
                    std::to_string(report.replicates) + " replicates");
  t.notes.push_back("estimates normalized over the observed range [min, max]");
  return t;
}

std::vector<ApplicationFit> application_fits()
{
  std::vector<ApplicationFit> fits;
  const std::vector<KernelSpec> kernels = table_kernels();
  for (const char* name : { "safou", "hura" }) {
    const Dataset data = builtin_dataset(name);
    const bool safou = data.name == "safou";
    const EvalRange range = observed_range(data.sample);
    const PmfEstimate empirical = frequency_estimate(data.sample, range);
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      ApplicationFit fit;
      fit.dataset = data.name;
      fit.kernel = kernels[k];
      fit.published_h =
        safou ? published::kSafouH[k] : published::kHuraH[k];
      fit.published_ise =
        safou ? published::kSafouIse[k] : published::kHuraIse[k];

      const PmfEstimate raw =
        kernel_estimate_raw(data.sample, fit.kernel, fit.published_h, range);
      fit.ise_raw = ise(raw, empirical);
      fit.ise_normalized = ise(normalize_estimate(raw), empirical);

      const SearchConfig search =
        SearchConfig::defaults_for(fit.kernel, data.sample);
      fit.own_h = select_bandwidth(data.sample, fit.kernel, search).h_cv;
      fit.own_ise = ise(normalize_estimate(kernel_estimate_raw(
                          data.sample, fit.kernel, fit.own_h, range)),
                        empirical);
      fits.push_back(fit);
    }
  }
  return fits;
}

ReproTable table5_rows(const std::vector<ApplicationFit>& fits)
{
  ReproTable t;
  t.number = 5;
  t.title = "ISE against empirical frequencies, whitefly data";

  auto smallest = [&](const std::string& dataset, auto member) {
    const ApplicationFit* best = nullptr;
    for (const ApplicationFit& f : fits)
      if (f.dataset == dataset && (!best || f.*member < best->*member))
        best = &f;
    return best;
  };

  for (const ApplicationFit& f : fits) {
    const std::string prefix = f.dataset + " " + f.kernel.name() + " ";
    const std::string at_h = "(h=" + format_real(f.published_h, 4) + ")";
    t.rows.push_back({ prefix + "ISE normalized " + at_h, f.published_ise,
                       f.ise_normalized,
                       smallest(f.dataset, &ApplicationFit::ise_normalized) == &f
                         ? "*"
                         : "" });
    t.rows.push_back(
      { prefix + "ISE raw " + at_h, f.published_ise, f.ise_raw, {} });
    t.rows.push_back({ prefix + "h_cv (own CV)", f.published_h, f.own_h, {} });
    t.rows.push_back(
      { prefix + "ISE at own h_cv", f.published_ise, f.own_ise,
        smallest(f.dataset, &ApplicationFit::own_ise) == &f ? "*" : "" });
  }
  t.notes.push_back("* marks the smallest ISE per dataset");
  t.notes.push_back("estimates evaluated over the observed range [min, max]; "
                    "normalized estimates reproduce the published ISE");
  return t;
}

ReproTable reproduce_table(int table, std::uint64_t seed, std::size_t replicates)
{
  switch (table) {
    case 1: {
      SimulationConfig config = table1_config(seed);
      if (replicates)
        config.replicates = replicates;
      return table1_rows(run_study(config));
    }
    case 2:
    case 3: {
      SimulationConfig config = table3_config(seed);
      if (replicates)
        config.replicates = replicates;
      const StudyReport report = run_study(config);
      return table == 2 ? table2_rows(report) : table3_rows(report);
    }
    case 5:
      return table5_rows(application_fits());
    default:
      throw std::invalid_argument("no reproducible table " +
                                  std::to_string(table) +
                                  " (expected 1, 2, 3 or 5)");
  }
}

void print_table(const ReproTable& table, std::ostream& out)
{
  out << "Table " << table.number << ": " << table.title << '\n';
  std::size_t width = 5;
  for (const ReproRow& r : table.rows)
    width = std::max(width, r.label.size());
  out << std::left << std::setw(static_cast<int>(width)) << "cell"
      << "  " << std::right << std::setw(12) << "published" << std::setw(14)
      << "computed" << std::setw(12) << "rel_error" << '\n';
  for (const ReproRow& r : table.rows) {
    out << std::left << std::setw(static_cast<int>(width)) << r.label << "  "
        << std::right << std::setw(12) << format_real(r.published, 4)
        << std::setw(14) << format_real(r.computed, 6) << std::setw(12)
        << format_real(r.relative_error(), 3) << ' ' << r.marker << '\n';
  }
  for (const std::string& note : table.notes)
    out << "# " << note << '\n';
}

} // namespace dks
