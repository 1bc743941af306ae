#include "dks/cli.hpp"

#include "dks/data_io.hpp"
#include "dks/estimation.hpp"
#include "dks/kernel.hpp"
#include "dks/reproduce.hpp"
#include "dks/risk.hpp"
#include "dks/simulation.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dks {

namespace {

// Bad flag values that CLI11 itself cannot detect.
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

KernelSpec resolve_kernel(const std::string& name, std::optional<int> p)
{
  KernelSpec kernel = KernelSpec::dirac();
  try {
    kernel = KernelSpec::parse(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (kernel.family() != KernelFamily::triangular) {
    if (p)
      throw UsageError("--p only applies to the triangular kernel");
    return kernel;
  }
  const bool explicit_arm = name.find(':') != std::string::npos;
  if (p && explicit_arm && *p != kernel.arm())
    throw UsageError("--p " + std::to_string(*p) + " conflicts with '" + name +
                     "'");
  if (p && !explicit_arm) {
    if (*p < 1)
      throw UsageError("--p must be a positive integer");
    return KernelSpec::triangular(*p);
  }
  return kernel;
}

TruePmf resolve_truth(const std::string& text)
{
  const auto colon = text.find(':');
  if (colon == std::string::npos || text.substr(0, colon) != "poisson")
    throw UsageError("--true expects poisson:MU, got '" + text + "'");
  const std::string number = text.substr(colon + 1);
  std::size_t used = 0;
  double mean = 0.0;
  try {
    mean = std::stod(number, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != number.size() || !std::isfinite(mean) || mean <= 0.0)
    throw UsageError("--true poisson:MU needs a positive mean, got '" + number +
                     "'");
  return TruePmf::poisson(mean);
}

Dataset resolve_data(const std::string& source)
{
  constexpr std::string_view prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) {
    try {
      return builtin_dataset(std::string_view(source).substr(prefix.size()));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return load_counts(source);
}

RangePolicy resolve_range(const std::string& text)
{
  return text == "extended" ? RangePolicy::extended : RangePolicy::observed;
}

std::ofstream open_output(const std::string& path)
{
  std::ofstream file(path, std::ios::binary);
  if (!file)
    throw std::runtime_error("cannot open '" + path +
                             "' for writing: " + std::strerror(errno));
  return file;
}

struct EstimateArgs
{
  std::string data;
  std::string kernel;
  std::optional<int> p;
  std::optional<double> h;
  bool cv = false;
  bool normalize = false;
  std::string range = "observed";
  std::string out_path;
};

int run_estimate(const EstimateArgs& a, std::ostream& out)
{
  const KernelSpec kernel = resolve_kernel(a.kernel, a.p);
  const Dataset data = resolve_data(a.data);
  const EvalRange range = eval_range(data.sample, resolve_range(a.range));

  double h = 0.0;
  PmfEstimate raw;
  if (kernel.family() == KernelFamily::dirac) {
    raw = frequency_estimate(data.sample, range);
  } else {
    if (a.cv || !a.h) {
      if (data.sample.size() < 2)
        throw std::runtime_error("cross-validation needs at least two "
                                 "observations");
      h = select_bandwidth(data.sample, kernel,
                           SearchConfig::defaults_for(kernel, data.sample))
            .h_cv;
    } else {
      h = *a.h;
    }
    raw = kernel_estimate_raw(data.sample, kernel, h, range);
  }
  const PmfEstimate normalized =
    raw.normalized ? raw : normalize_estimate(raw);

  std::ostringstream table;
  table << "x,raw,normalized,estimate\n";
  for (int x = raw.eval_lo; x <= raw.eval_hi; ++x) {
    const double n_value = normalized.at(x);
    table << x << ',' << format_real(raw.at(x), 10) << ','
          << format_real(n_value, 10) << ','
          << format_real(a.normalize ? n_value : raw.at(x), 10) << '\n';
  }

  out << "# data=" << data.name << " n=" << data.sample.size()
      << " kernel=" << kernel.name() << " h=" << format_real(h, 8)
      << " C=" << format_real(normalized.normalization_constant, 10)
      << " range=[" << raw.eval_lo << "," << raw.eval_hi << "]\n";
  if (a.out_path.empty()) {
    out << table.str();
  } else {
    std::ofstream file = open_output(a.out_path);
    file << table.str();
    if (!file)
      throw std::runtime_error("failed to write '" + a.out_path + "'");
    out << "wrote " << a.out_path << '\n';
  }
  return kExitOk;
}

struct CvArgs
{
  std::string data;
  std::string kernel;
  std::optional<int> p;
  std::optional<double> h_min;
  std::optional<double> h_max;
  std::optional<int> grid;
  std::optional<int> refine;
  std::string out_path;
};

int run_cv(const CvArgs& a, std::ostream& out)
{
  const KernelSpec kernel = resolve_kernel(a.kernel, a.p);
  const Dataset data = resolve_data(a.data);
  if (data.sample.size() < 2)
    throw std::runtime_error("cross-validation needs at least two observations");
  SearchConfig search = SearchConfig::defaults_for(kernel, data.sample);
  if (a.h_min)
    search.h_min = *a.h_min;
  if (a.h_max)
    search.h_max = *a.h_max;
  if (a.grid)
    search.grid_points = *a.grid;
  if (a.refine)
    search.refine_iterations = *a.refine;
  try {
    search.validate(kernel);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const BandwidthSelection sel = select_bandwidth(data.sample, kernel, search);

  std::ostringstream curve;
  curve << "h,cv\n";
  for (const CvPoint& pt : sel.cv_curve)
    curve << format_real(pt.h, 10) << ',' << format_real(pt.score, 12) << '\n';

  out << "# data=" << data.name << " n=" << data.sample.size()
      << " kernel=" << kernel.name() << " h_cv=" << format_real(sel.h_cv, 8)
      << " cv_min=" << format_real(sel.cv_min, 10) << '\n';
  if (a.out_path.empty()) {
    out << curve.str();
  } else {
    std::ofstream file = open_output(a.out_path);
    file << curve.str();
    if (!file)
      throw std::runtime_error("failed to write '" + a.out_path + "'");
    out << "wrote " << a.out_path << '\n';
  }
  return kExitOk;
}

struct SimulateArgs
{
  std::string truth = "poisson:2";
  std::vector<std::size_t> sizes{ 15, 25, 50, 75, 100 };
  std::size_t replicates = 250;
  std::vector<std::string> kernels{ "negbin", "poisson", "binomial",
                                    "triangular" };
  std::optional<int> p;
  std::uint64_t seed = kDefaultSeed;
  std::string out_path;
  std::string format = "csv";
  std::string range = "observed";
  bool raw = false;
  unsigned threads = 0;
};

int run_simulate(const SimulateArgs& a, std::ostream& out)
{
  SimulationConfig config;
  config.true_pmf = resolve_truth(a.truth);
  config.sample_sizes = a.sizes;
  config.replicates = a.replicates;
  config.kernels.clear();
  for (const std::string& name : a.kernels)
    config.kernels.push_back(resolve_kernel(
      name, name.rfind("triangular", 0) == 0 ? a.p : std::nullopt));
  config.seed = a.seed;
  config.normalize = !a.raw;
  config.range = resolve_range(a.range);
  config.threads = a.threads;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const StudyReport report = run_study(config);
  const ReportFormat format =
    a.format == "json" ? ReportFormat::json : ReportFormat::csv;
  if (a.out_path.empty()) {
    write_report(report, format, out);
    return kExitOk;
  }
  write_report(report, format, std::filesystem::path(a.out_path));
  write_report(report, ReportFormat::csv, out);
  out << "wrote " << a.out_path << '\n';
  return kExitOk;
}

struct RiskArgs
{
  std::string truth = "poisson:2";
  std::string kernel;
  std::optional<int> p;
  double h = 0.0;
  std::size_t n = 0;
  bool per_x = false;
};

int run_risk(const RiskArgs& a, std::ostream& out)
{
  const KernelSpec kernel = resolve_kernel(a.kernel, a.p);
  const TruePmf f = resolve_truth(a.truth);
  const double h = kernel.family() == KernelFamily::dirac ? 1.0 : a.h;
  if (kernel.family() != KernelFamily::dirac) {
    try {
      check_kernel_args(kernel, 0, h);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  }
  const RiskBreakdown r = exact_mise(kernel, h, f, a.n);
  const AmiseTerms terms = amise_terms(kernel, h, f, a.n);

  out << "kernel," << kernel.name() << '\n'
      << "h," << format_real(a.h, 10) << '\n'
      << "n," << a.n << '\n'
      << "mise," << format_real(r.mise, 12) << '\n'
      << "integrated_squared_bias," << format_real(r.integrated_squared_bias, 12)
      << '\n'
      << "integrated_variance," << format_real(r.integrated_variance, 12) << '\n'
      << "amise," << format_real(r.amise, 12) << '\n'
      << "amise_bias," << format_real(terms.bias, 12) << '\n'
      << "amise_variance," << format_real(terms.variance, 12) << '\n'
      << "bias_remainder," << format_real(r.bias_remainder, 12) << '\n'
      << "variance_remainder," << format_real(r.variance_remainder, 12) << '\n'
      << "expected_normalization,"
      << format_real(expected_normalization(kernel, h, f), 12) << '\n'
      << "frequency_mise," << format_real(frequency_mise(f, a.n), 12) << '\n';
  if (a.per_x) {
    out << "x,f,bias,variance,q,r\n";
    for (int x = r.x_lo; x <= r.x_hi; ++x) {
      const auto i = static_cast<std::size_t>(x - r.x_lo);
      out << x << ',' << format_real(f.query(x), 10) << ','
          << format_real(r.bias[i], 10) << ','
          << format_real(r.variance[i], 10) << ','
          << format_real(r.q_term[i], 10) << ',' << format_real(r.r_term[i], 10)
          << '\n';
    }
  }
  return kExitOk;
}

struct KernelInfoArgs
{
  std::string kernel;
  std::optional<int> p;
  int x_max = 20;
  std::vector<double> h_list{ 0.1, 0.3, 0.5, 0.7, 0.9 };
  std::optional<int> at;
};

int run_kernel_info(const KernelInfoArgs& a, std::ostream& out)
{
  const KernelSpec kernel = resolve_kernel(a.kernel, a.p);
  if (a.x_max < 0)
    throw UsageError("--x-max must be non-negative");
  for (double h : a.h_list) {
    try {
      check_kernel_args(kernel, 0, h);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  }

  if (a.at) {
    if (*a.at < 0)
      throw UsageError("--at must be non-negative");
    out << "h,y,pmf\n";
    for (double h : a.h_list) {
      const SupportRange s = kernel_support(kernel, *a.at, h);
      for (int y = s.lo; y <= s.truncation_hi; ++y)
        out << format_real(h, 8) << ',' << y << ','
            << format_real(kernel_pmf(kernel, *a.at, h, y), 12) << '\n';
    }
    return kExitOk;
  }

  const bool standard = kernel.is_standard();
  out << "x,h,modal_probability,modal_limit,mean,variance,r1,r2\n";
  for (int x = 0; x <= a.x_max; ++x) {
    const std::string limit =
      standard ? format_real(modal_limit(kernel, x), 12) : "";
    for (double h : a.h_list) {
      out << x << ',' << format_real(h, 8) << ','
          << format_real(modal_probability(kernel, x, h), 12) << ',' << limit
          << ',' << format_real(kernel_mean(kernel, x, h), 12) << ','
          << format_real(kernel_variance(kernel, x, h), 12) << ','
          << format_real(ratio_r1(x), 12) << ',' << format_real(ratio_r2(x), 12)
          << '\n';
    }
  }
  return kExitOk;
}

struct ReproduceArgs
{
  int table = 0;
  std::uint64_t seed = kDefaultSeed;
  std::size_t replicates = 0;
};

int run_reproduce(const ReproduceArgs& a, std::ostream& out)
{
  print_table(reproduce_table(a.table, a.seed, a.replicates), out);
  return kExitOk;
}

void add_kernel_flags(CLI::App* cmd, std::string& kernel, std::optional<int>& p)
{
  cmd
    ->add_option("--kernel", kernel,
                 "dirac, binomial, poisson, negbin or triangular[:P]")
    ->required();
  cmd->add_option("--p", p, "Arm of the triangular kernel (default 1)");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Discrete associated kernel estimation of count-data p.m.f.s",
                "dks" };
  // "--h" is the bandwidth, so help is long-form only
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", "dks 1.0.0");

  EstimateArgs est;
  CLI::App* estimate =
    app.add_subcommand("estimate", "Kernel estimate of a p.m.f. from data");
  estimate
    ->add_option("--data", est.data, "Count file path or builtin:NAME (hura, safou)")
    ->required();
  add_kernel_flags(estimate, est.kernel, est.p);
  CLI::Option* h_opt =
    estimate->add_option("--h", est.h, "Bandwidth")->check(CLI::PositiveNumber);
  estimate->add_flag("--cv", est.cv, "Select h by cross-validation (default)")
    ->excludes(h_opt);
  estimate->add_flag("--normalize", est.normalize,
                     "Report the normalized estimate in the estimate column");
  estimate
    ->add_option("--range", est.range, "Evaluation range: observed [min, max] "
                                       "or extended [0, max + 3 sqrt(max+1) + 2]")
    ->check(CLI::IsMember({ "observed", "extended" }))
    ->capture_default_str();
  estimate->add_option("--out", est.out_path, "Write the table as CSV");

  CvArgs cva;
  CLI::App* cv = app.add_subcommand("cv", "Cross-validation bandwidth selection");
  cv->add_option("--data", cva.data, "Count file path or builtin:NAME")
    ->required();
  add_kernel_flags(cv, cva.kernel, cva.p);
  cv->add_option("--h-min", cva.h_min, "Lower end of the search domain")
    ->check(CLI::PositiveNumber);
  cv->add_option("--h-max", cva.h_max, "Upper end of the search domain")
    ->check(CLI::PositiveNumber);
  cv->add_option("--grid", cva.grid, "Number of log-spaced grid points")
    ->check(CLI::Range(2, 100000));
  cv->add_option("--refine", cva.refine, "Golden-section iterations")
    ->check(CLI::Range(0, 1000));
  cv->add_option("--out", cva.out_path, "Write the CV curve as CSV");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo study");
  simulate->add_option("--true", sim.truth, "True p.m.f., poisson:MU")
    ->capture_default_str();
  simulate->add_option("--sizes", sim.sizes, "Sample sizes")
    ->delimiter(',')
    ->capture_default_str();
  simulate->add_option("--replicates", sim.replicates, "Replicates per size")
    ->check(CLI::PositiveNumber)
    ->capture_default_str();
  simulate->add_option("--kernels", sim.kernels, "Kernels; dirac is always included")
    ->delimiter(',')
    ->capture_default_str();
  simulate->add_option("--p", sim.p, "Arm for plain 'triangular' (default 1)");
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", sim.out_path, "Write the report here");
  simulate->add_option("--format", sim.format, "Report format for --out")
    ->check(CLI::IsMember({ "csv", "json" }))
    ->capture_default_str();
  simulate->add_option("--range", sim.range, "Evaluation range: observed or extended")
    ->check(CLI::IsMember({ "observed", "extended" }))
    ->capture_default_str();
  simulate->add_flag("--raw", sim.raw, "Skip normalization of kernel estimates");
  simulate->add_option("--threads", sim.threads,
                       "Worker threads (0 = hardware; DKS_THREADS caps)");

  RiskArgs risk_args;
  CLI::App* risk = app.add_subcommand("risk", "Exact and asymptotic risk");
  risk->add_option("--true", risk_args.truth, "True p.m.f., poisson:MU")
    ->capture_default_str();
  add_kernel_flags(risk, risk_args.kernel, risk_args.p);
  risk->add_option("--h", risk_args.h, "Bandwidth")->required();
  risk->add_option("--n", risk_args.n, "Sample size")
    ->required()
    ->check(CLI::PositiveNumber);
  risk->add_flag("--per-x", risk_args.per_x, "Also print bias, variance, Q and R per x");

  KernelInfoArgs info;
  CLI::App* kernel_info =
    app.add_subcommand("kernel-info", "Modal probabilities, moments and ratios");
  add_kernel_flags(kernel_info, info.kernel, info.p);
  kernel_info->add_option("--x-max", info.x_max, "Largest target x")
    ->capture_default_str();
  kernel_info->add_option("--h-list", info.h_list, "Bandwidths")
    ->delimiter(',')
    ->capture_default_str();
  kernel_info->add_option("--at", info.at,
                          "Print the kernel p.m.f. around this target instead");

  ReproduceArgs rep;
  CLI::App* reproduce =
    app.add_subcommand("reproduce", "Published vs computed values of a table");
  reproduce->add_option("--table", rep.table, "Table 1, 2, 3 or 5")
    ->required()
    ->check(CLI::IsMember({ 1, 2, 3, 5 }));
  reproduce->add_option("--seed", rep.seed, "Random seed")->capture_default_str();
  reproduce->add_option("--replicates", rep.replicates,
                        "Override the replicate count (0 keeps 250)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*estimate)
      return run_estimate(est, out);
    if (*cv)
      return run_cv(cva, out);
    if (*simulate)
      return run_simulate(sim, out);
    if (*risk)
      return run_risk(risk_args, out);
    if (*kernel_info)
      return run_kernel_info(info, out);
    if (*reproduce)
      return run_reproduce(rep, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

} // namespace dks
