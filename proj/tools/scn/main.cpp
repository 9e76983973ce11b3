#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "commands.hpp"
#include "scn/error.hpp"
#include "scn/parallel.hpp"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

void add_cover_flags(CLI::App* cmd, scn::cli::CoverArgs& c) {
  cmd->add_option("--epsilons", c.epsilons, "Ascending resolutions: 'a,b,c' or 'lo:hi:step'")->required();
  cmd->add_option("--algo", c.algorithm, "Cover estimator")
      ->check(CLI::IsMember({"kmedoids", "greedy", "exact"}))
      ->capture_default_str();
  cmd->add_flag("--faithful", c.faithful, "k-medoids: scan every k from n down to 1");
  cmd->add_option("--method", c.method, "k-medoids update rule")
      ->check(CLI::IsMember({"alternate", "swap"}))
      ->capture_default_str();
  cmd->add_option("--restarts", c.restarts, "k-medoids runs per k")->capture_default_str();
  cmd->add_option("--max-iterations", c.max_iterations, "k-medoids iteration cap")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace scn::cli;

  CLI::App app{"Sample covering numbers of transformation sets, invariant-class complexity and bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  DistancesArgs dist;
  auto* c_dist = app.add_subcommand("distances", "Orbit distances, pseudometric and Euclidean matrices for a sample");
  c_dist->add_option("--dataset", dist.dataset.paths, "Dataset manifest (.json) or CIFAR-10 batch files")
      ->required()
      ->check(CLI::ExistingFile);
  c_dist->add_option("--transform", dist.transform, "Preset name, inline JSON spec or spec file")->capture_default_str();
  c_dist->add_option("--orbits", dist.orbits, "Orbit manifest for the 3dview preset")->check(CLI::ExistingFile);
  c_dist->add_option("--seed", dist.seed)->capture_default_str();
  c_dist->add_option("--subset", dist.dataset.subset, "Random subset size");
  c_dist->add_flag("--balanced", dist.dataset.balanced, "Equal points per class in the subset");
  c_dist->add_option("--out", dist.out, "Run directory")->required();

  MetricArgs metric;
  auto* c_metric = app.add_subcommand("metric", "Shortest-path pseudometric of a distance matrix file");
  c_metric->add_option("--distances", metric.distances)->required()->check(CLI::ExistingFile);
  c_metric->add_option("--out", metric.out)->required();

  ScnArgs scn;
  auto* c_scn = app.add_subcommand("scn", "Sample covering number curve");
  c_scn->add_option("--run", scn.run, "Run directory from 'distances'")->check(CLI::ExistingDirectory);
  c_scn->add_option("--metric", scn.metric, "Pseudometric file")->check(CLI::ExistingFile);
  c_scn->add_option("--tag", scn.tag, "Transform tag for the CSV");
  add_cover_flags(c_scn, scn.cover);
  c_scn->add_option("--seed", scn.seed)->capture_default_str();
  c_scn->add_option("--out", scn.out, "CSV file (default stdout)");

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify-cover", "Check a center list against a pseudometric");
  c_verify->add_option("--run", verify.run)->check(CLI::ExistingDirectory);
  c_verify->add_option("--metric", verify.metric)->check(CLI::ExistingFile);
  c_verify->add_option("--epsilon", verify.epsilon)->required();
  c_verify->add_option("--centers", verify.centers, "Comma-separated 0-based indices")->required();
  c_verify->add_option("--out", verify.out);

  NormalizeArgs norm;
  auto* c_norm = app.add_subcommand("normalize", "Raw and normalized covering numbers for a run");
  c_norm->add_option("--run", norm.run)->required()->check(CLI::ExistingDirectory);
  add_cover_flags(c_norm, norm.cover);
  c_norm->add_option("--seed", norm.seed)->capture_default_str();
  c_norm->add_option("--out", norm.out);

  RademacherArgs rad;
  auto* c_rad = app.add_subcommand("rademacher", "Monte-Carlo Rademacher complexity of linear classes");
  c_rad->add_option("--mode", rad.mode)
      ->check(CLI::IsMember({"general", "invariant-l2", "invariant-inf", "example"}))
      ->capture_default_str();
  c_rad->add_option("--W", rad.w, "Weight norm bound")->capture_default_str();
  c_rad->add_option("--q", rad.q, "Norm exponent (inf allowed for general)")->capture_default_str();
  c_rad->add_option("--draws", rad.draws)->capture_default_str();
  c_rad->add_option("--seed", rad.seed)->capture_default_str();
  c_rad->add_option("--sigma", rad.sigma, "Gaussian data scale")->capture_default_str();
  c_rad->add_option("--d", rad.d)->capture_default_str();
  c_rad->add_option("--n", rad.n)->capture_default_str();
  c_rad->add_option("--data", rad.data, "CSV of n rows x d columns")->check(CLI::ExistingFile);
  c_rad->add_option("--matrix", rad.matrix, "CSV of the d x d matrix A")->check(CLI::ExistingFile);
  c_rad->add_option("--group", rad.group)->check(CLI::IsMember({"flip", "shift"}));
  c_rad->add_option("--tolerance", rad.tolerance, "Descent stopping tolerance")->capture_default_str();
  c_rad->add_option("--out", rad.out);

  BoundsArgs bounds;
  auto* c_bounds = app.add_subcommand("bounds", "Evaluate a generalization bound");
  c_bounds->add_option("--kind", bounds.kind)
      ->required()
      ->check(CLI::IsMember({"zero-resolution", "refined", "adversarial", "model-selection"}));
  c_bounds->add_option("--B", bounds.b, "Range bound of the class")->capture_default_str();
  c_bounds->add_option("--m", bounds.m, "Cover size");
  c_bounds->add_option("--n", bounds.n, "Sample size");
  c_bounds->add_option("--kappa", bounds.kappa)->capture_default_str();
  c_bounds->add_option("--epsilon", bounds.epsilon)->capture_default_str();
  c_bounds->add_option("--alpha", bounds.alpha)->capture_default_str();
  c_bounds->add_option("--mean", bounds.mean, "Adversarial loss mean");
  c_bounds->add_option("--losses", bounds.losses, "Orbit loss table CSV (n rows, K columns)")
      ->check(CLI::ExistingFile);
  c_bounds->add_option("--rademacher", bounds.rademacher)->capture_default_str();
  c_bounds->add_option("--k", bounds.k, "Index of the transformation set");
  c_bounds->add_option("--selected", bounds.selected, "1-based base sets in the chosen combination");
  c_bounds->add_option("--sets", bounds.sets, "Number of base sets");
  c_bounds->add_option("--delta", bounds.delta)->capture_default_str();
  c_bounds->add_option("--out", bounds.out);

  ReportArgs report;
  auto* c_report = app.add_subcommand("report", "Join covering-number curves of several runs");
  c_report->add_option("--runs", report.runs)->required()->check(CLI::ExistingDirectory);
  add_cover_flags(c_report, report.cover);
  c_report->add_option("--seed", report.seed)->capture_default_str();
  c_report->add_option("--out", report.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (threads > 0) scn::set_worker_count(threads);
    if (c_dist->parsed()) run_distances(dist);
    else if (c_metric->parsed()) run_metric(metric);
    else if (c_scn->parsed()) run_scn(scn);
    else if (c_verify->parsed()) run_verify_cover(verify);
    else if (c_norm->parsed()) run_normalize(norm);
    else if (c_rad->parsed()) run_rademacher(rad);
    else if (c_bounds->parsed()) run_bounds(bounds);
    else if (c_report->parsed()) run_report(report);
  } catch (const scn::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
