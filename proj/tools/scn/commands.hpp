#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scn/cover.hpp"

namespace scn::cli {

/// Where to read a sample from and which part of it to use.
struct DatasetArgs {
  std::vector<std::string> paths;  // one manifest (.json) or CIFAR-10 batch files
  std::optional<std::size_t> subset;
  bool balanced = false;
};

/// Cover-estimation settings shared by scn, normalize and report.
struct CoverArgs {
  std::string epsilons;
  std::string algorithm = "kmedoids";
  bool faithful = false;
  std::string method = "alternate";
  std::size_t restarts = 1;
  std::size_t max_iterations = 100;
};

struct DistancesArgs {
  DatasetArgs dataset;
  std::string transform = "base";
  std::string orbits;
  std::uint64_t seed = 0;
  std::string out;
};

struct MetricArgs {
  std::string distances;
  std::string out;
};

struct ScnArgs {
  std::string run;
  std::string metric;
  std::string tag;
  CoverArgs cover;
  std::uint64_t seed = 0;
  std::string out;
};

struct VerifyArgs {
  std::string run;
  std::string metric;
  double epsilon = 0.0;
  std::string centers;
  std::string out;
};

struct NormalizeArgs {
  std::string run;
  CoverArgs cover;
  std::uint64_t seed = 0;
  std::string out;
};

struct RademacherArgs {
  std::string mode = "general";
  double w = 1.0;
  double q = 2.0;
  std::size_t draws = 1000;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  std::size_t d = 8;
  std::size_t n = 20;
  std::string data;
  std::string matrix;
  std::string group;
  double tolerance = 1e-10;
  std::string out;
};

struct BoundsArgs {
  std::string kind;
  double b = 1.0;
  double m = 0.0;
  double n = 0.0;
  double kappa = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::optional<double> mean;
  std::string losses;
  double rademacher = 0.0;
  std::optional<std::size_t> k;
  std::string selected;
  std::size_t sets = 0;
  double delta = 0.05;
  std::string out;
};

struct ReportArgs {
  std::vector<std::string> runs;
  CoverArgs cover;
  std::uint64_t seed = 0;
  std::string out;
};

/// Hard cap on the sample size handled by the dense distance kernels.
inline constexpr std::size_t kMaxPoints = 5000;

/// Parses "a,b,c" or "lo:hi:step" (inclusive of hi up to rounding).
std::vector<double> parse_epsilons(const std::string& text);
std::vector<std::size_t> parse_indices(const std::string& text);

void run_distances(const DistancesArgs& a);
void run_metric(const MetricArgs& a);
void run_scn(const ScnArgs& a);
void run_verify_cover(const VerifyArgs& a);
void run_normalize(const NormalizeArgs& a);
void run_rademacher(const RademacherArgs& a);
void run_bounds(const BoundsArgs& a);
void run_report(const ReportArgs& a);

}  // namespace scn::cli
