#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "scn/bounds.hpp"
#include "scn/complexity.hpp"
#include "scn/error.hpp"
#include "scn/io.hpp"
#include "scn/orbit_metric.hpp"
#include "scn/subset.hpp"
#include "scn/transforms.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace scn::cli {
namespace {

constexpr const char* kOrbitFile = "orbit_distances.bin";
constexpr const char* kMetricFile = "pseudometric.bin";
constexpr const char* kEuclideanFile = "euclidean.bin";
constexpr const char* kProvenanceFile = "provenance.json";

double parse_real(const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + token + "'");
  }
  if (used != token.size() || !std::isfinite(v)) throw UsageError("not a number: '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

/// Runs `emit` against the named file, or stdout for "" and "-".
void with_output(const std::string& path, const std::function<void(std::ostream&)>& emit) {
  if (path.empty() || path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  emit(out);
  if (!out) throw DataError(path + ": write failed");
}

Sample load_dataset(const std::vector<std::string>& paths) {
  if (paths.empty()) throw UsageError("--dataset is required");
  if (paths.size() == 1 && fs::path(paths[0]).extension() == ".json") return load_manifest(paths[0]);
  std::vector<fs::path> batches(paths.begin(), paths.end());
  return load_cifar_batches(batches);
}

KMedoidsOptions kmedoids_options(const CoverArgs& c) {
  KMedoidsOptions o;
  o.schedule = c.faithful ? KSchedule::full() : KSchedule::adaptive();
  if (c.method == "alternate") {
    o.method = KMedoidsMethod::alternate;
  } else if (c.method == "swap") {
    o.method = KMedoidsMethod::swap;
  } else {
    throw UsageError("unknown k-medoids method '" + c.method + "' (alternate, swap)");
  }
  if (c.restarts == 0) throw UsageError("--restarts must be at least 1");
  o.restarts = c.restarts;
  o.max_iterations = c.max_iterations;
  return o;
}

/// Artifacts written by `distances` into one run directory.
struct Run {
  fs::path dir;
  json provenance;

  static Run open(const std::string& dir) {
    Run r{dir, {}};
    const fs::path p = r.dir / kProvenanceFile;
    std::ifstream in(p);
    if (!in) throw DataError(p.string() + ": missing run provenance");
    try {
      r.provenance = json::parse(in);
    } catch (const json::exception& e) {
      throw DataError(p.string() + ": " + e.what());
    }
    return r;
  }

  DistanceMatrix matrix(const char* name) const { return load_distance_matrix(dir / name); }

  std::string tag() const { return provenance.value("transform_label", std::string("unknown")); }

  std::vector<Label> labels() const {
    try {
      return provenance.at("labels").get<std::vector<Label>>();
    } catch (const json::exception& e) {
      throw DataError((dir / kProvenanceFile).string() + ": bad labels: " + e.what());
    }
  }
};

DistanceMatrix metric_from(const std::string& run, const std::string& metric) {
  if (!metric.empty()) return load_distance_matrix(metric);
  if (!run.empty()) return Run::open(run).matrix(kMetricFile);
  throw UsageError("give --run or --metric");
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows, const std::string& what) {
  if (rows.empty()) throw DataError(what + ": empty");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw DataError(what + ": ragged row " + std::to_string(i + 1));
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

double parse_q(double q) {
  if (std::isinf(q)) return std::numeric_limits<double>::infinity();
  if (q < 1.0) throw UsageError("q must be at least 1");
  return q;
}

}  // namespace

std::vector<double> parse_epsilons(const std::string& text) {
  std::vector<double> eps;
  const auto range = split(text, ':');
  if (range.size() == 3 && text.find(',') == std::string::npos) {
    const double lo = parse_real(range[0]), hi = parse_real(range[1]), step = parse_real(range[2]);
    if (!(step > 0.0) || hi < lo) throw UsageError("epsilon range needs lo <= hi and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) eps.push_back(lo + static_cast<double>(i) * step);
  } else {
    for (const auto& tok : split(text, ',')) eps.push_back(parse_real(tok));
  }
  if (eps.empty()) throw UsageError("epsilon grid is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] < 0.0) throw UsageError("epsilon must be nonnegative");
    if (i > 0 && eps[i] <= eps[i - 1]) throw UsageError("epsilon grid must be strictly ascending");
  }
  return eps;
}

std::vector<std::size_t> parse_indices(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& tok : split(text, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      throw UsageError("not an index: '" + tok + "'");
    }
    if (used != tok.size() || v < 0) throw UsageError("not an index: '" + tok + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void run_distances(const DistancesArgs& a) {
  if (a.out.empty()) throw UsageError("--out is required");
  const Sample full = load_dataset(a.dataset.paths);

  std::vector<std::size_t> positions;
  if (a.dataset.subset) {
    positions = select_subset(full, *a.dataset.subset, a.dataset.balanced, a.seed);
  } else {
    positions.resize(full.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  }
  if (positions.size() > kMaxPoints)
    throw UsageError("sample has " + std::to_string(positions.size()) + " points; the limit is " +
                     std::to_string(kMaxPoints) + " (use --subset)");
  const Sample sample = full.subset(positions);

  const TransformSpec spec =
      a.transform == "3dview" ? preset("3dview", a.orbits) : parse_transform(a.transform);

  const DistanceMatrix d = direct_orbit_distances(sample, spec, a.seed);
  const DistanceMatrix rho = shortest_path_metric(d);
  const DistanceMatrix e = euclidean_distances(sample);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  save_distance_matrix(d, dir / kOrbitFile);
  save_distance_matrix(rho, dir / kMetricFile);
  save_distance_matrix(e, dir / kEuclideanFile);

  json prov;
  prov["dataset"] = a.dataset.paths;
  prov["seed"] = a.seed;
  prov["transform"] = spec_to_json(spec);
  prov["transform_label"] = spec.label();
  prov["subset"] = positions;
  prov["balanced"] = a.dataset.balanced;
  prov["ids"] = sample.ids();
  prov["labels"] = sample.labels();
  prov["n"] = sample.size();
  with_output((dir / kProvenanceFile).string(), [&](std::ostream& out) { out << prov.dump(2) << '\n'; });
}

void run_metric(const MetricArgs& a) {
  if (a.distances.empty() || a.out.empty()) throw UsageError("--distances and --out are required");
  save_distance_matrix(shortest_path_metric(load_distance_matrix(a.distances)), a.out);
}

void run_scn(const ScnArgs& a) {
  const DistanceMatrix rho = metric_from(a.run, a.metric);
  const auto eps = parse_epsilons(a.cover.epsilons);
  const auto algo = parse_algorithm(a.cover.algorithm);
  const std::string tag = !a.tag.empty() ? a.tag : !a.run.empty() ? Run::open(a.run).tag() : "unknown";
  const auto curve = scn_curve(rho, eps, algo, a.seed, kmedoids_options(a.cover));
  with_output(a.out, [&](std::ostream& out) {
    CsvWriter csv(out, {"epsilon", "count", "algorithm", "seed", "transform"});
    for (const auto& r : curve) csv << r.epsilon << r.count << to_string(r.algorithm) << r.seed << tag;
  });
}

void run_verify_cover(const VerifyArgs& a) {
  const DistanceMatrix rho = metric_from(a.run, a.metric);
  const auto centers = parse_indices(a.centers);
  const CoverCheck check = verify_cover(rho, a.epsilon, centers);
  with_output(a.out, [&](std::ostream& out) {
    CsvWriter csv(out, {"index", "center", "distance", "covered"});
    if (check.valid()) {
      const auto& c = *check.cover;
      for (std::size_t i = 0; i < c.assignment.size(); ++i)
        csv << i << c.assignment[i] << rho(i, c.assignment[i]) << true;
    } else {
      for (const auto& u : check.uncovered) csv << u.index << u.nearest_center << u.distance << false;
    }
  });
  if (check.valid())
    std::cerr << "valid " << format_real(a.epsilon) << "-cover with " << check.cover->count() << " centers\n";
  else
    std::cerr << check.uncovered.size() << " point(s) not within " << format_real(a.epsilon) << " of any center\n";
}

void run_normalize(const NormalizeArgs& a) {
  if (a.run.empty()) throw UsageError("--run is required");
  const Run run = Run::open(a.run);
  const DistanceMatrix rho = run.matrix(kMetricFile);
  const DistanceMatrix d = run.matrix(kOrbitFile);
  const DistanceMatrix e = run.matrix(kEuclideanFile);
  const auto labels = run.labels();
  if (labels.size() != rho.size()) throw DataError(a.run + ": label count mismatch");
  const auto eps = parse_epsilons(a.cover.epsilons);
  const auto algo = parse_algorithm(a.cover.algorithm);
  const auto opts = kmedoids_options(a.cover);
  with_output(a.out, [&](std::ostream& out) {
    CsvWriter csv(out, {"epsilon", "count", "normalized_count", "ratio", "effective_epsilon", "reliable",
                        "algorithm", "seed", "transform"});
    for (double epsilon : eps) {
      const auto raw = estimate_cover(rho, epsilon, algo, a.seed, opts);
      const auto norm = normalized_scn(rho, d, e, labels, epsilon, algo, a.seed, opts);
      csv << epsilon << raw.count << norm.count << norm.ratio << norm.effective_epsilon << norm.reliable
          << to_string(algo) << a.seed << run.tag();
    }
  });
}

void run_rademacher(const RademacherArgs& a) {
  const double q = parse_q(a.q);
  if (a.draws == 0) throw UsageError("--draws must be positive");
  if (a.mode == "example") {
    const auto report = example_d1_report(a.d, a.n, a.sigma, a.w, a.draws, a.seed);
    with_output(a.out, [&](std::ostream& out) { out << format_report(report); });
    return;
  }

  const Matrix x = a.data.empty() ? gaussian_sample_matrix(a.n, a.d, a.sigma, a.seed)
                                  : to_matrix(read_numeric_csv(a.data), a.data);
  const auto dim = static_cast<std::size_t>(x.cols());

  auto group = [&]() -> Matrix {
    if (!a.matrix.empty()) {
      Matrix m = to_matrix(read_numeric_csv(a.matrix), a.matrix);
      if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim)
        throw DataError(a.matrix + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
      return m;
    }
    if (a.group == "flip") return flip_matrix(dim);
    if (a.group == "shift") return cyclic_shift_matrix(dim);
    throw UsageError("invariant modes need --matrix or --group {flip,shift}");
  };

  ComplexityEstimate est;
  if (a.mode == "general") {
    est = rademacher_general(x, a.w, q, a.draws, a.seed);
  } else if (a.mode == "invariant-l2") {
    est = rademacher_invariant_l2(x, group(), a.w, a.draws, a.seed);
  } else if (a.mode == "invariant-inf") {
    est = rademacher_invariant_inf(x, group(), a.w, q, a.draws, a.seed, a.tolerance);
  } else {
    throw UsageError("unknown mode '" + a.mode + "' (general, invariant-l2, invariant-inf, example)");
  }
  if (!est.nonconverged.empty())
    std::cerr << "warning: " << est.nonconverged.size() << " draw(s) stopped before reaching the tolerance\n";
  with_output(a.out, [&](std::ostream& out) {
    CsvWriter csv(out, {"mode", "value", "std_error", "draws", "nonconverged", "n", "d"});
    csv << a.mode << est.value << est.std_error << est.draws << est.nonconverged.size()
        << static_cast<std::size_t>(x.rows()) << dim;
  });
}

void run_bounds(const BoundsArgs& a) {
  std::vector<std::pair<std::string, double>> rows;
  if (a.kind == "zero-resolution") {
    rows.emplace_back("bound", zero_resolution_bound(a.b, a.m, a.n));
  } else if (a.kind == "refined") {
    rows.emplace_back("bound", refined_dudley_bound(a.b, a.kappa, a.epsilon, a.m, a.n, a.alpha));
  } else if (a.kind == "adversarial") {
    if (a.losses.empty()) throw UsageError("--losses is required");
    const auto loss = adversarial_loss(read_numeric_csv(a.losses));
    rows.emplace_back("mean", loss.mean);
    for (std::size_t i = 0; i < loss.per_example.size(); ++i)
      rows.emplace_back("example_" + std::to_string(i), loss.per_example[i]);
  } else if (a.kind == "model-selection") {
    double mean = 0.0;
    std::size_t n = static_cast<std::size_t>(a.n);
    if (!a.losses.empty()) {
      const auto loss = adversarial_loss(read_numeric_csv(a.losses));
      mean = loss.mean;
      n = loss.per_example.size();
    } else if (a.mean) {
      mean = *a.mean;
    } else {
      throw UsageError("model-selection needs --mean or --losses");
    }
    std::size_t k = 0;
    if (a.k) {
      k = *a.k;
    } else if (!a.selected.empty()) {
      if (a.sets == 0) throw UsageError("--selected needs --sets");
      k = powerset_index(parse_indices(a.selected), a.sets) + 1;
    } else {
      throw UsageError("model-selection needs --k or --selected with --sets");
    }
    rows.emplace_back("k", static_cast<double>(k));
    rows.emplace_back("bound", model_selection_bound(mean, a.rademacher, k, n, a.delta));
  } else {
    throw UsageError("unknown bound '" + a.kind + "' (zero-resolution, refined, adversarial, model-selection)");
  }
  with_output(a.out, [&](std::ostream& out) {
    CsvWriter csv(out, {"quantity", "value"});
    for (const auto& [name, v] : rows) csv << name << v;
  });
}

void run_report(const ReportArgs& a) {
  if (a.runs.empty()) throw UsageError("--runs needs at least one run directory");
  const auto eps = parse_epsilons(a.cover.epsilons);
  const auto algo = parse_algorithm(a.cover.algorithm);
  const auto opts = kmedoids_options(a.cover);
  with_output(a.out, [&](std::ostream& out) {
    CsvWriter csv(out, {"transform", "epsilon", "count", "normalized_count"});
    for (const auto& dir : a.runs) {
      const Run run = Run::open(dir);
      const DistanceMatrix rho = run.matrix(kMetricFile);
      const DistanceMatrix d = run.matrix(kOrbitFile);
      const DistanceMatrix e = run.matrix(kEuclideanFile);
      const auto labels = run.labels();
      if (labels.size() != rho.size()) throw DataError(dir + ": label count mismatch");
      const auto curve = scn_curve(rho, eps, algo, a.seed, opts);
      for (const auto& r : curve) {
        const auto norm = normalized_scn(rho, d, e, labels, r.epsilon, algo, a.seed, opts);
        csv << run.tag() << r.epsilon << r.count << norm.count;
      }
    }
  });
}

}  // namespace scn::cli
