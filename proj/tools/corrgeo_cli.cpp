// corrgeo: correlation-matrix geometry pipeline.
//
// Exit codes: 0 success, 2 validation failure, 3 solver stagnation,
// 4 I/O error.

#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrgeo/corrgeo.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace corrgeo;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kStagnation = 3;
constexpr int kIo = 4;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError:
      return kIo;
    case ErrorKind::AlignmentStagnation:
    case ErrorKind::RetractionFailure:
    case ErrorKind::SingularSylvester:
    case ErrorKind::AntipodalLogarithm:
      return kStagnation;
    default:
      return kValidation;
  }
}

struct SolverOptions {
  std::optional<int> k;
  int restarts = 5;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int max_iterations = 500;

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.restarts = restarts;
    cfg.grad_tol = tol;
    cfg.seed = seed;
    cfg.max_iterations = max_iterations;
    return cfg;
  }

  json echo() const {
    json j{{"restarts", restarts}, {"tol", tol}, {"seed", seed},
           {"max_iterations", max_iterations}};
    j["k"] = k ? json(*k) : json(nullptr);
    return j;
  }
};

void add_solver_options(CLI::App* cmd, SolverOptions& o) {
  cmd->add_option("--k", o.k, "Factor rank k (default: number of retained columns)")
      ->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--restarts", o.restarts, "Alignment starts per pair")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", o.tol, "Riemannian gradient tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Seed for random restarts");
  cmd->add_option("--max-iter", o.max_iterations, "Iterations per alignment start")
      ->check(CLI::PositiveNumber);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

json cohort_json(const Cohort& c) {
  return json{{"subjects", c.subject_ids},
              {"groups", c.groups},
              {"columns", c.columns},
              {"excluded_subjects", c.excluded_subjects},
              {"k", c.k}};
}

LabeledMatrix labeled(const Matrix& values, const std::vector<std::string>& labels) {
  return LabeledMatrix{labels, labels, values};
}

std::string safe_name(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_validate(const fs::path& file) {
  const LabeledMatrix m = read_matrix_csv(file);
  auto result = validate(m.values);
  if (std::holds_alternative<CorrelationMatrix>(result)) {
    const auto& z = std::get<CorrelationMatrix>(result);
    std::cout << "valid correlation matrix: m=" << z.m() << " rank=" << z.detected_rank()
              << '\n';
    return kOk;
  }
  for (const Violation& v : std::get<std::vector<Violation>>(result))
    std::cout << to_string(v.kind) << ' ' << format_double(v.magnitude) << '\n';
  return kValidation;
}

int run_corr(const fs::path& manifest_path, const fs::path& out_dir) {
  const CohortManifest manifest = load_manifest(manifest_path);
  const Cohort cohort = build_cohort(manifest);
  ensure_dir(out_dir);
  for (std::size_t s = 0; s < cohort.subject_ids.size(); ++s)
    write_matrix_csv(out_dir / (safe_name(cohort.subject_ids[s]) + ".csv"),
                     labeled(cohort.correlations[s].matrix(), cohort.columns));
  write_json(out_dir / "cohort.json", cohort_json(cohort));
  std::cout << "wrote " << cohort.subject_ids.size() << " correlation matrices ("
            << cohort.columns.size() << " columns) to " << out_dir.string() << '\n';
  return kOk;
}

int run_dist(const fs::path& manifest_path, const SolverOptions& opts, const fs::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const Cohort cohort = build_cohort(load_manifest(manifest_path), opts.k);
  const DistanceMatrix d = pairwise_distances(cohort, opts.config());
  ensure_dir(out_dir);
  write_matrix_csv(out_dir / "distances.csv", labeled(d.distances, d.ids));

  bool stalled = false;
  json pairs = json::array();
  for (const PairReport& p : d.pairs) {
    stalled = stalled || (p.stagnated && !p.converged);
    pairs.push_back({{"i", d.ids[p.i]},
                     {"j", d.ids[p.j]},
                     {"distance", p.distance},
                     {"grad_norm", p.grad_norm},
                     {"iterations", p.iterations},
                     {"restarts_used", p.restarts_used},
                     {"converged", p.converged},
                     {"stagnated", p.stagnated}});
  }
  json report{{"command", "dist"},
              {"manifest", manifest_path.string()},
              {"config", opts.echo()},
              {"cohort", cohort_json(cohort)},
              {"pairs", pairs},
              {"wall_time_seconds", seconds_since(t0)}};
  write_json(out_dir / "report.json", report);
  std::cout << "wrote " << d.ids.size() << "x" << d.ids.size() << " distance matrix to "
            << (out_dir / "distances.csv").string() << '\n';
  if (stalled) {
    std::cerr << "warning: at least one alignment stalled away from a critical point\n";
    return kStagnation;
  }
  return kOk;
}

int run_mean(const fs::path& manifest_path, const std::optional<std::string>& group,
             const SolverOptions& opts, double mean_tol, int max_outer, const fs::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const Cohort cohort = build_cohort(load_manifest(manifest_path), opts.k);
  SolverConfig cfg = opts.config();
  cfg.mean_tol = mean_tol;
  cfg.max_outer = max_outer;
  const std::vector<GroupMean> means = group_means(cohort, cfg, group);
  ensure_dir(out_dir);

  bool all_converged = true;
  json groups = json::array();
  for (const GroupMean& g : means) {
    const fs::path file = out_dir / ("mean_" + safe_name(g.group) + ".csv");
    write_matrix_csv(file, labeled(g.mean.matrix(), cohort.columns));
    all_converged = all_converged && g.report.converged;
    groups.push_back({{"group", g.group},
                      {"members", g.members},
                      {"file", file.filename().string()},
                      {"loss_history", g.report.loss_history},
                      {"outer_iterations", g.report.outer_iterations},
                      {"converged", g.report.converged}});
    std::cout << "group " << g.group << ": " << g.members.size() << " members, loss "
              << format_double(g.report.loss_history.back()) << " -> " << file.string() << '\n';
  }
  json config = opts.echo();
  config["mean_tol"] = mean_tol;
  config["max_outer"] = max_outer;
  json report{{"command", "mean"},
              {"manifest", manifest_path.string()},
              {"config", config},
              {"cohort", cohort_json(cohort)},
              {"groups", groups},
              {"wall_time_seconds", seconds_since(t0)}};
  write_json(out_dir / "mean_report.json", report);
  if (!all_converged) {
    std::cerr << "warning: mean iteration hit the outer iteration cap\n";
    return kStagnation;
  }
  return kOk;
}

int run_diff(const fs::path& a_path, const fs::path& b_path, double threshold,
             const fs::path& out_dir) {
  const LabeledMatrix a = read_matrix_csv(a_path);
  const LabeledMatrix b = read_matrix_csv(b_path);
  const DifferenceReport r = difference_report(a.values, b.values, threshold);
  std::vector<std::string> labels = a.col_labels;
  if (labels.size() != static_cast<std::size_t>(a.values.cols())) {
    labels.clear();
    for (Eigen::Index i = 0; i < a.values.cols(); ++i) labels.push_back(std::to_string(i));
  }
  ensure_dir(out_dir);
  write_matrix_csv(out_dir / "difference.csv", labeled(r.difference, labels));
  write_matrix_csv(out_dir / "thresholded.csv", labeled(r.thresholded, labels));

  const fs::path summary = out_dir / "summary.csv";
  std::ofstream out(summary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + summary.string());
  out << "row,col,value\n";
  for (const SurvivingPair& p : r.summary)
    out << labels[p.i] << ',' << labels[p.j] << ',' << format_double(p.value) << '\n';
  if (!out) fail(ErrorKind::IoError, "cannot write " + summary.string());
  std::cout << r.summary.size() << " entries with |difference| > " << threshold << '\n';
  return kOk;
}

enum class InputKind { Auto, Factor, Correlation };

OrbitPoint load_point(const fs::path& file, InputKind kind, std::optional<int> k) {
  const Matrix values = read_matrix_csv(file).values;
  if (kind == InputKind::Auto) {
    kind = values.rows() == values.cols() &&
                   std::holds_alternative<CorrelationMatrix>(validate(values))
               ? InputKind::Correlation
               : InputKind::Factor;
  }
  if (kind == InputKind::Correlation) {
    auto v = validate(values);
    if (!std::holds_alternative<CorrelationMatrix>(v))
      fail(ErrorKind::InvalidCorrelation, file.string() + " is not a valid correlation matrix");
    const auto& z = std::get<CorrelationMatrix>(v);
    return OrbitPoint{factorize(z, k.value_or(static_cast<int>(z.m())))};
  }
  OrbitPoint x{UnitRowMatrix(values)};
  if (k && *k != x.k()) {
    if (*k < x.k())
      fail(ErrorKind::RankExceedsK, file.string() + " has more columns than the requested k");
    return k_embedding(x, *k);
  }
  return x;
}

int run_geodesic(const fs::path& x_path, const fs::path& y_path, int samples, InputKind kind,
                 const SolverOptions& opts, const std::optional<fs::path>& out_path) {
  const OrbitPoint x = load_point(x_path, kind, opts.k);
  const OrbitPoint y = load_point(y_path, kind, opts.k);
  if (x.m() != y.m() || x.k() != y.k())
    fail(ErrorKind::InvalidInput, "endpoints have different shapes");
  const GeodesicSegment seg = minimizing_geodesic(x, y, opts.config());
  const std::vector<RankSample> profile = geodesic_rank_profile(seg, samples);

  std::ofstream file;
  if (out_path) {
    file.open(*out_path);
    if (!file) fail(ErrorKind::IoError, "cannot write " + out_path->string());
  }
  std::ostream& out = out_path ? static_cast<std::ostream&>(file) : std::cout;
  out << "t,rank,endpoint\n";
  for (const RankSample& s : profile)
    out << format_double(s.t) << ',' << s.rank << ',' << (s.endpoint ? 1 : 0) << '\n';
  if (!out) fail(ErrorKind::IoError, "failed writing rank profile");
  std::cerr << "distance " << format_double(seg.duration * seg.velocity.norm()) << '\n';
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry of bounded-rank correlation matrices"};
  app.require_subcommand(1);

  fs::path file;
  auto* validate_cmd = app.add_subcommand("validate", "Check a CSV matrix is a correlation matrix");
  validate_cmd->add_option("file", file, "Matrix CSV")->required();

  fs::path manifest;
  fs::path out_dir = ".";
  auto* corr_cmd = app.add_subcommand("corr", "Write per-subject correlation matrices");
  corr_cmd->add_option("manifest", manifest, "Cohort manifest (JSON or CSV)")->required();
  corr_cmd->add_option("--out", out_dir, "Output directory");

  SolverOptions dist_opts;
  auto* dist_cmd = app.add_subcommand("dist", "Pairwise orbit distances for a cohort");
  dist_cmd->add_option("manifest", manifest, "Cohort manifest (JSON or CSV)")->required();
  add_solver_options(dist_cmd, dist_opts);
  dist_cmd->add_option("--out", out_dir, "Output directory");

  SolverOptions mean_opts;
  std::optional<std::string> group;
  double mean_tol = 1e-10;
  int max_outer = 200;
  auto* mean_cmd = app.add_subcommand("mean", "Fréchet mean correlation matrix per group");
  mean_cmd->add_option("manifest", manifest, "Cohort manifest (JSON or CSV)")->required();
  mean_cmd->add_option("--group", group, "Only this group");
  add_solver_options(mean_cmd, mean_opts);
  mean_cmd->add_option("--mean-tol", mean_tol, "Relative loss change for stopping")
      ->check(CLI::PositiveNumber);
  mean_cmd->add_option("--max-outer", max_outer, "Outer iteration cap")
      ->check(CLI::PositiveNumber);
  mean_cmd->add_option("--out", out_dir, "Output directory");

  fs::path mean_a;
  fs::path mean_b;
  double threshold = 0.2;
  auto* diff_cmd = app.add_subcommand("diff", "Difference of two matrices with thresholding");
  diff_cmd->add_option("meanA", mean_a, "First matrix CSV")->required();
  diff_cmd->add_option("meanB", mean_b, "Second matrix CSV")->required();
  diff_cmd->add_option("--threshold", threshold, "Zero entries with |value| <= threshold")
      ->check(CLI::NonNegativeNumber);
  diff_cmd->add_option("--out", out_dir, "Output directory");

  fs::path x_path;
  fs::path y_path;
  int samples = 17;
  InputKind input = InputKind::Auto;
  SolverOptions geo_opts;
  std::optional<fs::path> profile_out;
  auto* geo_cmd = app.add_subcommand("geodesic", "Rank profile along a minimizing geodesic");
  geo_cmd->add_option("X", x_path, "Start point CSV (factor or correlation)")->required();
  geo_cmd->add_option("Y", y_path, "End point CSV (factor or correlation)")->required();
  geo_cmd->add_option("--samples", samples, "Interior sample count")->check(CLI::Range(2, 1000000));
  geo_cmd->add_option("--input", input, "auto, factor or correlation")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, InputKind>{{"auto", InputKind::Auto},
                                           {"factor", InputKind::Factor},
                                           {"correlation", InputKind::Correlation}},
          CLI::ignore_case));
  add_solver_options(geo_cmd, geo_opts);
  geo_cmd->add_option("--out", profile_out, "Write the profile here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*validate_cmd) return run_validate(file);
    if (*corr_cmd) return run_corr(manifest, out_dir);
    if (*dist_cmd) return run_dist(manifest, dist_opts, out_dir);
    if (*mean_cmd) return run_mean(manifest, group, mean_opts, mean_tol, max_outer, out_dir);
    if (*diff_cmd) return run_diff(mean_a, mean_b, threshold, out_dir);
    if (*geo_cmd) return run_geodesic(x_path, y_path, samples, input, geo_opts, profile_out);
  } catch (const GeometryError& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.detail() << '\n';
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error (manifest): " << e.what() << '\n';
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
