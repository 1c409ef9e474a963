#include "corrgeo/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "corrgeo/errors.hpp"
#include "corrgeo/matrix_io.hpp"
#include "corrgeo/quotient_space.hpp"

namespace corrgeo {

namespace {

// Runs fn(0..n-1) on a small pool. Results must be written by index so the
// assembly order does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Eigen::Index> column_indices(const std::vector<std::string>& names,
                                         const std::vector<std::string>& wanted) {
  std::vector<Eigen::Index> out;
  out.reserve(wanted.size());
  for (const auto& w : wanted) {
    auto it = std::find(names.begin(), names.end(), w);
    out.push_back(static_cast<Eigen::Index>(it - names.begin()));
  }
  return out;
}

Matrix sample_correlation(const Matrix& values) {
  const Matrix centered = values.rowwise() - values.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(values.rows() - 1);
  const Vector inv_sd = cov.diagonal().array().sqrt().inverse();
  Matrix corr = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  corr = 0.5 * (corr + corr.transpose()).eval();
  corr.diagonal().setOnes();
  return corr.cwiseMax(-1.0).cwiseMin(1.0);
}

} // namespace

TimeSeriesTable ingest(const std::filesystem::path& path, TableFormat format,
                       std::string subject_id) {
  if (format != TableFormat::Csv) fail(ErrorKind::InvalidInput, "unsupported table format");
  LabeledMatrix raw = read_matrix_csv(path);
  if (!raw.row_labels.empty())
    fail(ErrorKind::ParseError, path.string() + ": time series must not have an index column");
  if (raw.values.rows() < 2)
    fail(ErrorKind::DegenerateInput, path.string() + ": need at least two timepoints");
  if (subject_id.empty()) subject_id = path.stem().string();
  return TimeSeriesTable{std::move(raw.values), std::move(raw.col_labels), std::move(subject_id)};
}

CorrelationResult correlation_of(const TimeSeriesTable& ts, const DropRules& rules) {
  if (ts.timepoints() < 2) fail(ErrorKind::DegenerateInput, "need at least two timepoints");
  const Matrix centered = ts.values.rowwise() - ts.values.colwise().mean();
  const Vector variance =
      centered.colwise().squaredNorm().transpose() / static_cast<double>(ts.timepoints() - 1);

  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  std::vector<Eigen::Index> keep_idx;
  for (Eigen::Index j = 0; j < ts.variables(); ++j) {
    const auto& name = ts.column_names[static_cast<std::size_t>(j)];
    if (variance(j) < rules.variance_floor) {
      dropped.push_back(name);
    } else {
      kept.push_back(name);
      keep_idx.push_back(j);
    }
  }
  if (kept.empty())
    fail(ErrorKind::DegenerateInput, "subject " + ts.subject_id + ": every column has zero variance");
  const Matrix sub = ts.values(Eigen::all, keep_idx);
  return CorrelationResult{CorrelationMatrix(sample_correlation(sub)), std::move(kept),
                           std::move(dropped)};
}

CohortManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open manifest " + path.string());
  const auto base = path.parent_path();
  CohortManifest out;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      in >> doc;
      for (const auto& s : doc.at("subjects")) {
        out.subjects.push_back({s.at("subject_id").get<std::string>(),
                                resolve(s.at("path").get<std::string>()),
                                s.at("group").get<std::string>()});
      }
      if (doc.contains("groups")) out.groups = doc["groups"].get<std::vector<std::string>>();
      if (doc.contains("k")) out.k = doc["k"].get<int>();
      if (doc.contains("drop_rules")) {
        const auto& d = doc["drop_rules"];
        if (d.contains("variance_floor")) out.drop_rules.variance_floor = d["variance_floor"].get<double>();
        if (d.contains("max_zero_variance"))
          out.drop_rules.max_zero_variance = d["max_zero_variance"].get<int>();
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::ParseError, path.string() + ": " + e.what());
    }
  } else {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto cells = split_csv_line(line);
      if (header.empty()) {
        header = cells;
        continue;
      }
      if (cells.size() != header.size())
        fail(ErrorKind::ParseError, path.string() + ": wrong cell count on line " + std::to_string(line_no));
      std::map<std::string, std::string> row;
      for (std::size_t c = 0; c < cells.size(); ++c) row[header[c]] = cells[c];
      if (!row.count("subject_id") || !row.count("path") || !row.count("group"))
        fail(ErrorKind::ParseError, path.string() + ": header needs subject_id,path,group");
      out.subjects.push_back({row["subject_id"], resolve(row["path"]), row["group"]});
    }
  }
  if (out.subjects.empty()) fail(ErrorKind::EmptyFile, path.string() + " lists no subjects");

  if (out.groups.empty()) {
    for (const auto& s : out.subjects)
      if (std::find(out.groups.begin(), out.groups.end(), s.group) == out.groups.end())
        out.groups.push_back(s.group);
  } else {
    for (std::size_t i = 0; i < out.subjects.size(); ++i)
      if (std::find(out.groups.begin(), out.groups.end(), out.subjects[i].group) == out.groups.end())
        fail(ErrorKind::InvalidInput, "subject " + out.subjects[i].subject_id +
                                          " has undeclared group " + out.subjects[i].group, i);
  }
  if (out.k && *out.k < 2) fail(ErrorKind::InvalidInput, "manifest k must be at least 2");
  return out;
}

Cohort build_cohort(const CohortManifest& manifest, std::optional<int> k_override) {
  struct Loaded {
    TimeSeriesTable table;
    std::vector<std::string> kept;
    const ManifestEntry* entry;
  };
  std::vector<Loaded> loaded;
  Cohort cohort;
  for (const auto& entry : manifest.subjects) {
    TimeSeriesTable ts = ingest(entry.path, TableFormat::Csv, entry.subject_id);
    CorrelationResult c = correlation_of(ts, manifest.drop_rules);
    if (manifest.drop_rules.max_zero_variance &&
        static_cast<int>(c.dropped_columns.size()) > *manifest.drop_rules.max_zero_variance) {
      cohort.excluded_subjects.push_back(entry.subject_id);
      continue;
    }
    loaded.push_back({std::move(ts), std::move(c.kept_columns), &entry});
  }
  if (loaded.empty()) fail(ErrorKind::DegenerateInput, "every subject was excluded");

  // Common column set: header order when all headers agree, else sorted names.
  bool same_header = true;
  for (const auto& l : loaded)
    same_header = same_header && l.table.column_names == loaded.front().table.column_names;
  std::vector<std::string> order = loaded.front().table.column_names;
  if (!same_header) {
    std::set<std::string> names(order.begin(), order.end());
    order.assign(names.begin(), names.end());
  }
  for (const auto& name : order) {
    bool everywhere = true;
    for (const auto& l : loaded)
      everywhere = everywhere && std::find(l.kept.begin(), l.kept.end(), name) != l.kept.end();
    if (everywhere) cohort.columns.push_back(name);
  }
  if (cohort.columns.empty()) fail(ErrorKind::DegenerateInput, "no column is retained by every subject");

  for (const auto& l : loaded) {
    const auto idx = column_indices(l.table.column_names, cohort.columns);
    const Matrix sub = l.table.values(Eigen::all, idx);
    cohort.subject_ids.push_back(l.entry->subject_id);
    cohort.groups.push_back(l.entry->group);
    cohort.correlations.emplace_back(sample_correlation(sub));
  }
  const int m = static_cast<int>(cohort.columns.size());
  cohort.k = k_override.value_or(manifest.k.value_or(m));
  if (cohort.k < 2) fail(ErrorKind::InvalidInput, "k must be at least 2");
  return cohort;
}

std::vector<OrbitPoint> factor_cohort(const Cohort& cohort) {
  std::vector<OrbitPoint> out;
  out.reserve(cohort.correlations.size());
  for (std::size_t i = 0; i < cohort.correlations.size(); ++i) {
    try {
      out.push_back(OrbitPoint{factorize(cohort.correlations[i], cohort.k)});
    } catch (const GeometryError& e) {
      fail(e.kind(), "subject " + cohort.subject_ids[i] + ": " + e.detail(), i);
    }
  }
  return out;
}

DistanceMatrix pairwise_distances(const Cohort& cohort, const SolverConfig& cfg) {
  const std::vector<OrbitPoint> points = factor_cohort(cohort);
  const std::size_t n = points.size();
  DistanceMatrix out{cohort.subject_ids, Matrix::Zero(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n)), {}};
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) jobs.emplace_back(i, j);
  out.pairs.resize(jobs.size());

  parallel_for(jobs.size(), [&](std::size_t job) {
    const auto [i, j] = jobs[job];
    AlignmentResult best = align(points[i], points[j], cfg);
    if (cfg.symmetrize) {
      AlignmentResult other = align(points[j], points[i], cfg);
      if (other.loss < best.loss) best = std::move(other);
    }
    out.pairs[job] = PairReport{i, j, std::sqrt(std::max(0.0, best.loss)), best.grad_norm,
                                best.iterations, best.restarts_used, best.converged,
                                best.stagnated};
  });
  for (const auto& p : out.pairs) {
    const auto i = static_cast<Eigen::Index>(p.i);
    const auto j = static_cast<Eigen::Index>(p.j);
    out.distances(i, j) = out.distances(j, i) = p.distance;
  }
  return out;
}

std::vector<GroupMean> group_means(const Cohort& cohort, const SolverConfig& cfg,
                                   const std::optional<std::string>& only) {
  std::vector<std::string> labels;
  for (const auto& g : cohort.groups)
    if (std::find(labels.begin(), labels.end(), g) == labels.end()) labels.push_back(g);
  if (only) {
    if (std::find(labels.begin(), labels.end(), *only) == labels.end())
      fail(ErrorKind::InvalidInput, "group " + *only + " has no subjects");
    labels = {*only};
  }
  const std::vector<OrbitPoint> points = factor_cohort(cohort);

  std::vector<GroupMean> out;
  for (const auto& label : labels) {
    std::vector<OrbitPoint> members;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (cohort.groups[i] != label) continue;
      members.push_back(points[i]);
      ids.push_back(cohort.subject_ids[i]);
    }
    if (members.empty()) fail(ErrorKind::InvalidInput, "group " + label + " is empty");
    MeanReport report = frechet_mean(WeightedSampleSet(std::move(members)), cfg);
    CorrelationMatrix mean = gram(report.mean.rep);
    out.push_back(GroupMean{label, std::move(ids), std::move(mean), std::move(report)});
  }
  return out;
}

DifferenceReport difference_report(const Matrix& a, const Matrix& b, double threshold) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::InvalidInput, "difference_report needs matrices of the same shape");
  if (!(threshold >= 0.0)) fail(ErrorKind::InvalidInput, "threshold must be non-negative");
  DifferenceReport out;
  out.difference = a - b;
  out.thresholded = out.difference;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (std::abs(out.thresholded(i, j)) <= threshold) out.thresholded(i, j) = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (out.thresholded(i, j) != 0.0) out.summary.push_back({i, j, out.thresholded(i, j)});
  std::stable_sort(out.summary.begin(), out.summary.end(), [](const auto& l, const auto& r) {
    return std::abs(l.value) > std::abs(r.value);
  });
  return out;
}

} // namespace corrgeo
