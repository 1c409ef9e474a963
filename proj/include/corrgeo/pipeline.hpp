#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corrgeo/corr_factor.hpp"
#include "corrgeo/frechet_mean.hpp"
#include "corrgeo/types.hpp"

namespace corrgeo {

/// T x m time series for one subject: rows are timepoints, columns variables.
struct TimeSeriesTable {
  Matrix values;
  std::vector<std::string> column_names;
  std::string subject_id;

  Eigen::Index timepoints() const noexcept { return values.rows(); }
  Eigen::Index variables() const noexcept { return values.cols(); }
};

enum class TableFormat { Csv };

/// Reads a CSV whose header holds the variable names. Throws IoError,
/// EmptyFile, ParseError (non-finite or malformed cell, with location) or
/// DegenerateInput (fewer than two timepoints).
TimeSeriesTable ingest(const std::filesystem::path& path, TableFormat format = TableFormat::Csv,
                       std::string subject_id = {});

/// Zero-variance column handling. Subjects with more than
/// max_zero_variance dropped columns are excluded from a cohort.
struct DropRules {
  double variance_floor = 1e-12;
  std::optional<int> max_zero_variance;
};

struct CorrelationResult {
  CorrelationMatrix correlation;
  std::vector<std::string> kept_columns;
  std::vector<std::string> dropped_columns;
};

/// Sample correlation of the columns whose variance is at least
/// rules.variance_floor. Throws DegenerateInput when every column drops.
CorrelationResult correlation_of(const TimeSeriesTable& ts, const DropRules& rules = {});

struct ManifestEntry {
  std::string subject_id;
  std::filesystem::path path;
  std::string group;
};

struct CohortManifest {
  std::vector<ManifestEntry> subjects;
  std::vector<std::string> groups;  // declared labels
  std::optional<int> k;
  DropRules drop_rules;
};

/// Loads a manifest from JSON ({"subjects": [{"subject_id", "path", "group"}],
/// optional "groups", "k", "drop_rules": {"variance_floor",
/// "max_zero_variance"}}) or from a CSV with columns subject_id,path,group.
/// Relative paths resolve against the manifest's directory.
CohortManifest load_manifest(const std::filesystem::path& path);

/// Correlation matrices over the column set retained by every subject.
struct Cohort {
  std::vector<std::string> subject_ids;
  std::vector<std::string> groups;
  std::vector<CorrelationMatrix> correlations;
  std::vector<std::string> columns;
  std::vector<std::string> excluded_subjects;
  int k = 0;
};

/// Ingests every subject, applies the drop rules, intersects the retained
/// columns and recomputes correlations on that common set. k defaults to
/// the manifest value, else the retained column count.
Cohort build_cohort(const CohortManifest& manifest, std::optional<int> k_override = std::nullopt);

struct PairReport {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int restarts_used = 0;
  bool converged = false;
  bool stagnated = false;
};

struct DistanceMatrix {
  std::vector<std::string> ids;
  Matrix distances;
  std::vector<PairReport> pairs;
};

/// Factorizes every subject with the cohort's k and computes all orbit
/// distances. Throws RankExceedsK naming the subject.
DistanceMatrix pairwise_distances(const Cohort& cohort, const SolverConfig& cfg);

struct GroupMean {
  std::string group;
  std::vector<std::string> members;
  CorrelationMatrix mean;
  MeanReport report;
};

/// Unit-weight Fréchet mean per group (or just `only`), returned as
/// correlation matrices. Throws InvalidInput for an empty requested group.
std::vector<GroupMean> group_means(const Cohort& cohort, const SolverConfig& cfg,
                                   const std::optional<std::string>& only = std::nullopt);

struct SurvivingPair {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double value = 0.0;
};

struct DifferenceReport {
  Matrix difference;
  Matrix thresholded;
  /// Upper-triangle pairs with |value| > threshold, largest |value| first.
  std::vector<SurvivingPair> summary;
};

DifferenceReport difference_report(const Matrix& a, const Matrix& b, double threshold);

/// Orbit point for each cohort subject.
std::vector<OrbitPoint> factor_cohort(const Cohort& cohort);

} // namespace corrgeo
