#pragma once

// Synthetic cohorts on disk: time series whose population correlation is a
// chosen X X^T, written as CSV plus a JSON manifest.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "test_util.hpp"

namespace corrgeo::testing {

/// Fresh, empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("corrgeo_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<std::string> variable_names(Eigen::Index m) {
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < m; ++j) out.push_back("v" + std::to_string(j));
  return out;
}

inline void write_series(const std::filesystem::path& path, const Matrix& values,
                         const std::vector<std::string>& names) {
  std::ofstream out(path);
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << format_double(values(t, j));
    out << '\n';
  }
}

/// T timepoints with latent factors: row t is g_t^T X^T for standard
/// Gaussian g_t, so the population correlation is X X^T.
inline Matrix latent_series(const UnitRowMatrix& x, Eigen::Index timepoints,
                            std::mt19937_64& rng) {
  return gaussian(timepoints, x.k(), rng) * x.matrix().transpose();
}

struct SyntheticSubject {
  std::string id;
  std::string group;
  Matrix values;
};

inline std::filesystem::path write_cohort(const std::filesystem::path& dir,
                                          const std::vector<SyntheticSubject>& subjects,
                                          std::optional<int> k = std::nullopt) {
  nlohmann::json doc;
  doc["subjects"] = nlohmann::json::array();
  for (const auto& s : subjects) {
    const std::string file = s.id + ".csv";
    write_series(dir / file, s.values, variable_names(s.values.cols()));
    doc["subjects"].push_back({{"subject_id", s.id}, {"path", file}, {"group", s.group}});
  }
  if (k) doc["k"] = *k;
  const auto manifest = dir / "manifest.json";
  std::ofstream(manifest) << doc.dump(2);
  return manifest;
}

} // namespace corrgeo::testing
