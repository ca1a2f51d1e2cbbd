#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "emvgc/types.hpp"

namespace emvgc {

enum class Normalize { kNone, kZscore, kUnitNorm };

/// Key-value manifest describing a dataset on disk (see load_manifest for the
/// file schema).
struct DatasetManifest {
  std::string name;
  std::vector<std::filesystem::path> view_files;
  std::optional<std::filesystem::path> label_file;
  Normalize normalize = Normalize::kNone;
  bool header = false;
};

/// Parameters of the synthetic multi-view Gaussian mixture.
struct SyntheticSpec {
  int n = 500;
  int k = 5;
  int views = 2;
  int dim = 2;
  double sigma = 0.15;
  double radius = 5.0;
  std::uint64_t seed = 0;
};

/// Parses the manifest file format:
///   name = mydata
///   view = path/to/view1.csv
///   view = path/to/view2.csv
///   labels = path/to/labels.csv
///   normalize = none | zscore | unit
///   header = true | false
/// Paths are resolved relative to the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Loads CSV views (rows = samples), transposes to features x samples,
/// applies normalization, attaches labels, and validates.
MultiViewDataset load(const DatasetManifest& manifest);

/// Reads one CSV as a row-per-sample matrix.
Matrix load_csv(const std::filesystem::path& path, bool header = false);

/// Writes a row-per-sample matrix; round-trips bit-exactly through load_csv.
void save_csv(const std::filesystem::path& path, const Matrix& rows_by_cols);

std::vector<int> load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const std::vector<int>& labels);

/// Balanced k-cluster Gaussian mixture per view; cluster means drawn uniformly
/// in a ball of the given radius, independently per view. Deterministic under
/// seed; labels always populated.
MultiViewDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace emvgc
