#include "emvgc/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace emvgc {

namespace fs = std::filesystem;

namespace {

double parse_number(const std::string& token, const fs::path& file, int row,
                    int col) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(token, &pos);
    while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos])))
      ++pos;
    if (pos != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw Error("parse-error", file.string() + ":" + std::to_string(row + 1) +
                                   ":" + std::to_string(col + 1) +
                                   ": not a number: '" + token + "'");
  }
}

Normalize parse_normalize(const std::string& s) {
  if (s == "none") return Normalize::kNone;
  if (s == "zscore") return Normalize::kZscore;
  if (s == "unit" || s == "unit_norm") return Normalize::kUnitNorm;
  throw Error("parse-error", "unknown normalize mode '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Matrix load_csv(const fs::path& path, bool header) {
  std::ifstream in(path);
  if (!in) {
    throw Error("missing-file", "cannot open " + path.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  int row_index = 0;
  bool skipped_header = !header;
  while (std::getline(in, line)) {
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    int col = 0;
    while (std::getline(ss, token, ',')) {
      row.push_back(parse_number(trim(token), path, row_index, col));
      ++col;
    }
    if (!rows.empty() && row.size() != rows[0].size()) {
      throw Error("parse-error", path.string() + ":" + std::to_string(row_index + 1) +
                                     ": ragged row width");
    }
    rows.push_back(std::move(row));
    ++row_index;
  }
  if (rows.empty()) {
    throw Error("parse-error", path.string() + ": empty file");
  }
  Matrix M(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  }
  return M;
}

void save_csv(const fs::path& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) {
    throw Error("io-error", "cannot write " + path.string());
  }
  out.precision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << M(i, j);
    }
    out << '\n';
  }
}

std::vector<int> load_labels(const fs::path& path) {
  Matrix M = load_csv(path);
  if (M.cols() != 1) {
    throw Error("parse-error", path.string() + ": labels must be a single column");
  }
  std::vector<int> labels(M.rows());
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    labels[i] = static_cast<int>(std::llround(M(i, 0)));
  }
  return labels;
}

void save_labels(const fs::path& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) {
    throw Error("io-error", "cannot write " + path.string());
  }
  for (int l : labels) out << l << '\n';
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("missing-file", "cannot open " + path.string());
  }
  DatasetManifest manifest;
  const fs::path base = path.parent_path();
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error("parse-error",
                  path.string() + ":" + std::to_string(row) + ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "name") {
      manifest.name = value;
    } else if (key == "view") {
      manifest.view_files.push_back(base / value);
    } else if (key == "labels") {
      manifest.label_file = base / value;
    } else if (key == "normalize") {
      manifest.normalize = parse_normalize(value);
    } else if (key == "header") {
      manifest.header = (value == "true" || value == "1");
    } else {
      throw Error("parse-error",
                  path.string() + ":" + std::to_string(row) + ": unknown key '" + key + "'");
    }
  }
  if (manifest.view_files.empty()) {
    throw Error("parse-error", path.string() + ": manifest lists no views");
  }
  return manifest;
}

MultiViewDataset load(const DatasetManifest& manifest) {
  MultiViewDataset dataset;
  Eigen::Index n = -1;
  for (const fs::path& file : manifest.view_files) {
    Matrix rows = load_csv(file, manifest.header);  // samples x features
    if (n >= 0 && rows.rows() != n) {
      throw Error("row-count-mismatch",
                  file.string() + " has " + std::to_string(rows.rows()) +
                      " rows, expected " + std::to_string(n));
    }
    n = rows.rows();
    Matrix X = rows.transpose();  // features x samples
    switch (manifest.normalize) {
      case Normalize::kNone:
        break;
      case Normalize::kZscore:
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
          const double mean = X.row(r).mean();
          X.row(r).array() -= mean;
          const double sd = std::sqrt(X.row(r).squaredNorm() / X.cols());
          if (sd > 1e-300) X.row(r) /= sd;
        }
        break;
      case Normalize::kUnitNorm:
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
          const double norm = X.col(c).norm();
          if (norm > 1e-300) X.col(c) /= norm;
        }
        break;
    }
    dataset.views.push_back(std::move(X));
  }
  if (manifest.label_file) {
    std::vector<int> labels = load_labels(*manifest.label_file);
    if (static_cast<Eigen::Index>(labels.size()) != n) {
      throw Error("row-count-mismatch", manifest.label_file->string() +
                                            " has " + std::to_string(labels.size()) +
                                            " labels, expected " + std::to_string(n));
    }
    dataset.labels = std::move(labels);
  }
  validate(dataset);
  return dataset;
}

MultiViewDataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < spec.k || spec.k < 1 || spec.sigma <= 0.0 || spec.radius <= 0.0 ||
      spec.views < 1 || spec.dim < 1) {
    throw Error("invalid-hyperparams", "bad synthetic spec");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Balanced labels: sizes differ by at most 1.
  std::vector<int> labels(spec.n);
  for (int i = 0; i < spec.n; ++i) labels[i] = i % spec.k;

  MultiViewDataset dataset;
  for (int p = 0; p < spec.views; ++p) {
    // Means uniform in a ball of the given radius, independent per view.
    Matrix means(spec.dim, spec.k);
    for (int c = 0; c < spec.k; ++c) {
      Vector dir(spec.dim);
      for (int d = 0; d < spec.dim; ++d) dir[d] = gauss(rng);
      const double norm = dir.norm();
      if (norm > 0.0) dir /= norm;
      const double r =
          spec.radius * std::pow(unit(rng), 1.0 / spec.dim);
      means.col(c) = r * dir;
    }
    Matrix X(spec.dim, spec.n);
    for (int i = 0; i < spec.n; ++i) {
      for (int d = 0; d < spec.dim; ++d) {
        X(d, i) = means(d, labels[i]) + spec.sigma * gauss(rng);
      }
    }
    dataset.views.push_back(std::move(X));
  }
  dataset.labels = std::move(labels);
  validate(dataset);
  return dataset;
}

}  // namespace emvgc
