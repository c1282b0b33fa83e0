#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "cfprobe/color.hpp"
#include "cfprobe/lingproc.hpp"
#include "cfprobe/wordnet.hpp"

namespace cfprobe::testing {

inline std::filesystem::path wordnet_dir() { return CFPROBE_WORDNET_DIR; }
inline std::filesystem::path data_dir() { return CFPROBE_DATA_DIR; }

// Loaded once per test binary; the graph is immutable.
inline const WordNetGraph& graph() {
  static const WordNetGraph g = WordNetGraph::load(wordnet_dir());
  return g;
}

inline const ColorTable& palette(ColorMetric metric = ColorMetric::EuclideanRgb) {
  static const ColorTable rgb = load_colors(data_dir() / "colors_css4.csv", ColorMetric::EuclideanRgb);
  static const ColorTable lab = load_colors(data_dir() / "colors_css4.csv", ColorMetric::DeltaE76Lab);
  return metric == ColorMetric::EuclideanRgb ? rgb : lab;
}

inline const Stoplist& stoplist() {
  static const Stoplist s = Stoplist::load(data_dir() / "stoplist.txt");
  return s;
}

// Fresh, empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("cfprobe-" + tag + "-" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& content) const {
    auto p = path_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cfprobe::testing
