#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfprobe {

/// Images are never decoded here; they are opaque handles passed to the model.
struct ImageRef {
  std::string image_id;
  std::string locator;  // file path or URL, may be empty

  bool operator==(const ImageRef&) const = default;
};

struct Question {
  std::string id;
  ImageRef image;
  std::string text;
  std::vector<std::string> ground_truths;

  bool operator==(const Question&) const = default;
};

enum class DatasetFormat { Vqa2, VisualGenome, Toy };

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { Io, Schema, UnjoinableId, DuplicateId, MalformedLine };
  DatasetError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class Dataset {
 public:
  Dataset() = default;
  /// Throws DatasetError::DuplicateId, or Schema for empty text / no answers.
  Dataset(std::string name, std::vector<Question> questions);

  const std::string& name() const { return name_; }
  const std::vector<Question>& questions() const { return questions_; }
  std::size_t size() const { return questions_.size(); }
  bool empty() const { return questions_.empty(); }
  const Question* find(const std::string& id) const;

 private:
  std::string name_;
  std::vector<Question> questions_;
  std::map<std::string, std::size_t> by_id_;
};

/// Public VQA-v2 question + annotation files, joined on question_id. All
/// annotator answers are kept as ground truths.
Dataset load_vqa2(const std::filesystem::path& questions_file,
                  const std::filesystem::path& annotations_file);

/// Visual Genome question_answers.json: an array of images, each with "qas".
Dataset load_vg(const std::filesystem::path& qa_file);

/// One JSON object per line: {id, image_id, image_locator, question, answers}.
Dataset load_toy(const std::filesystem::path& path);

/// Word counts over case-folded question tokens (punctuation tokens skipped).
std::map<std::string, std::size_t> vocabulary(const Dataset& dataset);

}  // namespace cfprobe
