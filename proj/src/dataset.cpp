#include "cfprobe/dataset.hpp"

#include <json.hpp>

#include "cfprobe/lingproc.hpp"
#include "cfprobe/strings.hpp"

namespace cfprobe {

using nlohmann::json;

Dataset::Dataset(std::string name, std::vector<Question> questions)
    : name_(std::move(name)), questions_(std::move(questions)) {
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    const auto& q = questions_[i];
    if (trim(q.text).empty())
      throw DatasetError(DatasetError::Kind::Schema, "question '" + q.id + "' has empty text");
    if (q.ground_truths.empty())
      throw DatasetError(DatasetError::Kind::Schema, "question '" + q.id + "' has no answers");
    if (!by_id_.emplace(q.id, i).second)
      throw DatasetError(DatasetError::Kind::DuplicateId, "duplicate question id '" + q.id + "'");
  }
}

const Question* Dataset::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &questions_[it->second];
}

namespace {

json parse_json_file(const std::filesystem::path& path) {
  std::string content;
  try {
    content = read_file(path);
  } catch (const std::exception& e) {
    throw DatasetError(DatasetError::Kind::Io, e.what());
  }
  try {
    return json::parse(content);
  } catch (const json::exception& e) {
    throw DatasetError(DatasetError::Kind::Schema, path.string() + ": " + e.what());
  }
}

// VQA and VG ids are integers in the public dumps; accept strings as well.
std::string id_string(const json& v, const char* what) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_string()) return v.get<std::string>();
  throw DatasetError(DatasetError::Kind::Schema, std::string("field '") + what + "' must be an id");
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw DatasetError(DatasetError::Kind::Schema, where + ": missing field '" + key + "'");
  return obj.at(key);
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string())
    throw DatasetError(DatasetError::Kind::Schema, where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Dataset load_vqa2(const std::filesystem::path& questions_file,
                  const std::filesystem::path& annotations_file) {
  const json qdoc = parse_json_file(questions_file);
  const json adoc = parse_json_file(annotations_file);
  const auto& qs = field(qdoc, "questions", questions_file.string());
  const auto& as = field(adoc, "annotations", annotations_file.string());
  if (!qs.is_array() || !as.is_array())
    throw DatasetError(DatasetError::Kind::Schema, "VQA-v2 'questions'/'annotations' must be arrays");

  std::map<std::string, std::vector<std::string>> answers;
  for (const auto& a : as) {
    const std::string where = annotations_file.string();
    auto qid = id_string(field(a, "question_id", where), "question_id");
    const auto& list = field(a, "answers", where);
    if (!list.is_array()) throw DatasetError(DatasetError::Kind::Schema, where + ": 'answers' must be an array");
    std::vector<std::string> gts;
    for (const auto& entry : list) gts.push_back(string_field(entry, "answer", where));
    answers[qid] = std::move(gts);
  }

  std::vector<Question> out;
  for (const auto& q : qs) {
    const std::string where = questions_file.string();
    Question question;
    question.id = id_string(field(q, "question_id", where), "question_id");
    question.image.image_id = id_string(field(q, "image_id", where), "image_id");
    question.text = string_field(q, "question", where);
    auto it = answers.find(question.id);
    if (it == answers.end())
      throw DatasetError(DatasetError::Kind::UnjoinableId,
                         "question " + question.id + " has no annotation in " + annotations_file.string());
    question.ground_truths = it->second;
    out.push_back(std::move(question));
  }
  return Dataset("vqa2", std::move(out));
}

Dataset load_vg(const std::filesystem::path& qa_file) {
  const json doc = parse_json_file(qa_file);
  if (!doc.is_array())
    throw DatasetError(DatasetError::Kind::Schema, qa_file.string() + ": expected an array of images");
  std::vector<Question> out;
  const std::string where = qa_file.string();
  for (const auto& image : doc) {
    const auto& qas = field(image, "qas", where);
    if (!qas.is_array()) throw DatasetError(DatasetError::Kind::Schema, where + ": 'qas' must be an array");
    for (const auto& qa : qas) {
      Question question;
      question.id = id_string(field(qa, "qa_id", where), "qa_id");
      question.image.image_id = id_string(
          qa.contains("image_id") ? qa.at("image_id") : field(image, "id", where), "image_id");
      question.text = string_field(qa, "question", where);
      question.ground_truths = {string_field(qa, "answer", where)};
      out.push_back(std::move(question));
    }
  }
  return Dataset("vg", std::move(out));
}

Dataset load_toy(const std::filesystem::path& path) {
  std::string content;
  try {
    content = read_file(path);
  } catch (const std::exception& e) {
    throw DatasetError(DatasetError::Kind::Io, e.what());
  }
  std::vector<Question> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    auto line = trim(std::string_view(content).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw DatasetError(DatasetError::Kind::MalformedLine, where + ": " + e.what());
    }
    try {
      Question q;
      q.id = string_field(obj, "id", where);
      q.image.image_id = string_field(obj, "image_id", where);
      if (obj.contains("image_locator")) q.image.locator = string_field(obj, "image_locator", where);
      q.text = string_field(obj, "question", where);
      const auto& answers = field(obj, "answers", where);
      if (!answers.is_array() || answers.empty())
        throw DatasetError(DatasetError::Kind::MalformedLine, where + ": 'answers' must be a non-empty array");
      for (const auto& a : answers) {
        if (!a.is_string()) throw DatasetError(DatasetError::Kind::MalformedLine, where + ": answers must be strings");
        q.ground_truths.push_back(a.get<std::string>());
      }
      out.push_back(std::move(q));
    } catch (const DatasetError& e) {
      if (e.kind() == DatasetError::Kind::Schema) throw DatasetError(DatasetError::Kind::MalformedLine, e.what());
      throw;
    }
  }
  return Dataset(path.stem().string(), std::move(out));
}

std::map<std::string, std::size_t> vocabulary(const Dataset& dataset) {
  std::map<std::string, std::size_t> counts;
  for (const auto& q : dataset.questions()) {
    for (const auto& t : tokenize(q.text).tokens) {
      if (t.surface.size() == 1 && std::string_view("?!.,").find(t.surface[0]) != std::string_view::npos)
        continue;
      ++counts[t.lower];
    }
  }
  return counts;
}

}  // namespace cfprobe
