#include <fstream>
#include <json.hpp>
#include <sstream>

#include "chatmpc/error.hpp"
#include "chatmpc/interpreter/interpreter.hpp"

namespace chatmpc::interpreter {

const std::vector<TrainExample>& builtin_corpus() {
  static const std::vector<TrainExample> corpus = {
      {"Can you separate from the vase?", {-1, 0}},
      {"Please separate from the vase.", {-1, 0}},
      {"It is too close to the vase.", {-1, 0}},
      {"Too close to the vase.", {-1, 0}},
      {"You are too closing to the vase", {-1, 0}},
      {"Can you approach to the vase?", {1, 0}},
      {"Please approach to the vase.", {1, 0}},
      {"You do not need to care about the vase.", {1, 0}},
      {"You do not need to be careful about the vase.", {1, 0}},
      {"You do not have to care about the vase so much.", {1, 0}},
      {"Can you separate from the toy?", {0, -1}},
      {"Please separate from the toy.", {0, -1}},
      {"It is too close to the toy.", {0, -1}},
      {"Too close to the toy.", {0, -1}},
      {"You are too closing to the toy", {0, -1}},
      {"Can you approach to the toy?", {0, 1}},
      {"Please approach to the toy.", {0, 1}},
      {"You do not need to care about the toy.", {0, 1}},
      {"You do not need to be careful about the toy.", {0, 1}},
      {"You do not have to care about the toy so much.", {0, 1}},
  };
  return corpus;
}

std::vector<TrainExample> parse_corpus(std::string_view text) {
  std::vector<TrainExample> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      TrainExample ex;
      ex.prompt = doc.at("prompt").get<std::string>();
      const auto marker = doc.at("marker").get<std::vector<int>>();
      if (marker.size() != 2) throw ParseError("marker must have exactly 2 components");
      ex.marker = {marker[0], marker[1]};
      if (!is_valid_marker(ex.marker)) throw ParseError("marker components must be in {-1, 0, 1}");
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<TrainExample> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

std::string corpus_to_jsonl(const std::vector<TrainExample>& examples) {
  std::string out;
  for (const auto& ex : examples) {
    out += nlohmann::json{{"prompt", ex.prompt}, {"marker", {ex.marker[0], ex.marker[1]}}}.dump();
    out += '\n';
  }
  return out;
}

}  // namespace chatmpc::interpreter
