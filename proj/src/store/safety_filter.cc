#include "arena/store/safety_filter.h"

#include <cctype>
#include <fstream>

#include <json.hpp>

#include "arena/errors.h"

namespace arena::store {

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    // Bytes >= 0x80 belong to multi-byte UTF-8 sequences; keep them inside
    // words so non-ASCII terms can still be listed.
    if (std::isalnum(c) || c >= 0x80) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

DenylistFilter::DenylistFilter(
    std::map<std::string, std::vector<std::string>> terms) {
  for (auto& [category, list] : terms) {
    if (category.empty()) throw ValidationError("empty denylist category");
    auto& phrases = terms_[category];
    for (const std::string& term : list) {
      auto words = tokenize_words(term);
      if (words.empty())
        throw ValidationError("denylist term '" + term + "' has no words");
      phrases.push_back(std::move(words));
    }
  }
}

DenylistFilter DenylistFilter::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open denylist " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("denylist " + path.string() + ": " + e.what());
  }
  if (!doc.is_object())
    throw ValidationError("denylist must be an object of category -> terms");
  std::map<std::string, std::vector<std::string>> terms;
  for (const auto& [category, list] : doc.items()) {
    if (!list.is_array())
      throw ValidationError("denylist category '" + category + "' is not a list");
    for (const auto& term : list) terms[category].push_back(term.get<std::string>());
  }
  return DenylistFilter(std::move(terms));
}

Safety DenylistFilter::classify(std::string_view text) const {
  const std::vector<std::string> words = tokenize_words(text);
  for (const auto& [category, phrases] : terms_) {
    for (const auto& phrase : phrases) {
      if (phrase.size() > words.size()) continue;
      for (std::size_t start = 0; start + phrase.size() <= words.size(); ++start) {
        if (std::equal(phrase.begin(), phrase.end(), words.begin() + start))
          return Safety::unsafe(category);
      }
    }
  }
  return Safety::safe();
}

Prompt moderate_prompt(const Prompt& prompt, const SafetyFilter& filter) {
  if (prompt.safety.status != Safety::Status::kUnchecked)
    throw ValidationError("prompt '" + prompt.id + "' is already moderated");
  Prompt out = prompt;
  out.safety = filter.classify(prompt.text);
  if (out.safety.status == Safety::Status::kUnchecked)
    throw SafetyFilterError("safety filter returned no verdict for prompt '" +
                            prompt.id + "'");
  return out;
}

}  // namespace arena::store
