#ifndef ARENA_STORE_SAFETY_FILTER_H_
#define ARENA_STORE_SAFETY_FILTER_H_

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "arena/store/types.h"

namespace arena::store {

// Raised by a filter backend that could not classify a prompt.
class SafetyFilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Content moderation hook. Implementations return kSafe or kUnsafe with a
// category label, or throw SafetyFilterError.
class SafetyFilter {
 public:
  virtual ~SafetyFilter() = default;
  virtual Safety classify(std::string_view text) const = 0;
};

// Flags text containing any listed term, compared case-insensitively on
// whole words. Multi-word terms match consecutive words. When several
// categories match, the lexicographically first category wins.
class DenylistFilter : public SafetyFilter {
 public:
  explicit DenylistFilter(std::map<std::string, std::vector<std::string>> terms);

  // JSON object mapping category -> array of terms.
  static DenylistFilter from_file(const std::filesystem::path& path);

  Safety classify(std::string_view text) const override;

 private:
  std::map<std::string, std::vector<std::vector<std::string>>> terms_;
};

// Returns `prompt` with its safety resolved by `filter`. Precondition: the
// prompt is unchecked (ValidationError otherwise). Filter failures
// propagate; the caller's prompt is left untouched.
Prompt moderate_prompt(const Prompt& prompt, const SafetyFilter& filter);

// Lowercased alphanumeric words of `text`.
std::vector<std::string> tokenize_words(std::string_view text);

}  // namespace arena::store

#endif  // ARENA_STORE_SAFETY_FILTER_H_
