#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace verbdist {

using VerbIndex = std::size_t;

// Ordered list of distinct verbs. The position of a verb is its index in every
// vector and matrix of the toolkit.
class VerbVocabulary {
 public:
  // Throws InputError when a verb is empty, duplicated, or fewer than two
  // verbs are given.
  explicit VerbVocabulary(std::vector<std::string> verbs);

  std::size_t size() const noexcept { return verbs_.size(); }
  const std::string& at(VerbIndex index) const;
  const std::vector<std::string>& verbs() const noexcept { return verbs_; }

  std::optional<VerbIndex> find(std::string_view verb) const;

  // Stable 64-bit FNV-1a digest over the ordered verb list, rendered as 16 hex
  // digits. Used to tag checkpoints and reports.
  std::string hash() const;

  bool operator==(const VerbVocabulary& other) const {
    return verbs_ == other.verbs_;
  }

 private:
  std::vector<std::string> verbs_;
  std::unordered_map<std::string, VerbIndex> index_;
};

}  // namespace verbdist
