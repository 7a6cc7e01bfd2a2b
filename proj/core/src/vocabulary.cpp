#include "verbdist/vocabulary.hpp"

#include <cstdint>
#include <cstdio>

#include "verbdist/error.hpp"

namespace verbdist {

VerbVocabulary::VerbVocabulary(std::vector<std::string> verbs)
    : verbs_(std::move(verbs)) {
  if (verbs_.size() < 2) {
    throw InputError("vocabulary needs at least 2 verbs, got " +
                     std::to_string(verbs_.size()));
  }
  index_.reserve(verbs_.size());
  for (VerbIndex i = 0; i < verbs_.size(); ++i) {
    if (verbs_[i].empty()) {
      throw InputError("empty verb at vocabulary position " +
                       std::to_string(i));
    }
    if (!index_.emplace(verbs_[i], i).second) {
      throw InputError("duplicate verb in vocabulary: '" + verbs_[i] + "'");
    }
  }
}

const std::string& VerbVocabulary::at(VerbIndex index) const {
  if (index >= verbs_.size()) {
    throw InputError("verb index " + std::to_string(index) +
                     " outside vocabulary of size " +
                     std::to_string(verbs_.size()));
  }
  return verbs_[index];
}

std::optional<VerbIndex> VerbVocabulary::find(std::string_view verb) const {
  auto it = index_.find(std::string(verb));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string VerbVocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& verb : verbs_) {
    for (char c : verb) mix(static_cast<unsigned char>(c));
    mix('\n');
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace verbdist
