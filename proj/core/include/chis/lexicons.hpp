#pragma once

// Offline word resources: gloss dictionary, sentiment lexicon, noun list.
// All are immutable after loading.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chis/textproc.hpp"

namespace chis::lexicons {

enum class Polarity { Positive, Negative, Neutral };

std::string_view to_string(Polarity p);

class GlossDictionary {
 public:
  GlossDictionary() = default;

  /// Lines `term<TAB>gloss`; later duplicates overwrite earlier ones.
  static GlossDictionary parse(std::istream& in);
  static GlossDictionary load(const std::filesystem::path& path);

  void insert(std::string_view term, std::string gloss);
  const std::string* find(std::string_view term) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

/// Tokens of the first min(k, available) sentences of `term`'s gloss;
/// empty when the term is unknown. Throws InvalidArgument when k == 0.
std::vector<textproc::Token> gloss_first_k_sentences(const GlossDictionary& dict,
                                                     std::string_view term,
                                                     std::size_t k);

struct SentimentScores {
  double positive = 0.0;
  double negative = 0.0;
};

class SentimentLexicon {
 public:
  SentimentLexicon() = default;

  /// Lines `term<TAB>pos<TAB>neg`, scores in [0, 1]. Duplicate terms are
  /// averaged (one line per word sense).
  static SentimentLexicon parse(std::istream& in);
  static SentimentLexicon load(const std::filesystem::path& path);

  const SentimentScores* find(std::string_view term) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, SentimentScores, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, SentimentScores, std::less<>> entries_;
};

Polarity polarity(const SentimentLexicon& lex, std::string_view word);

class NounLexicon {
 public:
  NounLexicon() = default;
  explicit NounLexicon(std::set<std::string, std::less<>> words);

  /// One word per line; entries are lowercased.
  static NounLexicon parse(std::istream& in);
  static NounLexicon load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string, std::less<>> words_;
};

/// Surface-form lookup after lowercasing; no stemming fallback.
bool is_noun(const NounLexicon& lex, std::string_view word);

}  // namespace chis::lexicons
