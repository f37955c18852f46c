#pragma once

// Feature extraction for both tasks.
//
// Task 1 (relevance): five lexical similarities between a query and a
// sentence, ordered [exact, stemmed, noun, neighborhood, cosine], each in
// [0, 1].
//
// Task 2 (stance): a TF-IDF block over the global training vocabulary (N
// dims, term order) followed by positive, negative and neutral word counts
// and a 0/1 relevance flag.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chis/lexicons.hpp"
#include "chis/textproc.hpp"

namespace chis::features {

using textproc::Token;

enum class Schema { Task1V1, Task2V1 };

std::string_view to_string(Schema s);
/// Throws InvalidArgument for unknown ids.
Schema parse_schema(std::string_view id);

inline constexpr std::size_t kTask1Dims = 5;
inline constexpr std::size_t kGlossSentences = 3;

struct FeatureVector {
  std::vector<double> values;
  Schema schema = Schema::Task1V1;

  std::size_t dims() const { return values.size(); }
};

/// Sparse vector over vocabulary slots, sorted by slot.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

/// Terms in lexicographic order with sentence-level document frequencies.
class VocabularyModel {
 public:
  VocabularyModel() = default;

  /// Throws EmptyCorpus when `sentences` is empty.
  static VocabularyModel fit(std::span<const std::vector<Token>> sentences);

  /// Rebuilds a fitted model from serialized parts. Throws InvalidArgument
  /// when terms are unsorted/duplicated or a df lies outside [1, n_docs].
  static VocabularyModel from_parts(std::vector<std::string> terms,
                                    std::vector<std::size_t> df,
                                    std::size_t n_docs);

  bool fitted() const { return n_docs_ > 0; }
  std::size_t size() const { return terms_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& df() const { return df_; }

  std::optional<std::size_t> slot(std::string_view term) const;
  /// ln(n_docs / df) for slot `i`.
  double idf(std::size_t i) const;

 private:
  void build_index();

  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

/// 2 * |multiset intersection| / (|a| + |b|); 0 when both are empty.
double dice_similarity(std::span<const Token> query,
                       std::span<const Token> sentence);

double feature_exact(std::string_view query, std::string_view sentence);
double feature_stemmed(std::string_view query, std::string_view sentence);

/// Fraction of distinct query nouns that occur among the sentence tokens;
/// 0 when the query has no nouns.
double feature_noun(std::string_view query, std::string_view sentence,
                    const lexicons::NounLexicon& nouns);

/// Dice similarity where a sentence token also matches when the first
/// three sentences of its gloss mention a query token. Exact matches are
/// credited first; each query token can absorb at most as many matches as
/// it has occurrences in the query.
double feature_neighborhood(std::string_view query, std::string_view sentence,
                            const lexicons::GlossDictionary& gloss);
double neighborhood_similarity(std::span<const Token> query,
                               std::span<const Token> sentence,
                               const lexicons::GlossDictionary& gloss);

/// TF = count / |tokens| (out-of-vocabulary tokens still count in the
/// denominator), weight = TF * ln(n_docs / df).
SparseVector tfidf_vector(const VocabularyModel& vocab,
                          std::span<const Token> tokens);

/// Cosine of two sparse vectors; 0 when either has zero norm.
double cosine(const SparseVector& a, const SparseVector& b);

double feature_cosine(std::string_view query, std::string_view sentence,
                      const VocabularyModel& vocab);

FeatureVector task1_features(std::string_view query, std::string_view sentence,
                             const VocabularyModel& vocab,
                             const lexicons::GlossDictionary& gloss,
                             const lexicons::NounLexicon& nouns);

struct PolarityCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t neutral = 0;
};

PolarityCounts count_polarities(std::span<const Token> tokens,
                                const lexicons::SentimentLexicon& lex);

/// Throws VocabNotFitted when `vocab` was never fitted.
FeatureVector task2_features(std::string_view sentence, bool relevant,
                             const VocabularyModel& vocab,
                             const lexicons::SentimentLexicon& sentiment);

}  // namespace chis::features
