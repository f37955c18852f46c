#include "chis/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "chis/error.hpp"

namespace chis::features {

std::string_view to_string(Schema s) {
  return s == Schema::Task1V1 ? "task1-v1" : "task2-v1";
}

Schema parse_schema(std::string_view id) {
  if (id == "task1-v1") return Schema::Task1V1;
  if (id == "task2-v1") return Schema::Task2V1;
  throw Error(ErrorCode::InvalidArgument,
              "unknown feature schema '" + std::string(id) + "'");
}

VocabularyModel VocabularyModel::fit(
    std::span<const std::vector<Token>> sentences) {
  if (sentences.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "cannot fit a vocabulary on no sentences");
  }
  std::map<std::string, std::size_t> df;
  for (const auto& sentence : sentences) {
    const std::set<std::string_view> distinct(sentence.begin(), sentence.end());
    for (const auto term : distinct) ++df[std::string(term)];
  }
  VocabularyModel vocab;
  vocab.n_docs_ = sentences.size();
  vocab.terms_.reserve(df.size());
  vocab.df_.reserve(df.size());
  for (auto& [term, count] : df) {
    vocab.terms_.push_back(term);
    vocab.df_.push_back(count);
  }
  vocab.build_index();
  return vocab;
}

VocabularyModel VocabularyModel::from_parts(std::vector<std::string> terms,
                                            std::vector<std::size_t> df,
                                            std::size_t n_docs) {
  if (terms.size() != df.size()) {
    throw Error(ErrorCode::InvalidArgument, "terms and df differ in length");
  }
  if (n_docs == 0) {
    throw Error(ErrorCode::InvalidArgument, "n_docs must be positive");
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].empty() || (i > 0 && !(terms[i - 1] < terms[i]))) {
      throw Error(ErrorCode::InvalidArgument,
                  "vocabulary terms must be non-empty, unique and sorted");
    }
    if (df[i] < 1 || df[i] > n_docs) {
      throw Error(ErrorCode::InvalidArgument,
                  "df of '" + terms[i] + "' outside [1, n_docs]");
    }
  }
  VocabularyModel vocab;
  vocab.terms_ = std::move(terms);
  vocab.df_ = std::move(df);
  vocab.n_docs_ = n_docs;
  vocab.build_index();
  return vocab;
}

void VocabularyModel::build_index() {
  index_.clear();
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], i);
}

std::optional<std::size_t> VocabularyModel::slot(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double VocabularyModel::idf(std::size_t i) const {
  return std::log(static_cast<double>(n_docs_) / static_cast<double>(df_[i]));
}

double dice_similarity(std::span<const Token> query,
                       std::span<const Token> sentence) {
  const std::size_t total = query.size() + sentence.size();
  if (total == 0) return 0.0;
  std::unordered_map<std::string_view, std::size_t> remaining;
  for (const auto& t : query) ++remaining[t];
  std::size_t common = 0;
  for (const auto& t : sentence) {
    const auto it = remaining.find(t);
    if (it != remaining.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(total);
}

double feature_exact(std::string_view query, std::string_view sentence) {
  return dice_similarity(textproc::tokenize(query), textproc::tokenize(sentence));
}

double feature_stemmed(std::string_view query, std::string_view sentence) {
  const auto q = textproc::tokenize(query);
  const auto s = textproc::tokenize(sentence);
  return dice_similarity(textproc::stem_tokens(q), textproc::stem_tokens(s));
}

namespace {

double noun_similarity(std::span<const Token> query,
                       std::span<const Token> sentence,
                       const lexicons::NounLexicon& nouns) {
  std::set<std::string_view> query_nouns;
  for (const auto& t : query) {
    if (lexicons::is_noun(nouns, t)) query_nouns.insert(t);
  }
  if (query_nouns.empty()) return 0.0;
  const std::set<std::string_view> present(sentence.begin(), sentence.end());
  std::size_t matched = 0;
  for (const auto noun : query_nouns) matched += present.contains(noun) ? 1 : 0;
  return static_cast<double>(matched) / static_cast<double>(query_nouns.size());
}

double cosine_similarity(std::span<const Token> query,
                         std::span<const Token> sentence,
                         const VocabularyModel& vocab) {
  return cosine(tfidf_vector(vocab, query), tfidf_vector(vocab, sentence));
}

}  // namespace

double feature_noun(std::string_view query, std::string_view sentence,
                    const lexicons::NounLexicon& nouns) {
  return noun_similarity(textproc::tokenize(query), textproc::tokenize(sentence),
                         nouns);
}

double neighborhood_similarity(std::span<const Token> query,
                               std::span<const Token> sentence,
                               const lexicons::GlossDictionary& gloss) {
  const std::size_t total = query.size() + sentence.size();
  if (total == 0) return 0.0;

  // Per distinct query word, how many more sentence positions it may absorb.
  std::unordered_map<std::string_view, std::size_t> capacity;
  for (const auto& t : query) ++capacity[t];

  std::size_t common = 0;
  std::vector<char> matched(sentence.size(), 0);
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const auto it = capacity.find(sentence[i]);
    if (it != capacity.end() && it->second > 0) {
      --it->second;
      matched[i] = 1;
      ++common;
    }
  }

  if (!gloss.empty()) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (matched[i]) continue;
      const auto gloss_tokens =
          lexicons::gloss_first_k_sentences(gloss, sentence[i], kGlossSentences);
      if (gloss_tokens.empty()) continue;
      const std::set<std::string_view> mentioned(gloss_tokens.begin(),
                                                 gloss_tokens.end());
      // Credit the first query word (in query order) the gloss mentions
      // that still has capacity.
      for (const auto& q : query) {
        auto& left = capacity[q];
        if (left > 0 && mentioned.contains(q)) {
          --left;
          matched[i] = 1;
          ++common;
          break;
        }
      }
    }
  }
  const double value =
      2.0 * static_cast<double>(common) / static_cast<double>(total);
  return std::clamp(value, 0.0, 1.0);
}

double feature_neighborhood(std::string_view query, std::string_view sentence,
                            const lexicons::GlossDictionary& gloss) {
  return neighborhood_similarity(textproc::tokenize(query),
                                 textproc::tokenize(sentence), gloss);
}

SparseVector tfidf_vector(const VocabularyModel& vocab,
                          std::span<const Token> tokens) {
  SparseVector out;
  if (tokens.empty()) return out;
  std::map<std::size_t, std::size_t> counts;
  for (const auto& t : tokens) {
    if (const auto slot = vocab.slot(t)) ++counts[*slot];
  }
  const auto length = static_cast<double>(tokens.size());
  out.reserve(counts.size());
  for (const auto& [slot, count] : counts) {
    const double weight = (static_cast<double>(count) / length) * vocab.idf(slot);
    out.emplace_back(slot, weight);
  }
  return out;
}

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (const auto& [_, w] : a) norm_a += w * w;
  for (const auto& [_, w] : b) norm_b += w * w;
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  const double value = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
  return std::clamp(value, 0.0, 1.0);
}

double feature_cosine(std::string_view query, std::string_view sentence,
                      const VocabularyModel& vocab) {
  return cosine_similarity(textproc::tokenize(query),
                           textproc::tokenize(sentence), vocab);
}

FeatureVector task1_features(std::string_view query, std::string_view sentence,
                             const VocabularyModel& vocab,
                             const lexicons::GlossDictionary& gloss,
                             const lexicons::NounLexicon& nouns) {
  const auto q = textproc::tokenize(query);
  const auto s = textproc::tokenize(sentence);
  FeatureVector fv;
  fv.schema = Schema::Task1V1;
  fv.values = {
      dice_similarity(q, s),
      dice_similarity(textproc::stem_tokens(q), textproc::stem_tokens(s)),
      noun_similarity(q, s, nouns),
      neighborhood_similarity(q, s, gloss),
      cosine_similarity(q, s, vocab),
  };
  return fv;
}

PolarityCounts count_polarities(std::span<const Token> tokens,
                                const lexicons::SentimentLexicon& lex) {
  PolarityCounts counts;
  for (const auto& t : tokens) {
    switch (lexicons::polarity(lex, t)) {
      case lexicons::Polarity::Positive: ++counts.positive; break;
      case lexicons::Polarity::Negative: ++counts.negative; break;
      case lexicons::Polarity::Neutral: ++counts.neutral; break;
    }
  }
  return counts;
}

FeatureVector task2_features(std::string_view sentence, bool relevant,
                             const VocabularyModel& vocab,
                             const lexicons::SentimentLexicon& sentiment) {
  if (!vocab.fitted()) {
    throw Error(ErrorCode::VocabNotFitted,
                "task-2 features need a fitted global vocabulary");
  }
  const auto tokens = textproc::tokenize(sentence);
  FeatureVector fv;
  fv.schema = Schema::Task2V1;
  fv.values.assign(vocab.size() + 4, 0.0);
  for (const auto& [slot, weight] : tfidf_vector(vocab, tokens)) {
    fv.values[slot] = weight;
  }
  const auto counts = count_polarities(tokens, sentiment);
  const std::size_t n = vocab.size();
  fv.values[n] = static_cast<double>(counts.positive);
  fv.values[n + 1] = static_cast<double>(counts.negative);
  fv.values[n + 2] = static_cast<double>(counts.neutral);
  fv.values[n + 3] = relevant ? 1.0 : 0.0;
  return fv;
}

}  // namespace chis::features
