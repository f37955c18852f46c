#pragma once

// Deterministic synthetic consumer-health corpus with matching lexicons.
//
// Relevant sentences reuse at least half of the query's nouns (sometimes with
// a glossed synonym such as "melanoma"); irrelevant ones draw from an
// off-topic pool.
// Support sentences carry positive words, oppose sentences negative ones,
// and every irrelevant sentence is neutral.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chis/corpus.hpp"

namespace chis::synth {

struct Topic {
  std::string query_id;
  std::string query_text;
  std::vector<std::string> nouns;     // nouns of the query text
  std::vector<std::string> synonyms;  // glossed words pointing back at nouns
};

/// Five topics mirroring the shared-task queries.
const std::vector<Topic>& default_topics();

/// Per-query sentence counts of the original training and test files.
const std::vector<std::size_t>& training_census();  // 68/83/61/71/65
const std::vector<std::size_t>& test_census();      // 342/414/260/279/247

struct CorpusOptions {
  std::vector<std::size_t> sizes;  // one entry per default topic
  std::uint64_t seed = 0;
  double relevant_fraction = 0.5;
};

std::vector<corpus::SentenceRecord> generate_corpus(const CorpusOptions& options);

/// Writes nouns.txt, gloss.tsv and sentiment.tsv into `dir`.
void write_lexicons(const std::filesystem::path& dir);

void write_dataset_file(const std::filesystem::path& path,
                        const std::vector<corpus::SentenceRecord>& records);

}  // namespace chis::synth
