#pragma once

// Sentence datasets: CSV loading, per-query grouping and the seeded
// stratified train/dev split used for hyperparameter tuning.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chis::corpus {

enum class Relevance { Relevant, Irrelevant };
enum class Stance { Support, Oppose, Neutral };

std::string_view to_string(Relevance r);
std::string_view to_string(Stance s);

/// Case-insensitive, whitespace-trimmed label parsing. Empty input yields
/// nullopt; anything outside the label domain throws BadLabel.
std::optional<Relevance> parse_relevance(std::string_view text,
                                         std::size_t row = 0);
std::optional<Stance> parse_stance(std::string_view text, std::size_t row = 0);

struct SentenceRecord {
  std::string query_id;
  std::string query_text;
  std::string sentence_text;
  std::optional<Relevance> relevance;
  std::optional<Stance> stance;

  bool operator==(const SentenceRecord&) const = default;
};

struct QueryGroup {
  std::string query_id;
  std::string query_text;
  std::vector<SentenceRecord> records;
};

struct DatasetSplit {
  std::vector<SentenceRecord> train;
  std::vector<SentenceRecord> dev;
  // Positions in the input sequence, ascending.
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> dev_indices;
  double train_fraction = 0.0;
};

inline constexpr std::string_view kDatasetHeader =
    "query_id,query_text,sentence_text,relevance,stance";

/// RFC-4180 table: a header row plus data rows of equal width.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

/// Builds records from a parsed table. Columns are located by name so extra
/// columns (e.g. predictions) are tolerated. With `labeled == false` the
/// label columns are ignored and both labels are left absent.
std::vector<SentenceRecord> records_from_table(const CsvTable& table,
                                               bool labeled);
std::vector<SentenceRecord> parse_dataset(std::istream& in, bool labeled);
std::vector<SentenceRecord> load_dataset(const std::filesystem::path& path,
                                         bool labeled);

void write_dataset(std::ostream& out, std::span<const SentenceRecord> records);

std::vector<QueryGroup> group_by_query(std::span<const SentenceRecord> records);

std::vector<SentenceRecord> flatten(std::span<const QueryGroup> groups);

DatasetSplit split_train_dev(std::span<const SentenceRecord> records,
                             double train_fraction, std::uint64_t seed);

}  // namespace chis::corpus
