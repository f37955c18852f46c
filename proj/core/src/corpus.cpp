#include "chis/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <random>
#include <unordered_map>

#include "chis/error.hpp"
#include "detail.hpp"

namespace chis::corpus {

std::string_view to_string(Relevance r) {
  return r == Relevance::Relevant ? "relevant" : "irrelevant";
}

std::string_view to_string(Stance s) {
  switch (s) {
    case Stance::Support: return "support";
    case Stance::Oppose: return "oppose";
    case Stance::Neutral: return "neutral";
  }
  return "neutral";
}

std::optional<Relevance> parse_relevance(std::string_view text,
                                         std::size_t row) {
  const std::string label = detail::ascii_lower(detail::trim(text));
  if (label.empty()) return std::nullopt;
  if (label == "relevant") return Relevance::Relevant;
  if (label == "irrelevant") return Relevance::Irrelevant;
  throw Error(ErrorCode::BadLabel,
              "relevance label '" + std::string(text) + "'", row);
}

std::optional<Stance> parse_stance(std::string_view text, std::size_t row) {
  const std::string label = detail::ascii_lower(detail::trim(text));
  if (label.empty()) return std::nullopt;
  if (label == "support") return Stance::Support;
  if (label == "oppose") return Stance::Oppose;
  if (label == "neutral") return Stance::Neutral;
  throw Error(ErrorCode::BadLabel, "stance label '" + std::string(text) + "'",
              row);
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  std::string data{std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>()};
  if (data.starts_with("\xEF\xBB\xBF")) data.erase(0, 3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool after_quote = false;  // just closed a quoted field
  bool row_has_content = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    after_quote = false;
  };
  auto end_row = [&] {
    end_field();
    // A physically empty line is skipped rather than read as one empty field.
    if (row_has_content || row.size() > 1) records.push_back(std::move(row));
    row.clear();
    row_has_content = false;
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      end_field();
      row_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') ++i;
      end_row();
    } else if (c == '"') {
      if (!field.empty() || after_quote) {
        throw Error(ErrorCode::MalformedCsv, "stray quote inside field",
                    records.size());
      }
      in_quotes = true;
      row_has_content = true;
    } else {
      if (after_quote) {
        throw Error(ErrorCode::MalformedCsv,
                    "text after closing quote", records.size());
      }
      field.push_back(c);
      row_has_content = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::MalformedCsv, "unterminated quoted field",
                records.size());
  }
  if (row_has_content || !field.empty() || !row.empty()) end_row();

  CsvTable table;
  if (records.empty()) {
    throw Error(ErrorCode::MissingColumn, "empty file: no header row");
  }
  table.header = std::move(records.front());
  for (auto& name : table.header) name = std::string(detail::trim(name));
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw Error(ErrorCode::MalformedCsv,
                  "expected " + std::to_string(table.header.size()) +
                      " fields, found " + std::to_string(records[r].size()),
                  r);
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_csv(in);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

std::vector<SentenceRecord> records_from_table(const CsvTable& table,
                                               bool labeled) {
  constexpr std::string_view kColumns[] = {"query_id", "query_text",
                                           "sentence_text", "relevance",
                                           "stance"};
  std::size_t idx[5];
  for (std::size_t c = 0; c < 5; ++c) {
    const auto found = table.column(kColumns[c]);
    if (!found) {
      throw Error(ErrorCode::MissingColumn,
                  "header lacks column '" + std::string(kColumns[c]) + "'");
    }
    idx[c] = *found;
  }

  std::vector<SentenceRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t row_no = r + 1;
    SentenceRecord rec;
    rec.query_id = std::string(detail::trim(row[idx[0]]));
    rec.query_text = std::string(detail::trim(row[idx[1]]));
    rec.sentence_text = std::string(detail::trim(row[idx[2]]));
    if (rec.query_id.empty()) {
      throw Error(ErrorCode::EmptyText, "empty query_id", row_no);
    }
    if (rec.query_text.empty()) {
      throw Error(ErrorCode::EmptyText, "empty query_text", row_no);
    }
    if (rec.sentence_text.empty()) {
      throw Error(ErrorCode::EmptyText, "empty sentence_text", row_no);
    }
    if (labeled) {
      rec.relevance = parse_relevance(row[idx[3]], row_no);
      rec.stance = parse_stance(row[idx[4]], row_no);
      if (!rec.relevance) {
        throw Error(ErrorCode::BadLabel,
                    "labeled dataset row has no relevance label", row_no);
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<SentenceRecord> parse_dataset(std::istream& in, bool labeled) {
  return records_from_table(read_csv(in), labeled);
}

std::vector<SentenceRecord> load_dataset(const std::filesystem::path& path,
                                         bool labeled) {
  return records_from_table(read_csv_file(path), labeled);
}

void write_dataset(std::ostream& out, std::span<const SentenceRecord> records) {
  out << kDatasetHeader << '\n';
  for (const auto& rec : records) {
    const std::string fields[] = {
        rec.query_id, rec.query_text, rec.sentence_text,
        rec.relevance ? std::string(to_string(*rec.relevance)) : "",
        rec.stance ? std::string(to_string(*rec.stance)) : ""};
    write_csv_row(out, fields);
  }
}

std::vector<QueryGroup> group_by_query(std::span<const SentenceRecord> records) {
  std::vector<QueryGroup> groups;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& rec : records) {
    const auto [it, inserted] = index.emplace(rec.query_id, groups.size());
    if (inserted) {
      groups.push_back({rec.query_id, rec.query_text, {}});
    } else if (groups[it->second].query_text != rec.query_text) {
      throw Error(ErrorCode::ConflictingQueryText,
                  "query_id '" + rec.query_id + "' has texts '" +
                      groups[it->second].query_text + "' and '" +
                      rec.query_text + "'");
    }
    groups[it->second].records.push_back(rec);
  }
  return groups;
}

std::vector<SentenceRecord> flatten(std::span<const QueryGroup> groups) {
  std::vector<SentenceRecord> out;
  for (const auto& g : groups) {
    out.insert(out.end(), g.records.begin(), g.records.end());
  }
  return out;
}

DatasetSplit split_train_dev(std::span<const SentenceRecord> records,
                             double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "train_fraction must lie in (0, 1), got " +
                    std::to_string(train_fraction));
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].relevance) {
      throw Error(ErrorCode::UnlabeledRecord, "record has no relevance label",
                  i + 1);
    }
  }

  // Positions per query, in order of first appearance.
  std::vector<std::vector<std::size_t>> positions;
  std::unordered_map<std::string_view, std::size_t> group_of;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto [it, inserted] =
        group_of.emplace(records[i].query_id, positions.size());
    if (inserted) positions.emplace_back();
    positions[it->second].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<char> in_train(records.size(), 0);
  for (auto& group : positions) {
    const auto n_train = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(group.size())));
    detail::shuffle(group, rng);
    for (std::size_t k = 0; k < n_train; ++k) in_train[group[k]] = 1;
  }

  DatasetSplit split;
  split.train_fraction = train_fraction;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (in_train[i]) {
      split.train.push_back(records[i]);
      split.train_indices.push_back(i);
    } else {
      split.dev.push_back(records[i]);
      split.dev_indices.push_back(i);
    }
  }
  return split;
}

}  // namespace chis::corpus
