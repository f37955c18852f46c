#include "chis/lexicons.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>

#include "chis/error.hpp"
#include "detail.hpp"

namespace chis::lexicons {

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

// Calls fn(line, line_no) for every line that is neither blank nor a
// '#' comment. Trailing CR is removed.
template <typename Fn>
void for_each_content_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const auto content = detail::trim(line);
    if (content.empty() || content.front() == '#') continue;
    fn(std::string_view(line), line_no);
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double parse_score(std::string_view text, std::size_t line_no) {
  text = detail::trim(text);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::MalformedLine,
                "score '" + std::string(text) + "' is not a number", line_no);
  }
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::ScoreOutOfRange,
                "score " + std::string(text) + " outside [0, 1]", line_no);
  }
  return value;
}

}  // namespace

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::Positive: return "positive";
    case Polarity::Negative: return "negative";
    case Polarity::Neutral: return "neutral";
  }
  return "neutral";
}

GlossDictionary GlossDictionary::parse(std::istream& in) {
  GlossDictionary dict;
  for_each_content_line(in, [&](std::string_view line, std::size_t line_no) {
    const auto parts = split_tabs(line);
    if (parts.size() != 2) {
      throw Error(ErrorCode::MalformedLine,
                  "expected term<TAB>gloss, found " +
                      std::to_string(parts.size() - 1) + " tabs",
                  line_no);
    }
    const auto term = detail::trim(parts[0]);
    if (term.empty()) {
      throw Error(ErrorCode::MalformedLine, "empty term", line_no);
    }
    dict.insert(term, std::string(detail::trim(parts[1])));
  });
  return dict;
}

GlossDictionary GlossDictionary::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse(in);
}

void GlossDictionary::insert(std::string_view term, std::string gloss) {
  entries_.insert_or_assign(detail::ascii_lower(term), std::move(gloss));
}

const std::string* GlossDictionary::find(std::string_view term) const {
  const auto it = entries_.find(term);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<textproc::Token> gloss_first_k_sentences(const GlossDictionary& dict,
                                                     std::string_view term,
                                                     std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const std::string* gloss = dict.find(term);
  if (gloss == nullptr) return {};
  const auto sentences = textproc::split_sentences(*gloss);
  std::vector<textproc::Token> tokens;
  for (std::size_t i = 0; i < sentences.size() && i < k; ++i) {
    auto part = textproc::tokenize(sentences[i]);
    tokens.insert(tokens.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  return tokens;
}

SentimentLexicon SentimentLexicon::parse(std::istream& in) {
  struct Sum {
    double positive = 0.0;
    double negative = 0.0;
    std::size_t senses = 0;
  };
  std::map<std::string, Sum, std::less<>> sums;
  for_each_content_line(in, [&](std::string_view line, std::size_t line_no) {
    const auto parts = split_tabs(line);
    if (parts.size() != 3) {
      throw Error(ErrorCode::MalformedLine, "expected term<TAB>pos<TAB>neg",
                  line_no);
    }
    const auto term = detail::trim(parts[0]);
    if (term.empty()) {
      throw Error(ErrorCode::MalformedLine, "empty term", line_no);
    }
    const double pos = parse_score(parts[1], line_no);
    const double neg = parse_score(parts[2], line_no);
    auto& sum = sums[detail::ascii_lower(term)];
    sum.positive += pos;
    sum.negative += neg;
    ++sum.senses;
  });
  SentimentLexicon lex;
  for (const auto& [term, sum] : sums) {
    const auto n = static_cast<double>(sum.senses);
    lex.entries_.emplace(term, SentimentScores{sum.positive / n, sum.negative / n});
  }
  return lex;
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse(in);
}

const SentimentScores* SentimentLexicon::find(std::string_view term) const {
  const auto it = entries_.find(term);
  return it == entries_.end() ? nullptr : &it->second;
}

Polarity polarity(const SentimentLexicon& lex, std::string_view word) {
  const auto* scores = lex.find(detail::ascii_lower(word));
  if (scores == nullptr) return Polarity::Neutral;
  if (scores->positive > scores->negative) return Polarity::Positive;
  if (scores->negative > scores->positive) return Polarity::Negative;
  return Polarity::Neutral;
}

NounLexicon::NounLexicon(std::set<std::string, std::less<>> words) {
  for (const auto& w : words) {
    const auto t = detail::trim(w);
    if (!t.empty()) words_.insert(detail::ascii_lower(t));
  }
}

NounLexicon NounLexicon::parse(std::istream& in) {
  NounLexicon lex;
  for_each_content_line(in, [&](std::string_view line, std::size_t) {
    lex.words_.insert(detail::ascii_lower(detail::trim(line)));
  });
  return lex;
}

NounLexicon NounLexicon::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse(in);
}

bool NounLexicon::contains(std::string_view word) const {
  return words_.contains(detail::ascii_lower(word));
}

bool is_noun(const NounLexicon& lex, std::string_view word) {
  return lex.contains(word);
}

}  // namespace chis::lexicons
