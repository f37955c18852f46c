#include <gtest/gtest.h>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "chis/textproc.hpp"
#include "oracles.hpp"

using namespace chis::textproc;

namespace {

std::vector<std::pair<std::string, std::string>> porter_vocabulary() {
  std::ifstream in(std::filesystem::path(CHIS_TEST_DATA_DIR) / "porter_vocabulary.tsv");
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return pairs;
}

bool is_delim(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("Ram is a good boy"),
            (std::vector<Token>{"ram", "is", "a", "good", "boy"}));
  EXPECT_EQ(tokenize("e-cigarettes, safer?"), (std::vector<Token>{"e-cigarettes", "safer"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("  ...  ,,, ").empty());
}

TEST(Tokenize, ApostrophesHyphensDigitsAndCase) {
  EXPECT_EQ(tokenize("Don't 'quote' --dash-- MMR2 vitamin-C's"),
            (std::vector<Token>{"don't", "quote", "dash", "mmr2", "vitamin-c's"}));
  EXPECT_EQ(tokenize("'-'"), std::vector<Token>{});
  EXPECT_EQ(tokenize("a,a;a"), (std::vector<Token>{"a", "a", "a"}));
}

TEST(Tokenize, NonAsciiBytesStayInsideWords) {
  EXPECT_EQ(tokenize("caf\xC3\xA9 au lait"),
            (std::vector<Token>{"caf\xC3\xA9", "au", "lait"}));
}

TEST(Tokenize, IdempotentOnJoinedOutput) {
  std::mt19937_64 rng(3);
  const std::string alphabet = "abcXYZ09'- .,!?;:\t\n\"()";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (int i = 0, n = static_cast<int>(rng() % 60); i < n; ++i) {
      text.push_back(alphabet[rng() % alphabet.size()]);
    }
    const auto once = tokenize(text);
    EXPECT_EQ(tokenize(chis::testing::join(once)), once) << text;
    for (const auto& t : once) {
      ASSERT_FALSE(t.empty());
      EXPECT_NE(t.front(), '\'');
      EXPECT_NE(t.front(), '-');
      EXPECT_NE(t.back(), '\'');
      EXPECT_NE(t.back(), '-');
      for (char c : t) EXPECT_FALSE(c >= 'A' && c <= 'Z');
    }
  }
}

TEST(PorterStem, ReferenceExamples) {
  EXPECT_EQ(porter_stem("mangoes"), "mango");
  EXPECT_EQ(porter_stem("a"), "a");
  EXPECT_EQ(porter_stem("is"), "is");
  EXPECT_EQ(porter_stem("caresses"), "caress");
  EXPECT_EQ(porter_stem("ponies"), "poni");
  EXPECT_EQ(porter_stem("ties"), "ti");
  EXPECT_EQ(porter_stem("cats"), "cat");
  EXPECT_EQ(porter_stem("relational"), "relat");
  EXPECT_EQ(porter_stem("agreed"), "agre");
  EXPECT_EQ(porter_stem("plastered"), "plaster");
  EXPECT_EQ(porter_stem("hopping"), "hop");
  EXPECT_EQ(porter_stem("hoped"), "hope");
  EXPECT_EQ(porter_stem("generalizations"), "gener");
  EXPECT_EQ(porter_stem("highly"), "highli");
}

TEST(PorterStem, ReferenceDeparturesFromThePublishedAlgorithm) {
  // The reference C release maps -bli to -ble and adds a -logi rule.
  EXPECT_EQ(porter_stem("possibly"), "possibl");
  EXPECT_EQ(porter_stem("analogi"), "analog");
}

TEST(PorterStem, NonLowercaseAsciiIsUnchanged) {
  EXPECT_EQ(porter_stem("Running"), "Running");
  EXPECT_EQ(porter_stem("e-cigarettes"), "e-cigarettes");
  EXPECT_EQ(porter_stem("caf\xC3\xA9s"), "caf\xC3\xA9s");
  EXPECT_EQ(porter_stem(""), "");
}

TEST(PorterStem, CanonicalVocabularyAgreement) {
  const auto pairs = porter_vocabulary();
  ASSERT_GT(pairs.size(), 23000u);
  std::size_t agree = 0;
  std::vector<std::string> misses;
  for (const auto& [word, stem] : pairs) {
    if (porter_stem(word) == stem) {
      ++agree;
    } else if (misses.size() < 10) {
      misses.push_back(word);
    }
  }
  const double rate = static_cast<double>(agree) / static_cast<double>(pairs.size());
  EXPECT_GE(rate, 0.999) << "first misses: " << chis::testing::join(misses);
}

TEST(PorterStem, NeverLengthensNeverEmpties) {
  for (const auto& [word, stem] : porter_vocabulary()) {
    const auto out = porter_stem(word);
    ASSERT_LE(out.size(), word.size()) << word;
    ASSERT_FALSE(out.empty()) << word;
  }
}

TEST(PorterStem, IdempotenceSpotCheckAgainstReference) {
  const auto pairs = porter_vocabulary();
  std::map<std::string, std::string> ref(pairs.begin(), pairs.end());
  std::mt19937_64 rng(100);
  int stable = 0, checked = 0;
  std::vector<std::string> exceptions;
  while (checked < 100) {
    const auto& word = pairs[rng() % pairs.size()].first;
    const auto once = porter_stem(word);
    const auto twice = porter_stem(once);
    ++checked;
    if (twice == once) {
      ++stable;
    } else {
      exceptions.push_back(word + "->" + once + "->" + twice);
    }
    // Where the reference lists the stem itself, both agree on its image.
    if (auto it = ref.find(once); it != ref.end()) {
      EXPECT_EQ(twice, it->second) << word;
    }
  }
  RecordProperty("idempotence_exceptions", chis::testing::join(exceptions));
  EXPECT_GE(stable, 80) << chis::testing::join(exceptions);
}

TEST(StemTokens, Elementwise) {
  EXPECT_EQ(stem_tokens(std::vector<Token>{"mangoes", "is"}),
            (std::vector<Token>{"mango", "is"}));
  EXPECT_TRUE(stem_tokens(std::vector<Token>{}).empty());
}

TEST(SplitSentences, Examples) {
  EXPECT_EQ(split_sentences("A is B. C is D. E. F."),
            (std::vector<std::string>{"A is B", "C is D", "E", "F"}));
  EXPECT_EQ(split_sentences("no terminator"), (std::vector<std::string>{"no terminator"}));
  EXPECT_EQ(split_sentences("Dr. Smith agrees."),
            (std::vector<std::string>{"Dr", "Smith agrees"}));
  EXPECT_EQ(split_sentences("Really?! Yes... 3.5 is fine"),
            (std::vector<std::string>{"Really", "Yes", "3.5 is fine"}));
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_TRUE(split_sentences(" . ! ").empty());
}

TEST(SplitSentences, PreservesNonDelimiterCharactersInOrder) {
  std::mt19937_64 rng(9);
  const std::string alphabet = "ab .!?\n,";
  for (int trial = 0; trial < 1000; ++trial) {
    std::string text;
    for (int i = 0, n = static_cast<int>(rng() % 40); i < n; ++i) {
      text.push_back(alphabet[rng() % alphabet.size()]);
    }
    // Drop delimiter runs that end at whitespace or end of text, then all
    // whitespace; the sentences must hold exactly what is left.
    std::string expected;
    for (std::size_t i = 0; i < text.size();) {
      if (is_delim(text[i])) {
        std::size_t j = i;
        while (j < text.size() && is_delim(text[j])) ++j;
        if (j == text.size() || is_ws(text[j])) {
          i = j;
          continue;
        }
        expected.append(text, i, j - i);
        i = j;
        continue;
      }
      if (!is_ws(text[i])) expected.push_back(text[i]);
      ++i;
    }
    std::string got;
    for (const auto& s : split_sentences(text)) {
      ASSERT_FALSE(s.empty());
      for (char c : s) {
        if (!is_ws(c)) got.push_back(c);
      }
    }
    EXPECT_EQ(got, expected) << '"' << text << '"';
  }
}
