#pragma once

// Normalization layer: tokenizer, Porter stemmer, naive sentence splitter.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chis::textproc {

/// Lowercase word: letters, digits, internal apostrophes or hyphens.
using Token = std::string;

/// Splits on every byte that is not an ASCII letter/digit, apostrophe,
/// hyphen, or part of a multi-byte UTF-8 sequence; lowercases ASCII; strips
/// leading and trailing apostrophes/hyphens from each piece.
std::vector<Token> tokenize(std::string_view text);

/// Porter (1980) stemmer, matching the reference ANSI C release.
/// Words containing anything other than a-z are returned unchanged.
std::string porter_stem(std::string_view word);

std::vector<Token> stem_tokens(std::span<const Token> tokens);

/// Splits after runs of '.', '!' or '?' that are followed by whitespace or
/// end of text. Delimiters are dropped and pieces trimmed; empty pieces are
/// discarded. Abbreviations such as "Dr." are split too.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace chis::textproc
