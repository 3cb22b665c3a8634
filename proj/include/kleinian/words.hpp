#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace kleinian {

/// Letter code 2*g for generator g and 2*g+1 for its inverse; codes give shortlex order a < A < b < B.
struct Letter {
  std::uint16_t code = 0;

  static Letter gen(int g, bool inv = false) { return Letter{static_cast<std::uint16_t>(2 * g + (inv ? 1 : 0))}; }
  int generator() const { return code / 2; }
  bool inverted() const { return (code & 1) != 0; }
  Letter inverse() const { return Letter{static_cast<std::uint16_t>(code ^ 1)}; }

  friend bool operator==(Letter x, Letter y) { return x.code == y.code; }
  friend bool operator<(Letter x, Letter y) { return x.code < y.code; }
};

using Word = std::vector<Letter>;

/// Free reduction: cancels adjacent x x^-1 pairs.
inline Word reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (Letter l : w) {
    if (!out.empty() && out.back() == l.inverse())
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

inline Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& l : out) l = l.inverse();
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return reduce(out);
}

inline bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k].code != b[k].code) return a[k].code < b[k].code;
  return false;
}

/// Number of reduced words of length exactly len in a free group of the given rank.
inline std::uint64_t reduced_word_count(int rank, int len) {
  if (len == 0) return 1;
  std::uint64_t n = 2ULL * rank;
  for (int k = 1; k < len; ++k) n *= 2ULL * rank - 1;
  return n;
}

/// Visits every reduced word of length <= max_len in shortlex order.
template <class Visitor>
void for_each_reduced_word(int rank, int max_len, Visitor&& visit, bool include_empty = false) {
  if (include_empty) visit(Word{});
  if (rank <= 0) return;
  const int letters = 2 * rank;
  for (int len = 1; len <= max_len; ++len) {
    Word w(len);
    for (auto& l : w) l.code = 0;
    for (int k = 1; k < len; ++k)
      if (w[k] == w[k - 1].inverse()) w[k].code = static_cast<std::uint16_t>(w[k].code + 1);
    while (true) {
      visit(static_cast<const Word&>(w));
      int pos = len - 1;
      while (pos >= 0) {
        int next = w[pos].code + 1;
        if (pos > 0 && next == w[pos - 1].inverse().code) ++next;
        if (next < letters) {
          w[pos].code = static_cast<std::uint16_t>(next);
          break;
        }
        --pos;
      }
      if (pos < 0) break;
      for (int k = pos + 1; k < len; ++k) {
        w[k].code = (w[k - 1].inverse().code == 0) ? 1 : 0;
      }
    }
  }
}

inline std::vector<Word> enumerate_reduced_words(int rank, int max_len, bool include_empty = false) {
  std::vector<Word> out;
  for_each_reduced_word(rank, max_len, [&](const Word& w) { out.push_back(w); }, include_empty);
  return out;
}

/// Compact text form: one character per letter, upper case for inverses when labels are
/// single lower-case letters; otherwise space separated labels with a "^-1" suffix.
inline std::string to_string(const Word& w, const std::vector<std::string>& labels) {
  bool compact = true;
  for (const auto& s : labels)
    compact = compact && s.size() == 1 && std::islower(static_cast<unsigned char>(s[0]));
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto g = static_cast<std::size_t>(w[k].generator());
    const std::string& lab = g < labels.size() ? labels[g] : std::to_string(g);
    if (compact) {
      out += w[k].inverted() ? static_cast<char>(std::toupper(static_cast<unsigned char>(lab[0])))
                             : lab[0];
    } else {
      if (k) out += ' ';
      out += lab;
      if (w[k].inverted()) out += "^-1";
    }
  }
  return out.empty() ? std::string("1") : out;
}

/// Parses the compact form, "x^-1" suffixes and whitespace; "1" or "" is the empty word.
inline Word parse_word(const std::string& text, const std::vector<std::string>& labels) {
  Word w;
  std::size_t i = 0;
  auto lookup = [&](const std::string& lab) -> int {
    for (std::size_t g = 0; g < labels.size(); ++g)
      if (labels[g] == lab) return static_cast<int>(g);
    return -1;
  };
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '*' || ch == '.') {
      ++i;
      continue;
    }
    if (ch == '1' && text.size() == 1) break;
    std::size_t best_len = 0;
    int best_g = -1;
    for (std::size_t g = 0; g < labels.size(); ++g) {
      const auto& lab = labels[g];
      if (!lab.empty() && text.compare(i, lab.size(), lab) == 0 && lab.size() > best_len) {
        best_len = lab.size();
        best_g = static_cast<int>(g);
      }
    }
    bool inv = false;
    if (best_g < 0 && std::isupper(static_cast<unsigned char>(ch))) {
      best_g = lookup(std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(ch)))));
      best_len = 1;
      inv = best_g >= 0;
    }
    if (best_g < 0)
      throw Error(ErrorCode::UnknownLabel, "unknown generator label in '" + text + "'");
    i += best_len;
    if (text.compare(i, 3, "^-1") == 0) {
      inv = !inv;
      i += 3;
    }
    w.push_back(Letter::gen(best_g, inv));
  }
  return w;
}

}  // namespace kleinian
