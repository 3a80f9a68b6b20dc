#include "treeflow/word.hpp"

#include <cctype>

#include "treeflow/error.hpp"

namespace treeflow {

namespace {

void push_reduced(std::vector<int>& out, int letter) {
  if (!out.empty() && out.back() == letter_inverse(letter)) {
    out.pop_back();
  } else {
    out.push_back(letter);
  }
}

}  // namespace

Word::Word(std::vector<int> letters) {
  letters_.reserve(letters.size());
  for (int l : letters) push_reduced(letters_, l);
}

Word Word::generator(int gen, bool inverse) {
  Word w;
  w.letters_.push_back(2 * gen + (inverse ? 1 : 0));
  return w;
}

Word Word::parse(std::string_view text, int rank) {
  std::vector<int> letters;
  if (text == "1") return Word();
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '.' || c == '*') continue;
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::InvalidArgument, "bad letter '" + std::string(1, c) + "' in word");
    }
    bool inv = std::isupper(static_cast<unsigned char>(c)) != 0;
    int gen = std::tolower(static_cast<unsigned char>(c)) - 'a';
    if (gen >= rank) {
      throw Error(ErrorCode::InvalidArgument,
                  "generator '" + std::string(1, c) + "' exceeds rank " + std::to_string(rank));
    }
    letters.push_back(2 * gen + (inv ? 1 : 0));
  }
  return Word(std::move(letters));
}

Word Word::operator*(const Word& rhs) const {
  Word out = *this;
  for (int l : rhs.letters_) push_reduced(out.letters_, l);
  return out;
}

Word Word::inverse() const {
  Word out;
  out.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.letters_.push_back(letter_inverse(*it));
  return out;
}

Word Word::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  Word out;
  for (int i = 0; i < n; ++i) out = out * *this;
  return out;
}

Word Word::cyclic_reduction() const {
  std::size_t lo = 0;
  std::size_t hi = letters_.size();
  while (hi - lo >= 2 && letters_[lo] == letter_inverse(letters_[hi - 1])) {
    ++lo;
    --hi;
  }
  Word out;
  out.letters_.assign(letters_.begin() + static_cast<std::ptrdiff_t>(lo),
                      letters_.begin() + static_cast<std::ptrdiff_t>(hi));
  return out;
}

std::string Word::str() const {
  if (letters_.empty()) return "1";
  std::string s;
  for (int l : letters_) {
    char c = static_cast<char>('a' + letter_generator(l));
    s.push_back(letter_is_inverse(l) ? static_cast<char>(std::toupper(c)) : c);
  }
  return s;
}

std::vector<Word> enumerate_words(int rank, int max_length) {
  std::vector<Word> out{Word()};
  std::size_t layer_begin = 0;
  for (int len = 1; len <= max_length; ++len) {
    std::size_t layer_end = out.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (int l = 0; l < 2 * rank; ++l) {
        auto letters = out[i].letters();
        if (!letters.empty() && letters.back() == letter_inverse(l)) continue;
        std::vector<int> next(letters.begin(), letters.end());
        next.push_back(l);
        out.emplace_back(std::move(next));
      }
    }
    layer_begin = layer_end;
  }
  return out;
}

}  // namespace treeflow
