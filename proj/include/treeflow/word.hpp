#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treeflow {

// Element of a free group, stored freely reduced. A letter is encoded as
// 2*generator + (1 if inverse), so letter ^ 1 is its inverse.
//
// Text form: generators are 'a', 'b', 'c', ...; upper case is the inverse;
// "1" (or the empty string) is the identity.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<int> letters);

  static Word generator(int gen, bool inverse = false);
  static Word parse(std::string_view text, int rank);

  Word operator*(const Word& rhs) const;
  Word inverse() const;
  Word pow(int n) const;

  std::span<const int> letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }

  // Conjugate-reduced core: strips x...x^-1 from both ends.
  Word cyclic_reduction() const;

  std::string str() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  std::vector<int> letters_;
};

inline int letter_inverse(int letter) { return letter ^ 1; }
inline int letter_generator(int letter) { return letter >> 1; }
inline bool letter_is_inverse(int letter) { return (letter & 1) != 0; }

// All reduced words of length <= max_length over `rank` generators, in
// shortlex order (identity first).
std::vector<Word> enumerate_words(int rank, int max_length);

}  // namespace treeflow
