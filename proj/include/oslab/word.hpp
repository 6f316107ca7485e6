#pragma once

// Reduced words, elementary automorphisms and bases of the free group F_n.
//
// Letters are nonzero signed integers: i stands for x_i and -i for x_i^{-1}.
// Every Word held by the library is freely reduced.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oslab {

using Letter = int;

class Word {
 public:
  Word() = default;
  // Reduces the raw sequence on construction.
  explicit Word(std::vector<Letter> raw);
  Word(std::initializer_list<Letter> raw);

  static Word generator(int index) { return Word({index}); }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }

  Word inverse() const;
  Word operator*(const Word& rhs) const;
  Word& operator*=(const Word& rhs);
  Word power(int k) const;

  // Cyclically reduced core of the word; the conjugator is returned through
  // `conjugator` so that *this == conjugator * core * conjugator^{-1}.
  Word cyclic_core(Word* conjugator = nullptr) const;
  // Lexicographically least cyclic rotation of the core of w or of w^{-1}.
  Word conjugacy_normal_form() const;

  int max_index() const;
  std::string str() const;

  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;

 private:
  std::vector<Letter> letters_;
};

// Free reduction of an arbitrary letter sequence.
std::vector<Letter> free_reduce(std::span<const Letter> raw);
Word reduce(std::span<const Letter> raw);

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

// x_i -> x_i x_j^{sign} (RightMultiply) or x_j^{sign} x_i (LeftMultiply);
// Transposition swaps x_i and x_j; Inversion sends x_i to x_i^{-1}.
struct ElementaryAutomorphism {
  enum class Kind { Transposition, Inversion, RightMultiply, LeftMultiply };
  Kind kind = Kind::Inversion;
  int i = 1;
  int j = 1;
  int sign = 1;

  ElementaryAutomorphism inverse() const;
  bool valid(int rank) const;
  std::string str() const;
  bool operator==(const ElementaryAutomorphism&) const = default;
};

// An endomorphism of F_n given by the images of the generators.
class Automorphism {
 public:
  explicit Automorphism(int rank);
  Automorphism(int rank, std::vector<Word> images);
  static Automorphism elementary(int rank, const ElementaryAutomorphism& move);
  // m_1 o m_2 o ... o m_k.
  static Automorphism compose_moves(int rank, std::span<const ElementaryAutomorphism> moves);

  int rank() const { return rank_; }
  const std::vector<Word>& images() const { return images_; }
  const Word& image(int generator) const { return images_[generator - 1]; }

  Word apply(const Word& w) const;
  // (*this) o rhs.
  Automorphism compose(const Automorphism& rhs) const;
  bool is_identity() const;

 private:
  int rank_;
  std::vector<Word> images_;
};

// Substitutes letter k with images[|k|-1]^{sign k} and reduces.
Word substitute(const Word& w, std::span<const Word> images);

// A basis y_i = phi(x_i), with phi = m_1 o ... o m_k recorded in `provenance`.
// Applying a Nielsen move m to the tuple replaces phi by phi o m.
class BasisTuple {
 public:
  explicit BasisTuple(int rank);  // the standard basis
  BasisTuple(int rank, std::vector<ElementaryAutomorphism> provenance);

  // Recovers provenance for an arbitrary tuple by Nielsen reduction.
  // Returns nullopt if the tuple is not a basis (or the search budget ran out).
  static std::optional<BasisTuple> from_elements(int rank, const std::vector<Word>& elements);

  int rank() const { return rank_; }
  const std::vector<Word>& elements() const { return forward_.images(); }
  const Word& element(int i) const { return forward_.image(i); }
  const std::vector<ElementaryAutomorphism>& provenance() const { return provenance_; }
  const Automorphism& forward() const { return forward_; }
  // x_i written as words in the basis letters.
  const Automorphism& inverse() const { return inverse_; }

  // The unique reduced word W with w = W(y_1, ..., y_n).
  Word rewrite(const Word& w) const { return inverse_.apply(w); }

  BasisTuple then(const ElementaryAutomorphism& move) const;
  // phi' = outer o phi: the basis obtained by pushing every element through `outer`.
  BasisTuple pushed_through(std::span<const ElementaryAutomorphism> outer) const;

 private:
  int rank_;
  std::vector<ElementaryAutomorphism> provenance_;
  Automorphism forward_;
  Automorphism inverse_;
};

// |w|_b: length of w written in the basis b.
std::size_t word_length(const Word& w, const BasisTuple& b);
// |y|_x: maximal length of an element of y written in x.
std::size_t basis_norm(const BasisTuple& y, const BasisTuple& x);

struct ConjugateBasisCheck {
  bool precondition_holds = false;
  std::size_t lhs = 0;  // |v|_y
  std::size_t rhs = 0;  // |w|_y^2 |y|_x
  bool holds() const { return precondition_holds && lhs <= rhs; }
};

// Checks |v|_y <= |w|_y^2 |y|_x for bases with x_i = v w_i v^{-1}.
ConjugateBasisCheck check_conjugate_basis_bound(const BasisTuple& x, const BasisTuple& y,
                                                const BasisTuple& w, const Word& v);

// The basis v^{-1} x_i v of a given basis x, with its provenance.
BasisTuple conjugate_basis(const BasisTuple& x, const Word& v);

}  // namespace oslab
