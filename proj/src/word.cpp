#include "oslab/word.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace oslab {

std::vector<Letter> free_reduce(std::span<const Letter> raw) {
  std::vector<Letter> out;
  out.reserve(raw.size());
  for (Letter l : raw) {
    if (l == 0) throw std::invalid_argument("word letter 0 is not a generator");
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

Word reduce(std::span<const Letter> raw) { return Word(std::vector<Letter>(raw.begin(), raw.end())); }

Word::Word(std::vector<Letter> raw) : letters_(free_reduce(raw)) {}
Word::Word(std::initializer_list<Letter> raw) : Word(std::vector<Letter>(raw)) {}

Word Word::inverse() const {
  Word out;
  out.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.letters_.push_back(-*it);
  return out;
}

Word& Word::operator*=(const Word& rhs) {
  std::size_t k = 0;
  while (k < rhs.letters_.size() && !letters_.empty() && letters_.back() == -rhs.letters_[k]) {
    letters_.pop_back();
    ++k;
  }
  letters_.insert(letters_.end(), rhs.letters_.begin() + static_cast<std::ptrdiff_t>(k),
                  rhs.letters_.end());
  return *this;
}

Word Word::operator*(const Word& rhs) const {
  Word out = *this;
  out *= rhs;
  return out;
}

Word Word::power(int k) const {
  Word base = k < 0 ? inverse() : *this;
  Word out;
  for (int i = 0; i < std::abs(k); ++i) out *= base;
  return out;
}

Word Word::cyclic_core(Word* conjugator) const {
  std::size_t lo = 0;
  std::size_t hi = letters_.size();
  while (hi - lo >= 2 && letters_[lo] == -letters_[hi - 1]) {
    ++lo;
    --hi;
  }
  if (conjugator != nullptr) {
    conjugator->letters_.assign(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(lo));
  }
  Word core;
  core.letters_.assign(letters_.begin() + static_cast<std::ptrdiff_t>(lo),
                       letters_.begin() + static_cast<std::ptrdiff_t>(hi));
  return core;
}

namespace {

std::vector<Letter> least_rotation(const std::vector<Letter>& w) {
  std::vector<Letter> best = w;
  std::vector<Letter> cur = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best) best = cur;
  }
  return best;
}

}  // namespace

Word Word::conjugacy_normal_form() const {
  Word core = cyclic_core();
  auto a = least_rotation(core.letters_);
  auto b = least_rotation(core.inverse().letters_);
  Word out;
  out.letters_ = std::min(a, b);
  return out;
}

int Word::max_index() const {
  int m = 0;
  for (Letter l : letters_) m = std::max(m, std::abs(l));
  return m;
}

std::string Word::str() const {
  if (letters_.empty()) return "1";
  std::ostringstream os;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) os << ' ';
    Letter l = letters_[i];
    os << 'x' << std::abs(l);
    if (l < 0) os << "^-1";
  }
  return os.str();
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (Letter l : w.letters()) {
    h ^= static_cast<std::size_t>(l + 1024);
    h *= 1099511628211ull;
  }
  return h;
}

ElementaryAutomorphism ElementaryAutomorphism::inverse() const {
  ElementaryAutomorphism out = *this;
  if (kind == Kind::RightMultiply || kind == Kind::LeftMultiply) out.sign = -sign;
  return out;
}

bool ElementaryAutomorphism::valid(int rank) const {
  auto in_range = [rank](int k) { return k >= 1 && k <= rank; };
  switch (kind) {
    case Kind::Inversion:
      return in_range(i);
    case Kind::Transposition:
      return in_range(i) && in_range(j) && i != j;
    case Kind::RightMultiply:
    case Kind::LeftMultiply:
      return in_range(i) && in_range(j) && i != j && (sign == 1 || sign == -1);
  }
  return false;
}

std::string ElementaryAutomorphism::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Transposition:
      os << "swap(" << i << "," << j << ")";
      break;
    case Kind::Inversion:
      os << "inv(" << i << ")";
      break;
    case Kind::RightMultiply:
      os << "x" << i << "->x" << i << "*x" << j << (sign < 0 ? "^-1" : "");
      break;
    case Kind::LeftMultiply:
      os << "x" << i << "->x" << j << (sign < 0 ? "^-1" : "") << "*x" << i;
      break;
  }
  return os.str();
}

Word substitute(const Word& w, std::span<const Word> images) {
  std::vector<Letter> raw;
  for (Letter l : w.letters()) {
    const Word& img = images[static_cast<std::size_t>(std::abs(l) - 1)];
    if (l > 0) {
      raw.insert(raw.end(), img.letters().begin(), img.letters().end());
    } else {
      for (auto it = img.letters().rbegin(); it != img.letters().rend(); ++it) raw.push_back(-*it);
    }
  }
  return Word(std::move(raw));
}

Automorphism::Automorphism(int rank) : rank_(rank) {
  for (int i = 1; i <= rank; ++i) images_.push_back(Word::generator(i));
}

Automorphism::Automorphism(int rank, std::vector<Word> images) : rank_(rank), images_(std::move(images)) {
  if (static_cast<int>(images_.size()) != rank) throw std::invalid_argument("automorphism image count != rank");
}

Automorphism Automorphism::elementary(int rank, const ElementaryAutomorphism& m) {
  if (!m.valid(rank)) throw std::invalid_argument("invalid elementary automorphism " + m.str());
  Automorphism a(rank);
  using K = ElementaryAutomorphism::Kind;
  switch (m.kind) {
    case K::Transposition:
      std::swap(a.images_[m.i - 1], a.images_[m.j - 1]);
      break;
    case K::Inversion:
      a.images_[m.i - 1] = Word({-m.i});
      break;
    case K::RightMultiply:
      a.images_[m.i - 1] = Word({m.i, m.sign * m.j});
      break;
    case K::LeftMultiply:
      a.images_[m.i - 1] = Word({m.sign * m.j, m.i});
      break;
  }
  return a;
}

Automorphism Automorphism::compose_moves(int rank, std::span<const ElementaryAutomorphism> moves) {
  Automorphism out(rank);
  for (const auto& m : moves) out = out.compose(elementary(rank, m));
  return out;
}

Word Automorphism::apply(const Word& w) const { return substitute(w, images_); }

Automorphism Automorphism::compose(const Automorphism& rhs) const {
  std::vector<Word> imgs;
  imgs.reserve(rhs.images_.size());
  for (const auto& w : rhs.images_) imgs.push_back(apply(w));
  return Automorphism(rank_, std::move(imgs));
}

bool Automorphism::is_identity() const {
  for (int i = 1; i <= rank_; ++i) {
    if (images_[i - 1] != Word::generator(i)) return false;
  }
  return true;
}

namespace {

Automorphism inverse_of_moves(int rank, std::span<const ElementaryAutomorphism> moves) {
  Automorphism out(rank);
  for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
    out = out.compose(Automorphism::elementary(rank, it->inverse()));
  }
  return out;
}

}  // namespace

BasisTuple::BasisTuple(int rank) : rank_(rank), forward_(rank), inverse_(rank) {}

BasisTuple::BasisTuple(int rank, std::vector<ElementaryAutomorphism> provenance)
    : rank_(rank),
      provenance_(std::move(provenance)),
      forward_(Automorphism::compose_moves(rank, provenance_)),
      inverse_(inverse_of_moves(rank, provenance_)) {}

BasisTuple BasisTuple::then(const ElementaryAutomorphism& move) const {
  auto prov = provenance_;
  prov.push_back(move);
  return BasisTuple(rank_, std::move(prov));
}

BasisTuple BasisTuple::pushed_through(std::span<const ElementaryAutomorphism> outer) const {
  std::vector<ElementaryAutomorphism> prov(outer.begin(), outer.end());
  prov.insert(prov.end(), provenance_.begin(), provenance_.end());
  return BasisTuple(rank_, std::move(prov));
}

namespace {

using Tuple = std::vector<Word>;

std::size_t total_length(const Tuple& t) {
  std::size_t s = 0;
  for (const auto& w : t) s += w.size();
  return s;
}

// Applies the Nielsen move m to the tuple: t <- t o m.
Tuple apply_move(const Tuple& t, const ElementaryAutomorphism& m) {
  Tuple out = t;
  using K = ElementaryAutomorphism::Kind;
  const Word& yj = t[static_cast<std::size_t>(m.j - 1)];
  Word& yi = out[static_cast<std::size_t>(m.i - 1)];
  switch (m.kind) {
    case K::Transposition:
      std::swap(out[static_cast<std::size_t>(m.i - 1)], out[static_cast<std::size_t>(m.j - 1)]);
      break;
    case K::Inversion:
      yi = yi.inverse();
      break;
    case K::RightMultiply:
      yi = yi * (m.sign > 0 ? yj : yj.inverse());
      break;
    case K::LeftMultiply:
      yi = (m.sign > 0 ? yj : yj.inverse()) * yi;
      break;
  }
  return out;
}

std::vector<ElementaryAutomorphism> multiply_moves(int rank) {
  std::vector<ElementaryAutomorphism> moves;
  using K = ElementaryAutomorphism::Kind;
  for (int i = 1; i <= rank; ++i) {
    for (int j = 1; j <= rank; ++j) {
      if (i == j) continue;
      for (int s : {1, -1}) {
        moves.push_back({K::RightMultiply, i, j, s});
        moves.push_back({K::LeftMultiply, i, j, s});
      }
    }
  }
  return moves;
}

// Search for a length-decreasing sequence inside the plateau of tuples whose
// total length does not exceed the current one.
std::optional<std::vector<ElementaryAutomorphism>> plateau_escape(
    const Tuple& start, const std::vector<ElementaryAutomorphism>& moves, std::size_t budget) {
  const std::size_t bound = total_length(start);
  std::map<Tuple, std::pair<Tuple, int>> parent;
  std::deque<Tuple> queue{start};
  parent.emplace(start, std::make_pair(Tuple{}, -1));
  while (!queue.empty() && parent.size() < budget) {
    Tuple cur = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < moves.size(); ++k) {
      Tuple next = apply_move(cur, moves[k]);
      std::size_t len = total_length(next);
      if (len > bound || parent.count(next)) continue;
      parent.emplace(next, std::make_pair(cur, static_cast<int>(k)));
      if (len < bound) {
        std::vector<ElementaryAutomorphism> path;
        Tuple at = next;
        while (true) {
          auto& [prev, mv] = parent.at(at);
          if (mv < 0) break;
          path.push_back(moves[static_cast<std::size_t>(mv)]);
          at = prev;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(std::move(next));
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<BasisTuple> BasisTuple::from_elements(int rank, const std::vector<Word>& elements) {
  if (static_cast<int>(elements.size()) != rank) return std::nullopt;
  using K = ElementaryAutomorphism::Kind;
  Tuple t = elements;
  std::vector<ElementaryAutomorphism> applied;
  const auto moves = multiply_moves(rank);
  while (total_length(t) > static_cast<std::size_t>(rank)) {
    std::size_t best_len = total_length(t);
    std::optional<ElementaryAutomorphism> best;
    for (const auto& m : moves) {
      Tuple next = apply_move(t, m);
      std::size_t len = total_length(next);
      if (len < best_len) {
        best_len = len;
        best = m;
      }
    }
    if (best) {
      t = apply_move(t, *best);
      applied.push_back(*best);
      continue;
    }
    auto escape = plateau_escape(t, moves, 200000);
    if (!escape) return std::nullopt;
    for (const auto& m : *escape) {
      t = apply_move(t, m);
      applied.push_back(m);
    }
  }
  // t is now a signed permutation of the generators (or not a basis at all).
  std::vector<int> seen(static_cast<std::size_t>(rank) + 1, 0);
  for (const auto& w : t) {
    if (w.size() != 1) return std::nullopt;
    if (seen[static_cast<std::size_t>(std::abs(w[0]))]++) return std::nullopt;
  }
  for (int i = 1; i <= rank; ++i) {
    if (t[static_cast<std::size_t>(i - 1)][0] < 0) {
      ElementaryAutomorphism m{K::Inversion, i, i, 1};
      t = apply_move(t, m);
      applied.push_back(m);
    }
  }
  for (int i = 1; i <= rank; ++i) {
    int at = i;
    while (std::abs(t[static_cast<std::size_t>(at - 1)][0]) != i) ++at;
    if (at != i) {
      ElementaryAutomorphism m{K::Transposition, i, at, 1};
      t = apply_move(t, m);
      applied.push_back(m);
    }
  }
  // elements o m_1 o ... o m_k = id, so phi = m_k^{-1} o ... o m_1^{-1}.
  std::vector<ElementaryAutomorphism> prov;
  for (auto it = applied.rbegin(); it != applied.rend(); ++it) prov.push_back(it->inverse());
  BasisTuple out(rank, std::move(prov));
  if (out.elements() != elements) return std::nullopt;
  return out;
}

std::size_t word_length(const Word& w, const BasisTuple& b) { return b.rewrite(w).size(); }

std::size_t basis_norm(const BasisTuple& y, const BasisTuple& x) {
  std::size_t m = 0;
  for (const auto& yi : y.elements()) m = std::max(m, word_length(yi, x));
  return m;
}

namespace {

// Moves realising x_i -> a^{-1} x_i a for a single letter a.
void append_letter_conjugation(int rank, Letter a, std::vector<ElementaryAutomorphism>& out) {
  using K = ElementaryAutomorphism::Kind;
  int k = std::abs(a);
  int s = a > 0 ? 1 : -1;
  for (int i = 1; i <= rank; ++i) {
    if (i == k) continue;
    out.push_back({K::RightMultiply, i, k, s});
    out.push_back({K::LeftMultiply, i, k, -s});
  }
}

}  // namespace

BasisTuple conjugate_basis(const BasisTuple& x, const Word& v) {
  // c_v = c_{a_m} o ... o c_{a_1}; compose_moves applies the list left to right
  // as m_1 o m_2 o ..., so the last letter's moves come first.
  std::vector<ElementaryAutomorphism> moves;
  for (auto it = v.letters().rbegin(); it != v.letters().rend(); ++it) {
    append_letter_conjugation(x.rank(), *it, moves);
  }
  return x.pushed_through(moves);
}

ConjugateBasisCheck check_conjugate_basis_bound(const BasisTuple& x, const BasisTuple& y,
                                                const BasisTuple& w, const Word& v) {
  ConjugateBasisCheck out;
  const Word vinv = v.inverse();
  out.precondition_holds = x.rank() == w.rank() && x.rank() == y.rank();
  for (int i = 1; out.precondition_holds && i <= x.rank(); ++i) {
    if (x.element(i) != v * w.element(i) * vinv) out.precondition_holds = false;
  }
  if (!out.precondition_holds) return out;
  std::size_t wy = basis_norm(w, y);
  out.lhs = word_length(v, y);
  out.rhs = wy * wy * basis_norm(y, x);
  return out;
}

}  // namespace oslab
