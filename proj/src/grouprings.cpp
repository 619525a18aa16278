#include "l2twist/grouprings.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace l2twist {

std::string to_string(const GroupElementKey& key) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) os << ',';
    os << key[i];
  }
  os << ')';
  return os.str();
}

std::vector<std::int64_t> free_reduce(std::vector<std::int64_t> word) {
  std::vector<std::int64_t> out;
  out.reserve(word.size());
  for (auto letter : word) {
    if (!out.empty() && out.back() == -letter) {
      out.pop_back();
    } else {
      out.push_back(letter);
    }
  }
  return out;
}

Group Group::abelian(int rank) {
  if (rank < 0) throw InvalidInput("abelian group rank must be >= 0");
  Group g;
  g.kind_ = GroupKind::Abelian;
  g.generators_ = rank;
  return g;
}

Group Group::presented(int generators, std::vector<std::vector<std::int64_t>> relators) {
  if (generators < 0) throw InvalidInput("generator count must be >= 0");
  Group g;
  g.kind_ = GroupKind::Presented;
  g.generators_ = generators;
  for (auto& r : relators) {
    for (auto letter : r) {
      if (letter == 0 || std::abs(letter) > generators) {
        throw InvalidInput("relator letter out of range: " + std::to_string(letter));
      }
    }
    if (free_reduce(r) != r) throw InvalidInput("relator words must be freely reduced");
  }
  g.relators_ = std::move(relators);
  return g;
}

GroupElementKey Group::identity() const {
  if (is_abelian()) return GroupElementKey(std::vector<std::int64_t>(generators_, 0));
  return GroupElementKey{};
}

GroupElementKey Group::generator(int index) const {
  if (index < 0 || index >= generators_) throw InvalidInput("generator index out of range");
  if (is_abelian()) {
    std::vector<std::int64_t> v(generators_, 0);
    v[index] = 1;
    return GroupElementKey(std::move(v));
  }
  return GroupElementKey{index + 1};
}

GroupElementKey Group::multiply(const GroupElementKey& a, const GroupElementKey& b) const {
  if (is_abelian()) {
    std::vector<std::int64_t> v(a.data);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b[i];
    return GroupElementKey(std::move(v));
  }
  std::vector<std::int64_t> w(a.data);
  w.insert(w.end(), b.data.begin(), b.data.end());
  return GroupElementKey(free_reduce(std::move(w)));
}

GroupElementKey Group::inverse(const GroupElementKey& a) const {
  if (is_abelian()) {
    std::vector<std::int64_t> v(a.data);
    for (auto& x : v) x = -x;
    return GroupElementKey(std::move(v));
  }
  std::vector<std::int64_t> w(a.data.rbegin(), a.data.rend());
  for (auto& x : w) x = -x;
  return GroupElementKey(std::move(w));
}

std::vector<std::int64_t> Group::exponent_sums(const GroupElementKey& key) const {
  if (is_abelian()) return key.data;
  std::vector<std::int64_t> sums(generators_, 0);
  for (auto letter : key.data) sums[std::abs(letter) - 1] += letter > 0 ? 1 : -1;
  return sums;
}

void Group::validate(const GroupElementKey& key) const {
  if (is_abelian()) {
    if (key.size() != static_cast<std::size_t>(generators_)) {
      throw InvalidInput("abelian key " + to_string(key) + " has wrong length for rank " +
                         std::to_string(generators_));
    }
    return;
  }
  for (auto letter : key.data) {
    if (letter == 0 || std::abs(letter) > generators_) {
      throw InvalidInput("word letter out of range in " + to_string(key));
    }
  }
  if (free_reduce(key.data) != key.data) {
    throw InvalidInput("word " + to_string(key) + " is not freely reduced");
  }
}

GroupRingElement GroupRingElement::monomial(GroupElementKey key, Complex coefficient) {
  GroupRingElement x;
  x.add_term(key, coefficient);
  return x;
}

GroupRingElement GroupRingElement::constant(const Group& group, Complex coefficient) {
  return monomial(group.identity(), coefficient);
}

void GroupRingElement::add_term(const GroupElementKey& key, Complex coefficient) {
  if (coefficient == Complex(0.0)) return;
  auto [it, inserted] = terms_.try_emplace(key, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }
}

Complex GroupRingElement::coefficient(const GroupElementKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

double GroupRingElement::l1_norm() const {
  double s = 0.0;
  for (const auto& [k, c] : terms_) s += std::abs(c);
  return s;
}

bool GroupRingElement::has_integer_coefficients() const {
  for (const auto& [k, c] : terms_) {
    if (c.imag() != 0.0 || c.real() != std::nearbyint(c.real()) || std::abs(c.real()) > 9.0e15) {
      return false;
    }
  }
  return true;
}

GroupRingElement operator+(const GroupRingElement& a, const GroupRingElement& b) {
  GroupRingElement out = a;
  for (const auto& [k, c] : b.terms()) out.add_term(k, c);
  return out;
}

GroupRingElement operator-(const GroupRingElement& a, const GroupRingElement& b) {
  GroupRingElement out = a;
  for (const auto& [k, c] : b.terms()) out.add_term(k, -c);
  return out;
}

GroupRingElement operator*(Complex s, const GroupRingElement& a) {
  GroupRingElement out;
  if (s == Complex(0.0)) return out;
  for (const auto& [k, c] : a.terms()) out.add_term(k, s * c);
  return out;
}

GroupRingElement multiply(const Group& group, const GroupRingElement& a, const GroupRingElement& b) {
  GroupRingElement out;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) out.add_term(group.multiply(ka, kb), ca * cb);
  }
  return out;
}

GroupRingElement involution(const Group& group, const GroupRingElement& x) {
  GroupRingElement out;
  for (const auto& [k, c] : x.terms()) out.add_term(group.inverse(k), std::conj(c));
  return out;
}

std::string to_string(const GroupRingElement& x) {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : x.terms()) {
    if (!first) os << " + ";
    first = false;
    os << '(' << c.real();
    if (c.imag() != 0.0) os << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << 'i';
    os << ")*g" << to_string(k);
  }
  return os.str();
}

GroupRingMatrix::GroupRingMatrix(Group group, std::size_t rows, std::size_t cols)
    : group_(std::move(group)), rows_(rows), cols_(cols), entries_(rows * cols) {}

GroupRingMatrix GroupRingMatrix::identity(const Group& group, std::size_t n) {
  GroupRingMatrix m(group, n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, GroupRingElement::constant(group, 1.0));
  return m;
}

void GroupRingMatrix::set(std::size_t i, std::size_t j, GroupRingElement value) {
  for (const auto& [k, c] : value.terms()) group_.validate(k);
  entries_[i * cols_ + j] = std::move(value);
}

bool GroupRingMatrix::integer_exact() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const GroupRingElement& e) { return e.has_integer_coefficients(); });
}

bool GroupRingMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const GroupRingElement& e) { return e.is_zero(); });
}

double one_norm(const GroupRingMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, a.at(i, j).l1_norm());
  }
  return static_cast<double>(a.rows() * a.cols()) * m;
}

std::set<GroupElementKey> support(const GroupRingMatrix& a) {
  std::set<GroupElementKey> s;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      for (const auto& [k, c] : a.at(i, j).terms()) s.insert(k);
    }
  }
  return s;
}

GroupRingMatrix mat_mul(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  if (!(a.group() == b.group())) throw DimensionMismatch("mat_mul: matrices over different groups");
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("mat_mul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  GroupRingMatrix out(a.group(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      GroupRingElement acc;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        if (a.at(i, k).is_zero() || b.at(k, j).is_zero()) continue;
        acc = acc + multiply(a.group(), a.at(i, k), b.at(k, j));
      }
      out.at(i, j) = std::move(acc);
    }
  }
  return out;
}

GroupRingMatrix mat_add(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  if (!(a.group() == b.group())) throw DimensionMismatch("mat_add: matrices over different groups");
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("mat_add: shape mismatch");
  GroupRingMatrix out(a.group(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j) + b.at(i, j);
  }
  return out;
}

GroupRingMatrix mat_scale(Complex s, const GroupRingMatrix& a) {
  GroupRingMatrix out(a.group(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = s * a.at(i, j);
  }
  return out;
}

GroupRingMatrix adjoint(const GroupRingMatrix& a) {
  GroupRingMatrix out(a.group(), a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(j, i) = involution(a.group(), a.at(i, j));
  }
  return out;
}

GroupElementKey GroupHomomorphism::apply(const GroupElementKey& key) const {
  if (generator_images.size() != static_cast<std::size_t>(source.generator_count())) {
    throw DimensionMismatch("homomorphism needs one image per source generator");
  }
  GroupElementKey out = target.identity();
  if (source.is_abelian()) {
    for (std::size_t l = 0; l < key.size(); ++l) {
      const auto n = key[l];
      const GroupElementKey& img = n >= 0 ? generator_images[l] : target.inverse(generator_images[l]);
      for (std::int64_t i = 0; i < std::abs(n); ++i) out = target.multiply(out, img);
    }
    return out;
  }
  for (auto letter : key.data) {
    const auto& img = generator_images[std::abs(letter) - 1];
    out = target.multiply(out, letter > 0 ? img : target.inverse(img));
  }
  return out;
}

GroupHomomorphism GroupHomomorphism::abelianization(const Group& source) {
  GroupHomomorphism h{source, Group::abelian(source.generator_count()), {}};
  for (int i = 0; i < source.generator_count(); ++i) h.generator_images.push_back(h.target.generator(i));
  return h;
}

GroupRingMatrix push_forward(const GroupRingMatrix& a, const GroupHomomorphism& map) {
  if (!(a.group() == map.source)) throw DimensionMismatch("push_forward: source group mismatch");
  for (const auto& img : map.generator_images) map.target.validate(img);
  GroupRingMatrix out(map.target, a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      GroupRingElement e;
      for (const auto& [k, c] : a.at(i, j).terms()) e.add_term(map.apply(k), c);
      out.at(i, j) = std::move(e);
    }
  }
  return out;
}

Character Character::real(std::vector<double> values) {
  Character phi;
  phi.target_ = CharacterTarget::Real;
  phi.target_dim_ = 1;
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInput("character values must be finite");
    phi.values_.push_back({v});
  }
  return phi;
}

Character Character::free_abelian(std::vector<std::vector<std::int64_t>> values) {
  Character phi;
  phi.target_ = CharacterTarget::FreeAbelian;
  phi.target_dim_ = values.empty() ? 0 : static_cast<int>(values.front().size());
  for (const auto& v : values) {
    if (static_cast<int>(v.size()) != phi.target_dim_) {
      throw DimensionMismatch("lattice character values must all have the same length");
    }
    phi.values_.emplace_back(v.begin(), v.end());
  }
  return phi;
}

Character Character::identity(int rank) {
  std::vector<std::vector<std::int64_t>> v(rank, std::vector<std::int64_t>(rank, 0));
  for (int i = 0; i < rank; ++i) v[i][i] = 1;
  auto phi = free_abelian(std::move(v));
  phi.target_dim_ = rank;
  return phi;
}

double Character::real_value(const Group& group, const GroupElementKey& key) const {
  if (target_ != CharacterTarget::Real) throw InvalidInput("real_value needs a real-valued character");
  if (values_.size() != static_cast<std::size_t>(group.generator_count())) {
    throw DimensionMismatch("character has " + std::to_string(values_.size()) + " values, group has " +
                            std::to_string(group.generator_count()) + " generators");
  }
  const auto sums = group.exponent_sums(key);
  double s = 0.0;
  for (std::size_t l = 0; l < sums.size(); ++l) {
    if (sums[l] != 0) s += static_cast<double>(sums[l]) * values_[l][0];
  }
  return s;
}

std::vector<std::int64_t> Character::lattice_value(const Group& group, const GroupElementKey& key) const {
  if (target_ != CharacterTarget::FreeAbelian) {
    throw InvalidInput("lattice_value needs a Z^d-valued character");
  }
  if (values_.size() != static_cast<std::size_t>(group.generator_count())) {
    throw DimensionMismatch("character has " + std::to_string(values_.size()) + " values, group has " +
                            std::to_string(group.generator_count()) + " generators");
  }
  const auto sums = group.exponent_sums(key);
  std::vector<std::int64_t> out(target_dim_, 0);
  for (std::size_t l = 0; l < sums.size(); ++l) {
    for (int j = 0; j < target_dim_; ++j) out[j] += sums[l] * static_cast<std::int64_t>(values_[l][j]);
  }
  return out;
}

Character Character::scaled(double r) const {
  if (target_ != CharacterTarget::Real) throw InvalidInput("only real characters can be scaled");
  Character phi = *this;
  for (auto& v : phi.values_) v[0] *= r;
  return phi;
}

CharacterCheck check_character(const Character& phi, const Group& group) {
  if (phi.generator_count() != static_cast<std::size_t>(group.generator_count())) {
    throw DimensionMismatch("character has " + std::to_string(phi.generator_count()) +
                            " values, group has " + std::to_string(group.generator_count()) +
                            " generators");
  }
  CharacterCheck result;
  if (group.is_abelian()) return result;
  for (std::size_t r = 0; r < group.relators().size(); ++r) {
    const auto sums = group.exponent_sums(GroupElementKey(group.relators()[r]));
    for (int j = 0; j < phi.target_dim(); ++j) {
      double residual = 0.0;
      for (std::size_t l = 0; l < sums.size(); ++l) {
        if (sums[l] != 0) residual += static_cast<double>(sums[l]) * phi.values()[l][j];
      }
      if (residual != 0.0) {
        result.ok = false;
        result.relator = r;
        result.residual = residual;
        return result;
      }
    }
  }
  return result;
}

}  // namespace l2twist
