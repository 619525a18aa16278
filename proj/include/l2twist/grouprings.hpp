#pragma once

// Group rings over free abelian groups Z^d and finitely presented groups,
// matrices over them, one-norms, supports and characters.
//
// Conventions:
//   * An abelian key is an exponent vector of length d.
//   * A presented key is a freely reduced word of signed 1-based generator
//     indices (+i is generator i, -i its inverse). Relators are never used to
//     normalize words; numerics go through finite quotients.
//   * Matrices act by right multiplication on row vectors, so an r x s matrix
//     describes a map C^r -> C^s of free modules.

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "l2twist/errors.hpp"

namespace l2twist {

using Complex = std::complex<double>;

struct GroupElementKey {
  std::vector<std::int64_t> data;

  GroupElementKey() = default;
  explicit GroupElementKey(std::vector<std::int64_t> d) : data(std::move(d)) {}
  GroupElementKey(std::initializer_list<std::int64_t> d) : data(d) {}

  std::size_t size() const { return data.size(); }
  std::int64_t operator[](std::size_t i) const { return data[i]; }

  auto operator<=>(const GroupElementKey&) const = default;
  bool operator==(const GroupElementKey&) const = default;
};

std::string to_string(const GroupElementKey& key);

enum class GroupKind { Abelian, Presented };

/// Freely reduces a signed-generator word.
std::vector<std::int64_t> free_reduce(std::vector<std::int64_t> word);

class Group {
 public:
  static Group abelian(int rank);
  static Group presented(int generators, std::vector<std::vector<std::int64_t>> relators);

  GroupKind kind() const { return kind_; }
  bool is_abelian() const { return kind_ == GroupKind::Abelian; }
  /// Rank d for Z^d, generator count for presented groups.
  int generator_count() const { return generators_; }
  const std::vector<std::vector<std::int64_t>>& relators() const { return relators_; }

  GroupElementKey identity() const;
  GroupElementKey generator(int index) const;  // 0-based
  GroupElementKey multiply(const GroupElementKey& a, const GroupElementKey& b) const;
  GroupElementKey inverse(const GroupElementKey& a) const;

  /// Exponent-sum vector of a key in Z^{generator_count}; for abelian keys the
  /// key itself. This is the image in the abelianization of the free group.
  std::vector<std::int64_t> exponent_sums(const GroupElementKey& key) const;

  /// Throws InvalidInput if the key is malformed for this group.
  void validate(const GroupElementKey& key) const;

  bool operator==(const Group&) const = default;

 private:
  GroupKind kind_ = GroupKind::Abelian;
  int generators_ = 0;
  std::vector<std::vector<std::int64_t>> relators_;
};

class GroupRingElement {
 public:
  using Terms = std::map<GroupElementKey, Complex>;

  GroupRingElement() = default;
  static GroupRingElement monomial(GroupElementKey key, Complex coefficient = 1.0);
  static GroupRingElement constant(const Group& group, Complex coefficient);

  /// Adds coefficient to the term at key; exact zeros are pruned.
  void add_term(const GroupElementKey& key, Complex coefficient);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Complex coefficient(const GroupElementKey& key) const;
  double l1_norm() const;
  bool has_integer_coefficients() const;

  bool operator==(const GroupRingElement&) const = default;

 private:
  Terms terms_;
};

GroupRingElement operator+(const GroupRingElement& a, const GroupRingElement& b);
GroupRingElement operator-(const GroupRingElement& a, const GroupRingElement& b);
GroupRingElement operator*(Complex s, const GroupRingElement& a);
GroupRingElement multiply(const Group& group, const GroupRingElement& a, const GroupRingElement& b);
/// Conjugates coefficients and inverts keys: sum conj(c_g) g^{-1}.
GroupRingElement involution(const Group& group, const GroupRingElement& x);
std::string to_string(const GroupRingElement& x);

class GroupRingMatrix {
 public:
  GroupRingMatrix() = default;
  GroupRingMatrix(Group group, std::size_t rows, std::size_t cols);
  static GroupRingMatrix identity(const Group& group, std::size_t n);

  const Group& group() const { return group_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const GroupRingElement& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  GroupRingElement& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, GroupRingElement value);

  /// Coefficient-ring tag: true when every coefficient is an exactly
  /// representable integer.
  bool integer_exact() const;
  bool is_zero() const;

  bool operator==(const GroupRingMatrix&) const = default;

 private:
  Group group_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<GroupRingElement> entries_;
};

/// r * s * max_{i,j} ||a_ij||_1.
double one_norm(const GroupRingMatrix& a);
std::set<GroupElementKey> support(const GroupRingMatrix& a);

GroupRingMatrix mat_mul(const GroupRingMatrix& a, const GroupRingMatrix& b);
GroupRingMatrix mat_add(const GroupRingMatrix& a, const GroupRingMatrix& b);
GroupRingMatrix mat_scale(Complex s, const GroupRingMatrix& a);
/// Involution applied entrywise followed by transposition (the adjoint).
GroupRingMatrix adjoint(const GroupRingMatrix& a);

/// A homomorphism given by generator images. The source may be abelian or
/// presented; for an abelian target the images are exponent vectors and the
/// target may have rank 0 (trivial group).
struct GroupHomomorphism {
  Group source;
  Group target;
  std::vector<GroupElementKey> generator_images;

  GroupElementKey apply(const GroupElementKey& key) const;
  static GroupHomomorphism abelianization(const Group& source);
};

GroupRingMatrix push_forward(const GroupRingMatrix& a, const GroupHomomorphism& map);

enum class CharacterTarget { Real, FreeAbelian };

/// A homomorphism G -> R or G -> Z^{d'} given by its values on generators.
class Character {
 public:
  static Character real(std::vector<double> values);
  static Character free_abelian(std::vector<std::vector<std::int64_t>> values);
  /// phi = id on Z^d as a Z^d-valued character.
  static Character identity(int rank);

  CharacterTarget target() const { return target_; }
  int target_dim() const { return target_dim_; }
  std::size_t generator_count() const { return values_.size(); }
  const std::vector<std::vector<double>>& values() const { return values_; }

  double real_value(const Group& group, const GroupElementKey& key) const;
  std::vector<std::int64_t> lattice_value(const Group& group, const GroupElementKey& key) const;

  /// r * phi (real targets only).
  Character scaled(double r) const;

 private:
  CharacterTarget target_ = CharacterTarget::Real;
  int target_dim_ = 1;
  std::vector<std::vector<double>> values_;
};

struct CharacterCheck {
  bool ok = true;
  std::optional<std::size_t> relator;
  double residual = 0.0;
};

/// Checks that every relator evaluates to zero. Throws DimensionMismatch when
/// the value count does not match the generator count.
CharacterCheck check_character(const Character& phi, const Group& group);

}  // namespace l2twist
