#pragma once

#include <compare>
#include <cstddef>
#include <vector>

namespace fwb {

// A bijection of {0..n-1}, stored as its image list.
class Perm {
 public:
  Perm() = default;
  explicit Perm(std::vector<int> images);
  static Perm identity(int n);

  int degree() const { return static_cast<int>(images_.size()); }
  int operator()(int x) const { return images_[x]; }
  const std::vector<int>& images() const { return images_; }
  bool is_identity() const;

  // (p.then(q))(x) = q(p(x)).
  Perm then(const Perm& q) const;
  Perm inverse() const;
  int order() const;

  bool operator==(const Perm&) const = default;
  auto operator<=>(const Perm&) const = default;

 private:
  std::vector<int> images_;
};

bool is_permutation(const std::vector<int>& images);

// A finite permutation group given by its full, duplicate-free element list
// in lexicographic order.
class PermGroup {
 public:
  PermGroup(int degree, std::vector<Perm> elements);

  int degree() const { return degree_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Perm>& elements() const { return elements_; }
  bool contains(const Perm& p) const;

  // Contains identity, closed under composition and inverse.
  bool is_group() const;

 private:
  int degree_;
  std::vector<Perm> elements_;
};

}  // namespace fwb
