#include "fwb/perm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fwb {

bool is_permutation(const std::vector<int>& images) {
  std::vector<char> seen(images.size(), 0);
  for (int y : images) {
    if (y < 0 || static_cast<std::size_t>(y) >= images.size() || seen[y]) return false;
    seen[y] = 1;
  }
  return true;
}

Perm::Perm(std::vector<int> images) : images_(std::move(images)) {
  if (!is_permutation(images_)) throw std::invalid_argument("Perm: images are not a bijection");
}

Perm Perm::identity(int n) {
  std::vector<int> images(n);
  std::iota(images.begin(), images.end(), 0);
  return Perm(std::move(images));
}

bool Perm::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != static_cast<int>(i)) return false;
  return true;
}

Perm Perm::then(const Perm& q) const {
  if (q.degree() != degree()) throw std::invalid_argument("Perm::then: degree mismatch");
  std::vector<int> out(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) out[i] = q.images_[images_[i]];
  Perm p;
  p.images_ = std::move(out);
  return p;
}

Perm Perm::inverse() const {
  std::vector<int> out(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) out[images_[i]] = static_cast<int>(i);
  Perm p;
  p.images_ = std::move(out);
  return p;
}

int Perm::order() const {
  // lcm of cycle lengths
  std::vector<char> seen(images_.size(), 0);
  long result = 1;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (seen[i]) continue;
    long len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(images_[j])) {
      seen[j] = 1;
      ++len;
    }
    result = std::lcm(result, len);
  }
  return static_cast<int>(result);
}

PermGroup::PermGroup(int degree, std::vector<Perm> elements)
    : degree_(degree), elements_(std::move(elements)) {
  for (const Perm& p : elements_)
    if (p.degree() != degree_) throw std::invalid_argument("PermGroup: degree mismatch");
  std::sort(elements_.begin(), elements_.end());
  if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end())
    throw std::invalid_argument("PermGroup: duplicate elements");
}

bool PermGroup::contains(const Perm& p) const {
  return std::binary_search(elements_.begin(), elements_.end(), p);
}

bool PermGroup::is_group() const {
  if (!contains(Perm::identity(degree_))) return false;
  for (const Perm& a : elements_) {
    if (!contains(a.inverse())) return false;
    for (const Perm& b : elements_)
      if (!contains(a.then(b))) return false;
  }
  return true;
}

}  // namespace fwb
