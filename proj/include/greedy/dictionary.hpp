#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "greedy/vector.hpp"

namespace greedy {

// A finite symmetric dictionary: unit-norm atoms closed under negation.
// The negation of atom i is stored explicitly at index partner(i).
class Dictionary {
 public:
  static constexpr double kUnitTolerance = 1e-12;

  // Builds from the positive half; atom 2k is directions[k] (normalized),
  // atom 2k+1 is its negation.
  static Dictionary from_directions(const std::vector<Vector>& directions, NormKind norm) {
    if (directions.empty()) throw InvalidArgument("dictionary needs at least one direction");
    const Eigen::Index n = directions.front().size();
    if (n < 1) throw InvalidArgument("invalid dimension 0");
    std::vector<Vector> atoms;
    std::vector<std::size_t> partner;
    atoms.reserve(2 * directions.size());
    for (const auto& d : directions) {
      if (d.size() != n) throw InvalidArgument("dictionary directions differ in dimension");
      require_finite(d, "dictionary direction");
      Vector g = norm.normalize(d);
      const std::size_t i = atoms.size();
      atoms.push_back(g);
      atoms.push_back(-g);
      partner.push_back(i + 1);
      partner.push_back(i);
    }
    return Dictionary(std::move(atoms), std::move(partner), norm);
  }

  // Validating constructor for explicitly listed atoms and pairing.
  Dictionary(std::vector<Vector> atoms, std::vector<std::size_t> partner, NormKind norm)
      : atoms_(std::move(atoms)), partner_(std::move(partner)), norm_(norm) {
    validate();
  }

  std::size_t size() const noexcept { return atoms_.size(); }
  Eigen::Index dimension() const noexcept { return atoms_.front().size(); }
  const Vector& operator[](std::size_t i) const { return atoms_.at(i); }
  const std::vector<Vector>& atoms() const noexcept { return atoms_; }
  std::size_t partner(std::size_t i) const { return partner_.at(i); }
  NormKind norm() const noexcept { return norm_; }

 private:
  void validate() const {
    if (atoms_.size() < 2 || atoms_.size() % 2 != 0) {
      throw InvalidArgument("atom count must be even and >= 2, got " + std::to_string(atoms_.size()));
    }
    if (partner_.size() != atoms_.size()) throw InvalidArgument("pairing table size mismatch");
    const Eigen::Index n = atoms_.front().size();
    if (n < 1) throw InvalidArgument("invalid dimension 0");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const Vector& g = atoms_[i];
      if (g.size() != n) throw InvalidArgument("atoms differ in dimension");
      require_finite(g, "atom");
      if (std::abs(norm_(g) - 1.0) > kUnitTolerance) {
        throw InvalidArgument("atom " + std::to_string(i) + " is not unit norm");
      }
      const std::size_t j = partner_[i];
      if (j >= atoms_.size() || partner_[j] != i || j == i) {
        throw InvalidArgument("pairing table is not an involution at atom " + std::to_string(i));
      }
      if (atoms_[j] != -g) {
        throw InvalidArgument("atom " + std::to_string(j) + " is not the negation of atom " +
                              std::to_string(i));
      }
    }
  }

  std::vector<Vector> atoms_;
  std::vector<std::size_t> partner_;
  NormKind norm_;
};

// {+e_1, -e_1, ..., +e_n, -e_n}
inline Dictionary make_canonical_dictionary(Eigen::Index n, NormKind norm = NormKind(2.0)) {
  if (n < 1) throw InvalidArgument("invalid dimension: n must be >= 1");
  std::vector<Vector> dirs;
  for (Eigen::Index i = 0; i < n; ++i) dirs.push_back(Vector::Unit(n, i));
  return Dictionary::from_directions(dirs, norm);
}

// count/2 Gaussian directions, normalized and paired with their negations.
inline Dictionary make_random_dictionary(Eigen::Index n, std::size_t count, NormKind norm,
                                         std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("invalid dimension: n must be >= 1");
  if (count < 2 || count % 2 != 0) {
    throw InvalidArgument("random dictionary count must be even and >= 2, got " +
                          std::to_string(count));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Vector> dirs;
  while (dirs.size() < count / 2) {
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = gauss(rng);
    if (d.norm() < 1e-8) continue;
    dirs.push_back(d);
  }
  return Dictionary::from_directions(dirs, norm);
}

}  // namespace greedy
