#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "residua/words.hpp"

namespace residua {

/// Bookkeeping attached by the constructions that certify a homomorphism.
struct HomMetadata {
  std::optional<std::size_t> certified_radius;
  /// max |h(g)| over the certified ball.
  std::optional<std::size_t> stretch;
  /// Twist exponents used per tower level, level 1 first.
  std::vector<std::int64_t> level_m;
  std::size_t ball_size = 0;
};

/// A map between word-presented groups given by generator images.
class Homomorphism {
 public:
  Homomorphism(Basis domain, Basis codomain, std::vector<Word> images);
  static Homomorphism identity(const Basis& basis);

  const Basis& domain() const noexcept { return domain_; }
  const Basis& codomain() const noexcept { return codomain_; }
  const Word& image(std::size_t generator) const { return images_.at(generator); }
  const std::vector<Word>& images() const noexcept { return images_; }

  /// Image of a word over the domain basis, freely reduced.
  Word apply(const Word& w) const;
  /// The composite `outer` after `*this`.
  Homomorphism then(const Homomorphism& outer) const;

  HomMetadata& metadata() noexcept { return metadata_; }
  const HomMetadata& metadata() const noexcept { return metadata_; }

 private:
  Basis domain_;
  Basis codomain_;
  std::vector<Word> images_;
  std::vector<Word> inverse_images_;
  HomMetadata metadata_;
};

}  // namespace residua
