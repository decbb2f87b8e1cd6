#include "residua/homomorphism.hpp"

#include <fmt/format.h>

#include "residua/error.hpp"

namespace residua {

Homomorphism::Homomorphism(Basis domain, Basis codomain, std::vector<Word> images)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), images_(std::move(images)) {
  if (images_.size() != domain_.rank()) {
    throw InvalidArgument(fmt::format("homomorphism needs {} images, got {}", domain_.rank(), images_.size()));
  }
  inverse_images_.reserve(images_.size());
  for (const auto& w : images_) {
    validate(w, codomain_.rank());
    inverse_images_.push_back(inverse(w));
  }
}

Homomorphism Homomorphism::identity(const Basis& basis) {
  std::vector<Word> images;
  for (std::size_t i = 0; i < basis.rank(); ++i) images.push_back(Word::generator(i));
  return Homomorphism(basis, basis, std::move(images));
}

Word Homomorphism::apply(const Word& w) const {
  std::vector<Letter> buffer;
  for (Letter l : w.letters()) {
    const std::size_t g = generator_of(l);
    if (g >= images_.size()) throw InvalidArgument("word does not belong to the homomorphism domain");
    append_reduced(buffer, (l > 0 ? images_[g] : inverse_images_[g]).letters());
  }
  return Word::from_reduced(std::move(buffer));
}

Homomorphism Homomorphism::then(const Homomorphism& outer) const {
  if (!(codomain_ == outer.domain_)) throw ContextMismatch("composition of homomorphisms with mismatched bases");
  std::vector<Word> images;
  images.reserve(images_.size());
  for (const auto& w : images_) images.push_back(outer.apply(w));
  return Homomorphism(domain_, outer.codomain_, std::move(images));
}

}  // namespace residua
