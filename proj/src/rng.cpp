#include "matfactor/rng.hpp"

#include <utility>

namespace matfactor {

namespace {

void append(std::vector<std::uint32_t>& words, std::uint64_t v) {
  words.push_back(static_cast<std::uint32_t>(v));
  words.push_back(static_cast<std::uint32_t>(v >> 32));
}

std::mt19937_64 seeded(const std::vector<std::uint32_t>& words) {
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::vector<std::uint32_t> words) : words_(std::move(words)), engine_(seeded(words_)) {}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : Rng([&] {
        std::vector<std::uint32_t> w;
        append(w, seed);
        append(w, stream);
        return w;
      }()) {}

Rng Rng::substream(std::uint64_t id) const {
  std::vector<std::uint32_t> w = words_;
  append(w, id);
  return Rng(std::move(w));
}

}  // namespace matfactor
