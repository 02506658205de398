#include "eefluct/rng.hpp"

#include <array>

#include <openssl/sha.h>

namespace eefluct {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::array<unsigned char, 16> message{};
  for (int b = 0; b < 8; ++b) {
    message[b] = static_cast<unsigned char>(master >> (8 * b));
    message[8 + b] = static_cast<unsigned char>(index >> (8 * b));
  }
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(message.data(), message.size(), digest.data());

  std::uint64_t seed = 0;
  for (int b = 0; b < 8; ++b) seed |= static_cast<std::uint64_t>(digest[b]) << (8 * b);
  return seed;
}

}  // namespace eefluct
