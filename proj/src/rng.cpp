#include "sdcnn/rng.hpp"

namespace sdcnn {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t base, uint64_t tag_a, uint64_t tag_b) {
  return mix64(mix64(base ^ mix64(tag_a)) ^ mix64(tag_b));
}

uint64_t derive_seed(uint64_t base, std::string_view tag) {
  // FNV-1a over the tag bytes, then the usual mixing.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return derive_seed(base, h);
}

int64_t Rng::index(int64_t n) {
  const uint64_t un = static_cast<uint64_t>(n);
  const uint64_t bound = UINT64_MAX - UINT64_MAX % un;
  uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= bound);
  return static_cast<int64_t>(draw % un);
}

}  // namespace sdcnn
