#include "tfe/random.hpp"

#include <cmath>
#include <stdexcept>

namespace tfe {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t rep, std::uint64_t k) {
  if (rep > 0xffffffffULL || k > 0xffffffffULL) {
    throw std::out_of_range("derive_seed: rep and k must fit in 32 bits");
  }
  const std::uint64_t packed = (rep << 32) | k;
  const std::uint64_t base = mix64(master ^ 0x9e3779b97f4a7c15ULL);
  return mix64(mix64(base ^ packed) + 0x632be59bd9b4e019ULL);
}

double NormalStream::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double x, y, r;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    r = x * x + y * y;
  } while (r >= 1.0 || r == 0.0);
  const double f = std::sqrt(-2.0 * std::log(r) / r);
  spare_ = y * f;
  has_spare_ = true;
  return x * f;
}

}  // namespace tfe
