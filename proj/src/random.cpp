#include "uavsim/random.hpp"

#include <cmath>

namespace uavsim {

double RandomStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0,1] uniforms; u1 > 0 guaranteed by the +1 offset.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  spare_ = mag * std::sin(ang);
  has_spare_ = true;
  return mag * std::cos(ang);
}

const std::array<float, 65536>& gaussian_table() {
  static const std::array<float, 65536> table = [] {
    std::array<float, 65536> t{};
    RandomStream rs(0x5EED0F5EED0F5EEDULL);
    for (auto& v : t) v = static_cast<float>(rs.gaussian());
    return t;
  }();
  return table;
}

}  // namespace uavsim
