#include "hupa/random.hpp"

#include <cmath>

namespace hupa {

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw InvalidArgument("Poisson mean must be finite and nonnegative");
    std::uint64_t n = 0;
    double t = 0.0;
    for (;;) {
        // 1 - uniform() lies in (0, 1], so the log is finite.
        t -= std::log(1.0 - uniform());
        if (t > mean) return n;
        ++n;
    }
}

}  // namespace hupa
