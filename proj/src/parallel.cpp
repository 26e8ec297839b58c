#include "hupa/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hupa {

unsigned resolve_threads(unsigned requested) noexcept {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HUPA_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(std::min(v, 256L));
        } catch (...) {
        }
    }
    return 1;
}

}  // namespace hupa
