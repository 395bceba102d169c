#include "tsui/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "tsui/errors.hpp"

namespace tsui {

int configure_threads_from_env() {
    const char* raw = std::getenv("TSUI_THREADS");
    if (raw != nullptr && *raw != '\0') {
        char* end = nullptr;
        const long n = std::strtol(raw, &end, 10);
        if (end == raw || *end != '\0' || n < 1) {
            throw ValidationError(std::string("TSUI_THREADS must be a positive integer, got '") +
                                  raw + "'");
        }
        if (n < omp_get_max_threads()) omp_set_num_threads(static_cast<int>(n));
    }
    return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace tsui
