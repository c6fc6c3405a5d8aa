#include "cmms/threads.hpp"

#include "cmms/errors.hpp"

#include <Eigen/Core>

#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cmms {

int configure_threads_from_env() {
    const char* raw = std::getenv("CMMS_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return 0;
    }
    const std::string_view text(raw);
    int threads = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), threads);
    if (ec != std::errc() || ptr != text.data() + text.size() || threads < 1) {
        throw ConfigError("CMMS_THREADS must be a positive integer, got '" + std::string(text) + "'");
    }
    Eigen::setNbThreads(threads);
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    return threads;
}

}  // namespace cmms
