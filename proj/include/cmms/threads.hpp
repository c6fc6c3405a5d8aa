#pragma once

namespace cmms {

/// Applies the CMMS_THREADS environment variable, if set, to the OpenMP and
/// Eigen thread pools. Returns the thread cap in effect (0 = library default).
int configure_threads_from_env();

}  // namespace cmms
