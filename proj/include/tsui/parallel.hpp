#pragma once

namespace tsui {

/// Selects between the OpenMP kernels and their serial reference implementations.
enum class Exec { serial, parallel };

/// Applies the TSUI_THREADS cap (if set) to the OpenMP runtime. Returns the thread
/// count that parallel kernels will use.
int configure_threads_from_env();

/// Number of threads an OpenMP kernel will use right now.
int max_threads();

}  // namespace tsui
