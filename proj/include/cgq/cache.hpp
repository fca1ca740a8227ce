#pragma once

#include <string>

#include "cgq/qmodule.hpp"

namespace cgq {

// Cache directory resolution: an explicit flag value wins, otherwise the
// CGQ_CACHE environment variable, otherwise empty (caching off).
std::string resolve_cache_dir(const std::string& flag_value);

// Loads a module from the cache directory when a valid entry exists, else
// builds it and writes the entry (atomically, via a temp file). Corrupt or
// schema-mismatched entries are rebuilt with a warning on stderr. An empty
// cache_dir builds without touching the filesystem.
ModulePtr cached_module(const RootSystem& rs, double q, const IntVector& lambda,
                        const std::string& cache_dir, int dim_limit = 256);

}  // namespace cgq
