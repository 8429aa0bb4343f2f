#pragma once

#include <gsl/gsl_errno.h>

#include <mutex>

namespace hdtele::detail {

// Special-function underflow is expected in far tails; report through return
// values instead of aborting.
inline void gsl_quiet() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

}  // namespace hdtele::detail
