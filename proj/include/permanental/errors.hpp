#pragma once

#include <stdexcept>
#include <string>

namespace permanental {

// Error taxonomy. The CLI maps capability_error to exit 3 and
// usage_error to exit 2; everything else in a failed run is exit 1.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct domain_error : error { using error::error; };
struct parameter_error : error { using error::error; };
struct numeric_error : error { using error::error; };
struct invariant_violation : error { using error::error; };
struct invalid_kernel : error { using error::error; };
struct invalid_potential : error { using error::error; };
struct singular_matrix : error { using error::error; };
struct not_psd : error { using error::error; };
struct precondition_error : error { using error::error; };
struct capability_error : error { using error::error; };
struct usage_error : error { using error::error; };

}  // namespace permanental
