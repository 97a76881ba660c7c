#ifndef FPMIX_ERRORS_HPP
#define FPMIX_ERRORS_HPP

#include <stdexcept>

namespace fpmix {

// Raised when a configured operation-count cap would be exceeded. Callers
// treat this as "refuse to start", never as a silent truncation.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fpmix

#endif
