#ifndef IMPB_ERROR_HPP
#define IMPB_ERROR_HPP

#include <stdexcept>

namespace impb {

/// Thrown when a caller hands us parameters outside their documented domain.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace impb

#endif  // IMPB_ERROR_HPP
