#pragma once

#include <stdexcept>

namespace cmslab {

/// A numerical run was aborted: collision, step underflow, norm drift, caustic.
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cmslab
