#pragma once

#include <stdexcept>
#include <string>

namespace matcrs {

/// Thrown when an exhaustive routine is asked to exceed its documented
/// desk-scale cap. CLI maps this to its resource-cap exit code.
struct CapExceeded : std::runtime_error {
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace matcrs
