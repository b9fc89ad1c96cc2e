#pragma once

#include <stdexcept>
#include <string>

namespace steinlab {

// Thrown when an operation would exceed a configured memory or work cap.
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a covariance kernel cannot be factorized for sampling.
struct factorization_error : std::runtime_error {
  explicit factorization_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace steinlab
