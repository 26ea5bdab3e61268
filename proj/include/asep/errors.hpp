#pragma once

#include <stdexcept>
#include <string>

namespace asep {

// invalid run configuration (bad radius, node count, window, ...)
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// quadrature nodes landed on (or too close to) a pole of an integrand
class singular_error : public std::runtime_error {
public:
    explicit singular_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace asep
