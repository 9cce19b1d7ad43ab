#pragma once
#include <stdexcept>
#include <string>

namespace h22 {

// config/usage problems -> CLI exit code 2
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// factorization breakdown, NaN, bracket failure -> CLI exit code 3
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& m) : std::runtime_error(m) {}
};

} // namespace h22
