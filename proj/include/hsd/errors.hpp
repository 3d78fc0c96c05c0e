#pragma once

#include <stdexcept>
#include <string>

namespace hsd {

// Error taxonomy mirrors the CLI exit codes: usage/config -> 2,
// data/schema -> 3, numeric failure -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

}  // namespace hsd
