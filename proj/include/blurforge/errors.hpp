#pragma once

#include <stdexcept>
#include <string>

namespace blurforge {

// Malformed input file (bad header, missing property, wrong magic).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally valid input carrying unusable values (NaN, out of range).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller broke an API precondition.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// Filesystem-level failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace blurforge
