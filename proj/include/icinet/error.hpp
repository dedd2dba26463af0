#pragma once
// Error types shared by the library and mapped to CLI exit codes.

#include <stdexcept>
#include <string>

namespace icinet {

// Malformed input or parameters that cannot be satisfied (exit code 3).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A broken internal invariant: NaN in a cache, toggle outside the pair space (exit code 4).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw DataError(what);
}

inline void ensure(bool cond, const std::string& what) {
    if (!cond) throw InternalError(what);
}

}  // namespace icinet
