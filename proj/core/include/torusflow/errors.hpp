#pragma once

#include <stdexcept>
#include <string>

namespace torusflow {

// Bad user-facing input: parameters, config files, malformed checkpoints.
// CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// The integration produced a non-finite or absurdly large coefficient.
// CLI maps this to exit code 3.
class instability_error : public std::runtime_error {
public:
    instability_error(const std::string& what, long long step, int k1, int k2)
        : std::runtime_error(what), step(step), k1(k1), k2(k2) {}
    long long step;
    int k1, k2;
};

} // namespace torusflow
