#pragma once

#include <stdexcept>
#include <string>

namespace attractorlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NewtonDiverged : std::runtime_error {
    double time;
    NewtonDiverged(const std::string& what, double t) : std::runtime_error(what), time(t) {}
};

struct PullbackNotCauchy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ErgodicRateNotNegative : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoBumpFits : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace attractorlab
