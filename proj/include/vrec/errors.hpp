#pragma once

#include <stdexcept>
#include <string>

namespace vrec {

/// Invalid argument or out-of-range parameter.
class ParameterError : public std::runtime_error {
public:
    explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (SWC, correspondence list, image, config).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Degenerate or singular geometry (non-invertible intrinsics, bad disparity).
class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Stereo matching could not produce any correspondence.
class MatchError : public std::runtime_error {
public:
    explicit MatchError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerically unusable linear system (non-SPD kernel matrix, rank-deficient fit).
class ConditioningError : public std::runtime_error {
public:
    explicit ConditioningError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem / IO failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vrec
