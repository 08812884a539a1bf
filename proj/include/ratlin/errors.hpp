#pragma once

#include <stdexcept>
#include <string>

namespace ratlin {

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class RegularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// s lies on a branch cut of a model function
class BranchCutError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// evaluation at (or numerically on top of) a pole
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, long step)
        : std::runtime_error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

}  // namespace ratlin
