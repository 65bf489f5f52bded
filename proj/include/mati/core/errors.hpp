#pragma once

#include <stdexcept>
#include <string>

namespace mati {

// A requested performance target admits no certificate (e.g. gamma_d >= gamma_des).
class InfeasibleTarget : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The witness search ran out of budget without a feasible interval.
class SearchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DelayProfileError : public std::invalid_argument {
public:
    DelayProfileError(const std::string& what, double t)
        : std::invalid_argument(what), t_(t) {}
    double first_violation() const { return t_; }

private:
    double t_;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double t)
        : std::runtime_error(what), t_(t) {}
    double time() const { return t_; }

private:
    double t_;
};

}  // namespace mati
