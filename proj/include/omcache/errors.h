#ifndef OMCACHE_ERRORS_H
#define OMCACHE_ERRORS_H

#include <stdexcept>
#include <string>

namespace omcache {

class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Raised when a truncated Fock space carries too much weight in its top level.
class TruncationError : public Error {
   public:
    using Error::Error;
};

class IntegratorStall : public Error {
   public:
    using Error::Error;
};

class DimensionMismatch : public Error {
   public:
    using Error::Error;
};

class NonUnitary : public Error {
   public:
    using Error::Error;
};

class StrongCouplingRegime : public Error {
   public:
    StrongCouplingRegime(const std::string &msg, double threshold_power)
        : Error(msg), threshold_power_w(threshold_power) {
    }
    double threshold_power_w;
};

class Unreachable : public Error {
   public:
    using Error::Error;
};

class InvalidP1 : public Error {
   public:
    using Error::Error;
};

class InvalidState : public Error {
   public:
    using Error::Error;
};

class ComplexityLimit : public Error {
   public:
    using Error::Error;
};

class Infeasible : public Error {
   public:
    using Error::Error;
};

class NoCrossing : public Error {
   public:
    using Error::Error;
};

class ConfigError : public Error {
   public:
    using Error::Error;
};

}  // namespace omcache

#endif
