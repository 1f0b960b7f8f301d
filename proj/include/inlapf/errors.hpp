#ifndef INLAPF_ERRORS_HPP
#define INLAPF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace inlapf {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class DimensionTooLarge : public Error {
public:
    explicit DimensionTooLarge(const std::string& msg) : Error(msg) {}
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

class OptimFailed : public Error {
public:
    explicit OptimFailed(const std::string& msg) : Error(msg) {}
};

class NonPositiveConditionalVariance : public Error {
public:
    explicit NonPositiveConditionalVariance(const std::string& msg) : Error(msg) {}
};

class UnnormalizedWeights : public Error {
public:
    explicit UnnormalizedWeights(const std::string& msg) : Error(msg) {}
};

class AllWeightsZero : public Error {
public:
    explicit AllWeightsZero(const std::string& msg) : Error(msg) {}
};

class IndexOutOfRange : public Error {
public:
    explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

class NegativeCount : public Error {
public:
    explicit NegativeCount(const std::string& msg) : Error(msg) {}
};

class InvalidParams : public Error {
public:
    explicit InvalidParams(const std::string& msg) : Error(msg) {}
};

class InvalidInit : public Error {
public:
    explicit InvalidInit(const std::string& msg) : Error(msg) {}
};

class EmptyChain : public Error {
public:
    explicit EmptyChain(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace inlapf

#endif
