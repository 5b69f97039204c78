#pragma once

#include <stdexcept>
#include <string>

namespace cityplan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document (XML, fixture, config, weight file).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structural problem with a road network (empty, dangling refs, disconnected).
class NetworkError : public Error {
public:
    using Error::Error;
};

/// A caller broke an operation's precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Tensor or weight-file shape disagreement.
class ShapeError : public Error {
public:
    using Error::Error;
};

}  // namespace cityplan
