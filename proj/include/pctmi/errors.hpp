#pragma once

#include <stdexcept>
#include <string>

namespace pctmi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidWindowError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class InsufficientSamplesError : public Error {
public:
    using Error::Error;
};

class InvalidDataError : public Error {
public:
    using Error::Error;
};

class InvalidConfigError : public Error {
public:
    using Error::Error;
};

/// No (window, gap) configuration yields enough joint rows: the series cannot be compared.
class NoCompatibleConfigError : public Error {
public:
    using Error::Error;
};

/// No conditioning gap satisfies the admissibility constraint within the search bounds.
class InfeasibleConditioningError : public Error {
public:
    using Error::Error;
};

class DegenerateSeriesError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace pctmi
