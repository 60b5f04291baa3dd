#pragma once

#include <stdexcept>
#include <string>

namespace distbrush {

// Base of every error raised by the library. The CLI maps these to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class EmptyCoverError : public Error {
public:
    using Error::Error;
};

class EmptyContourError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class PhaseError : public Error {
public:
    using Error::Error;
};

class TrajectoryError : public Error {
public:
    TrajectoryError(std::size_t eventIndex, const std::string& what)
        : Error("event " + std::to_string(eventIndex) + ": " + what), eventIndex_(eventIndex) {}

    std::size_t eventIndex() const noexcept { return eventIndex_; }

private:
    std::size_t eventIndex_;
};

class SizeError : public Error {
public:
    using Error::Error;
};

} // namespace distbrush
