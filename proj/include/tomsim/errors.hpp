#ifndef TOMSIM_ERRORS_HPP
#define TOMSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tomsim {

// Base class for every error thrown by the library. Callers that do not care
// about the precise failure can catch this one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A world coordinate fell outside the grid.
class OutOfBoundsError : public Error {
public:
    using Error::Error;
};

// A path query was given a start or goal cell that is a wall or out of bounds.
class InvalidCellError : public Error {
public:
    using Error::Error;
};

// No traversable route exists between the requested cells.
class NoPathError : public Error {
public:
    using Error::Error;
};

// An object id was added twice to the same belief state.
class DuplicateIdError : public Error {
public:
    using Error::Error;
};

// An object id was referenced that the belief state does not contain.
class UnknownIdError : public Error {
public:
    using Error::Error;
};

// An observation carried a class label with no believed instance to attach to.
class UnknownClassError : public Error {
public:
    using Error::Error;
};

// An observation carried more detections of a class than believed instances.
class OverfullError : public Error {
public:
    using Error::Error;
};

// An assignment problem had more rows than columns.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Strict-mode map comparison was given class groups of different sizes.
class CardinalityMismatchError : public Error {
public:
    using Error::Error;
};

// An activity name is missing from the relevance map.
class UnknownActivityError : public Error {
public:
    using Error::Error;
};

// A timeline event tried to place an object or agent on a wall cell.
class EventTargetsWallError : public Error {
public:
    using Error::Error;
};

// A scenario or belief document failed to parse; carries a 1-based line number.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

// A scenario parsed but violates a semantic constraint (object on a wall,
// reference to a missing id, out-of-range knob, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace tomsim

#endif
