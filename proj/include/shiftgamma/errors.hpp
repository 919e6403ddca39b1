#pragma once

#include <stdexcept>
#include <string>

namespace shiftgamma {

// Malformed input files (bad JSON, unknown vertices, duplicate ids, ...).
// `where` carries a human-readable location such as "line 3" or a JSON pointer.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, const std::string& where = "")
        : std::runtime_error(where.empty() ? what : what + " (" + where + ")"),
          where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

// Arguments outside an operation's documented domain (mismatched windows,
// m beyond floor(N/2), a point outside [0,1), ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The system itself cannot support the requested analysis: subshifts with too
// few points for separation constants, interval exchanges with rationally
// dependent data, and similar dead ends.
class DegenerateSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller-checkable precondition was violated (e.g. asking for the
// self-similar identity on a pair that is not within the metric threshold).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace shiftgamma
