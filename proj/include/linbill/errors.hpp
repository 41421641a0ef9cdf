#pragma once

#include <stdexcept>
#include <string>

namespace linbill {

/// Malformed input: dimension mismatch, bad labels, non-unit directions.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input is well-formed but violates a mathematical hypothesis of the operation.
class PreconditionError : public std::domain_error {
public:
    explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

/// The path-length function is not differentiable here (coincident consecutive vertices).
class NonSmoothPoint : public std::domain_error {
public:
    explicit NonSmoothPoint(const std::string& what) : std::domain_error(what) {}
};

class MaxIterations : public std::runtime_error {
public:
    explicit MaxIterations(const std::string& what) : std::runtime_error(what) {}
};

/// A thickened-table hit landed in the overlap of two cylinders, where reflection is undefined.
class CornerCollision : public std::runtime_error {
public:
    explicit CornerCollision(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace linbill
