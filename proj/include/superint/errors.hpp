#pragma once

#include <stdexcept>
#include <string>

namespace superint {

/// Argument outside the region where a formula is defined (chart, angular
/// interval, elliptic-integral range, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The integrand of a third-kind elliptic integral has a pole on the range.
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// No bracketed libration exists for the requested separation constants.
class NoBoundedMotion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A trajectory does not contain enough radial librations for the request.
class InsufficientSpan : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Incremental phase continuation lost track of the branch.
class BranchTrackingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace superint
